"""
Shared pytest fixtures: catalog algebras, their prolongations and seeded randomness
"""

import random
from fractions import Fraction

import pytest

from carnot_conformal.algebra import GradedMap
from carnot_conformal.catalog import catalog_build
from carnot_conformal.exactlin import Matrix
from carnot_conformal.prolong import prolong


# (catalog name, params, expected verdict) for the classification fixtures
FIXTURES = [
    ("abelian", {"n": 3}, "IWASAWA"),
    ("heisenberg", {"n": 1}, "IWASAWA"),
    ("heisenberg", {"n": 2}, "IWASAWA"),
    ("quaternionic_heisenberg", {}, "IWASAWA"),
    ("free_nilpotent", {"m": 3, "step": 2}, "RIGID"),
    ("engel", {}, "RIGID"),
]

FIXTURE_IDS = [
    f"{name}({','.join(str(v) for v in params.values())})" for name, params, _ in FIXTURES
]

_ALGEBRAS = {}
_PROLONGATIONS = {}


def build(name, **params):
    """Catalog algebra, built once per session so lru caches keyed on it are reused"""
    key = (name, tuple(sorted(params.items())))
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = catalog_build(name, params)
    return _ALGEBRAS[key]


def conformal_prolongation(name, **params):
    """Prol(g, ConfDer(g)) of a catalog algebra, computed once per session"""
    key = (name, tuple(sorted(params.items())))
    if key not in _PROLONGATIONS:
        _PROLONGATIONS[key] = prolong(build(name, **params), "conf")
    return _PROLONGATIONS[key]


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def heisenberg():
    return build("heisenberg", n=1)


@pytest.fixture
def heisenberg2():
    return build("heisenberg", n=2)


@pytest.fixture
def abelian3():
    return build("abelian", n=3)


@pytest.fixture
def engel():
    return build("engel")


@pytest.fixture
def free_nilpotent32():
    return build("free_nilpotent", m=3, step=2)


@pytest.fixture
def quaternionic():
    return build("quaternionic_heisenberg")


@pytest.fixture(params=FIXTURES, ids=FIXTURE_IDS)
def catalog_fixture(request):
    """(algebra, expected verdict) for every classification fixture"""
    name, params, expected = request.param
    return build(name, **params), expected


@pytest.fixture(params=FIXTURES, ids=FIXTURE_IDS)
def fixture_prolongation(request):
    name, params, expected = request.param
    return conformal_prolongation(name, **params), expected


def random_rational(rng, bound=5, max_denominator=4):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, max_denominator))


def random_vector(rng, n, bound=5, max_denominator=4):
    return tuple(random_rational(rng, bound, max_denominator) for _ in range(n))


def random_orthogonal(rng, n, rotations=3):
    """
    Random rational orthogonal n x n matrix

    A signed permutation followed by Givens rotations with cosine 3/5 and
    sine 4/5 on random coordinate pairs.
    """
    order = list(range(n))
    rng.shuffle(order)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, k in enumerate(order):
        rows[i][k] = Fraction(rng.choice((1, -1)))
    q = Matrix.from_rows(rows, cols=n)
    if n < 2:
        return q
    c, s = Fraction(3, 5), Fraction(4, 5)
    for _ in range(rotations):
        i, k = rng.sample(range(n), 2)
        g = [[Fraction(int(r == t)) for t in range(n)] for r in range(n)]
        g[i][i], g[i][k], g[k][i], g[k][k] = c, -s, s, c
        q = Matrix.from_rows(g, cols=n) @ q
    return q


def first_layer_change(alg, q):
    """Degree-0 map acting by q on g_{-1} and by the identity on the other layers"""
    blocks = {1: q}
    for j in range(2, alg.step + 1):
        blocks[j] = Matrix.identity(alg.layer_dim(j))
    return GradedMap(0, blocks)
