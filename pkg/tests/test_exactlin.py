from fractions import Fraction

import pytest

from carnot_conformal.errors import DimensionMismatchError, NotInColumnSpaceError, RankDeficiencyError
from carnot_conformal.exactlin import (
    Matrix,
    RowReducer,
    SymmetricForm,
    contains,
    coordinates,
    dot,
    inverse,
    min_norm_preimage,
    nullspace,
    nullspace_of_rows,
    rank,
    rref,
    signature,
    solve,
    span,
    subspace_intersection,
    subspace_sum,
    to_rational,
)
from conftest import random_vector


def test_to_rational_rejects_floats():
    assert to_rational("3/4") == Fraction(3, 4)
    assert to_rational(2) == Fraction(2)
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


def test_rref_and_rank():
    m = Matrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    reduced, pivots = rref(m)
    assert pivots == (0, 1)
    assert reduced.row(0) == (1, 0, 1)
    assert reduced.row(1) == (0, 1, 1)
    assert reduced.row(2) == (0, 0, 0)
    assert rank(m) == 2


def test_rref_is_idempotent(rng):
    for _ in range(20):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = Matrix.from_rows([random_vector(rng, cols) for _ in range(rows)])
        reduced, pivots = rref(m)
        again, again_pivots = rref(reduced)
        assert again == reduced
        assert again_pivots == pivots


def test_rref_of_empty_matrix():
    reduced, pivots = rref(Matrix.zeros(0, 4))
    assert pivots == ()
    assert nullspace(Matrix.zeros(0, 3)) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert reduced.cols == 4


def test_nullspace_annihilated(rng):
    for _ in range(20):
        m = Matrix.from_rows([random_vector(rng, 6) for _ in range(4)])
        basis = nullspace(m)
        assert len(basis) == 6 - rank(m)
        for v in basis:
            assert not any(m @ v)


def test_solve_consistent_and_inconsistent():
    a = Matrix.from_rows([[1, 1], [2, 2]])
    x = solve(a, [3, 6])
    assert a @ x == (3, 6)
    assert solve(a, [3, 7]) is None


def test_inverse_exact(rng):
    a = Matrix.from_rows([[2, 1], [7, 4]])
    assert inverse(a) @ a == Matrix.identity(2)
    with pytest.raises(RankDeficiencyError):
        inverse(Matrix.from_rows([[1, 2], [2, 4]]))


def test_min_norm_preimage_is_orthogonal_to_kernel(rng):
    m = Matrix.from_rows([[1, 1, 0, 2], [0, 1, 1, 1]])
    for _ in range(10):
        b = random_vector(rng, 2)
        x = min_norm_preimage(m, b)
        assert m @ x == b
        for k in nullspace(m):
            assert dot(x, k) == 0


def test_min_norm_preimage_outside_column_space():
    m = Matrix.from_rows([[1, 0], [0, 0]])
    with pytest.raises(NotInColumnSpaceError):
        min_norm_preimage(m, [0, 1])


def test_signature_of_simple_forms():
    assert signature(SymmetricForm(Matrix.diagonal([1, -2, 0, 3]))) == (2, 1, 1)
    # hyperbolic plane: zero diagonal
    assert signature(SymmetricForm(Matrix.from_rows([[0, 1], [1, 0]]))) == (1, 1, 0)
    assert signature(SymmetricForm(Matrix.zeros(3, 3))) == (0, 0, 3)


def test_signature_congruence_invariant(rng):
    form = SymmetricForm(Matrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 1], [0, 0, 1, 0]]))
    expected = signature(form)
    checked = 0
    while checked < 20:
        s = Matrix.from_rows([random_vector(rng, 4) for _ in range(4)])
        if rank(s) < 4:
            continue
        congruent = SymmetricForm(s.T @ form.matrix @ s)
        assert signature(congruent) == expected
        checked += 1


def test_symmetric_form_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymmetricForm(Matrix.from_rows([[1, 2], [3, 4]]))


def test_row_reducer_incremental():
    reducer = RowReducer(4)
    assert reducer.add({0: 1, 1: 2})
    assert reducer.add({1: 1, 3: 1})
    assert not reducer.add({0: 1, 1: 3, 3: 1})
    assert reducer.rank == 2
    assert reducer.contains({0: 2, 1: 4})
    assert not reducer.contains({2: 1})
    for v in reducer.nullspace():
        assert v[0] + 2 * v[1] == 0
        assert v[1] + v[3] == 0


def test_row_reducer_matches_dense(rng):
    for _ in range(10):
        rows = [random_vector(rng, 5) for _ in range(3)]
        sparse_rows = [{i: x for i, x in enumerate(r) if x} for r in rows]
        assert len(nullspace_of_rows(sparse_rows, 5)) == len(nullspace(Matrix.from_rows(rows)))


def test_subspace_operations():
    a = [(1, 0, 0), (0, 1, 0)]
    b = [(0, 1, 0), (0, 0, 1)]
    assert len(subspace_sum(a, b, 3)) == 3
    meet = subspace_intersection(a, b, 3)
    assert meet == [(0, 1, 0)]
    assert contains(a, (2, 3, 0))
    assert not contains(a, (0, 0, 1))
    assert coordinates(a, (2, 3, 0)) == (2, 3)
    assert coordinates(a, (0, 0, 1)) is None
    assert span([(0, 0, 0)], 3) == []


def test_shape_errors():
    with pytest.raises(DimensionMismatchError):
        Matrix.identity(2) @ Matrix.identity(3)
    with pytest.raises(DimensionMismatchError):
        dot((1, 2), (1, 2, 3))
