import pytest

from carnot_conformal.algebra import GradedMap, grading_derivation, is_derivation
from carnot_conformal.derivations import (
    DerivationKind,
    DerivationSpace,
    conf_derivations,
    is_conformal_element,
    is_skew_on_layers,
    iso_derivations,
    operator_norm_growth,
    strata_preserving_derivations,
)
from carnot_conformal.errors import DerivationSpaceError
from carnot_conformal.exactlin import Matrix, SymmetricForm
from carnot_conformal.metric import InnerProductAssignment, induced_metric


@pytest.mark.parametrize("name, der, iso, conf", [
    ("heisenberg", 4, 1, 2),
    ("abelian3", 9, 3, 4),
    ("free_nilpotent32", 9, 3, 4),
    ("engel", 3, 0, 1),
    ("quaternionic", None, 6, 7),
])
def test_derivation_dimensions(name, der, iso, conf, request):
    alg = request.getfixturevalue(name)
    metric = induced_metric(alg)
    if der is not None:
        assert strata_preserving_derivations(alg).dim == der
    assert iso_derivations(alg, metric).dim == iso
    assert conf_derivations(alg, metric).dim == conf


def test_every_basis_element_is_a_derivation(catalog_fixture):
    alg, _ = catalog_fixture
    space = strata_preserving_derivations(alg)
    assert space.kind == DerivationKind.STRATA_PRESERVING
    for d in space.basis:
        assert d.degree == 0
        assert is_derivation(alg, d)


def test_spaces_are_closed_under_brackets(catalog_fixture):
    alg, _ = catalog_fixture
    metric = induced_metric(alg)
    for space in (strata_preserving_derivations(alg), iso_derivations(alg, metric), conf_derivations(alg, metric)):
        assert space.closure_failures() == []


def test_isometric_derivations_skew_on_every_layer(catalog_fixture):
    alg, _ = catalog_fixture
    metric = induced_metric(alg)
    for d in iso_derivations(alg, metric).basis:
        assert is_skew_on_layers(alg, metric, d)


def test_grading_derivation_is_central_in_conf(catalog_fixture):
    alg, _ = catalog_fixture
    space = conf_derivations(alg)
    h = grading_derivation(alg)
    assert space.contains_grading()
    assert space.coordinates(h) == (1,) + (0,) * (space.dim - 1)
    for d in space.basis:
        assert h.commutator(d, alg).to_matrix(alg).is_zero()


def test_conformal_elements(heisenberg):
    metric = induced_metric(heisenberg)
    for d in conf_derivations(heisenberg, metric).basis:
        assert is_conformal_element(heisenberg, d)
        assert is_conformal_element(heisenberg, d, metric)
    stretch = GradedMap(0, {1: Matrix.diagonal([1, 0]), 2: Matrix.from_rows([[1]])})
    assert is_derivation(heisenberg, stretch)
    assert not is_conformal_element(heisenberg, stretch)


def test_custom_g0_accepts_grading_only(heisenberg):
    space = DerivationSpace.custom(heisenberg, [grading_derivation(heisenberg), grading_derivation(heisenberg)])
    assert space.kind == DerivationKind.CUSTOM
    assert space.dim == 1


def test_custom_g0_rejects_non_derivation(heisenberg):
    bad = GradedMap(0, {1: Matrix.identity(2), 2: Matrix.from_rows([[1]])})
    with pytest.raises(DerivationSpaceError):
        DerivationSpace.custom(heisenberg, [bad])


def test_custom_g0_rejects_unclosed_span(heisenberg):
    zero = Matrix.from_rows([[0]])
    raising = GradedMap(0, {1: Matrix.from_rows([[0, 1], [0, 0]]), 2: zero})
    lowering = GradedMap(0, {1: Matrix.from_rows([[0, 0], [1, 0]]), 2: zero})
    with pytest.raises(DerivationSpaceError):
        DerivationSpace.custom(heisenberg, [raising, lowering])


def test_iso_requires_orthonormal_first_layer(heisenberg):
    scaled = InnerProductAssignment(heisenberg, (
        SymmetricForm(Matrix.identity(2).scale(2)),
        SymmetricForm(Matrix.from_rows([[1]])),
    ))
    with pytest.raises(ValueError):
        iso_derivations(heisenberg, scaled)


@pytest.mark.approximate
@pytest.mark.parametrize("name", ["heisenberg", "engel", "free_nilpotent32"])
def test_operator_norm_growth(name, request):
    alg = request.getfixturevalue(name)
    metric = induced_metric(alg)
    for d in strata_preserving_derivations(alg).basis:
        for t in (0.25, -0.5, 1.0):
            for j, value, bound, ok in operator_norm_growth(alg, metric, d, t=t):
                assert ok, f"layer {j}: {value} > {bound}"
