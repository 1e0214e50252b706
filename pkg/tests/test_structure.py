from functools import lru_cache

import pytest

from carnot_conformal.algebra import LieTable, StratifiedAlgebra
from carnot_conformal.errors import (
    AlgebraValidationError,
    CertificateNotApplicableError,
    DegreeCapExceededError,
)
from carnot_conformal.exactlin import add_vectors, contains, unit_vector
from carnot_conformal.prolong import prolong
from carnot_conformal.report_schema import Verdict
from carnot_conformal.structure import (
    centroid_dim,
    classify,
    derived_series,
    graded_ideal_search,
    is_H_graded,
    is_solvable,
    killing_form,
    rank_one_certificate,
    solvable_radical,
)
from conftest import FIXTURE_IDS, FIXTURES, build, conformal_prolongation


@lru_cache(maxsize=None)
def _classified(name, params):
    return classify(build(name, **dict(params)))


def classified(name, params):
    return _classified(name, tuple(sorted(params.items())))


@pytest.mark.parametrize("name, params, expected", FIXTURES, ids=FIXTURE_IDS)
def test_dichotomy(name, params, expected):
    report = classified(name, params)
    assert report.verdict == Verdict(expected)
    assert report.verdict != Verdict.INCONCLUSIVE


@pytest.mark.parametrize("name, params, expected", FIXTURES, ids=FIXTURE_IDS)
def test_structure_certificates(name, params, expected):
    report = classified(name, params)
    if expected == "IWASAWA":
        assert report.killing_signature[2] == 0
        assert report.radical_dim == 0
        assert report.centroid_dim == 1
        cert = report.rank_one_certificate
        assert cert.passed
        assert cert.centralizer_signature == [1, cert.centralizer_dim - 1, 0]
        assert cert.centralizer_in_degree_zero
    else:
        assert report.total_dim == report.base_dim
        assert report.radical_graded
        assert report.rank_one_certificate is None


def test_heisenberg_report_values():
    report = classified("heisenberg", {"n": 1})
    assert report.total_dim == 8
    assert report.conf_dim == 2
    assert report.layer_dims == {"-2": 1, "-1": 2, "0": 2, "1": 2, "2": 1}
    assert report.rank_one_certificate.killing_h_h == "12/1"
    assert report.rank_one_certificate.centralizer_dim == 2


def test_rigid_report_values():
    fn = classified("free_nilpotent", {"m": 3, "step": 2})
    assert (fn.total_dim, fn.conf_dim) == (10, 4)
    engel = classified("engel", {})
    assert (engel.total_dim, engel.conf_dim) == (5, 1)


def test_killing_form_pairs_opposite_degrees(fixture_prolongation):
    prol, _ = fixture_prolongation
    form = killing_form(prol.table)
    degrees = prol.table.degrees
    for a in range(prol.dim):
        for b in range(prol.dim):
            if degrees[a] + degrees[b] != 0:
                assert form.matrix[a, b] == 0


def test_killing_form_is_ad_invariant():
    table = conformal_prolongation("heisenberg", n=1).table
    form = killing_form(table)
    basis = [unit_vector(table.dim, a) for a in range(table.dim)]
    for z in basis:
        for x in basis:
            zx = table.bracket(z, x)
            for y in basis:
                assert form(zx, y) + form(x, table.bracket(z, y)) == 0


def test_centroid_counts_simple_summands():
    table = conformal_prolongation("heisenberg", n=1).table
    doubled = LieTable.direct_sum(table, table)
    assert centroid_dim(table) == 1
    assert centroid_dim(doubled) == 2
    ideals = graded_ideal_search(doubled)
    assert sorted(len(ideal) for ideal in ideals) == [8, 8]
    assert all(is_H_graded(doubled, ideal) for ideal in ideals)


def test_rigid_radical_contains_algebra_and_grading_element():
    prol = conformal_prolongation("free_nilpotent", m=3, step=2)
    radical = solvable_radical(prol)
    assert len(radical) == 7
    for a in range(prol.alg.dim):
        assert contains(radical, unit_vector(prol.dim, a))
    assert contains(radical, prol.grading_vector())
    assert is_H_graded(prol, radical)


def test_certificate_needs_positive_part():
    with pytest.raises(CertificateNotApplicableError):
        rank_one_certificate(conformal_prolongation("engel"))


def test_solvability(heisenberg):
    assert is_solvable(heisenberg.table)
    assert derived_series(heisenberg.table)[-1] == []
    assert not is_solvable(conformal_prolongation("abelian", n=3).table)


def test_centroid_of_abelian_table(abelian3):
    # no grading element: every endomorphism commutes with ad = 0
    assert centroid_dim(abelian3.table) == 9


def test_graded_ideal_search(heisenberg):
    ideals = graded_ideal_search(heisenberg.table)
    assert [(0, 0, 1)] in ideals
    assert graded_ideal_search(conformal_prolongation("heisenberg", n=1).table) == []


def test_is_h_graded(heisenberg):
    assert is_H_graded(heisenberg.table, [(1, 0, 0), (0, 0, 1)])
    assert not is_H_graded(heisenberg.table, [(1, 0, 1)])
    assert is_H_graded(heisenberg.table, [])


def test_classify_rejects_invalid_algebra():
    broken = StratifiedAlgebra.from_brackets("broken", [3, 1, 1], {(0, 1): {3: 1}, (2, 3): {4: 1}})
    with pytest.raises(AlgebraValidationError) as info:
        classify(broken)
    assert any(v.kind == "jacobi" for v in info.value.violations)


def test_classify_reports_degree_cap(heisenberg):
    with pytest.raises(DegreeCapExceededError) as info:
        classify(heisenberg, max_degree=1)
    assert info.value.prolongation.truncated


def test_mixed_degree_span_is_not_graded():
    prol = conformal_prolongation("heisenberg", n=1)
    x, h = unit_vector(prol.dim, 0), prol.grading_vector()
    assert not is_H_graded(prol, [add_vectors(x, h)])
    assert is_H_graded(prol, [x, h])


def test_truncated_prolongation_has_no_structure(heisenberg):
    truncated = prolong(heisenberg, "conf", max_degree=1)
    assert truncated.truncated
    with pytest.raises(DegreeCapExceededError) as info:
        killing_form(truncated)
    assert info.value.prolongation is truncated
    with pytest.raises(DegreeCapExceededError):
        centroid_dim(truncated)
