import json

import pytest
from pydantic import ValidationError

from carnot_conformal.algebra import validate
from carnot_conformal.algebra_schema import (
    algebra_from_file,
    algebra_to_file,
    dump_algebra_file,
    get_algebra_schema,
    parse_algebra_text,
    validate_algebra_file,
)
from carnot_conformal.catalog import (
    CATALOG,
    SELF_TEST,
    catalog_build,
    expected_verdict,
    get_entry_summary,
    parse_params,
    search_entries,
)
from carnot_conformal.errors import UnknownCatalogEntryError
from carnot_conformal.report_schema import Verdict


def test_catalog_entries_build_valid_algebras():
    for name in CATALOG:
        alg = catalog_build(name)
        assert validate(alg).valid, name


def test_catalog_parameters():
    assert catalog_build("heisenberg", {"n": 3}).layer_dims == (6, 1)
    assert catalog_build("free_nilpotent", {"m": 4}).layer_dims == (4, 6)
    assert catalog_build("abelian", {"n": 5}).name == "abelian(5)"
    with pytest.raises(ValueError):
        catalog_build("abelian", {"n": 2})
    with pytest.raises(ValueError):
        catalog_build("engel", {"n": 2})


def test_unknown_entry():
    with pytest.raises(UnknownCatalogEntryError) as info:
        catalog_build("octonionic_heisenberg")
    assert "available" in str(info.value)
    with pytest.raises(KeyError):
        catalog_build("nope")


def test_expected_verdicts():
    assert expected_verdict("heisenberg") == Verdict.IWASAWA
    assert expected_verdict("engel") == Verdict.RIGID
    assert expected_verdict("free_nilpotent") == Verdict.RIGID
    assert expected_verdict("free_nilpotent", {"m": 2}) == Verdict.IWASAWA
    assert len(SELF_TEST) == 6


def test_quaternionic_convention(quaternionic):
    table = quaternionic.table
    # [1, i] = 2 i and [i, j] = 2 Im(conj(i) j) = -2 k
    assert table.bracket_basis(0, 1) == {4: 2}
    assert table.bracket_basis(1, 2) == {6: -2}
    assert table.bracket_basis(2, 1) == {6: 2}


def test_parse_params():
    assert parse_params(["n=2", " m = 3"]) == {"n": 2, "m": 3}
    assert parse_params(None) == {}
    with pytest.raises(ValueError):
        parse_params(["n"])
    with pytest.raises(ValueError):
        parse_params(["n=two"])


def test_search_entries():
    assert [entry_id for entry_id, _ in search_entries(tags=["rigid"])] == ["free_nilpotent", "engel"]
    assert [entry_id for entry_id, _ in search_entries("quaternion")] == ["quaternionic_heisenberg"]
    assert "Expected: IWASAWA" in get_entry_summary("abelian")


def test_file_round_trip_preserves_brackets(engel):
    text = dump_algebra_file(algebra_to_file(engel))
    again = algebra_from_file(parse_algebra_text(text))
    assert again.layer_dims == engel.layer_dims
    assert again.table.constants == engel.table.constants
    data = json.loads(text)
    assert data["brackets"][0] == {
        "left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "1/1"}],
    }


def test_repeated_records_are_summed():
    document = validate_algebra_file({
        "name": "h",
        "layers": [2, 1],
        "brackets": [
            {"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "1/2"}]},
            {"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "1/2"}]},
        ],
    })
    alg = algebra_from_file(document)
    assert alg.table.bracket_basis(0, 1) == {2: 1}
    assert alg.table.bracket_basis(1, 0) == {2: -1}


@pytest.mark.parametrize("forward", [[], [{"basis": [2, 1], "coeff": "0"}]])
def test_explicit_zero_conflicts_with_reverse_pair(forward):
    document = validate_algebra_file({
        "name": "h",
        "layers": [2, 1],
        "brackets": [
            {"left": [1, 1], "right": [1, 2], "value": forward},
            {"left": [1, 2], "right": [1, 1], "value": [{"basis": [2, 1], "coeff": "1"}]},
        ],
    })
    alg = algebra_from_file(document)
    assert alg.table.bracket_basis(0, 1) == {}
    result = validate(alg)
    assert not result.valid
    assert any(v.kind == "antisymmetry" for v in result.violations)


@pytest.mark.parametrize("brackets", [
    [{"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "0.5"}]}],
    [{"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": 0.5}]}],
    [{"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "1/0"}]}],
    [{"left": [1, 1], "right": [1, 3], "value": [{"basis": [2, 1], "coeff": "1"}]}],
    [{"left": [1, 1], "right": [1, 2], "value": [{"basis": [3, 1], "coeff": "1"}]}],
])
def test_malformed_files_rejected(brackets):
    with pytest.raises(ValidationError):
        validate_algebra_file({"name": "h", "layers": [2, 1], "brackets": brackets})


def test_layers_must_be_positive():
    with pytest.raises(ValidationError):
        validate_algebra_file({"name": "h", "layers": [2, 0]})
    with pytest.raises(ValidationError):
        validate_algebra_file({"name": "h", "layers": []})


def test_schema_mentions_basis_labels():
    schema = json.dumps(get_algebra_schema())
    assert "1-based" in schema
