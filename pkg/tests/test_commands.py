import io
import json

import pytest

from carnot_conformal.commands import EXIT_DEGREE_CAP, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def emit(tmp_path):
    def write(entry, *params):
        path = tmp_path / f"{entry}.json"
        args = ["catalog", "emit", entry, "-o", str(path)]
        for p in params:
            args += ["--param", p]
        code, _, _ = run(*args)
        assert code == EXIT_OK
        return str(path)
    return write


@pytest.fixture
def broken_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({
        "name": "broken",
        "layers": [3, 1, 1],
        "brackets": [
            {"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "1"}]},
            {"left": [1, 3], "right": [2, 1], "value": [{"basis": [3, 1], "coeff": "1"}]},
        ],
    }), encoding="utf-8")
    return str(path)


def test_classify_heisenberg(emit):
    code, out, _ = run("classify", emit("heisenberg"))
    assert code == EXIT_OK
    assert "heisenberg(1): IWASAWA" in out
    assert "Rank-one certificate" in out


def test_classify_json_is_stable(emit):
    path = emit("heisenberg")
    code, first, _ = run("--format", "json", "classify", path)
    assert code == EXIT_OK
    _, second, _ = run("--format", "json", "classify", path)
    assert first == second
    report = json.loads(first)
    assert report["schema"] == "carnot-conformal.report/1"
    assert report["report"] == "classification"
    assert report["verdict"] == "IWASAWA"
    assert report["total_dim"] == 8


def test_classify_rigid(emit):
    code, out, _ = run("--format", "json", "classify", emit("engel"))
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "RIGID"


def test_classify_degree_cap(emit):
    code, out, err = run("classify", "--max-degree", "1", emit("heisenberg"))
    assert code == EXIT_DEGREE_CAP
    assert "Truncated" in out
    assert "[Error]" in err


def test_prolong_full_der_hits_cap(emit):
    code, out, err = run("--format", "json", "prolong", "--g0", "der", "--max-degree", "3", emit("abelian"))
    assert code == EXIT_DEGREE_CAP
    report = json.loads(out)
    assert report["truncated"] is True
    assert "verdict" not in report
    assert "[Warning]" in err


def test_prolong_conf(emit):
    code, out, _ = run("--format", "json", "prolong", emit("heisenberg"))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["layer_dims"] == {"-2": 1, "-1": 2, "0": 2, "1": 2, "2": 1}
    assert report["g0"] == "conf"


def test_validate_reports_jacobi(broken_file):
    code, out, _ = run("validate", broken_file)
    assert code == EXIT_INVALID
    assert "[jacobi]" in out


def test_classify_rejects_invalid_file(broken_file):
    code, _, err = run("classify", broken_file)
    assert code == EXIT_INVALID
    assert "not a valid stratified Lie algebra" in err


def test_malformed_file_reports_location(tmp_path):
    path = tmp_path / "float.json"
    path.write_text(json.dumps({
        "name": "h",
        "layers": [2, 1],
        "brackets": [{"left": [1, 1], "right": [1, 2], "value": [{"basis": [2, 1], "coeff": "0.5"}]}],
    }), encoding="utf-8")
    code, _, err = run("validate", str(path))
    assert code == EXIT_INVALID
    assert "brackets.0.value.0.coeff" in err


def test_missing_file(tmp_path):
    code, _, err = run("validate", str(tmp_path / "absent.json"))
    assert code == EXIT_INVALID
    assert "cannot read" in err


def test_metric_and_derivations(emit):
    path = emit("heisenberg")
    code, out, _ = run("--format", "json", "metric", path)
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["grams"][1] == [["1/2"]]
    assert report["h_type_constant"] == "1/2"
    code, out, _ = run("--format", "json", "derivations", "--kind", "conf", path)
    assert code == EXIT_OK
    report = json.loads(out)
    assert (report["kind"], report["dimension"]) == ("ConfDer", 2)


def test_emit_with_params_to_stdout():
    code, out, _ = run("catalog", "emit", "heisenberg", "--param", "n=2")
    assert code == EXIT_OK
    assert json.loads(out)["layers"] == [4, 1]


def test_catalog_list():
    code, out, _ = run("catalog", "list")
    assert code == EXIT_OK
    for name in ("abelian", "heisenberg", "quaternionic_heisenberg", "free_nilpotent", "engel"):
        assert name in out


def test_catalog_list_filters():
    code, out, _ = run("--format", "json", "catalog", "list", "--tag", "rigid")
    assert code == EXIT_OK
    assert [e["name"] for e in json.loads(out)["entries"]] == ["free_nilpotent", "engel"]
    code, out, _ = run("--format", "json", "catalog", "list", "quaternion")
    assert [e["name"] for e in json.loads(out)["entries"]] == ["quaternionic_heisenberg"]
    code, out, err = run("--format", "json", "catalog", "list", "octonion")
    assert code == EXIT_OK
    assert json.loads(out)["entries"] == []
    assert "[Warning]" in err


def test_catalog_show():
    code, out, _ = run("catalog", "show", "abelian")
    assert code == EXIT_OK
    assert "Expected: IWASAWA" in out
    assert "Layers: [3]" in out
    code, out, _ = run("--format", "json", "catalog", "show", "engel")
    assert code == EXIT_OK
    entry = json.loads(out)["entries"][0]
    assert (entry["name"], entry["layers"], entry["expected"]) == ("engel", [2, 1, 1], "RIGID")
    code, _, err = run("catalog", "show", "octonionic_heisenberg")
    assert code == EXIT_INVALID
    assert "available" in err


def test_catalog_selftest():
    code, out, _ = run("--format", "json", "catalog", "selftest")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["passed"] is True
    assert all(r["ok"] for r in report["results"])


def test_unknown_catalog_entry():
    code, _, err = run("catalog", "emit", "octonionic_heisenberg")
    assert code == EXIT_INVALID
    assert "[Error]" in err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["classify"],
    ["prolong", "--g0", "weird", "x.json"],
    ["catalog"],
])
def test_usage_errors(argv):
    code, _, _ = run(*argv)
    assert code == EXIT_USAGE


def test_invalid_setting_is_usage_error(emit):
    code, _, err = run("classify", "--max-degree", "0", emit("heisenberg"))
    assert code == EXIT_USAGE
    assert "max_degree" in err
