"""Command-line surface: exit codes, input documents and report replay."""

import json

import pytest

from cli import EXIT_FAILED, EXIT_FILTERED, EXIT_INPUT, EXIT_OK, run

HEISENBERG_DOC = {
    "kind": "lie_algebra",
    "name": "heis",
    "basis": ["x", "y", "z"],
    "brackets": [{"left": "x", "right": "y", "result": {"z": "1"}}],
}

DUAL_NUMBERS_DOC = {
    "kind": "frobenius",
    "name": "dual numbers",
    "algebra": {"basis": [{"name": "x", "degree": 0}]},
    "trace": {"x": "1"},
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def output(capsys):
    return json.loads(capsys.readouterr().out)


# ── lie ──


def test_unimodular_exit_codes(capsys):
    assert run(["lie", "unimodular", "--builtin", "heisenberg"]) == EXIT_OK
    assert output(capsys)["unimodular"] is True
    assert run(["lie", "unimodular", "--builtin", "aff1"]) == EXIT_FAILED
    assert output(capsys)["modular_character"] == ["1", "0"]


def test_lie_betti_from_document(tmp_path, capsys):
    path = write(tmp_path, "heis.json", HEISENBERG_DOC)
    assert run(["lie", "betti", "--input", path]) == EXIT_OK
    assert output(capsys)["betti"] == [1, 2, 2, 1]


def test_lie_check_cy_obstruction(capsys):
    assert run(["lie", "check-cy", "--builtin", "aff1", "-L", "3", "--window", "0:2"]) == EXIT_FAILED
    assert output(capsys)["obstruction"]["degree"] == 2


# ── input errors ──


def test_unknown_builtin(capsys):
    assert run(["lie", "unimodular", "--builtin", "so3"]) == EXIT_INPUT
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "SchemaError"


def test_missing_source():
    assert run(["space", "betti"]) == EXIT_INPUT


@pytest.mark.parametrize("argv", [
    ["lie", "unimodular", "--builtin", "heisenberg", "--scalar", "fp:4"],
    ["lie", "unimodular", "--builtin", "heisenberg", "--window", "3:1"],
    ["lie", "unimodular", "--builtin", "heisenberg", "-L", "0"],
])
def test_invalid_options(argv):
    assert run(argv) == EXIT_INPUT


def test_schema_errors(tmp_path):
    bad = dict(HEISENBERG_DOC, brackets=[{"left": "x", "right": "w", "result": {"z": "1"}}])
    assert run(["lie", "betti", "--input", write(tmp_path, "bad.json", bad)]) == EXIT_INPUT
    assert run(["lie", "betti", "--input", write(tmp_path, "kind.json", {"kind": "spreadsheet"})]) == EXIT_INPUT
    assert run(["lie", "betti", "--input", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert run(["space", "betti", "--input", write(tmp_path, "lie.json", HEISENBERG_DOC)]) == EXIT_INPUT


def test_structure_error_maps_to_input_exit():
    # no fundamental class over the rationals
    assert run(["space", "check-pd", "--builtin", "rp2_min"]) == EXIT_INPUT


# ── space ──


def test_space_betti_with_torsion(capsys):
    assert run(["space", "betti", "--builtin", "rp2_min", "--scalar", "z"]) == EXIT_OK
    payload = output(capsys)
    assert payload["groups"]["1"]["torsion"] == [2]
    assert payload["euler_characteristic"] == 1


def test_space_pi1(capsys):
    assert run(["space", "pi1", "--builtin", "rp2_min"]) == EXIT_OK
    assert output(capsys)["order"] == 2


def test_space_check_pd_mod_two(capsys):
    assert run(["space", "check-pd", "--builtin", "rp2_min", "--scalar", "fp:2"]) == EXIT_OK
    assert output(capsys)["definitive"] is True


def test_space_check_pd_with_system_file(tmp_path, capsys):
    system = {"kind": "local_system", "name": "identity", "space": "torus7", "rank": 1,
              "transports": [{"edge": [0, 3], "matrix": [["1"]]}]}
    path = write(tmp_path, "sys.json", system)
    assert run(["space", "check-pd", "--builtin", "torus7", "--system", path]) == EXIT_OK
    assert [s["name"] for s in output(capsys)["systems"]] == ["identity"]


def test_space_check_cy_on_torus_is_filtered(capsys):
    assert run(["space", "check-cy", "--builtin", "torus7"]) == EXIT_FILTERED
    payload = output(capsys)
    assert payload["verdict"] == "VERIFIED_FILTERED"
    assert payload["checks"]["poincare_duality"]["passed"] is True
    assert payload["checks"]["definitive"] is False


def test_space_check_cy_on_projective_plane_mod_two(capsys):
    assert run(["space", "check-cy", "--builtin", "rp2_min", "--scalar", "fp:2"]) == EXIT_OK
    payload = output(capsys)
    assert payload["verdict"] == "VERIFIED"
    assert payload["checks"]["definitive"] is True
    assert payload["untrusted"] == []


# ── coalg / alg ──


def test_coalg_cohh(capsys):
    assert run(["coalg", "cohh", "--builtin", "ce_heisenberg", "-L", "3", "-N", "2"]) == EXIT_OK
    assert output(capsys)["mixed_failures"] == []


def test_coalg_betti_compare_exit_follows_trust(capsys):
    assert run(["coalg", "betti-compare", "--builtin", "s2_min", "-L", "5", "--window", "0:3"]) == EXIT_OK
    payload = output(capsys)
    assert payload["verdict"] == "VERIFIED"
    assert payload["mismatches"] == []
    argv = ["coalg", "betti-compare", "--builtin", "ce_heisenberg", "-L", "3", "--window", "0:2"]
    assert run(argv) == EXIT_FILTERED
    assert output(capsys)["verdict"] == "VERIFIED_FILTERED"


def test_coalg_check_cy_needs_document():
    assert run(["coalg", "check-cy", "--builtin", "ce_heisenberg"]) == EXIT_INPUT


def test_alg_checks(tmp_path, capsys):
    path = write(tmp_path, "frob.json", DUAL_NUMBERS_DOC)
    assert run(["alg", "check-proper-cy", "--input", path]) == EXIT_OK
    assert output(capsys)["verdict"] == "VERIFIED"
    assert run(["alg", "check-proper-cy", "--builtin", "dual_numbers_degenerate"]) == EXIT_FAILED
    capsys.readouterr()
    assert run(["alg", "smooth-cy-on-bar", "--builtin", "dual_numbers_degenerate"]) == EXIT_INPUT


# ── selftest / replay / version ──


def test_selftest_small(capsys):
    assert run(["selftest", "--seed", "3", "--cases", "4"]) == EXIT_OK
    payload = output(capsys)
    assert payload["passed"] is True
    assert payload["cases"] == 4
    assert payload["checks"]["lie.jacobi_iff_d2"] >= 4


def test_report_replay(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert run(["alg", "check-proper-cy", "--builtin", "dual_numbers", "--report", str(report)]) == EXIT_OK
    capsys.readouterr()
    assert run(["replay", str(report)]) == EXIT_OK
    assert output(capsys)["replayed"] is True

    data = json.loads(report.read_text(encoding="utf-8"))
    data["witness"][0]["matrices"]["m"]["entries"] = []
    report.write_text(json.dumps(data), encoding="utf-8")
    assert run(["replay", str(report)]) == EXIT_FAILED
    assert output(capsys)["replayed"] is False


def test_replay_rejects_non_reports(tmp_path):
    assert run(["replay", write(tmp_path, "junk.json", {"hello": "world"})]) == EXIT_INPUT


def test_version(capsys):
    assert run(["version"]) == EXIT_OK
    assert "koszul-cy-toolkit" in capsys.readouterr().out

