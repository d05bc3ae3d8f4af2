import json

import pytest

from envydiv.cli import main


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def write_prefs(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def hungry_new(tmp_path):
    return write_prefs(tmp_path, "hungry.json", {"r": 3, "kind": "new", "model": "hungry"})


def test_solve_success(capsys, tmp_path, hungry_new):
    out_file = tmp_path / "division.json"
    code, out = run(
        capsys,
        ["solve", "--r", "3", "--space", "c1", "--prefs", hungry_new, "--out", str(out_file)],
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"point", "assignment", "residual", "matrix"}
    assert payload["residual"] <= 1e-6
    assert json.loads(out_file.read_text()) == payload


def test_solve_is_byte_identical_across_runs(capsys, hungry_new):
    code1, out1 = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", hungry_new, "--seed", "3"])
    code2, out2 = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", hungry_new, "--seed", "3"])
    assert code1 == code2 == 0
    assert out1 == out2


def test_solve_old_style_via_reduction(capsys, tmp_path):
    prefs = write_prefs(
        tmp_path, "lifted.json", {"r": 3, "kind": "old", "model": "hungry", "reduction": "psi"}
    )
    code, out = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", prefs])
    assert code == 0
    assert json.loads(out)["residual"] <= 1e-6


def test_solve_validation_failure_exits_3(capsys, tmp_path):
    prefs = write_prefs(
        tmp_path,
        "plain.json",
        {"r": 3, "kind": "new", "model": "gorbushka", "params": {"dte": False}},
    )
    code, out = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", prefs])
    assert code == 3
    assert json.loads(out)["validation_failed"]


def test_solve_budget_exhaustion_exits_2(capsys, tmp_path):
    prefs = write_prefs(
        tmp_path,
        "random.json",
        {"r": 3, "kind": "new", "model": "piecewise_random", "seed": 8},
    )
    code, out = run(
        capsys,
        [
            "solve", "--r", "3", "--space", "c1", "--prefs", prefs,
            "--multistarts", "0", "--max-depth", "0",
        ],
    )
    assert code == 2
    payload = json.loads(out)
    assert payload["budget_exhausted"] and payload["best_residual"] > 1e-6


def test_malformed_json_exits_4(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, out = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", str(path)])
    assert code == 4


def test_unknown_model_exits_4(capsys, tmp_path):
    prefs = write_prefs(tmp_path, "odd.json", {"r": 3, "kind": "new", "model": "nougat"})
    code, out = run(capsys, ["solve", "--r", "3", "--space", "c1", "--prefs", prefs])
    assert code == 4
    assert json.loads(out)["input_error"]


def test_r_mismatch_exits_4(capsys, hungry_new):
    code, _ = run(capsys, ["solve", "--r", "4", "--space", "c1", "--prefs", hungry_new])
    assert code == 4


def test_topology_chessboard(capsys):
    code, out = run(capsys, ["topology", "--complex", "chessboard", "--m", "3", "--n", "2"])
    assert code == 0
    payload = json.loads(out)
    assert payload["betti"] == [0, 1]
    assert payload["euler"] == 0


def test_topology_three_by_five(capsys):
    code, out = run(capsys, ["topology", "--complex", "chessboard", "--m", "3", "--n", "5"])
    assert code == 0
    assert json.loads(out)["betti"][:2] == [0, 0]


def test_topology_pseudomanifold_flag(capsys):
    code, out = run(
        capsys, ["topology", "--complex", "gorbushka-join", "--r", "2", "--pseudomanifold"]
    )
    assert code == 0
    assert json.loads(out)["pseudomanifold"] is True


def test_topology_resource_cap_exits_5(capsys):
    code, out = run(
        capsys,
        ["topology", "--complex", "chessboard", "--m", "4", "--n", "4", "--max-simplices", "10"],
    )
    assert code == 5
    assert json.loads(out)["resource_cap"]


def test_topology_missing_dimensions_exits_4(capsys):
    code, _ = run(capsys, ["topology", "--complex", "chessboard", "--m", "3"])
    assert code == 4


def test_brute_certificate(capsys, tmp_path):
    prefs = write_prefs(
        tmp_path,
        "plain.json",
        {"r": 3, "kind": "new", "model": "gorbushka", "params": {"dte": False}},
    )
    code, out = run(
        capsys, ["brute", "--r", "3", "--space", "c1", "--prefs", prefs, "--grid", "21"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["feasible"] is False
    assert payload["grid_resolution"] == 21
    assert payload["max_min_score"] <= 1e-9


def test_validate_command(capsys, tmp_path, hungry_new):
    code, out = run(
        capsys,
        ["validate", "--prefs", hungry_new, "--space", "c1", "--property", "covering", "--samples", "200"],
    )
    assert code == 0
    assert json.loads(out)["passed"] is True

    plain = write_prefs(
        tmp_path,
        "plain.json",
        {"r": 3, "kind": "new", "model": "gorbushka", "params": {"dte": False}},
    )
    code, out = run(
        capsys,
        ["validate", "--prefs", plain, "--space", "c1", "--property", "covering", "--samples", "400"],
    )
    assert code == 3
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize("name", ["gale", "gorbushka", "burnt", "ppe"])
def test_demos_pass(capsys, name):
    code, out = run(capsys, ["demo", name])
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["scenario"] == name


def test_demo_small_gale(capsys):
    code, out = run(capsys, ["demo", "gale", "--r", "2"])
    assert code == 0
    assert json.loads(out)["pass"] is True
