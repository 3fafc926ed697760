# tests/test_main.py
import json

import pytest

from main import EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_OK, main, parse_modulus


def test_parse_modulus():
    assert parse_modulus("27") == 27
    assert parse_modulus("3^2") == 9
    assert parse_modulus(" z ") is None
    with pytest.raises(ValueError):
        parse_modulus("nine")


def test_lie_cohom_mod_p(capsys):
    assert main(["lie-cohom", "heisenberg3", "--mod", "3"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert [d["mod_p_dim"] for d in out["degrees"]] == [1, 3, 3, 1]


def test_lie_cohom_integral_with_betti(capsys):
    assert main(["lie-cohom", "heisenberg3", "--betti"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["rational_betti"] == [1, 2, 2, 1]
    assert out["degrees"][2]["divisors"] == [3, 0, 0]


def test_lie_cohom_from_file(tmp_path, capsys):
    path = tmp_path / "ab.lat"
    path.write_text("2\np 5\n", encoding="utf-8")
    assert main(["lie-cohom", str(path), "--mod", "25"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["degrees"][1]["divisors"] == [25, 25]


def test_snf(tmp_path, capsys):
    path = tmp_path / "m.txt"
    path.write_text("2 2 0\n2 0\n0 3\n", encoding="utf-8")
    assert main(["snf", str(path)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["divisors"] == [1, 6]
    assert main(["snf", str(path), "--mod", "3^2"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["divisors"] == [1, 3]


def test_missing_file_is_an_error(capsys):
    assert main(["snf", "does-not-exist.txt"]) == EXIT_ERROR
    assert "[ERROR]" in capsys.readouterr().err


def test_unknown_experiment_exits_with_error():
    assert main(["run", "no-such-experiment"]) == EXIT_ERROR


def test_unequal_basis_valuations_exit_with_hypothesis_code(capsys):
    code = main(["compare", "--group", "ramified5", "--modulus", "5", "--max-degree", "1"])
    assert code == EXIT_HYPOTHESIS
    assert "equi-p-valued" in capsys.readouterr().err


def test_compare_needs_a_source():
    assert main(["compare", "--modulus", "9"]) == EXIT_ERROR


def test_compare_cyclic_group(capsys):
    code = main(["compare", "--group", "cyclic3", "--modulus", "9", "--max-degree", "1"])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["match"] is True


def test_phi_on_cochain_file(tmp_path, capsys):
    path = tmp_path / "cocycle.txt"
    path.write_text("arity 2\nvars 3\ndegree 3\n1 1 0 0 0 0 1\n", encoding="utf-8")
    assert main(["phi", "heisenberg3", str(path)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["bar_cocycle"] is True
    assert out["phi"]["support"] == [[[0, 2], "1"]]
    assert out["nonzero_mod_p"] is True


def test_check_group(capsys):
    assert main(["check-group", "cyclic3", "--precision", "10", "--samples", "10"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["filtration"]["saturated"] is True
    assert out["ordered_basis"]["valuations"] == ["1"]
    assert out["uniformity"]["uniform"] is True


def test_run_writes_report(tmp_path, capsys):
    target = tmp_path / "torsion.json"
    assert main(["run", "torsion", "--out", str(target)]) == EXIT_OK
    assert json.loads(target.read_text(encoding="utf-8"))["match"] is True
    assert "torsion: match=True" in capsys.readouterr().out


def test_p2_group_needs_flag(capsys):
    assert main(["check-group", "z2-level2", "--samples", "5"]) == EXIT_ERROR
    assert main(["--allow-p2", "check-group", "z2-level2", "--precision", "10", "--samples", "5"]) == EXIT_OK
