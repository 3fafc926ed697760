# tests/test_harness.py
import json

import pytest
from pydantic import ValidationError

from errors import HypothesisFailure
from filtered import find_ordered_basis
from group_cohom import Coefficients
from harness import (
    CoefficientSpec,
    ComparisonVerdict,
    DegreeComparison,
    ExperimentConfig,
    ExperimentReport,
    image_condition,
    load_experiment_config,
    run_compare,
    run_named,
    write_report,
)
from pgroups import build_fixture


def test_coefficient_spec_validation():
    assert CoefficientSpec(modulus=27).k == 3
    with pytest.raises(ValidationError):
        CoefficientSpec(modulus=12)
    with pytest.raises(ValidationError):
        CoefficientSpec(modulus=9, kind="symmetric")


def test_experiment_config_validation():
    coeff = {"modulus": 9}
    with pytest.raises(ValidationError, match="group"):
        ExperimentConfig(coefficients=coeff)
    with pytest.raises(ValidationError):
        ExperimentConfig(group="cyclic3", coefficients=coeff, colour="red")
    with pytest.raises(ValidationError, match="file not found"):
        ExperimentConfig(group="no/such/group.txt", coefficients=coeff)
    with pytest.raises(ValidationError, match="precision"):
        ExperimentConfig(group="cyclic3", coefficients=coeff, precision=10 ** 6)
    cfg = ExperimentConfig(group="cyclic3", coefficients=coeff)
    assert cfg.max_degree == 2


def test_load_experiment_config(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"name": "c3", "group": "cyclic3", "coefficients": {"modulus": 9},
                                "max_degree": 1, "seed": 3}), encoding="utf-8")
    cfg = load_experiment_config(path)
    assert cfg.name == "c3"
    assert cfg.coefficients.modulus == 9
    with pytest.raises(FileNotFoundError):
        load_experiment_config(tmp_path / "missing.json")


def test_verdict_names_first_mismatch():
    verdict = ComparisonVerdict(degrees=[
        DegreeComparison(i=0, group_divisors=[3], lie_divisors=[3], match=True),
        DegreeComparison(i=1, group_divisors=[3], lie_divisors=[3, 3], match=False),
    ])
    assert not verdict.match
    assert verdict.witness_degree == 1


@pytest.mark.parametrize("name", ["morava", "torsion", "ramified-bases", "two-filtrations", "lattice-identity"])
def test_quick_experiments_match(name):
    report = run_named(name)
    assert report.experiment == name
    assert report.match, report.to_json()


def test_unknown_experiment():
    with pytest.raises(ValueError, match="Unknown experiment"):
        run_named("no-such-experiment")


def test_reports_are_deterministic():
    first = run_named("torsion", seed=7).to_json()
    second = run_named("torsion", seed=7).to_json()
    assert first == second
    payload = json.loads(first)
    assert list(payload) == sorted(payload)
    assert payload["results"]["rational_betti"] == [1, 2, 2, 1]


def test_overrides_reach_inputs():
    report = run_named("morava", p=5)
    assert report.inputs["p"] == 5
    assert report.results["dims"] == [1, 3, 4, 3, 1]


def test_compare_cyclic_group_mod_nine():
    cfg = ExperimentConfig(group="cyclic3", coefficients={"modulus": 9}, max_degree=1)
    verdict = run_compare(cfg)
    assert verdict.match
    assert [d.group_divisors for d in verdict.degrees] == [[9], [9]]
    assert [d.lie_divisors for d in verdict.degrees] == [[9], [9]]
    assert verdict.hypothesis_checks["module"]["image_condition"]["status"] == "holds"


def test_compare_judges_saturation_on_renormalized_valuation():
    cfg = ExperimentConfig(group="cyclic3-level2", coefficients={"modulus": 3}, max_degree=1)
    verdict = run_compare(cfg)
    assert verdict.match
    assert verdict.hypothesis_checks["filtration"]["saturated"] is False
    assert verdict.hypothesis_checks["renormalized"]["saturated"] is True
    assert verdict.hypothesis_checks["renormalized"]["t"] == "2"


def test_compare_rejects_unequal_basis_valuations():
    cfg = ExperimentConfig(group="ramified5", coefficients={"modulus": 5}, max_degree=1)
    with pytest.raises(HypothesisFailure) as info:
        run_compare(cfg)
    assert info.value.hypothesis == "equi-p-valued"


def test_image_condition_reports_checked_generators():
    G = build_fixture("cyclic3")
    basis = find_ordered_basis(G)
    verdict = image_condition(G, Coefficients.trivial(9), basis)
    assert verdict["status"] == "holds"
    assert verdict["generators"] == 1
    assert verdict["failing"] == []


def test_image_condition_rejects_action_nontrivial_mod_p():
    G = build_fixture("cyclic3")
    basis = find_ordered_basis(G)
    doubling = Coefficients(9, 1, lambda x: [[2]], "doubling mod 9")
    with pytest.raises(HypothesisFailure) as info:
        image_condition(G, doubling, basis)
    assert info.value.hypothesis == "module image"
    assert image_condition(G, Coefficients(9, 1, lambda x: [[4]], "x4 mod 9"), basis)["status"] == "holds"


def test_compare_rejects_foreign_modulus():
    cfg = ExperimentConfig(group="cyclic3", coefficients={"modulus": 25}, max_degree=1)
    with pytest.raises(ValueError):
        run_compare(cfg)


def test_write_report(tmp_path):
    report = ExperimentReport(experiment="demo", seed=1, match=True, results={"x": 1})
    path = write_report(report, tmp_path / "out")
    assert path == tmp_path / "out" / "demo.json"
    assert json.loads(path.read_text(encoding="utf-8"))["results"] == {"x": 1}
    explicit = write_report(report, tmp_path / "named.json")
    assert explicit.read_text(encoding="utf-8") == report.to_json()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["comparison", "exterior", "uniformity", "nonsaturated", "chainmap"])
def test_slow_experiments_match(name):
    report = run_named(name)
    assert report.match, report.to_json()
