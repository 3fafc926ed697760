# harness.py
# ------------------------------------------------------------
# Experiment plumbing around the two cohomology pipelines.
# • pydantic models: ExperimentConfig / CoefficientSpec in, DegreeComparison /
#   ComparisonVerdict / ExperimentReport out
# • run_compare: hypothesis checks, then group-side stabilized divisors against
#   CE divisors of the Lazard lattice, degree by degree
# • run_named: the experiment registry ("all" runs every entry in a pool)
# • deterministic JSON (sorted keys, no timestamps)
# ------------------------------------------------------------
from __future__ import annotations

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Any, Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config
from errors import ConstructionError, HypothesisFailure, InsufficientPrecision, LazardLabError
from filtered import OrderedBasis, check_filtration, find_ordered_basis
from group_cohom import Coefficients, continuous_cohomology
from lazard_lie import (AdjointAction, DeterminantAction, LieModule, adjoint_module, check_lattice_identity,
                        induced_module, lattice_fixture, lazard_lie, quaternion_lattice)
from lazmap import Chart, chain_map_check, heisenberg_cocycle, phi_report
from lie_cohom import CEComplex, cohomology, exterior_span, is_minimal_mod_p, rational_betti
from pgroups import (MatrixCongruenceGroup, MatrixGroupSpec, build_group, check_uniform, load_group_spec,
                     renormalize_valuation)
from padic_core import RingSpec
from snf_engine import prime_power

log = logging.getLogger("lazardlab.harness")

_BUDGET_LOCK = threading.Lock()


# --------------- models ---------------
class CoefficientSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    modulus: int = Field(..., description="p^k")
    kind: Literal["trivial", "adjoint", "determinant"] = "trivial"
    rank: int = Field(1, ge=1, description="rank of a trivial module")

    @field_validator("modulus")
    @classmethod
    def _prime_power(cls, v: int) -> int:
        prime_power(v)
        return v

    @property
    def k(self) -> int:
        return prime_power(self.modulus)[1]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "compare"
    group: Optional[str] = None
    lattice: Optional[str] = None
    coefficients: CoefficientSpec
    max_degree: int = Field(2, ge=0)
    precision: Optional[int] = Field(None, ge=1)
    level_budget: Optional[int] = Field(None, ge=1)
    quotient_cap: Optional[int] = Field(None, ge=1)
    seed: int = config.DEFAULT_SEED
    output: Optional[str] = None

    @field_validator("group", "lattice")
    @classmethod
    def _source_exists(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        looks_like_path = "/" in v or v.endswith((".txt", ".spec", ".lat"))
        if looks_like_path and not Path(v).is_file():
            raise ValueError(f"file not found: {v}")
        return v

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        problems = []
        if self.group is None and self.lattice is None:
            problems.append("one of 'group' or 'lattice' is required")
        if self.precision is not None and self.precision > config.MAX_PRECISION:
            problems.append(f"precision {self.precision} > LAZARDLAB_MAX_PRECISION={config.MAX_PRECISION}")
        if self.level_budget is not None and self.level_budget > config.LEVEL_BUDGET:
            problems.append(f"level_budget {self.level_budget} > LAZARDLAB_LEVEL_BUDGET={config.LEVEL_BUDGET}")
        if self.quotient_cap is not None and self.quotient_cap > config.QUOTIENT_CAP:
            problems.append(f"quotient_cap {self.quotient_cap} > LAZARDLAB_QUOTIENT_CAP={config.QUOTIENT_CAP}")
        if problems:
            raise ValueError(", ".join(problems))
        return self


class DegreeComparison(BaseModel):
    i: int
    group_divisors: list[int]
    lie_divisors: list[int]
    match: bool


class ComparisonVerdict(BaseModel):
    degrees: list[DegreeComparison] = Field(default_factory=list)
    match: bool = True
    witness_degree: Optional[int] = None
    caveats: list[str] = Field(default_factory=list)
    hypothesis_checks: dict[str, Any] = Field(default_factory=dict)
    stabilization: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _overall(self) -> "ComparisonVerdict":
        self.match = all(d.match for d in self.degrees)
        bad = [d.i for d in self.degrees if not d.match]
        self.witness_degree = bad[0] if bad else None
        return self


class ExperimentReport(BaseModel):
    experiment: str
    p: Optional[int] = None
    e: Optional[int] = None
    precision: Optional[int] = None
    seed: int
    match: bool
    degrees: list[DegreeComparison] = Field(default_factory=list)
    hypothesis_checks: dict[str, Any] = Field(default_factory=dict)
    stabilization: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    caveats: list[str] = Field(default_factory=list)
    inputs: dict[str, Any] = Field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2, default=str) + "\n"


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return ExperimentConfig.model_validate_json(path.read_text(encoding="utf-8"))


def write_report(report: ExperimentReport, out: Optional[str | Path] = None) -> Path:
    target = Path(out) if out else Path(config.REPORT_DIR) / f"{report.experiment}.json"
    if target.suffix != ".json":
        target = target / f"{report.experiment}.json"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(report.to_json(), encoding="utf-8")
    log.info("[harness] wrote %s", target)
    return target


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# --------------- comparison ---------------
@contextmanager
def _budgets(cfg: ExperimentConfig):
    if cfg.level_budget is None and cfg.quotient_cap is None:
        yield
        return
    with _BUDGET_LOCK:
        saved = config.LEVEL_BUDGET, config.QUOTIENT_CAP
        config.LEVEL_BUDGET = cfg.level_budget or saved[0]
        config.QUOTIENT_CAP = cfg.quotient_cap or saved[1]
        try:
            yield
        finally:
            config.LEVEL_BUDGET, config.QUOTIENT_CAP = saved


def check_hypotheses(G: MatrixCongruenceGroup, seed: int) -> dict[str, Any]:
    """
    Equi-p-valuation, then saturation judged on ω' = ω + 1 - t (odd p) or ω itself (p = 2).
    Raises HypothesisFailure naming the first failed one.
    """
    report = check_filtration(G, seed=seed)
    checks: dict[str, Any] = {"filtration": report.to_dict()}
    try:
        basis = find_ordered_basis(G)
    except (ConstructionError, InsufficientPrecision) as e:
        if not report.saturated:
            raise HypothesisFailure("saturated", f"{G.name}: axioms {report.failures() or 'undecided'}") from e
        raise
    checks["ordered_basis"] = basis.to_dict()
    if not basis.equi_p_valued:
        raise HypothesisFailure("equi-p-valued", f"{G.name}: basis valuations {[str(v) for v in basis.valuations]}")
    judged = report
    if G.p != 2:
        judged = check_filtration(renormalize_valuation(G), seed=seed)
        checks["renormalized"] = judged.to_dict() | {"t": str(basis.t)}
    if not judged.saturated:
        raise HypothesisFailure("saturated", f"{judged.group}: axioms {judged.failures() or 'undecided'}")
    return checks


def image_condition(G: MatrixCongruenceGroup, coeff: Coefficients, basis: OrderedBasis) -> dict[str, Any]:
    """ρ(x_i) ≡ 1 mod p on every ordered-basis generator; HypothesisFailure("module image") otherwise."""
    ident = np.eye(coeff.rank, dtype=np.int64)
    failing = [i for i, x in enumerate(basis.elements) if ((coeff.matrix(x) - ident) % G.p).any()]
    verdict = {"checked": "rho(x_i) = 1 mod p", "generators": len(basis.elements),
               "action": "trivial" if coeff.is_trivial else "matrices", "failing": failing,
               "status": "fails" if failing else "holds"}
    if failing:
        raise HypothesisFailure("module image", f"{coeff.label}: generators {failing} act nontrivially mod {G.p}")
    return verdict


def coefficient_pair(G: MatrixCongruenceGroup, L, spec: CoefficientSpec) -> tuple[Coefficients, LieModule]:
    q, k = spec.modulus, spec.k
    if prime_power(q)[0] != G.p:
        raise ValueError(f"coefficient modulus {q} is not a power of p={G.p}")
    if spec.kind == "trivial":
        return Coefficients.trivial(q, spec.rank), LieModule.trivial(L.rank, q, spec.rank)
    if spec.kind == "adjoint":
        return Coefficients(q, L.rank, AdjointAction(G, L, k), f"adjoint mod {q}"), adjoint_module(G, L, k)
    det = DeterminantAction(G, k)
    return Coefficients(q, 1, det, f"det mod {q}"), induced_module(G, det, L, k)


def run_compare(cfg: ExperimentConfig) -> ComparisonVerdict:
    if cfg.group is None:
        raise ValueError("comparison needs a group")
    G = build_group(load_group_spec(cfg.group, cfg.precision))
    checks = check_hypotheses(G, cfg.seed)
    basis = find_ordered_basis(G)
    L = lazard_lie(G, basis)
    coeff, M = coefficient_pair(G, L, cfg.coefficients)
    checks["module"] = {"kind": cfg.coefficients.kind, "modulus": cfg.coefficients.modulus,
                        "image_condition": image_condition(G, coeff, basis)}
    with _budgets(cfg):
        group_side = continuous_cohomology(G, coeff, cfg.max_degree, cfg.seed)
    lie_side = cohomology(CEComplex(L, M))
    degrees = []
    for n in range(cfg.max_degree + 1):
        gd = sorted(group_side.divisors(n))
        ld = sorted(lie_side.divisors(n)) if n <= L.rank else []
        degrees.append(DegreeComparison(i=n, group_divisors=gd, lie_divisors=ld, match=gd == ld))
    caveats = []
    if not group_side.certified:
        caveats.append("group-side stabilization not certified by a closed form")
    for d in group_side.degrees:
        if not d.stabilized:
            caveats.append(f"degree {d.degree} did not stabilize; best effort at level {d.level}")
    verdict = ComparisonVerdict(degrees=degrees, caveats=caveats, hypothesis_checks=checks,
                                stabilization=group_side.to_dict())
    log.info("[harness] %s with %s: match=%s", G.name, coeff.label, verdict.match)
    return verdict


def compare_report(cfg: ExperimentConfig) -> ExperimentReport:
    verdict = run_compare(cfg)
    G_spec = load_group_spec(cfg.group, cfg.precision)
    return ExperimentReport(experiment=cfg.name, p=G_spec.ring.p, e=G_spec.ring.e, precision=G_spec.ring.N,
                            seed=cfg.seed, match=verdict.match, degrees=verdict.degrees,
                            hypothesis_checks=verdict.hypothesis_checks, stabilization=verdict.stabilization,
                            caveats=verdict.caveats, inputs=cfg.model_dump(mode="json"))


# --------------- named experiments ---------------
def _defaults(name: str, overrides: dict) -> dict:
    params = dict(config.EXPERIMENT_DEFAULTS.get(name, {}))
    params.update({k: v for k, v in overrides.items() if v is not None})
    return params


def _morava(params: dict, seed: int) -> ExperimentReport:
    p = int(params["p"])
    L = lattice_fixture("quaternion5") if p == 5 else quaternion_lattice(p)
    report = cohomology(CEComplex(L, modulus=p))
    dims = report.dims()
    expected = [1, 3, 4, 3, 1]
    return ExperimentReport(experiment="morava", p=p, e=2, precision=None, seed=seed, match=dims == expected,
                            results={"lattice": L.to_dict(), "dims": dims, "expected": expected,
                                     "cohomology": report.to_dict()})


def _exterior(params: dict, seed: int) -> ExperimentReport:
    precision, max_degree = int(params["precision"]), int(params["max_degree"])
    results: dict[str, Any] = {}
    ok = True
    for name in params.get("groups", ("heisenberg3", "torus3", "torus3x3")):
        G = build_group(MatrixGroupSpec.from_fixture(name, precision))
        d = G.rank
        L = lazard_lie(G)
        C = CEComplex(L, modulus=G.p)
        lie_dims = cohomology(C).dims()
        spans = exterior_span(C)
        group_side = continuous_cohomology(G, Coefficients.trivial(G.p), max_degree, seed)
        expected = [comb(d, i) for i in range(d + 1)]
        good = (lie_dims == expected and group_side.dims() == expected[:max_degree + 1]
                and all(s.exterior for s in spans))
        ok = ok and good
        results[name] = {"lie_dims": lie_dims, "group_dims": group_side.dims(), "expected": expected,
                         "exterior_span": [vars(s) | {"exterior": s.exterior} for s in spans],
                         "certified": group_side.certified, "match": good}
    return ExperimentReport(experiment="exterior", p=int(params["p"]), e=1, precision=precision, seed=seed,
                            match=ok, results=results)


def _ramified_bases(params: dict, seed: int) -> ExperimentReport:
    precision = int(params["precision"])
    expected = {"ramified5": ["1/2", "1"], "ramified5-weil": ["1", "1"]}
    results, ok = {}, True
    for name, want in expected.items():
        G = build_group(MatrixGroupSpec.from_fixture(name, precision))
        basis = find_ordered_basis(G)
        got = [str(v) for v in basis.valuations]
        results[name] = basis.to_dict(G) | {"expected": want, "match": got == want}
        ok = ok and got == want
    return ExperimentReport(experiment="ramified-bases", p=int(params["p"]), e=2, precision=precision,
                            seed=seed, match=ok, results=results)


def _uniformity(params: dict, seed: int) -> ExperimentReport:
    precision, depth = int(params["precision"]), int(params["depth"])
    results, ok = {}, True
    for name in params.get("groups", ("cyclic3", "torus3", "heisenberg3")):
        G = build_group(MatrixGroupSpec.from_fixture(name, precision))
        verdict = check_uniform(G, depth)
        H = renormalize_valuation(G)
        renormalized = check_filtration(H, seed=seed)
        basis = find_ordered_basis(H)
        good = verdict.uniform and renormalized.saturated and set(basis.valuations) == {Fraction(1)}
        ok = ok and good
        results[name] = {"uniformity": verdict.to_dict(), "renormalized": renormalized.to_dict(),
                         "renormalized_basis": basis.to_dict(), "match": good}
    return ExperimentReport(experiment="uniformity", p=int(params["p"]), e=1, precision=precision, seed=seed,
                            match=ok, results=results)


def _chainmap(params: dict, seed: int) -> ExperimentReport:
    samples = int(params["samples"])
    results, ok = {}, True
    for name in params.get("groups", ("torus3", "heisenberg3", "gl2-3")):
        chart = Chart(build_group(MatrixGroupSpec.from_fixture(name)))
        verdict = chain_map_check(chart, samples=samples, seed=seed)
        results[name] = verdict.to_dict()
        ok = ok and verdict.holds
    chart = Chart(build_group(MatrixGroupSpec.from_fixture("heisenberg3")))
    phi = phi_report(chart, heisenberg_cocycle())
    results["heisenberg_cocycle"] = phi.to_dict()
    ok = ok and phi.bar_cocycle and phi.d_phi.is_zero() and bool(phi.nonzero_mod_p)
    return ExperimentReport(experiment="chainmap", p=int(params["p"]), e=1, seed=seed, match=ok, results=results)


def _two_filtrations(params: dict, seed: int) -> ExperimentReport:
    precision = int(params["precision"])
    expected = {  # (p, filtration) -> (saturated, equi-p-valued)
        (5, "standard"): (False, None),
        (5, "weil"): (True, True),
        (3, "standard"): (True, False),
        (3, "weil"): (True, True),
    }
    results, ok = {}, True
    for (p, filtration), (sat, equi) in expected.items():
        ring = RingSpec(p=p, e=2, eisenstein_poly=(-p, 0, 1), precision_N=precision)
        G = build_group(MatrixGroupSpec(ring, 1, 2, "full", filtration))
        report = check_filtration(G, seed=seed)
        entry: dict[str, Any] = {"filtration_report": report.to_dict(), "saturated": report.saturated}
        good = report.saturated == sat
        if equi is not None:
            basis = find_ordered_basis(G)
            entry["ordered_basis"] = basis.to_dict()
            good = good and basis.equi_p_valued == equi
        entry["match"] = good
        ok = ok and good
        results[f"p={p}/{filtration}"] = entry
    return ExperimentReport(experiment="two-filtrations", e=2, precision=precision, seed=seed, match=ok,
                            results=results)


def _nonsaturated(params: dict, seed: int) -> ExperimentReport:
    precision, max_degree = int(params["precision"]), int(params["max_degree"])
    G = build_group(MatrixGroupSpec.from_fixture("cyclic3-level2", precision))
    report = check_filtration(G, seed=seed)
    saturation = check_filtration(build_group(MatrixGroupSpec.from_fixture("cyclic3", precision)), seed=seed)
    renormalized = check_filtration(renormalize_valuation(G), seed=seed)
    cohom = continuous_cohomology(G, Coefficients.trivial(G.p), max_degree, seed)
    ok = (report.axioms["6"].status == "fails" and saturation.saturated and renormalized.saturated
          and cohom.dims() == [1] * (max_degree + 1))
    return ExperimentReport(experiment="nonsaturated", p=G.p, e=1, precision=precision, seed=seed, match=ok,
                            stabilization=cohom.to_dict(),
                            results={"group": report.to_dict(), "saturation": saturation.to_dict(),
                                     "renormalized": renormalized.to_dict()})


def _torsion(params: dict, seed: int) -> ExperimentReport:
    p = int(params["p"])
    L = lattice_fixture("heisenberg3")
    exact = CEComplex(L)
    mod_p = CEComplex(L, modulus=p)
    betti = rational_betti(exact)
    dims = cohomology(mod_p).dims()
    integral = cohomology(exact)
    ok = betti == [1, 2, 2, 1] and dims == [1, 3, 3, 1] and is_minimal_mod_p(mod_p)
    return ExperimentReport(experiment="torsion", p=p, seed=seed, match=ok,
                            results={"rational_betti": betti, "mod_p_dims": dims, "minimal_mod_p": is_minimal_mod_p(mod_p),
                                     "integral": integral.to_dict()})


COMPARISON_SUITE = (
    ("cyclic3", CoefficientSpec(modulus=9), 1),
    ("heisenberg3", CoefficientSpec(modulus=3), 2),
    ("gl2-3", CoefficientSpec(modulus=3, kind="adjoint"), 1),
)


def _comparison(params: dict, seed: int) -> ExperimentReport:
    precision = int(params["precision"])
    results, ok = {}, True
    caveats: list[str] = []
    for group, coeff, max_degree in COMPARISON_SUITE:
        cfg = ExperimentConfig(name=f"compare-{group}", group=group, coefficients=coeff, max_degree=max_degree,
                               precision=precision, seed=seed)
        verdict = run_compare(cfg)
        results[f"{group}/{coeff.kind}/{coeff.modulus}"] = verdict.model_dump(mode="json")
        ok = ok and verdict.match
        caveats += [f"{group}: {c}" for c in verdict.caveats]
    return ExperimentReport(experiment="comparison", precision=precision, seed=seed, match=ok,
                            results=results, caveats=caveats)


@contextmanager
def _p2_groups():
    with _BUDGET_LOCK:
        saved = config._ALLOW_P2_RUNTIME
        config.set_allow_p2_runtime(True)
        try:
            yield
        finally:
            config.set_allow_p2_runtime(saved)


def _lattice_identity(params: dict, seed: int) -> ExperimentReport:
    precision = int(params.get("precision", 5))
    results, ok = {}, True
    for name in ("cyclic3", "gl2-3", "z2-level2"):
        with _p2_groups():
            G = build_group(MatrixGroupSpec.from_fixture(name, precision))
        verdict = check_lattice_identity(G)
        results[name] = verdict.to_dict() | {"p": G.p}
        ok = ok and verdict.holds
    return ExperimentReport(experiment="lattice-identity", e=1, precision=precision, seed=seed, match=ok,
                            results=results)


EXPERIMENTS: dict[str, Callable[[dict, int], ExperimentReport]] = {
    "morava": _morava,
    "exterior": _exterior,
    "ramified-bases": _ramified_bases,
    "uniformity": _uniformity,
    "chainmap": _chainmap,
    "two-filtrations": _two_filtrations,
    "nonsaturated": _nonsaturated,
    "torsion": _torsion,
    "comparison": _comparison,
    "lattice-identity": _lattice_identity,
}


def run_named(name: str, seed: Optional[int] = None, **overrides) -> ExperimentReport | list[ExperimentReport]:
    """One registered experiment, or every one of them for name == "all" (sorted by name)."""
    seed = config.DEFAULT_SEED if seed is None else seed
    key = (name or "").strip().lower()
    if key == "all":
        names = sorted(EXPERIMENTS)
        with ThreadPoolExecutor(max_workers=config.WORKERS) as pool:
            return list(pool.map(lambda n: _run_one(n, seed, {}), names))
    if key not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment '{name}'; known: " + ", ".join(sorted(EXPERIMENTS) + ["all"]))
    return _run_one(key, seed, overrides)


def _run_one(name: str, seed: int, overrides: dict) -> ExperimentReport:
    params = _defaults(name, overrides)
    log.info("[harness] running %s with %s", name, params)
    try:
        report = EXPERIMENTS[name](params, seed)
    except LazardLabError:
        log.exception("[harness] experiment %s failed", name)
        raise
    report.inputs = _jsonable(params)
    report.results = _jsonable(report.results)
    return report
