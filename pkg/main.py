# main.py
# --- lazardlab command line: load .env via config BEFORE other imports ---
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Optional, Sequence

import config
from errors import HypothesisFailure, LazardLabError

log = logging.getLogger("lazardlab.main")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS = 2
EXIT_MISMATCH = 3


def parse_modulus(text: str) -> Optional[int]:
    """'9', '3^2' or 'Z' (exact)."""
    text = text.strip()
    if text.upper() == "Z":
        return None
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2, default=str))


# --------------- subcommands ---------------
def cmd_compare(args) -> int:
    from harness import CoefficientSpec, ExperimentConfig, compare_report, load_experiment_config, write_report

    if args.config:
        cfg = load_experiment_config(args.config)
    else:
        if not args.group or not args.modulus:
            raise ValueError("compare needs --config, or --group with --modulus")
        cfg = ExperimentConfig(group=args.group, coefficients=CoefficientSpec(modulus=parse_modulus(args.modulus),
                                                                              kind=args.kind),
                               max_degree=args.max_degree, precision=args.precision,
                               seed=args.seed if args.seed is not None else config.DEFAULT_SEED)
    report = compare_report(cfg)
    if cfg.output:
        write_report(report, cfg.output)
    print(report.to_json(), end="")
    if not report.match:
        bad = [d.i for d in report.degrees if not d.match]
        print(f"mismatch in degree {bad[0]}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_run(args) -> int:
    from harness import run_named, write_report

    result = run_named(args.name, seed=args.seed, p=args.p, precision=args.precision, max_degree=args.max_degree)
    reports = result if isinstance(result, list) else [result]
    for report in reports:
        path = write_report(report, args.out if len(reports) == 1 else None)
        print(f"{report.experiment}: match={report.match} -> {path}")
    return EXIT_OK if all(r.match for r in reports) else EXIT_MISMATCH


def cmd_check_group(args) -> int:
    from filtered import check_filtration, find_ordered_basis, graded_pieces
    from pgroups import build_group, check_uniform, load_group_spec

    G = build_group(load_group_spec(args.spec, args.precision))
    out = {"group": G.name, "rank": G.rank, "filtration": check_filtration(G, samples=args.samples).to_dict()}
    up_to = min(G.nu0 + 2, G.bottom - Fraction(1, G.e))
    try:
        out["graded_pieces"] = [{"nu": str(piece.nu), "dim": piece.dim} for piece in graded_pieces(G, up_to)]
    except LazardLabError as e:
        out["graded_pieces"] = {"error": str(e)}
    try:
        out["ordered_basis"] = find_ordered_basis(G).to_dict(G)
    except LazardLabError as e:
        out["ordered_basis"] = {"error": str(e)}
    try:
        out["uniformity"] = check_uniform(G, args.depth).to_dict()
    except LazardLabError as e:
        out["uniformity"] = {"error": str(e)}
    _emit(out)
    return EXIT_OK


def cmd_lie_cohom(args) -> int:
    from lazard_lie import load_lattice
    from lie_cohom import CEComplex, cohomology, rational_betti

    L = load_lattice(args.lattice)
    C = CEComplex(L, modulus=parse_modulus(args.mod))
    out = cohomology(C).to_dict()
    if args.betti:
        out["rational_betti"] = rational_betti(C)
    _emit(out)
    return EXIT_OK


def cmd_phi(args) -> int:
    from lazmap import Chart, read_cochain_file, phi_report
    from pgroups import build_group, load_group_spec

    chart = Chart(build_group(load_group_spec(args.group, args.precision)))
    _emit(phi_report(chart, read_cochain_file(args.cochain)).to_dict())
    return EXIT_OK


def cmd_snf(args) -> int:
    from snf_engine import read_matrix_file, snf

    rows, modulus = read_matrix_file(args.matrix)
    if args.mod is not None:
        modulus = parse_modulus(args.mod) or 0
    res = snf(rows, modulus)
    _emit({"modulus": modulus, "divisors": list(res.divisors), "rank": res.rank})
    return EXIT_OK


# --------------- parser ---------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lazardlab",
                                     description="Integral Lazard comparison between group and Lie cohomology.")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from LAZARDLAB_LOG_LEVEL)")
    parser.add_argument("--allow-p2", action="store_true", help="permit p = 2 groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="group vs Lie cohomology, degree by degree")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--group", help="fixture name or group spec file")
    p.add_argument("--modulus", help="coefficient modulus, e.g. 9 or 3^2")
    p.add_argument("--kind", default="trivial", choices=("trivial", "adjoint", "determinant"))
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--precision", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="run a registered experiment ('all' for every one)")
    p.add_argument("name")
    p.add_argument("--p", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="report file or directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check-group", help="filtration axioms, gr, ordered basis and uniformity as JSON")
    p.add_argument("spec", help="fixture name or group spec file")
    p.add_argument("--precision", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=cmd_check_group)

    p = sub.add_parser("lie-cohom", help="CE cohomology of a lattice file or fixture")
    p.add_argument("lattice")
    p.add_argument("--mod", default="Z", help="p^k, or Z for integral divisors")
    p.add_argument("--betti", action="store_true", help="also print rational Betti numbers")
    p.set_defaults(func=cmd_lie_cohom)

    p = sub.add_parser("phi", help="apply the Lazard morphism to a cochain file")
    p.add_argument("group")
    p.add_argument("cochain")
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("snf", help="Smith normal form of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--mod", help="override the modulus in the file")
    p.set_defaults(func=cmd_snf)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config.configure_logging(args.log_level)
    if args.allow_p2:
        config.set_allow_p2_runtime(True)
    try:
        return args.func(args)
    except HypothesisFailure as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (LazardLabError, ValueError, FileNotFoundError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        if args.allow_p2:
            config.set_allow_p2_runtime(None)


if __name__ == "__main__":
    sys.exit(main())
