"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ScenarioError, ValidatedScenario, apply_overrides, loads, scenario_hash, to_dict, validate
from .presets import DESCRIPTIONS, PRESETS, get_preset
from .simulation import DAY_ORDER, SimulationInvariantError

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2
OUT_ENV = "TESTMULT_OUT"


def parse_seeds(text: str) -> list[int]:
    """``"30"`` means seeds 0..29; ``"3,7,9"`` is a list; ``"10-19"`` an inclusive range."""
    text = text.strip()
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip()]
    if "-" in text[1:]:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    n = int(text)
    if n < 1:
        raise ValueError("need at least one seed")
    return list(range(n))


def parse_grid(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def load_scenario(source: str, overrides: Sequence[str] = ()) -> ValidatedScenario:
    """Load a preset name or JSON file, apply ``key=value`` overrides, then validate."""
    if source in PRESETS:
        cfg = get_preset(source)
    else:
        path = Path(source)
        if not path.exists():
            raise ScenarioError([f"{source}: no such file or preset (presets: {', '.join(PRESETS)})"])
        cfg = loads(path.read_text())
    if overrides:
        cfg = apply_overrides(cfg, list(overrides))
    return validate(cfg)


def _out_dir(arg: Optional[str]) -> Path:
    return Path(arg or os.environ.get(OUT_ENV) or "out")


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", help="scenario JSON file")
    src.add_argument("--preset", help=f"bundled scenario ({', '.join(PRESETS)})")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="dotted-path override, e.g. government.theta=0.5 (repeatable)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="testmult", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an ensemble and write per-replication and summary CSVs")
    _add_scenario_args(p)
    p.add_argument("--seeds", default="30", help="count, comma list, or lo-hi range")

    p = sub.add_parser("multiplier", help="estimate GDP and surplus multipliers over a testing grid")
    _add_scenario_args(p)
    p.add_argument("--grid", default="0,0.005,0.01,0.02,0.04,0.08,0.16",
                   help="daily non-severe tests as fractions of P0 (values >= 1 are absolute counts)")
    p.add_argument("--seeds", default="30")

    p = sub.add_parser("validate-sir", help="compare the restricted simulator with the SIR recursion")
    p.add_argument("--beta", type=float, default=0.30)
    p.add_argument("--gamma", type=float, default=1 / 14)
    p.add_argument("--p0", type=int, default=1_000_000)
    p.add_argument("--days", type=int, default=350)
    p.add_argument("--seeds", default="20")
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("presets", help="list or show bundled scenarios")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    return parser


def _source(args) -> str:
    return args.scenario or args.preset or "baseline"


def cmd_simulate(args) -> int:
    from .io import emit_outputs
    from .simulation import run_ensemble

    vs = load_scenario(_source(args), args.set)
    seeds = parse_seeds(args.seeds)
    print(f"simulating {len(seeds)} replication(s)", file=sys.stderr)
    result = run_ensemble(vs, seeds, n_jobs=args.jobs)
    paths = emit_outputs(result, _out_dir(args.out))
    print(f"wrote {len(paths)} files to {_out_dir(args.out)} in {result.manifest.wall_seconds:.1f}s", file=sys.stderr)
    return EXIT_OK


def cmd_multiplier(args) -> int:
    from .experiments import multiplier_curve
    from .io import emit_multiplier_outputs

    vs = load_scenario(_source(args), args.set)
    seeds = parse_seeds(args.seeds)
    grid = parse_grid(args.grid)
    curve = multiplier_curve(vs, grid, seeds, n_jobs=args.jobs)
    manifest = {
        "scenario_hash": scenario_hash(vs.config),
        "scenario": to_dict(vs.config),
        "grid": grid,
        "seeds": seeds,
        "version": __version__,
        "day_order": DAY_ORDER,
    }
    emit_multiplier_outputs(curve, _out_dir(args.out), manifest)
    for row in curve.summary_rows():
        print(f"level {row['level']:g}: gdp_mult mean {row['gdp_mult_mean']:.3f}  "
              f"surplus_mult mean {row['surplus_mult_mean']:.3f}")
    return EXIT_OK


def cmd_validate_sir(args) -> int:
    from .experiments import compare_sir

    res = compare_sir(args.beta, args.gamma, args.p0, args.days, parse_seeds(args.seeds), n_jobs=args.jobs)
    ok = res.sup_error < args.tolerance
    print(f"sup-norm error {res.sup_error:.5f} ({'within' if ok else 'above'} tolerance {args.tolerance})")
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in PRESETS:
            print(f"{name:16s} {DESCRIPTIONS[name]}")
        return EXIT_OK
    if not args.name:
        print("presets show: missing preset name", file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps(to_dict(get_preset(args.name)), indent=2))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "multiplier": cmd_multiplier,
    "validate-sir": cmd_validate_sir,
    "presets": cmd_presets,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ScenarioError as exc:
        print("invalid scenario:", file=sys.stderr)
        for err in exc.errors:
            print(f"  {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationInvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
