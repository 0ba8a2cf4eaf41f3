"""Command line: run experiments, solve one instance, or run the oracle suites."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .harness import ALGOS, ConfigError, config_from_preset, load_config, run_experiment
from .mip import EXACT_LIMIT, solve_optimal_weights
from .votemath import oec_prefix


def _parse_p(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omoe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded multi-trial experiment")
    run.add_argument("--config", help="JSON experiment file")
    run.add_argument("--preset", help="named configuration, e.g. SE1 or WV1")
    run.add_argument("--algo", choices=ALGOS)
    run.add_argument("--baseline", help="baseline algorithm, or 'none' to skip it")
    run.add_argument("--trials", type=int)
    run.add_argument("--T", dest="horizon", type=int, help="override the horizon")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", default=None, help="output directory (default: ./out/<config id>)")
    run.add_argument("--allow-network", action="store_true", help="permit remote experts")

    solve = sub.add_parser("solve", help="optimal committee and weights for fixed competencies")
    solve.add_argument("--p", required=True, type=_parse_p, help="comma-separated competencies")
    solve.add_argument("--quota", type=float)

    sub.add_parser("verify", help="run the oracle-equivalence suites")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _run(args) -> int:
    if bool(args.config) == bool(args.preset):
        print("run: give exactly one of --config or --preset (a config file may name a preset)",
              file=sys.stderr)
        return 2
    overrides = {"algo": args.algo, "trials": args.trials, "seed": args.seed,
                 "workers": args.workers, "horizon": args.horizon}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        config = replace(load_config(args.config), **overrides)
    else:
        config = config_from_preset(args.preset, **overrides)
    if args.baseline is not None:
        config = replace(config, baseline=None if args.baseline.lower() == "none" else args.baseline)
    out = args.out or config.out or f"out/{config.config_id}"
    main, base = run_experiment(config, out, allow_network=args.allow_network)
    for s in (main, base):
        if s is not None:
            print(json.dumps(s.table_row(s.pct_r_reduction if s is main else None)))
    print(f"wrote {out}")
    return 0


def _solve(args) -> int:
    p = np.asarray(args.p)
    oec = oec_prefix(p)
    result = {"oec": {"members": list(oec.members), "value": oec.value}}
    if len(p) <= EXACT_LIMIT:
        sol = solve_optimal_weights(p, args.quota)
        result["weights"] = {"theta": sol.weights.tolist(), "quota": sol.quota,
                             "objective": sol.objective, "slack": sol.slack}
    else:
        result["weights"] = None
        print(f"weights: skipped, exact solve limit is {EXACT_LIMIT} experts", file=sys.stderr)
    print(json.dumps(result, indent=2))
    return 0


def _verify(args) -> int:
    from .verify import run_all
    results = run_all()
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": _run, "solve": _solve, "verify": _verify}[args.command](args)
    except (ConfigError, PermissionError, ValueError, KeyError) as exc:
        print(f"error: {exc.args[0] if isinstance(exc, KeyError) else exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
