"""Command line entry point.

Subcommands: ``simulate``, ``mc``, ``test`` and ``validate-rates``. Exit
status is 0 on success, 1 on data errors and 2 on configuration errors.
``COJUMP_OUTPUT_DIR`` overrides the output directory of every subcommand.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .core import (AssumptionIndices, ConfigurationError, DataError, RATE_KINDS,
                   SamplingGrid, SizingError, TuningParams, validate_rate_conditions)
from .data import ingest_csv, load_config, parse_key_values, to_weekly_paths
from .empirical import run_pipeline, write_outputs
from .harness import ExperimentPlan, run_experiment, write_curves_csv, write_density_outputs
from .simulator import scenario_table, simulate_week

ENV_OUTPUT = "COJUMP_OUTPUT_DIR"


def _outdir(arg: str | None, default: str) -> Path:
    return Path(os.environ.get(ENV_OUTPUT) or arg or default)


def _overrides(pairs) -> dict[str, str]:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise ConfigurationError(f"--set expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_simulate(args) -> int:
    table = scenario_table()
    if args.scenario not in table:
        raise ConfigurationError(f"unknown scenario {args.scenario!r}")
    grid = SamplingGrid.from_daily(args.n_per_day, args.days)
    week = simulate_week(table[args.scenario], grid, seed=args.seed)
    out = _outdir(args.out, ".")
    out.mkdir(parents=True, exist_ok=True)
    path_file = out / f"path_{args.scenario}_{args.n_per_day}_{args.seed}.csv"
    with open(path_file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "time", "value"])
        for i, v in enumerate(week.path.values):
            w.writerow([i, f"{i * grid.mesh_delta:.10g}", repr(float(v))])
    summary = {"path": str(path_file), "ground_truth": week.ground_truth,
               "price_jumps": week.true_price_jumps, "vol_jumps": week.true_vol_jumps}
    print(json.dumps(summary, indent=2))
    return 0


_PLAN_KEYS = {"scenarios": str, "n_per_day": int, "alphas": float, "tests": str}


def load_plan(file, overrides=None) -> ExperimentPlan:
    values = parse_key_values(Path(file).read_text()) if file else {}
    values.update(overrides or {})
    kw, tuning = {}, {}
    try:
        for key, value in values.items():
            if key in _PLAN_KEYS:
                kw[key] = tuple(_PLAN_KEYS[key](v.strip()) for v in value.split(",") if v.strip())
            elif key in ("n_reps", "master_seed", "n_sim", "n_jobs"):
                kw[key] = int(value)
            elif key == "n_days":
                kw[key] = float(value)
            elif key in ("varpi", "rho", "trunc_const_a", "window_const", "w"):
                tuning[key] = int(value) if key == "w" else float(value)
            else:
                raise ConfigurationError(f"unknown plan key {key!r}")
        return ExperimentPlan(tuning=TuningParams(**tuning), **kw)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None


def cmd_mc(args) -> int:
    plan = load_plan(args.plan, _overrides(args.set))
    result = run_experiment(plan)
    out = _outdir(args.out, "mc_out")
    files = write_curves_csv(result, out) + write_density_outputs(result, out)
    for c in result.curves:
        print(f"{c.scenario:6s} n={c.n_per_day:<6d} {c.method:16s} {c.truth:9s} "
              + " ".join(f"{a:g}:{r:.3f}" for a, r, *_ in c.points))
    print(f"wrote {len(files)} files to {out}")
    return 0


def cmd_test(args) -> int:
    config = load_config(args.config, _overrides(args.set))
    ticks = ingest_csv(args.data)
    weeks = to_weekly_paths(ticks, config.tuning, max_fill=config.max_fill,
                            split_days=config.split_days)
    result = run_pipeline(config, weeks)
    out = _outdir(args.out, config.output_dir)
    files = write_outputs(result, config, out)
    for row in result.rates:
        print(f"a={row['jump_size']:<8g} weeks with jumps={row['weeks_with_jumps']}")
    if result.note:
        print(result.note)
    print(f"wrote {len(files)} files to {out}")
    return 0


def cmd_validate(args) -> int:
    assume = AssumptionIndices(r=args.r, v=args.v)
    tuning = TuningParams(varpi=args.varpi, rho=args.rho)
    report = validate_rate_conditions(assume, tuning, args.kind, p=args.p)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cojump", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one week and dump the path")
    p.add_argument("--scenario", default="I-j")
    p.add_argument("--n-per-day", type=int, default=5000)
    p.add_argument("--days", type=float, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mc", help="run a Monte Carlo experiment plan")
    p.add_argument("--plan", help="key = value plan file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("test", help="test a timestamp,price CSV week by week")
    p.add_argument("data")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("validate-rates", help="check (varpi, rho) against declared (r, v)")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.5)
    p.add_argument("--varpi", type=float, default=0.49)
    p.add_argument("--rho", type=float, default=0.49)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--kind", choices=RATE_KINDS, default="disjoint_clt")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (DataError, SizingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
