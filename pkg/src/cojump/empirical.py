"""Week-by-week testing of real data over a sweep of jump-size cut-offs."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import RunConfig, WeekPath
from .functionals import TestFunction
from .harness import DecisionMatrix, _fmt, decision_matrix, write_decisions_csv
from .pipeline import compute_statistics, path_reports
from .stattests import TestReport

TABLE_DISJOINT = "pivotal_chisq"
TABLE_COMMON = "ratio_truncated"


@dataclass
class PipelineResult:
    reports: list
    rates: list
    decisions: DecisionMatrix | None
    note: str = ""

    def weeks_with_jumps(self) -> dict[float, int]:
        out = {}
        for row in self.rates:
            out[row["jump_size"]] = row["weeks_with_jumps"]
        return out


def _week_reports(args) -> list[TestReport]:
    config, index, week = args
    out = []
    for j, a in enumerate(config.sweep):
        tuning = config.tuning.replace(jump_size_a=a)
        stats = compute_statistics(week.path, tuning, tf=TestFunction(a=a), assume=config.assume)
        seed = int(np.random.SeedSequence([config.seed, index, j]).generate_state(1)[0])
        for r in path_reports(stats, config.alphas, config.tests, n_sim=config.n_sim,
                              rng_seed=seed):
            r.diagnostics.update(week=week.label, jump_size=a, short_week=week.short_week)
            out.append(r)
    return out


def run_pipeline(config: RunConfig, weeks: list[WeekPath]) -> PipelineResult:
    """Run every selected test on every week for every cut-off in ``config.sweep``.

    Rejection rates are computed over weeks with at least one detected jump
    of the given size. The decision matrix pairs the truncated ratio test
    with the pivotal test at ``decision_alpha`` for the first cut-off.
    """
    weeks = sorted(weeks, key=lambda w: w.label)
    jobs = [(config, i, w) for i, w in enumerate(weeks)]
    if config.n_jobs > 1:
        with ProcessPoolExecutor(config.n_jobs) as pool:
            nested = list(pool.map(_week_reports, jobs))
    else:
        nested = [_week_reports(j) for j in jobs]
    reports = [r for rs in nested for r in rs]

    rates = []
    for a in config.sweep:
        sub = [r for r in reports if r.diagnostics["jump_size"] == a]
        with_jumps = {r.diagnostics["week"] for r in sub if r.n_jumps > 0}
        row = {"jump_size": a, "weeks_with_jumps": len(with_jumps)}
        for method in config.tests:
            for alpha in config.alphas:
                dec = [r.reject for r in sub if r.method == method
                       and math.isclose(r.alpha, alpha) and r.reject is not None]
                row[f"{method}@{alpha:g}"] = float(np.mean(dec)) if dec else float("nan")
                row[f"{method}@{alpha:g}_n"] = len(dec)
        rates.append(row)

    matrix, note = None, ""
    have = TABLE_DISJOINT in config.tests and TABLE_COMMON in config.tests
    if have:
        a0 = config.sweep[0]

        def pick(method):
            return [r for r in reports if r.method == method
                    and r.diagnostics["jump_size"] == a0
                    and math.isclose(r.alpha, config.decision_alpha)]

        rc, rd = pick(TABLE_COMMON), pick(TABLE_DISJOINT)
        if rc and any(r.reject is not None and s.reject is not None for r, s in zip(rc, rd)):
            matrix = decision_matrix(rc, rd)
        else:
            note = "no week with detected jumps; decision matrix empty"
    if not any(row["weeks_with_jumps"] for row in rates):
        note = "no week with detected jumps; aggregate table empty"
    return PipelineResult(reports, rates, matrix, note)


def write_outputs(result: PipelineResult, config: RunConfig, outdir) -> list[Path]:
    """Write ``reports.jsonl``, ``rates.csv``, ``table2.csv`` and ``decisions.csv``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [outdir / "reports.jsonl"]
    with open(written[0], "w") as fh:
        for r in result.reports:
            fh.write(r.to_json() + "\n")

    path = outdir / "rates.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["jump_size", "method", "alpha", "weeks_with_jumps", "n_applicable",
                    "reject_rate"])
        for row in result.rates:
            for method in config.tests:
                for alpha in config.alphas:
                    key = f"{method}@{alpha:g}"
                    w.writerow([_fmt(row["jump_size"]), method, _fmt(alpha),
                                row["weeks_with_jumps"], row[key + "_n"], _fmt(row[key])])
    written.append(path)

    path = outdir / "table2.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        cols = [(m, a) for m in (TABLE_DISJOINT, TABLE_COMMON) if m in config.tests
                for a in config.alphas]
        w.writerow(["jump_size", "weeks_with_jumps"] + [f"{m}@{a:g}" for m, a in cols])
        for row in result.rates:
            w.writerow([_fmt(row["jump_size"]), row["weeks_with_jumps"]]
                       + [_fmt(row[f"{m}@{a:g}"]) for m, a in cols])
        if result.note:
            w.writerow([f"# {result.note}"])
    written.append(path)

    if result.decisions is not None:
        written.append(write_decisions_csv(result.decisions, outdir))
    return written
