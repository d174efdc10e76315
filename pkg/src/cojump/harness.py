"""Monte Carlo size and power experiments with their CSV outputs."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import SamplingGrid, TuningParams
from .pipeline import compute_statistics, path_reports
from .simulator import scenario_family, scenario_table, simulate_week
from .stattests import DISJOINT_METHODS, METHODS, TestReport

log = logging.getLogger(__name__)

NULL_DISJOINT_FAMILIES = ("c", "d")


@dataclass(frozen=True)
class ExperimentPlan:
    scenarios: tuple = ("I-c", "I-d", "I-j")
    n_per_day: tuple = (1000, 5000)
    n_reps: int = 500
    alphas: tuple = (0.01, 0.05, 0.1)
    tests: tuple = METHODS
    master_seed: int = 0
    n_days: float = 5
    n_sim: int = 2000
    n_jobs: int = 1
    tuning: TuningParams = field(default_factory=TuningParams)

    def __post_init__(self):
        table = scenario_table()
        for name in self.scenarios:
            if name not in table:
                raise ValueError(f"unknown scenario {name!r}")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        if not all(0 < a < 1 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 1)")
        bad = set(self.tests) - set(METHODS)
        if bad:
            raise ValueError(f"unknown tests {sorted(bad)}")


@dataclass(frozen=True)
class SizePowerCurve:
    """Empirical rejection rates against nominal level.

    ``points`` holds ``(alpha, rate, stderr, n_applicable)``; weeks where the
    test does not apply are left out of the denominator.
    """

    scenario: str
    method: str
    n_per_day: int
    truth: str
    points: tuple

    def rate(self, alpha: float) -> float:
        for a, r, *_ in self.points:
            if math.isclose(a, alpha):
                return r
        raise KeyError(alpha)


@dataclass
class ExperimentResult:
    curves: list
    samples: dict
    n_discarded: dict

    def curve(self, scenario: str, method: str, n_per_day: int) -> SizePowerCurve:
        for c in self.curves:
            if (c.scenario, c.method, c.n_per_day) == (scenario, method, n_per_day):
                return c
        raise KeyError((scenario, method, n_per_day))


def replication_seed(master_seed: int, scenario: str, n_per_day: int, rep: int,
                     attempt: int = 0) -> np.random.SeedSequence:
    idx = list(scenario_table()).index(scenario)
    return np.random.SeedSequence([master_seed, idx, n_per_day, rep, attempt])


def _one_replication(args):
    plan, scenario, n_per_day, rep = args
    params = scenario_table()[scenario]
    grid = SamplingGrid.from_daily(n_per_day, plan.n_days)
    keep = scenario_family(scenario) != "m"
    for attempt in range(50):
        seq = replication_seed(plan.master_seed, scenario, n_per_day, rep, attempt)
        sim_seed, test_seed = seq.spawn(2)
        week = simulate_week(params, grid, seed=sim_seed)
        if keep or week.has_common_jump:
            break
    else:
        raise RuntimeError(f"no week with a common jump after 50 draws for {scenario}")
    stats = compute_statistics(week.path, plan.tuning)
    reports = path_reports(stats, plan.alphas, plan.tests, n_sim=plan.n_sim,
                           rng_seed=int(test_seed.generate_state(1)[0]))
    decisions = [r.reject for r in reports]
    u_over_n = stats.U_F.value / stats.n_jumps if stats.n_jumps else None
    s_n = stats.S_n
    log_s = math.log(s_n) if s_n else None
    return decisions, u_over_n, log_s, attempt


def run_experiment(plan: ExperimentPlan):
    """Simulate and test every (scenario, sampling frequency) cell.

    Returns an :class:`ExperimentResult` with one curve per
    (scenario, method, n_per_day) and raw samples of ``U(F, k_n)/N`` and
    ``log S_n`` keyed by ``(scenario, n_per_day)``.
    """
    curves, samples, discarded = [], {}, {}
    labels = [(m, a) for m in plan.tests for a in plan.alphas]
    pool = ProcessPoolExecutor(plan.n_jobs) if plan.n_jobs > 1 else None
    try:
        for scenario in plan.scenarios:
            fam = scenario_family(scenario)
            for n in plan.n_per_day:
                jobs = [(plan, scenario, n, rep) for rep in range(plan.n_reps)]
                if pool is None:
                    results = [_one_replication(j) for j in jobs]
                else:
                    results = list(pool.map(_one_replication, jobs, chunksize=8))
                dec = np.array([[np.nan if d is None else float(d) for d in r[0]]
                                for r in results]).reshape(len(results), len(labels))
                samples[(scenario, n)] = {
                    "U_over_N": np.array([r[1] for r in results if r[1] is not None]),
                    "log_S": np.array([r[2] for r in results if r[2] is not None]),
                }
                discarded[(scenario, n)] = sum(r[3] for r in results)
                for method in plan.tests:
                    null_is_disjoint = method in DISJOINT_METHODS
                    truth = "null_true" if (fam in NULL_DISJOINT_FAMILIES) == null_is_disjoint \
                        else "alt_true"
                    points = []
                    for alpha in plan.alphas:
                        col = dec[:, labels.index((method, alpha))]
                        col = col[~np.isnan(col)]
                        m = col.size
                        p = float(col.mean()) if m else float("nan")
                        se = math.sqrt(p * (1 - p) / m) if m else float("nan")
                        points.append((alpha, p, se, m))
                    curves.append(SizePowerCurve(scenario, method, n, truth, tuple(points)))
                log.info("finished %s at n=%d", scenario, n)
    finally:
        if pool is not None:
            pool.shutdown()
    return ExperimentResult(curves, samples, discarded)


def kde(samples, eval_grid) -> np.ndarray:
    """Gaussian kernel density with Silverman's bandwidth ``1.06 s m^(-1/5)``."""
    x = np.asarray(samples, dtype=float)
    grid = np.asarray(eval_grid, dtype=float)
    if x.size < 2:
        raise ValueError("kde needs at least two samples")
    s = x.std(ddof=1)
    if not s > 0:
        raise ValueError("kde needs samples with nonzero variance")
    bw = 1.06 * s * x.size ** -0.2
    out = np.zeros(grid.shape)
    norm = 1.0 / (x.size * bw * math.sqrt(2 * math.pi))
    for chunk in np.array_split(x, max(1, x.size // 4096)):
        z = (grid[..., None] - chunk) / bw
        out += np.exp(-0.5 * z * z).sum(axis=-1)
    return out * norm


@dataclass(frozen=True)
class DecisionMatrix:
    """Percentages of weeks in each accept/reject cell.

    Rows are the disjoint-null decision, columns the common-null decision.
    """

    accept_d_accept_j: float
    accept_d_reject_j: float
    reject_d_accept_j: float
    reject_d_reject_j: float
    n_weeks: int
    n_skipped: int = 0

    def as_array(self) -> np.ndarray:
        return np.array([[self.accept_d_accept_j, self.accept_d_reject_j],
                         [self.reject_d_accept_j, self.reject_d_reject_j]])


def decision_matrix(reports_common: Sequence[TestReport],
                    reports_disjoint: Sequence[TestReport]) -> DecisionMatrix:
    """Cross-tabulate paired common-null and disjoint-null decisions.

    Pairs where either test is not applicable are skipped and counted.
    """
    if len(reports_common) != len(reports_disjoint):
        raise ValueError("reports must be paired week by week")
    if not reports_common:
        raise ValueError("no reports to tabulate")
    counts = np.zeros((2, 2))
    skipped = 0
    for rc, rd in zip(reports_common, reports_disjoint):
        if rc.hypothesis != "null_common" or rd.hypothesis != "null_disjoint":
            raise ValueError("expected (common, disjoint) report pairs")
        wc, wd = rc.diagnostics.get("week"), rd.diagnostics.get("week")
        if wc != wd:
            raise ValueError(f"mismatched weeks {wc!r} and {wd!r}")
        if rc.reject is None or rd.reject is None:
            skipped += 1
            continue
        counts[int(rd.reject), int(rc.reject)] += 1
    total = counts.sum()
    if total == 0:
        raise ValueError("no week has both tests applicable")
    pct = 100.0 * counts / total
    return DecisionMatrix(pct[0, 0], pct[0, 1], pct[1, 0], pct[1, 1], int(total), skipped)


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}"


def write_curves_csv(result: ExperimentResult, outdir) -> list[Path]:
    """One ``curves_<scenario>_<n>.csv`` per cell."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {}
    for c in result.curves:
        path = outdir / f"curves_{c.scenario}_{c.n_per_day}.csv"
        rows = written.setdefault(path, [])
        for alpha, rate, se, m in c.points:
            rows.append([c.method, _fmt(alpha), _fmt(rate), _fmt(se), _fmt(m)])
    for path, rows in written.items():
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "alpha", "reject_rate", "stderr", "n_applicable"])
            w.writerows(rows)
    return list(written)


def write_kde_csv(name: str, x, density, outdir) -> Path:
    path = Path(outdir) / f"kde_{name}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "density"])
        w.writerows([_fmt(float(a)), _fmt(float(b))] for a, b in zip(x, density))
    return path


def write_decisions_csv(matrix: DecisionMatrix, outdir, name: str = "decisions.csv") -> Path:
    path = Path(outdir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["disjoint_null", "accept_common_null", "reject_common_null"])
        w.writerow(["accept", _fmt(matrix.accept_d_accept_j), _fmt(matrix.accept_d_reject_j)])
        w.writerow(["reject", _fmt(matrix.reject_d_accept_j), _fmt(matrix.reject_d_reject_j)])
    return path


def write_density_outputs(result: ExperimentResult, outdir, n_grid: int = 200) -> list[Path]:
    """KDE curves of ``U/N`` and ``log S_n`` for every cell with enough samples."""
    out = []
    for (scenario, n), s in result.samples.items():
        for key in ("U_over_N", "log_S"):
            x = s[key]
            if x.size < 2 or not x.std() > 0:
                continue
            lo, hi = np.quantile(x, [0.005, 0.995])
            grid = np.linspace(lo, hi, n_grid)
            out.append(write_kde_csv(f"{key}_{scenario}_{n}", grid, kde(x, grid), outdir))
    return out
