"""The full test pipeline for one sampled path."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (AssumptionIndices, SampledPath, TuningParams, derive_sequences,
                   validate_rate_conditions)
from .functionals import (FunctionalValue, TestFunction, derived_G_common,
                          derived_G_disjoint, evaluate_U)
from .stattests import (METHODS, TestReport, _not_applicable,
                        default_seed, simulate_null_draws, simulated_critical,
                        statistic_Sn, test_common, test_disjoint_chebyshev,
                        test_disjoint_pivotal, truncation_vn, variance_Vn,
                        _functional_diagnostics)
from .volatility import JumpSet, detect_jumps, local_vol, truncation_threshold


@dataclass(frozen=True, eq=False)
class PathStatistics:
    """Everything the five tests need, computed once per path."""

    path: SampledPath
    tuning: TuningParams
    tf: TestFunction
    k_n: int
    thresholds: np.ndarray
    jumps: JumpSet
    U_F: FunctionalValue
    U_G_disjoint: FunctionalValue
    U_F_k_wide: FunctionalValue
    U_F_wk: FunctionalValue
    U_G_common: FunctionalValue
    validation: dict = field(default_factory=dict)

    @property
    def n_jumps(self) -> int:
        return self.jumps.count_N

    @property
    def S_n(self) -> float | None:
        if self.U_F_k_wide.value == 0:
            return None
        return statistic_Sn(self.U_F_k_wide, self.U_F_wk)

    @property
    def V_n(self) -> float | None:
        if self.U_F_k_wide.value == 0:
            return None
        return variance_Vn(self.U_G_common, self.U_F_k_wide, self.k_n, self.tuning.w)


def compute_statistics(path: SampledPath, tuning: TuningParams | None = None,
                       tf: TestFunction | None = None,
                       assume: AssumptionIndices | None = None,
                       per_day: bool = True) -> PathStatistics:
    """Detect jumps and evaluate every functional the tests use.

    The disjoint tests sum over jumps in ``[k_n + 1, n - k_n]``. The ratio
    statistic uses the narrower band ``[w k_n + 1, n - w k_n]`` for both its
    numerator and denominator so the two sums run over the same jumps.
    """
    tuning = tuning or TuningParams()
    assume = assume or AssumptionIndices()
    tf = tf or TestFunction(a=tuning.jump_size_a)
    _, k = derive_sequences(path.grid, tuning)
    wk = tuning.w * k
    u = truncation_threshold(path, tuning, per_day=per_day)
    jumps = detect_jumps(path, u, tuning.jump_size_a)
    vol_k = local_vol(path, k, u)
    vol_wk = local_vol(path, wk, u)
    G_d, G_c = derived_G_disjoint(tf), derived_G_common(tf)
    indicator = tf.f_kind == "indicator_abs_gt_a"
    kinds = {
        "null_disjoint": "disjoint_clt" if indicator else "disjoint_clt_general_F",
        "null_common": "common_clt" if indicator else "common_clt_general_F",
    }
    validation = {h: validate_rate_conditions(assume, tuning, kind, p=tf.p).to_dict()
                  for h, kind in kinds.items()}
    U_F_wk = evaluate_U(path, vol_wk, jumps, tf, wk)
    # jumps whose wide windows are cut by the sample or day edges leave both sums
    shared = jumps.select(np.isin(jumps.indices, U_F_wk.indices))
    return PathStatistics(
        path=path, tuning=tuning, tf=tf, k_n=k, thresholds=u, jumps=jumps,
        U_F=evaluate_U(path, vol_k, jumps, tf, k),
        U_G_disjoint=evaluate_U(path, vol_k, jumps, G_d, k),
        U_F_k_wide=evaluate_U(path, vol_k, shared, tf, k, margin=wk),
        U_F_wk=U_F_wk,
        U_G_common=evaluate_U(path, vol_k, shared, G_c, k, margin=wk),
        validation=validation,
    )


def path_reports(stats: PathStatistics, alphas: Iterable[float] = (0.05,),
                 methods: Sequence[str] = METHODS, n_sim: int = 10_000,
                 rng_seed: int | None = None) -> list[TestReport]:
    """Reports for every requested method and level, in ``methods`` x ``alphas`` order."""
    alphas = list(alphas)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}")
    k, n = stats.k_n, stats.n_jumps
    val_d = {"rate_conditions": stats.validation["null_disjoint"]}
    val_c = {"rate_conditions": stats.validation["null_common"]}
    draws = None
    out = []
    for method in methods:
        for alpha in alphas:
            if method == "chebyshev":
                out.append(test_disjoint_chebyshev(stats.U_F, stats.U_G_disjoint, k, alpha,
                                                   n_jumps=n, diagnostics=val_d))
            elif method == "pivotal_chisq":
                if not stats.tf.is_pivotal:
                    out.append(_not_applicable(
                        "null_disjoint", method, alpha, n,
                        "pivotal region needs indicator f with log-likelihood-ratio g", val_d))
                else:
                    out.append(test_disjoint_pivotal(stats.U_F, stats.jumps, k, alpha, val_d))
            elif method == "simulated":
                diag = {**_functional_diagnostics(stats.U_F), "n_sim": n_sim, **val_d}
                if n == 0:
                    out.append(_not_applicable("null_disjoint", method, alpha, 0,
                                               "no jumps detected", diag))
                    continue
                if draws is None:
                    seed = rng_seed if rng_seed is not None else default_seed(
                        stats.path.values, k, n_sim)
                    draws = simulate_null_draws(stats.U_F, stats.tf, n_sim, seed)
                crit = simulated_critical(draws, alpha) / k
                out.append(TestReport("null_disjoint", method, stats.U_F.value, crit, alpha,
                                      bool(stats.U_F.value > crit), n, diag))
            else:
                diag = {**_functional_diagnostics(stats.U_F_k_wide), **val_c}
                if n == 0:
                    out.append(_not_applicable("null_common", method, alpha, 0,
                                               "no jumps detected", diag))
                    continue
                if stats.U_F_k_wide.value == 0:
                    out.append(_not_applicable("null_common", method, alpha, n,
                                               "no co-jump signal; S_n undefined", diag))
                    continue
                diag["S_n"] = stats.S_n
                diag["V_n"] = stats.V_n
                vn = truncation_vn(k, n) if method == "ratio_truncated" else None
                out.append(test_common(stats.S_n, stats.V_n, alpha, truncation=vn,
                                       n_jumps=n, diagnostics=diag))
    return out


def analyze_path(path: SampledPath, tuning: TuningParams | None = None,
                 alphas: Iterable[float] = (0.05,), methods: Sequence[str] = METHODS,
                 tf: TestFunction | None = None, assume: AssumptionIndices | None = None,
                 n_sim: int = 10_000, rng_seed: int | None = None,
                 per_day: bool = True) -> list[TestReport]:
    """Convenience wrapper: :func:`compute_statistics` then :func:`path_reports`."""
    stats = compute_statistics(path, tuning, tf=tf, assume=assume, per_day=per_day)
    return path_reports(stats, alphas, methods, n_sim=n_sim, rng_seed=rng_seed)
