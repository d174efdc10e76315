"""Critical regions for the two null hypotheses.

Null "disjoint" (no price jump shares its time with a volatility jump) is
tested with three regions: a Chebyshev bound, a simulated conditional law and
the pivotal chi-square law of the log-likelihood-ratio statistic. Null
"common" is tested through the ratio ``S_n = U(F, w k_n) / U(F, k_n)``,
studentised by ``V_n`` or by the truncated ``min(V_n, v_n)``.

All ``test_*`` functions return a :class:`TestReport`. ``reject`` is ``None``
when the test does not apply (no usable jumps).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import special

from .core import UndefinedStatistic
from .functionals import FunctionalValue, TestFunction, evaluate_U
from .volatility import JumpSet, LocalVolSeries

HYPOTHESES = ("null_disjoint", "null_common")
METHODS = ("chebyshev", "simulated", "pivotal_chisq", "ratio_plain", "ratio_truncated")
DISJOINT_METHODS = METHODS[:3]
COMMON_METHODS = METHODS[3:]


def chisq_quantile(alpha: float, dof: int) -> float:
    """Upper ``alpha`` point ``z`` of chi-square(dof): ``P(chi2_dof > z) = alpha``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if int(dof) != dof or dof < 1:
        raise ValueError(f"dof must be a positive integer, got {dof}")
    # inverts the regularized upper incomplete gamma Q(dof/2, z/2)
    return float(2.0 * special.gammainccinv(0.5 * dof, alpha))


def normal_quantile_two_sided(alpha: float) -> float:
    """``z`` with ``P(|N(0,1)| > z) = alpha``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(-special.ndtri(0.5 * alpha))


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test on one window of data.

    ``statistic`` and ``critical_value`` are ``None`` when the test is not
    applicable; ``reject`` is then ``None`` as well.
    """

    __test__ = False

    hypothesis: str
    method: str
    statistic: float | None
    critical_value: float | None
    alpha: float
    reject: bool | None
    n_jumps: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.reject is not None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TestReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TestReport":
        return cls.from_dict(json.loads(line))


def _not_applicable(hypothesis, method, alpha, n_jumps, reason, diagnostics=None):
    diag = dict(diagnostics or {})
    diag["note"] = reason
    return TestReport(hypothesis, method, None, None, alpha, None, n_jumps, diag)


def _functional_diagnostics(U: FunctionalValue) -> dict:
    return {"n_terms": U.n_terms, "excluded_edge_jumps": U.n_excluded,
            "clamped": U.n_clamped,
            "clamp_warning": bool(U.n_terms and U.n_clamped > 0.1 * U.n_terms)}


def test_disjoint_chebyshev(U_F: FunctionalValue, U_G: FunctionalValue, k_n: int,
                            alpha: float, n_jumps: int | None = None,
                            diagnostics: dict | None = None) -> TestReport:
    """Reject when ``U(F, k_n) > U(G, k_n) / (alpha k_n)``; the level is conservative."""
    n = U_F.n_terms + U_F.n_excluded if n_jumps is None else n_jumps
    diag = {**_functional_diagnostics(U_F), **(diagnostics or {})}
    if n == 0:
        return _not_applicable("null_disjoint", "chebyshev", alpha, 0, "no jumps detected", diag)
    crit = U_G.value / (alpha * k_n)
    return TestReport("null_disjoint", "chebyshev", U_F.value, crit, alpha,
                      bool(U_F.value > crit), n, diag)


def default_seed(*parts) -> int:
    """Seed derived from a content hash of arrays and scalars."""
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p, dtype=float).tobytes())
        else:
            h.update(repr(p).encode())
    return int.from_bytes(h.digest()[:8], "little")


def simulate_null_draws(U_F: FunctionalValue, tf: TestFunction, n_sim: int,
                        rng_seed: int | None = None) -> np.ndarray:
    """Draws from the conditional null law of ``k_n U(F, k_n)``.

    Each replication sums, over the jumps that enter ``U_F``,
    ``c_R^2 f(x) (g''_11 V1^2 + g''_22 V2^2 + 2 g''_12 V1 V2)`` with fresh
    standard normals, the second derivatives taken at ``(c_L, c_R)``.
    """
    if rng_seed is None:
        rng_seed = default_seed(U_F.sizes, U_F.c_left, U_F.c_right, n_sim)
    rng = np.random.default_rng(rng_seed)
    m = U_F.n_terms
    if m == 0:
        return np.zeros(n_sim)
    _, _, g11, g12, g22 = tf.g_derivatives(U_F.c_left, U_F.c_right)
    weight = U_F.c_right ** 2 * tf.f(U_F.sizes)
    vm = rng.standard_normal((n_sim, m))
    vp = rng.standard_normal((n_sim, m))
    terms = g11 * vm * vm + g22 * vp * vp + 2.0 * g12 * vm * vp
    return terms @ weight


def simulated_critical(draws: np.ndarray, alpha: float) -> float:
    """The ``ceil(N alpha)``-th largest draw."""
    j = max(1, math.ceil(draws.size * alpha - 1e-9))
    return float(np.partition(draws, draws.size - j)[draws.size - j])


def test_disjoint_simulated(path, vol: LocalVolSeries, jumps: JumpSet, tf: TestFunction,
                            k_n: int, alpha: float, n_sim: int = 10_000,
                            rng_seed: int | None = None,
                            diagnostics: dict | None = None) -> TestReport:
    """Reject when ``k_n U(F, k_n)`` exceeds a Monte Carlo upper quantile of its null law."""
    if n_sim < 100:
        raise ValueError("n_sim must be at least 100")
    U_F = evaluate_U(path, vol, jumps, tf, k_n)
    diag = {**_functional_diagnostics(U_F), "n_sim": n_sim, **(diagnostics or {})}
    if jumps.count_N == 0:
        return _not_applicable("null_disjoint", "simulated", alpha, 0, "no jumps detected", diag)
    if rng_seed is None:
        rng_seed = default_seed(path.values, k_n, n_sim)
    draws = simulate_null_draws(U_F, tf, n_sim, rng_seed)
    crit = simulated_critical(draws, alpha) / k_n
    return TestReport("null_disjoint", "simulated", U_F.value, crit, alpha,
                      bool(U_F.value > crit), jumps.count_N, diag)


def test_disjoint_pivotal(U_F: FunctionalValue, jumps: JumpSet, k_n: int, alpha: float,
                          diagnostics: dict | None = None) -> TestReport:
    """Reject when ``U(F, k_n) > z(alpha, N) / k_n`` with ``N`` the detected jump count.

    Valid for the indicator ``f`` with the log-likelihood-ratio ``g``, where
    ``k_n U(F, k_n)`` is asymptotically chi-square with ``N`` degrees of
    freedom under the null.
    """
    n = jumps.count_N
    diag = {**_functional_diagnostics(U_F), **(diagnostics or {})}
    if n == 0:
        return _not_applicable("null_disjoint", "pivotal_chisq", alpha, 0, "no jumps detected", diag)
    crit = chisq_quantile(alpha, n) / k_n
    return TestReport("null_disjoint", "pivotal_chisq", U_F.value, crit, alpha,
                      bool(U_F.value > crit), n, diag)


def statistic_Sn(U_F_k: FunctionalValue, U_F_wk: FunctionalValue) -> float:
    """Ratio ``U(F, w k_n) / U(F, k_n)``."""
    if U_F_k.value == 0:
        raise UndefinedStatistic("no co-jump signal; S_n undefined")
    return U_F_wk.value / U_F_k.value


def variance_Vn(U_G_k: FunctionalValue, U_F_k: FunctionalValue, k_n: int, w: int) -> float:
    """``(w - 1) U(G, k_n) / (w k_n U(F, k_n)^2)``."""
    if U_F_k.value == 0:
        raise UndefinedStatistic("U(F, k_n) = 0; V_n undefined")
    return (w - 1) * U_G_k.value / (w * k_n * U_F_k.value ** 2)


def truncation_vn(k_n: int, N_nT: int) -> float:
    """Variance cap ``k_n^-1/8 / z(1/2, N)``."""
    if N_nT < 1:
        raise UndefinedStatistic("truncation undefined without jumps")
    return k_n ** -0.125 / chisq_quantile(0.5, N_nT)


def test_common(S_n: float, V_n: float, alpha: float, truncation: float | None = None,
                n_jumps: int = 0, diagnostics: dict | None = None) -> TestReport:
    """Reject the common-jump null when ``|S_n - 1| > z_alpha sqrt(V)``.

    ``V`` is ``V_n`` or, when ``truncation`` is given, ``min(V_n, truncation)``.
    """
    if V_n < 0:
        raise ValueError("V_n must be >= 0")
    diag = dict(diagnostics or {})
    if truncation is None:
        method, var = "ratio_plain", V_n
        diag["truncation_active"] = False
    else:
        method, var = "ratio_truncated", min(V_n, truncation)
        diag["truncation_active"] = bool(truncation < V_n)
        diag["v_n"] = truncation
    diag["variance_used"] = var
    stat = abs(S_n - 1.0)
    crit = normal_quantile_two_sided(alpha) * math.sqrt(var)
    return TestReport("null_common", method, stat, crit, alpha, bool(stat > crit), n_jumps, diag)


for _fn in (test_disjoint_chebyshev, test_disjoint_simulated, test_disjoint_pivotal, test_common):
    _fn.__test__ = False
