"""Test functions ``F(x, y, z) = f(x) g(y, z)`` and the jump functional ``U(F, k)``.

``x`` is a jump-sized increment, ``y`` and ``z`` the variance estimates just
before and just after it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ConfigurationError, SampledPath
from .volatility import JumpSet, LocalVolSeries

#: Floor applied to variance estimates before any logarithm is taken.
C_HAT_FLOOR = 1e-12

F_KINDS = ("indicator_abs_gt_a", "square")
G_KINDS = ("log_likelihood_ratio", "smooth_difference")


def g_llr(y, z):
    """Gaussian log-likelihood ratio for equal variances, ``2 log((y+z)/2) - log y - log z``."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(y <= 0) or np.any(z <= 0):
        raise ValueError("g_llr is defined for positive variances only")
    # ratio of the larger to the smaller keeps the result exactly symmetric
    d = np.maximum(y, z) / np.minimum(y, z) - 1.0
    out = 2.0 * np.log1p(0.5 * d) - np.log1p(d)
    return out if out.ndim else float(out)


def _llr_derivatives(y, z):
    s2 = (y + z) ** 2
    g1 = 2.0 / (y + z) - 1.0 / y
    g2 = 2.0 / (y + z) - 1.0 / z
    g11 = 1.0 / y ** 2 - 2.0 / s2
    g22 = 1.0 / z ** 2 - 2.0 / s2
    g12 = -2.0 / s2
    return g1, g2, g11, g12, g22


def _h(u):
    return u * u / (1.0 + u * u)


def _smooth_derivatives(y, z):
    u = y - z
    q = 1.0 + u * u
    h1 = 2.0 * u / q ** 2
    h2 = (2.0 - 6.0 * u * u) / q ** 3
    return h1, -h1, h2, -h2, h2


@dataclass(frozen=True)
class TestFunction:
    """The product ``f(x) g(y, z)``.

    ``f`` is either the indicator of ``|x| > a`` (optionally smoothed into a
    C1 ramp of half-width ``ramp``) or ``x**2``. ``g`` is the log-likelihood
    ratio or ``h(y - z)`` with ``h(u) = u^2 / (1 + u^2)``.
    """

    __test__ = False

    f_kind: str = "indicator_abs_gt_a"
    g_kind: str = "log_likelihood_ratio"
    a: float = 0.0
    ramp: float = 0.0

    def __post_init__(self):
        if self.f_kind not in F_KINDS:
            raise ValueError(f"f_kind must be one of {F_KINDS}")
        if self.g_kind not in G_KINDS:
            raise ValueError(f"g_kind must be one of {G_KINDS}")
        if self.a < 0 or self.ramp < 0:
            raise ValueError("a and ramp must be >= 0")
        if self.ramp > self.a and self.ramp > 0:
            raise ValueError("ramp half-width cannot exceed a")

    @property
    def p(self) -> float:
        """Smoothness index of ``f`` near zero."""
        if self.f_kind == "square":
            return 2.0
        return np.inf if self.a > 0 else 1.0

    @property
    def is_pivotal(self) -> bool:
        return self.f_kind == "indicator_abs_gt_a" and self.g_kind == "log_likelihood_ratio" \
            and self.ramp == 0

    def f(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if self.f_kind == "square":
            return x * x
        if self.ramp == 0:
            return (x > self.a).astype(float)
        t = np.clip((x - (self.a - self.ramp)) / (2 * self.ramp), 0.0, 1.0)
        return t * t * (3.0 - 2.0 * t)

    def g(self, y, z):
        if self.g_kind == "log_likelihood_ratio":
            return g_llr(y, z)
        return _h(np.asarray(y, dtype=float) - np.asarray(z, dtype=float))

    def g_derivatives(self, y, z):
        """Return ``(g'_1, g'_2, g''_11, g''_12, g''_22)`` at ``(y, z)``."""
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.g_kind == "log_likelihood_ratio":
            return _llr_derivatives(y, z)
        return _smooth_derivatives(y, z)

    def __call__(self, x, y, z):
        return self.f(x) * self.g(y, z)


@dataclass(frozen=True)
class DerivedFunction:
    name: str
    fn: Callable

    def __call__(self, x, y, z):
        return self.fn(x, y, z)


def derived_G_disjoint(tf: TestFunction) -> DerivedFunction:
    """``G = y^2 f(x) (g''_11 + g''_22)``; ``U(G, k_n)`` estimates the null mean of ``k_n U(F, k_n)``."""

    def G(x, y, z):
        _, _, g11, _, g22 = tf.g_derivatives(y, z)
        return np.asarray(y, dtype=float) ** 2 * tf.f(x) * (g11 + g22)

    return DerivedFunction("G_disjoint", G)


def derived_G_common(tf: TestFunction) -> DerivedFunction:
    """``G = 2 f(x)^2 (y^2 g'_1^2 + z^2 g'_2^2)``, the conditional variance density of ``U(F)``."""

    def G(x, y, z):
        g1, g2, *_ = tf.g_derivatives(y, z)
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        return 2.0 * tf.f(x) ** 2 * (y * y * g1 * g1 + z * z * g2 * g2)

    return DerivedFunction("G_common", G)


@dataclass(frozen=True, eq=False)
class FunctionalValue:
    """Value of ``U(F, k)`` plus its per-jump breakdown."""

    value: float
    k: int
    indices: np.ndarray
    sizes: np.ndarray
    c_left: np.ndarray
    c_right: np.ndarray
    summands: np.ndarray
    n_clamped: int = 0
    n_excluded: int = 0

    @property
    def contributing(self) -> list[tuple]:
        return list(zip(self.indices.tolist(), self.sizes.tolist(), self.c_left.tolist(),
                        self.c_right.tolist(), self.summands.tolist()))

    @property
    def n_terms(self) -> int:
        return int(self.indices.size)


def jump_band(jumps: JumpSet, n_obs: int, margin: int) -> np.ndarray:
    """Mask of jumps with ``margin + 1 <= i <= n_obs - margin``."""
    return (jumps.indices >= margin + 1) & (jumps.indices <= n_obs - margin)


def evaluate_U(path: SampledPath, vol: LocalVolSeries, jumps: JumpSet, F, k: int,
               margin: int | None = None) -> FunctionalValue:
    """Sum ``F(dX_i, c_hat_{i-k-1}, c_hat_i)`` over detected jumps.

    Only jumps with ``margin + 1 <= i <= n - margin`` enter (``margin``
    defaults to ``k``), and jumps whose left or right window crosses an
    overnight gap are dropped. Both kinds of exclusion are counted in
    ``n_excluded``. Variance estimates below ``C_HAT_FLOOR`` are raised to it.
    """
    if k != vol.k_n:
        raise ConfigurationError(f"k = {k} does not match the volatility window {vol.k_n}")
    margin = k if margin is None else margin
    if margin < k:
        raise ConfigurationError("margin must be at least k")
    inside = jump_band(jumps, path.n_obs, margin)
    sel = jumps.select(inside)
    left = vol.left(sel.indices)
    right = vol.right(sel.indices)
    ok = np.isfinite(left) & np.isfinite(right)
    sel, left, right = sel.select(ok), left[ok], right[ok]
    n_excluded = jumps.count_N - sel.count_N
    low = (left < C_HAT_FLOOR) | (right < C_HAT_FLOOR)
    left = np.maximum(left, C_HAT_FLOOR)
    right = np.maximum(right, C_HAT_FLOOR)
    if sel.count_N:
        summands = np.asarray(F(sel.sizes, left, right), dtype=float)
    else:
        summands = np.zeros(0)
    return FunctionalValue(
        value=float(np.sum(summands)), k=k, indices=sel.indices, sizes=sel.sizes,
        c_left=left, c_right=right, summands=summands,
        n_clamped=int(low.sum()), n_excluded=int(n_excluded))
