"""Two-factor stochastic volatility model with price and volatility jumps.

    dX   = sqrt(V1 + V2) dW + alpha0 * x dmu
    dV1  = kappa1 (theta - V1) dt + sigma sqrt(V1) dW'
    dV2  = -kappa2 V2 dt + alpha1 * y dmu + alpha2 * y dmu'

``mu`` marks ``(x, y)`` with ``|x|`` uniform on ``[l, h]`` (random sign) and
``y`` uniform on ``[d, u]``; ``mu'`` is an independent Poisson measure with
marks ``y`` uniform on ``[d, u]``. Both have intensity ``lambda`` per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SampledPath, SamplingGrid


@dataclass(frozen=True)
class ScenarioParams:
    kappa1: float
    theta: float
    sigma: float
    kappa2: float
    alpha0: float
    alpha1: float
    alpha2: float
    lam: float
    l: float
    h: float
    d: float | None = None
    u: float | None = None

    def __post_init__(self):
        if not 0 < self.l < self.h:
            raise ValueError("need 0 < l < h")
        if (self.alpha1 or self.alpha2) and not (
                self.d is not None and self.u is not None and 0 < self.d < self.u):
            raise ValueError("volatility jumps need 0 < d < u")
        if min(self.lam, self.kappa1, self.kappa2, self.sigma, self.theta) < 0:
            raise ValueError("lambda, kappa1, kappa2, sigma and theta must be >= 0")

    @property
    def mean_vol_mark(self) -> float:
        return 0.0 if self.d is None else 0.5 * (self.d + self.u)

    def stationary_v2(self) -> float:
        """Long-run mean of the jump-driven factor."""
        if self.kappa2 == 0:
            return 0.0
        return (self.alpha1 + self.alpha2) * self.lam * self.mean_vol_mark / self.kappa2


# kappa1, theta, sigma, kappa2, alpha0, alpha1, alpha2, lambda, l, h, d, u
_TABLE = {
    "I-c": (0.02, 0.4, 0.04, 0.5, 1, 0, 0, 0.5, 0.1, 1.0420, None, None),
    "II-c": (0.02, 0.4, 0.04, 0.5, 1, 0, 0, 1.0, 0.1, 0.7197, None, None),
    "III-c": (0.02, 0.4, 0.04, 0.5, 1, 0, 0, 4.0, 0.1, 0.3275, None, None),
    "I-d": (0.02, 0.4, 0.04, 0.5, 1, 0, 1, 0.5, 0.1, 1.0420, 0.04, 0.7600),
    "II-d": (0.02, 0.4, 0.04, 0.5, 1, 0, 1, 1.0, 0.1, 0.7197, 0.04, 0.3600),
    "III-d": (0.02, 0.4, 0.04, 0.5, 1, 0, 1, 4.0, 0.1, 0.3275, 0.04, 0.0600),
    "I-j": (0.02, 0.4, 0.04, 0.5, 1, 1, 0, 0.5, 0.1, 1.0420, 0.04, 0.7600),
    "II-j": (0.02, 0.4, 0.04, 0.5, 1, 1, 0, 1.0, 0.1, 0.7197, 0.04, 0.3600),
    "III-j": (0.02, 0.4, 0.04, 0.5, 1, 1, 0, 4.0, 0.1, 0.3275, 0.04, 0.0600),
    "I-m": (0.00, 0.0, 0.00, 0.5, 1, 1, 1, 0.5, 0.1, 1.0420, 0.04, 0.7600),
    "II-m": (0.00, 0.0, 0.00, 0.5, 1, 1, 1, 1.0, 0.1, 0.7197, 0.04, 0.3600),
    "III-m": (0.00, 0.0, 0.00, 0.5, 1, 1, 1, 4.0, 0.1, 0.3275, 0.04, 0.0600),
}


def scenario_table() -> dict[str, ScenarioParams]:
    """The twelve Monte Carlo parameter settings, keyed ``I-c`` ... ``III-m``."""
    return {name: ScenarioParams(*row) for name, row in _TABLE.items()}


def scenario_family(name: str) -> str:
    """Trailing letter of a scenario name: ``c``, ``d``, ``j`` or ``m``."""
    return name.rsplit("-", 1)[-1]


@dataclass(frozen=True, eq=False)
class SimulatedWeek:
    path: SampledPath
    true_price_jumps: list = field(default_factory=list)
    true_vol_jumps: list = field(default_factory=list)
    ground_truth: str = "no_jumps"
    spot_variance: np.ndarray | None = None

    @property
    def has_common_jump(self) -> bool:
        return self.ground_truth == "common"


def simulate_week(params: ScenarioParams, grid: SamplingGrid | None = None, seed=None,
                  refine: int = 1, v1_0: float | None = None, v2_0: float | None = None,
                  keep_variance: bool = False) -> SimulatedWeek:
    """Simulate one path of the model on ``grid`` (default: 5 days, 5000 per day).

    The CIR factor uses full-truncation Euler while the jump factor decays
    exactly between jumps. Each price jump lands in the increment of the
    interval containing it. ``refine`` subdivides every observation interval
    into that many simulation steps.
    """
    grid = grid or SamplingGrid.from_daily(5000, 5)
    rng = np.random.default_rng(seed)
    T, n = grid.horizon_T, grid.n_obs
    steps = n * refine
    dt = grid.mesh_delta / refine
    p = params

    n_mu = rng.poisson(p.lam * T)
    t_mu = np.sort(rng.uniform(0.0, T, n_mu))
    x_mu = rng.choice([-1.0, 1.0], n_mu) * rng.uniform(p.l, p.h, n_mu)
    y_mu = rng.uniform(p.d, p.u, n_mu) if p.d is not None else np.zeros(n_mu)
    n_mu2 = rng.poisson(p.lam * T)
    t_mu2 = np.sort(rng.uniform(0.0, T, n_mu2))
    y_mu2 = rng.uniform(p.d, p.u, n_mu2) if p.d is not None else np.zeros(n_mu2)

    z_price = rng.standard_normal(steps)
    z_vol = rng.standard_normal(steps) if p.sigma > 0 else None

    v1 = np.empty(steps + 1)
    v1[0] = p.theta if v1_0 is None else v1_0
    if p.sigma > 0 or p.kappa1 > 0:
        sq = math.sqrt(dt)
        cur = v1[0]
        zs = z_vol.tolist() if z_vol is not None else [0.0] * steps
        k1, th, sg = p.kappa1, p.theta, p.sigma
        for i, z in enumerate(zs, start=1):
            pos = cur if cur > 0 else 0.0
            cur = cur + k1 * (th - pos) * dt + sg * math.sqrt(pos) * sq * z
            v1[i] = cur
    else:
        v1[:] = v1[0]

    times = np.arange(steps + 1) * dt
    v2 = np.full(steps + 1, p.stationary_v2() if v2_0 is None else v2_0)
    v2 = v2 * np.exp(-p.kappa2 * times)
    vol_jumps = []
    for load, tj, yj in ((p.alpha1, t_mu, y_mu), (p.alpha2, t_mu2, y_mu2)):
        if load == 0:
            continue
        for t, y in zip(tj, yj):
            after = times >= t
            v2[after] += load * y * np.exp(-p.kappa2 * (times[after] - t))
            vol_jumps.append((float(t), float(load * y)))
    vol_jumps.sort()

    var = np.maximum(v1[:-1], 0.0) + np.maximum(v2[:-1], 0.0)
    dx = np.sqrt(var * dt) * z_price
    if refine > 1:
        dx = dx.reshape(n, refine).sum(axis=1)
    price_jumps = []
    if p.alpha0 != 0 and n_mu:
        cell = np.minimum((t_mu / grid.mesh_delta).astype(int), n - 1)
        np.add.at(dx, cell, p.alpha0 * x_mu)
        price_jumps = [(float(t), float(p.alpha0 * x)) for t, x in zip(t_mu, x_mu)]

    if not price_jumps:
        truth = "no_jumps"
    elif p.alpha1 != 0 and n_mu > 0:
        truth = "common"
    else:
        truth = "disjoint"

    values = np.concatenate(([0.0], np.cumsum(dx)))
    spot = None
    if keep_variance:
        spot = (np.maximum(v1, 0) + np.maximum(v2, 0))[::refine]
    return SimulatedWeek(SampledPath(grid, values), price_jumps, vol_jumps, truth, spot)


def simulate_diffusion(grid: SamplingGrid, variance: float, seed=None,
                       jump_positions=(), jump_sizes=()) -> SampledPath:
    """Constant-variance Brownian path with jumps added to chosen increments.

    ``jump_positions`` are 1-based increment numbers.
    """
    rng = np.random.default_rng(seed)
    dx = math.sqrt(variance * grid.mesh_delta) * rng.standard_normal(grid.n_obs)
    for i, s in zip(jump_positions, jump_sizes):
        dx[int(i) - 1] += s
    return SampledPath(grid, np.concatenate(([0.0], np.cumsum(dx))))
