"""Sampling grids and tuning constants, with admissibility checks for (varpi, rho).

Time is measured in days throughout: a path sampled ``n`` times per day has
mesh ``1 / n`` and a five-day week has horizon 5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np


class CojumpError(Exception):
    """Base class for errors raised by this package."""


class SizingError(CojumpError, ValueError):
    """A window or segment does not fit in the available sample."""


class ConfigurationError(CojumpError, ValueError):
    """Inconsistent parameters passed between pipeline stages."""


class DataError(CojumpError, ValueError):
    """Malformed or unusable input data."""


class UndefinedStatistic(CojumpError, ArithmeticError):
    """A ratio or variance statistic has a zero denominator."""


@dataclass(frozen=True)
class SamplingGrid:
    horizon_T: float
    n_obs: int
    mesh_delta: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n_obs < 2:
            raise ValueError(f"n_obs must be >= 2, got {self.n_obs}")
        if not self.horizon_T > 0:
            raise ValueError("horizon_T must be positive")
        if self.mesh_delta is None:
            object.__setattr__(self, "mesh_delta", self.horizon_T / self.n_obs)
        if not self.mesh_delta > 0:
            raise ValueError("mesh_delta must be positive")
        if not math.isclose(self.mesh_delta * self.n_obs, self.horizon_T, rel_tol=1e-12):
            raise ValueError("mesh_delta * n_obs must equal horizon_T")

    @classmethod
    def from_daily(cls, n_per_day: int, n_days: float = 5) -> "SamplingGrid":
        """Grid with ``n_per_day`` increments per day over ``n_days`` days."""
        return cls(horizon_T=float(n_days), n_obs=int(round(n_per_day * n_days)),
                   mesh_delta=1.0 / n_per_day)


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Levels ``X_0, X_Delta, ..., X_{n Delta}`` of a regularly sampled path.

    ``day_starts`` holds the 0-based increment index at which each day begins.
    When ``split_days`` is set, the first increment of every day except the
    first is treated as an overnight gap: it never enters a bipower sum or a
    volatility window and is never flagged as a jump.
    """

    grid: SamplingGrid
    values: np.ndarray
    day_starts: tuple = None  # type: ignore[assignment]
    split_days: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size != self.grid.n_obs + 1:
            raise ValueError(
                f"expected {self.grid.n_obs + 1} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("path values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.day_starts is None:
            per_day = 1.0 / self.grid.mesh_delta
            if not math.isclose(per_day, round(per_day), rel_tol=1e-9):
                raise SizingError("mesh does not divide a day into whole increments")
            per_day = int(round(per_day))
            if self.grid.n_obs % per_day:
                raise SizingError(
                    f"{self.grid.n_obs} increments is not a whole number of "
                    f"{per_day}-increment days")
            starts = tuple(range(0, self.grid.n_obs, per_day))
        else:
            starts = tuple(int(s) for s in self.day_starts)
            if not starts or starts[0] != 0 or any(
                    b <= a for a, b in zip(starts, starts[1:])) or starts[-1] >= self.grid.n_obs:
                raise ValueError("day_starts must start at 0 and increase strictly")
        object.__setattr__(self, "day_starts", starts)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def n_obs(self) -> int:
        return self.grid.n_obs

    def day_ids(self) -> np.ndarray:
        """Day label of each increment, ``-1`` for overnight gap increments."""
        ids = np.zeros(self.n_obs, dtype=np.int64)
        for d, s in enumerate(self.day_starts[1:], start=1):
            ids[s:] = d
        if self.split_days:
            ids[list(self.day_starts[1:])] = -1
        return ids

    def scaled(self, factor: float) -> "SampledPath":
        return SampledPath(self.grid, self.values * factor, self.day_starts, self.split_days)


@dataclass(frozen=True)
class AssumptionIndices:
    """Declared jump-activity index ``r`` and volatility smoothness ``v``."""

    r: float = 0.0
    v: float = 0.5

    def __post_init__(self):
        if not 0 <= self.r < 2:
            raise ValueError(f"r must lie in [0, 2), got {self.r}")
        if not 0 < self.v <= 1:
            raise ValueError(f"v must lie in (0, 1], got {self.v}")


@dataclass(frozen=True)
class TuningParams:
    """Truncation and window tuning.

    Defaults follow the Monte Carlo choices: ``u_n = 5 sqrt(BV) Delta^0.49``,
    ``k_n = [5 Delta^-0.49]`` and ``w = 2``.
    """

    varpi: float = 0.49
    rho: float = 0.49
    trunc_const_a: float = 5.0
    window_const: float = 5.0
    w: int = 2
    jump_size_a: float = 0.0

    def __post_init__(self):
        if not 0 < self.varpi < 0.5:
            raise ValueError("varpi must lie in (0, 1/2)")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if int(self.w) != self.w or self.w < 2:
            raise ValueError("w must be an integer >= 2")
        if self.jump_size_a < 0:
            raise ValueError("jump_size_a must be >= 0")
        if not self.trunc_const_a > 0 or not self.window_const > 0:
            raise ValueError("tuning constants must be positive")

    def replace(self, **changes) -> "TuningParams":
        return TuningParams(**{**asdict(self), **changes})


def window_length(mesh_delta: float, tuning: TuningParams) -> int:
    """``k_n = floor(window_const * Delta^-rho)``, clamped below at 1."""
    k = math.floor(tuning.window_const * mesh_delta ** (-tuning.rho))
    if k < 1:
        warnings.warn(f"window length {k} clamped to 1", RuntimeWarning, stacklevel=2)
        k = 1
    return k


def derive_sequences(grid: SamplingGrid, tuning: TuningParams,
                     path_scale: float | None = None) -> tuple[float, int]:
    """Return the truncation level ``u_n`` and window length ``k_n``.

    Parameters
    ----------
    grid : SamplingGrid
    tuning : TuningParams
    path_scale : float, optional
        Volatility scale (square root of bipower variation per unit time).
        When given, ``u_n = trunc_const_a * path_scale * Delta^varpi``;
        otherwise ``trunc_const_a`` is the constant itself.

    Raises
    ------
    SizingError
        If ``2 w k_n + 1`` exceeds the number of increments.
    """
    delta = grid.mesh_delta
    k = window_length(delta, tuning)
    if 2 * tuning.w * k + 1 > grid.n_obs:
        raise SizingError(
            f"window 2*w*k_n+1 = {2 * tuning.w * k + 1} exceeds n_obs = {grid.n_obs}")
    scale = 1.0 if path_scale is None else float(path_scale)
    u = tuning.trunc_const_a * scale * delta ** tuning.varpi
    if not (math.isfinite(u) and u > 0):
        raise SizingError(f"non-positive truncation level {u}")
    return u, k


RATE_KINDS = ("disjoint_clt", "disjoint_clt_general_F", "common_clt", "common_clt_general_F")


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    test_kind: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"test_kind": self.test_kind, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(d["test_kind"], tuple(Inequality(**c) for c in d["checks"]))


def validate_rate_conditions(assume: AssumptionIndices, tuning: TuningParams,
                             test_kind: str = "disjoint_clt", p: float = 2.0) -> ValidationReport:
    """Check the admissibility of ``(varpi, rho)`` given declared ``(r, v)``.

    ``p`` is the smoothness index of ``f`` near zero and matters only for
    ``common_clt_general_F``. The report is advisory; nothing raises.
    """
    if test_kind not in RATE_KINDS:
        raise ValueError(f"unknown test_kind {test_kind!r}; expected one of {RATE_KINDS}")
    r, v = assume.r, assume.v
    varpi, rho = tuning.varpi, tuning.rho
    vol_bound = 2 * v / (1 + 2 * v)
    checks = []

    def check(name, lhs, rhs):
        checks.append(Inequality(name, float(lhs), float(rhs), bool(lhs < rhs)))

    if test_kind == "common_clt":
        check("rho < min(2 varpi (2-r), 2v/(1+2v))", rho, min(2 * varpi * (2 - r), vol_bound))
    elif test_kind == "common_clt_general_F":
        check("1 + r/2 < p", 1 + r / 2, p)
        if r > 0:
            check("varpi < 1/(2r)", varpi, 1 / (2 * r))
            bound = min(2 * varpi * (min(p, 2) - r), (2 * p - 2 - r) / r, vol_bound)
        else:
            bound = min(2 * varpi * min(p, 2), vol_bound)
        check("rho < min(2 varpi (min(p,2) - r), (2p-2-r)/r, 2v/(1+2v))", rho, bound)
    elif test_kind == "disjoint_clt":
        check("rho < min(2 varpi (2-r), 2v/(1+2v), 1/2)", rho,
              min(2 * varpi * (2 - r), vol_bound, 0.5))
    else:
        v2 = min(2 * v, 1.0)
        check("rho < min(varpi (4-r) - 1, min(2v,1)/(1+min(2v,1)), 1/2)", rho,
              min(varpi * (4 - r) - 1, v2 / (1 + v2), 0.5))
    return ValidationReport(test_kind, tuple(checks))
