"""Truncation-based jump detection and local spot variance estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SampledPath, SizingError, TuningParams

#: ``E|Z|^-2`` for a standard normal ``Z``.
BV_SCALE = np.pi / 2


def bipower_variation(path: SampledPath, segment: tuple[int, int] | None = None) -> float:
    """Bipower variation ``(pi/2) sum |dX_i| |dX_{i+1}|`` over a block of increments.

    Parameters
    ----------
    path : SampledPath
    segment : (start, stop), optional
        Half-open range of 0-based increment positions. Defaults to all
        increments.
    """
    dx = path.increments
    start, stop = (0, dx.size) if segment is None else segment
    return _bipower(dx[start:stop])


def _bipower(dx: np.ndarray) -> float:
    if dx.size < 2:
        raise SizingError(f"bipower variation needs >= 2 increments, got {dx.size}")
    a = np.abs(dx)
    return float(BV_SCALE * np.dot(a[:-1], a[1:]))


def day_segments(path: SampledPath) -> list[tuple[int, int]]:
    """Half-open increment ranges for each day, overnight gaps removed."""
    bounds = list(path.day_starts) + [path.n_obs]
    segs = []
    for d, (s, e) in enumerate(zip(bounds[:-1], bounds[1:])):
        if path.split_days and d > 0:
            s += 1
        segs.append((s, e))
    return segs


def truncation_threshold(path: SampledPath, tuning: TuningParams, per_day: bool = True) -> np.ndarray:
    """Per-increment truncation levels ``u_n``.

    With ``per_day`` each day gets ``a * sqrt(BV_day / day_length) * Delta^varpi``
    so the cut-off follows the volatility level of that day. Otherwise the
    constant ``a * Delta^varpi`` is used everywhere. Overnight gap increments
    get an infinite level so they are never treated as jumps.
    """
    delta = path.grid.mesh_delta
    rate = delta ** tuning.varpi
    if not per_day:
        u = np.full(path.n_obs, tuning.trunc_const_a * rate)
    else:
        dx = path.increments
        u = np.empty(path.n_obs)
        for s, e in day_segments(path):
            bv = _bipower(dx[s:e])
            u[s:e] = tuning.trunc_const_a * np.sqrt(bv / ((e - s) * delta)) * rate
    if path.split_days:
        u[list(path.day_starts[1:])] = np.inf
    return u


@dataclass(frozen=True, eq=False)
class JumpSet:
    """Increments flagged as jumps.

    ``indices`` are 1-based increment numbers (increment ``i`` runs from
    ``X_{(i-1) Delta}`` to ``X_{i Delta}``).
    """

    indices: np.ndarray
    sizes: np.ndarray

    @property
    def count_N(self) -> int:
        return int(self.indices.size)

    def __len__(self):
        return self.count_N

    def select(self, mask) -> "JumpSet":
        return JumpSet(self.indices[mask], self.sizes[mask])


def detect_jumps(path: SampledPath, thresholds, jump_size_a: float = 0.0) -> JumpSet:
    """Flag every increment with ``|dX_i| > max(u_n(i), a)``."""
    dx = path.increments
    u = np.broadcast_to(np.asarray(thresholds, dtype=float), dx.shape)
    hit = np.abs(dx) > np.maximum(u, jump_size_a)
    pos = np.flatnonzero(hit)
    return JumpSet(pos + 1, dx[pos])


@dataclass(frozen=True, eq=False)
class LocalVolSeries:
    """Forward-window truncated variance estimates.

    ``c_hat[i]`` averages the squared kept increments ``i+1, ..., i+k_n``
    (1-based) and is divided by ``k_n * Delta``, for ``i = 0, ..., n - k_n``.
    Windows that would cross an overnight gap are stored as NaN.
    """

    k_n: int
    u_n: np.ndarray
    c_hat: np.ndarray

    @property
    def valid_range(self) -> tuple[int, int]:
        return 0, self.c_hat.size - 1

    def left(self, i):
        """Estimate from the ``k_n`` increments just before increment ``i``."""
        return self.c_hat[np.asarray(i) - self.k_n - 1]

    def right(self, i):
        """Estimate from the ``k_n`` increments just after increment ``i``."""
        return self.c_hat[np.asarray(i)]


def local_vol(path: SampledPath, k_n: int, thresholds) -> LocalVolSeries:
    """Truncated local variance estimates for window ``k_n``.

    ``thresholds`` is a scalar ``u_n`` or one level per increment.
    """
    n = path.n_obs
    if k_n < 1:
        raise SizingError(f"k_n must be >= 1, got {k_n}")
    if k_n > n:
        raise SizingError(f"k_n = {k_n} exceeds n_obs = {n}")
    dx = path.increments
    u = np.broadcast_to(np.asarray(thresholds, dtype=float), dx.shape)
    kept = np.where(np.abs(dx) <= u, dx * dx, 0.0)
    if path.split_days:
        kept[list(path.day_starts[1:])] = 0.0
    # direct window sums keep c_hat monotone in the thresholds
    sums = np.lib.stride_tricks.sliding_window_view(kept, k_n).sum(axis=1)
    c = sums / (k_n * path.grid.mesh_delta)
    if path.split_days:
        ids = path.day_ids()
        first, last = ids[: n - k_n + 1], ids[k_n - 1:]
        c = np.where((first == last) & (first >= 0), c, np.nan)
    c.setflags(write=False)
    return LocalVolSeries(k_n=k_n, u_n=np.array(u), c_hat=c)
