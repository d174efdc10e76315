"""Price-file ingestion, business-week grouping and run configuration."""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field, fields
from datetime import datetime
from pathlib import Path

import numpy as np

from .core import (AssumptionIndices, ConfigurationError, DataError, SampledPath,
                   SamplingGrid, TuningParams, window_length)
from .stattests import METHODS


@dataclass(frozen=True, eq=False)
class TickSeries:
    timestamps: list
    prices: np.ndarray
    source: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.timestamps)


def _parse_time(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def ingest_csv(file) -> TickSeries:
    """Read a ``timestamp,price`` file with ISO-8601 timestamps.

    Rows sharing a timestamp collapse to the last one (with a warning).
    Unsorted timestamps, unparsable rows and non-positive prices raise
    :class:`DataError` naming the offending line.
    """
    path = Path(file)
    times, prices = [], []
    n_rows = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "price"]:
            raise DataError(f"{path}: expected header 'timestamp,price', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            n_rows += 1
            if len(row) < 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts = _parse_time(row[0])
                price = float(row[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if not (math.isfinite(price) and price > 0):
                raise DataError(f"{path}:{lineno}: price must be positive, got {row[1].strip()}")
            if times:
                try:
                    earlier = ts < times[-1]
                    same = ts == times[-1]
                except TypeError:
                    raise DataError(f"{path}:{lineno}: mixes naive and timezone-aware timestamps") from None
                if earlier:
                    raise DataError(f"{path}:{lineno}: timestamps are not sorted")
                if same:
                    prices[-1] = price
                    continue
            times.append(ts)
            prices.append(price)
    if len(times) < n_rows:
        warnings.warn(f"{path}: collapsed {n_rows - len(times)} duplicate timestamps",
                      stacklevel=2)
    return TickSeries(times, np.array(prices), {"file": str(path), "rows": n_rows})


@dataclass(frozen=True, eq=False)
class WeekPath:
    label: str
    path: SampledPath
    n_days: int
    short_week: bool = False
    filled_bars: int = 0


def _bar_spacing(days: list[list[int]], seconds: np.ndarray) -> float:
    diffs = np.concatenate([np.diff(seconds[d]) for d in days if len(d) > 1])
    if diffs.size == 0:
        raise DataError("not enough intraday observations to infer the bar spacing")
    return float(np.median(diffs))


def to_weekly_paths(ticks: TickSeries, tuning: TuningParams | None = None,
                    max_fill: int = 5, split_days: bool = True,
                    min_days: int = 1) -> list[WeekPath]:
    """Group bars into Monday-to-Friday weeks of log-prices.

    The bar spacing is the median intraday spacing. Runs of up to
    ``max_fill`` missing bars are forward-filled; a longer gap drops the
    whole day with a warning. Spacing that is not a whole number of bars
    (1% tolerance) raises :class:`DataError` asking for resampling. One day
    is one unit of time, so the mesh is ``1 / bars_per_day`` with
    ``bars_per_day`` the most common day length.
    """
    tuning = tuning or TuningParams()
    if len(ticks) < 2:
        raise DataError("need at least two observations")
    t0 = ticks.timestamps[0]
    seconds = np.array([(t - t0).total_seconds() for t in ticks.timestamps])
    logp = np.log(ticks.prices)
    by_day: dict = {}
    for i, t in enumerate(ticks.timestamps):
        by_day.setdefault(t.date(), []).append(i)
    days = list(by_day.items())
    spacing = _bar_spacing([d for _, d in days], seconds)
    if not spacing > 0:
        raise DataError("bar spacing must be positive")

    clean = []
    for date, idx in days:
        gaps = np.diff(seconds[idx]) / spacing
        steps = np.rint(gaps)
        if np.any(np.abs(gaps - steps) > 0.01 * np.maximum(steps, 1)) or np.any(steps < 1):
            raise DataError(f"{date}: irregular bar spacing (expected multiples of "
                            f"{spacing:g}s); resample to a regular grid first")
        if np.any(steps > max_fill + 1):
            warnings.warn(f"{date}: gap of more than {max_fill} bars, day dropped", stacklevel=2)
            continue
        levels = np.repeat(logp[idx][:-1], steps.astype(int))
        levels = np.append(levels, logp[idx][-1])
        clean.append((date, levels, int(steps.sum() - steps.size)))
    if not clean:
        raise DataError("no usable trading days")

    bars_per_day = Counter(len(lv) for _, lv, _ in clean).most_common(1)[0][0]
    if bars_per_day < 2:
        raise DataError("days must hold at least two bars")
    delta = 1.0 / bars_per_day
    k = window_length(delta, tuning)
    weeks: dict = {}
    for date, levels, filled in clean:
        iso = date.isocalendar()
        weeks.setdefault((iso[0], iso[1]), []).append((levels, filled))

    out = []
    for (year, week), members in sorted(weeks.items()):
        label = f"{year}-W{week:02d}"
        if len(members) < min_days:
            continue
        values = np.concatenate([lv for lv, _ in members])
        starts, pos = [0], 0
        for lv, _ in members[:-1]:
            pos += len(lv)
            starts.append(pos - 1)
        n_obs = values.size - 1
        if n_obs < 2 * tuning.w * k + 2:
            warnings.warn(f"{label}: {n_obs} increments is too short for k_n = {k}, skipped",
                          stacklevel=2)
            continue
        grid = SamplingGrid(horizon_T=n_obs * delta, n_obs=n_obs, mesh_delta=delta)
        path = SampledPath(grid, values, day_starts=tuple(starts), split_days=split_days)
        out.append(WeekPath(label, path, len(members), len(members) < 5,
                            sum(f for _, f in members)))
    if not out:
        raise DataError("no week is long enough to run the tests")
    return out


@dataclass(frozen=True)
class RunConfig:
    """Settings for the empirical pipeline; defaults match the simulation study."""

    tuning: TuningParams = field(default_factory=TuningParams)
    assume: AssumptionIndices = field(default_factory=AssumptionIndices)
    tests: tuple = METHODS
    sweep: tuple = (0.0, 0.002, 0.003, 0.004)
    alphas: tuple = (0.05, 0.10)
    decision_alpha: float = 0.05
    output_dir: str = "cojump_out"
    seed: int = 0
    n_sim: int = 10_000
    max_fill: int = 5
    split_days: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if any(a < 0 for a in self.sweep) or list(self.sweep) != sorted(self.sweep):
            raise ConfigurationError("sweep values must be >= 0 and ascending")
        if not self.sweep:
            raise ConfigurationError("sweep must not be empty")
        bad = set(self.tests) - set(METHODS)
        if bad:
            raise ConfigurationError(f"unknown tests {sorted(bad)}")


_TUNING_KEYS = {f.name for f in fields(TuningParams)} - {"jump_size_a"}
_ASSUME_KEYS = {"r", "v"}
_LIST_KEYS = {"tests": str, "sweep": float, "alphas": float}
_SCALAR_KEYS = {"decision_alpha": float, "output_dir": str, "seed": int, "n_sim": int,
                "max_fill": int, "split_days": "bool", "n_jobs": int}


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _as_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def config_from_mapping(values: dict[str, str]) -> RunConfig:
    tuning, assume, rest = {}, {}, {}
    try:
        for key, value in values.items():
            if key in _TUNING_KEYS:
                tuning[key] = int(value) if key == "w" else float(value)
            elif key in _ASSUME_KEYS:
                assume[key] = float(value)
            elif key in _LIST_KEYS:
                conv = _LIST_KEYS[key]
                rest[key] = tuple(conv(v.strip()) for v in value.split(",") if v.strip())
            elif key in _SCALAR_KEYS:
                conv = _SCALAR_KEYS[key]
                rest[key] = _as_bool(value) if conv == "bool" else conv(value)
            else:
                raise ConfigurationError(f"unknown config key {key!r}")
        return RunConfig(tuning=TuningParams(**tuning), assume=AssumptionIndices(**assume), **rest)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None


def load_config(file=None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Config file values, then ``overrides`` on top."""
    values = parse_key_values(Path(file).read_text()) if file else {}
    values.update({k.replace("-", "_"): v for k, v in (overrides or {}).items()})
    return config_from_mapping(values)
