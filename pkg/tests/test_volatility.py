import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cojump import SamplingGrid, TuningParams, scenario_table, simulate_week
from cojump.core import SampledPath, SizingError
from cojump.simulator import simulate_diffusion
from cojump.volatility import (bipower_variation, detect_jumps, local_vol,
                               truncation_threshold)
from conftest import path_from_increments


def brute_bipower(dx):
    total = 0.0
    for i in range(len(dx) - 1):
        total += abs(dx[i]) * abs(dx[i + 1])
    return math.pi / 2 * total


def test_bipower_constant_increments():
    h, m = 0.003, 40
    p = path_from_increments(np.full(m, h))
    assert bipower_variation(p) == pytest.approx(math.pi / 2 * (m - 1) * h * h, rel=1e-12)


def test_bipower_alternating():
    p = path_from_increments([0.01, -0.01, 0.01])
    assert bipower_variation(p) == pytest.approx(0.000314159265, rel=1e-9)


def test_bipower_matches_brute_force(rng):
    dx = rng.standard_normal(200)
    dx[[10, 50, 51, 120]] = 0.0
    p = path_from_increments(dx)
    assert bipower_variation(p) == pytest.approx(brute_bipower(dx), rel=1e-12)
    assert bipower_variation(p, (40, 90)) == pytest.approx(brute_bipower(dx[40:90]), rel=1e-12)


def test_bipower_short_segment():
    p = path_from_increments([0.1, 0.2, 0.3])
    with pytest.raises(SizingError):
        bipower_variation(p, (0, 1))


def test_threshold_tracks_volatility():
    sigma, n = 0.2, 10_000
    grid = SamplingGrid.from_daily(n, 1)
    path = simulate_diffusion(grid, sigma ** 2, seed=3)
    u = truncation_threshold(path, TuningParams())
    target = 5 * sigma * grid.mesh_delta ** 0.49
    assert np.all(np.abs(u / target - 1) < 0.25)


def test_threshold_scales_with_path(rng):
    p = path_from_increments(rng.standard_normal(300) * 0.01, n_per_day=100)
    u = truncation_threshold(p, TuningParams())
    u2 = truncation_threshold(p.scaled(2.0), TuningParams())
    np.testing.assert_allclose(u2, 2 * u, rtol=1e-13)
    assert len(set(np.round(u, 14))) == 3


def test_threshold_zero_day():
    dx = np.r_[np.zeros(100), np.full(100, 0.01)]
    p = path_from_increments(dx, n_per_day=100)
    u = truncation_threshold(p, TuningParams())
    assert np.all(u[:100] == 0)
    jumps = detect_jumps(p, u)
    assert jumps.count_N == 0


def test_global_threshold():
    p = path_from_increments(np.ones(100) * 0.01, n_per_day=100)
    u = truncation_threshold(p, TuningParams(trunc_const_a=2.0), per_day=False)
    np.testing.assert_allclose(u, 2.0 * 0.01 ** 0.49)


def test_detect_single_jump():
    dx = np.full(1000, 1e-4)
    dx[500] = 0.5
    p = path_from_increments(dx)
    js = detect_jumps(p, 0.01, 0.0)
    assert js.count_N == 1
    assert js.indices.tolist() == [501]
    assert js.sizes[0] == pytest.approx(0.5)
    assert detect_jumps(p, 0.01, 0.6).count_N == 0


def test_detected_count_tracks_intensity():
    params = scenario_table()["I-j"]
    grid = SamplingGrid.from_daily(1000, 5)
    counts = []
    tuning = TuningParams()
    for rep in range(500):
        week = simulate_week(params, grid, seed=[99, rep])
        u = truncation_threshold(week.path, tuning)
        counts.append(detect_jumps(week.path, u).count_N)
    assert abs(np.mean(counts) - 2.5) < 0.3


def test_local_vol_constant_increments():
    c, k = 0.002, 7
    p = path_from_increments(np.full(100, c))
    vol = local_vol(p, k, 1.0)
    np.testing.assert_allclose(vol.c_hat, c * c / p.grid.mesh_delta, rtol=1e-12)
    assert vol.valid_range == (0, 100 - k)
    assert np.all(local_vol(p, k, 0.001).c_hat == 0)


def test_local_vol_window_alignment(rng):
    dx = rng.standard_normal(60)
    p = path_from_increments(dx)
    k = 5
    vol = local_vol(p, k, np.inf)
    delta = p.grid.mesh_delta
    for i in (k + 1, 20, 60 - k):
        right = np.sum(dx[i:i + k] ** 2) / (k * delta)       # increments i+1..i+k
        left = np.sum(dx[i - k - 1:i - 1] ** 2) / (k * delta)  # increments i-k..i-1
        assert vol.right(i) == pytest.approx(right, rel=1e-12)
        assert vol.left(i) == pytest.approx(left, rel=1e-12)


def test_local_vol_too_large():
    with pytest.raises(SizingError):
        local_vol(path_from_increments(np.ones(10)), 11, 1.0)


def test_local_vol_brownian_level():
    sigma = 0.3
    grid = SamplingGrid.from_daily(4680, 1)
    path = simulate_diffusion(grid, sigma ** 2, seed=11)
    u = truncation_threshold(path, TuningParams())
    vol = local_vol(path, 147, u)
    assert abs(vol.c_hat.mean() / 0.09 - 1) < 0.05


def test_local_vol_converges_at_large_n():
    grid = SamplingGrid.from_daily(100_000, 1)
    path = simulate_diffusion(grid, 0.04, seed=5)
    tuning = TuningParams()
    u = truncation_threshold(path, tuning)
    vol = local_vol(path, 1000, u)
    assert abs(vol.c_hat.mean() / 0.04 - 1) < 0.02


@given(st.floats(1e-3, 1e3), st.integers(0, 2 ** 31))
def test_local_vol_scaling(lam, seed):
    rng = np.random.default_rng(seed)
    p = path_from_increments(rng.standard_normal(400) * 0.01, n_per_day=200)
    tuning = TuningParams()
    u = truncation_threshold(p, tuning)
    q = p.scaled(lam)
    uq = truncation_threshold(q, tuning)
    v1, v2 = local_vol(p, 9, u), local_vol(q, 9, uq)
    np.testing.assert_allclose(v2.c_hat, lam ** 2 * v1.c_hat, rtol=1e-12, atol=0)
    j1, j2 = detect_jumps(p, u), detect_jumps(q, uq)
    assert np.array_equal(j1.indices, j2.indices)


@given(st.integers(0, 2 ** 31), st.floats(1.0, 3.0))
def test_truncation_monotonicity(seed, factor):
    rng = np.random.default_rng(seed)
    dx = rng.standard_t(3, 300) * 0.01
    p = path_from_increments(dx)
    u = truncation_threshold(p, TuningParams())
    lo, hi = local_vol(p, 10, u), local_vol(p, 10, u * factor)
    assert np.all(hi.c_hat >= lo.c_hat)


def test_split_days_gap_handling():
    grid = SamplingGrid(horizon_T=3, n_obs=30, mesh_delta=0.1)
    dx = np.full(30, 0.01)
    dx[10] = 5.0   # overnight gaps
    dx[20] = -4.0
    values = np.concatenate(([0.0], np.cumsum(dx)))
    p = SampledPath(grid, values, day_starts=(0, 10, 20), split_days=True)
    u = truncation_threshold(p, TuningParams(trunc_const_a=3))
    assert np.isinf(u[10]) and np.isinf(u[20])
    assert detect_jumps(p, u).count_N == 0
    vol = local_vol(p, 3, u)
    assert np.isnan(vol.c_hat[8])       # increments 9..11 straddle the gap
    assert vol.c_hat[11] == pytest.approx(0.01 ** 2 / 0.1)
    assert np.isnan(vol.c_hat[10])      # starts at the gap increment
