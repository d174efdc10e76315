import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cojump import TuningParams, scenario_table, simulate_week
from cojump.core import ConfigurationError, SamplingGrid
from cojump.functionals import (TestFunction, derived_G_common, derived_G_disjoint,
                                evaluate_U, g_llr)
from cojump.volatility import JumpSet, detect_jumps, local_vol, truncation_threshold
from conftest import path_from_increments
from oracles import central_difference, mp_g_llr, mp_g_smooth, mp_partials

LLR = TestFunction()
SMOOTH = TestFunction(f_kind="square", g_kind="smooth_difference")
GRID = np.logspace(-4, 4, 13)


def test_g_llr_examples():
    assert g_llr(1.0, 1.0) == 0.0
    assert g_llr(1.0, 2.0) == pytest.approx(2 * math.log(1.5) - math.log(2), rel=1e-14)
    assert g_llr(1.0, 2.0) == pytest.approx(0.117783, abs=1e-6)
    assert g_llr(2.0, 4.0) == g_llr(1.0, 2.0)


def test_g_llr_domain():
    with pytest.raises(ValueError):
        g_llr(0.0, 1.0)
    with pytest.raises(ValueError):
        g_llr(1.0, -1.0)


@pytest.mark.parametrize("tf", [LLR, SMOOTH], ids=["llr", "smooth"])
def test_admissible_g(tf):
    y = GRID
    np.testing.assert_array_equal(tf.g(y, y), 0.0)
    g1, g2, g11, g12, g22 = tf.g_derivatives(y, y)
    np.testing.assert_array_equal(g1, 0.0)
    np.testing.assert_array_equal(g2, 0.0)
    assert np.all(g11 + g22 > 0)
    yy, zz = np.meshgrid(GRID, GRID)
    off = yy != zz
    assert np.all(tf.g(yy[off], zz[off]) > 0)


def test_llr_symmetric():
    yy, zz = np.meshgrid(GRID, GRID)
    np.testing.assert_allclose(g_llr(yy, zz), g_llr(zz, yy), rtol=1e-12, atol=1e-15)


def derivative_gap(tf, reference, grid=GRID):
    """Worst relative gap between analytic derivatives and the finite-difference oracle."""
    worst = 0.0
    for y in grid:
        for z in grid:
            if y == z:
                continue
            analytic = np.array([float(v) for v in tf.g_derivatives(y, z)])
            fd = np.array(mp_partials(reference, y, z))
            worst = max(worst, np.max(np.abs(fd - analytic) / np.abs(analytic)))
    return worst


def test_llr_derivatives_match_finite_differences():
    assert derivative_gap(LLR, mp_g_llr) < 1e-6


def test_smooth_derivatives_match_finite_differences():
    assert derivative_gap(SMOOTH, mp_g_smooth) < 1e-6


def test_llr_second_derivatives_on_diagonal():
    _, _, g11, g12, g22 = LLR.g_derivatives(1.0, 1.0)
    assert (g11, g12, g22) == (0.5, -0.5, 0.5)


def test_G_disjoint_examples():
    G = derived_G_disjoint(LLR)
    assert G(0.3, 1.0, 1.0) == pytest.approx(1.0)
    # finite-difference value of g''_11 + g''_22 at (1, 1)
    h = 1e-5
    fd = ((g_llr(1 + h, 1) - 2 * g_llr(1, 1) + g_llr(1 - h, 1))
          + (g_llr(1, 1 + h) - 2 * g_llr(1, 1) + g_llr(1, 1 - h))) / h ** 2
    assert fd == pytest.approx(1.0, rel=1e-4)
    G0 = derived_G_disjoint(TestFunction(a=10.0))
    assert G0(0.5, 1.0, 2.0) == 0.0
    for lam in (1e-3, 7.0, 1e3):
        assert G(1.0, lam * 1.3, lam * 0.4) == pytest.approx(G(1.0, 1.3, 0.4), rel=1e-12)


def test_G_common_examples():
    G = derived_G_common(LLR)
    assert G(0.2, 3.0, 3.0) == 0.0
    assert G(0.2, 1.0, 2.0) == pytest.approx(4 / 9, rel=1e-13)
    g1 = central_difference(lambda t: g_llr(t, 2.0), 1.0)
    g2 = central_difference(lambda t: g_llr(1.0, t), 2.0)
    assert 2 * (g1 ** 2 + 4 * g2 ** 2) == pytest.approx(4 / 9, rel=1e-8)
    for lam in (1e-3, 1e3):
        assert G(1.0, lam, 2 * lam) == pytest.approx(4 / 9, rel=1e-12)


def test_f_kinds():
    ind = TestFunction(a=0.5)
    np.testing.assert_array_equal(ind.f([0.4, 0.5, 0.6, -0.7]), [0, 0, 1, 1])
    assert TestFunction().f(0.0) == 0.0
    ramp = TestFunction(a=0.5, ramp=0.1)
    vals = ramp.f([0.39, 0.5, 0.61])
    np.testing.assert_allclose(vals, [0, 0.5, 1])
    assert SMOOTH.f(-0.3) == pytest.approx(0.09)
    with pytest.raises(ValueError):
        TestFunction(f_kind="cube")


def _hand_vol(n, k, pairs):
    """LocalVolSeries-like object whose left/right reads are set by hand."""
    from cojump.volatility import LocalVolSeries
    c = np.ones(n - k + 1)
    for i, (left, right) in pairs.items():
        c[i - k - 1] = left
        c[i] = right
    return LocalVolSeries(k, np.zeros(n), c)


def test_evaluate_U_examples():
    n, k = 100, 5
    p = path_from_increments(np.zeros(n))
    empty = JumpSet(np.array([], dtype=int), np.array([]))
    vol = _hand_vol(n, k, {})
    U = evaluate_U(p, vol, empty, LLR, k)
    assert U.value == 0 and U.contributing == []
    vol = _hand_vol(n, k, {30: (1.0, 1.0)})
    U = evaluate_U(p, vol, JumpSet(np.array([30]), np.array([0.5])), LLR, k)
    assert U.value == 0.0
    vol = _hand_vol(n, k, {30: (1.0, 2.0), 60: (3.0, 3.0)})
    js = JumpSet(np.array([30, 60]), np.array([0.5, -0.4]))
    U = evaluate_U(p, vol, js, LLR, k)
    assert U.value == pytest.approx(0.117783, abs=1e-6)
    assert U.value == pytest.approx(sum(U.summands), rel=1e-12)
    with pytest.raises(ConfigurationError):
        evaluate_U(p, vol, js, LLR, k + 1)


def test_evaluate_U_edge_band():
    n, k = 100, 5
    p = path_from_increments(np.zeros(n))
    vol = _hand_vol(n, k, {})
    js = JumpSet(np.array([3, 6, 95, 96]), np.ones(4))
    U = evaluate_U(p, vol, js, LLR, k)
    assert U.indices.tolist() == [6, 95]
    assert U.n_excluded == 2
    U = evaluate_U(p, vol, js, LLR, k, margin=2 * k)
    assert U.n_terms == 0


def test_evaluate_U_clamps_zero_variance():
    n, k = 60, 4
    p = path_from_increments(np.zeros(n))
    vol = _hand_vol(n, k, {20: (0.0, 1.0)})
    U = evaluate_U(p, vol, JumpSet(np.array([20]), np.array([1.0])), LLR, k)
    assert U.n_clamped == 1
    assert math.isfinite(U.value)


@given(st.integers(0, 2 ** 31))
def test_U_additive_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    dx = rng.standard_normal(400) * 0.01
    jump_at = rng.choice(np.arange(20, 380), 6, replace=False)
    dx[jump_at] += rng.choice([-1, 1], 6) * 0.2
    p = path_from_increments(dx, n_per_day=400)
    u = truncation_threshold(p, TuningParams())
    js = detect_jumps(p, u)
    vol = local_vol(p, 10, u)
    mask = np.arange(js.count_N) % 2 == 0
    for tf in (LLR, SMOOTH):
        whole = evaluate_U(p, vol, js, tf, 10)
        parts = evaluate_U(p, vol, js.select(mask), tf, 10).value \
            + evaluate_U(p, vol, js.select(~mask), tf, 10).value
        assert whole.value == pytest.approx(parts, rel=1e-12, abs=1e-300)
        assert np.all(whole.summands >= 0)


def test_full_pipeline_scale_invariance():
    week = simulate_week(scenario_table()["I-j"], SamplingGrid.from_daily(1000, 5), seed=4)
    tuning = TuningParams()

    def U_of(path):
        u = truncation_threshold(path, tuning)
        js = detect_jumps(path, u)
        return evaluate_U(path, local_vol(path, 147, u), js, LLR, 147).value

    base = U_of(week.path)
    assert base > 0
    for lam in (1e-3, 3.7, 1e3):
        assert U_of(week.path.scaled(lam)) == pytest.approx(base, rel=1e-10)
