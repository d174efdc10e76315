"""Reference computations that share no code with the package."""

import math

import mpmath


def regularized_gamma_p(a, x, tol=1e-15, max_iter=10_000):
    """Lower regularized incomplete gamma P(a, x) by series / continued fraction."""
    if x <= 0:
        return 0.0
    log_pre = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1:
        term = total = 1.0 / a
        ap = a
        for _ in range(max_iter):
            ap += 1
            term *= x / ap
            total += term
            if abs(term) < abs(total) * tol:
                break
        return total * math.exp(log_pre)
    # Lentz continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1 - a
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < tol:
            break
    return 1.0 - math.exp(log_pre) * h


def chi2_sf(x, dof):
    return 1.0 - regularized_gamma_p(dof / 2, x / 2)


def bisect(fn, lo, hi, tol=1e-13):
    """Root of a decreasing function on [lo, hi]."""
    flo = fn(lo)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * max(1.0, abs(mid)):
            break
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chi2_upper_quantile(alpha, dof):
    return bisect(lambda z: chi2_sf(z, dof) - alpha, 0.0, 10.0 * dof + 100.0)


def normal_two_sided(alpha):
    return bisect(lambda z: math.erfc(z / math.sqrt(2)) - alpha, 0.0, 40.0)


def central_difference(fn, x, h=1e-5):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def central_second(fn, x, h=1e-5):
    return (fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h)


# extended-precision references for the two g functions and their differences

def mp_g_llr(y, z):
    return 2 * mpmath.log((y + z) / 2) - mpmath.log(y) - mpmath.log(z)


def mp_g_smooth(y, z):
    u = y - z
    return u * u / (1 + u * u)


def mp_partials(g, y, z, rel_step=1e-5, dps=60):
    """Central-difference partials (g1, g2, g11, g12, g22) at 60 digits.

    Each step is ``rel_step`` times the coordinate being differenced.
    """
    with mpmath.workdps(dps):
        y, z = mpmath.mpf(y), mpmath.mpf(z)
        hy, hz = y * rel_step, z * rel_step
        g0 = g(y, z)
        g1 = (g(y + hy, z) - g(y - hy, z)) / (2 * hy)
        g2 = (g(y, z + hz) - g(y, z - hz)) / (2 * hz)
        g11 = (g(y + hy, z) - 2 * g0 + g(y - hy, z)) / hy ** 2
        g22 = (g(y, z + hz) - 2 * g0 + g(y, z - hz)) / hz ** 2
        g12 = (g(y + hy, z + hz) - g(y + hy, z - hz)
               - g(y - hy, z + hz) + g(y - hy, z - hz)) / (4 * hy * hz)
        return tuple(float(v) for v in (g1, g2, g11, g12, g22))
