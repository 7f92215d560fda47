"""Floating-point hot loops, each in a numba and a plain numpy flavour.

The public wrappers at the bottom pick the numba version unless
``FOCKSE_DISABLE_NUMBA`` is set.  ``Gamma = inf`` means no filter.

Single-photon kernel used everywhere (gamma = decay rate, Gamma = filter):

    A(t)   = Gamma (exp(-gamma t/2) - exp(-Gamma t/2)) / (Gamma - gamma)
    rho(t) = gamma A(t)**2                        detection density
    G(t)   = int_t^oo rho = gamma Gamma (A/Gamma + e^{-gamma t/2}/Gamma_+)**2
                              + Gamma**2 e^{-gamma t} / Gamma_+**2

Written this way every term is nonnegative, so there is no cancellation and
no special case at Gamma = gamma.
"""
import math

import numpy as np

from . import _backend
from ._backend import njit

__all__ = [
    "amplitude",
    "density_tail",
    "inverse_cdf",
    "term_sum_power",
    "term_sum_cross",
    "term_grid_exp",
    "density_tail_numba",
    "density_tail_numpy",
    "inverse_cdf_numba",
    "inverse_cdf_numpy",
    "term_sum_power_numba",
    "term_sum_power_numpy",
    "term_grid_exp_numba",
    "term_grid_exp_numpy",
]

_SMALL = 1e-5


# scalar pieces (numba) ----------------------------------------------------

@njit
def _expm1_ratio(x):
    # expm1(x)/x, accurate as x -> 0
    if abs(x) < _SMALL:
        return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0))
    return math.expm1(x) / x


@njit
def _amp(t, g, G):
    x = -0.5 * (G - g) * t
    if x <= 1.0:
        return 0.5 * G * t * math.exp(-0.5 * g * t) * _expm1_ratio(x)
    # Gamma < gamma and late times: plain difference has no cancellation here
    return G * (math.exp(-0.5 * G * t) - math.exp(-0.5 * g * t)) / (g - G)


@njit
def _rho_tail(t, g, G):
    if math.isinf(t):
        return 0.0, 0.0
    if math.isinf(G):
        e = math.exp(-g * t)
        return g * e, e
    a = _amp(t, g, G)
    gp = G + g
    h = math.exp(-0.5 * g * t)
    u = a / G + h / gp
    return g * a * a, g * G * u * u + (G * h / gp) ** 2


@njit
def density_tail_numba(t, g, G):
    n = t.shape[0]
    rho = np.empty(n)
    tail = np.empty(n)
    for i in range(n):
        r, q = _rho_tail(t[i], g, G)
        rho[i] = r
        tail[i] = q
    return rho, tail


def _expm1_ratio_np(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SMALL
    safe = np.where(small, 1.0, x)
    series = 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0))
    return np.where(small, series, np.expm1(safe) / safe)


def amplitude(t, g, G):
    """Real filter amplitude A(t) (vectorized numpy)."""
    t = np.asarray(t, dtype=float)
    if math.isinf(G):
        return np.exp(-0.5 * g * t)
    x = -0.5 * (G - g) * t
    with np.errstate(over="ignore", invalid="ignore"):
        near = 0.5 * G * t * np.exp(-0.5 * g * t) * _expm1_ratio_np(np.minimum(x, 1.0))
        far = G * (np.exp(-0.5 * G * t) - np.exp(-0.5 * g * t)) / (g - G) if G != g else near
    return np.where(x <= 1.0, near, far)


def density_tail_numpy(t, g, G):
    t = np.asarray(t, dtype=float)
    if math.isinf(G):
        e = np.exp(-g * t)
        return g * e, e
    t = np.where(np.isinf(t), 1e300, t)
    a = amplitude(t, g, G)
    gp = G + g
    h = np.exp(-0.5 * g * t)
    u = a / G + h / gp
    return g * a * a, g * G * u * u + (G * h / gp) ** 2


# inverse CDF -----------------------------------------------------------------

@njit
def _solve_tail(target_log, g, G, t_scale, rtol):
    # find t with log G(t) = target_log; log G is decreasing and concave enough
    lo = 0.0
    hi = t_scale
    for _ in range(200):
        _, q = _rho_tail(hi, g, G)
        if q <= 0.0 or math.log(q) < target_log:
            break
        lo = hi
        hi *= 2.0
    # a few bisections to land in the Newton basin
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        _, q = _rho_tail(mid, g, G)
        if q > 0.0 and math.log(q) > target_log:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(100):
        r, q = _rho_tail(t, g, G)
        f = math.log(q) - target_log
        if f > 0.0:
            lo = t
        else:
            hi = t
        step = f * q / r if r > 0.0 else 0.0
        tn = t + step
        if not (lo < tn < hi) or r <= 0.0:
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= rtol * tn or hi - lo <= rtol * hi:
            return tn
        t = tn
    return t


@njit
def inverse_cdf_numba(u, g, G, rtol=1e-12):
    n = u.shape[0]
    out = np.empty(n)
    if math.isinf(G):
        for i in range(n):
            out[i] = -math.log1p(-u[i]) / g
        return out
    g0 = G / (G + g)
    scale = 1.0 / min(g, G)
    for i in range(n):
        if u[i] <= 0.0:
            out[i] = 0.0
        else:
            out[i] = _solve_tail(math.log1p(-u[i]) + math.log(g0), g, G, scale, rtol)
    return out


def inverse_cdf_numpy(u, g, G, rtol=1e-12):
    u = np.asarray(u, dtype=float)
    if math.isinf(G):
        return -np.log1p(-u) / g
    g0 = G / (G + g)
    target = np.log1p(-u) + math.log(g0)
    lo = np.zeros_like(u)
    hi = np.full_like(u, 1.0 / min(g, G))
    # bracket by doubling
    for _ in range(200):
        _, q = density_tail_numpy(hi, g, G)
        with np.errstate(divide="ignore"):
            above = np.log(q) >= target
        if not above.any():
            break
        lo = np.where(above, hi, lo)
        hi = np.where(above, 2.0 * hi, hi)
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        _, q = density_tail_numpy(mid, g, G)
        with np.errstate(divide="ignore"):
            right = np.log(q) > target
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(100):
        r, q = density_tail_numpy(t, g, G)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.log(q) - target
            step = np.where(r > 0, f * q / r, 0.0)
        lo = np.where(f > 0, t, lo)
        hi = np.where(f > 0, hi, t)
        tn = t + step
        bad = ~((lo < tn) & (tn < hi)) | (r <= 0)
        tn = np.where(bad, 0.5 * (lo + hi), tn)
        done = (np.abs(tn - t) <= rtol * tn) | (hi - lo <= rtol * hi)
        t = tn
        if done.all():
            break
    return np.where(u <= 0.0, 0.0, t)


# combinatorial sums ------------------------------------------------------------
#
# A term table is (coef, eg, eG, eP, ra[, rb]) with one row per index tuple.
# Each term is coef / (g**eg * G**eG * (Gp/4)**eP) times a rate function of
# ra . (g, G, Gp) (and rb . (g, G, Gp) for the two-rate tables).

@njit
def _term_power(coef, eg, eG, eP, ra, p, g, G):
    gp = G + g
    total = 0.0
    for i in range(coef.shape[0]):
        r = ra[i, 0] * g + ra[i, 1] * G + ra[i, 2] * gp
        total += coef[i] / (g ** eg[i] * G ** eG[i] * (0.25 * gp) ** eP[i] * r**p)
    return total


@njit
def term_sum_power_numba(coef, eg, eG, eP, ra, p, g, Gammas):
    out = np.empty(Gammas.shape[0])
    for j in range(Gammas.shape[0]):
        out[j] = _term_power(coef, eg, eG, eP, ra, p, g, Gammas[j])
    return out


def term_sum_power_numpy(coef, eg, eG, eP, ra, p, g, Gammas):
    G = np.asarray(Gammas, dtype=float)[:, None]
    gp = G + g
    r = ra[:, 0] * g + ra[:, 1] * G + ra[:, 2] * gp
    terms = coef / (g**eg * G**eG * (0.25 * gp) ** eP * r**p)
    return terms.sum(axis=1)


@njit
def _term_cross(coef, eg, eG, eP, ra, rb, g, G):
    gp = G + g
    total = 0.0
    for i in range(coef.shape[0]):
        a = ra[i, 0] * g + ra[i, 1] * G + ra[i, 2] * gp
        b = rb[i, 0] * g + rb[i, 1] * G + rb[i, 2] * gp
        total += coef[i] * (3.0 * a + b) / (
            g ** eg[i] * G ** eG[i] * (0.25 * gp) ** eP[i] * a * a * (a + b) ** 3
        )
    return total


@njit
def term_sum_cross_numba(coef, eg, eG, eP, ra, rb, g, Gammas):
    out = np.empty(Gammas.shape[0])
    for j in range(Gammas.shape[0]):
        out[j] = _term_cross(coef, eg, eG, eP, ra, rb, g, Gammas[j])
    return out


def term_sum_cross_numpy(coef, eg, eG, eP, ra, rb, g, Gammas):
    G = np.asarray(Gammas, dtype=float)[:, None]
    gp = G + g
    a = ra[:, 0] * g + ra[:, 1] * G + ra[:, 2] * gp
    b = rb[:, 0] * g + rb[:, 1] * G + rb[:, 2] * gp
    terms = coef * (3.0 * a + b) / (g**eg * G**eG * (0.25 * gp) ** eP * a * a * (a + b) ** 3)
    return terms.sum(axis=1)


@njit
def term_grid_exp_numba(coef, eg, eG, eP, ra, rb, g, G, t1, tN):
    # sum_i c_i exp(-a_i tN/2 - b_i t1/2) at each pair (t1[j], tN[j])
    gp = G + g
    n = coef.shape[0]
    w = np.empty(n)
    a = np.empty(n)
    b = np.empty(n)
    for i in range(n):
        w[i] = coef[i] / (g ** eg[i] * G ** eG[i] * (0.25 * gp) ** eP[i])
        a[i] = 0.5 * (ra[i, 0] * g + ra[i, 1] * G + ra[i, 2] * gp)
        b[i] = 0.5 * (rb[i, 0] * g + rb[i, 1] * G + rb[i, 2] * gp)
    out = np.empty(t1.shape[0])
    for j in range(t1.shape[0]):
        s = 0.0
        for i in range(n):
            s += w[i] * math.exp(-a[i] * tN[j] - b[i] * t1[j])
        out[j] = s
    return out


def term_grid_exp_numpy(coef, eg, eG, eP, ra, rb, g, G, t1, tN):
    gp = G + g
    w = coef / (g**eg * G**eG * (0.25 * gp) ** eP)
    a = 0.5 * (ra @ np.array([g, G, gp]))
    b = 0.5 * (rb @ np.array([g, G, gp]))
    t1 = np.asarray(t1, dtype=float)[:, None]
    tN = np.asarray(tN, dtype=float)[:, None]
    return (w * np.exp(-a * tN - b * t1)).sum(axis=1)


# dispatch ---------------------------------------------------------------------

def _pick(fast, slow):
    return fast if _backend.USE_NUMBA else slow


def density_tail(t, g, G):
    """(rho(t), G(t)) for scalar or array ``t``; returns arrays."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return _pick(density_tail_numba, density_tail_numpy)(t, float(g), float(G))


def inverse_cdf(u, g, G, rtol=1e-12):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return _pick(inverse_cdf_numba, inverse_cdf_numpy)(u, float(g), float(G), rtol)


def term_sum_power(table, p, g, Gammas):
    Gammas = np.atleast_1d(np.asarray(Gammas, dtype=float))
    return _pick(term_sum_power_numba, term_sum_power_numpy)(
        table.coef, table.eg, table.eG, table.eP, table.ra, int(p), float(g), Gammas
    )


def term_sum_cross(table, g, Gammas):
    Gammas = np.atleast_1d(np.asarray(Gammas, dtype=float))
    return _pick(term_sum_cross_numba, term_sum_cross_numpy)(
        table.coef, table.eg, table.eG, table.eP, table.ra, table.rb, float(g), Gammas
    )


def term_grid_exp(table, g, G, t1, tN):
    t1, tN = np.broadcast_arrays(np.atleast_1d(np.asarray(t1, dtype=float)), np.atleast_1d(np.asarray(tN, dtype=float)))
    shape = t1.shape
    out = _pick(term_grid_exp_numba, term_grid_exp_numpy)(
        table.coef, table.eg, table.eG, table.eP, table.ra, table.rb, float(g), float(G), t1.ravel().copy(), tN.ravel().copy()
    )
    return out.reshape(shape)
