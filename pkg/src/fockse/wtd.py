"""Waiting-time distributions: filtered two-photon emission and thermal light."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import kernels
from .rates import RateSet, ThermalParams

__all__ = [
    "wtd_biphoton",
    "wtd_biphoton_integral",
    "mean_wtd_biphoton",
    "wtd_thermal",
    "wtd_thermal_laplace",
    "thermal_rates",
    "thermal_peak_average",
    "thermal_peak_average_narrow",
    "peak_average_from_density",
    "peak_average_from_samples",
]


def _out(tau, arr):
    return float(arr) if np.ndim(tau) == 0 else arr


def wtd_biphoton(r: RateSet, tau):
    """Density of the delay between the two detections of a fully detected pair.

    Three exponentials with rates gamma, Gamma and (Gamma+gamma)/2; close to
    Gamma = gamma a second-order expansion in Gamma/gamma - 1 is used, which
    keeps the density normalized exactly at every order.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    g = r.g
    if not r.filtered:
        return _out(tau, g * np.exp(-g * tau))
    G = r.G
    if r.near_confluent:
        d = G / g - 1.0
        x = g * tau
        c0 = (x * x + 3 * x + 3) / 8
        c1 = -(x**3 - 3 * x - 3) / 16
        c2 = (7 * x**4 - 12 * x**3 - 21 * x**2 - 27 * x - 27) / 384
        return _out(tau, g * np.exp(-x) * (c0 + d * (c1 + d * c2)))
    pre = G * g * (G + g) / ((G - g) ** 2 * (3 * G + g) * (G + 3 * g))
    body = (
        G * (3 * G + g) * np.exp(-g * tau)
        + g * (G + 3 * g) * np.exp(-G * tau)
        - 8 * G * g * np.exp(-0.5 * (G + g) * tau)
    )
    return _out(tau, np.maximum(pre * body, 0.0))


def wtd_biphoton_integral(r: RateSet, tau) -> float:
    """Same density from its definition 2 int_0^oo rho(t) rho(t+tau) dt / P(2,2)."""
    G = r.G if r.filtered else math.inf
    g0 = G / (G + r.g) if r.filtered else 1.0

    def f(t):
        rho, _ = kernels.density_tail(np.array([t, t + tau]), r.g, G)
        return rho[0] * rho[1]

    scale = 1.0 / min(r.g, G)
    edges = [0.0, scale, 10 * scale, 60 * scale, np.inf]
    total = sum(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=400)[0] for a, b in zip(edges[:-1], edges[1:]))
    return 2.0 * total / g0**2


def mean_wtd_biphoton(r: RateSet):
    """Mean delay: 1/Gamma + 1/gamma + 2/(gamma+Gamma) - 9/(4(3Gamma+gamma)) - 9/(4(Gamma+3gamma)).

    Exact for exact rates.
    """
    if r.is_exact():
        e = r.exact()
        g, G, nine = e.gamma_a, e.Gamma, Fraction(9, 4)
    else:
        g, G, nine = r.g, (r.G if r.filtered else None), 2.25
    if not r.filtered:
        return 1 / g
    return 1 / G + 1 / g + 2 / (g + G) - nine / (3 * G + g) - nine / (G + 3 * g)


# thermal light --------------------------------------------------------------------

def _require_unfiltered(p: ThermalParams):
    if p.filtered:
        raise ValueError("the closed-form thermal wtd is for the unfiltered field")
    if float(p.P_a) == 0.0:
        raise ValueError("P_a = 0 emits no photons; the wtd is undefined")


def thermal_rates(p: ThermalParams):
    """(slow, fast, w_slow, w_fast) such that w_th = w_slow e^{-slow tau} + w_fast e^{-fast tau}."""
    _require_unfiltered(p)
    P, g = float(p.P_a), float(p.gamma_a)
    Q = p.Q
    a = g - P
    alpha = (g * g + P * P) / (2 * a)
    beta = Q / (2 * a)
    c = 2 * P * g / (Q * a)
    return alpha - beta, alpha + beta, 0.5 * c * (Q - 2 * P * g), 0.5 * c * (Q + 2 * P * g)


def wtd_thermal(p: ThermalParams, tau):
    """Waiting-time density of thermal light from a pumped cavity.

    The cosh/sinh closed form is evaluated as two decaying exponentials so it
    does not overflow at long delays.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    slow, fast, ws, wf = thermal_rates(p)
    return _out(tau, ws * np.exp(-slow * tau) + wf * np.exp(-fast * tau))


def wtd_thermal_laplace(p: ThermalParams, s) -> float:
    """(1 + 1/(gamma n_a g2(s)))^-1 with g2(s) = 1/s + 1/(s + gamma - P)."""
    _require_unfiltered(p)
    P, g = float(p.P_a), float(p.gamma_a)
    n = P / (g - P)
    g2 = 1.0 / s + 1.0 / (s + g - P)
    return 1.0 / (1.0 + 1.0 / (g * n * g2))


def thermal_peak_average(p: ThermalParams) -> float:
    """Wide-filter multiphoton-peak average (gamma - P)/(P^2 + gamma^2 + Q)."""
    P, g = float(p.P_a), float(p.gamma_a)
    return (g - P) / (P * P + g * g + p.Q)


def thermal_peak_average_narrow(p: ThermalParams, Gamma=None) -> float:
    """Narrow-filter asymptote <tau_inf> (1 - theta) gamma / Gamma."""
    G = p.Gamma if Gamma is None else Gamma
    if G is None or not p.with_filter(G).filtered:
        raise ValueError("the narrow-filter asymptote needs a finite Gamma")
    return thermal_peak_average(p) * (1 - float(p.theta)) * float(p.gamma_a) / float(G)


# multiphoton-peak estimator ----------------------------------------------------------

def peak_average_from_density(tau, density, fit_range=(5.0, 20.0), window=None):
    """Average delay of the short-time excess of a waiting-time density.

    The tail inside ``fit_range`` is fitted to an exponential background
    A exp(-lam tau), which is subtracted; the mean delay is then taken over
    the nonnegative residual for tau <= ``window`` (default: the start of the
    fit range).  Clipping noise to zero beyond the peak would otherwise bias
    the average upwards.  Returns (average, lam).
    """
    tau = np.asarray(tau, dtype=float)
    density = np.asarray(density, dtype=float)
    window = fit_range[0] if window is None else window
    sel = (tau >= fit_range[0]) & (tau <= fit_range[1]) & (density > 0)
    if sel.sum() < 3:
        raise ValueError("not enough points with positive density inside fit_range")
    slope, intercept = np.polyfit(tau[sel], np.log(density[sel]), 1)
    lam = -slope
    background = np.exp(intercept) * np.exp(-lam * tau)
    peak = tau <= window
    resid = np.maximum(density[peak] - background[peak], 0.0)
    w = integrate.trapezoid(resid, tau[peak])
    if w <= 0:
        raise ValueError("no multiphoton excess above the fitted background")
    return integrate.trapezoid(tau[peak] * resid, tau[peak]) / w, lam


def peak_average_from_samples(delays, bin_width=0.05, fit_range=(5.0, 20.0), t_max=None, window=None):
    """Histogram sampled delays into a density and apply the peak estimator."""
    delays = np.asarray(delays, dtype=float)
    if delays.size == 0:
        raise ValueError("no delays")
    t_max = fit_range[1] if t_max is None else t_max
    edges = np.arange(0.0, t_max + bin_width, bin_width)
    counts, edges = np.histogram(delays, bins=edges)
    density = counts / (delays.size * bin_width)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return peak_average_from_density(centers, density, fit_range, window)
