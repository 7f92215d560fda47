"""Thermal light from an incoherently pumped cavity seen through a Lorentzian filter.

With ``a = gamma - P`` the thermal line has width ``a`` and the filter width
Gamma.  Closed forms accept Fractions, in which case they stay exact.
"""
from __future__ import annotations

import numpy as np
from scipy import optimize

from .rates import ThermalParams, _div

__all__ = [
    "lorentzian",
    "spectrum_thermal",
    "spectrum_thermal_filtered",
    "g1_thermal_filtered",
    "g2_thermal_filtered",
    "thermal_number_distribution",
    "filtered_temperature",
    "filtered_intensity",
    "unfiltered_intensity",
    "lorentzian_fit_residual",
]

_SMALL = 1e-5


def lorentzian(omega, width):
    """Normalized Lorentzian with full width ``width``: (1/pi) (w/2) / ((w/2)^2 + omega^2)."""
    h = 0.5 * float(width)
    return h / (np.pi * (h * h + np.asarray(omega, dtype=float) ** 2))


def spectrum_thermal(p: ThermalParams, omega):
    return lorentzian(omega, float(p.gamma_a) - float(p.P_a))


def spectrum_thermal_filtered(p: ThermalParams, omega):
    """(pi/2) S_th S_Gamma (Gamma + gamma - P); integrates to one over omega."""
    if not p.filtered:
        return spectrum_thermal(p, omega)
    a = float(p.gamma_a) - float(p.P_a)
    G = float(p.Gamma)
    out = 0.5 * np.pi * lorentzian(omega, a) * lorentzian(omega, G) * (G + a)
    return float(out) if np.ndim(omega) == 0 else out


def _expm1_ratio(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SMALL
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0)), np.expm1(safe) / safe)


def g1_thermal_filtered(p: ThermalParams, tau):
    """Normalized first-order coherence of the filtered field (real, even in tau).

    (Gamma e^{-a tau/2} - a e^{-Gamma tau/2}) / (Gamma - a), written as
    e^{-a tau/2} [1 + (a tau/2) E(-(Gamma - a) tau/2)] with E(x) = expm1(x)/x,
    which has no 0/0 at Gamma = a.
    """
    tau = np.abs(np.asarray(tau, dtype=float))
    a = float(p.gamma_a) - float(p.P_a)
    if not p.filtered:
        out = np.exp(-0.5 * a * tau)
    else:
        G = float(p.Gamma)
        x = -0.5 * (G - a) * tau
        with np.errstate(over="ignore", invalid="ignore"):
            near = np.exp(-0.5 * a * tau) * (1.0 + 0.5 * a * tau * _expm1_ratio(np.minimum(x, 1.0)))
            far = (G * np.exp(-0.5 * a * tau) - a * np.exp(-0.5 * G * tau)) / (G - a) if G != a else near
        out = np.where(x <= 1.0, near, far)
    return float(out) if out.ndim == 0 else out


def g2_thermal_filtered(p: ThermalParams, tau):
    """Second-order correlation 1 + |g1(tau)|^2 of the filtered thermal field.

    Equal to 1 + [Gamma^2 e^{-a tau} + a^2 e^{-Gamma tau} - 2 Gamma a e^{-(Gamma+a) tau/2}]/(Gamma - a)^2
    but evaluated through g1 so that g2(0) = 2 holds to rounding for every Gamma.
    """
    g1 = g1_thermal_filtered(p, tau)
    return 1.0 + np.asarray(g1) ** 2 if np.ndim(g1) else 1.0 + g1 * g1


def thermal_number_distribution(p: ThermalParams, n: int):
    """Geometric photon-number distribution (1 - theta) theta^n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    th = p.theta
    return (1 - th) * th**n


def filtered_temperature(p: ThermalParams, Gamma=None):
    """Population-ratio temperature P gamma / (P^2 + (gamma + Gamma)(gamma - P))."""
    G = p.Gamma if Gamma is None else Gamma
    if not p.with_filter(G).filtered:
        return p.theta
    P, g = p.P_a, p.gamma_a
    return _div(P * g, P * P + (g + G) * (g - P))


def filtered_intensity(p: ThermalParams, Gamma=None):
    """Photon flux gamma P Gamma / ((gamma - P + Gamma)(gamma - P)) behind the filter."""
    G = p.Gamma if Gamma is None else Gamma
    if not p.with_filter(G).filtered:
        return unfiltered_intensity(p)
    P, g = p.P_a, p.gamma_a
    return _div(g * P * G, (g - P + G) * (g - P))


def unfiltered_intensity(p: ThermalParams):
    """gamma P / (gamma - P) = gamma <n>."""
    return _div(p.gamma_a * p.P_a, p.gamma_a - p.P_a)


def lorentzian_fit_residual(p: ThermalParams, omega=None) -> float:
    """Relative L2 misfit of the best single Lorentzian to the filtered spectrum.

    Amplitude and width are both free; zero means the line is Lorentzian.
    """
    if omega is None:
        a = float(p.gamma_a) - float(p.P_a)
        span = 20.0 * max(a, float(p.Gamma) if p.filtered else a)
        omega = np.linspace(-span, span, 4001)
    S = spectrum_thermal_filtered(p, omega)

    def model(w, amp, width):
        return amp * lorentzian(w, width)

    w0 = 1.0 / (np.pi * S.max())  # width of a Lorentzian with the same peak
    (amp, width), _ = optimize.curve_fit(model, omega, S, p0=(1.0, w0))
    return float(np.linalg.norm(S - model(omega, amp, width)) / np.linalg.norm(S))
