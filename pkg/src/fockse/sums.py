"""Closed-form combinatorial sums for filtered detection-time moments.

With ``X = gamma Gamma Gamma_+ / Gamma_-**2`` the k-th detection time of a
fully detected N-photon bundle has

    <t_k>   = 2 N! X**N  S_2
    <t_k^2> = 4 N! X**N  S_3

where ``S_p`` runs over index tuples k1+k2+k3 = N-k, k4+...+k9 = k-1 and
k10+k11 = 2 of

    prod(1/k_j!) (-1)**(k3+k6+k7+k8+k11)
    / (gamma**(k1+k4+k7) Gamma**(k2+k5+k8) (Gamma_+/4)**(k3+k6+k9) r**p)

and ``r = gamma (k1+k7+k11/2) + Gamma (k2+k8+k10/2) + Gamma_+ (k3+k9)/2``.
Both are already conditioned on full detection (X**N absorbs 1/P(N, N)).
The first-last cross moment and the first-last joint density use a second
table over k1+...+k6 = N-2 and k7+...+k10 = 2.

The raw sums carry a (Gamma - gamma)**(-2N) prefactor, so they are only
usable off the coinciding point Gamma = gamma.  Tables are built once per
(N, k) and reused across any number of Gamma values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .exact import as_rational, compositions

__all__ = [
    "TermTable",
    "mean_table",
    "cross_table",
    "evaluate_power_exact",
    "evaluate_cross_exact",
    "evaluate_power_float",
    "evaluate_cross_float",
    "mean_time_sum_value",
    "second_moment_sum_value",
    "cross_moment_sum_value",
    "joint_first_last_sum",
]


@dataclass(frozen=True)
class TermTable:
    coef_exact: tuple
    coef: np.ndarray
    eg: np.ndarray
    eG: np.ndarray
    eP: np.ndarray
    ra: np.ndarray  # coefficients of (gamma, Gamma, Gamma_+) in the first rate
    rb: np.ndarray | None = None

    def __len__(self):
        return len(self.coef_exact)


def _inv_fact(ks):
    d = 1
    for k in ks:
        d *= math.factorial(k)
    return Fraction(1, d)


def _pack(rows):
    coef_exact = tuple(r[0] for r in rows)
    arr = lambda j: np.array([r[j] for r in rows], dtype=np.int64)  # noqa: E731
    ra = np.array([r[4] for r in rows], dtype=float).reshape(-1, 3)
    rb = None
    if rows and len(rows[0]) > 5:
        rb = np.array([r[5] for r in rows], dtype=float).reshape(-1, 3)
    return TermTable(coef_exact, np.array([float(c) for c in coef_exact]), arr(1), arr(2), arr(3), ra, rb)


@lru_cache(maxsize=None)
def mean_table(N: int, k: int) -> TermTable:
    """Eleven-index table shared by the first and second moment sums."""
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    rows = []
    for a in compositions(N - k, 3):
        k1, k2, k3 = a
        for b in compositions(k - 1, 6):
            k4, k5, k6, k7, k8, k9 = b
            for c in compositions(2, 2):
                k10, k11 = c
                sign = -1 if (k3 + k6 + k7 + k8 + k11) % 2 else 1
                coef = sign * _inv_fact(a + b + c)
                rate = (
                    Fraction(2 * (k1 + k7) + k11, 2),
                    Fraction(2 * (k2 + k8) + k10, 2),
                    Fraction(k3 + k9, 2),
                )
                rows.append((coef, k1 + k4 + k7, k2 + k5 + k8, k3 + k6 + k9, rate))
    return _pack(rows)


@lru_cache(maxsize=None)
def cross_table(N: int) -> TermTable:
    """Ten-index table for the first-and-last photon pair.

    ``ra`` is the tN decay rate and ``rb`` the t1 decay rate, both doubled:
    a term decays as exp(-(a tN + b t1)/2).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    rows = []
    for a in compositions(N - 2, 6):
        k1, k2, k3, k4, k5, k6 = a
        for b in compositions(2, 4):
            k7, k8, k9, k10 = b
            sign = -1 if (k3 + k4 + k5 + k8 + k9) % 2 else 1
            coef = sign * _inv_fact(a + b)
            ra = (2 * k1 + k7 + k8, 2 * k2 + k9 + k10, k3)
            rb = (2 * k4 + k7 + k9, 2 * k5 + k8 + k10, k6)
            rows.append((coef, k1 + k4, k2 + k5, k3 + k6, ra, rb))
    return _pack(rows)


def _check_rates(gamma, Gamma):
    if Gamma == gamma:
        raise ZeroDivisionError("the combinatorial sums are singular at Gamma = gamma; use the exp-polynomial route")


def _rate(vec, g, G, Gp):
    return vec[0] * g + vec[1] * G + vec[2] * Gp


def evaluate_power_exact(table: TermTable, p: int, gamma, Gamma) -> Fraction:
    g, G = as_rational(gamma), as_rational(Gamma)
    _check_rates(g, G)
    Gp = G + g
    q = Gp / 4
    total = Fraction(0)
    for c, eg, eG, eP, ra in zip(table.coef_exact, table.eg, table.eG, table.eP, table.ra):
        r = _rate([as_rational(int(2 * x)) / 2 for x in ra], g, G, Gp)
        total += c / (g ** int(eg) * G ** int(eG) * q ** int(eP) * r**p)
    return total


def evaluate_cross_exact(table: TermTable, gamma, Gamma) -> Fraction:
    g, G = as_rational(gamma), as_rational(Gamma)
    _check_rates(g, G)
    Gp = G + g
    q = Gp / 4
    total = Fraction(0)
    for c, eg, eG, eP, ra, rb in zip(table.coef_exact, table.eg, table.eG, table.eP, table.ra, table.rb):
        a = _rate([int(x) for x in ra], g, G, Gp)
        b = _rate([int(x) for x in rb], g, G, Gp)
        total += c * (3 * a + b) / (g ** int(eg) * G ** int(eG) * q ** int(eP) * a * a * (a + b) ** 3)
    return total


def evaluate_power_float(table: TermTable, p: int, gamma, Gammas):
    return kernels.term_sum_power(table, p, float(gamma), Gammas)


def evaluate_cross_float(table: TermTable, gamma, Gammas):
    return kernels.term_sum_cross(table, float(gamma), Gammas)


def _prefactor(N, gamma, Gamma):
    return (gamma * Gamma * (Gamma + gamma) / (Gamma - gamma) ** 2) ** N


def _moment_sum(N, k, gamma, Gamma, p, exact):
    """Normalized <t_k**(p-1)> of a fully detected bundle."""
    table = mean_table(N, k)
    scale = 2 if p == 2 else 4
    if exact:
        g, G = as_rational(gamma), as_rational(Gamma)
        return scale * math.factorial(N) * _prefactor(N, g, G) * evaluate_power_exact(table, p, g, G)
    g = float(gamma)
    G = np.atleast_1d(np.asarray(Gamma, dtype=float))
    out = scale * math.factorial(N) * _prefactor(N, g, G) * evaluate_power_float(table, p, g, G)
    return out if np.ndim(Gamma) else float(out[0])


def mean_time_sum_value(N, k, gamma, Gamma, exact=True):
    return _moment_sum(N, k, gamma, Gamma, 2, exact)


def second_moment_sum_value(N, k, gamma, Gamma, exact=True):
    return _moment_sum(N, k, gamma, Gamma, 3, exact)


def cross_moment_sum_value(N, gamma, Gamma, exact=True):
    """Normalized <t_1 t_N> of a fully detected bundle."""
    table = cross_table(N)
    if exact:
        g, G = as_rational(gamma), as_rational(Gamma)
        return 32 * math.factorial(N) * (-1) ** N * _prefactor(N, g, G) * evaluate_cross_exact(table, g, G)
    g = float(gamma)
    G = np.atleast_1d(np.asarray(Gamma, dtype=float))
    out = 32 * math.factorial(N) * (-1) ** N * _prefactor(N, g, G) * evaluate_cross_float(table, g, G)
    return out if np.ndim(Gamma) else float(out[0])


def joint_first_last_sum(N, gamma, Gamma, t1, tN):
    """Unnormalized first-last joint density from the ten-index sum (float)."""
    g, G = float(gamma), float(Gamma)
    if g == G:
        raise ZeroDivisionError("the combinatorial sums are singular at Gamma = gamma")
    table = cross_table(N)
    t1 = np.asarray(t1, dtype=float)
    tN = np.asarray(tN, dtype=float)
    pref = 2 * math.factorial(N) * (G / (G - g)) ** (2 * N) * (-g) ** N
    vals = pref * kernels.term_grid_exp(table, g, G, t1, tN)
    vals = np.where(np.broadcast_to(t1 <= tN, np.shape(vals)), vals, 0.0)
    return vals if vals.ndim else float(vals)
