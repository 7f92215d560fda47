"""Detection statistics of a filtered N-photon Fock state decaying spontaneously.

Every photon of the bundle is detected independently with probability
``p = xi Gamma / Gamma_+`` (``p = xi`` without filter) and, when detected,
its detection time has density ``rho(t)/p``.  All distributions below follow
from the single-photon pair (rho, G) with ``G(t) = int_t^oo rho``:

    joint density of N detections     N! prod rho(t_i)       (ordered times)
    k-th of N, all detected           k C(N,k) G^(N-k) (G(0) - G)^(k-1) rho
    first and last of N               N(N-1) rho(t1) rho(tN) (G(t1) - G(tN))^(N-2)

Float functions accept scalars or arrays of times; the ``*_exppoly``
constructors return exact :class:`~fockse.exact.ExpPolynomial` objects for
rational rates, including Gamma = gamma.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels, sums
from .exact import ExpPolynomial, as_rational, hyp2f1_terminating
from .rates import RateSet, as_bundle

__all__ = [
    "CountingDistribution",
    "efficiency_unfiltered",
    "efficiency_filtered",
    "efficiency",
    "binomial_distribution",
    "counting_probability",
    "counting_via_mandel_series",
    "detect_probability",
    "detected_fraction",
    "g_pair",
    "single_photon_density",
    "single_photon_tail",
    "density_exppoly",
    "tail_exppoly",
    "joint_pdf",
    "marginal_full",
    "marginal_full_exppoly",
    "marginal_broken",
    "joint_first_last",
    "filter_response",
    "fock_correlator",
]


def _scalar_out(t, arr):
    return float(arr[0]) if np.ndim(t) == 0 else arr.reshape(np.shape(t))


def _check_time(T):
    if np.any(np.asarray(T, dtype=float) < 0):
        raise ValueError("times must be nonnegative")


# efficiencies ----------------------------------------------------------------

def efficiency_unfiltered(r: RateSet, T):
    """Probability xi (1 - exp(-gamma T)) of detecting one photon by time T."""
    _check_time(T)
    T = np.asarray(T, dtype=float)
    out = float(r.xi) * -np.expm1(-r.g * T)
    return float(out) if out.ndim == 0 else out


def efficiency_filtered(r: RateSet, T):
    """Detection probability by time T behind a Lorentzian filter.

    Evaluated as xi (G(0) - G(T)); valid for every Gamma including Gamma = gamma.
    """
    r.require_filter()
    _check_time(T)
    _, tail = kernels.density_tail(T, r.g, r.G)
    g0 = r.G / (r.G + r.g)
    return _scalar_out(T, float(r.xi) * (g0 - tail))


def efficiency(r: RateSet, T):
    if np.isinf(np.asarray(T, dtype=float)).all():
        return r.keep_probability
    return efficiency_filtered(r, T) if r.filtered else efficiency_unfiltered(r, T)


# counting ------------------------------------------------------------------------

@dataclass(frozen=True)
class CountingDistribution:
    """Probabilities of detecting k = 0..N photons."""

    probabilities: tuple
    exact: bool = False

    def __post_init__(self):
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability")

    def __getitem__(self, k):
        return self.probabilities[k]

    def __len__(self):
        return len(self.probabilities)

    @property
    def N(self) -> int:
        return len(self.probabilities) - 1

    def total(self):
        return sum(self.probabilities, Fraction(0) if self.exact else 0.0)

    def mean(self):
        return sum((k * p for k, p in enumerate(self.probabilities)), Fraction(0) if self.exact else 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probabilities])


def binomial_distribution(N: int, p) -> CountingDistribution:
    """Binomial(N, p); exact when ``p`` is an int or Fraction."""
    exact = not isinstance(p, float)
    if exact:
        p = as_rational(p)
        q = 1 - p
        probs = tuple(math.comb(N, k) * p**k * q ** (N - k) for k in range(N + 1))
    else:
        q = 1.0 - p
        probs = tuple(math.comb(N, k) * p**k * q ** (N - k) for k in range(N + 1))
    return CountingDistribution(probs, exact)


def counting_probability(r: RateSet, spec, T=math.inf) -> CountingDistribution:
    """Number of photons detected by time T out of an N-photon bundle.

    ``T = inf`` with exact rates gives an exact distribution.
    """
    spec = as_bundle(spec)
    if math.isinf(float(T)):
        p = r.keep_probability
    else:
        p = float(efficiency(r, T))
    return binomial_distribution(spec.N, p)


def counting_via_mandel_series(r: RateSet, spec, T, n: int):
    """Same probability from the factorial-moment series (independent route)."""
    spec = as_bundle(spec)
    N = spec.N
    if not 0 <= n <= N:
        raise ValueError(f"n must be in 0..{N}")
    eff = r.keep_probability if math.isinf(float(T)) else float(efficiency(r, T))
    total = 0
    for k in range(n, N + 1):
        moment = eff**k * math.perm(N, k)  # <:Omega^k:>
        term = moment / (math.factorial(n) * math.factorial(k - n))
        total += term if (n + k) % 2 == 0 else -term
    return total


def detect_probability(r: RateSet, spec, k: int):
    """P(k, N): probability that exactly k photons of the bundle are ever detected."""
    spec = as_bundle(spec)
    spec.check_index(k, "k", lo=0)
    return binomial_distribution(spec.N, r.keep_probability)[k]


def _hyp_fraction(N, n, p):
    q = 1 - p
    if q == 0:
        return 1 if n <= N else 0
    exact = not isinstance(p, float)
    pr, qr = (as_rational(p), as_rational(q)) if exact else (p, q)
    if exact:
        return math.comb(N, n) * pr**n * qr ** (N - n) * hyp2f1_terminating(n - N, n + 1, -pr / qr)
    # float series of 2F1(1, n-N; n+1; -p/q)
    x = -p / q
    s, term = 0.0, 1.0
    for j in range(N - n + 1):
        s += term
        term *= (n - N + j) / (n + 1 + j) * x
    return math.comb(N, n) * p**n * q ** (N - n) * s


def detected_fraction(r: RateSet, spec, n: int, method: str = "hypergeometric"):
    """Probability that at least n photons are detected.

    ``method`` is ``"hypergeometric"`` (terminating 2F1 closed form), ``"sum"``
    (direct tail sum of P(k, N)) or ``"both"``, which computes the two and
    raises if they disagree.
    """
    spec = as_bundle(spec)
    spec.check_index(n, "n")
    p = r.keep_probability
    dist = binomial_distribution(spec.N, p)
    direct = sum(dist.probabilities[n:], Fraction(0) if dist.exact else 0.0)
    if method == "sum":
        return direct
    closed = _hyp_fraction(spec.N, n, p)
    if method == "both":
        ok = closed == direct if dist.exact else math.isclose(closed, direct, rel_tol=1e-12, abs_tol=1e-15)
        if not ok:
            raise ArithmeticError(f"closed form {closed} disagrees with direct sum {direct}")
    elif method != "hypergeometric":
        raise ValueError("method must be 'hypergeometric', 'sum' or 'both'")
    return closed


# single photon kernel ----------------------------------------------------------------

def single_photon_density(r: RateSet, t):
    """xi rho(t): density of detecting one given photon at time t."""
    _check_time(t)
    rho, _ = kernels.density_tail(t, r.g, r.G if r.filtered else math.inf)
    return _scalar_out(t, float(r.xi) * rho)


def single_photon_tail(r: RateSet, t):
    """xi G(t): probability that one given photon is detected after t."""
    _check_time(t)
    _, tail = kernels.density_tail(t, r.g, r.G if r.filtered else math.inf)
    return _scalar_out(t, float(r.xi) * tail)


def g_pair(r: RateSet, t):
    """(g(t), g'(t)) with g = e^{-gamma t}/gamma + e^{-Gamma t}/Gamma - 4 e^{-Gamma_+ t/2}/Gamma_+.

    At Gamma = gamma that g vanishes identically, and the pair returned is the
    normalized coinciding-rate kernel (G, -rho) with rho = gamma^3 t^2 e^{-gamma t}/4.
    Values come from the cancellation-free (rho, G) evaluation.
    """
    r.require_filter()
    _check_time(t)
    rho, tail = kernels.density_tail(t, r.g, r.G)
    if r.confluent:
        return _scalar_out(t, tail), _scalar_out(t, -rho)
    scale = (r.G - r.g) ** 2 / (r.g * r.G**2)
    return _scalar_out(t, scale * tail), _scalar_out(t, -scale * rho)


@lru_cache(maxsize=256)
def _density_exppoly(gamma: Fraction, Gamma, xi: Fraction) -> ExpPolynomial:
    if Gamma is None:
        return ExpPolynomial.exp(gamma, xi * gamma)
    if Gamma == gamma:
        return ExpPolynomial.exp(gamma, xi * gamma**3 / 4, power=2)
    c = xi * gamma * Gamma**2 / (Gamma - gamma) ** 2
    return ExpPolynomial({(0, Gamma): c, (0, gamma): c, (0, (Gamma + gamma) / 2): -2 * c})


def _exact_key(r: RateSet):
    e = r.exact()
    return e.gamma_a, (e.Gamma if e.filtered else None), e.xi


def density_exppoly(r: RateSet) -> ExpPolynomial:
    """xi rho(t) as an exact exp-polynomial (rates converted to Fractions)."""
    return _density_exppoly(*_exact_key(r))


@lru_cache(maxsize=256)
def _tail_exppoly(gamma, Gamma, xi):
    return _density_exppoly(gamma, Gamma, xi).tail()


def tail_exppoly(r: RateSet) -> ExpPolynomial:
    """xi G(t) = int_t^oo xi rho as an exact exp-polynomial."""
    return _tail_exppoly(*_exact_key(r))


# multi-photon densities ------------------------------------------------------------

def joint_pdf(r: RateSet, spec, times):
    """Density of the ordered detection times of a fully detected bundle."""
    spec = as_bundle(spec)
    times = np.asarray(times, dtype=float)
    if times.shape[-1] != spec.N:
        raise ValueError(f"expected {spec.N} times, got {times.shape[-1]}")
    _check_time(times)
    ordered = np.all(np.diff(times, axis=-1) >= 0, axis=-1)
    rho, _ = kernels.density_tail(times.ravel(), r.g, r.G if r.filtered else math.inf)
    rho = rho.reshape(times.shape) * float(r.xi)
    out = math.factorial(spec.N) * np.prod(rho, axis=-1) * ordered
    return float(out) if np.ndim(out) == 0 else out


def _rho_tail_scaled(r, t):
    rho, tail = kernels.density_tail(t, r.g, r.G if r.filtered else math.inf)
    xi = float(r.xi)
    return xi * rho, xi * tail, float(r.keep_probability)


def marginal_full(r: RateSet, spec, k: int, t):
    """Density of the k-th detection time when all N photons are detected.

    Integrates to P(N, N); divide by that for the conditional density.
    """
    spec = as_bundle(spec)
    spec.check_index(k)
    _check_time(t)
    N = spec.N
    rho, tail, g0 = _rho_tail_scaled(r, np.ravel(t))
    out = k * math.comb(N, k) * tail ** (N - k) * np.maximum(g0 - tail, 0.0) ** (k - 1) * rho
    return _scalar_out(t, out)


def marginal_full_exppoly(r: RateSet, spec, k: int) -> ExpPolynomial:
    spec = as_bundle(spec)
    spec.check_index(k)
    N = spec.N
    rho = density_exppoly(r)
    tail = tail_exppoly(r)
    g0 = tail.at_zero()
    return rho * (tail ** (N - k)) * ((g0 - tail) ** (k - 1)) * (k * math.comb(N, k))


def marginal_broken(r: RateSet, spec, n: int, t):
    """Density of the n-th detected photon, summed over every way of losing photons.

    Integrates to the probability that at least n photons are detected.
    """
    spec = as_bundle(spec)
    spec.check_index(n, "n")
    _check_time(t)
    N = spec.N
    rho, tail, p = _rho_tail_scaled(r, np.ravel(t))
    q = 1.0 - p
    out = np.zeros_like(rho)
    lost = np.maximum(p - tail, 0.0)
    for k in range(n, N + 1):
        phi = n * math.comb(k, n) * tail ** (k - n) * lost ** (n - 1) * rho
        out += math.comb(N, k) * q ** (N - k) * phi
    return _scalar_out(t, out)


def joint_first_last(r: RateSet, spec, t1, tN, method: str = "auto"):
    """Joint density of the first and last detection times of a full bundle.

    ``method="sum"`` evaluates the ten-index exponential sum, ``"direct"`` the
    product form N(N-1) rho(t1) rho(tN) (G(t1) - G(tN))^(N-2).  The sum
    cancels catastrophically at small times and near Gamma = gamma (relative
    errors of order one are common there), so ``"auto"`` always takes the
    product form and the sum is kept as an independent cross-check.
    """
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2 for a first-and-last pair")
    t1a, tNa = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(tN, dtype=float))
    _check_time(t1a)
    _check_time(tNa)
    if method == "auto":
        method = "direct"
    if method == "sum":
        r.require_filter()
        out = sums.joint_first_last_sum(N, r.g, r.G, t1a, tNa) * float(r.xi) ** N
        out = np.asarray(out).reshape(t1a.shape)
    elif method == "direct":
        rho1, tail1, _ = _rho_tail_scaled(r, t1a.ravel())
        rhoN, tailN, _ = _rho_tail_scaled(r, tNa.ravel())
        between = np.maximum(tail1 - tailN, 0.0)
        out = N * (N - 1) * rho1 * rhoN * between ** (N - 2)
        out = np.where(t1a.ravel() <= tNa.ravel(), out, 0.0).reshape(t1a.shape)
    else:
        raise ValueError("method must be 'auto', 'sum' or 'direct'")
    return float(out) if out.ndim == 0 else out


# amplitudes ---------------------------------------------------------------------------

def filter_response(r: RateSet, t):
    """Complex filtered amplitude Xi(t); gamma xi int_0^T |Xi|^2 is the efficiency."""
    t = np.asarray(t, dtype=float)
    amp = np.where(t >= 0, kernels.amplitude(np.maximum(t, 0.0), r.g, r.G if r.filtered else math.inf), 0.0)
    out = amp * np.exp(-1j * float(r.omega_a) * t)
    return complex(out) if out.ndim == 0 else out


def fock_correlator(r: RateSet, spec, primed, unprimed, strict: bool = False) -> complex:
    """<a^dag(t'_1)...a^dag(t'_m) a(t_m)...a(t_1)> for the initial Fock state |N>.

    For m > N the correlator vanishes; ``strict=True`` raises instead.
    """
    spec = as_bundle(spec)
    primed = list(primed)
    unprimed = list(unprimed)
    if len(primed) != len(unprimed):
        raise ValueError("primed and unprimed time lists must have equal length")
    m = len(primed)
    if m > spec.N:
        if strict:
            raise ValueError(f"correlator of order {m} vanishes for N = {spec.N}")
        return 0j
    g, w = r.g, float(r.omega_a)
    phase = sum(-(g / 2 - 1j * w) * tp for tp in primed) + sum(-(g / 2 + 1j * w) * tt for tt in unprimed)
    return math.perm(spec.N, m) * cmath.exp(phase)
