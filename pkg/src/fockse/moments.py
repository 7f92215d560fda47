"""Moments of detection times for fully detected N-photon bundles.

Three independent routes are available and cross-checked in the tests:

* ``"sum"``: the closed combinatorial sums of :mod:`fockse.sums`;
* ``"exact"``: exact integration of exp-polynomial marginals, valid for any
  rational rates including Gamma = gamma;
* ``"quadrature"``: adaptive quadrature of the float marginals.

Without a filter the statistics reduce to harmonic numbers, exposed through
the ``unfiltered_*`` functions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from . import distributions as dist
from . import sums
from .exact import ExpPolynomial, as_rational, harmonic
from .rates import RateSet, as_bundle

__all__ = [
    "Pipeline",
    "MomentResult",
    "moment_exact",
    "moment_quadrature",
    "mean_time_sum",
    "mean_time_exact",
    "mean_time",
    "mean_time_broken",
    "second_moment",
    "std_dev",
    "relative_deviation",
    "std_dev_coefficients",
    "cross_moment_first_last",
    "covariance_first_last",
    "pearson",
    "pearson_squared",
    "reflective",
    "reflective_squared",
    "bundle_length_stats",
    "length_departure",
    "departure_extremum",
    "unfiltered_mean",
    "unfiltered_mean_alternating",
    "unfiltered_second",
    "unfiltered_second_alternating",
    "unfiltered_std",
    "unfiltered_cross",
    "unfiltered_cross_alternating",
    "unfiltered_length_stats",
    "length_asymptotes",
    "peak_average_weighted",
]


class Pipeline(str, enum.Enum):
    COMBINATORIAL_SUM = "sum"
    EXPPOLY_EXACT = "exact"
    QUADRATURE = "quadrature"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class MomentResult:
    value: object
    pipeline: Pipeline
    parameters: dict = field(default_factory=dict, compare=False)
    variance: object = None  # exact variance behind a std_dev, when known

    def __float__(self):
        return float(self.value)

    @property
    def exact(self) -> bool:
        return isinstance(self.value, (int, Fraction))


def _check(spec, k=None):
    spec = as_bundle(spec)
    if k is not None:
        spec.check_index(k)
    return spec


def _key(r: RateSet):
    e = r.exact()
    return e.gamma_a, (e.Gamma if e.filtered else None)


def _rates_from_key(key) -> RateSet:
    g, G = key
    return RateSet(g, G)


# exact exp-polynomial route ----------------------------------------------------------

@lru_cache(maxsize=512)
def _normalized_marginal(key, N, k) -> ExpPolynomial:
    r = _rates_from_key(key)
    phi = dist.marginal_full_exppoly(r, N, k)
    return phi * (1 / dist.tail_exppoly(r).at_zero() ** N)


def moment_exact(r: RateSet, spec, k: int, j: int = 1) -> Fraction:
    """<t_k**j> of a fully detected bundle as an exact rational."""
    spec = _check(spec, k)
    if j < 0:
        raise ValueError("moment order must be nonnegative")
    return _normalized_marginal(_key(r), spec.N, k).moment(j)


def _quad(fn, lo=0.0, hi=np.inf):
    val, _ = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=1e-12, limit=500)
    return val


def moment_quadrature(r: RateSet, spec, k: int, j: int = 1) -> float:
    """<t_k**j> by adaptive quadrature of the float marginal."""
    spec = _check(spec, k)
    norm = float(r.keep_probability) ** spec.N
    scale = 1.0 / min(r.g, r.G) if r.filtered else 1.0 / r.g
    f = lambda t: t**j * dist.marginal_full(r, spec, k, t)  # noqa: E731
    # split the half line at a few decay times so quad sees the bulk
    edges = [0.0, scale, 10 * scale, 50 * scale, np.inf]
    return sum(_quad(f, a, b) for a, b in zip(edges[:-1], edges[1:])) / norm


def _params(r, N, k=None):
    d = {"N": N, "gamma_a": r.gamma_a, "Gamma": r.Gamma}
    if k is not None:
        d["k"] = k
    return d


def mean_time_exact(r: RateSet, spec, k: int) -> MomentResult:
    spec = _check(spec, k)
    return MomentResult(moment_exact(r, spec, k, 1), Pipeline.EXPPOLY_EXACT, _params(r, spec.N, k))


def mean_time_broken(r: RateSet, spec, n: int):
    """Mean n-th detection time given that at least n photons are detected.

    Law of total probability over the number k >= n of detected photons;
    exact for exact rates.
    """
    spec = _check(spec, n)
    N = spec.N
    e = r.exact() if r.is_exact() else r
    p = e.keep_probability
    q = 1 - p
    num = 0
    for k in range(n, N + 1):
        num += math.comb(N, k) * p**k * q ** (N - k) * moment_exact(r, k, n)
    return num / dist.detected_fraction(e, N, n)


def _sum_route(r, spec, k, j, exact):
    fn = sums.mean_time_sum_value if j == 1 else sums.second_moment_sum_value
    if not r.filtered:
        v = unfiltered_mean(spec.N, k, r.gamma_a) if j == 1 else unfiltered_second(spec.N, k, r.gamma_a)
        return MomentResult(v, Pipeline.HARMONIC, _params(r, spec.N, k))
    if r.confluent or (not exact and r.near_confluent):
        # the raw sum is singular here
        v = moment_exact(r, spec, k, j)
        return MomentResult(v if exact else float(v), Pipeline.EXPPOLY_EXACT, _params(r, spec.N, k))
    if exact:
        e = r.exact()
        v = fn(spec.N, k, e.gamma_a, e.Gamma, exact=True)
    else:
        v = fn(spec.N, k, r.g, r.G, exact=False)
    return MomentResult(v, Pipeline.COMBINATORIAL_SUM, _params(r, spec.N, k))


def mean_time_sum(r: RateSet, spec, k: int, exact: bool = True) -> MomentResult:
    """Mean k-th detection time from the eleven-index sum.

    At Gamma = gamma (and, for floats, inside the coinciding-rate window) the
    sum is singular and the exact exp-polynomial route answers instead;
    without a filter the harmonic closed form answers.
    """
    spec = _check(spec, k)
    return _sum_route(r, spec, k, 1, exact)


_PIPES = {
    "exact": Pipeline.EXPPOLY_EXACT,
    "sum": Pipeline.COMBINATORIAL_SUM,
    "sum-float": Pipeline.COMBINATORIAL_SUM,
    "quadrature": Pipeline.QUADRATURE,
}


def _dispatch(r, spec, k, j, method):
    if method == "exact":
        return MomentResult(moment_exact(r, spec, k, j), Pipeline.EXPPOLY_EXACT, _params(r, spec.N, k))
    if method == "sum":
        return _sum_route(r, spec, k, j, exact=True)
    if method == "sum-float":
        return _sum_route(r, spec, k, j, exact=False)
    if method == "quadrature":
        return MomentResult(moment_quadrature(r, spec, k, j), Pipeline.QUADRATURE, _params(r, spec.N, k))
    raise ValueError("method must be 'exact', 'sum', 'sum-float' or 'quadrature'")


def mean_time(r: RateSet, spec, k: int, method: str = "exact") -> MomentResult:
    spec = _check(spec, k)
    return _dispatch(r, spec, k, 1, method)


def second_moment(r: RateSet, spec, k: int, method: str = "exact") -> MomentResult:
    spec = _check(spec, k)
    return _dispatch(r, spec, k, 2, method)


def std_dev(r: RateSet, spec, k: int, method: str = "exact") -> MomentResult:
    """Standard deviation of the k-th detection time (exact variance kept)."""
    spec = _check(spec, k)
    m1 = mean_time(r, spec, k, method).value
    m2 = second_moment(r, spec, k, method).value
    var = m2 - m1 * m1
    if var < 0:
        if isinstance(var, Fraction) or var < -1e-9 * m2:
            raise ArithmeticError(f"negative variance {var} for N={spec.N}, k={k}")
        var = 0.0
    pipe = _PIPES[method]
    return MomentResult(math.sqrt(var), pipe, _params(r, spec.N, k), variance=var)


def relative_deviation(r: RateSet, spec, k: int) -> float:
    """sigma_k / <t_k>."""
    s = std_dev(r, spec, k)
    return s.value / float(mean_time(r, spec, k).value)


# first-last correlations -----------------------------------------------------------

@lru_cache(maxsize=256)
def _cross_exact(key, N) -> Fraction:
    r = _rates_from_key(key)
    rho = dist.density_exppoly(r)
    tail = dist.tail_exppoly(r)
    g0 = tail.at_zero()
    total = Fraction(0)
    # (G(t1) - G(tN))^(N-2) expanded; tN integrated from t1 to infinity first
    for j in range(N - 1):
        inner = (rho.times_t() * (-tail) ** (N - 2 - j)).tail()
        outer = rho.times_t() * tail**j * inner
        total += math.comb(N - 2, j) * outer.integral_to_inf()
    return N * (N - 1) * total / g0**N


def _cross_quadrature(r, N):
    norm = float(r.keep_probability) ** N
    spec = as_bundle(N)

    def inner(t1):
        f = lambda tN: tN * dist.joint_first_last(r, spec, t1, tN, method="direct")  # noqa: E731
        return t1 * _quad(f, t1, np.inf)

    scale = 1.0 / min(r.g, r.G) if r.filtered else 1.0 / r.g
    edges = [0.0, scale, 10 * scale, 60 * scale]
    return sum(_quad(inner, a, b) for a, b in zip(edges[:-1], edges[1:])) / norm


def cross_moment_first_last(r: RateSet, spec, method: str = "exact") -> MomentResult:
    """<t_1 t_N> of a fully detected N-photon bundle."""
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2")
    p = _params(r, N)
    if method == "exact":
        return MomentResult(_cross_exact(_key(r), N), Pipeline.EXPPOLY_EXACT, p)
    if method == "sum":
        if not r.filtered:
            return MomentResult(unfiltered_cross(N, r.gamma_a), Pipeline.HARMONIC, p)
        if r.confluent:
            return MomentResult(_cross_exact(_key(r), N), Pipeline.EXPPOLY_EXACT, p)
        e = r.exact()
        return MomentResult(sums.cross_moment_sum_value(N, e.gamma_a, e.Gamma), Pipeline.COMBINATORIAL_SUM, p)
    if method == "quadrature":
        return MomentResult(_cross_quadrature(r, N), Pipeline.QUADRATURE, p)
    raise ValueError("method must be 'exact', 'sum' or 'quadrature'")


def covariance_first_last(r: RateSet, spec):
    spec = as_bundle(spec)
    N = spec.N
    return cross_moment_first_last(r, N).value - moment_exact(r, N, 1) * moment_exact(r, N, N)


def _sqrt_ratio(num, den_sq):
    """num / sqrt(den_sq) as float, computed from the exact square when possible."""
    sq = Fraction(num) ** 2 / den_sq
    return math.copysign(math.sqrt(sq), num)


def pearson(r: RateSet, spec) -> float:
    """Pearson correlation between the first and last detection times."""
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2")
    cov = covariance_first_last(r, N)
    v1 = moment_exact(r, N, 1, 2) - moment_exact(r, N, 1) ** 2
    vN = moment_exact(r, N, N, 2) - moment_exact(r, N, N) ** 2
    return _sqrt_ratio(cov, v1 * vN)


def pearson_squared(r: RateSet, spec) -> Fraction:
    spec = as_bundle(spec)
    N = spec.N
    cov = covariance_first_last(r, N)
    v1 = moment_exact(r, N, 1, 2) - moment_exact(r, N, 1) ** 2
    vN = moment_exact(r, N, N, 2) - moment_exact(r, N, N) ** 2
    return cov * cov / (v1 * vN)


def reflective(r: RateSet, spec) -> float:
    """<t_1 t_N> / sqrt(<t_1^2> <t_N^2>)."""
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2")
    c = cross_moment_first_last(r, N).value
    return _sqrt_ratio(c, moment_exact(r, N, 1, 2) * moment_exact(r, N, N, 2))


def reflective_squared(r: RateSet, spec) -> Fraction:
    N = as_bundle(spec).N
    c = cross_moment_first_last(r, N).value
    return c * c / (moment_exact(r, N, 1, 2) * moment_exact(r, N, N, 2))


def bundle_length_stats(r: RateSet, spec, exact: bool = False):
    """Mean and standard deviation of t_N - t_1 for a fully detected bundle.

    With ``exact=True`` returns (mean, variance) as Fractions.
    """
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2")
    m1, mN = moment_exact(r, N, 1), moment_exact(r, N, N)
    v1 = moment_exact(r, N, 1, 2) - m1 * m1
    vN = moment_exact(r, N, N, 2) - mN * mN
    var = v1 + vN + 2 * (m1 * mN - cross_moment_first_last(r, N).value)
    if var < 0:
        raise ArithmeticError(f"negative bundle-length variance {var}")
    if exact:
        return mN - m1, var
    return float(mN - m1), math.sqrt(var)


# unfiltered closed forms ----------------------------------------------------------

def _gamma(gamma):
    return as_rational(gamma) if not isinstance(gamma, float) else gamma


def _check_nk(N, k):
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")


def unfiltered_mean(N: int, k: int, gamma=1):
    """(H_N - H_{N-k}) / gamma."""
    _check_nk(N, k)
    return (harmonic(N) - harmonic(N - k)) / _gamma(gamma)


def unfiltered_mean_alternating(N: int, k: int, gamma=1):
    """k C(N,k) sum_l (-1)^(k-1-l) C(k-1,l) / (N-l)^2 / gamma."""
    _check_nk(N, k)
    s = sum(Fraction((-1) ** (k - 1 - l) * math.comb(k - 1, l), (N - l) ** 2) for l in range(k))
    return k * math.comb(N, k) * s / _gamma(gamma)


def unfiltered_second(N: int, k: int, gamma=1):
    """Mean square: mean^2 + H_{N,2} - H_{N-k,2}, over gamma^2."""
    _check_nk(N, k)
    m = harmonic(N) - harmonic(N - k)
    return (m * m + harmonic(N, 2) - harmonic(N - k, 2)) / _gamma(gamma) ** 2


def unfiltered_second_alternating(N: int, k: int, gamma=1):
    _check_nk(N, k)
    s = sum(Fraction((-1) ** (k - 1 - l) * math.comb(k - 1, l), (N - l) ** 3) for l in range(k))
    return 2 * k * math.comb(N, k) * s / _gamma(gamma) ** 2


def unfiltered_std(N: int, k: int, gamma=1) -> float:
    _check_nk(N, k)
    return math.sqrt(harmonic(N, 2) - harmonic(N - k, 2)) / float(gamma)


def unfiltered_cross(N: int, gamma=1):
    """<t_1 t_N> = (H_N/N + 1/N^2) / gamma^2."""
    if N < 2:
        raise ValueError("need N >= 2")
    return (harmonic(N) / N + Fraction(1, N * N)) / _gamma(gamma) ** 2


def unfiltered_cross_alternating(N: int, gamma=1):
    if N < 2:
        raise ValueError("need N >= 2")
    s = sum(
        Fraction(math.comb(N - 2, l) * (N + 2 * l + 2) * (-1) ** (N - 2 - l), N * N * (l + 1) ** 2)
        for l in range(N - 1)
    )
    return (-1) ** N * (N - 1) * s / _gamma(gamma) ** 2


def unfiltered_length_stats(N: int, gamma=1):
    """(H_{N-1}/gamma, H_{N-1,2}/gamma^2): mean and variance of the bundle length."""
    if N < 2:
        raise ValueError("need N >= 2")
    g = _gamma(gamma)
    return harmonic(N - 1) / g, harmonic(N - 1, 2) / g**2


def length_asymptotes(N: int):
    """Coefficients c with <tau_N> ~ c/Gamma (narrow filter) and ~ c/gamma (no filter)."""
    if N < 2:
        raise ValueError("need N >= 2")
    h = harmonic(N - 1)
    return h, h


def peak_average_weighted(r: RateSet, spec, sub_bundle: bool = True) -> float:
    """Average spacing of the multiphoton peak, weighted over surviving sub-bundles.

    sum_{k=2..N} tau_k/(k-1) P(k,N) / sum_{k=2..N} P(k,N)

    With ``sub_bundle=True`` (default) tau_k is the length <t_k> - <t_1> of a
    fully detected k-photon bundle, the bundle that is actually observed when
    exactly k photons survive.  ``sub_bundle=False`` uses the first and k-th
    detections of the full N-photon bundle instead.
    """
    spec = as_bundle(spec)
    N = spec.N
    if N < 2:
        raise ValueError("need N >= 2")
    r.require_filter()
    num = Fraction(0)
    den = Fraction(0)
    for k in range(2, N + 1):
        n = k if sub_bundle else N
        tau = moment_exact(r, n, k) - moment_exact(r, n, 1)
        pk = as_rational(dist.detect_probability(r.exact(), N, k))
        num += tau / (k - 1) * pk
        den += pk
    return float(num / den)


def length_departure(r: RateSet, N: int) -> float:
    """(tau_N/H_{N-1} - tau_2)/tau_2 with tau_n = <t_n> - <t_1> of a full n-bundle."""
    if N < 2:
        raise ValueError("need N >= 2")

    def tau(n):
        return moment_exact(r, n, n) - moment_exact(r, n, 1)

    t2 = tau(2)
    return float((tau(N) / harmonic(N - 1) - t2) / t2)


def departure_extremum(N: int, lo=Fraction(1, 100), hi=100, points: int = 41, max_denominator: int = 10**6):
    """Locate the extremum of ``length_departure`` over Gamma/gamma in [lo, hi].

    A log grid brackets the largest |departure|, then a bounded scalar search
    refines it; each trial Gamma is rounded to a nearby rational so the exact
    pipeline can be used.  Returns (Gamma, departure).
    """

    def f(x):
        G = Fraction(10**x).limit_denominator(max_denominator)
        return length_departure(RateSet(1, G), N)

    xs = np.linspace(math.log10(lo), math.log10(hi), points)
    vals = np.array([f(x) for x in xs])
    sign = -1.0 if vals[np.argmax(np.abs(vals))] < 0 else 1.0
    i = int(np.argmax(sign * vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, points - 1)]
    res = optimize.minimize_scalar(lambda x: -sign * f(x), bounds=(a, b), method="bounded", options={"xatol": 1e-8})
    return float(10**res.x), f(res.x)


# coefficient tables ------------------------------------------------------------------

def _solve_nullspace(rows):
    """One nonzero vector of the right null space of a Fraction matrix, or None."""
    m = [list(r) for r in rows]
    ncol = len(m[0])
    pivots = []
    row = 0
    for col in range(ncol):
        piv = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    free = [c for c in range(ncol) if c not in pivots]
    if not free:
        return None
    f0 = free[0]
    vec = [Fraction(0)] * ncol
    vec[f0] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -m[i][f0]
    return vec


def _poly_eval(c, x):
    out = Fraction(0)
    for a in reversed(c):
        out = out * x + a
    return out


def _poly_sqrt(c):
    """Square root of a polynomial (ascending coefficients) over Q, or None."""
    while c and c[-1] == 0:
        c = c[:-1]
    deg = len(c) - 1
    if deg % 2:
        return None
    # work from the leading coefficient down
    lead = c[-1]
    num, den = lead.numerator, lead.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    h = deg // 2
    s = [Fraction(0)] * (h + 1)
    s[h] = Fraction(rn, rd)
    for i in range(h - 1, -1, -1):
        # coefficient of x^(h+i) in s^2
        acc = sum(s[a] * s[h + i - a] for a in range(i + 1, h))
        s[i] = (c[h + i] - acc) / (2 * s[h])
    sq = [Fraction(0)] * (2 * h + 1)
    for a in range(h + 1):
        for b in range(h + 1):
            sq[a + b] += s[a] * s[b]
    return s if sq == list(c) + [Fraction(0)] * (len(sq) - len(c)) else None


def _primitive(c):
    l = 1
    for x in c:
        l = l * x.denominator // math.gcd(l, x.denominator)
    ints = [int(x * l) for x in c]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return ints


@dataclass(frozen=True)
class DeviationCoefficients:
    """sigma = sqrt(sum alpha_i gamma^i Gamma^(mu-i)) / (gamma Gamma factor sum beta_i gamma^i Gamma^(mu/2-1-i))."""

    alpha: tuple
    beta: tuple
    factor: int

    @property
    def mu(self) -> int:
        return len(self.alpha) - 1

    @property
    def alpha_half(self) -> tuple:
        return self.alpha[: self.mu // 2 + 1]

    @property
    def beta_half(self) -> tuple:
        return self.beta[: max(1, len(self.beta) // 2)]

    def palindromic(self) -> bool:
        return self.alpha == self.alpha[::-1] and self.beta == self.beta[::-1]

    def evaluate(self, gamma, Gamma) -> float:
        mu = self.mu
        num = sum(a * gamma**i * Gamma ** (mu - i) for i, a in enumerate(self.alpha))
        den = sum(b * gamma**i * Gamma ** (len(self.beta) - 1 - i) for i, b in enumerate(self.beta))
        return math.sqrt(num) / (gamma * Gamma * self.factor * den)


def std_dev_coefficients(N: int, k: int, max_degree: int = 30) -> DeviationCoefficients:
    """Integer coefficient lists of sigma_k^(N) as a function of (gamma, Gamma).

    sigma^2 at gamma = 1 is a rational function of Gamma; it is rebuilt from
    exact values at rational sample points, then its denominator is split as
    factor^2 Gamma^2 beta(Gamma)^2 with beta primitive.
    """
    _check_nk(N, k)
    cache = {}

    def var(x):
        if x not in cache:
            r = RateSet(1, x)
            m1 = moment_exact(r, N, k)
            cache[x] = moment_exact(r, N, k, 2) - m1 * m1
        return cache[x]

    pts = [Fraction(i + 2, i + 3) if i % 2 else Fraction(i + 3, 2) for i in range(2 * max_degree + 12)]
    for deg in range(2, max_degree + 1, 2):
        n_unknown = 2 * (deg + 1)
        sample = pts[: n_unknown + 2]
        rows = []
        for x in sample:
            y = var(x)
            rows.append([x**i for i in range(deg + 1)] + [-y * x**i for i in range(deg + 1)])
        vec = _solve_nullspace(rows)
        if vec is None:
            continue
        P, Q = vec[: deg + 1], vec[deg + 1 :]
        checks = pts[n_unknown + 2 : n_unknown + 6]
        if any(_poly_eval(Q, x) == 0 or _poly_eval(P, x) / _poly_eval(Q, x) != var(x) for x in checks):
            continue
        if Q[0] != 0 or Q[1] != 0:
            continue
        rest = Q[2:]
        c = next(x for x in reversed(rest) if x != 0)
        beta_rat = _poly_sqrt([x / c for x in rest])
        if beta_rat is None:
            continue
        beta = _primitive(beta_rat)
        # sigma^2 = P/Q = alpha/(f^2 Gamma^2 beta^2)  =>  alpha = f^2 P Gamma^2 beta^2 / Q
        # Q = c Gamma^2 (beta_rat)^2 and beta = s beta_rat with s = beta[-1]/beta_rat[-1]
        s = Fraction(beta[-1]) / beta_rat[-1]
        ratio = s * s / c
        base = [p * ratio for p in P]
        f = 1
        while any((x * f * f).denominator != 1 for x in base):
            f += 1
        alpha = [int(x * f * f) for x in base]
        while alpha and alpha[-1] == 0:
            alpha.pop()
        # ascending powers of Gamma at gamma = 1 correspond to descending gamma
        return DeviationCoefficients(tuple(reversed(alpha)), tuple(reversed(beta)), f)
    raise ArithmeticError(f"no rational form of degree <= {max_degree} found")
