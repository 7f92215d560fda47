"""The acceptance checks, shared by the test suite and ``fockse verify``.

Each check returns a :class:`CheckResult`; ``run`` executes a selection and
returns the results in order.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import closed_forms, distributions as dist, moments as mom, montecarlo as mc, sums, thermal, wtd
from .exact import harmonic
from .rates import UNFILTERED, RateSet, ThermalParams

__all__ = ["CheckResult", "CHECKS", "run", "MC_SEED", "SPOT_VALUE"]

SPOT_VALUE = Fraction(554121805078044107, 325472664207527424)
MC_SEED = 1
_GAMMAS = (Fraction(1, 5), Fraction(1, 2), Fraction(2), Fraction(5))


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title} ({self.seconds:.2f} s)"

    def as_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _quad(fn, scale=1.0):
    edges = [0.0, scale, 10 * scale, 60 * scale, np.inf]
    return sum(
        integrate.quad(fn, a, b, epsabs=0.0, epsrel=1e-13, limit=500)[0] for a, b in zip(edges[:-1], edges[1:])
    )


# 1, 2 ------------------------------------------------------------------------------

def check_spot_value() -> CheckResult:
    mom._normalized_marginal.cache_clear()
    dist._density_exppoly.cache_clear()
    t0 = time.perf_counter()
    v = mom.mean_time_exact(RateSet(1, 1), 7, 2).value
    dt = time.perf_counter() - t0
    ok = v == SPOT_VALUE and abs(float(v) - 1.70251) <= 1e-5 and dt < 5.0
    return CheckResult(1, "exact spot value <t_2> for N=7 at Gamma=gamma", ok, {"value": v, "float": float(v), "runtime_s": dt})


def check_spot_std() -> CheckResult:
    s = mom.std_dev(RateSet(1, 1), 7, 2).value
    return CheckResult(2, "standard deviation sigma_2 for N=7 at Gamma=gamma", abs(s - 0.588973) <= 1e-6, {"sigma": s})


# 3 --------------------------------------------------------------------------------

def check_unfiltered_table() -> CheckResult:
    bad = []
    count = 0
    for N in range(1, 11):
        for k in range(1, N + 1):
            count += 1
            h = harmonic(N) - harmonic(N - k)
            if not (mom.unfiltered_mean(N, k) == h == mom.unfiltered_mean_alternating(N, k)):
                bad.append((N, k))
    return CheckResult(3, "unfiltered mean table, harmonic and alternating forms", not bad and count == 55, {"entries": count, "mismatches": bad})


# 4 --------------------------------------------------------------------------------

def check_dual_pipeline() -> CheckResult:
    bad = []
    n = 0
    for G in _GAMMAS:
        r = RateSet(1, G)
        for N in range(1, 6):
            for k in range(1, N + 1):
                for j, fn in ((1, sums.mean_time_sum_value), (2, sums.second_moment_sum_value)):
                    n += 1
                    if fn(N, k, 1, G) != mom.moment_exact(r, N, k, j):
                        bad.append((str(G), N, k, j))
        forms = closed_forms.mean_forms(Fraction(1), G)
        for (N, k), v in forms.items():
            n += 1
            if mom.moment_exact(r, N, k) != v:
                bad.append((str(G), N, k, "form"))
    return CheckResult(4, "sum and exp-polynomial pipelines agree; small-N forms", not bad, {"comparisons": n, "mismatches": bad})


# 5 --------------------------------------------------------------------------------

def check_normalizations() -> CheckResult:
    worst = 0.0
    for G in (Fraction(1, 5), Fraction(1), Fraction(5)):
        r = RateSet(1, G)
        scale = 1.0 / min(1.0, float(G))
        for N in range(1, 6):
            full = float(dist.detect_probability(r, N, N))
            frac = [float(dist.detected_fraction(r, N, n)) for n in range(1, N + 1)]
            for k in range(1, N + 1):
                I1 = _quad(lambda t: dist.marginal_full(r, N, k, t), scale)
                I2 = _quad(lambda t: dist.marginal_broken(r, N, k, t), scale)
                worst = max(worst, abs(I1 - full), abs(I2 - frac[k - 1]))
    n25 = dist.detected_fraction(RateSet(1, 1), 5, 2, method="both")
    ok = worst <= 1e-8 and n25 == Fraction(26, 32)
    return CheckResult(5, "marginal normalizations; N(2,5) = 26/32", ok, {"max_abs_error": worst, "N(2,5)": n25})


# 6 --------------------------------------------------------------------------------

def check_biphoton_wtd() -> CheckResult:
    d = {}
    norm_err = 0.0
    for G in (0.1, 1.0 + 1e-6, 1.0, 10.0):
        r = RateSet(1, G)
        norm_err = max(norm_err, abs(_quad(lambda t: wtd.wtd_biphoton(r, t), 1 / min(1, G)) - 1.0))
    d["norm_error"] = norm_err
    mean_err = 0.0
    for G in (0.1, 2.0, 10.0):
        r = RateSet(1, G)
        m = _quad(lambda t: t * wtd.wtd_biphoton(r, t), 1 / min(1, G))
        mean_err = max(mean_err, abs(m - wtd.mean_wtd_biphoton(r)) / wtd.mean_wtd_biphoton(r))
    d["mean_rel_error"] = mean_err
    r = RateSet(1, 1e4)
    l1 = integrate.quad(lambda t: abs(wtd.wtd_biphoton(r, t) - math.exp(-t)), 0, 1e-2, limit=200)[0]
    l1 += integrate.quad(lambda t: abs(wtd.wtd_biphoton(r, t) - math.exp(-t)), 1e-2, np.inf, limit=200)[0]
    tau = np.linspace(0, 20, 20001)
    d["large_filter_L1"] = l1
    d["large_filter_sup"] = float(np.max(np.abs(wtd.wtd_biphoton(r, tau) - np.exp(-tau))))
    int_err = 0.0
    for G in (0.5, 3.0):
        r = RateSet(1, G)
        for t in (0.0, 0.3, 1.0, 4.0):
            int_err = max(int_err, abs(wtd.wtd_biphoton(r, t) - wtd.wtd_biphoton_integral(r, t)))
    d["defining_integral_error"] = int_err
    ok = norm_err <= 1e-10 and mean_err <= 1e-8 and l1 <= 1e-4 and int_err <= 1e-8
    return CheckResult(6, "biphoton waiting-time distribution", ok, d)


# 7 --------------------------------------------------------------------------------

def check_asymptotes() -> CheckResult:
    worst = 0.0
    rows = {}
    for N in range(2, 6):
        h = float(harmonic(N - 1))
        for G, factor in ((Fraction(1000), 1), (Fraction(1, 1000), Fraction(1, 1000))):
            r = RateSet(1, G)
            tau = mom.moment_exact(r, N, N) - mom.moment_exact(r, N, 1)
            scaled = float(tau * factor)
            rel = abs(scaled / h - 1)
            rows[f"N={N},Gamma={G}"] = scaled
            worst = max(worst, rel)
    return CheckResult(7, "bundle length quantized as H_{N-1}/gamma and H_{N-1}/Gamma", worst <= 0.01, {"max_rel_dev": worst, "scaled": rows})


# 8 --------------------------------------------------------------------------------

def _log_grid(points=21, decades=2):
    out = []
    for x in np.linspace(-decades, decades, points):
        out.append(Fraction(1) if abs(x) < 1e-12 else Fraction(10 ** float(x)).limit_denominator(10**4))
    return out


def check_correlations() -> CheckResult:
    r1 = RateSet(1, 1)
    p2 = mom.pearson_squared(r1, 2)
    q2 = mom.reflective_squared(r1, 2)
    d = {"pearson^2": p2, "reflective^2": q2}
    ok = p2 == Fraction(625, 2929) and q2 == Fraction(256, 319)
    lim = []
    for G in (Fraction(1, 10**4), Fraction(10**4)):
        r = RateSet(1, G)
        lim.append(abs(mom.pearson(r, 2) - 1 / math.sqrt(5)))
        lim.append(abs(mom.reflective(r, 2) - 2 / math.sqrt(7)))
    d["limit_errors"] = lim
    ok = ok and max(lim) <= 1e-3
    grid = _log_grid()
    pv = [mom.pearson(RateSet(1, G), 2) for G in grid]
    rv = [mom.reflective(RateSet(1, G), 2) for G in grid]
    mid = len(grid) // 2
    d["argmax"] = (int(np.argmax(pv)), int(np.argmax(rv)), mid)
    ok = ok and int(np.argmax(pv)) == mid and int(np.argmax(rv)) == mid
    return CheckResult(8, "first-last correlations for N=2", ok, d)


# 9 --------------------------------------------------------------------------------

DEPARTURE_TARGET = -0.0112
DEPARTURE_TOL = 0.0005


def check_bundle_length() -> CheckResult:
    expected_std = {2: 1.0, 3: math.sqrt(5) / 2, 4: 7 / 6, 5: math.sqrt(205) / 12}
    ok_unf = True
    for N in range(2, 6):
        m, v = mom.unfiltered_length_stats(N)
        me, ve = mom.bundle_length_stats(RateSet(1, UNFILTERED), N, exact=True)
        ok_unf &= m == harmonic(N - 1) == me and v == harmonic(N - 1, 2) == ve
        ok_unf &= math.isclose(math.sqrt(v), expected_std[N], rel_tol=1e-15)
    G, dep = mom.departure_extremum(6)
    ok_dep = abs(G - 1) < 1e-3 and abs(dep - DEPARTURE_TARGET) <= DEPARTURE_TOL
    d = {"unfiltered_exact": ok_unf, "extremum_Gamma": G, "extremum_departure": dep, "target": DEPARTURE_TARGET}
    return CheckResult(9, "bundle length statistics and N=6 departure scan", bool(ok_unf and ok_dep), d)


# 10 --------------------------------------------------------------------------------

def check_monte_carlo(seed: int = MC_SEED, n_bundles: int = 400_000) -> CheckResult:
    r = RateSet(1, 1)
    N = 5
    t0 = time.perf_counter()
    batch = mc.sample_bundles(r, N, n_bundles, seed)
    runtime = time.perf_counter() - t0
    counts = np.bincount(batch.counts(), minlength=N + 1)
    probs = np.array([float(dist.detect_probability(r, N, k)) for k in range(N + 1)])
    expect = n_bundles * probs
    z = (counts - expect) / np.sqrt(n_bundles * probs * (1 - probs))
    edges = np.linspace(0.0, 15.0, 61)
    pvals = {}
    for n in range(1, N + 1):
        norm = float(dist.detected_fraction(r, N, n))
        pr = mc.bin_probabilities(lambda t: dist.marginal_broken(r, N, n, t), edges, norm)
        pvals[f"broken n={n}"] = mc.chi2_test(batch.nth_detected(n), edges, pr)[2]
    full = batch.times[batch.full()]
    pnn = float(dist.detect_probability(r, N, N))
    for k in range(1, N + 1):
        pr = mc.bin_probabilities(lambda t: dist.marginal_full(r, N, k, t), edges, pnn)
        pvals[f"full k={k}"] = mc.chi2_test(full[:, k - 1], edges, pr)[2]
    purity = {}
    ok_pur = True
    for i, G in enumerate((0.5, 1.0, 2.0)):
        rG = RateSet(1, G)
        s = mc.sample_cwse_stream(rG, 2, 0.5, 100_000.0, mc.RngSpec(seed, 100 + i))
        est = mc.estimate(s, "purity")
        target = (G / (1 + G)) ** 2
        purity[str(G)] = (est.value, est.stderr, target)
        ok_pur &= est.within(target, 3.0)
    ok = runtime < 60 and np.all(np.abs(z) <= 4) and min(pvals.values()) > 1e-3 and ok_pur
    d = {"runtime_s": runtime, "counts": counts.tolist(), "z": z.tolist(), "chi2_p": pvals, "purity": purity, "seed": seed}
    return CheckResult(10, "Monte Carlo at 400k bundles", bool(ok), d)


# 11 --------------------------------------------------------------------------------

def check_thermal() -> CheckResult:
    d = {}
    g2_err = 0.0
    for th in (0.1, 0.25, 0.5, 0.9):
        a = 1 - th
        for G in (0.01, 0.5, a, a * (1 + 1e-9), a * (1 - 1e-6), a + 1e-4, 1.0, 100.0):
            g2_err = max(g2_err, abs(thermal.g2_thermal_filtered(ThermalParams(th, 1, G), 0.0) - 2.0))
    d["g2_zero_error"] = g2_err
    norm_err = 0.0
    for th, G in ((0.25, 0.5), (0.1, 3.0), (0.5, 0.5)):
        p = ThermalParams(th, 1, G)
        tot = integrate.quad(lambda w: thermal.spectrum_thermal_filtered(p, w), -np.inf, np.inf, epsabs=0, epsrel=1e-12)[0]
        norm_err = max(norm_err, abs(tot - 1))
    d["spectrum_norm_error"] = norm_err
    resid = thermal.lorentzian_fit_residual(ThermalParams(0.25, 1, 0.5))
    d["lorentzian_residual"] = resid
    cross = thermal.filtered_temperature(ThermalParams(Fraction(1, 4), 1, Fraction(1, 4)))
    d["temperature_at_Gamma_P"] = cross
    lap = 0.0
    for th in (0.1, 0.25, 0.5):
        p = ThermalParams(th, 1)
        for s in (1.0, 2.0):
            num = _quad(lambda t: math.exp(-s * t) * wtd.wtd_thermal(p, t))
            lap = max(lap, abs(num - wtd.wtd_thermal_laplace(p, s)))
    d["laplace_error"] = lap
    ok = g2_err <= 1e-12 and norm_err <= 1e-8 and resid > 0.01 and cross == Fraction(1, 4) and lap <= 1e-8
    return CheckResult(11, "filtered thermal light", ok, d)


# 12 --------------------------------------------------------------------------------

def check_properties() -> CheckResult:
    d = {}
    ok = True
    rates = [RateSet(1, G) for G in (Fraction(1, 5), Fraction(1), Fraction(3))] + [RateSet(1, UNFILTERED)]
    for r in rates:
        for N in range(1, 6):
            means = [mom.moment_exact(r, N, k) for k in range(1, N + 1)]
            var = [mom.moment_exact(r, N, k, 2) - m * m for k, m in zip(range(1, N + 1), means)]
            ok &= all(v >= 0 for v in var)
            ok &= all(a < b for a, b in zip(means, means[1:]))
            if N >= 2:
                cov = mom.covariance_first_last(r, N)
                ok &= cov * cov <= var[0] * var[-1]
    d["moments_ok"] = bool(ok)
    grid = _log_grid(17)
    mid = len(grid) // 2
    rd_ok = True
    for N, k in ((1, 1), (2, 1), (2, 2), (3, 2), (4, 4)):
        rd = [mom.relative_deviation(RateSet(1, G), N, k) for G in grid]
        rd_ok &= int(np.argmin(rd)) == mid
    d["relative_deviation_min_at_gamma"] = bool(rd_ok)
    mandel = 0.0
    for N in range(1, 6):
        for T in (0.1, 1.0, 10.0):
            for G in (UNFILTERED, 2.0):
                r = RateSet(1, G)
                binom = dist.counting_probability(r, N, T)
                for n in range(N + 1):
                    mandel = max(mandel, abs(float(binom[n]) - dist.counting_via_mandel_series(r, N, T, n)))
    d["mandel_error"] = mandel
    ok = ok and rd_ok and mandel <= 1e-10
    return CheckResult(12, "invariant properties", bool(ok), d)


CHECKS = {
    1: check_spot_value,
    2: check_spot_std,
    3: check_unfiltered_table,
    4: check_dual_pipeline,
    5: check_normalizations,
    6: check_biphoton_wtd,
    7: check_asymptotes,
    8: check_correlations,
    9: check_bundle_length,
    10: check_monte_carlo,
    11: check_thermal,
    12: check_properties,
}


def run(selection=None, seed: int | None = None):
    out = []
    for n in selection or sorted(CHECKS):
        t0 = time.perf_counter()
        fn = CHECKS[n]
        res = fn(seed) if (n == 10 and seed is not None) else fn()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
