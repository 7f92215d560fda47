import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from fockse import moments as mom, wtd
from fockse.rates import RateSet, ThermalParams

F = Fraction


def quad(fn, scale=1.0):
    edges = [0.0, scale, 10 * scale, 60 * scale, math.inf]
    return sum(integrate.quad(fn, a, b, epsabs=0, epsrel=1e-13, limit=500)[0] for a, b in zip(edges[:-1], edges[1:]))


# biphoton ---------------------------------------------------------------------

@pytest.mark.parametrize("G", [0.1, 1.0 + 1e-6, 1.0, 1.0 - 3e-5, 10.0])
def test_biphoton_normalized(G):
    r = RateSet(1, G)
    assert abs(quad(lambda t: wtd.wtd_biphoton(r, t), 1 / min(1, G)) - 1) < 1e-10


def test_biphoton_nonnegative():
    tau = np.linspace(0, 50, 5001)
    for G in np.geomspace(1e-2, 1e2, 25):
        assert np.all(wtd.wtd_biphoton(RateSet(1, G), tau) >= 0)


def test_biphoton_at_zero():
    # the three exponentials do not cancel at zero delay: w2(0) = 3 G g (G+g)/((3G+g)(G+3g))
    for G in (0.2, 1.0, 5.0, 1e4):
        expected = 3 * G * (G + 1) / ((3 * G + 1) * (G + 3))
        assert wtd.wtd_biphoton(RateSet(1, G), 0.0) == pytest.approx(expected, rel=1e-10)
        assert wtd.wtd_biphoton_integral(RateSet(1, G), 0.0) == pytest.approx(expected, rel=1e-8)


def test_biphoton_large_filter():
    r = RateSet(1, 1e4)
    l1 = integrate.quad(lambda t: abs(wtd.wtd_biphoton(r, t) - math.exp(-t)), 0, 1e-2, limit=200)[0]
    l1 += integrate.quad(lambda t: abs(wtd.wtd_biphoton(r, t) - math.exp(-t)), 1e-2, np.inf, limit=200)[0]
    assert l1 < 1e-4
    tau = np.linspace(0, 20, 20001)
    sup = np.max(np.abs(wtd.wtd_biphoton(r, tau) - np.exp(-tau)))
    # the pointwise gap is largest at zero delay, 7 gamma/(3 Gamma) to leading order
    assert sup == pytest.approx(7 / 3e4, rel=1e-2)
    ru = RateSet(1)
    assert wtd.wtd_biphoton(ru, 0.7) == pytest.approx(math.exp(-0.7))


@pytest.mark.parametrize("G", [0.5, 1.0, 3.0])
def test_biphoton_defining_integral(G):
    r = RateSet(1, G)
    for t in (0.0, 0.3, 1.0, 4.0, 9.0):
        assert abs(wtd.wtd_biphoton(r, t) - wtd.wtd_biphoton_integral(r, t)) < 1e-8


def test_biphoton_confluent_continuity():
    tau = np.linspace(0, 10, 301)
    mid = wtd.wtd_biphoton(RateSet(1, 1), tau)
    np.testing.assert_allclose(mid, np.exp(-tau) * (tau**2 + 3 * tau + 3) / 8, rtol=1e-14)
    for eps in (9e-5, -9e-5, 2e-4, -2e-4):
        np.testing.assert_allclose(wtd.wtd_biphoton(RateSet(1, 1 + eps), tau), mid, rtol=1e-3, atol=1e-14)



# 40-digit evaluations of the three-exponential form on both sides of the series window
WINDOW_REFERENCE = {
    0.99e-4: (0.3750185618109013, 0.32190589154409987, 0.036212004554314712, 1.1918809563530999e-7),
    1.01e-4: (0.37501893678277841, 0.32190612143809649, 0.036211914449629444, 1.1918605289128311e-7),
    -0.99e-4: (0.37498143681083307, 0.32188312900359652, 0.036220926438419149, 1.1939054295912171e-7),
    -1.01e-4: (0.37498106178270596, 0.32188289904828666, 0.036221016573818225, 1.1939259006177251e-7),
}


@pytest.mark.parametrize("d", sorted(WINDOW_REFERENCE))
def test_biphoton_window_edge(d):
    got = wtd.wtd_biphoton(RateSet(1, 1 + d), np.array([0.0, 1.0, 5.0, 20.0]))
    np.testing.assert_allclose(got, WINDOW_REFERENCE[d], rtol=1e-7)


def test_biphoton_rejects_negative():
    with pytest.raises(ValueError):
        wtd.wtd_biphoton(RateSet(1, 2), -1.0)


def test_mean_biphoton():
    assert wtd.mean_wtd_biphoton(RateSet(1, 1)) == F(15, 8)
    for G in (F(1, 4), F(2), F(9)):
        r = RateSet(1, G)
        assert wtd.mean_wtd_biphoton(r) == mom.moment_exact(r, 2, 2) - mom.moment_exact(r, 2, 1)
    for G in (0.1, 2.0, 10.0):
        r = RateSet(1, G)
        m = quad(lambda t: t * wtd.wtd_biphoton(r, t), 1 / min(1, G))
        assert abs(m - wtd.mean_wtd_biphoton(r)) < 1e-8 * wtd.mean_wtd_biphoton(r)
    assert wtd.mean_wtd_biphoton(RateSet(1, 1e6)) == pytest.approx(1, rel=1e-5)
    assert wtd.mean_wtd_biphoton(RateSet(1, 1e-6)) * 1e-6 == pytest.approx(1, rel=1e-5)
    assert wtd.mean_wtd_biphoton(RateSet(1)) == 1


# thermal ----------------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.1, 0.25, 0.5, 0.9])
def test_thermal_normalized(theta):
    p = ThermalParams(theta, 1)
    assert abs(quad(lambda t: wtd.wtd_thermal(p, t)) - 1) < 1e-10
    tau = np.linspace(0, 40, 4001)
    assert np.all(wtd.wtd_thermal(p, tau) >= 0)


def test_thermal_closed_form():
    # cosh/sinh form written out directly
    for theta in (0.1, 0.25, 0.5):
        P, g = theta, 1.0
        Q = math.sqrt(P**4 - 4 * P**3 * g + 10 * P**2 * g**2 - 4 * P * g**3 + g**4)
        a = g - P
        for t in (0.0, 0.5, 2.0, 7.0):
            printed = (2 * P * g / (Q * a)) * math.exp(-(g * g + P * P) * t / (2 * a)) * (
                Q * math.cosh(Q * t / (2 * a)) - 2 * P * g * math.sinh(Q * t / (2 * a)))
            assert wtd.wtd_thermal(ThermalParams(P, g), t) == pytest.approx(printed, rel=1e-12)


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.5])
def test_thermal_laplace(theta):
    p = ThermalParams(theta, 1)
    for s in (1.0, 2.0):
        num = quad(lambda t: math.exp(-s * t) * wtd.wtd_thermal(p, t))
        n = theta / (1 - theta)
        g2 = 1 / s + 1 / (s + 1 - theta)
        assert abs(num - 1 / (1 + 1 / (n * g2))) < 1e-8
        assert abs(num - wtd.wtd_thermal_laplace(p, s)) < 1e-8


def test_thermal_shape():
    p = ThermalParams(0.25, 1)
    tau = np.linspace(0, 30, 3001)
    w = wtd.wtd_thermal(p, tau)
    assert np.all(np.diff(w) < 0)
    # excess over the long-time exponential at short delays (multiphoton peak)
    slow, _, ws, _ = wtd.thermal_rates(p)
    assert w[0] > ws
    for theta in (0.1, 0.5):
        pp = ThermalParams(theta, 1)
        assert wtd.wtd_thermal(pp, 0.0) > wtd.thermal_rates(pp)[2]


def test_thermal_rejects():
    with pytest.raises(ValueError):
        wtd.wtd_thermal(ThermalParams(0, 1), 1.0)
    with pytest.raises(ValueError):
        wtd.wtd_thermal(ThermalParams(0.2, 1, 2.0), 1.0)
    with pytest.raises(ValueError):
        ThermalParams(1.0, 1)


def test_thermal_peak_average():
    p = ThermalParams(F(1, 2), 1)
    assert p.Q_squared == F(17, 16)
    assert wtd.thermal_peak_average(p) == pytest.approx(0.5 / (0.25 + 1 + math.sqrt(17) / 4), rel=1e-15)
    assert wtd.thermal_peak_average(ThermalParams(1 - 1e-9, 1)) < 1e-8
    # the printed expression gives 1/2 at vanishing pump
    assert wtd.thermal_peak_average(ThermalParams(1e-12, 1)) == pytest.approx(0.5, rel=1e-10)
    thetas = np.linspace(0.01, 0.99, 99)
    vals = [wtd.thermal_peak_average(ThermalParams(t, 1)) for t in thetas]
    assert np.all(np.abs(np.diff(vals)) < 0.05)


def test_thermal_peak_average_narrow():
    p = ThermalParams(0.3, 1, 0.01)
    v = wtd.thermal_peak_average_narrow(p)
    assert v * 0.01 / 0.7 == pytest.approx(wtd.thermal_peak_average(p), rel=1e-14)
    assert wtd.thermal_peak_average_narrow(ThermalParams(0.3, 1), 0.01) == pytest.approx(v)
    with pytest.raises(ValueError):
        wtd.thermal_peak_average_narrow(ThermalParams(0.3, 1))


# peak estimator ---------------------------------------------------------------

def test_peak_average_from_density():
    tau = np.linspace(0, 30, 30001)
    lam = 0.05
    bg = lam * np.exp(-lam * tau)
    bump = 0.5 * np.exp(-2 * tau) * 2
    avg, fit = wtd.peak_average_from_density(tau, bg + bump, fit_range=(10, 30))
    assert fit == pytest.approx(lam, rel=1e-6)
    assert avg == pytest.approx(0.5, rel=1e-3)
    with pytest.raises(ValueError):
        wtd.peak_average_from_density(tau, np.zeros_like(tau))


def test_peak_average_from_samples():
    rng = np.random.default_rng(3)
    delays = np.concatenate([rng.exponential(0.5, 200_000), rng.exponential(20.0, 200_000)])
    avg, lam = wtd.peak_average_from_samples(delays, bin_width=0.02, fit_range=(5.0, 40.0))
    assert lam == pytest.approx(1 / 20, rel=0.05)
    assert avg == pytest.approx(0.5, rel=0.05)
    with pytest.raises(ValueError):
        wtd.peak_average_from_samples([])
