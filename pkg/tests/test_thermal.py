import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from fockse import thermal
from fockse.rates import ThermalParams

F = Fraction


def test_spectrum_unfiltered():
    p = ThermalParams(0.25, 1)
    tot = integrate.quad(lambda w: thermal.spectrum_thermal(p, w), -np.inf, np.inf, epsabs=0, epsrel=1e-12)[0]
    assert tot == pytest.approx(1, abs=1e-10)
    assert thermal.spectrum_thermal(p, 0.0) == pytest.approx(2 / (np.pi * 0.75))


@pytest.mark.parametrize("theta, G", [(0.25, 0.5), (0.1, 3.0), (0.5, 0.5), (0.9, 0.01), (0.3, 100.0)])
def test_spectrum_filtered_normalized(theta, G):
    p = ThermalParams(theta, 1, G)
    tot = integrate.quad(lambda w: thermal.spectrum_thermal_filtered(p, w), -np.inf, np.inf,
                         epsabs=0, epsrel=1e-12, points=None, limit=400)[0]
    assert abs(tot - 1) < 1e-8


def test_spectrum_product_form():
    p = ThermalParams(0.2, 1, 0.7)
    a, G = 0.8, 0.7
    for w in (0.0, 0.3, 2.0):
        la = (a / 2) / (np.pi * ((a / 2) ** 2 + w * w))
        lG = (G / 2) / (np.pi * ((G / 2) ** 2 + w * w))
        assert thermal.spectrum_thermal_filtered(p, w) == pytest.approx(0.5 * np.pi * la * lG * (G + a), rel=1e-14)


def test_spectrum_narrow_filter_delta():
    # the line collapses onto the filter Lorentzian, whose width Gamma -> 0
    G = 1e-3
    p = ThermalParams(0.25, 1, G)

    def mass(half):
        return integrate.quad(lambda w: thermal.spectrum_thermal_filtered(p, w), -half, half, epsabs=0, epsrel=1e-12)[0]

    assert mass(10 * G) > 0.9
    assert mass(1e-2) > 0.9
    # a full-width-Gamma Lorentzian holds (2/pi) atan 2 of its weight inside |w| < Gamma
    assert mass(G) == pytest.approx(2 / np.pi * np.arctan(2.0), rel=2e-3)


def test_spectrum_not_lorentzian():
    assert thermal.lorentzian_fit_residual(ThermalParams(0.25, 1, 0.5)) > 0.01
    # a bare thermal line is fitted exactly
    assert thermal.lorentzian_fit_residual(ThermalParams(0.25, 1)) < 1e-6
    # frozen value of the relative L2 misfit
    assert thermal.lorentzian_fit_residual(ThermalParams(0.25, 1, 0.5)) == pytest.approx(0.0879, abs=5e-4)


def test_fourier_consistency():
    # S(w) = (1/pi) int_0^oo g1(tau) cos(w tau) dtau: real, even and nonnegative
    for theta, G in ((0.25, 0.5), (0.5, 2.0), (0.2, 0.8)):
        p = ThermalParams(theta, 1, G)
        for w in (0.0, 0.4, 1.5, 5.0):
            val = integrate.quad(lambda t: thermal.g1_thermal_filtered(p, t), 0, np.inf, weight="cos", wvar=w)[0] / np.pi \
                if w else integrate.quad(lambda t: thermal.g1_thermal_filtered(p, t), 0, np.inf)[0] / np.pi
            assert val >= 0
            assert val == pytest.approx(thermal.spectrum_thermal_filtered(p, w), rel=1e-7)
        assert thermal.g1_thermal_filtered(p, -1.3) == thermal.g1_thermal_filtered(p, 1.3)


def test_g2_zero_delay():
    for th in (0.0, 0.1, 0.25, 0.5, 0.9):
        a = 1 - th
        for G in (1e-6, 0.01, 0.5, a, a * (1 + 1e-9), a * (1 - 1e-6), a + 1e-4, a - 1e-5, 1.0, 100.0, 1e6):
            assert abs(thermal.g2_thermal_filtered(ThermalParams(th, 1, G), 0.0) - 2.0) <= 1e-12


def test_g2_printed_form():
    for th, G in ((0.25, 0.5), (0.5, 3.0), (0.1, 0.2)):
        a = 1 - th
        for t in (0.1, 1.0, 4.0):
            printed = 1 + (G * G * math.exp(-a * t) + a * a * math.exp(-G * t) - 2 * G * a * math.exp(-(G + a) * t / 2)) / (G - a) ** 2
            assert thermal.g2_thermal_filtered(ThermalParams(th, 1, G), t) == pytest.approx(printed, rel=1e-12)


def test_g2_confluent_continuous():
    a = 0.75
    t = np.linspace(0, 20, 201)
    mid = thermal.g2_thermal_filtered(ThermalParams(0.25, 1, a), t)
    np.testing.assert_allclose(mid, 1 + (np.exp(-a * t / 2) * (1 + a * t / 2)) ** 2, rtol=1e-14)
    for eps in (1e-9, -1e-9, 1e-6, -1e-6):
        np.testing.assert_allclose(thermal.g2_thermal_filtered(ThermalParams(0.25, 1, a + eps), t), mid, rtol=1e-5)


def test_g2_limits():
    t = np.linspace(0, 10, 101)
    wide = thermal.g2_thermal_filtered(ThermalParams(0.3, 1, 1e7), t)
    np.testing.assert_allclose(wide, 1 + np.exp(-0.7 * t), rtol=1e-6)
    narrow = thermal.g2_thermal_filtered(ThermalParams(0.3, 1, 1e-7), t)
    np.testing.assert_allclose(narrow, 2.0, rtol=1e-6)
    bare = thermal.g2_thermal_filtered(ThermalParams(0.3, 1), t)
    np.testing.assert_allclose(bare, 1 + np.exp(-0.7 * t), rtol=1e-14)


def test_number_distribution():
    assert thermal.thermal_number_distribution(ThermalParams(0, 1), 0) == 1
    assert thermal.thermal_number_distribution(ThermalParams(0, 1), 3) == 0
    assert thermal.thermal_number_distribution(ThermalParams(F(1, 2), 1), 2) == F(1, 8)
    p = ThermalParams(F(1, 3), 1)
    probs = [thermal.thermal_number_distribution(p, n) for n in range(200)]
    assert float(sum(probs)) == pytest.approx(1, abs=1e-30)
    assert float(sum(n * q for n, q in enumerate(probs))) == pytest.approx(0.5, abs=1e-30)
    assert p.mean_photons == F(1, 2)
    with pytest.raises(ValueError):
        thermal.thermal_number_distribution(p, -1)


def test_temperature():
    for P in (F(1, 10), F(1, 4), F(2, 3)):
        assert thermal.filtered_temperature(ThermalParams(P, 1, P)) == P
    P = 0.4
    p = ThermalParams(P, 1)
    Gs = np.geomspace(1e-3, 1e3, 200)
    th = np.array([thermal.filtered_temperature(p, G) for G in Gs])
    assert np.all(np.diff(th) < 0)
    assert np.all((th > P) == (Gs < P))
    assert thermal.filtered_temperature(p) == P


def test_intensity():
    p = ThermalParams(0.4, 1)
    full = thermal.unfiltered_intensity(p)
    assert full == pytest.approx(0.4 / 0.6)
    Gs = np.geomspace(1e-4, 1e4, 100)
    I = np.array([thermal.filtered_intensity(p, G) for G in Gs])
    assert np.all(I < full) and np.all(np.diff(I) > 0)
    # linear decay for narrow filters
    slope = 1 * 0.4 / 0.6**2
    assert thermal.filtered_intensity(p, 1e-6) / 1e-6 == pytest.approx(slope, rel=1e-5)
    assert thermal.filtered_intensity(ThermalParams(F(1, 2), 1, F(1, 2))) == F(1, 2)
    assert thermal.filtered_intensity(p) == full


@given(st.floats(0.01, 0.95), st.floats(1e-3, 1e3))
def test_temperature_and_intensity_properties(theta, G):
    p = ThermalParams(theta, 1)
    assert thermal.filtered_intensity(p, G) < thermal.unfiltered_intensity(p)
    assert thermal.filtered_temperature(p, G) > thermal.filtered_temperature(p, G * 1.01)
    assert abs(thermal.g2_thermal_filtered(ThermalParams(theta, 1, G), 0.0) - 2) <= 1e-12
