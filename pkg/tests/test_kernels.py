import math
import os
import subprocess
import sys

import numpy as np
import pytest

from fockse import _backend, distributions as dist, kernels, montecarlo as mc, sums
from fockse.rates import RateSet


def test_density_tail_backends_agree():
    t = np.concatenate([np.linspace(0, 5, 501), np.geomspace(5, 500, 100)])
    for G in (0.01, 0.5, 1.0, 1 + 1e-9, 2.0, 1e4, math.inf):
        a = kernels.density_tail_numba(t, 1.0, G)
        b = kernels.density_tail_numpy(t, 1.0, G)
        for x, y in zip(a, b):
            np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-300)


def test_density_tail_consistency():
    # G is the tail integral of rho, with G(0) = Gamma/Gamma_+
    from scipy import integrate

    for G in (0.3, 1.0, 4.0):
        rho = lambda s: kernels.density_tail_numpy(np.array([s]), 1.0, G)[0][0]  # noqa: E731
        tail = kernels.density_tail_numpy(np.array([0.0, 1.5]), 1.0, G)[1]
        assert tail[0] == pytest.approx(G / (G + 1), rel=1e-14)
        assert tail[1] == pytest.approx(integrate.quad(rho, 1.5, np.inf, epsabs=0, epsrel=1e-12)[0], rel=1e-10)


def test_inverse_cdf_backends_agree():
    u = np.random.default_rng(0).random(20_000)
    for G in (0.05, 1.0, 7.0, math.inf):
        np.testing.assert_allclose(kernels.inverse_cdf_numba(u, 1.0, G), kernels.inverse_cdf_numpy(u, 1.0, G), rtol=1e-10)


def _abs_table(t):
    return sums.TermTable(t.coef_exact, np.abs(t.coef), t.eg, t.eG, t.eP, t.ra, t.rb)


def test_term_sum_backends_agree():
    # the signed sums cancel, so compare relative to the sum of absolute terms
    table = sums.mean_table(5, 3)
    Gs = np.geomspace(0.01, 100, 301)
    Gs = Gs[np.abs(Gs - 1) > 1e-3]
    args = (table.eg, table.eG, table.eP, table.ra)
    a = kernels.term_sum_power_numba(table.coef, *args, 2, 1.0, Gs)
    b = kernels.term_sum_power_numpy(table.coef, *args, 2, 1.0, Gs)
    scale = kernels.term_sum_power_numpy(np.abs(table.coef), *args, 2, 1.0, Gs)
    assert np.max(np.abs(a - b) / scale) < 1e-14
    cross = sums.cross_table(3)
    cargs = (cross.eg, cross.eG, cross.eP, cross.ra, cross.rb)
    a = kernels.term_sum_cross_numba(cross.coef, *cargs, 1.0, Gs)
    b = kernels.term_sum_cross_numpy(cross.coef, *cargs, 1.0, Gs)
    scale = kernels.term_sum_cross_numpy(np.abs(cross.coef), *cargs, 1.0, Gs)
    assert np.max(np.abs(a - b) / scale) < 1e-14


def test_term_grid_backends_agree():
    cross = sums.cross_table(4)
    rng = np.random.default_rng(1)
    t1 = rng.exponential(1.0, 2000)
    tN = t1 + rng.exponential(2.0, 2000)
    cargs = (cross.eg, cross.eG, cross.eP, cross.ra, cross.rb, 1.0, 3.0, t1, tN)
    a = kernels.term_grid_exp_numba(cross.coef, *cargs)
    b = kernels.term_grid_exp_numpy(cross.coef, *cargs)
    scale = kernels.term_grid_exp_numpy(np.abs(cross.coef), *cargs)
    assert np.max(np.abs(a - b) / scale) < 1e-14


def test_float_sums_match_exact():
    table = sums.mean_table(3, 2)
    for G in (0.2, 5.0):
        exact = float(sums.evaluate_power_exact(table, 2, 1, G))
        assert sums.evaluate_power_float(table, 2, 1.0, [G])[0] == pytest.approx(exact, rel=1e-9)


def test_public_api_without_numba(monkeypatch):
    r = RateSet(1, 0.7)
    t = np.linspace(0, 10, 101)
    with_numba = dist.marginal_full(r, 3, 2, t)
    batch = mc.sample_bundles(r, 3, 1000, 5)
    monkeypatch.setattr(_backend, "USE_NUMBA", False)
    np.testing.assert_allclose(dist.marginal_full(r, 3, 2, t), with_numba, rtol=1e-13)
    plain = mc.sample_bundles(r, 3, 1000, 5)
    np.testing.assert_allclose(plain.times, batch.times, rtol=1e-10)
    assert np.array_equal(plain.detected, batch.detected)


def test_env_switch():
    code = "from fockse import _backend; print(_backend.USE_NUMBA)"
    env = dict(os.environ, FOCKSE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
    env["FOCKSE_DISABLE_NUMBA"] = ""
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == str(_backend.numba is not None)


def test_cli_output_same_without_numba():
    cmd = [sys.executable, "-m", "fockse", "moments", "--mean", "-N", "3", "-k", "2", "--gamma", "1", "--filter", "1/2", "--exact"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True,
                       env=dict(os.environ, FOCKSE_DISABLE_NUMBA="1")).stdout
    assert a == b
