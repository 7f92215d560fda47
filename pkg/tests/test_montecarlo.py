import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from fockse import distributions as dist, moments as mom, montecarlo as mc, wtd
from fockse.rates import RateSet

F = Fraction


# inverse CDF ----------------------------------------------------------------------

def test_inverse_cdf_examples():
    ru = RateSet(1)
    assert mc.inverse_cdf_single(ru, 0.0) == 0.0
    assert mc.inverse_cdf_single(ru, 1 - math.exp(-1)) == pytest.approx(1.0, rel=1e-14)
    assert mc.inverse_cdf_single(RateSet(1, 2), 0.0) == 0.0
    with pytest.raises(ValueError):
        mc.inverse_cdf_single(ru, 1.0)


@pytest.mark.parametrize("G", [0.05, 0.5, 1.0, 1 + 1e-6, 3.0, 50.0])
def test_inverse_cdf_roundtrip(G):
    r = RateSet(1, G)
    u = np.linspace(0, 0.999999, 2001)
    t = mc.inverse_cdf_single(r, u)
    tail = dist.single_photon_tail(r, t) / float(r.keep_probability)
    np.testing.assert_allclose(1 - tail, u, rtol=1e-11, atol=1e-14)
    assert np.all(np.diff(t) > 0)


def test_inverse_cdf_confluent_mean():
    # density t^2 e^{-t}/2 after normalization, mean 3
    rng = mc.RngSpec(7).generator(0)
    t = mc.inverse_cdf_single(RateSet(1, 1), rng.random(1_000_000))
    se = math.sqrt(3 / 1_000_000)
    assert abs(t.mean() - 3) < 3 * se


# bundles --------------------------------------------------------------------------

def test_determinism():
    r = RateSet(1, 0.8)
    a = mc.sample_bundles(r, 4, 20_000, mc.RngSpec(5, 2))
    b = mc.sample_bundles(r, 4, 20_000, mc.RngSpec(5, 2))
    assert np.array_equal(a.times, b.times) and np.array_equal(a.detected, b.detected)
    c = mc.sample_bundles(r, 4, 20_000, mc.RngSpec(5, 3))
    assert not np.array_equal(a.times, c.times)
    assert mc.sample_bundle(r, 4, mc.RngSpec(5, 2), 17) == a.record(17)


def test_partition_and_thread_invariance():
    r = RateSet(1, 2)
    whole = mc.sample_bundles(r, 3, 30_000, 11)
    parts = [mc.sample_bundles(r, 3, n, 11, start=s) for s, n in ((0, 1000), (1000, 9000), (10_000, 20_000))]
    joined = mc.BundleBatch.concat(parts)
    assert np.array_equal(whole.times, joined.times) and np.array_equal(whole.detected, joined.detected)
    threaded = mc.sample_bundles(r, 3, 30_000, 11, threads=4)
    assert np.array_equal(whole.times, threaded.times)
    assert np.array_equal(whole.ids, np.arange(30_000))


def test_record_invariants():
    batch = mc.sample_bundles(RateSet(1, 1), 5, 500, 3)
    for rec in batch.records():
        assert list(rec.emitted) == sorted(rec.emitted)
        assert list(rec.detection_times) == sorted(rec.detection_times)
        assert len(rec.detection_times) == sum(rec.detected)
        assert all(t >= 0 for t in rec.emitted)
    with pytest.raises(ValueError):
        mc.TrajectoryRecord(0, (1.0,), (True,), ())


def test_unfiltered_all_detected():
    batch = mc.sample_bundles(RateSet(1), 4, 5000, 1)
    assert batch.full().all()
    batch = mc.sample_bundles(RateSet(1, xi=0.5), 4, 20_000, 1)
    assert batch.counts().mean() == pytest.approx(2.0, abs=0.05)


def test_empty_batch():
    b = mc.sample_bundles(RateSet(1, 1), 3, 0, 1)
    assert len(b) == 0 and b.times.shape == (0, 3)


@pytest.mark.parametrize("G", [0.5, 1.0, 3.0])
def test_count_distribution(G):
    r = RateSet(1, G)
    for N in range(1, 6):
        n = 40_000
        batch = mc.sample_bundles(r, N, n, mc.RngSpec(21, N))
        counts = np.bincount(batch.counts(), minlength=N + 1)
        p = np.array([float(dist.detect_probability(r, N, k)) for k in range(N + 1)])
        z = (counts - n * p) / np.sqrt(n * p * (1 - p))
        assert np.all(np.abs(z) <= 4)


def test_full_bundle_marginals_chi2():
    r = RateSet(1, 1)
    N = 5
    batch = mc.sample_bundles(r, N, 400_000, mc.RngSpec(2))
    full = batch.times[batch.full()]
    edges = np.linspace(0, 15, 61)
    pnn = float(dist.detect_probability(r, N, N))
    for k in range(1, N + 1):
        pr = mc.bin_probabilities(lambda t: dist.marginal_full(r, N, k, t), edges, pnn)
        assert mc.chi2_test(full[:, k - 1], edges, pr)[2] > 1e-3


def test_cascade_matches_sorted_sampler():
    r = RateSet(1)
    N = 4
    a = mc.sample_bundles(r, N, 100_000, 4)
    b = mc.sample_cascade(r, N, 100_000, 4)
    for k in range(N):
        assert stats.ks_2samp(a.times[:, k], b.times[:, k]).pvalue > 1e-3
        m = float(mom.unfiltered_mean(N, k + 1))
        se = math.sqrt(float(mom.unfiltered_second(N, k + 1)) - m * m) / math.sqrt(100_000)
        assert abs(b.times[:, k].mean() - m) < 4 * se
    with pytest.raises(ValueError):
        mc.sample_cascade(RateSet(1, 1), N, 10, 1)


def test_nth_detected():
    t = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
    d = np.array([[False, True, True], [True, False, False]])
    b = mc.BundleBatch(0, t, d)
    assert np.array_equal(b.nth_detected(1), [0.2, 0.4])
    assert np.array_equal(b.nth_detected(2), [0.3])
    with pytest.raises(ValueError):
        b.nth_detected(4)


# estimators -----------------------------------------------------------------------

def test_histogram_merge_exact():
    r = RateSet(1, 1)
    a = mc.sample_bundles(r, 3, 5000, 9)
    b = mc.sample_bundles(r, 3, 7000, 9, start=5000)
    merged = mc.CountHistogram.from_batch(a).merge(mc.CountHistogram.from_batch(b))
    whole = mc.CountHistogram.from_batch(mc.BundleBatch.concat([a, b]))
    assert np.array_equal(merged.counts, whole.counts)
    assert [e.value for e in merged.estimates()] == [e.value for e in mc.estimate(mc.BundleBatch.concat([a, b]), "histogram")]


def test_moment_and_pair_merge():
    rng = np.random.default_rng(0)
    x, y = rng.random(1000), rng.random(1000)
    a = mc.MomentAccumulator.from_samples(x[:300]).merge(mc.MomentAccumulator.from_samples(x[300:]))
    b = mc.MomentAccumulator.from_samples(x)
    assert a.n == b.n and a.s1 == pytest.approx(b.s1, rel=1e-15) and a.s2 == pytest.approx(b.s2, rel=1e-15)
    pa = mc.PairAccumulator.from_samples(x[:400], y[:400]).merge(mc.PairAccumulator.from_samples(x[400:], y[400:]))
    pb = mc.PairAccumulator.from_samples(x, y)
    np.testing.assert_allclose(pa.sums, pb.sums, rtol=1e-14)
    assert pa.pearson().value == pytest.approx(np.corrcoef(x, y)[0, 1], rel=1e-10)


def test_mean_time_unfiltered():
    batch = mc.sample_bundles(RateSet(1), 1, 1_000_000, 13)
    e = mc.estimate(batch, "mean_time", k=1)
    assert e.within(1.0, 3)
    assert e.n == 1_000_000


def test_pearson_estimate():
    r = RateSet(1, 1)
    batch = mc.sample_bundles(r, 2, 400_000, 17)
    assert batch.full().sum() > 95_000
    p = mc.estimate(batch, "pearson")
    assert p.within(25 / math.sqrt(2929), 3)
    q = mc.estimate(batch, "reflective")
    assert q.within(16 / math.sqrt(319), 3)
    length = mc.estimate(batch, "bundle_length")
    assert length.within(15 / 8, 3)


def test_broken_mean_estimate():
    r = RateSet(1, 2)
    batch = mc.sample_bundles(r, 4, 200_000, 19)
    e = mc.estimate(batch, "mean_time", k=2, full=False)
    assert e.within(float(mom.mean_time_broken(r, 4, 2)), 3.5)


def test_insufficient_data():
    batch = mc.sample_bundles(RateSet(1, 1e-3), 3, 10, 1)
    with pytest.raises(mc.InsufficientDataError):
        mc.estimate(batch, "pearson")
    with pytest.raises(mc.InsufficientDataError):
        mc.CountHistogram(np.zeros(3, dtype=np.int64)).estimates()
    with pytest.raises(ValueError):
        mc.estimate(batch, "nope")


def test_chi2_detects_wrong_model():
    r = RateSet(1, 1)
    batch = mc.sample_bundles(r, 1, 100_000, 23)
    edges = np.linspace(0, 15, 61)
    right = mc.bin_probabilities(lambda t: dist.marginal_full(r, 1, 1, t), edges, 0.5)
    wrong = mc.bin_probabilities(lambda t: math.exp(-t), edges)
    assert mc.chi2_test(batch.times[:, 0], edges, right)[2] > 1e-3
    assert mc.chi2_test(batch.times[:, 0], edges, wrong)[2] < 1e-10


# streams --------------------------------------------------------------------------

def test_stream_empty():
    s = mc.sample_cwse_stream(RateSet(1, 1), 2, 1.0, 0.0, 1)
    assert len(s) == 0 and s.n_triggers == 0
    with pytest.raises(ValueError):
        mc.sample_cwse_stream(RateSet(1, 1), 2, 0.0, 10.0, 1)


def test_stream_sorted_and_deterministic():
    r = RateSet(1, 2)
    s = mc.sample_cwse_stream(r, 3, 0.2, 2000.0, mc.RngSpec(3, 1))
    assert np.all(np.diff(s.times) >= 0)
    assert np.all((s.times >= 0) & (s.times <= 2000.0))
    ev = list(s.events())
    assert len(ev) == len(s)
    assert all(isinstance(e, mc.StreamEvent) for e in ev[:5])
    s2 = mc.sample_cwse_stream(r, 3, 0.2, 2000.0, mc.RngSpec(3, 1))
    assert np.array_equal(s.times, s2.times)
    assert s.n_triggers == pytest.approx(400, abs=4 * 20)


def test_stream_low_rate_wtd():
    # bundles rarely overlap: delays shorter than the trigger spacing follow w2
    r = RateSet(1, 2)
    s = mc.sample_cwse_stream(r, 2, 1e-3, 4e7, mc.RngSpec(8, 0))
    same = s.bundle_ids[1:] == s.bundle_ids[:-1]
    d = s.delays()[same]
    edges = np.linspace(0, 12, 49)
    pr = mc.bin_probabilities(lambda t: wtd.wtd_biphoton(r, t), edges)
    assert d.size > 5000
    assert mc.chi2_test(d, edges, pr)[2] > 1e-3


@pytest.mark.parametrize("G", [0.5, 1.0, 2.0])
def test_purity(G):
    r = RateSet(1, G)
    s = mc.sample_cwse_stream(r, 2, 0.5, 100_000.0, mc.RngSpec(1, 100))
    e = mc.estimate(s, "purity")
    assert e.within((G / (1 + G)) ** 2, 3)


def test_effective_rate():
    s = mc.sample_cwse_stream(RateSet(1), 1, 1e-3, 2e6, mc.RngSpec(4), effective_rate=True)
    assert s.rates.gamma_a == 0.5
    # unfiltered single photons at rate 1/2: mean delay after trigger is 2
    trig = s.trigger_times[s.bundle_ids]
    assert (s.times - trig).mean() == pytest.approx(2.0, rel=0.1)


def test_stream_wtd_estimator():
    r = RateSet(1)
    s = mc.sample_cwse_stream(r, 2, 0.02, 2e6, mc.RngSpec(6))
    avg, lam = mc.estimate(s, "wtd", fit_range=(10.0, 80.0), bin_width=0.05)
    # unfiltered pairs: within-bundle gap is exponential with mean 1
    assert avg == pytest.approx(1.0, rel=0.1)
    # between bundles the gap is set by the trigger rate
    assert lam == pytest.approx(0.02, rel=0.1)
