"""Monte Carlo sampling of filtered Fock-state emission and estimators on the samples.

Every photon of a bundle gets an independent candidate detection time drawn
from the normalized single-photon density and survives the filter with
probability ``xi Gamma / Gamma_+``; sorting the survivors gives the detection
record.  The joint density factorizes, so this is exact.

Random numbers come in blocks of ``BLOCK`` bundle ids.  Block ``j`` of stream
``stream_id`` uses ``Philox(SeedSequence(seed, spawn_key=(stream_id, j)))``,
so bundle ``i`` always receives the same numbers regardless of how a run is
split across calls or workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from . import kernels
from .rates import RateSet, as_bundle

__all__ = [
    "BLOCK",
    "RngSpec",
    "TrajectoryRecord",
    "BundleBatch",
    "StreamEvent",
    "Stream",
    "Estimate",
    "InsufficientDataError",
    "inverse_cdf_single",
    "sample_bundle",
    "sample_bundles",
    "sample_cascade",
    "sample_cwse_stream",
    "CountHistogram",
    "MomentAccumulator",
    "PairAccumulator",
    "estimate",
    "bin_probabilities",
    "chi2_test",
]

BLOCK = 8192
_TRIGGER_BLOCK = 1 << 32  # block index reserved for CWSE trigger times


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative")

    def generator(self, block: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, block))
        return np.random.Generator(np.random.Philox(ss))


def _rng(rng) -> RngSpec:
    if isinstance(rng, RngSpec):
        return rng
    return RngSpec(int(rng))


# sampling ------------------------------------------------------------------------

def inverse_cdf_single(r: RateSet, u):
    """Quantile of the normalized single-photon detection density.

    Unfiltered this is -log(1-u)/gamma; filtered it is the root of
    G(t) = (1-u) G(0), found by bracketing and Newton polish to 1e-12.
    """
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u >= 1)):
        raise ValueError("u must lie in [0, 1)")
    G = r.G if r.filtered else math.inf
    out = kernels.inverse_cdf(u.ravel(), r.g, G).reshape(u.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TrajectoryRecord:
    bundle_id: int
    emitted: tuple
    detected: tuple
    detection_times: tuple

    def __post_init__(self):
        if len(self.detection_times) != sum(self.detected):
            raise ValueError("detection_times must match the detected flags")


@dataclass
class BundleBatch:
    """Bundles ``start .. start+n-1`` as arrays.

    ``times`` holds each photon's candidate detection time, sorted along the
    row; ``detected`` flags the photons that pass the filter and detector.
    """

    start: int
    times: np.ndarray
    detected: np.ndarray

    def __len__(self):
        return self.times.shape[0]

    @property
    def N(self) -> int:
        return self.times.shape[1]

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self), dtype=np.int64)

    def counts(self) -> np.ndarray:
        return self.detected.sum(axis=1)

    def full(self) -> np.ndarray:
        """Rows where the whole bundle was detected."""
        return self.detected.all(axis=1)

    def nth_detected(self, n: int) -> np.ndarray:
        """n-th detected time (1-based) of every bundle with at least n detections."""
        if not 1 <= n <= self.N:
            raise ValueError("need 1 <= n <= N")
        pos = np.cumsum(self.detected, axis=1)
        hit = self.detected & (pos == n)
        rows = hit.any(axis=1)
        return self.times[rows, hit[rows].argmax(axis=1)]

    def record(self, i: int) -> TrajectoryRecord:
        t = self.times[i]
        d = self.detected[i]
        return TrajectoryRecord(
            self.start + i, tuple(float(x) for x in t), tuple(bool(x) for x in d), tuple(float(x) for x in t[d])
        )

    def records(self):
        for i in range(len(self)):
            yield self.record(i)

    @staticmethod
    def concat(parts) -> "BundleBatch":
        parts = list(parts)
        return BundleBatch(parts[0].start, np.concatenate([p.times for p in parts]), np.concatenate([p.detected for p in parts]))


def _block(r: RateSet, N: int, rng: RngSpec, j: int):
    gen = rng.generator(j)
    u_times = gen.random((BLOCK, N))
    u_keep = gen.random((BLOCK, N))
    G = r.G if r.filtered else math.inf
    t = kernels.inverse_cdf(u_times.ravel(), r.g, G).reshape(BLOCK, N)
    keep = u_keep < float(r.keep_probability)
    # sort each row, carrying the flags along with their photons
    order = np.argsort(t, axis=1, kind="stable")
    return np.take_along_axis(t, order, 1), np.take_along_axis(keep, order, 1)


def sample_bundles(r: RateSet, spec, n_bundles: int, rng, start: int = 0, threads: int = 1) -> BundleBatch:
    """Bundles ``start .. start + n_bundles - 1`` of the stream ``rng``."""
    spec = as_bundle(spec)
    rng = _rng(rng)
    if n_bundles < 0 or start < 0:
        raise ValueError("n_bundles and start must be nonnegative")
    N = spec.N
    if n_bundles == 0:
        return BundleBatch(start, np.empty((0, N)), np.empty((0, N), dtype=bool))
    stop = start + n_bundles
    blocks = range(start // BLOCK, (stop - 1) // BLOCK + 1)

    def run(j):
        t, d = _block(r, N, rng, j)
        lo = max(start - j * BLOCK, 0)
        hi = min(stop - j * BLOCK, BLOCK)
        return t[lo:hi], d[lo:hi]

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(j) for j in blocks]
    return BundleBatch(start, np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def sample_bundle(r: RateSet, spec, rng, bundle_id: int = 0) -> TrajectoryRecord:
    return sample_bundles(r, spec, 1, rng, start=bundle_id).record(0)


def sample_cascade(r: RateSet, spec, n_bundles: int, rng) -> BundleBatch:
    """Unfiltered bundles built photon by photon.

    After k emissions the next one follows after an exponential wait at rate
    (N - k) gamma.  Independent of the sort-based sampler; used to cross-check it.
    """
    if r.filtered:
        raise ValueError("the sequential cascade is only defined for the unfiltered source")
    spec = as_bundle(spec)
    rng = _rng(rng)
    N = spec.N
    gen = rng.generator(0)
    rates = r.g * np.arange(N, 0, -1, dtype=float)
    waits = gen.exponential(1.0, size=(n_bundles, N)) / rates
    keep = gen.random((n_bundles, N)) < float(r.xi)
    return BundleBatch(0, np.cumsum(waits, axis=1), keep)


# continuous-wave toy model ----------------------------------------------------------

@dataclass(frozen=True)
class StreamEvent:
    absolute_time: float
    bundle_id: int
    index_within_bundle: int


@dataclass
class Stream:
    """Detections from Poisson-triggered bundles, sorted by absolute time."""

    times: np.ndarray
    bundle_ids: np.ndarray
    indices: np.ndarray
    trigger_times: np.ndarray
    duration: float
    N: int
    rates: RateSet = field(repr=False, default=None)

    @property
    def n_triggers(self) -> int:
        return self.trigger_times.size

    def __len__(self):
        return self.times.size

    def events(self):
        for t, b, i in zip(self.times, self.bundle_ids, self.indices):
            yield StreamEvent(float(t), int(b), int(i))

    def delays(self) -> np.ndarray:
        return np.diff(self.times)


def sample_cwse_stream(r: RateSet, spec, trigger_rate: float, duration: float, rng, effective_rate: bool = False) -> Stream:
    """Continuous stream of spontaneously emitted bundles launched at Poisson times.

    ``effective_rate`` halves gamma_a, mimicking the slower effective emission
    of a driven bundle source.
    """
    spec = as_bundle(spec)
    rng = _rng(rng)
    if trigger_rate <= 0:
        raise ValueError("trigger_rate must be positive")
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    if effective_rate:
        r = RateSet(r.gamma_a / 2, r.Gamma, r.xi, r.omega_a)
    gen = rng.generator(_TRIGGER_BLOCK)
    n = int(gen.poisson(trigger_rate * duration)) if duration > 0 else 0
    trig = np.sort(gen.uniform(0.0, duration, n)) if n else np.empty(0)
    batch = sample_bundles(r, spec, n, rng)
    N = spec.N
    abs_t = trig[:, None] + batch.times
    mask = batch.detected & (abs_t <= duration)
    idx = np.cumsum(batch.detected, axis=1) - 1
    rows = np.broadcast_to(np.arange(n)[:, None], (n, N))
    t, b, i = abs_t[mask], rows[mask], idx[mask]
    order = np.argsort(t, kind="stable")
    return Stream(t[order], b[order].astype(np.int64), i[order].astype(np.int64), trig, float(duration), N, r)


# estimators ------------------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int = 0

    def within(self, target, nsigma=3.0) -> bool:
        return abs(self.value - float(target)) <= nsigma * self.stderr


@dataclass
class CountHistogram:
    """Number of bundles with k = 0..N detections."""

    counts: np.ndarray

    @classmethod
    def from_batch(cls, batch: BundleBatch):
        return cls(np.bincount(batch.counts(), minlength=batch.N + 1).astype(np.int64))

    def merge(self, other: "CountHistogram") -> "CountHistogram":
        return CountHistogram(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def estimates(self):
        n = self.total
        if n == 0:
            raise InsufficientDataError("empty histogram")
        p = self.counts / n
        return [Estimate(float(x), math.sqrt(x * (1 - x) / n), n) for x in p]


@dataclass
class MomentAccumulator:
    n: int = 0
    s1: float = 0.0
    s2: float = 0.0

    @classmethod
    def from_samples(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x.size, float(x.sum()), float((x * x).sum()))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        return MomentAccumulator(self.n + other.n, self.s1 + other.s1, self.s2 + other.s2)

    def mean(self) -> Estimate:
        if self.n < 2:
            raise InsufficientDataError("need at least two samples")
        m = self.s1 / self.n
        var = max(self.s2 / self.n - m * m, 0.0) * self.n / (self.n - 1)
        return Estimate(m, math.sqrt(var / self.n), self.n)

    def std(self) -> float:
        m = self.mean()
        return m.stderr * math.sqrt(self.n)


@dataclass
class PairAccumulator:
    """Power sums S[a, b] = sum x^a y^b for a + b <= 4 of paired samples."""

    sums: np.ndarray = field(default_factory=lambda: np.zeros((5, 5)))
    n: int = 0

    @classmethod
    def from_samples(cls, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = np.zeros((5, 5))
        for a in range(5):
            for b in range(5 - a):
                s[a, b] = np.sum(x**a * y**b)
        return cls(s, x.size)

    def merge(self, other: "PairAccumulator") -> "PairAccumulator":
        return PairAccumulator(self.sums + other.sums, self.n + other.n)

    def _delta(self, fn):
        # delta method on the means of z = (x, y, x^2, y^2, xy)
        if self.n < 3:
            raise InsufficientDataError("need at least three pairs")
        E = self.sums / self.n
        pw = [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
        m = np.array([E[a, b] for a, b in pw])
        cov = np.array([[E[a1 + a2, b1 + b2] - E[a1, b1] * E[a2, b2] for a2, b2 in pw] for a1, b1 in pw])
        val = fn(m)
        grad = np.empty(5)
        for i in range(5):
            h = 1e-6 * max(abs(m[i]), 1.0)
            up, dn = m.copy(), m.copy()
            up[i] += h
            dn[i] -= h
            grad[i] = (fn(up) - fn(dn)) / (2 * h)
        var = float(grad @ cov @ grad) / self.n
        return Estimate(float(val), math.sqrt(max(var, 0.0)), self.n)

    def pearson(self) -> Estimate:
        def f(m):
            return (m[4] - m[0] * m[1]) / math.sqrt((m[2] - m[0] ** 2) * (m[3] - m[1] ** 2))

        return self._delta(f)

    def reflective(self) -> Estimate:
        def f(m):
            return m[4] / math.sqrt(m[2] * m[3])

        return self._delta(f)

    def mean_difference(self) -> MomentAccumulator:
        # accumulator for y - x, derived from the power sums
        S = self.sums
        return MomentAccumulator(self.n, S[0, 1] - S[1, 0], S[0, 2] - 2 * S[1, 1] + S[2, 0])


def _full_pairs(batch: BundleBatch):
    full = batch.full()
    if not full.any():
        raise InsufficientDataError("no fully detected bundles")
    t = batch.times[full]
    return t[:, 0], t[:, -1]


def _purity(stream: Stream, guard: float | None = None) -> Estimate:
    # only bundles triggered well before the end can have all photons in the window
    r = stream.rates
    if guard is None:
        slow = min(r.g, r.G) if r is not None and r.filtered else (r.g if r is not None else 1.0)
        guard = 40.0 / slow
    eligible = stream.trigger_times <= stream.duration - guard
    n = int(eligible.sum())
    if n == 0:
        raise InsufficientDataError("no bundle triggered early enough; increase duration")
    per = np.bincount(stream.bundle_ids, minlength=stream.n_triggers)[: stream.n_triggers]
    k = int((per[eligible] == stream.N).sum())
    p = k / n
    return Estimate(p, math.sqrt(p * (1 - p) / n), n)


def estimate(data, estimator: str, **kw):
    """Point estimate and standard error from a BundleBatch or a Stream.

    estimators: ``histogram`` (list over k), ``mean_time`` (k=, full=True),
    ``pearson``, ``reflective``, ``bundle_length``, ``purity``, ``wtd``
    (returns (peak average, background rate) from the delay histogram).
    """
    if estimator == "histogram":
        return CountHistogram.from_batch(data).estimates()
    if estimator == "mean_time":
        k = kw.get("k", 1)
        if kw.get("full", True):
            full = data.full()
            x = data.times[full, k - 1]
        else:
            x = data.nth_detected(k)
        return MomentAccumulator.from_samples(x).mean()
    if estimator in ("pearson", "reflective"):
        acc = PairAccumulator.from_samples(*_full_pairs(data))
        return acc.pearson() if estimator == "pearson" else acc.reflective()
    if estimator == "bundle_length":
        t1, tN = _full_pairs(data)
        return MomentAccumulator.from_samples(tN - t1).mean()
    if estimator == "purity":
        return _purity(data, kw.get("guard"))
    if estimator == "wtd":
        from .wtd import peak_average_from_samples

        return peak_average_from_samples(
            data.delays(), kw.get("bin_width", 0.05), kw.get("fit_range", (5.0, 20.0)), window=kw.get("window")
        )
    raise ValueError(f"unknown estimator {estimator!r}")


# goodness of fit ------------------------------------------------------------------

def bin_probabilities(density, edges, norm: float = 1.0) -> np.ndarray:
    """Integrate ``density`` over each bin by adaptive quadrature, plus the overflow bin."""
    edges = np.asarray(edges, dtype=float)
    inside = np.array(
        [integrate.quad(density, a, b, epsabs=0.0, epsrel=1e-10, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])]
    )
    p = inside / norm
    return np.append(p, max(1.0 - p.sum(), 0.0))


def chi2_test(samples, edges, probs, min_expected: float = 5.0):
    """Pearson chi-square of binned samples against bin probabilities.

    ``probs`` has one entry per bin plus a final overflow entry.  Adjacent bins
    are merged until every expected count reaches ``min_expected``.
    Returns (statistic, dof, p-value).
    """
    samples = np.asarray(samples, dtype=float)
    edges = np.asarray(edges, dtype=float)
    n = samples.size
    counts, _ = np.histogram(samples, bins=edges)
    counts = np.append(counts, np.sum(samples >= edges[-1]))
    counts[0] += np.sum(samples < edges[0])
    expected = n * np.asarray(probs, dtype=float)
    obs_m, exp_m = [], []
    o = e = 0.0
    for c, x in zip(counts, expected):
        o += c
        e += x
        if e >= min_expected:
            obs_m.append(o)
            exp_m.append(e)
            o = e = 0.0
    if e > 0 or o > 0:
        if exp_m:
            obs_m[-1] += o
            exp_m[-1] += e
        else:
            obs_m.append(o)
            exp_m.append(e)
    obs_m = np.array(obs_m)
    exp_m = np.array(exp_m)
    if exp_m.size < 2:
        raise InsufficientDataError("too few populated bins for a chi-square test")
    stat = float(np.sum((obs_m - exp_m) ** 2 / exp_m))
    dof = exp_m.size - 1
    return stat, dof, float(stats.chi2.sf(stat, dof))

