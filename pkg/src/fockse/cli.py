"""Command-line front end: ``fockse <command> [options]``.

Every command writes a table, as CSV with ``#`` metadata lines followed by a
header row, or as JSON with the same content.  Times are in units of
1/gamma_a unless --gamma is changed.  Exact rationals are written as
``num/den`` next to a ``*_float`` column.

Exit codes: 0 success, 1 numerical failure or failed verification, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import acceptance, distributions as dist, moments as mom, montecarlo as mc, thermal, wtd
from .rates import DEFAULT_N_CAP, UNFILTERED, RateSet, ThermalParams

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


# parsing helpers -------------------------------------------------------------------

def _number(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")


def _filter(s: str):
    if s.strip().lower() in ("inf", "none", "unfiltered"):
        return UNFILTERED
    return _number(s)


def _times(s: str):
    return [float(_number(x)) for x in s.split(",") if x.strip()]


def _ints(s: str):
    return [int(x) for x in s.split(",") if x.strip()]


def _grid(args, default):
    lo, hi, n = args.grid if args.grid else default
    lo, hi, n = Fraction(lo), Fraction(hi), int(n)
    if not lo < hi or n < 2:
        raise UsageError("grid needs min < max and at least 2 points")
    if args.log:
        if lo <= 0:
            raise UsageError("a log grid needs min > 0")
        xs = np.linspace(math.log10(lo), math.log10(hi), n)
        return [Fraction(10 ** float(x)).limit_denominator(10**6) for x in xs]
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)]


def _rates(args) -> RateSet:
    return RateSet(args.gamma, args.filter, args.xi)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("FOCKSE_SEED", DEFAULT_SEED))


# output ----------------------------------------------------------------------------

def _expand(columns, rows):
    """Split Fraction-valued columns into exact string and float columns."""
    exact = [any(isinstance(r[i], Fraction) for r in rows) for i in range(len(columns))]
    cols = []
    for c, e in zip(columns, exact):
        cols += [c, c + "_float"] if e else [c]
    out = []
    for r in rows:
        row = []
        for v, e in zip(r, exact):
            if e:
                f = Fraction(v)
                row += [f"{f.numerator}/{f.denominator}", float(f)]
            else:
                row.append(v)
        out.append(row)
    return cols, out


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def _config(args) -> dict:
    skip = {"func", "output", "format"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, Fraction):
            v = str(v)
        elif v is UNFILTERED:
            v = "inf"
        elif isinstance(v, list):
            v = [str(x) if isinstance(x, Fraction) else x for x in v]
        cfg[k] = v
    return cfg


def emit(args, columns, rows, extra=None):
    cols, body = _expand(columns, rows)
    meta = {"command": args.command, "units": "times in 1/gamma_a, rates in gamma_a", **_config(args)}
    if extra:
        meta.update(extra)
    if args.format == "json":
        doc = {"config": meta, "columns": cols, "rows": [[_json(v) for v in r] for r in body]}
        text = json.dumps(doc, indent=1, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in body:
            w.writerow([_cell(v) for v in r])
        text = buf.getvalue()
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


# commands --------------------------------------------------------------------------

def cmd_efficiency(args):
    r = _rates(args)
    grid = _grid(args, (0, 10, 101))
    rows = [[float(T), float(dist.efficiency(r, float(T)))] for T in grid]
    emit(args, ["T", "efficiency"], rows)


def cmd_counting(args):
    r = _rates(args)
    T = math.inf if args.T is None else float(args.T)
    cd = dist.counting_probability(r, args.N, T)
    rows = []
    for k in range(args.N + 1):
        row = [k, cd[k]]
        if args.mandel:
            row.append(dist.counting_via_mandel_series(r, args.N, T, k) if math.isfinite(T) else float(cd[k]))
        rows.append(row)
    emit(args, ["k", "probability"] + (["mandel"] if args.mandel else []), rows)


def cmd_pdf(args):
    r = _rates(args)
    if args.times:
        emit(args, ["density"], [[dist.joint_pdf(r, args.N, args.times)]])
        return
    if args.N < 2:
        raise UsageError("the first-last density needs -N >= 2")
    grid = [float(x) for x in _grid(args, (0, 8, 41))]
    t1, tN = np.meshgrid(grid, grid, indexing="ij")
    dens = dist.joint_first_last(r, args.N, t1, tN, method=args.method)
    rows = [[a, b, float(c)] for a, b, c in zip(t1.ravel(), tN.ravel(), np.ravel(dens))]
    emit(args, ["t1", "tN", "density"], rows)


def cmd_marginal(args):
    r = _rates(args)
    ks = args.k or list(range(1, args.N + 1))
    for k in ks:
        if not 1 <= k <= args.N:
            raise UsageError("need 1 <= k <= N")
    grid = np.array([float(x) for x in _grid(args, (0, 15, 151))])
    cols = ["t"]
    data = [grid]
    for k in ks:
        if args.broken:
            y = np.asarray(dist.marginal_broken(r, args.N, k, grid))
            norm = float(dist.detected_fraction(r, args.N, k))
        else:
            y = np.asarray(dist.marginal_full(r, args.N, k, grid))
            norm = float(dist.detect_probability(r, args.N, args.N))
        if args.normalize:
            y = y / norm
        cols.append(f"{'broken' if args.broken else 'full'}_k{k}")
        data.append(y)
    emit(args, cols, [list(map(float, row)) for row in zip(*data)])


_QUANTITIES = ("mean", "second", "std", "cross", "pearson", "reflective", "length", "broken_mean")


def _moment_value(q, r, N, k, method):
    if q in ("mean", "second", "std", "broken_mean") and k is None:
        raise UsageError(f"--{q.replace('_', '-')} needs -k")
    if q == "mean":
        return mom.mean_time(r, N, k, method).value
    if q == "second":
        return mom.second_moment(r, N, k, method).value
    if q == "std":
        return mom.std_dev(r, N, k, method).value
    if q == "broken_mean":
        return mom.mean_time_broken(r, N, k)
    if q == "cross":
        return mom.cross_moment_first_last(r, N, "quadrature" if method == "quadrature" else "exact").value
    if q == "pearson":
        return mom.pearson(r, N)
    if q == "reflective":
        return mom.reflective(r, N)
    if q == "length":
        return mom.bundle_length_stats(r, N)[0]
    raise UsageError(f"unknown quantity {q}")


def cmd_moments(args):
    if args.k is not None and not 1 <= args.k <= args.N:
        raise UsageError("need 1 <= k <= N")
    if args.figure == "fig1-floor":
        return _fig1_floor(args)
    q = next((x for x in _QUANTITIES if getattr(args, x)), "mean")
    method = args.method
    if args.grid:
        rows = []
        for G in _grid(args, None):
            r = RateSet(args.gamma, G, args.xi)
            rows.append([G, _moment_value(q, r, args.N, args.k, method)])
        emit(args, ["Gamma", q], rows)
    else:
        r = _rates(args)
        emit(args, [q], [[_moment_value(q, r, args.N, args.k, method)]])


def _fig1_floor(args):
    if args.grid is None:
        args.grid = [Fraction(1, 100), Fraction(100), 41]
        args.log = True
    N = args.N
    cols = ["Gamma"] + [f"full_k{k}" for k in range(1, N + 1)] + [f"broken_k{k}" for k in range(1, N + 1)]
    rows = []
    for G in _grid(args, None):
        r = RateSet(args.gamma, G, args.xi)
        full = [float(mom.moment_exact(r, N, k)) for k in range(1, N + 1)]
        broken = [float(mom.mean_time_broken(r, N, k)) for k in range(1, N + 1)]
        rows.append([float(G)] + full + broken)
    emit(args, cols, rows)


def cmd_wtd(args):
    if args.figure == "fig2b":
        return _fig2b(args)
    if args.thermal:
        if args.pump is None:
            raise UsageError("--thermal needs --pump")
        p = ThermalParams(args.pump, args.gamma)
        if args.mean:
            emit(args, ["peak_average_wide"], [[wtd.thermal_peak_average(p)]])
            return
        grid = [float(x) for x in _grid(args, (0, 10, 201))]
        emit(args, ["tau", "w_th"], [[t, wtd.wtd_thermal(p, t)] for t in grid])
        return
    r = _rates(args)
    if args.mean:
        emit(args, ["mean_delay"], [[wtd.mean_wtd_biphoton(r)]])
        return
    grid = [float(x) for x in _grid(args, (0, 10, 201))]
    emit(args, ["tau", "w2"], [[t, wtd.wtd_biphoton(r, t)] for t in grid])


def _fig2b(args):
    if args.grid is None:
        args.grid = [Fraction(1, 100), Fraction(100), 41]
        args.log = True
    Ns = range(2, max(args.N, 2) + 1)
    p = ThermalParams(args.pump if args.pump is not None else Fraction(1, 4), args.gamma)
    wide = wtd.thermal_peak_average(p)
    cols = ["Gamma"] + [f"N{n}" for n in Ns] + ["thermal_wide", "thermal_narrow"]
    rows = []
    for G in _grid(args, None):
        r = RateSet(args.gamma, G, args.xi)
        vals = [mom.peak_average_weighted(r, n, sub_bundle=not args.literal) for n in Ns]
        rows.append([float(G)] + vals + [wide, wtd.thermal_peak_average_narrow(p, float(G))])
    emit(args, cols, rows)


def cmd_thermal(args):
    if args.pump is None:
        raise UsageError("thermal needs --pump")
    p = ThermalParams(args.pump, args.gamma, args.filter)
    if args.g2:
        grid = [float(x) for x in _grid(args, (0, 10, 201))]
        emit(args, ["tau", "g2"], [[t, thermal.g2_thermal_filtered(p, t)] for t in grid])
    elif args.temperature:
        rows = []
        for G in _grid(args, (Fraction(1, 100), 100, 41)) if args.grid or args.log else [p.Gamma]:
            q = p.with_filter(G)
            rows.append([G if G is not UNFILTERED else "inf", thermal.filtered_temperature(q), thermal.filtered_intensity(q)])
        emit(args, ["Gamma", "temperature", "intensity"], rows)
    else:
        grid = [float(x) for x in _grid(args, (-5, 5, 201))]
        emit(args, ["omega", "spectrum"], [[w, float(thermal.spectrum_thermal_filtered(p, w))] for w in grid])


def cmd_simulate(args):
    r = _rates(args)
    seed = _seed(args)
    rng = mc.RngSpec(seed, args.stream_id)
    if args.stream:
        s = mc.sample_cwse_stream(r, args.N, args.trigger_rate, args.duration, rng, effective_rate=args.effective_rate)
        rows = [["triggers", s.n_triggers, ""], ["detections", len(s), ""]]
        try:
            e = mc.estimate(s, "purity")
            rows.append(["purity", e.value, e.stderr])
        except mc.InsufficientDataError as exc:
            rows.append(["purity", "nan", str(exc)])
        emit(args, ["quantity", "value", "stderr"], rows, {"seed": seed})
        return
    batch = mc.sample_bundles(r, args.N, args.trajectories, rng, threads=args.threads)
    if args.records:
        with open(args.records, "w") as fh:
            for rec in batch.records():
                fh.write(json.dumps({
                    "bundle_id": rec.bundle_id,
                    "emitted": rec.emitted,
                    "detected": rec.detected,
                    "detection_times": rec.detection_times,
                }) + "\n")
    counts = np.bincount(batch.counts(), minlength=args.N + 1)
    rows = []
    n = args.trajectories
    for k in range(args.N + 1):
        pk = float(dist.detect_probability(r, args.N, k))
        sd = math.sqrt(n * pk * (1 - pk))
        z = (counts[k] - n * pk) / sd if sd > 0 else 0.0
        rows.append([k, int(counts[k]), n * pk, z])
    emit(args, ["k", "observed", "expected", "z"], rows, {"seed": seed})


def cmd_table(args):
    if args.std_coefficients:
        if args.k is None:
            raise UsageError("--std-coefficients needs -N and -k")
        c = mom.std_dev_coefficients(args.N, args.k[0])
        n = max(len(c.alpha), len(c.beta))
        rows = [[i, c.alpha[i] if i < len(c.alpha) else "", c.beta[i] if i < len(c.beta) else ""] for i in range(n)]
        emit(args, ["i", "alpha", "beta"], rows, {"factor": c.factor, "mu": c.mu})
        return
    rows = []
    for N in range(1, args.max_N + 1):
        for k in range(1, N + 1):
            rows.append([N, k, mom.unfiltered_mean(N, k, args.gamma)])
    emit(args, ["N", "k", "mean"], rows)


def cmd_verify(args):
    sel = args.only or None
    for n in sel or []:
        if n not in acceptance.CHECKS:
            raise UsageError(f"no check {n}")
    results = acceptance.run(sel, seed=args.seed)
    if args.format == "json":
        text = json.dumps({"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]}, indent=1) + "\n"
    else:
        text = "".join(r.line() + "\n" for r in results)
        text += f"{sum(r.passed for r in results)}/{len(results)} checks passed\n"
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 1


# parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=_number, default=Fraction(1), help="radiative decay rate gamma_a")
    common.add_argument("--filter", type=_filter, default=UNFILTERED, help="filter width Gamma, or 'inf'")
    common.add_argument("--xi", type=_number, default=Fraction(1), help="detector efficiency")
    common.add_argument("-N", type=int, default=2, help="photons in the bundle")
    common.add_argument("--grid", nargs=3, type=_number, metavar=("MIN", "MAX", "POINTS"))
    common.add_argument("--log", action="store_true", help="logarithmic grid")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $FOCKSE_SEED or 42)")
    common.add_argument("--threads", type=int, default=1, help="maximum worker threads")
    common.add_argument("-o", "--output", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="fockse", description="Photon statistics of filtered Fock-state emission.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("efficiency", parents=[common], help="detection probability up to time T (grid over T)")
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("counting", parents=[common], help="distribution of detected photon number")
    p.add_argument("--T", type=_number, default=None, help="detection window (default infinite)")
    p.add_argument("--mandel", action="store_true", help="add the Mandel-series column")
    p.set_defaults(func=cmd_counting)

    p = sub.add_parser("pdf", parents=[common], help="joint density, or first-last density on a grid")
    p.add_argument("--times", type=_times, default=None, help="comma-separated detection times")
    p.add_argument("--method", choices=("auto", "sum", "direct"), default="auto")
    p.set_defaults(func=cmd_pdf)

    p = sub.add_parser("marginal", parents=[common], help="k-th detection-time densities on a time grid")
    p.add_argument("-k", type=_ints, default=None, help="comma-separated photon indices (default all)")
    p.add_argument("--broken", action="store_true", help="condition on at least k detections")
    p.add_argument("--normalize", action="store_true", help="divide by the detection probability")
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("moments", parents=[common], help="detection-time moments and correlations")
    p.add_argument("-k", type=int, default=None)
    g = p.add_mutually_exclusive_group()
    for q in _QUANTITIES:
        g.add_argument(f"--{q.replace('_', '-')}", dest=q, action="store_true")
    m = p.add_mutually_exclusive_group()
    m.add_argument("--exact", dest="method", action="store_const", const="exact")
    m.add_argument("--sum", dest="method", action="store_const", const="sum")
    m.add_argument("--float", dest="method", action="store_const", const="sum-float")
    m.add_argument("--quadrature", dest="method", action="store_const", const="quadrature")
    p.add_argument("--figure", choices=("fig1-floor",), default=None, help="mean detection times vs Gamma")
    p.set_defaults(func=cmd_moments, method="exact")

    p = sub.add_parser("wtd", parents=[common], help="waiting-time distributions")
    p.add_argument("--thermal", action="store_true", help="unfiltered thermal light instead of a photon pair")
    p.add_argument("--pump", type=_number, default=None, help="thermal pump rate P_a")
    p.add_argument("--mean", action="store_true", help="print the mean delay only")
    p.add_argument("--figure", choices=("fig2b",), default=None, help="multiphoton-peak averages vs Gamma")
    p.add_argument("--literal", action="store_true", help="fig2b: use the N-bundle times instead of sub-bundles")
    p.set_defaults(func=cmd_wtd)

    p = sub.add_parser("thermal", parents=[common], help="filtered thermal light")
    p.add_argument("--pump", type=_number, default=None, help="pump rate P_a")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--spectrum", action="store_true", help="spectrum on a frequency grid (default)")
    q.add_argument("--g2", action="store_true", help="second-order correlation on a delay grid")
    q.add_argument("--temperature", action="store_true", help="temperature and intensity (grid over Gamma)")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo bundles or a continuous stream")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--bundle", action="store_true", help="independent bundles (default)")
    kind.add_argument("--stream", action="store_true", help="Poisson-triggered stream")
    p.add_argument("--trajectories", type=int, default=100_000)
    p.add_argument("--stream-id", type=int, default=0)
    p.add_argument("--records", default=None, help="write every bundle as JSON lines")
    p.add_argument("--trigger-rate", type=float, default=0.5)
    p.add_argument("--duration", type=float, default=10_000.0)
    p.add_argument("--effective-rate", action="store_true", help="halve gamma_a in the stream")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table", parents=[common], help="tables of exact values")
    p.add_argument("--unfiltered-means", action="store_true", help="(H_N - H_{N-k})/gamma (default)")
    p.add_argument("--std-coefficients", action="store_true", help="numerator/denominator coefficients of sigma_k")
    p.add_argument("--max-N", type=int, default=10)
    p.add_argument("-k", type=_ints, default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", type=_ints, default=None, help="comma-separated check numbers")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if not 1 <= args.N <= DEFAULT_N_CAP and args.command != "table":
        parser.error(f"-N must be in 1..{DEFAULT_N_CAP}")
    try:
        rc = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, ArithmeticError, mc.InsufficientDataError) as exc:
        print(f"fockse: error: {exc}", file=sys.stderr)
        return 1
    return int(rc or 0)


if __name__ == "__main__":
    sys.exit(main())
