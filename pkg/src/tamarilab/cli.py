"""Command-line entry point: ``tamarilab <subcommand> ...``.

Subcommands
-----------
counts   contact-count table with row sums checked against the closed form
verify   exact series checks and brute-force oracle comparisons (JSON)
sample   uniform random intervals: per-sample statistics, profiles, paths
moments  finite-size moments, pumped limit constants and transfer predictions
mixed    second moment of the mixed up-step statistic per size
pump     constants and limit moments of a recurrence spec

Exit codes: 0 success, 1 a check failed, 2 usage error.  Options can also
come from a JSON file given with ``--config`` (keys are option names with
underscores); command-line flags win.  ``TAMARI_CACHE_DIR`` names a
directory for persisted coefficient arrays.
"""

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np

from . import __version__
from . import closed_form, gf_engine, moment_pump
from .interval_decomp import counts as counts_mod
from .interval_decomp import sampler
from .tamari_core import DEFAULT_CAP, all_intervals, catalan, interval_count_formula

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

ORACLE_CHECKS = ["oracle-F", "oracle-H", "oracle-G", "oracle-M"]
ALL_CHECKS = list(closed_form.CHECKS) + ORACLE_CHECKS
ORACLE_MAX = 8


class UsageError(Exception):
    pass


def fraction_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class Output:
    """CSV or text destination: a file when ``--out`` is given, else stdout."""

    def __init__(self, path):
        self.path = path
        self.buffer = io.StringIO()

    def writer(self):
        return csv.writer(self.buffer, lineterminator="\n")

    def close(self):
        text = self.buffer.getvalue()
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def write_manifest(args, outputs, started):
    """``<out>.manifest.json`` next to the main output, when there is one."""
    if not getattr(args, "out", None):
        return None
    params = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    manifest = {
        "subcommand": args.command,
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "outputs": {p: _sha256(p) for p in outputs},
        "wall_clock_seconds": round(time.time() - started, 3),
    }
    path = args.out + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
    return path


# -------------------------------------------------------------- counts


def cmd_counts(args):
    if args.n_max < 0:
        raise UsageError("--n-max must be nonnegative")
    table = counts_mod.build_counts(args.n_max, method=args.method)
    out = Output(args.out)
    table.to_csv(out.buffer)
    out.close()
    bad = table.check_formula()
    if bad:
        print(f"row sums differ from the closed form at n = {bad}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -------------------------------------------------------------- verify


def _parse_checks(text):
    names = [c.strip() for c in (text or "").split(",") if c.strip()]
    if not names:
        raise UsageError("--checks needs at least one name")
    if names == ["all"]:
        return list(ALL_CHECKS)
    unknown = [n for n in names if n not in ALL_CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {ALL_CHECKS} or 'all'")
    return names


def run_oracle_check(name, order):
    tag = name.split("-")[1]
    n_max = min(order, ORACLE_MAX)
    bad = gf_engine.compare_with_census(tag, n_max)
    disc = {"order": bad[0], "monomial": None, "coefficient": "census mismatch"} if bad else None
    return closed_form.Report(name, n_max, not bad, disc)


def cmd_verify(args):
    names = _parse_checks(args.checks)
    reports = []
    for name in names:
        if name in ORACLE_CHECKS:
            reports.append(run_oracle_check(name, args.order or ORACLE_MAX))
        else:
            order = args.order or closed_form.DEFAULT_ORDERS[name]
            reports.append(closed_form.CHECKS[name](order))
    failures = sum(1 for r in reports if not r.passed)
    out = Output(args.out)
    out.buffer.write(json.dumps({"checks": reports, "failures": failures},
                                indent=2, default=str) + "\n")
    out.close()
    return EXIT_FAIL if failures else EXIT_OK


# -------------------------------------------------------------- sample


def _heights(steps):
    return np.concatenate([[0], np.cumsum(np.where(steps == 1, 1, -1))])


def _coupled_heights(lower, upper, rng):
    """One coupling draw: ``(I, J, P(I), Q(I), P~(J), Q~(J))``."""
    n = len(lower) // 2
    ph, qh = _heights(lower), _heights(upper)
    j = int(rng.integers(1, n + 1))
    pstart = int(np.flatnonzero(lower == 1)[j - 1])
    qstart = int(np.flatnonzero(upper == 1)[j - 1])
    i = pstart
    if rng.integers(0, 2):
        # start of the matching down step
        depth = np.cumsum(np.where(lower[pstart:] == 1, 1, -1))
        i = pstart + int(np.flatnonzero(depth == 0)[0])
    return i, j, int(ph[i]), int(qh[i]), int(ph[pstart]), int(qh[qstart])


def _sample_rows(args, samples, writer):
    n = args.n
    scale = n ** 0.75 if n else 1.0
    writer.writerow(["sample", "n", "lower_contacts", "upper_contacts",
                     "mean_lower_height_scaled", "mean_upper_height_scaled"])
    for idx, s in enumerate(samples):
        ph, qh = _heights(s.lower), _heights(s.upper)
        writer.writerow([idx, n, int(np.count_nonzero(ph == 0)), int(np.count_nonzero(qh == 0)),
                         f"{ph.mean() / scale:.10g}", f"{qh.mean() / scale:.10g}"])


def _coupling_rows(args, samples, rngs, writer):
    if args.n < 1:
        raise UsageError("coupling needs --n >= 1")
    writer.writerow(["sample", "abscissa", "upstep", "lower_height_at_abscissa",
                     "upper_height_at_abscissa", "lower_upstep_height", "upper_upstep_height"])
    for idx, (s, rng) in enumerate(zip(samples, rngs)):
        writer.writerow([idx, *_coupled_heights(s.lower, s.upper, rng)])


def _profile_rows(samples, writer):
    writer.writerow(["sample", "abscissa", "lower_height", "upper_height", "height_ratio"])
    for idx, s in enumerate(samples):
        ph, qh = _heights(s.lower), _heights(s.upper)
        for i, (p, q) in enumerate(zip(ph, qh)):
            writer.writerow([idx, i, int(p), int(q), f"{q / p:.10g}" if p else ""])


def _chisq_report(args, samples):
    if args.n > DEFAULT_CAP:
        raise UsageError(f"the uniformity report enumerates all intervals; needs --n <= {DEFAULT_CAP}")
    tally = {iv: 0 for iv in all_intervals(args.n)}
    invalid = 0
    for s in samples:
        iv = s.to_interval()
        if iv in tally:
            tally[iv] += 1
        else:
            invalid += 1
    stat, pvalue = sampler.chi_square_uniform(tally)
    return {"n": args.n, "samples": len(samples), "outcomes": len(tally),
            "chi_square": stat, "p_value": pvalue, "not_an_interval": invalid}


def cmd_sample(args):
    if args.n < 0 or args.count < 1:
        raise UsageError("--n must be nonnegative and --count positive")
    if args.mode == "exact" and args.n > sampler.EXACT_CAP:
        raise UsageError(f"exact mode is limited to n <= {sampler.EXACT_CAP} by its memory "
                         "budget; rerun with --mode log-float")
    children = np.random.SeedSequence(args.seed).spawn(args.count)
    samples, stat_rngs = [], []
    for ss in children:
        draw_seq, stat_seq = ss.spawn(2)
        samples.append(sampler.sample_uniform(args.n, np.random.default_rng(draw_seq), args.mode))
        stat_rngs.append(np.random.default_rng(stat_seq))
    out = Output(args.out)
    if args.stats == "summary":
        _sample_rows(args, samples, out.writer())
    elif args.stats == "coupling":
        _coupling_rows(args, samples, stat_rngs, out.writer())
    elif args.stats == "profile":
        _profile_rows(samples, out.writer())
    elif args.stats == "paths":
        w = out.writer()
        w.writerow(["sample", "lower", "upper"])
        for idx, s in enumerate(samples):
            iv = s.to_interval()
            w.writerow([idx, str(iv.lower), str(iv.upper)])
    else:
        report = _chisq_report(args, samples)
        out.buffer.write(json.dumps(report, indent=2) + "\n")
        out.close()
        return EXIT_OK if report["not_an_interval"] == 0 else EXIT_FAIL
    out.close()
    return EXIT_OK


# ------------------------------------------------------------- moments


def finite_moment_values(instance, k_max, n_max):
    """Exact ``[t^n]`` of the factorial-moment series and the number of
    marked configurations, per ``n``; rows indexed ``[k][n]``."""
    if instance == "dyck":
        values = [moment_pump.dyck_moment_series(k, n_max) for k in range(k_max + 1)]
        totals = [(2 * n + 1) * catalan(n) for n in range(n_max + 1)]
        return values, totals
    tag = "H" if instance == "upper" else "G"
    arr = gf_engine.load_or_iterate(tag, n_max, jet=k_max)
    values = [gf_engine.factorial_moment_values(arr, k) for k in range(k_max + 1)]
    totals = [(2 * n + 1) * interval_count_formula(n) for n in range(n_max + 1)]
    return values, totals


def cmd_moments(args):
    spec = moment_pump.INSTANCES[args.instance]()
    cs = moment_pump.pump(spec, args.k_max)
    limits = moment_pump.limit_moments(spec, args.k_max, cs)
    values, totals = finite_moment_values(args.instance, args.k_max, args.n_max)
    out = Output(args.out)
    w = out.writer()
    w.writerow(["instance", "k", "n", "factorial_moment", "raw_moment", "raw_moment_float",
                "scaled_raw_moment", "limit_moment", "c_k", "c_k_float",
                "series_coefficient", "transfer_prediction", "relative_gap"])
    with mpmath.workdps(moment_pump.SHADOW_DPS):
        for n in range(1, args.n_max + 1):
            fact = [Fraction(values[k][n], totals[n]) for k in range(args.k_max + 1)]
            raw = moment_pump.raw_from_factorial(fact)
            for k in range(args.k_max + 1):
                pred = moment_pump.predict_finite_n(spec, k, n, cs)
                coeff = values[k][n]
                gap = mpmath.mpf(coeff) / pred - 1 if pred else mpmath.nan
                scaled = float(raw[k]) / n ** float(spec.beta * k)
                w.writerow([args.instance, k, n, fraction_str(fact[k]), fraction_str(raw[k]),
                            f"{float(raw[k]):.12g}", f"{scaled:.12g}",
                            mpmath.nstr(limits[k], 30), str(cs[k]), mpmath.nstr(cs[k].to_mpf(), 30),
                            coeff, mpmath.nstr(pred, 15), mpmath.nstr(gap, 6)])
    out.close()
    return EXIT_OK


# --------------------------------------------------------------- mixed


def mixed_second_moments(n_max):
    """``E[(Q~ - 3 P~)^2]`` at a uniform up step of a uniform interval, per ``n``."""
    arr = gf_engine.load_or_iterate("M", n_max, jet=2)
    counts = [interval_count_formula(n) for n in range(n_max + 1)]
    f1 = gf_engine.mean_factorial_moments(arr, 1, counts)
    f2 = gf_engine.mean_factorial_moments(arr, 2, counts)
    out = {}
    for n in range(1, n_max + 1):
        out[n] = (f1[n], f1[n] + f2[n])
    return out


def cmd_mixed(args):
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    out = Output(args.out)
    w = out.writer()
    w.writerow(["n", "mean_mixed", "second_moment", "second_moment_float", "second_moment_over_n"])
    for n, (m1, m2) in mixed_second_moments(args.n_max).items():
        w.writerow([n, fraction_str(m1), fraction_str(m2), f"{float(m2):.12g}",
                    f"{float(m2) / n:.12g}"])
    out.close()
    return EXIT_OK


# ---------------------------------------------------------------- pump


def cmd_pump(args):
    try:
        if args.spec:
            with open(args.spec) as fh:
                spec = moment_pump.PumpSpec.from_json(fh.read())
        else:
            spec = moment_pump.INSTANCES[args.instance]()
        if args.beta is not None:
            spec = spec.with_beta(Fraction(args.beta))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    cs = moment_pump.pump(spec, args.k_max)
    limits = moment_pump.limit_moments(spec, args.k_max, cs)
    out = Output(args.out)
    w = out.writer()
    w.writerow(["instance", "k", "c_k", "c_k_float", "limit_moment"])
    for k in range(args.k_max + 1):
        w.writerow([spec.name, k, str(cs[k]), mpmath.nstr(cs[k].to_mpf(), 30),
                    mpmath.nstr(limits[k], 30)])
    out.close()
    return EXIT_OK


# -------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="tamarilab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout); also writes a manifest")
        sp.add_argument("--config", help="JSON file with option defaults")

    sp = sub.add_parser("counts", help="contact-count table")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--method", choices=["recurrence", "closed"], default="recurrence")
    common(sp)
    sp.set_defaults(func=cmd_counts)

    sp = sub.add_parser("verify", help="exact series and oracle checks")
    sp.add_argument("--checks", default="all",
                    help=f"comma-separated subset of {ALL_CHECKS}, or 'all'")
    sp.add_argument("--order", type=int, help="order for every check (default: per check)")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sample", help="uniform random intervals")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--mode", choices=list(sampler.WEIGHT_MODES), default="exact")
    sp.add_argument("--stats", choices=["summary", "coupling", "profile", "paths", "chisq"], default="summary")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("moments", help="finite-size and limit moments")
    sp.add_argument("--instance", choices=list(moment_pump.INSTANCES), required=True)
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--n-max", type=int, default=30)
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("mixed", help="second moment of the mixed statistic")
    sp.add_argument("--n-max", type=int, default=30)
    common(sp)
    sp.set_defaults(func=cmd_mixed)

    sp = sub.add_parser("pump", help="constants and limit moments of a recurrence")
    sp.add_argument("--instance", choices=list(moment_pump.INSTANCES), default="upper")
    sp.add_argument("--spec", help="JSON PumpSpec file (overrides --instance)")
    sp.add_argument("--k-max", type=int, default=12)
    sp.add_argument("--beta", help="scaling exponent, e.g. 3/4 (default: the spec's)")
    common(sp)
    sp.set_defaults(func=cmd_pump)
    return p


def _apply_config(parser, argv):
    """Parse ``argv`` with defaults taken from ``--config`` when given."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    for sub in parser._subparsers._group_actions[0].choices.values():
        dests = {a.dest for a in sub._actions}
        sub.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
        # required options may come from the config instead
        for action in sub._actions:
            if action.dest in cfg:
                action.required = False
    args = parser.parse_args(argv)
    unknown = set(cfg) - set(vars(args))
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    return args


def main(argv=None):
    parser = build_parser()
    started = time.time()
    try:
        args = _apply_config(parser, argv)
        code = args.func(args)
    except UsageError as exc:
        print(f"tamarilab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except sampler.SamplerError as exc:
        print(f"tamarilab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "out", None):
        write_manifest(args, [args.out], started)
    return code


if __name__ == "__main__":
    sys.exit(main())
