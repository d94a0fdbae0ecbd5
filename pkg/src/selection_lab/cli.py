"""Command line front end.

Exit codes: 0 success, 2 invalid configuration, 3 I/O error, 4 ``--assert``
check failed.
"""
import argparse
import math
import sys

from . import distance as dist
from . import lab
from .risk import exact_risk, mc_risk
from .selector import power, threshold
from .sequences import (NotApplicableError, UnclassifiableError, beta_at, confusion_margin_min_n,
                        is_contiguous, llr_params)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ASSERT = 0, 2, 3, 4

LIMIT_HELP = (f"Limit verdict cut-offs (defaults): zero < {lab.DEFAULT_THRESHOLDS.zero:g}, "
              f"diverges when last/first > {lab.DEFAULT_THRESHOLDS.diverge_ratio:g}, "
              f"bounded when max/min < {lab.DEFAULT_THRESHOLDS.bounded_ratio:g}.  Presets on the "
              f"10^2..10^8 grid use diverge_ratio={lab.GRID_THRESHOLDS.diverge_ratio:g}; the yang "
              f"preset judges power with zero < {lab.YANG_POWER_THRESHOLDS.zero:g}.")


def _common(p):
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--beta", type=float)
    p.add_argument("--calibration", choices=("bic", "aic", "power"), default=None)
    p.add_argument("--tau", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--prediction-factor", type=float)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--assert", dest="check", action="store_true",
                   help="exit with status 4 if the built-in check for this command fails")


def _seq_args(p):
    p.add_argument("--sequence", choices=("yang", "boundary", "perfect", "contiguous", "generic"),
                   default=None)
    p.add_argument("--b", type=float)
    p.add_argument("--bprime", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--coef", type=float, help="generic: c_n = coef * n^exponent")
    p.add_argument("--exponent", type=float, help="generic: omit for constant c_n")


def build_parser():
    parser = argparse.ArgumentParser(prog="selection-lab", description=__doc__.splitlines()[0],
                                     epilog=LIMIT_HELP)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("power", help="power curve at fixed n")
    _common(p)
    p.add_argument("--beta-max", type=float, default=None)
    p.add_argument("--points", type=int, default=21)

    p = sub.add_parser("risk", help="one risk report (exact, plus Monte Carlo with --replicates)")
    _common(p)
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep", help="run a scenario preset or config file over an n grid",
                       epilog=LIMIT_HELP)
    _common(p)
    _seq_args(p)
    p.add_argument("--preset", choices=lab.PRESETS)
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--grid", help="min:max:points-per-decade, e.g. 1e2:1e8:1")
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("csv", "plotdata"), default="csv")
    p.add_argument("--series", action="append", help="plotdata series (repeatable)")

    p = sub.add_parser("classify", help="separation and contiguity verdicts for a sequence")
    _common(p)
    _seq_args(p)
    p.add_argument("--M", type=float, default=1.0, help="confusion margin")

    p = sub.add_parser("distances", help="distance table and inequality-chain check")
    _common(p)
    p.add_argument("--sxx", type=float, default=None, help="defaults to n")

    p = sub.add_parser("lemma1", help="power-gap bound and its attainment")
    _common(p)
    p.add_argument("--sxx", type=float, default=None, help="defaults to n")
    p.add_argument("--points", type=int, default=11)
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise lab.LabIOError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _fmt(x):
    return format(x, ".12g")


def _calibration(args):
    return lab.make_calibration(args.calibration or "bic", args.tau, args.alpha, args.gamma)


def _design(args):
    return lab.make_design(args.kappa, args.prediction_factor)


def cmd_power(args):
    cal, design = _calibration(args), _design(args)
    n = args.n
    sxx = design.sxx(n)
    beta_max = args.beta_max or 3.0 * threshold(cal, n, design) / sxx + 3.0 / math.sqrt(sxx)
    k = max(2, args.points)
    lines = [f"# calibration: {cal.describe()}", f"# n: {n}", "beta,power"]
    ok = True
    prev = -1.0
    for i in range(k):
        b = beta_max * i / (k - 1)
        pw = power(b, n, cal, design)
        ok &= pw > prev
        prev = pw
        lines.append(f"{_fmt(b)},{_fmt(pw)}")
    _emit("\n".join(lines) + "\n", args.out)
    return ok


def cmd_risk(args):
    cal, design = _calibration(args), _design(args)
    beta = args.beta if args.beta is not None else 0.0
    reports = [exact_risk(beta, args.n, cal, design)]
    if args.replicates:
        reports.append(mc_risk(beta, args.n, cal, design, args.replicates, args.seed, args.workers))
    fields = ("method", "n", "beta", "term_estimation", "term_bias", "risk", "scaled_risk",
              "accept_prob", "mc_std_error")
    lines = [f"# calibration: {cal.describe()}", ",".join(fields)]
    for r in reports:
        cells = []
        for f in fields:
            v = getattr(r, f)
            cells.append(v.value if f == "method" else "" if v is None else
                         str(v) if isinstance(v, int) else _fmt(v))
        lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", args.out)
    if len(reports) == 2:
        ex, mc = reports
        return abs(ex.risk - mc.risk) <= 3 * mc.mc_std_error
    return True


def cmd_sweep(args):
    values = lab.load_config_file(args.config) if args.config else {}
    if args.preset:
        values["preset"] = args.preset
    flags = {
        "calibration": args.calibration, "tau": args.tau, "alpha": args.alpha, "gamma": args.gamma,
        "sequence": args.sequence, "b": args.b, "bprime": args.bprime, "r": args.r,
        "coef": args.coef, "exponent": args.exponent, "kappa": args.kappa,
        "prediction_factor": args.prediction_factor, "grid": args.grid,
        "replicates": args.replicates, "seed": args.seed, "workers": args.workers,
    }
    for k, v in flags.items():
        if v is not None:
            values[k] = str(v)
    if "preset" not in values and "scenario" not in values:
        raise lab.ConfigError("sweep needs --preset or a config file naming a scenario")
    config = lab.config_from_mapping(values)
    table = lab.run_scenario(config)
    if args.format == "plotdata":
        text = lab.format_plotdata(table, args.series)
    else:
        text = lab.format_csv(table)
    _emit(text, args.out)
    if args.check:
        results = lab.check_expectations(table, config)
        for series, expected, observed, ok in results:
            print(f"{'PASS' if ok else 'FAIL'} {series}: expected {expected}, observed {observed}",
                  file=sys.stderr)
        return all(r[3] for r in results)
    return True


def cmd_classify(args):
    cal, design = _calibration(args), _design(args)
    seq = lab.make_sequence(args.sequence or "yang", cal, args.b, args.bprime, args.r, args.coef,
                            args.exponent)
    lines = [f"sequence: {seq.describe()}"]
    try:
        sep = dist.classify_separation(seq, design, cal).value
        contig = str(is_contiguous(seq, design, cal)).lower()
    except UnclassifiableError as exc:
        sep = contig = f"unclassifiable ({exc})"
    lines.append(f"separation: {sep}")
    lines.append(f"contiguous: {contig}")
    n = args.n
    llr = llr_params(seq, n, design, cal)
    lines.append(f"beta_n(n={n}): {_fmt(beta_at(seq, n, design, cal))}")
    lines.append(f"llr(n={n}): mean={_fmt(llr.mean)} variance={_fmt(llr.variance)}")
    try:
        m = confusion_margin_min_n(seq, cal, args.M)
        lines.append(f"confusion_margin(M={args.M:g}): "
                     + ("never" if m is None else f"holds for n >= {m}"))
    except NotApplicableError:
        lines.append("confusion_margin: not applicable")
    _emit("\n".join(lines) + "\n", args.out)
    return True


def _pairs(args):
    sxx = args.sxx if args.sxx is not None else float(args.n)
    if args.beta is not None:
        return [dist.GaussianShiftPair(args.beta, sxx)]
    return [dist.GaussianShiftPair(d / math.sqrt(sxx), sxx) for d in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]


def cmd_distances(args):
    lines = ["beta,sxx,shift,affinity,hellinger_sq,l1,chain_ok"]
    ok = True
    for p in _pairs(args):
        c = dist.check_inequality_chain(p)
        ok &= c
        lines.append(",".join([_fmt(p.beta), _fmt(p.sxx), _fmt(p.shift),
                               _fmt(dist.hellinger_affinity(p)), _fmt(dist.hellinger_distance_sq(p)),
                               _fmt(dist.l1_distance(p)), str(int(c))]))
    _emit("\n".join(lines) + "\n", args.out)
    return ok


def cmd_lemma1(args):
    lines = ["shift,threshold,gap,half_l1,attained"]
    ok = True
    for p in _pairs(args):
        half = 0.5 * dist.l1_distance(p)
        t_star = dist.likelihood_ratio_threshold(p)
        k = max(2, args.points)
        ts = [t_star + (i - (k - 1) / 2) * 0.5 for i in range(k)]
        for t in ts:
            g = dist.lemma1_gap(p, t)
            hit = abs(g - half) <= 1e-9
            ok &= g <= half + 1e-12
            if t == t_star:
                ok &= hit
            lines.append(",".join([_fmt(p.shift), _fmt(t), _fmt(g), _fmt(half), str(int(hit))]))
    _emit("\n".join(lines) + "\n", args.out)
    return ok


COMMANDS = {"power": cmd_power, "risk": cmd_risk, "sweep": cmd_sweep, "classify": cmd_classify,
            "distances": cmd_distances, "lemma1": cmd_lemma1}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        ok = COMMANDS[args.command](args)
    except lab.LabIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (lab.ConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.check and not ok:
        return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
