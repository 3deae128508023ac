"""
Command-line interface.

Exit codes:

    0  success (all requested checks hold, verification passed)
    1  usage or configuration error
    2  a check fails / verification failed
    3  a check is inconclusive (and none fails)
    4  required moments do not exist
    5  the simulated volatility overflowed
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from pgarch import __version__
from pgarch.certify import (
    Certificate,
    Verdict,
    check_ergodicity,
    check_L1,
    check_Lr,
    estimate_lyapunov,
    garch11_strict_condition,
    lyapunov_certificate,
)
from pgarch.errors import (
    InnovationNotAbsolutelyContinuous,
    MomentDoesNotExist,
    NotGarch11,
    NumericOverflow,
    PGarchError,
    SizeOverflow,
    SpectralRadiusAtLeastOne,
)
from pgarch.model import load_spec
from pgarch.moments import garch11_closed_forms, moment_table
from pgarch.report import certificate_record, dumps
from pgarch.simulate import DEFAULT_BURNIN, simulate_path, verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILS = 2
EXIT_INCONCLUSIVE = 3
EXIT_NO_MOMENTS = 4
EXIT_OVERFLOW = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    return parse


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec_path", help="model specification (JSON)")
    common.add_argument(
        "--format", choices=("human", "machine"), default="human", dest="output_format",
        help="human-readable table or a single JSON document (default: human)",
    )
    common.add_argument(
        "--threads", type=_int_at_least(1), default=None,
        help="worker cap for Monte Carlo (default: $PGARCH_THREADS or 1)",
    )

    parser = _Parser(prog="pgarch", description="Periodic GARCH toolkit.")
    parser.add_argument("--version", action="version", version=f"pgarch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", parents=[common], help="stationarity and moment certificates")
    p.add_argument("--max-moment-order", type=_int_at_least(1), default=2, metavar="R",
                   help="check L2..LR moment conditions (default: 2)")
    p.add_argument("--ergodicity", action="store_true", help="check the ergodicity hypotheses")
    p.add_argument("--mc-draws", type=_int_at_least(100), default=200_000,
                   help="Monte Carlo draws for --ergodicity (default: 200000)")
    p.add_argument("--garch11-strict", action="store_true",
                   help="PGARCH(1,1) log-moment strict stationarity condition")
    p.add_argument("--lyapunov", action="store_true", help="estimate the top Lyapunov exponent")
    p.add_argument("--years", type=_int_at_least(100), default=10_000,
                   help="years per replication for --lyapunov (default: 10000)")
    p.add_argument("--reps", type=_int_at_least(2), default=32,
                   help="replications for --lyapunov (default: 32)")
    p.add_argument("--seed", type=_int_at_least(0), default=0, help="RNG seed (default: 0)")

    p = sub.add_parser("moments", parents=[common], help="analytic seasonal moments")
    p.add_argument("--max-lag", type=_int_at_least(0), default=None,
                   help="largest lag (default: 10 s)")
    p.add_argument("--out", default=None, help="write the lag table as CSV")

    p = sub.add_parser("simulate", parents=[common], help="simulate a sample path")
    p.add_argument("--years", type=_int_at_least(1), required=True)
    p.add_argument("--burnin", type=_int_at_least(0), default=DEFAULT_BURNIN,
                   help=f"burn-in years (default: {DEFAULT_BURNIN})")
    p.add_argument("--seed", type=_int_at_least(0), required=True)
    p.add_argument("--out", required=True, help="CSV output path")

    p = sub.add_parser("lyapunov", parents=[common], help="top Lyapunov exponent")
    p.add_argument("--years", type=_int_at_least(100), required=True)
    p.add_argument("--reps", type=_int_at_least(2), required=True)
    p.add_argument("--seed", type=_int_at_least(0), required=True)
    p.add_argument("--mode", choices=("seasonal", "stacked"), default="seasonal")

    p = sub.add_parser("verify", parents=[common], help="Monte Carlo check of analytic moments")
    p.add_argument("--years", type=_int_at_least(60), required=True)
    p.add_argument("--seed", type=_int_at_least(0), required=True)
    p.add_argument("--max-lag", type=_int_at_least(0), default=4)
    p.add_argument("--burnin", type=_int_at_least(0), default=DEFAULT_BURNIN)
    return parser


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("PGARCH_THREADS")
    if env is None or env == "":
        return 1
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"PGARCH_THREADS: invalid integer {env!r}") from None
    if value < 1:
        raise UsageError(f"PGARCH_THREADS: must be >= 1, got {value}")
    return value


def _g(x):
    return f"{x:.6g}"


# -- commands --------------------------------------------------------------------


def _certify(spec, opts, out):
    certs = [check_L1(spec)]
    for r in range(2, opts["max_moment_order"] + 1):
        try:
            certs.append(check_Lr(spec, r))
        except MomentDoesNotExist as exc:
            certs.append(Certificate(f"L{r}", Verdict.FAILS, {"r": r},
                                     [str(exc), f"E x^{2 * r} is infinite"]))
        except SizeOverflow as exc:
            raise UsageError(f"--max-moment-order: {exc}") from None
    if opts["garch11_strict"]:
        try:
            certs.append(garch11_strict_condition(spec))
        except NotGarch11 as exc:
            raise UsageError(f"--garch11-strict: {exc}") from None
    if opts["lyapunov"]:
        est = estimate_lyapunov(spec, opts["years"], opts["reps"], opts["seed"],
                                workers=opts["threads"])
        certs.append(lyapunov_certificate(est))
    if opts["ergodicity"]:
        try:
            certs.append(check_ergodicity(spec, mc_draws=opts["mc_draws"], seed=opts["seed"],
                                          workers=opts["threads"]))
        except InnovationNotAbsolutelyContinuous as exc:
            certs.append(Certificate("ergodicity", Verdict.FAILS, {},
                                     [f"innovation law must be absolutely continuous: {exc}"]))

    verdicts = [c.verdict for c in certs]
    if Verdict.FAILS in verdicts:
        code = EXIT_FAILS
    elif Verdict.INCONCLUSIVE in verdicts:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK

    if opts["output_format"] == "machine":
        return code, {"certificates": [certificate_record(c, spec) for c in certs]}
    parts = []
    for c in certs:
        ev = c.evidence
        if c.check_id.startswith("L") and "rho" in ev:
            detail = f"rho={_g(ev['rho'])}"
        elif c.check_id == "lyapunov":
            detail = (f"gamma_L={_g(ev['gamma_hat'])} +/- {_g(ev['std_error'])} per year, "
                      f"{_g(ev['gamma_per_observation'])} per observation")
        elif c.check_id == "garch11_strict":
            detail = f"S={_g(ev['S'])}"
        elif c.check_id == "ergodicity" and "rho_B" in ev:
            detail = f"rho_B={_g(ev['rho_B'])}"
            if ev.get("r_certified") is not None:
                detail += f", r={_g(ev['r_certified'])}"
        else:
            detail = "; ".join(c.notes)
        parts.append(f"{c.check_id}: {c.verdict.value} ({detail})")
    print("; ".join(parts), file=out)
    return code, None


def _moments(spec, opts, out):
    try:
        table = moment_table(spec, opts["max_lag"])
    except (SpectralRadiusAtLeastOne, MomentDoesNotExist) as exc:
        msg = f"moments do not exist: {exc}"
        if opts["output_format"] == "machine":
            return EXIT_NO_MOMENTS, {"error": msg}
        print(msg, file=out)
        return EXIT_NO_MOMENTS, None
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(table.lag_csv())
    closed = None
    if max(spec.p, spec.q) <= 1:
        closed = garch11_closed_forms(spec, 0)

    if opts["output_format"] == "machine":
        doc = {"moments": table.to_dict()}
        if closed is not None:
            doc["theta1"] = closed.theta1
            doc["theta2"] = closed.theta2
        return EXIT_OK, doc
    header = f"{'v':>3} {'mu1=E x^2':>14} {'E h':>14} {'mu2=E x^4':>14} {'E h^2':>14}"
    if closed is not None:
        header += f" {'theta1':>10} {'theta2':>10}"
    print(header, file=out)
    for i in range(spec.period):
        line = (f"{i + 1:>3} {table.mean_x2[i]:>14.8g} {table.mean_h[i]:>14.8g} "
                f"{table.mean_x4[i]:>14.8g} {table.mean_h2[i]:>14.8g}")
        if closed is not None:
            line += f" {closed.theta1[i]:>10.6g} {closed.theta2[i]:>10.6g}"
        print(line, file=out)
    print(f"\n{'v':>3} {'h':>4} {'gamma_v(h)':>14} {'autocov':>14}", file=out)
    for v, h, g, a in table.lag_rows():
        print(f"{v:>3} {h:>4} {g:>14.8g} {a:>14.8g}", file=out)
    return EXIT_OK, None


def _simulate(spec, opts, out):
    try:
        path = simulate_path(spec, opts["years"], opts["burnin"], opts["seed"])
    except NumericOverflow as exc:
        if opts["output_format"] == "machine":
            return EXIT_OVERFLOW, {"error": str(exc), "year": exc.year, "season": exc.season}
        print(f"numeric overflow: {exc}", file=out)
        return EXIT_OVERFLOW, None
    path.write_csv(opts["out"])
    summary = {"rows": path.n_years * path.period, "out": opts["out"],
               "max_h": float(path.h.max())}
    if opts["output_format"] == "machine":
        return EXIT_OK, {"path": summary}
    print(f"wrote {summary['rows']} observations to {opts['out']}", file=out)
    return EXIT_OK, None


def _lyapunov(spec, opts, out):
    est = estimate_lyapunov(spec, opts["years"], opts["reps"], opts["seed"], opts["mode"],
                            workers=opts["threads"])
    doc = {
        "gamma_hat": est.gamma_hat,
        "std_error": est.std_error,
        "gamma_per_observation": est.per_observation,
        "reps": est.reps,
        "years_per_rep": est.years_per_rep,
        "seed": est.seed,
        "mode": est.mode,
        "degenerate": est.degenerate,
    }
    if opts["output_format"] == "machine":
        return EXIT_OK, {"lyapunov": doc}
    print(f"gamma_L = {_g(est.gamma_hat)} +/- {_g(est.std_error)} per year "
          f"({_g(est.per_observation)} per observation; {est.reps} reps x "
          f"{est.years_per_rep} years, {est.mode})", file=out)
    return EXIT_OK, None


def _verify(spec, opts, out):
    try:
        report = verify(spec, opts["years"], opts["seed"], opts["max_lag"], opts["burnin"])
    except (SpectralRadiusAtLeastOne, MomentDoesNotExist) as exc:
        msg = f"moments do not exist: {exc}"
        if opts["output_format"] == "machine":
            return EXIT_NO_MOMENTS, {"error": msg}
        print(msg, file=out)
        return EXIT_NO_MOMENTS, None
    except NumericOverflow as exc:
        if opts["output_format"] == "machine":
            return EXIT_OVERFLOW, {"error": str(exc), "year": exc.year, "season": exc.season}
        print(f"numeric overflow: {exc}", file=out)
        return EXIT_OVERFLOW, None
    code = EXIT_OK if report.passed else EXIT_FAILS
    if opts["output_format"] == "machine":
        return code, {"verification": report.to_dict()}
    print(f"{'quantity':<20} {'analytic':>14} {'empirical':>14} {'se':>11} {'z':>7}", file=out)
    for row in report.rows:
        z = row["z"]
        ztxt = f"{z:>7.2f}" if math.isfinite(z) else f"{z:>7}"
        print(f"{row['quantity']:<20} {row['analytic']:>14.8g} {row['empirical']:>14.8g} "
              f"{row['se']:>11.3g} {ztxt}", file=out)
    verdict = "PASS" if report.passed else "FAIL (" + ", ".join(report.failures or ["too many |z| > 3"]) + ")"
    print(f"verification: {verdict}; fraction |z| > 3: {report.warn_fraction:.3f}", file=out)
    return code, None


COMMANDS = {
    "certify": _certify,
    "moments": _moments,
    "simulate": _simulate,
    "lyapunov": _lyapunov,
    "verify": _verify,
}


def run(argv=None, out=None, err=None) -> int:
    """Run the command line; returns the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        opts = vars(args).copy()
        opts["threads"] = _threads(args.threads)
        spec = load_spec(args.spec_path)
    except UsageError as exc:
        print(f"pgarch: error: {exc}", file=err)
        return EXIT_USAGE
    except (FileNotFoundError, PGarchError, OSError) as exc:
        print(f"pgarch: error: {exc}", file=err)
        return EXIT_USAGE

    try:
        code, doc = COMMANDS[args.command](spec, opts, out)
    except UsageError as exc:
        print(f"pgarch: error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pgarch: error: --out: {exc}", file=err)
        return EXIT_USAGE

    if opts["output_format"] == "machine":
        document = {
            "tool": "pgarch",
            "tool_version": __version__,
            "command": args.command,
            "options": opts,
            "spec_fingerprint": spec.fingerprint(),
            "exit_code": code,
        }
        document.update(doc or {})
        print(dumps(document), file=out)
    else:
        resolved = ", ".join(f"{k}={v}" for k, v in sorted(opts.items()) if k != "command")
        print(f"# options: {resolved}", file=out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
