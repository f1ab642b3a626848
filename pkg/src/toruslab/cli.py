"""``toruslab`` command-line interface.

Subcommands: ``analyze``, ``levelset``, ``characteristic``, ``recover`` and
``verify``.  Reports are JSON envelopes (or CSV tables with ``--format csv``)
written to ``--out`` or stdout; reals use shortest round-trip formatting so
re-runs are byte-identical and CSV values parse back exactly.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .asymptotics import (characteristic_direct, characteristic_profile, growth_exponent,
                          max_norm_profile, order_estimate, polynomial_bound_constant)
from .errors import InputError, NumericalError, ToruslabError
from .level_sets import LEMMA_CONSTANT, level_set_reports
from .numerics import geometric_grid
from .recovery import (DEFAULT_KMAX, DEFAULT_N, DEFAULT_TOL, polynomial_log_samples,
                       recover_polynomial, theorem1_verify)
from .specfile import load_samples, load_spec, parse_inline_polynomial
from .verify import DEFAULT_SEED, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_CSV_HELP = {
    "analyze": "CSV columns: quantity,value",
    "levelset": "CSV columns: r,measure,bound,ratio,r0_empirical",
    "characteristic": "CSV columns: r,T[,T_direct,rel_discrepancy]",
    "recover": "CSV columns: component,k,re,im,discrepancy,confirmed",
}


class _Parser(argparse.ArgumentParser):
    """argparse with input errors mapped to exit code 2 and a short message."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: input error: {message}\n")


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return v


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return v


def _clean(value):
    """JSON-safe copy: non-finite reals become ``None``, numpy scalars Python."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return [_clean(value.real), _clean(value.imag)]
    return value


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _envelope(command, spec_echo, params, results):
    return {
        "command": command,
        "deterministic": True,
        "inputs": {"spec": spec_echo, "parameters": params},
        "results": results,
        "tool_version": __version__,
    }


def _emit(args, envelope, header, rows):
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(_clean(v)) for v in row])
        text = buf.getvalue()
    else:
        text = json.dumps(_clean(envelope), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"{args.out}: cannot write output ({exc.strerror})") from None
    else:
        sys.stdout.write(text)


def _write_profile(path, profile):
    if not path:
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", profile.kind])
    for r, v in profile.rows():
        writer.writerow([repr(float(r)), repr(float(v))])
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise InputError(f"{path}: cannot write profile ({exc.strerror})") from None


def _radius_grid(args):
    if not args.rmax > args.rmin:
        raise InputError(f"--rmax must exceed --rmin, got {args.rmin}, {args.rmax}")
    return geometric_grid(args.rmin, args.rmax, args.points_per_decade)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    curve, echo = load_spec(args.spec)
    if args.rmin < 1.0:
        raise InputError("--rmin must be at least 1")
    params = {"rmin": args.rmin, "rmax": args.rmax, "angles": args.angles,
              "points_per_decade": args.points_per_decade}
    m = curve.m
    if curve.is_constant:
        results = {"m": m, "verdict": "constant map", "growth_slope": None, "C_hat": None,
                   "order_estimate": None, "theorem1": {"passed": True, "constant": True}}
    else:
        profile = max_norm_profile(curve, _radius_grid(args), args.angles, args.threads)
        _write_profile(args.profile, profile)
        est = growth_exponent(curve, args.rmin, args.rmax, profile=profile)
        bound = polynomial_bound_constant(curve, float(m), args.rmin, args.rmax, profile=profile)
        rho = order_estimate(curve, r_max=args.rmax, threads=args.threads)
        rep = theorem1_verify(curve, slope=est.slope)
        results = {
            "m": m,
            "growth_slope": est.slope,
            "fit_window": list(est.window),
            "fit_residual": est.residual,
            "C_hat": bound.C_hat,
            "C_hat_monotone_ok": bound.monotone_ok,
            "order_estimate": rho,
            "theorem1": {
                "passed": rep.passed,
                "m_hat": rep.m_hat,
                "component_degrees": list(rep.component_degrees),
                "difference_degrees": {f"{i},{j}": d for (i, j), d in rep.difference_degrees.items()},
                "max_degree": rep.max_degree,
                "coefficient_error": rep.coefficient_error,
            },
            "verdict": "pass" if rep.passed else "fail",
        }
    rows = [(k, results[k]) for k in ("m", "growth_slope", "C_hat", "order_estimate", "verdict")]
    _emit(args, _envelope("analyze", echo, params, results), ["quantity", "value"], rows)
    return EXIT_OK


def cmd_levelset(args) -> int:
    if (args.poly is None) == (args.spec is None):
        raise InputError("give exactly one of --poly or --spec")
    if args.poly is not None:
        g = parse_inline_polynomial(args.poly)
        echo = {"poly": [[c.real, c.imag] for c in g.coefficients]}
    else:
        curve, echo = load_spec(args.spec)
        if not 0 <= args.index < curve.n:
            raise InputError(f"--index must be in [0, {curve.n}), got {args.index}")
        g = curve.exponents[args.index]
    if g.degree < 2:
        raise InputError(f"level-set bounds need degree >= 2, got {max(g.degree, 0)}")
    if not 0.0 < args.delta <= 1.0:
        raise InputError(f"--delta must lie in (0, 1], got {args.delta}")
    if args.n_scan < 4096:
        raise InputError("--n-scan must be at least 4096")
    reports = level_set_reports(g, _radius_grid(args), args.delta, args.scale, args.n_scan)
    params = {"delta": args.delta, "scale": args.scale, "rmin": args.rmin, "rmax": args.rmax,
              "points_per_decade": args.points_per_decade, "n_scan": args.n_scan,
              "index": args.index if args.spec else None}
    rows = [(r.r, r.measure, r.bound, r.ratio, r.r0_empirical) for r in reports]
    results = {"degree": g.degree, "leading_modulus": abs(g.leading), "constant": LEMMA_CONSTANT,
               "r0_empirical": reports[-1].r0_empirical,
               "rows": [dict(zip(("r", "measure", "bound", "ratio", "r0_empirical"), row))
                        for row in rows]}
    _emit(args, _envelope("levelset", echo, params, results),
          ["r", "measure", "bound", "ratio", "r0_empirical"], rows)
    return EXIT_OK


def cmd_characteristic(args) -> int:
    curve, echo = load_spec(args.spec)
    if args.rmin < 1.0:
        raise InputError("--rmin must be at least 1")
    radii = _radius_grid(args)
    profile = characteristic_profile(curve, radii, args.angles, args.threads)
    _write_profile(args.profile, profile)
    rows = []
    for r, t in profile.rows():
        row = [r, t]
        if args.oracle:
            if r <= 10.0:
                d = characteristic_direct(curve, r)
                row += [d, abs(t - d) / abs(d) if d != 0 else abs(t - d)]
            else:
                row += [None, None]
        rows.append(row)
    order = None
    if not curve.is_constant and radii[-1] > 1.0:
        try:
            order = order_estimate(curve, profile=profile)
        except NumericalError:
            order = None
    header = ["r", "T"] + (["T_direct", "rel_discrepancy"] if args.oracle else [])
    params = {"rmin": args.rmin, "rmax": args.rmax, "angles": args.angles,
              "points_per_decade": args.points_per_decade, "oracle": args.oracle}
    results = {"order_estimate": order, "rows": [dict(zip(header, row)) for row in rows]}
    _emit(args, _envelope("characteristic", echo, params, results), header, rows)
    return EXIT_OK


def cmd_recover(args) -> int:
    radii = args.radius or []
    if len(radii) != 2:
        raise InputError(f"recovery needs exactly two --radius values, got {len(radii)}")
    if radii[0] == radii[1]:
        raise InputError("the two radii must differ")
    if not (2 <= args.n and args.n & (args.n - 1) == 0 and args.n >= 64):
        raise InputError(f"--n must be a power of two >= 64, got {args.n}")
    params = {"radius": radii, "kmax": args.kmax, "tol": args.tol}
    if args.blackbox:
        if not args.spec or args.samples:
            raise InputError("--blackbox needs --spec and no --samples")
        curve, echo = load_spec(args.spec)
        params["n"] = args.n
        pairs = [(polynomial_log_samples(g, radii[0], args.n),
                  polynomial_log_samples(g, radii[1], args.n)) for g in curve.exponents]
    else:
        if args.spec:
            raise InputError("--spec is only used with --blackbox")
        files = args.samples or []
        if len(files) != 2:
            raise InputError(f"give two --samples files (one per radius), got {len(files)}")
        curve = None
        echo = {"samples": files}
        pairs = [(load_samples(files[0], radii[0]), load_samples(files[1], radii[1]))]
    recovered = [recover_polynomial(a, b, args.kmax, args.tol) for a, b in pairs]
    comps = []
    rows = []
    for idx, rp in enumerate(recovered):
        comps.append({"coefficients": [[a.real, a.imag] for a in rp.coefficients],
                      "discrepancies": list(rp.discrepancies),
                      "confirmed": list(rp.confirmed), "degree": rp.degree})
        for k, (a, d, ok) in enumerate(zip(rp.coefficients, rp.discrepancies, rp.confirmed)):
            rows.append((idx, k, a.real, a.imag, d, ok))
    results = {"components": comps, "degrees": [rp.degree for rp in recovered],
               "gauge": "Im a_0 is not determined by |f| and is reported as 0"}
    if curve is not None:
        results["m"] = curve.m
        results["max_degree_equals_m_plus_1"] = max(rp.degree for rp in recovered) == curve.m + 1
    _emit(args, _envelope("recover", echo, params, results),
          ["component", "k", "re", "im", "discrepancy", "confirmed"], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    out = sys.stdout

    def show(res):
        out.write(f"{res.id:<4} {'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}\n")
        out.flush()

    only = None
    if args.only:
        only = [part.strip().upper() for part in args.only.split(",") if part.strip()]
    results = run_checks(seed=args.seed, quick=args.quick,
                         bound_constant=args.corrupt_bound_constant, threads=args.threads,
                         progress=show, only=only)
    failed = [r.id for r in results if not r.passed]
    if failed:
        out.write(f"FAILED: {' '.join(failed)}\n")
        return EXIT_VERIFY
    out.write(f"all {len(results)} checks passed\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_output(p, command):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help=f"report format (default json). {_CSV_HELP[command]}")


def _add_grid(p, rmin, rmax):
    p.add_argument("--rmin", type=_positive, default=rmin, help=f"smallest radius (default {rmin:g})")
    p.add_argument("--rmax", type=_positive, default=rmax, help=f"largest radius (default {rmax:g})")
    p.add_argument("--points-per-decade", type=_positive, default=None,
                   help="grid density (default: ratio 2^(1/4))")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toruslab",
                     description="Growth, level sets and exponent recovery for "
                                 "exponential-polynomial curves.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=_count, default=None,
                        help="worker threads (env TORUSLAB_THREADS overrides)")
    # accept --threads after the subcommand too, without clobbering the global value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_count, default=argparse.SUPPRESS,
                        help="worker threads (env TORUSLAB_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="growth exponent, bound constant, order, degree check")
    p.add_argument("spec", help="curve spec JSON")
    _add_grid(p, 1.0, 1e6)
    p.add_argument("--angles", type=_count, default=4096, help="scan angles per circle")
    p.add_argument("--profile", help="also write the (r, max |df|) profile as CSV here")
    _add_output(p, "analyze")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("levelset", parents=[common], help="level-set measures against the 8/(|a0| r^(k-delta)) bound")
    p.add_argument("--poly", help='inline coefficients in ascending powers, e.g. "0,0,1"')
    p.add_argument("--spec", help="curve spec JSON (use with --index)")
    p.add_argument("--index", type=int, default=0, help="0-based exponent index in --spec")
    p.add_argument("--delta", type=float, default=1.0, help="threshold exponent in (0, 1]")
    p.add_argument("--scale", type=_positive, default=1.0, help="threshold factor C")
    p.add_argument("--n-scan", type=_count, default=4096, help="scan angles (>= 4096)")
    _add_grid(p, 1.0, 1e4)
    _add_output(p, "levelset")
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("characteristic", parents=[common], help="Shimizu-Ahlfors characteristic profile")
    p.add_argument("spec", help="curve spec JSON")
    _add_grid(p, 1.0, 1e6)
    p.add_argument("--angles", type=_count, default=256, help="starting trapezoid nodes")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against direct double quadrature for r <= 10")
    p.add_argument("--profile", help="also write the (r, T) profile as CSV here")
    _add_output(p, "characteristic")
    p.set_defaults(func=cmd_characteristic)

    p = sub.add_parser("recover", parents=[common], help="exponent coefficients from circle samples")
    p.add_argument("--samples", action="append",
                   help="CSV with columns theta_index,value (give twice)")
    p.add_argument("--radius", action="append", type=_positive,
                   help="sample radius, matching --samples order (give twice)")
    p.add_argument("--spec", help="curve spec JSON (with --blackbox)")
    p.add_argument("--blackbox", action="store_true",
                   help="sample every exponent of --spec instead of reading files")
    p.add_argument("--n", type=int, default=DEFAULT_N, help="samples per circle with --blackbox")
    p.add_argument("--kmax", type=_count, default=DEFAULT_KMAX, help="highest coefficient index")
    p.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="zeroing/agreement tolerance")
    _add_output(p, "recover")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", parents=[common], help="run the property suite; exit 1 on any failure")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random-curve seed")
    p.add_argument("--quick", action="store_true", help="fewer random cases")
    p.add_argument("--only", help="comma-separated check ids to run, e.g. C4,C9")
    p.add_argument("--corrupt-bound-constant", type=_positive, default=LEMMA_CONSTANT,
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"toruslab: input error: {exc}\n")
        return EXIT_INPUT
    except NumericalError as exc:
        sys.stderr.write(f"toruslab: numerical failure in stage {exc.stage or 'unknown'}: {exc}\n")
        return EXIT_NUMERIC
    except ToruslabError as exc:
        sys.stderr.write(f"toruslab: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
