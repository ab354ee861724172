"""Command line front end: certify, connection, monodromy, weights, sweep, geom.

Reports are JSON with sorted keys; a failed computation exits 1 with an error
object on stderr, malformed arguments exit 2.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .errors import TrinoidError
from .params import FIELDS, TrinoidParams, fmt_rational, parse_rational

COMMANDS = ("certify", "connection", "monodromy", "weights", "sweep", "geom")
SWEEP_COLUMNS = list(FIELDS) + ["k0", "sign_++", "sign_+-", "sign_-+", "sign_--", "parity", "verdict",
                                "w_inf", "balance_w0", "balance_w1", "balance_winf", "error"]
EXACT_ONLY = ("certify", "sweep")


def _json_default(obj):
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default, allow_nan=False)


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trinoid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to FILE instead of stdout")
    common.add_argument("--approx", action="store_true",
                        help="accept decimal parameters (numerical subcommands only)")
    common.add_argument("--tol", type=_positive_float, default=1e-10)
    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--params", required=True, help="w0,w1,r0h,r1h,p as p/q rationals")

    c = sub.add_parser("certify", parents=[common, params], help="exact unitarisability certificate")
    c.add_argument("--t0", default="4/5")
    c = sub.add_parser("connection", parents=[common, params], help="connection matrix report")
    c.add_argument("--t", required=True)
    c.add_argument("--method", choices=("asymptotic", "frobenius", "both"), default="both")
    c = sub.add_parser("monodromy", parents=[common, params], help="loop monodromies at t")
    c.add_argument("--t", required=True)
    c.add_argument("--series", action="store_true", help="also expand M(theta) on |z| = 2")
    sub.add_parser("weights", parents=[common, params], help="end weights and balancing")
    c = sub.add_parser("sweep", parents=[common], help="certificate summaries over a CSV grid")
    c.add_argument("--grid", required=True, help="CSV with columns w0,w1,r0h,r1h,p")
    c.add_argument("--t0", default="4/5")
    c.add_argument("--jobs", type=_positive_int, default=1)
    c = sub.add_parser("geom", parents=[common], help="unitarisability of SL(2,C) matrices")
    c.add_argument("--m0", required=True, help="JSON 2x2 matrix of [re, im] entries")
    c.add_argument("--m1", help="second matrix for the pair verdict")
    return ap


# ---------------------------------------------------------------- commands


def _certify(args, theta):
    from .certifier import certify

    return certify(theta, parse_rational(args.t0)).to_json()


def _connection(args, theta):
    from .connection import connection_matrix, frobenius_connection, unitarisability_ratio

    t = parse_rational(args.t, args.approx)
    out = {"theta": theta.to_json(), "t": fmt_rational(t)}
    methods = ("asymptotic", "frobenius") if args.method == "both" else (args.method,)
    ratios = {}
    for m in methods:
        C = connection_matrix(theta, t) if m == "asymptotic" else frobenius_connection(theta, t, tol=max(args.tol, 1e-12))
        r = complex(unitarisability_ratio(C))
        ratios[m] = r
        out[m] = C.to_json() | {"ratio": [r.real, r.imag]}
    if len(ratios) == 2:
        a, f = ratios["asymptotic"], ratios["frobenius"]
        out["relative_difference"] = abs(a - f) / max(abs(f), 1e-300)
    r = next(iter(ratios.values()))
    out["simultaneously_unitarisable"] = bool(abs(r.imag) <= max(1e-10, 1e-8 * abs(r.real)) and r.real < 0)
    return out


def _monodromy(args, theta):
    from .monodromy import loop_report, m2_check

    t = float(parse_rational(args.t, args.approx))
    if not 0 < t <= 1:
        from .errors import DomainError

        raise DomainError(f"t must lie in (0,1], got {t}")
    angle = 2 * math.asin(math.sqrt(t))
    lam = cmath.exp(1j * angle)
    out = {"theta": theta.to_json(), "t": t, "angle": angle,
           "loops": {str(k): loop_report(theta, lam, k, args.tol) for k in (0, 1, "inf")}}
    if args.series:
        out["series"] = m2_check(theta, tol=min(args.tol, 1e-12)).to_json()
    return out


def _weights(args, theta):
    from .monodromy import end_weights

    return end_weights(theta).to_json() | {"theta": theta.to_json()}


def _geom(args):
    from .su2geom import as_matrix, axes, classify, simultaneously_unitarisable_pair

    m0 = as_matrix(json.loads(args.m0))
    out = {"m0": classify(m0).to_json()}
    if args.m1:
        m1 = as_matrix(json.loads(args.m1))
        out["m1"] = classify(m1).to_json()
        out["pair"] = simultaneously_unitarisable_pair(m0, m1).to_json()
        if out["m0"]["kind"] == out["m1"]["kind"] == "elliptic":
            out["axes"] = axes(m0, m1).to_json()
    return out


def sweep_row(item):
    """One CSV row for a parameter tuple; errors are recorded, not raised."""
    theta_text, t0 = item
    from .certifier import certify
    from .monodromy import end_weights

    row = dict.fromkeys(SWEEP_COLUMNS, "")
    try:
        theta = TrinoidParams.parse(theta_text)
        row.update(theta.to_json())
        cert = certify(theta, t0)
        row["k0"] = "" if cert.k0 is None else cert.k0
        for key, v in cert.sign_table.items():
            row[f"sign_{key}"] = "+" if v > 0 else "-"
        row["parity"] = "" if cert.parity_plus is None else cert.parity_plus
        row["verdict"] = cert.verdict
        w = end_weights(theta)
        row["w_inf"] = "" if w.w_inf is None else repr(w.w_inf)
        for col, b in zip(("balance_w0", "balance_w1", "balance_winf"), w.balancing):
            row[col] = "pass" if b["pass"] else "fail"
    except TrinoidError as exc:
        row["verdict"] = "error"
        row["error"] = f"{exc.kind}: {exc}"
    return row


def _sweep(args):
    t0 = parse_rational(args.t0)
    with open(args.grid, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            from .errors import DomainError

            raise DomainError(f"grid is missing columns {missing}")
        items = [(",".join(r[f].strip() for f in FIELDS), t0) for r in reader]
    if args.jobs == 1:
        rows = [sweep_row(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_row, items))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


HANDLERS = {"certify": _certify, "connection": _connection, "monodromy": _monodromy, "weights": _weights}


def run(args, parser) -> str:
    if args.command in EXACT_ONLY and args.approx:
        parser.error(f"{args.command} needs exact rationals; --approx is not accepted")
    if args.command == "sweep":
        return _sweep(args)
    if args.command == "geom":
        return dumps(_geom(args)) + "\n"
    try:
        theta = TrinoidParams.parse(args.params, allow_decimal=args.approx)
    except TrinoidError as exc:
        parser.error(str(exc))
    return dumps(HANDLERS[args.command](args, theta)) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run(args, parser)
    except TrinoidError as exc:
        sys.stderr.write(dumps(exc.to_json()) + "\n")
        return 1
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
