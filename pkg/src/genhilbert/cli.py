"""Command-line entry point.

Exit codes: 0 when a verification is consistent (or a plain command succeeds),
2 when the signals contradict the theorem, 1 on usage or numeric errors.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import harness
from .carleson import carleson_constant
from .coefficients import gamma_ratio_table
from .errors import (DomainError, InvalidMeasureError, NoPredictionError, NumericError,
                     PreconditionError)
from .measures import from_json, load_measure
from .operators import (HankelEntrySpec, apply_H, apply_I, pairing_lhs, pairing_rhs)
from .series import (CoefficientSeries, DiskGrid, bergman_a1_norm, bloch_norm,
                     growth_bound_check, make_family)

EXIT_OK, EXIT_ERROR, EXIT_INCONSISTENT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output -------------------------------------------------------------------------

def fmt(x):
    """17 significant digits; non-finite values spelled as Python's json does."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent=0):
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [dumps(v, indent + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- argument helpers -------------------------------------------------------------

def _measure(args):
    if args.measure and args.measure_json:
        raise UsageError("give either --measure or --measure-json, not both")
    if args.measure:
        try:
            return load_measure(args.measure)
        except OSError as exc:
            raise UsageError(f"cannot read measure file: {exc}") from exc
    if args.measure_json:
        return from_json(args.measure_json)
    raise UsageError("a measure is required (--measure FILE or --measure-json TEXT)")


def _series_arg(text, what):
    try:
        pairs = json.loads(text)
        coeffs = [complex(*p) if isinstance(p, list) else complex(p) for p in pairs]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{what} must be a JSON array of numbers or [re, im] pairs") from exc
    return CoefficientSeries(np.array(coeffs, dtype=complex))


def _function(args, prefix=""):
    coeffs = getattr(args, prefix + "coeffs")
    family = getattr(args, prefix + "family")
    if coeffs is not None:
        return _series_arg(coeffs, f"--{prefix}coeffs".replace("_", "-"))
    if family is None:
        raise UsageError(f"give --{prefix}family or --{prefix}coeffs".replace("_", "-"))
    param = getattr(args, prefix + "param")
    return make_family(family, param, args.beta, args.truncation)


def _add_measure(p):
    p.add_argument("--measure", help="measure JSON file")
    p.add_argument("--measure-json", help="inline measure JSON")


def _add_function(p, prefix=""):
    flag = "--" + prefix.replace("_", "-")
    p.add_argument(flag + "family", dest=prefix + "family",
                   choices=["constant_one", "power_beta", "log_e", "log_sq", "bergman_peak"])
    p.add_argument(flag + "param", dest=prefix + "param", type=float, default=0.5)
    p.add_argument(flag + "coeffs", dest=prefix + "coeffs",
                   help="JSON array of coefficients (numbers or [re, im])")


def _complex_list(values):
    out = []
    for v in values:
        try:
            out.append(complex(v.replace(" ", "")))
        except ValueError as exc:
            raise UsageError(f"cannot parse complex number {v!r}") from exc
    return np.array(out)


# -- subcommands ------------------------------------------------------------------

def cmd_entries(args):
    spec = HankelEntrySpec(_measure(args), args.alpha)
    mat = spec.matrix(args.n, args.k)
    if args.format == "json":
        return dumps({"alpha": args.alpha, "entries": mat.tolist()})
    rows = [(n, k, float(mat[n, k])) for n in range(args.n + 1) for k in range(args.k + 1)]
    return to_csv(["n", "k", "value"], rows)


def _grid_points(args):
    grid = DiskGrid(i_max=args.i_max, n_angles=args.angles, subdivisions=1, r_cap=args.r_cap)
    return grid.points


def cmd_apply(args):
    mu = _measure(args)
    f = _function(args)
    app = apply_H(HankelEntrySpec(mu, args.alpha), f, args.n_out, args.k_in, tol=args.tol)
    if args.format == "json":
        out = app.output
        return dumps({
            "truncation": list(app.truncation),
            "residual_bound": app.residual_bound,
            "tail_bound": out.tail_bound,
            "coefficients": [[c.real, c.imag] for c in out.coefficients],
        })
    z = _complex_list(args.z) if args.z else _grid_points(args)
    h = app.evaluate(z)
    i = apply_I(mu, args.alpha, f, z)
    rows = [(float(w.real), float(w.imag), float(a.real), float(a.imag),
             float(b.real), float(b.imag), float(abs(a - b))) for w, a, b in zip(z, h, i)]
    return to_csv(["z_re", "z_im", "H_value_re", "H_value_im", "I_value_re", "I_value_im",
                   "gap"], rows)


def cmd_integral(args):
    mu = _measure(args)
    f = _function(args)
    z = _complex_list(args.z)
    vals = np.atleast_1d(apply_I(mu, args.alpha, f, z, order=args.order, beta=args.beta))
    if args.format == "json":
        return dumps({"z": [[w.real, w.imag] for w in z],
                      "value": [[v.real, v.imag] for v in vals]})
    rows = [(float(w.real), float(w.imag), float(v.real), float(v.imag)) for w, v in zip(z, vals)]
    return to_csv(["z_re", "z_im", "I_value_re", "I_value_im"], rows)


def cmd_pairing(args):
    mu = _measure(args)
    f = _function(args)
    g = _function(args, "g_")
    lhs = pairing_lhs(mu, args.alpha, f, g, args.r, weight_exponent=args.weight_exponent)
    rhs = pairing_rhs(mu, f, g, args.r)
    res = {"r": args.r, "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag],
           "gap": abs(lhs - rhs)}
    if args.format == "csv":
        return to_csv(["r", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"],
                      [(args.r, lhs.real, lhs.imag, rhs.real, rhs.imag, abs(lhs - rhs))])
    return dumps(res)


def cmd_norms(args):
    f = _function(args)
    grid = DiskGrid(i_max=args.i_max, n_angles=args.angles)
    res = {
        "alpha": args.alpha,
        "bloch_seminorm": bloch_norm(f, args.alpha, grid),
        "bloch_full": bloch_norm(f, args.alpha, grid, full=True),
        "growth_ratio": growth_bound_check(f, args.alpha, grid),
    }
    if args.bergman:
        res["bergman_a1"] = bergman_a1_norm(f, grid)
    if args.format == "csv":
        return to_csv(list(res), [tuple(float(v) for v in res.values())])
    return dumps(res)


def cmd_classify(args):
    report = carleson_constant(_measure(args), args.s, args.log_exponent)
    if args.csv or args.format == "csv":
        return to_csv(["t", "tail", "ratio"], report.probe_points)
    return dumps(report.to_dict())


def cmd_verify(args):
    mu = _measure(args)
    tid = args.theorem_id
    timing = not args.no_timing
    if tid not in harness.THEOREMS:
        raise UsageError(f"unknown theorem id {tid!r}; expected one of "
                         + ", ".join(harness.THEOREMS))
    if tid == "T3.1":
        if args.gamma is None:
            raise UsageError("T3.1 needs --gamma")
        rep = harness.run_necessity_harness(mu, args.alpha, args.beta, args.gamma, timing=timing)
    elif tid == "Qp":
        rep = harness.run_qp_harness(mu, args.alpha, args.beta, timing=timing)
    elif args.mode == "compact":
        rep = harness.run_compactness_proxy(tid, mu, args.alpha, args.beta, timing=timing)
    else:
        if args.beta is None:
            raise UsageError(f"{tid} needs --beta")
        rep = harness.run_boundedness_harness(tid, mu, args.alpha, args.beta, timing=timing)
    d = rep.to_dict()
    if args.format == "csv":
        flat = [(k, v) for k, v in d["signals"].items() if not isinstance(v, (list, dict))]
        rows = [("theorem_id", tid), ("consistent", str(rep.consistent).lower()),
                ("verdict", rep.verdict),
                ("empirical_growth_exponent", float(rep.empirical_growth_exponent))]
        rows += [(k, float(v) if isinstance(v, float) else str(v).lower()) for k, v in flat]
        text = to_csv(["signal", "value"], rows)
    else:
        text = dumps(d)
    return text, (EXIT_OK if rep.consistent else EXIT_INCONSISTENT)


def cmd_gamma_table(args):
    table = gamma_ratio_table(args.alpha, args.n)
    if args.format == "json":
        return dumps({"alpha": args.alpha, "values": table.values.tolist(),
                      "log_values": table.log_values.tolist()})
    return to_csv(["n", "c_n"], [(n, float(v)) for n, v in enumerate(table.values)])


def build_parser():
    parser = _Parser(prog="genhilbert", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--truncation", type=int, default=None,
                        help="number of Taylor terms for family members (default: automatic)")
    common.add_argument("--no-timing", action="store_true",
                        help="report runtime_ms as 0 so reports are byte-identical")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("entries", parents=[common], help="Hankel entries c_n m_{n+k}")
    _add_measure(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_entries, default_format="csv")

    p = sub.add_parser("apply", parents=[common], help="coefficient form vs integral form")
    _add_measure(p)
    _add_function(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--n-out", type=int, default=4096)
    p.add_argument("--k-in", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--z", action="append", help="evaluation point, e.g. 0.3+0.4j")
    p.add_argument("--i-max", type=int, default=3)
    p.add_argument("--angles", type=int, default=8)
    p.add_argument("--r-cap", type=float, default=0.9)
    p.set_defaults(func=cmd_apply, default_format="csv")

    p = sub.add_parser("integral", parents=[common], help="integral form at points")
    _add_measure(p)
    _add_function(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--order", type=int, choices=[0, 1], default=0)
    p.add_argument("--z", action="append", required=True)
    p.set_defaults(func=cmd_integral, default_format="csv")

    p = sub.add_parser("pairing", parents=[common], help="area pairing vs radial pairing")
    _add_measure(p)
    _add_function(p)
    _add_function(p, "g_")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--weight-exponent", type=float, default=None)
    p.set_defaults(func=cmd_pairing, default_format="json")

    p = sub.add_parser("norms", parents=[common], help="grid norm estimates of a function")
    _add_function(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--bergman", action="store_true", help="also compute the A^1 norm")
    p.add_argument("--i-max", type=int, default=10)
    p.add_argument("--angles", type=int, default=256)
    p.set_defaults(func=cmd_norms, default_format="json")

    p = sub.add_parser("classify", parents=[common], help="Carleson classification")
    _add_measure(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--log-exponent", type=float, default=0.0)
    p.add_argument("--csv", action="store_true", help="emit the probe table as CSV")
    p.set_defaults(func=cmd_classify, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="run a theorem harness")
    p.add_argument("theorem_id")
    _add_measure(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--mode", choices=["bounded", "compact"], default="bounded")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("gamma-table", parents=[common], help="c_n(alpha) for n = 0..N")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_gamma_table, default_format="csv")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.format is None:
            args.format = args.default_format
        if args.command == "verify" and args.theorem_id == "Qp" and args.beta is None:
            args.beta = 0.5
        result = args.func(args)
        text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
        _emit(args, text)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except InvalidMeasureError as exc:
        print(f"invalid measure: {exc}", file=sys.stderr)
    except NoPredictionError as exc:
        print(f"out of range: {exc}", file=sys.stderr)
    except (DomainError, PreconditionError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
