"""Command-line interface: ``certcub {integrate,bound,optimize,verify,convergence}``.

Exit status: 0 success, 2 input error, 3 verification failure, 4 numerical
failure. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Optional

import numpy as np

from . import __version__
from .bounds import error_bound, optimal_params
from .composite import convergence_table, doubling_levels, integrate_composite
from .core import ParamMode, ParamSet, Provenance, QuadConfig, Rectangle, validate_params
from .errors import (
    EstimationFailure,
    EvalDomainError,
    InvalidRectangle,
    OracleNonConvergent,
    OutOfDomain,
    ParamOutOfRange,
    ParseError,
    QuadratureFailure,
    StencilOutOfDomain,
    UnsupportedDerivative,
)
from .expr import mixed_partial, parse, to_bivariate
from .oracle import reference_integral, reference_kernel_integral
from .rule import cubature_value
from .supnorm import resolve_supnorm

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_NUMERIC = 4

INPUT_ERRORS = (
    ParseError,
    ParamOutOfRange,
    InvalidRectangle,
    OutOfDomain,
    UnsupportedDerivative,
    StencilOutOfDomain,
    ValueError,
)
NUMERIC_ERRORS = (QuadratureFailure, OracleNonConvergent, EvalDomainError, EstimationFailure, ArithmeticError)

RESIDUAL_TOL = 1e-8
MAX_LEVEL = 8

HELP_EPILOG = """\
expression grammar: + - * / ^ with usual precedence, ^ right-associative and
binding tighter than unary minus (-x^2 means -(x^2)); functions sin cos exp
log sqrt abs; variables x y; constants pi e.

without --supnorm every bound is printed as an estimate, never a certificate.
"""


class VerificationFailed(Exception):
    pass


# --------------------------------------------------------------------------
# record helpers


def _clean(obj: Any) -> Any:
    """JSON-safe copy: enums to values, non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (Provenance, ParamMode)):
        return obj.value
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def make_record(command: str, inputs: dict, result: dict, warnings: list) -> dict:
    return {"command": command, "inputs": inputs, "result": result, "warnings": list(warnings)}


def bound_label(provenance: Provenance) -> str:
    return "certified" if Provenance(provenance) is Provenance.USER_CERTIFIED else "estimate"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "-"
    return str(v)


def render_table(record: dict) -> str:
    out = [f"certcub {record['command']}"]
    for section in ("inputs", "result"):
        out.append(f"  {section}:")
        for k, v in record[section].items():
            if k == "rows":
                continue
            if isinstance(v, (list, tuple)):
                v = " ".join(_fmt(x) for x in v)
            out.append(f"    {k:<22} {_fmt(v)}")
    rows = record["result"].get("rows")
    if rows:
        cols = list(rows[0].keys())
        widths = [max(len(c), *(len(_fmt(r[c])) for r in rows)) for c in cols]
        out.append("  " + "  ".join(c.rjust(w) for c, w in zip(cols, widths)))
        for r in rows:
            out.append("  " + "  ".join(_fmt(r[c]).rjust(w) for c, w in zip(cols, widths)))
    for w in record["warnings"]:
        out.append(f"  warning: {w}")
    return "\n".join(out) + "\n"


def render(record: dict, fmt: str) -> str:
    record = _clean(record)
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["m", "n", "value", "certified_bound", "true_error", "ratio", "bound_label"]
        writer.writerow(cols)
        for r in record["result"]["rows"]:
            writer.writerow(["" if r[c] is None else r[c] for c in cols])
        return buf.getvalue()
    return render_table(record)


# --------------------------------------------------------------------------
# commands


def _rect(vals) -> Rectangle:
    return Rectangle(*vals)


def _read_expr(args) -> str:
    if args.expr_file:
        with open(args.expr_file, encoding="utf-8") as fh:
            return fh.read().strip()
    if args.expr is None:
        raise ValueError("an expression is required (--expr or --expr-file)")
    return args.expr


def _cfg(args) -> QuadConfig:
    return QuadConfig(args.gauss_order, args.panels)


def cmd_integrate(args) -> dict:
    text = _read_expr(args)
    rect = _rect(args.rect)
    mode = ParamMode(args.mode)
    m, n = args.grid
    theta = ParamSet(*args.theta) if args.theta else None
    if mode is ParamMode.CUSTOM and theta is None:
        raise ValueError("--mode custom requires --theta")
    f = to_bivariate(text, supnorm=args.supnorm)
    warnings = []
    if args.supnorm is None:
        how = "sampled analytic mixed partial" if f.mixed_partial is not None else "finite differences"
        warnings.append(f"bound is an estimate ({how}); pass --supnorm for a certificate")
    res = integrate_composite(f, rect, m, n, mode, _cfg(args), theta=theta, workers=args.workers)
    inputs = {
        "expr": text,
        "rect": list(args.rect),
        "mode": mode.value,
        "grid": [m, n],
        "theta": list(args.theta) if args.theta else None,
        "supnorm": args.supnorm,
        "gauss_order": args.gauss_order,
        "panels": args.panels,
        "workers": args.workers,
    }
    result = {
        "value": res.value,
        "bound": res.bound,
        "bound_label": res.bound_label,
        "supnorm_used": res.supnorm_used,
        "supnorm_provenance": res.supnorm_provenance,
        "cells": list(res.cells),
        "param_mode": res.param_mode,
    }
    return make_record("integrate", inputs, result, warnings)


def cmd_bound(args) -> dict:
    rect = _rect(args.rect)
    theta = ParamSet(*args.theta)
    bd = error_bound(rect, theta, args.supnorm)
    inputs = {"rect": list(args.rect), "theta": list(args.theta), "supnorm": args.supnorm}
    result = {
        "b1": bd.b1,
        "b2": bd.b2,
        "supnorm": bd.supnorm,
        "total": bd.total,
        "bound_label": "certified",
        "supnorm_provenance": Provenance.USER_CERTIFIED,
    }
    return make_record("bound", inputs, result, [])


def cmd_optimize(args) -> dict:
    rect = _rect(args.rect)
    theta = optimal_params(rect)
    bd = error_bound(rect, theta, 1.0)
    cor_t = rect.width**2 / 4
    cor_s = rect.height**2 / 4
    result = {
        "theta": list(theta.as_tuple()),
        "factors": [bd.b1, bd.b2],
        "midpoint_choice_factors": [cor_t, cor_s],
        "improvement_per_axis": [cor_t / bd.b1, cor_s / bd.b2],
        "improvement_total": (cor_t * cor_s) / (bd.b1 * bd.b2),
    }
    return make_record("optimize", {"rect": list(args.rect)}, result, [])


def _random_theta(rect: Rectangle, rng: np.random.Generator) -> ParamSet:
    u = rng.random(4)
    return ParamSet(
        rect.a + u[0] * (rect.mid_t - rect.a),
        rect.mid_t + u[1] * (rect.b - rect.mid_t),
        rect.c + u[2] * (rect.mid_s - rect.c),
        rect.mid_s + u[3] * (rect.d - rect.mid_s),
    )


def cmd_verify(args) -> dict:
    text = _read_expr(args)
    rect = _rect(args.rect)
    mixed_partial(parse(text))  # raises UnsupportedDerivative up front
    f = to_bivariate(text, supnorm=args.supnorm)
    cfg = _cfg(args)
    supnorm, provenance = resolve_supnorm(f, rect)
    rng = np.random.default_rng(args.seed)
    total = reference_integral(f, rect, args.tol).value
    max_res = 0.0
    bound_ok = 0
    worst_slack = math.inf
    for _ in range(args.trials):
        theta = validate_params(rect, _random_theta(rect, rng))
        value = cubature_value(f, rect, theta, cfg).value
        kernel = reference_kernel_integral(f, rect, theta, args.tol).value
        max_res = max(max_res, abs(kernel - (total - value)))
        bound = error_bound(rect, theta, supnorm).total
        err = abs(total - value)
        if err <= bound * (1 + 1e-10) + 1e-12:
            bound_ok += 1
        worst_slack = min(worst_slack, bound - err)
    passed = max_res < RESIDUAL_TOL and bound_ok == args.trials
    warnings = []
    if provenance is not Provenance.USER_CERTIFIED:
        warnings.append("bound checks use an estimated sup-norm; pass --supnorm for certified checks")
    inputs = {
        "expr": text,
        "rect": list(args.rect),
        "trials": args.trials,
        "seed": args.seed,
        "supnorm": args.supnorm,
        "tol": args.tol,
    }
    result = {
        "max_residual": max_res,
        "residual_tol": RESIDUAL_TOL,
        "bound_checks_passed": bound_ok,
        "bound_checks_total": args.trials,
        "worst_bound_slack": worst_slack if args.trials else None,
        "bound_label": bound_label(provenance),
        "supnorm_used": supnorm,
        "supnorm_provenance": provenance,
        "status": "PASS" if passed else "FAIL",
    }
    record = make_record("verify", inputs, result, warnings)
    if not passed:
        raise VerificationFailed(record)
    return record


def cmd_convergence(args) -> dict:
    text = _read_expr(args)
    rect = _rect(args.rect)
    if not 1 <= args.max_level <= MAX_LEVEL:
        raise ValueError(f"--max-level must be in [1, {MAX_LEVEL}], got {args.max_level}")
    mode = ParamMode(args.mode)
    theta = ParamSet(*args.theta) if args.theta else None
    f = to_bivariate(text, supnorm=args.supnorm)
    oracle = reference_integral(f, rect, args.tol).value
    report = convergence_table(
        f, rect, doubling_levels(args.max_level), mode, _cfg(args), oracle, theta=theta, workers=args.workers
    )
    label = bound_label(report.supnorm_provenance)
    rows = []
    for row, ratio in zip(report.rows, report.bound_ratios()):
        rows.append(
            {
                "m": row.m,
                "n": row.n,
                "value": row.value,
                "certified_bound": row.certified_bound,
                "true_error": row.true_error,
                "ratio": ratio,
                "bound_label": label,
            }
        )
    warnings = []
    if label == "estimate":
        warnings.append("bounds use an estimated sup-norm; pass --supnorm for a certificate")
    inputs = {
        "expr": text,
        "rect": list(args.rect),
        "max_level": args.max_level,
        "mode": mode.value,
        "supnorm": args.supnorm,
        "gauss_order": args.gauss_order,
        "panels": args.panels,
    }
    result = {
        "oracle_value": oracle,
        "supnorm_used": report.supnorm_used,
        "supnorm_provenance": report.supnorm_provenance,
        "bound_label": label,
        "rows": rows,
    }
    return make_record("convergence", inputs, result, warnings)


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="certcub",
        description="Certified 2-D cubature with Ostrowski-type error bounds.",
        epilog=HELP_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"certcub {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, expr=False, fmt=("table", "json")):
        sp.add_argument("--rect", nargs=4, type=float, metavar=("A", "B", "C", "D"), required=True)
        sp.add_argument("--format", choices=fmt, default="table")
        if expr:
            g = sp.add_mutually_exclusive_group(required=True)
            g.add_argument("--expr", help="function of x and y, e.g. 'sin(pi*x)*exp(y)'")
            g.add_argument("--expr-file", help="file holding the expression")
            sp.add_argument("--gauss-order", type=int, default=16)
            sp.add_argument("--panels", type=int, default=4)

    sp = sub.add_parser("integrate", help="integrate with a certified or estimated bound", epilog=HELP_EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    common(sp, expr=True)
    sp.add_argument("--mode", choices=[m.value for m in ParamMode], default="optimal")
    sp.add_argument("--grid", nargs=2, type=int, metavar=("M", "N"), default=[1, 1])
    sp.add_argument("--theta", nargs=4, type=float, metavar=("ALPHA1", "BETA1", "ALPHA2", "BETA2"),
                    help="custom-mode parameters on the whole rectangle, mapped onto each cell")
    sp.add_argument("--supnorm", type=float, help="certified bound on |d2f/dxdy|")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("bound", help="evaluate the error bound for given parameters")
    common(sp)
    sp.add_argument("--theta", nargs=4, type=float, metavar=("ALPHA1", "BETA1", "ALPHA2", "BETA2"), required=True)
    sp.add_argument("--supnorm", type=float, default=1.0)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("optimize", help="bound-minimizing parameters for a rectangle")
    common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("verify", help="check the error identity and bound on random parameters")
    common(sp, expr=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--supnorm", type=float)
    sp.add_argument("--tol", type=float, default=1e-12, help="oracle tolerance")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("convergence", help="bounds and errors on doubling grids")
    common(sp, expr=True, fmt=("table", "json", "csv"))
    sp.add_argument("--max-level", type=int, default=5)
    sp.add_argument("--mode", choices=[m.value for m in ParamMode], default="optimal")
    sp.add_argument("--theta", nargs=4, type=float, metavar=("ALPHA1", "BETA1", "ALPHA2", "BETA2"))
    sp.add_argument("--supnorm", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--tol", type=float, default=1e-12, help="oracle tolerance")
    sp.set_defaults(func=cmd_convergence)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    try:
        record = args.func(args)
    except VerificationFailed as exc:
        sys.stdout.write(render(exc.args[0], fmt if fmt != "csv" else "table"))
        return EXIT_VERIFY
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(record, fmt))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
