"""Command-line front end.

Every subcommand prints a JSON report ``{"check", "status", "detail"}`` (a
list of them for ``report-all``).  Exit codes: 0 when every asserted identity
holds, 2 when one fails, 1 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction

import mpmath

from . import checks
from .curve import (
    CP1_SQRT,
    CP1_ZHUKOVSKY,
    STANDARD,
    CurveModel,
    build_curve,
    critical_set_check,
    ramification_points,
)
from .exactalg import INF, BiPoly, fmt_scalar
from .oscillatory import LGPotential, critical_points, saddle_expand
from .reconstruct import (
    admissibility_check,
    assemble_operator,
    ck_closed_form,
    ck_limits,
    equality_check,
    newton_polygon,
    reconstruction_input,
    shifted_polynomial,
)
from .stokes import (
    euler_pairing,
    graph_to_svg,
    schroedinger_form,
    total_stokes_matrix,
    trace_stokes_graph,
)
from .toprec import (
    ExactRecursion,
    assemble_wavefunction,
    correlator_to_json,
    correlators,
    fm_recursion,
    free_energy_table,
    is_symmetric,
    numeric_correlators,
)
from .wkb import (
    annihilation_check,
    coh_limit_check,
    compare_wavefunctions,
    gkz_operator,
    hierarchy_residuals,
    onshell_j_series,
    qdiff_check,
    wkb_expand,
)

PRECISION_ENV = "GKZREC_DIGITS"
DEFAULT_DIGITS = 50

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def rational(text: str) -> Fraction:
    text = text.strip()
    if not _RATIONAL.match(text):
        raise argparse.ArgumentTypeError(f"expected an integer or p/q rational, got {text!r}")
    q = Fraction(text)
    return q


def rational_list(text: str) -> list:
    if text.strip() == "":
        return []
    return [rational(t) for t in text.split(",")]


def angle(text: str) -> float:
    """A phase: a plain number or '<r>pi' with r rational or decimal."""
    t = text.strip().replace(" ", "")
    try:
        if t.endswith("pi"):
            head = t[:-2]
            if head in ("", "+"):
                r = 1.0
            elif head == "-":
                r = -1.0
            elif _RATIONAL.match(head):
                r = float(Fraction(head))
            else:
                r = float(head)
            return r * math.pi
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad phase {text!r}") from None


def numeric(text: str):
    """Exact rational when possible, otherwise an mpmath complex."""
    t = text.strip()
    if _RATIONAL.match(t):
        return Fraction(t)
    try:
        return mpmath.mpmathify(t.replace("i", "j"))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from None


def complex_arg(text: str) -> complex:
    try:
        return complex(text.strip().replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}") from None


def _digits_default() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        d = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer number of digits") from None
    if d < 15:
        raise UsageError(f"{PRECISION_ENV} must be at least 15")
    return d


def _bits(digits: int) -> int:
    return int(round(digits * math.log2(10)))


# ---------------------------------------------------------------------------
# model handling


def _model(args) -> CurveModel:
    lam = args.lam or []
    if args.model == "cpn" and lam:
        raise UsageError("--lambda is only valid with --model ci")
    if args.model == "ci" and not lam:
        raise UsageError("--model ci needs --lambda")
    if args.N is None or args.w is None:
        raise UsageError("--N and --w are required")
    if args.n is not None and args.n != len(lam):
        raise UsageError(f"--n {args.n} does not match {len(lam)} lambda values")
    try:
        return CurveModel.make(args.N, args.w, lam)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _coordinate(args, model: CurveModel) -> str:
    choice = getattr(args, "coordinate", "auto")
    if choice != "auto":
        return {"standard": STANDARD, "cp1-sqrt": CP1_SQRT, "cp1-zhukovsky": CP1_ZHUKOVSKY}[choice]
    return STANDARD


def _involution_coordinate(model: CurveModel) -> str | None:
    if model.N == 2 and model.n == 0:
        return CP1_SQRT
    if model.N == 2 and model.n == 1:
        return CP1_ZHUKOVSKY
    return None


def _report(name: str, ok: bool, detail) -> dict:
    return {"check": name, "status": "pass" if ok else "fail", "detail": detail}


# ---------------------------------------------------------------------------
# subcommands


def cmd_curve(args) -> dict:
    model = _model(args)
    curve = build_curve(model, _coordinate(args, model), require_simple=not args.allow_nonsimple)
    detail = curve.to_json()
    ok = True
    if not args.allow_nonsimple and model.N >= 2:
        ok = critical_set_check(model, Fraction(7, 3), _bits(args.digits))
        detail["critical_set_on_curve"] = ok
    ram = ramification_points(curve, _bits(args.digits)) if not args.allow_nonsimple else []
    detail["ramification_points"] = [
        "inf" if r.z_value is INF else (fmt_scalar(r.z_value) if isinstance(r.z_value, Fraction) else mpmath.nstr(r.z_value, 15))
        for r in ram
    ]
    return _report("curve", ok, detail)


def cmd_wkb(args) -> dict:
    model = _model(args)
    curve = build_curve(model, _coordinate(args, model), require_simple=False)
    op = gkz_operator(model)
    wk = wkb_expand(op, curve, args.orders)
    ok = all(r.is_zero() for r in hierarchy_residuals(op, wk))
    return _report("wkb", ok, {"operator": str(op), "coordinate": curve.kind, "S": wk.to_json(), "hierarchy_residuals_vanish": ok})


def cmd_toprec(args) -> dict:
    model = _model(args)
    kind = _involution_coordinate(model)
    if kind is not None and args.x is None:
        curve = build_curve(model, kind)
        items = correlators(curve, args.g_max, args.n_max)
        sym = all(is_symmetric(c) for _, _, c in items)
        return _report("toprec", sym, {
            "coordinate": kind,
            "correlators": [correlator_to_json(g, n, c) for g, n, c in items],
            "symmetric": sym,
        })
    if args.x is None:
        raise UsageError("numeric topological recursion needs --x")
    curve = build_curve(model)
    bits = _bits(args.digits)
    res = numeric_correlators(curve, args.g_max, args.n_max, args.x, bits)
    with mpmath.workprec(bits):
        out = {
            str(m): [{"z": mpmath.nstr(z, 20), "F": mpmath.nstr(v, 20)} for z, v in vals] for m, vals in sorted(res.items())
        }
    return _report("toprec", True, {"coordinate": curve.kind, "x": str(args.x), "F_m": out})


def cmd_compare(args) -> dict:
    model = _model(args)
    kind = _involution_coordinate(model)
    if kind is not None:
        curve = build_curve(model, kind)
        wk = wkb_expand(gkz_operator(model), curve, args.orders)
        rec = fm_recursion(curve, max(args.orders, 2))
        cmp = compare_wavefunctions(wk, rec, args.orders)
        tab = free_energy_table(curve, args.orders, ExactRecursion(curve)) if args.orders >= 2 else None
        agree = True
        if tab is not None:
            fw = assemble_wavefunction(tab, args.orders)
            agree = all(fw[m].derivative == rec[m] for m in range(args.orders + 1))
        rows = [{"m": r["m"], "F_m_equals_S_m": r["equal"], **({"normalizable": r["normalizable"]} if "normalizable" in r else {})} for r in cmp["rows"]]
        return _report("compare", cmp["equal"] and agree, {
            "coordinate": kind,
            "rows": rows,
            "correlator_path_matches_recursion": agree,
        })
    if args.x is None:
        raise UsageError("curves without a global involution are compared numerically; pass --x")
    bits = _bits(args.digits)
    curve = build_curve(model)
    wk = wkb_expand(gkz_operator(model), curve, args.orders)
    n_max = args.orders + 1
    g_max = (args.orders + 1) // 2
    res = numeric_correlators(curve, g_max, n_max, args.x, bits)
    tol = mpmath.mpf(2) ** (-(bits * 3) // 5)
    rows = []
    ok = True
    with mpmath.workprec(bits):
        for m in sorted(res):
            if m > args.orders:
                continue
            S = wk.S[m].normalized(INF)
            err = max(abs(v - S.rational(z)) for z, v in res[m])
            good = err < tol
            rows.append({"m": m, "max_abs_error": mpmath.nstr(err, 5), "F_m_equals_S_m": bool(good)})
            ok &= good
    return _report("compare", ok, {"coordinate": curve.kind, "x": str(args.x), "rows": rows})


def cmd_reconstruct(args) -> dict:
    model = _model(args)
    curve = build_curve(model)
    data = reconstruction_input(curve)
    ck = ck_limits(curve, data)
    ck_ok = ck == ck_closed_form(model.N, model.n, model.lam)
    op = assemble_operator(curve, data)
    eq = equality_check(op, gkz_operator(model))
    return _report("reconstruct", ck_ok and eq["equal"], {
        "alpha_floor": data.alpha_floor,
        "C_k": [fmt_scalar(c) for c in ck],
        "C_k_closed_form": ck_ok,
        "operator": str(op),
        "equal_up_to_constant": eq,
    })


def _parse_poly(text: str) -> BiPoly:
    terms = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        if len(parts) != 3:
            raise UsageError("--poly expects 'k,i,c;...' (x-exponent, Y-exponent, coefficient)")
        k, i = int(parts[0]), int(parts[1])
        terms[(k, i)] = rational(parts[2])
    return BiPoly(terms)


def cmd_newton(args) -> dict:
    if args.poly:
        P = _parse_poly(args.poly)
    else:
        model = _model(args)
        P = shifted_polynomial(build_curve(model).A)
    poly = newton_polygon(P)
    adm = admissibility_check(poly, P)
    detail = poly.to_json(adm)
    detail["interior_points"] = [list(p) for p in poly.interior_points()]
    detail["singular_at_origin"] = P.coeff(0, 0) == 0 and P.coeff(1, 0) == 0 and P.coeff(0, 1) == 0
    return _report("newton", True, detail)


def cmd_jcheck(args) -> dict:
    model = _model(args)
    op = gkz_operator(model)
    pivots = [args.pivot] if args.pivot is not None else list(range(model.N))
    rows = []
    ok = True
    for p in pivots:
        if not 0 <= p < model.N:
            raise UsageError(f"pivot {p} out of range")
        res = annihilation_check(op, onshell_j_series(model, p, args.d_max), model.w[p], args.d_max)
        rows.append({"pivot": p, **res})
        ok &= res["ok"]
    return _report("jcheck", ok, {"operator": str(op), "d_max": args.d_max, "pivots": rows})


def cmd_qcheck(args) -> dict:
    if args.N is None:
        raise UsageError("--N is required")
    n = args.n or 0
    a = qdiff_check(args.N, n, args.d_max)
    b = qdiff_check(args.N, n, args.d_max, half_power_prefix=False)
    detail = {"N": args.N, "n": n, "d_max": args.d_max, "prefix_shifted_x": a, "plain": b}
    ok = a["ok"] and b["ok"]
    if args.coh_limit:
        res = coh_limit_check(args.N, n, Fraction(1, 2), Fraction(1, 3), [1e-2, 1e-3, 1e-4], _bits(args.digits))
        detail["cohomological_limit"] = res
        ok &= res["ok"]
    return _report("qcheck", ok, detail)


def cmd_saddle(args) -> dict:
    model = _model(args)
    if args.x is None:
        raise UsageError("saddle needs --x")
    bits = _bits(args.digits)
    pot = LGPotential(model)
    out = []
    ok = True
    with mpmath.workprec(bits):
        for cp in critical_points(pot, args.x, bits):
            ex = saddle_expand(pot, cp, args.m_max, bits)
            out.append(ex.to_json())
            ok &= ex.precision_ok
    return _report("saddle", ok, {"x": str(args.x), "critical_points": out})


def cmd_stokes_graph(args) -> dict:
    data = schroedinger_form(args.w0, args.w1)
    opts = {"tol": args.tol}
    if args.max_arc is not None:
        opts["max_arc"] = args.max_arc
    g = trace_stokes_graph(data, args.theta, **opts)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(graph_to_svg(g))
    ok = all(cv.end != "collapse" for cv in g.curves) and all(cv.invariant_error < 1e-6 for cv in g.curves)
    detail = g.to_json()
    if not args.points:
        for cv in detail["curves"]:
            cv["points"] = cv["points"][:: max(1, len(cv["points"]) // 40)]
    detail["data"] = data.to_json()
    return _report("stokes-graph", ok, detail)


def cmd_stokes_total(args) -> dict:
    gap = args.w0 - args.w1
    if gap == 0:
        raise UsageError("w0 = w1: the turning point coalesces with the pole")
    if args.hbar is None:
        S = total_stokes_matrix(args.region)
        det = S.det()
        ok = det == 1
        detail = S.to_json()
        detail["det"] = str(det)
        detail["V"] = f"2*pi*i*({fmt_scalar(gap)})/hbar"
        return _report("stokes-total", ok, detail)
    hbar = args.hbar
    if hbar == 0:
        raise UsageError("hbar must be nonzero")
    V = 2j * math.pi * float(gap) / hbar
    try:
        S = total_stokes_matrix(args.region, V)
    except ArithmeticError as e:
        return _report("stokes-total", False, {"region": args.region, "error": str(e)})
    det = S.det()
    ok = abs(det - 1) < 1e-12
    detail = S.to_json()
    detail["det_residual"] = abs(det - 1)
    detail["V"] = {"re": V.real, "im": V.imag}
    if args.region == "x3":
        chi = euler_pairing(args.w0, args.w1, hbar)
        m = S.entries[1][0]
        detail["euler_pairing"] = {"re": chi.real, "im": chi.imag}
        ok &= abs(m / -1j - chi) < 1e-12 * max(1.0, abs(chi))
    return _report("stokes-total", ok, detail)


def cmd_report_all(args) -> list:
    names = sorted(checks.CHECKS)
    if args.only:
        unknown = [n for n in args.only if n not in checks.CHECKS]
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}")
        names = sorted(args.only)
    return [checks.CHECKS[n]() for n in names]


# ---------------------------------------------------------------------------
# parser


def _add_model(p, need_model: bool = True):
    p.add_argument("--model", choices=["cpn", "ci"], default="cpn", help="projective space or complete intersection")
    p.add_argument("--N", type=int)
    p.add_argument("--n", type=int, help="number of lambda parameters (checked against --lambda)")
    p.add_argument("--w", type=rational_list, help="comma-separated rationals w_0..w_{N-1}")
    p.add_argument("--lambda", dest="lam", type=rational_list, help="comma-separated rationals lambda_1..lambda_n")


def build_parser(digits: int) -> argparse.ArgumentParser:
    parser = _Parser(prog="gkzrec", description="GKZ curves, topological recursion, quantum curves and exact WKB data")
    parser.add_argument("--digits", type=int, default=digits, help=f"working precision in decimal digits (env {PRECISION_ENV})")
    parser.add_argument("--out", help="write the JSON report to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("curve", help="parametrize the GKZ curve")
    _add_model(p)
    p.add_argument("--coordinate", choices=["auto", "standard", "cp1-sqrt", "cp1-zhukovsky"], default="auto")
    p.add_argument("--allow-nonsimple", action="store_true")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("wkb", help="WKB hierarchy S_0..S_m")
    _add_model(p)
    p.add_argument("--coordinate", choices=["auto", "standard", "cp1-sqrt", "cp1-zhukovsky"], default="auto")
    p.add_argument("--orders", type=int, default=4)
    p.set_defaults(func=cmd_wkb)

    p = sub.add_parser("toprec", help="correlators from topological recursion")
    _add_model(p)
    p.add_argument("--g-max", type=int, default=1)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--x", type=numeric, help="evaluation point for the numeric engine")
    p.set_defaults(func=cmd_toprec)

    p = sub.add_parser("compare", help="F_m from topological recursion against S_m")
    _add_model(p)
    p.add_argument("--orders", type=int, default=4)
    p.add_argument("--x", type=numeric, help="evaluation point when no exact engine applies")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reconstruct", help="rebuild the quantum curve from the classical curve")
    _add_model(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("newton", help="Newton polygon and admissibility")
    _add_model(p)
    p.add_argument("--poly", help="P(x, Y) as 'k,i,c;...' terms c x^k Y^i")
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("jcheck", help="GKZ operator annihilates the on-shell J-function")
    _add_model(p)
    p.add_argument("--d-max", type=int, default=12)
    p.add_argument("--pivot", type=int)
    p.set_defaults(func=cmd_jcheck)

    p = sub.add_parser("qcheck", help="q-difference annihilator of the brane series")
    p.add_argument("--N", type=int)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--d-max", type=int, default=8)
    p.add_argument("--coh-limit", action="store_true", help="also measure the cohomological-limit convergence")
    p.set_defaults(func=cmd_qcheck)

    p = sub.add_parser("saddle", help="saddle-point coefficients of the mirror integral")
    _add_model(p)
    p.add_argument("--x", type=numeric)
    p.add_argument("--m-max", type=int, default=2, choices=[1, 2])
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("stokes-graph", help="trace the Stokes graph of the CP^1 Schroedinger equation")
    p.add_argument("--w0", type=rational, required=True)
    p.add_argument("--w1", type=rational, required=True)
    p.add_argument("--theta", type=angle, required=True, help="phase, e.g. 0.5pi or 1/2pi or 1.2")
    p.add_argument("--svg", help="write an SVG drawing of the graph")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-arc", type=float)
    p.add_argument("--points", action="store_true", help="emit every sample instead of a thinned polyline")
    p.set_defaults(func=cmd_stokes_graph)

    p = sub.add_parser("stokes-total", help="total Stokes matrix at the base points x1, x2, x3")
    p.add_argument("--region", choices=["x1", "x2", "x3"], required=True)
    p.add_argument("--w0", type=rational, default=Fraction(1))
    p.add_argument("--w1", type=rational, default=Fraction(0))
    p.add_argument("--hbar", type=complex_arg, help="numeric hbar; omit for entries in e^V")
    p.set_defaults(func=cmd_stokes_total)

    p = sub.add_parser("report-all", help="run every acceptance check")
    p.add_argument("--only", nargs="*", help="restrict to these check names")
    p.set_defaults(func=cmd_report_all)
    return parser


def _passed(report) -> bool:
    if isinstance(report, list):
        return all(r["status"] == "pass" for r in report)
    return report["status"] == "pass"


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        digits = _digits_default()
    except UsageError as e:
        sys.stderr.write(f"gkzrec: {e}\n")
        return 1
    parser = build_parser(digits)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    if args.digits < 15:
        sys.stderr.write("gkzrec: --digits must be at least 15\n")
        return 1
    try:
        with mpmath.workprec(_bits(args.digits)):
            report = args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"gkzrec: error: {e}\n")
        return 1
    except ValueError as e:
        # invalid model parameters, rejected curves and similar input problems
        sys.stderr.write(f"gkzrec: error: {e}\n")
        return 1
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if _passed(report) else 2


def main() -> None:
    raise SystemExit(run())
