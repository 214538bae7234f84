"""Theta-operators, the WKB hierarchy on a parametrized curve, and the
hypergeometric series checks (on-shell J-function and the brane q-series).

Operators are normal ordered with theta = hbar x d/dx on the right:
``sum_k c_k(x, hbar) theta^k`` where c_k is a BiPoly in (x, hbar).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from .curve import CurveModel, SpectralCurve
from .exactalg import (
    INF,
    Antiderivative,
    BiPoly,
    MultiSeries,
    RatFunc,
    Z,
    fmt_scalar,
    scalar,
    to_mp,
)

X = BiPoly.var(0)
HBAR = BiPoly.var(1)


class ThetaOperator:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [c if isinstance(c, BiPoly) else BiPoly.const(c) for c in coeffs]
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def theta(cls) -> "ThetaOperator":
        return cls([BiPoly(), BiPoly.const(1)])

    @classmethod
    def mult(cls, c) -> "ThetaOperator":
        return cls([c if isinstance(c, BiPoly) else BiPoly.const(c)])

    def __eq__(self, o) -> bool:
        return isinstance(o, ThetaOperator) and self.coeffs == o.coeffs

    def __repr__(self) -> str:
        parts = [f"({c})*th^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(parts) or "0"

    def __add__(self, o):
        if not isinstance(o, ThetaOperator):
            o = ThetaOperator.mult(o)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + [BiPoly()] * (n - len(self.coeffs))
        b = o.coeffs + [BiPoly()] * (n - len(o.coeffs))
        return ThetaOperator([p + q for p, q in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return ThetaOperator([-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        """Operator composition, normal ordered via theta x^i = x^i (theta + i hbar)."""
        if not isinstance(o, ThetaOperator):
            o = ThetaOperator.mult(o)
        out = [BiPoly() for _ in range(self.order + o.order + 1)]
        for k, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for l, b in enumerate(o.coeffs):
                for (i, j), v in b.terms.items():
                    # theta^k x^i hbar^j = x^i hbar^j (theta + i hbar)^k
                    for r in range(k + 1):
                        c = comb(k, r) * Fraction(i) ** (k - r) * v
                        if c:
                            mono = BiPoly({(i, j + k - r): c})
                            out[r + l] = out[r + l] + a * mono
        return ThetaOperator(out)

    def __rmul__(self, o):
        return ThetaOperator.mult(o) * self

    def __pow__(self, k: int):
        r = ThetaOperator.mult(1)
        for _ in range(k):
            r = r * self
        return r

    def act_on_power(self) -> dict:
        """Apply to x^s with symbolic s; returns {i: BiPoly(s, hbar)} for the x^(s+i) terms."""
        s = BiPoly.var(0)
        h = BiPoly.var(1)
        out: dict = {}
        for k, c in enumerate(self.coeffs):
            for (i, j), v in c.terms.items():
                term = (h * s) ** k * (h ** j) * v
                out[i] = out.get(i, BiPoly()) + term
        return {i: p for i, p in out.items() if not p.is_zero()}

    def to_json(self) -> dict:
        rows = []
        for k, c in enumerate(self.coeffs):
            for (i, j), v in sorted(c.terms.items()):
                rows.append([k, i, j, fmt_scalar(v)])
        return {"order": self.order, "coeffs": rows}

    @classmethod
    def from_json(cls, d: dict) -> "ThetaOperator":
        cs = [BiPoly() for _ in range(d["order"] + 1)]
        for k, i, j, v in d["coeffs"]:
            cs[k] = cs[k] + BiPoly({(i, j): scalar(v)})
        return cls(cs)


def linear_theta(shift) -> ThetaOperator:
    """theta + shift, where shift is a BiPoly or scalar."""
    return ThetaOperator([shift if isinstance(shift, BiPoly) else BiPoly.const(shift), BiPoly.const(1)])


def gkz_operator(model: CurveModel) -> ThetaOperator:
    left = ThetaOperator.mult(1)
    for wi in model.w:
        left = left * linear_theta(BiPoly.const(-wi))
    right = ThetaOperator.mult(X)
    for la in model.lam:
        right = right * linear_theta(HBAR - la)
    return left - right


def semiclassical_limit(op: ThetaOperator) -> BiPoly:
    """theta -> y, hbar -> 0; variables (x, y)."""
    terms: dict = {}
    for k, c in enumerate(op.coeffs):
        for (i, j), v in c.terms.items():
            if j == 0:
                terms[(i, k)] = terms.get((i, k), 0) + v
    return BiPoly(terms)


# ---------------------------------------------------------------------------
# WKB hierarchy


@dataclass
class WKBSeries:
    curve: SpectralCurve
    y: list  # y_m(z), m = 0..m_max
    dS: list  # dS_m/dz
    S: list  # Antiderivative per m
    branch_note: dict = field(default_factory=dict)

    def to_json(self) -> list:
        return [{"m": m, "dSm_dz": d.to_json(), "Sm": s.to_json()} for m, (d, s) in enumerate(zip(self.dS, self.S))]


def _series_mul(a: list, b: list, order: int) -> list:
    out = [RatFunc() for _ in range(order + 1)]
    for i, u in enumerate(a[: order + 1]):
        if u.is_zero():
            continue
        for j in range(order + 1 - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + u * b[j]
    return out


def _apply_to_ansatz(op: ThetaOperator, ys: list, x: RatFunc, euler: RatFunc, order: int) -> list:
    """hbar-expansion of exp(-S/hbar) op exp(S/hbar) 1 with x dS/dx = sum hbar^m y_m."""
    # c_k(x(z), hbar) as series in hbar
    cser = []
    for c in op.coeffs:
        s = [RatFunc() for _ in range(order + 1)]
        for (i, j), v in c.terms.items():
            if j <= order:
                s[j] = s[j] + (x ** i) * v
        cser.append(s)
    R = [RatFunc.const(1)] + [RatFunc() for _ in range(order)]
    total = _series_mul(cser[0], R, order)
    for k in range(1, len(op.coeffs)):
        nxt = _series_mul(ys, R, order)
        for m in range(order):
            if not R[m].is_zero():
                nxt[m + 1] = nxt[m + 1] + euler * R[m].deriv()
        R = nxt
        prod = _series_mul(cser[k], R, order)
        total = [a + b for a, b in zip(total, prod)]
    return total


def wkb_expand(op: ThetaOperator, curve: SpectralCurve, m_max: int) -> WKBSeries:
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    A = semiclassical_limit(op)
    ref = curve.A
    # compare up to an overall constant
    (i0, j0), v0 = max(ref.terms.items())
    if A.coeff(i0, j0) == 0 or A.scale(Fraction(1) / A.coeff(i0, j0)) != ref.scale(Fraction(1) / v0):
        raise ValueError("semiclassical limit of the operator is not the curve's defining polynomial")
    x = curve.x
    euler = x / x.deriv()  # x d/dx expressed in z
    dA = A.diff(1)(x, curve.y)
    if dA.is_zero():
        raise ValueError("dA/dy vanishes identically on the curve")
    ys = [curve.y] + [RatFunc() for _ in range(m_max)]
    if _apply_to_ansatz(op, ys, x, euler, 0)[0] != 0:
        raise AssertionError("order-0 equation not satisfied by y(z)")
    for m in range(1, m_max + 1):
        resid = _apply_to_ansatz(op, ys, x, euler, m)[m]
        ys[m] = -resid / dA
    dlog = x.deriv() / x
    dS = [ym * dlog for ym in ys]
    S = [Antiderivative.of(f) for f in dS]
    note = {"coordinate": curve.kind, "z_star": "inf" if curve.z_star is INF else fmt_scalar(curve.z_star)}
    return WKBSeries(curve, ys, dS, S, note)


def hierarchy_residuals(op: ThetaOperator, wkb: WKBSeries) -> list:
    """Order-by-order residuals with all computed y_m substituted (should all be zero)."""
    m_max = len(wkb.y) - 1
    x = wkb.curve.x
    return _apply_to_ansatz(op, wkb.y, x, x / x.deriv(), m_max)


def compare_wavefunctions(wkb: WKBSeries, fm: list, m_max: int, z_star=None) -> dict:
    z_star = wkb.curve.z_star if z_star is None else z_star
    rows = []
    ok = True
    for m in range(min(m_max, len(fm) - 1, len(wkb.dS) - 1) + 1):
        equal = wkb.dS[m] == fm[m]
        row = {"m": m, "equal": equal}
        if not equal:
            row["dS_dz"] = str(wkb.dS[m])
            row["dF_dz"] = str(fm[m])
        if m >= 2:
            s = wkb.S[m]
            finite = s.exact and not s.logs and s.limit(z_star) is not INF
            row["normalizable"] = finite
            equal = equal and finite
        ok = ok and equal
        rows.append(row)
    return {"equal": ok, "rows": rows}


# ---------------------------------------------------------------------------
# on-shell J-function


HB = RatFunc.z()  # hbar as the variable of RatFunc


def onshell_j_series(model: CurveModel, pivot: int, d_max: int) -> list:
    wp = model.w[pivot]
    for j, wj in enumerate(model.w):
        if j != pivot and wj == wp:
            raise ValueError(f"degenerate pivot: w_{j} = w_{pivot}")
    coeffs = [RatFunc.const(1)]
    for d in range(1, d_max + 1):
        num = RatFunc.const(1)
        for la in model.lam:
            num = num * (HB * d + (wp - la))
        den = RatFunc.const(1)
        for wj in model.w:
            den = den * (HB * d + (wp - wj))
        coeffs.append(coeffs[-1] * num / den)
    return coeffs


def annihilation_residuals(op: ThetaOperator, series: list, pivot_value) -> list:
    """Coefficient of x^{w_p/hbar + d} in op applied to x^{w_p/hbar} sum c_d x^d."""
    wp = scalar(pivot_value)
    out = []
    for d in range(len(series)):
        acc = RatFunc()
        for k, c in enumerate(op.coeffs):
            for (i, j), v in c.terms.items():
                if i > d:
                    continue
                eig = HB * (d - i) + wp
                acc = acc + (HB ** j) * (eig ** k) * series[d - i] * v
        out.append(acc)
    return out


def annihilation_check(op: ThetaOperator, series: list, pivot_value, d_max: int | None = None) -> dict:
    res = annihilation_residuals(op, series[: (d_max + 1) if d_max is not None else None], pivot_value)
    for d, r in enumerate(res):
        if not r.is_zero():
            return {"ok": False, "degree": d, "residual": str(r)}
    return {"ok": True, "degree": None}


# ---------------------------------------------------------------------------
# brane q-series


@dataclass
class QSeries:
    """Coefficients as (numerator, denominator) polynomials in (r, Qw_1.., Ql_1..), q = r^2."""

    N: int
    n: int
    numerators: list
    denominators: list
    half_power_prefix: bool

    @property
    def num_vars(self) -> int:
        return self.N + self.n


_BIG = 10 ** 9


def _qvar(nv: int, i: int):
    return MultiSeries.variable(nv, i, _BIG)


def _qconst(nv: int, c):
    return MultiSeries.constant(nv, c, _BIG)


def _q_power(nv: int, k: int):
    e = [0] * nv
    e[0] = 2 * k
    return MultiSeries(nv, {tuple(e): 1}, _BIG)


def _r_power(nv: int, k: int):
    e = [0] * nv
    e[0] = k
    return MultiSeries(nv, {tuple(e): 1}, _BIG)


def brane_series(N: int, n: int, d_max: int, half_power_prefix: bool = True) -> QSeries:
    """Brane partition function coefficients with Qw_0 = 1 and symbolic remaining parameters."""
    nv = N + n
    one = _qconst(nv, 1)
    qw = [one] + [_qvar(nv, i) for i in range(1, N)]
    ql = [_qvar(nv, N + a) for a in range(n)]
    nums, dens = [one], [one]
    for d in range(1, d_max + 1):
        num, den = nums[-1], dens[-1]
        for a in range(n):
            num = num * (one - ql[a] * _q_power(nv, d - 1))
        for i in range(N):
            den = den * (one - qw[i] * _q_power(nv, d))
        nums.append(num)
        dens.append(den)
    if half_power_prefix:
        nums = [p * _r_power(nv, d) for d, p in enumerate(nums)]
    return QSeries(N, n, nums, dens, half_power_prefix)


def qdiff_residuals(series: QSeries, lambda_shift=None) -> list:
    """Cross-multiplied residual of prod(1 - Qw y) Z = x prod(1 - Ql y) Z per degree.

    With the q^{d/2} prefix the shift operator x is taken as q^{1/2} x.
    ``lambda_shift`` perturbs Ql_1 on the operator side only.
    """
    nv = series.num_vars
    N, n = series.N, series.n
    one = _qconst(nv, 1)
    qw = [one] + [_qvar(nv, i) for i in range(1, N)]
    ql = [_qvar(nv, N + a) for a in range(n)]
    if lambda_shift is not None and n:
        ql[0] = ql[0] + lambda_shift
    out = []
    for d in range(len(series.numerators)):
        lhs_factor = one
        for i in range(N):
            lhs_factor = lhs_factor * (one - qw[i] * _q_power(nv, d))
        lhs_num = lhs_factor * series.numerators[d]
        lhs_den = series.denominators[d]
        if d == 0:
            rhs_num, rhs_den = _qconst(nv, 0), one
        else:
            f = one
            for a in range(n):
                f = f * (one - ql[a] * _q_power(nv, d - 1))
            if series.half_power_prefix:
                f = f * _r_power(nv, 1)
            rhs_num = f * series.numerators[d - 1]
            rhs_den = series.denominators[d - 1]
        out.append((lhs_num * rhs_den - rhs_num * lhs_den))
    return out


def qdiff_check(N: int, n: int, d_max: int, lambda_shift=None, half_power_prefix: bool = True) -> dict:
    series = brane_series(N, n, d_max, half_power_prefix)
    for d, r in enumerate(qdiff_residuals(series, lambda_shift)):
        if r.terms:
            return {"ok": False, "degree": d, "residual_terms": len(r.terms)}
    return {"ok": True, "degree": None}


def _default_params(N: int, n: int):
    w = [Fraction(0)] + [Fraction(3 * i + 1, i + 2) for i in range(1, N)]
    lam = [Fraction(-(2 * a + 5), a + 3) for a in range(n)]
    return w, lam


def k_coefficient(N: int, n: int, d: int, w, lam, hbar, beta, x):
    """K-theoretic coefficient of degree d at the cohomological-limit parametrization."""
    hbar = mpmath.mpmathify(hbar)
    beta = mpmath.mpf(beta)
    q = mpmath.exp(-beta * hbar)
    qw = [mpmath.exp(-beta * (to_mp(w[0]) - to_mp(wi))) for wi in w]
    ql = [mpmath.exp(-beta * (to_mp(w[0]) - to_mp(la) + hbar)) for la in lam]
    c = mpmath.mpf(1)
    for m in range(1, d + 1):
        for a in range(n):
            c *= 1 - ql[a] * q ** (m - 1)
        for i in range(N):
            c /= 1 - qw[i] * q ** m
    bx = beta ** (N - n) * x
    return c * (mpmath.sqrt(q) * bx) ** d


def coh_limit_check(N: int, n: int, x_val, hbar_val, beta_list, precision: int = 166, d_max: int = 3, w=None, lam=None) -> dict:
    if any(b2 >= b1 for b1, b2 in zip(beta_list, beta_list[1:])) or min(beta_list) <= 0:
        raise ValueError("beta_list must be positive and decreasing")
    dw, dl = _default_params(N, n)
    w = [scalar(a) for a in (w if w is not None else dw)]
    lam = [scalar(a) for a in (lam if lam is not None else dl)]
    model = CurveModel.make(N, w, lam)
    js = onshell_j_series(model, 0, d_max)
    rows = []
    with mpmath.workprec(precision):
        h = mpmath.mpmathify(hbar_val)
        x = mpmath.mpmathify(x_val)
        for d in range(d_max + 1):
            c = js[d]
            target = to_mp(c.num.coeff(0)) if d == 0 else c.num(h) / c.den(h) * x ** d
            errs = []
            vals = []
            for b in beta_list:
                v = k_coefficient(N, n, d, w, lam, h, b, x)
                vals.append(v)
                errs.append(abs(v - target) / abs(target))
            row = {"d": d, "errors": [float(e) for e in errs]}
            if d == 0:
                row["exact"] = all(e == 0 for e in errs)
            else:
                lb = [mpmath.log(b) for b in beta_list]
                le = [mpmath.log(e) for e in errs]
                # least squares slope of log error against log beta
                mb = sum(lb) / len(lb)
                me = sum(le) / len(le)
                slope = sum((a - mb) * (b - me) for a, b in zip(lb, le)) / sum((a - mb) ** 2 for a in lb)
                b1, b2 = mpmath.mpf(beta_list[-2]), mpmath.mpf(beta_list[-1])
                rich = (b1 * vals[-1] - b2 * vals[-2]) / (b1 - b2)
                row["slope"] = float(slope)
                row["richardson_error"] = float(abs(rich - target) / abs(target))
            rows.append(row)
    ok = all(r.get("exact", True) for r in rows) and all(abs(r["slope"] - 1) <= 0.1 for r in rows if "slope" in r)
    return {"ok": ok, "rows": rows}
