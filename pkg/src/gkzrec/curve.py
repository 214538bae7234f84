"""GKZ spectral curves: rational parametrizations, ramification data and the
critical-set characterization of the curve."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .exactalg import (
    INF,
    BiPoly,
    Poly,
    RatFunc,
    TruncatedSeries,
    Z,
    det_laplace,
    fmt_scalar,
    isqrt_fraction,
    resultant,
    scalar,
    squarefree_part,
    sylvester,
    to_mp,
)

PROJECTIVE = "projective_space"
COMPLETE_INTERSECTION = "complete_intersection_degree_one"

STANDARD = "standard"
CP1_SQRT = "cp1_sqrt"
CP1_ZHUKOVSKY = "cp1_zhukovsky"


class DegenerateCurveError(ValueError):
    pass


class NonSimpleRamificationError(ValueError):
    pass


class NotRationalSquareError(ValueError):
    """The Zhukovsky coordinate needs an irrational square root."""


def elementary_symmetric(vals: Sequence[Fraction], k: int) -> Fraction:
    e = [Fraction(1)] + [Fraction(0)] * len(vals)
    for v in vals:
        for j in range(len(vals), 0, -1):
            e[j] += e[j - 1] * v
    return e[k] if 0 <= k <= len(vals) else Fraction(0)


@dataclass(frozen=True)
class CurveModel:
    family: str
    N: int
    w: tuple
    lam: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(scalar(a) for a in self.w))
        object.__setattr__(self, "lam", tuple(scalar(a) for a in self.lam))
        if self.family not in (PROJECTIVE, COMPLETE_INTERSECTION):
            raise ValueError(f"unknown family {self.family!r}")
        if self.N < 1 or len(self.w) != self.N:
            raise ValueError("need N >= 1 equivariant parameters w_0..w_{N-1}")
        if self.family == PROJECTIVE and self.lam:
            raise ValueError("projective space has no lambda parameters")
        if self.n >= self.N:
            raise ValueError("need n < N")

    @property
    def n(self) -> int:
        return len(self.lam)

    @classmethod
    def make(cls, N: int, w, lam=()) -> "CurveModel":
        fam = COMPLETE_INTERSECTION if len(lam) else PROJECTIVE
        return cls(fam, N, tuple(w), tuple(lam))

    def closed_form_poly(self) -> BiPoly:
        """prod_i (y - w_i) - x prod_a (y - lambda_a), variables (x, y)."""
        y = BiPoly.var(1)
        x = BiPoly.var(0)
        left = BiPoly.const(1)
        for wi in self.w:
            left = left * (y - wi)
        right = x
        for la in self.lam:
            right = right * (y - la)
        return left - right

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "N": self.N,
            "n": self.n,
            "w": [fmt_scalar(a) for a in self.w],
            "lambda": [fmt_scalar(a) for a in self.lam],
        }


@dataclass
class SpectralCurve:
    model: CurveModel
    x: RatFunc
    y: RatFunc
    A: BiPoly
    kind: str
    z_star: object
    notes: dict = field(default_factory=dict)

    @property
    def global_involution(self) -> bool:
        return self.kind in (CP1_SQRT, CP1_ZHUKOVSKY)

    def dx(self) -> RatFunc:
        return self.x.deriv()

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "A": self.A.to_list(),
            "coordinate": self.kind,
            "z_star": "inf" if self.z_star is INF else fmt_scalar(self.z_star),
            "notes": self.notes,
        }


def eliminate(x: RatFunc, y: RatFunc) -> BiPoly:
    """Defining polynomial of the image of z -> (x(z), y(z)) by a resultant in z."""
    X, Y = BiPoly.var(0), BiPoly.var(1)
    deg1 = max(x.num.degree, x.den.degree)
    deg2 = max(y.num.degree, y.den.degree)
    p = [X * x.den.coeff(k) - x.num.coeff(k) for k in range(deg1 + 1)]
    q = [Y * y.den.coeff(k) - y.num.coeff(k) for k in range(deg2 + 1)]
    return det_laplace(sylvester(p, q))


def _normalize_defining(A: BiPoly, N: int) -> BiPoly:
    if A.coeff(0, N):
        return A.normalized(0, N)
    i, j = max(A.terms)
    return A.normalized(i, j)


def build_curve(model: CurveModel, kind: str = STANDARD, require_simple: bool = True) -> SpectralCurve:
    """Parametrize the GKZ curve of ``model`` in one of the three coordinates.

    ``require_simple`` rejects curves whose ramification is not simple (they
    can still be used for the WKB hierarchy with the flag off).
    """
    notes: dict = {}
    if kind == STANDARD:
        x = RatFunc(Poly.from_roots(model.w), Poly.from_roots(model.lam))
        y = Z
        z_star = INF
    elif kind == CP1_SQRT:
        if model.N != 2 or model.n != 0:
            raise ValueError("cp1_sqrt needs N=2, n=0")
        w0, w1 = model.w
        lam_ = (w0 - w1) ** 2 / 4
        x = Z * Z - lam_
        y = Z + (w0 + w1) / 2
        z_star = INF
        notes["Lambda"] = fmt_scalar(lam_)
    elif kind == CP1_ZHUKOVSKY:
        if model.N != 2 or model.n != 1:
            raise ValueError("cp1_zhukovsky needs N=2, n=1")
        w0, w1 = model.w
        (l1,) = model.lam
        s = isqrt_fraction((l1 - w0) * (l1 - w1))
        if s is None:
            raise NotRationalSquareError(
                "(lambda_1 - w_0)(lambda_1 - w_1) is not a rational square; use the numeric backend"
            )
        if s == 0:
            raise DegenerateCurveError("lambda_1 coincides with an equivariant parameter")
        a_plus_b = -2 * (w0 + w1 - 2 * l1)
        b_minus_a = 4 * s
        # orientation chosen so that x(-1) = infinity is the divisor endpoint
        u = (Z - 1) / (Z + 1)
        x = a_plus_b / 2 + (u + 1 / u) * (b_minus_a / 4)
        y = (x + (w0 + w1)) * Fraction(1, 2) + (u - 1 / u) * (b_minus_a / 8)
        z_star = Fraction(-1)
        notes["sqrt"] = fmt_scalar(s)
        notes["orientation"] = "u=(z-1)/(z+1)"
    else:
        raise ValueError(f"unknown coordinate kind {kind!r}")

    dxn = x.deriv().num
    dyn = y.deriv().num
    if dxn.degree > 0 and dyn.degree > 0 and resultant(dxn, dyn) == 0:
        raise DegenerateCurveError("dx and dy share a zero; parameters are not generic")
    if dxn.is_zero():
        raise DegenerateCurveError("x is constant")
    if require_simple and dxn.degree > 0:
        if squarefree_part(dxn).degree != dxn.degree:
            raise NonSimpleRamificationError("ramification is not simple")
    A = _normalize_defining(eliminate(x, y), model.N)
    closed = model.closed_form_poly()
    if A != closed:
        raise AssertionError(f"elimination disagrees with the closed form: {A} vs {closed}")
    if A(x, y) != 0:
        raise AssertionError("A(x(z), y(z)) does not vanish")
    return SpectralCurve(model, x, y, A, kind, z_star, notes)


@dataclass
class RamificationPoint:
    z_value: object
    simple: bool
    involution: object  # "reflect" for z -> -z, else a TruncatedSeries in t = z - q

    def sigma_at(self, t):
        if self.involution == "reflect":
            return -t
        acc = 0
        for k in range(self.involution.order, self.involution.min_exp - 1, -1):
            acc = acc * t + self.involution[k]
        return acc * t ** self.involution.min_exp if self.involution.min_exp else acc


def _taylor_at(x: RatFunc, q, order: int) -> list:
    """Numeric Taylor coefficients of x at a complex point q."""
    num = x.num
    den = x.den

    def shifted(p: Poly) -> list:
        # coefficients of p(q + t) by repeated synthetic division
        c = [to_mp(a) for a in p.c]
        out = []
        for _ in range(len(c)):
            acc = 0
            rem = []
            for a in reversed(c):
                acc = acc * q + a
                rem.append(acc)
            out.append(rem[-1])
            c = list(reversed(rem[:-1]))
        return out

    n = shifted(num) + [0] * (order + 1)
    d = shifted(den) + [0] * (order + 1)
    out = []
    for k in range(order + 1):
        s = n[k]
        for j in range(1, k + 1):
            s -= d[j] * out[k - j]
        out.append(s / d[0])
    return out


def _compose_series(f: list, s: list, order: int) -> list:
    """f(s(t)) truncated at t^order, f given by coefficients, s(0) = 0."""
    acc = [0] * (order + 1)
    for a in reversed(f):
        nxt = [0] * (order + 1)
        for i, u in enumerate(acc):
            if u:
                for j in range(1, order + 1 - i):
                    if s[j]:
                        nxt[i + j] += u * s[j]
        nxt[0] += a
        acc = nxt
    return acc


def involution_series(x: RatFunc, q, order: int) -> list:
    """Coefficients of sigma(q + t) - q solving x(sigma) = x, by Newton iteration."""
    c = _taylor_at(x, q, order + 2)
    f = [0] + c[1:]  # x(q + t) - x(q)
    fp = [(k + 1) * f[k + 1] for k in range(len(f) - 1)]
    s = [0, -1] + [0] * (order - 1)
    target = f[: order + 2]
    prec = 2
    while True:
        m = order + 1
        xs = _compose_series(f, s + [0], m)
        dxs = _compose_series(fp, s + [0], m)
        resid = [xs[k] - target[k] for k in range(m + 1)]
        # resid has valuation >= 2 and dxs has valuation 1: divide both by t
        r = resid[1:]
        d = dxs[1:]
        corr = [0] * order
        for k in range(order):
            acc = r[k + 1] if k + 1 < len(r) else 0
            for j in range(1, k + 1):
                acc -= d[j] * corr[k - j]
            corr[k] = acc / d[0]
        s = [s[0]] + [s[k] - corr[k - 1] for k in range(1, order + 1)]
        if prec >= order + 1:
            break
        prec *= 2
    return s


def ramification_points(curve: SpectralCurve, precision: int = 166, order: int = 12) -> list[RamificationPoint]:
    """Zeros of dx/dz with their local involutions."""
    if curve.kind == CP1_SQRT:
        return [RamificationPoint(Fraction(0), True, "reflect")]
    if curve.kind == CP1_ZHUKOVSKY:
        # x is even in z, so z = 0 and z = infinity are both fixed by z -> -z
        return [RamificationPoint(Fraction(0), True, "reflect"), RamificationPoint(INF, True, "reflect")]
    dxn = curve.x.deriv().num
    if squarefree_part(dxn).degree != dxn.degree:
        raise NonSimpleRamificationError("ramification is not simple")
    out = []
    with mpmath.workprec(precision):
        roots = mpmath.polyroots([to_mp(a) for a in reversed(dxn.c)], maxsteps=200, extraprec=precision)
        for r in roots:
            r = mpmath.mpc(r)
            # exclude zeros of dx that coincide with poles of x
            if abs(curve.x.den(r)) < mpmath.mpf(2) ** (-precision // 2):
                continue
            ser = involution_series(curve.x, r, order)
            out.append(RamificationPoint(r, True, TruncatedSeries(r, 0, ser, order)))
    return out


def sheet_points(curve: SpectralCurve, xval, precision: int = 166) -> list:
    """All solutions z of x(z) = xval."""
    with mpmath.workprec(precision):
        xv = to_mp(xval)
        num = [to_mp(a) for a in curve.x.num.c]
        den = [to_mp(a) for a in curve.x.den.c]
        n = max(len(num), len(den))
        num += [0] * (n - len(num))
        den += [0] * (n - len(den))
        coeffs = [a - b * xv for a, b in zip(num, den)]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return list(mpmath.polyroots(list(reversed(coeffs)), maxsteps=300, extraprec=precision))


def critical_points_u1(model: CurveModel, xval, precision: int = 166) -> list:
    """Roots u1 of prod_i (u1 + w1 - w_i) - x prod_a (u1 + w1 - lambda_a)."""
    N = model.N
    if N < 2:
        raise ValueError("the mirror potential needs N >= 2")
    w1 = model.w[1]
    with mpmath.workprec(precision):
        left = Poly([1])
        for wi in model.w:
            left = left * Poly([w1 - wi, 1])
        right = Poly([1])
        for la in model.lam:
            right = right * Poly([w1 - la, 1])
        if isinstance(xval, (int, Fraction)):
            p = left - right * scalar(xval)
            if p.degree <= 2:
                exact = _rational_quadratic_roots(p)
                if exact is not None:
                    return exact
            coeffs = [to_mp(a) for a in reversed(p.c)]
        else:
            c1 = [to_mp(a) for a in left.c]
            c2 = [to_mp(a) * xval for a in right.c] + [0] * (len(c1) - len(right.c))
            coeffs = list(reversed([a - b for a, b in zip(c1, c2)]))
        return list(mpmath.polyroots(coeffs, maxsteps=300, extraprec=2 * precision))


def _rational_quadratic_roots(p: Poly):
    if p.degree == 1:
        return [-p.coeff(0) / p.coeff(1)]
    a, b, c = p.coeff(2), p.coeff(1), p.coeff(0)
    r = isqrt_fraction(b * b - 4 * a * c)
    if r is None:
        return None
    return sorted({(-b + r) / (2 * a), (-b - r) / (2 * a)}, reverse=True)


def critical_coordinates(model: CurveModel, u1):
    """(u_1..u_{N-1}, v_1..v_n) from u1."""
    w1 = model.w[1]
    us = [u1 + w1 - wi for wi in model.w[1:]]
    vs = [u1 + w1 - la for la in model.lam]
    return us, vs


def critical_set_check(model: CurveModel, x_sample, precision: int = 166) -> bool:
    """Every critical point of the mirror potential maps onto A(x, y) = 0."""
    x_sample = scalar(x_sample) if isinstance(x_sample, (int, str)) else x_sample
    if x_sample == 0:
        raise ValueError("x must be nonzero")
    roots = critical_points_u1(model, x_sample, precision)
    A = model.closed_form_poly()
    digits = int(precision * 0.30103)
    with mpmath.workprec(precision):
        tol = mpmath.mpf(10) ** (-(digits - 10))
        for u1 in roots:
            us, vs = critical_coordinates(model, u1)
            prod_u = 1
            for u in us:
                prod_u = prod_u * u
            prod_v = 1
            for v in vs:
                prod_v = prod_v * v
            if prod_u == 0:
                raise ValueError("degenerate critical point")
            if isinstance(prod_u, Fraction) and isinstance(prod_v, Fraction):
                t = prod_v * x_sample / prod_u
            else:
                t = to_mp(prod_v) * to_mp(x_sample) / to_mp(prod_u)
            y = t + model.w[0]
            val = A(x_sample, y)
            if isinstance(val, Fraction):
                if val != 0:
                    return False
            elif abs(val) > tol * (1 + abs(x_sample)) ** model.N:
                return False
    return True
