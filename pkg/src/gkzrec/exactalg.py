"""Exact rational arithmetic: dense polynomials, reduced rational functions,
truncated Laurent series, sparse multivariate series and big-float helpers.

Scalars are ``fractions.Fraction``.  Polynomials store coefficients low to
high degree.  Rational functions are kept in canonical form (coprime, monic
denominator) so that equality is structural.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath

DEFAULT_PREC = 166

Number = Union[int, Fraction]


class _Infinity:
    """Marker for the point at infinity."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"


INF = _Infinity()


def scalar(v) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"not an exact scalar: {v!r}")


def fmt_scalar(q: Fraction) -> str:
    q = scalar(q)
    return f"{q.numerator}/{q.denominator}"


def to_mp(q):
    """Convert an exact scalar (or an mpmath value) to mpmath."""
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    if isinstance(q, int):
        return mpmath.mpf(q)
    return q


def mp_to_fraction(v) -> Fraction:
    """Exact binary value of an mpf."""
    v = mpmath.mpf(v)
    if not v:
        return Fraction(0)
    sign, man, exp, _ = v._mpf_
    return (-1) ** sign * Fraction(man) * Fraction(2) ** exp


def bigcomplex(re, im=0):
    return mpmath.mpc(to_mp(re), to_mp(im))


# ---------------------------------------------------------------------------
# polynomials


_ZERO = Fraction(0)
_ONE = Fraction(1)


class Poly:
    """Dense univariate polynomial over Q, coefficients low to high."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [a if isinstance(a, Fraction) else scalar(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def _raw(cls, c: list) -> "Poly":
        while c and not c[-1]:
            c.pop()
        p = object.__new__(cls)
        p.c = tuple(c)
        return p

    @classmethod
    def const(cls, a) -> "Poly":
        return cls([a])

    @classmethod
    def monomial(cls, k: int, a=1) -> "Poly":
        return cls([0] * k + [a])

    @classmethod
    def from_roots(cls, roots: Sequence) -> "Poly":
        p = cls([1])
        for r in roots:
            p = p * cls([-scalar(r), 1])
        return p

    # basic queries
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lc(self) -> Fraction:
        return self.c[-1] if self.c else _ZERO

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if 0 <= k < len(self.c) else _ZERO

    def valuation(self) -> int:
        for i, a in enumerate(self.c):
            if a:
                return i
        raise ValueError("valuation of the zero polynomial")

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == Poly([other]).c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if not a:
                continue
            s = str(a)
            if k == 0:
                parts.append(s)
            elif k == 1:
                parts.append(f"{s}*z")
            else:
                parts.append(f"{s}*z^{k}")
        return " + ".join(parts)

    # arithmetic
    @staticmethod
    def _coerce(o) -> "Poly":
        if isinstance(o, Poly):
            return o
        if isinstance(o, (int, Fraction)):
            return Poly([o])
        return NotImplemented

    def __add__(self, o):
        o = Poly._coerce(o)
        if o is NotImplemented:
            return o
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        c = list(a)
        for i, v in enumerate(b):
            c[i] += v
        return Poly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-a for a in self.c])

    def __sub__(self, o):
        o = Poly._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            if not o:
                return Poly()
            return Poly._raw([a * o for a in self.c])
        if not isinstance(o, Poly):
            return NotImplemented
        a, b = self.c, o.c
        if not a or not b:
            return Poly()
        c = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return Poly._raw(c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        r, b = Poly([1]), self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __divmod__(self, o: "Poly"):
        o = Poly._coerce(o)
        if not o.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        db = len(o.c) - 1
        inv = 1 / o.c[-1]
        if len(r) - 1 < db:
            return Poly(), self
        q = [_ZERO] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            a = r[k]
            if a:
                f = a * inv
                q[k - db] = f
                for j, v in enumerate(o.c):
                    r[k - db + j] -= f * v
        return Poly._raw(q), Poly._raw(r[:db])

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def exact_div(self, o: "Poly") -> "Poly":
        q, r = divmod(self, o)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def __call__(self, v):
        acc = 0
        if isinstance(v, (int, Fraction, Poly, RatFunc)):
            for a in reversed(self.c):
                acc = acc * v + a
            return acc
        for a in reversed(self.c):
            acc = acc * v + to_mp(a)
        return acc

    def deriv(self) -> "Poly":
        return Poly._raw([k * self.c[k] for k in range(1, len(self.c))])

    def integ(self) -> "Poly":
        return Poly._raw([_ZERO] + [a / (k + 1) for k, a in enumerate(self.c)])

    def monic(self) -> "Poly":
        if not self.c:
            return self
        if self.c[-1] == 1:
            return self
        inv = 1 / self.c[-1]
        return Poly._raw([a * inv for a in self.c])

    def compose(self, p: "Poly") -> "Poly":
        acc = Poly()
        for a in reversed(self.c):
            acc = acc * p + a
        return acc

    def shift(self, a) -> "Poly":
        """p(z + a)."""
        return self.compose(Poly([scalar(a), 1]))

    def reflect(self) -> "Poly":
        """p(-z)."""
        return Poly._raw([a if k % 2 == 0 else -a for k, a in enumerate(self.c)])

    def reverse(self, n: int | None = None) -> "Poly":
        """z^n p(1/z) with n defaulting to the degree."""
        n = self.degree if n is None else n
        c = list(self.c) + [_ZERO] * max(0, n + 1 - len(self.c))
        return Poly._raw(list(reversed(c[: n + 1])))

    def content_int(self) -> "Poly":
        """Scale to a primitive integer polynomial with positive leading coefficient."""
        if not self.c:
            return self
        den = 1
        for a in self.c:
            den = den * a.denominator // math.gcd(den, a.denominator)
        ints = [int(a * den) for a in self.c]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        s = 1 if ints[-1] > 0 else -1
        return Poly._raw([Fraction(s * v // g) for v in ints])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    while b.c:
        a, b = b, (a % b).monic() if b.c else b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = Poly([1]), Poly()
    t0, t1 = Poly(), Poly([1])
    while r1.c:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0.c:
        return r0, s0, t0
    inv = 1 / r0.lc
    return r0 * inv, s0 * inv, t0 * inv


def poly_diophantine(a: Poly, b: Poly, c: Poly):
    """Solve s*a + t*b = c with deg s < deg b (requires gcd(a, b) | c)."""
    g, s, t = poly_xgcd(a, b)
    q, r = divmod(c, g)
    if r.c:
        raise ArithmeticError("gcd does not divide right-hand side")
    s = s * q
    t = t * q
    if b.degree > 0:
        k, s = divmod(s, b)
        t = t + k * a
    return s, t


def resultant(a: Poly, b: Poly) -> Fraction:
    """Univariate resultant by the Euclidean scheme."""
    if not a.c or not b.c:
        return _ZERO
    m, n = a.degree, b.degree
    if n == 0:
        return b.lc ** m
    if m == 0:
        return a.lc ** n
    r = a % b
    if not r.c:
        return _ZERO
    k = r.degree
    sign = -1 if (m * n) % 2 else 1
    return sign * b.lc ** (m - k) * resultant(b, r)


def squarefree_part(p: Poly) -> Poly:
    return p.exact_div(poly_gcd(p, p.deriv())).monic()


def lagrange_interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Poly:
    """Newton divided differences, exact."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = Poly([coef[-1]])
    for i in range(n - 2, -1, -1):
        p = p * Poly([-xs[i], 1]) + coef[i]
    return p


def rational_roots(p: Poly, digits: int = 60) -> list[Fraction]:
    """Distinct rational roots of p.

    Candidates come from high-precision numerical roots and are certified by
    exact evaluation, so every returned value is a genuine root.
    """
    if p.degree < 1:
        return []
    q = squarefree_part(p)
    found: list[Fraction] = []
    while q.c and q.coeff(0) == 0:
        found.append(_ZERO)
        q = q.exact_div(Poly([0, 1]))
    if q.degree < 1:
        return found
    if q.degree == 1:
        return found + [-q.coeff(0) / q.coeff(1)]
    with mpmath.workdps(digits + 20):
        coeffs = [to_mp(a) for a in reversed(q.c)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * digits)
        for r in roots:
            if abs(mpmath.im(r)) > mpmath.mpf(10) ** (-digits // 2):
                continue
            cand = mp_to_fraction(mpmath.re(r)).limit_denominator(10 ** (digits // 2 - 2))
            if q(cand) == 0 and cand not in found:
                found.append(cand)
    return found


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced rational function num/den with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, _reduced: bool = False):
        if not isinstance(num, Poly):
            num = Poly([num]) if isinstance(num, (int, Fraction, str)) else Poly(num)
        if not isinstance(den, Poly):
            den = Poly([den]) if isinstance(den, (int, Fraction, str)) else Poly(den)
        if not den.c:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if not num.c:
                den = Poly([1])
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lc = den.lc
            if lc != 1:
                inv = 1 / lc
                num = num * inv
                den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def z(cls) -> "RatFunc":
        return cls(Poly([0, 1]), Poly([1]), True)

    @classmethod
    def const(cls, a) -> "RatFunc":
        return cls(Poly([scalar(a)]), Poly([1]), True)

    @staticmethod
    def _coerce(o) -> "RatFunc":
        if isinstance(o, RatFunc):
            return o
        if isinstance(o, Poly):
            return RatFunc(o, Poly([1]), True)
        if isinstance(o, (int, Fraction)):
            return RatFunc(Poly([o]), Poly([1]), True)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.num.c

    def __bool__(self) -> bool:
        return bool(self.num.c)

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other) -> bool:
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den.degree == 0:
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    def __add__(self, o):
        o = RatFunc._coerce(o)
        if o is NotImplemented:
            return o
        if not o.num.c:
            return self
        if not self.num.c:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        g = poly_gcd(self.den, o.den)
        if g.degree == 0:
            return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den, True)
        d1 = self.den.exact_div(g)
        d2 = o.den.exact_div(g)
        num = self.num * d2 + o.num * d1
        if not num.c:
            return RatFunc()
        h = poly_gcd(num, g)
        if h.degree > 0:
            num = num.exact_div(h)
            g = g.exact_div(h)
        return RatFunc(num, d1 * d2 * g, True)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, True)

    def __sub__(self, o):
        o = RatFunc._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            if not o:
                return RatFunc()
            return RatFunc(self.num * o, self.den, True)
        o = RatFunc._coerce(o)
        if o is NotImplemented:
            return o
        if not self.num.c or not o.num.c:
            return RatFunc()
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1, d2 = (self.num.exact_div(g1), o.den.exact_div(g1)) if g1.degree > 0 else (self.num, o.den)
        n2, d1 = (o.num.exact_div(g2), self.den.exact_div(g2)) if g2.degree > 0 else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.lc
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        return RatFunc(num, den, True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.c:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num, True).__normalize_lc()

    def __normalize_lc(self) -> "RatFunc":
        lc = self.den.lc
        if lc == 1:
            return self
        inv = 1 / lc
        return RatFunc(self.num * inv, self.den * inv, True)

    def __truediv__(self, o):
        o = RatFunc._coerce(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        return RatFunc._coerce(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, True)

    def deriv(self) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.deriv() * d - n * d.deriv(), d * d)

    def __call__(self, v):
        if isinstance(v, (int, Fraction)):
            dv = self.den(v)
            if dv == 0:
                raise ZeroDivisionError("evaluation at a pole")
            return self.num(v) / dv
        if isinstance(v, RatFunc):
            return self.compose(v)
        return self.num(v) / self.den(v)

    def compose(self, r: "RatFunc") -> "RatFunc":
        """self(r(z)) via homogenized evaluation."""
        r = RatFunc._coerce(r)
        n = max(self.num.degree, self.den.degree, 0)
        a, b = r.num, r.den
        pows_a = [Poly([1])]
        pows_b = [Poly([1])]
        for _ in range(n):
            pows_a.append(pows_a[-1] * a)
            pows_b.append(pows_b[-1] * b)

        def hom(p: Poly) -> Poly:
            acc = Poly()
            for k, c in enumerate(p.c):
                if c:
                    acc = acc + pows_a[k] * pows_b[n - k] * c
            return acc

        return RatFunc(hom(self.num), hom(self.den))

    def reflect(self) -> "RatFunc":
        """f(-z)."""
        return RatFunc(self.num.reflect(), self.den.reflect())

    def valuation(self, point=_ZERO) -> int:
        """Order of vanishing at a rational point or at INF (in 1/z)."""
        if not self.num.c:
            raise ValueError("valuation of zero")
        if point is INF:
            return self.den.degree - self.num.degree
        q = scalar(point)
        return _val_at(self.num, q) - _val_at(self.den, q)

    def limit(self, point=INF):
        """Finite limit value, or INF when there is a pole."""
        if not self.num.c:
            return _ZERO
        v = self.valuation(point)
        if v < 0:
            return INF
        if v > 0:
            return _ZERO
        if point is INF:
            return self.num.lc / self.den.lc
        return self(scalar(point))

    def to_json(self) -> dict:
        return {"num": [fmt_scalar(a) for a in self.num.c], "den": [fmt_scalar(a) for a in self.den.c]}

    @classmethod
    def from_json(cls, d: dict) -> "RatFunc":
        return cls(Poly([scalar(a) for a in d["num"]]), Poly([scalar(a) for a in d["den"]]))


def _val_at(p: Poly, q: Fraction) -> int:
    if q == 0:
        return p.valuation()
    k = 0
    lin = Poly([-q, 1])
    while True:
        d, r = divmod(p, lin)
        if r.c:
            return k
        p = d
        k += 1


Z = RatFunc.z()


# ---------------------------------------------------------------------------
# truncated Laurent series


class TruncatedSeries:
    """Laurent series sum_{k=min_exp}^{order} c_k t^k around ``base``.

    At a finite base t = z - base; at INF, t = 1/z.  Coefficients may be exact
    or mpmath values.
    """

    __slots__ = ("base", "min_exp", "coeffs", "order")

    def __init__(self, base, min_exp: int, coeffs: Sequence, order: int):
        coeffs = list(coeffs)
        need = order - min_exp + 1
        if need < 0:
            min_exp, need = order + 1, 0
        if len(coeffs) < need:
            coeffs = coeffs + [0] * (need - len(coeffs))
        self.base = base
        self.min_exp = min_exp
        self.coeffs = coeffs[:need]
        self.order = order

    def __getitem__(self, k: int):
        if k > self.order:
            raise IndexError(f"exponent {k} beyond truncation order {self.order}")
        if k < self.min_exp:
            return 0
        return self.coeffs[k - self.min_exp]

    def __repr__(self) -> str:
        return f"TruncatedSeries(base={self.base}, min_exp={self.min_exp}, coeffs={self.coeffs}, order={self.order})"

    def _same_base(self, o: "TruncatedSeries"):
        if o.base is not self.base and o.base != self.base:
            raise ValueError("series around different points")

    def __add__(self, o):
        if not isinstance(o, TruncatedSeries):
            return self + TruncatedSeries(self.base, 0, [o], self.order)
        self._same_base(o)
        order = min(self.order, o.order)
        lo = min(self.min_exp, o.min_exp)
        return TruncatedSeries(self.base, lo, [self[k] + o[k] for k in range(lo, order + 1)], order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.base, self.min_exp, [-c for c in self.coeffs], self.order)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, TruncatedSeries):
            return TruncatedSeries(self.base, self.min_exp, [c * o for c in self.coeffs], self.order)
        self._same_base(o)
        lo = self.min_exp + o.min_exp
        order = min(self.order + o.min_exp, o.order + self.min_exp)
        out = [0] * max(order - lo + 1, 0)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                k = i + j
                if k >= len(out):
                    break
                out[k] += a * b
        return TruncatedSeries(self.base, lo, out, order)

    __rmul__ = __mul__

    def shift_exponent(self, k: int) -> "TruncatedSeries":
        """Multiply by t^k."""
        return TruncatedSeries(self.base, self.min_exp + k, self.coeffs, self.order + k)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.base, self.min_exp, self.coeffs, min(order, self.order))

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if c:
                return self.min_exp + i
        return None

    def inverse(self) -> "TruncatedSeries":
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("inverse of a zero series")
        rel = self.order - v
        a = [self[v + k] for k in range(rel + 1)]
        b = [0] * (rel + 1)
        b[0] = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
        for k in range(1, rel + 1):
            s = 0
            for j in range(1, k + 1):
                s += a[j] * b[k - j]
            b[k] = -s * b[0]
        return TruncatedSeries(self.base, -v, b, -v + rel)

    def __truediv__(self, o):
        if isinstance(o, TruncatedSeries):
            return self * o.inverse()
        return self * (1 / o if not isinstance(o, int) else Fraction(1, o))

    def deriv(self) -> "TruncatedSeries":
        """d/dt."""
        return TruncatedSeries(
            self.base,
            self.min_exp - 1,
            [(self.min_exp + i) * c for i, c in enumerate(self.coeffs)],
            self.order - 1,
        )

    def compose_poly_at_zero(self, s: "TruncatedSeries") -> "TruncatedSeries":
        """f(s(t)) for a power series f (min_exp >= 0) and s with s(0) = 0."""
        if self.min_exp < 0:
            raise ValueError("composition needs a power series")
        sv = s.valuation()
        if sv is not None and sv < 1:
            raise ValueError("inner series must vanish at t = 0")
        order = s.order if sv is None else min(s.order, self.order * sv if sv else s.order)
        order = s.order
        acc = TruncatedSeries(s.base, 0, [self[self.order]] if self.order >= 0 else [], order)
        for k in range(self.order - 1, -1, -1):
            acc = acc * s + TruncatedSeries(s.base, 0, [self[k]], order)
        return acc.truncate(order)


def _series_of_poly(p: Poly, order: int):
    return [p.coeff(k) for k in range(order + 1)]


def _power_series_div(num: list, den: list, n: int) -> list:
    """First n coefficients of num/den with den[0] != 0."""
    out = []
    inv = 1 / den[0]
    for k in range(n):
        s = num[k] if k < len(num) else _ZERO
        for j in range(1, min(k, len(den) - 1) + 1):
            s -= den[j] * out[k - j]
        out.append(s * inv)
    return out


def laurent_expand(f: RatFunc, point, order: int) -> TruncatedSeries:
    """Exact Laurent expansion of f at a rational point or at INF (in 1/z)."""
    f = RatFunc._coerce(f)
    if point is INF:
        dn, dd = f.num.degree, f.den.degree
        num = f.num.reverse()
        den = f.den.reverse()
        # f(1/t) = t^(dd - dn) num(t)/den(t), den(0) = lc != 0
        shift = dd - dn
    else:
        q = scalar(point)
        num = f.num.shift(q) if q else f.num
        den = f.den.shift(q) if q else f.den
        shift = 0
        vd = den.valuation()
        den = Poly._raw(list(den.c[vd:]))
        shift -= vd
    if not num.c:
        return TruncatedSeries(point, order + 1, [], order)
    vn = num.valuation()
    num = Poly._raw(list(num.c[vn:]))
    lead = vn + shift
    if order < lead:
        if lead < 0 or order < 0:
            raise ValueError(f"order {order} is below the leading exponent {lead}")
        return TruncatedSeries(point, order + 1, [], order)
    n = order - lead + 1
    coeffs = _power_series_div(list(num.c), list(den.c), n)
    return TruncatedSeries(point, lead, coeffs, order)


def residue(f: RatFunc, point) -> Fraction:
    """Coefficient of (z - point)^(-1); at INF the residue of f dz."""
    f = RatFunc._coerce(f)
    if not f.num.c:
        return _ZERO
    if point is INF:
        # res_inf f dz = -[t^1] f(1/t)
        ser = laurent_expand(f, INF, 1)
        return -ser[1]
    v = f.valuation(point)
    if v >= 0:
        return _ZERO
    return laurent_expand(f, point, -1)[-1]


# ---------------------------------------------------------------------------
# Hermite reduction and logarithmic part


def hermite_reduce(a: Poly, d: Poly):
    """Split a/d (deg a < deg d) into g' + h with h having squarefree denominator.

    Returns (g: RatFunc, h_num: Poly, h_den: Poly).
    """
    g = RatFunc()
    dm = poly_gcd(d, d.deriv())
    ds = d.exact_div(dm)
    while dm.degree > 0:
        dm2 = poly_gcd(dm, dm.deriv())
        dms = dm.exact_div(dm2)
        lhs = -(ds * dm.deriv()).exact_div(dm)
        b, c = poly_diophantine(lhs, dms, a)
        a = c - (b.deriv() * ds).exact_div(dms)
        g = g + RatFunc(b, dm)
        dm = dm2
    return g, a, ds


class NonRationalLogError(ArithmeticError):
    pass


def log_part(a: Poly, d: Poly) -> list[tuple[Fraction, Poly]]:
    """Rothstein-Trager for a/d with d squarefree, deg a < deg d."""
    if not a.c:
        return []
    dd = d.deriv()
    n = d.degree
    ts = [Fraction(k) for k in range(n + 1)]
    vals = [resultant(d, a - dd * t) for t in ts]
    rt = lagrange_interpolate(ts, vals)
    out = []
    total = RatFunc()
    for c in rational_roots(rt):
        if c == 0:
            continue
        v = poly_gcd(d, a - dd * c)
        if v.degree > 0:
            out.append((c, v))
            total = total + RatFunc(v.deriv(), v) * c
    if total != RatFunc(a, d):
        raise NonRationalLogError("logarithmic part needs algebraic coefficients")
    return out


def hermite_antiderivative(f: RatFunc):
    """Return (rational_part, [(c_i, p_i)]) with d/dz rational + sum c_i p_i'/p_i = f."""
    f = RatFunc._coerce(f)
    q, r = divmod(f.num, f.den)
    rat = RatFunc(q.integ())
    if not r.c:
        return rat, []
    g, a, ds = hermite_reduce(r, f.den)
    rat = rat + g
    # remaining a/ds may have a polynomial piece left after reduction
    q2, a = divmod(a, ds)
    rat = rat + RatFunc(q2.integ())
    logs = log_part(a, ds.monic() if ds.lc == 1 else ds) if a.c else []
    return rat, logs


def antiderivative_check(f: RatFunc, rat: RatFunc, logs) -> bool:
    total = rat.deriv()
    for c, p in logs:
        total = total + RatFunc(p.deriv(), p) * c
    return total == f


class Antiderivative:
    """Rational part plus sum c_i log p_i(z); ``None`` logs mean the log part is not rational."""

    __slots__ = ("rational", "logs", "derivative")

    def __init__(self, rational, logs, derivative: RatFunc):
        self.rational = rational
        self.logs = logs
        self.derivative = derivative

    @classmethod
    def of(cls, f: RatFunc) -> "Antiderivative":
        f = RatFunc._coerce(f)
        try:
            rat, logs = hermite_antiderivative(f)
        except NonRationalLogError:
            return cls(None, None, f)
        return cls(rat, logs, f)

    @property
    def exact(self) -> bool:
        return self.rational is not None

    def limit(self, point):
        """Limit of the rational part, assuming the log part is empty."""
        if self.logs:
            raise ValueError("log part present")
        return self.rational.limit(point)

    def evaluate(self, z):
        """Value at a numeric z using principal logs."""
        v = self.rational(z)
        for c, p in self.logs:
            v = v + to_mp(c) * mpmath.log(p(z))
        return v

    def normalized(self, point) -> "Antiderivative":
        """Shift the constant so the rational part vanishes at ``point``."""
        lim = self.limit(point)
        return Antiderivative(self.rational - lim, [], self.derivative)

    def to_json(self) -> dict:
        if not self.exact:
            return {"rational": None, "logs": None, "derivative": self.derivative.to_json()}
        return {
            "rational": self.rational.to_json(),
            "logs": [[fmt_scalar(c), [fmt_scalar(a) for a in p.c]] for c, p in self.logs],
        }


# ---------------------------------------------------------------------------
# sparse multivariate truncated series


class MultiSeries:
    """Sparse polynomial in num_vars variables truncated at total degree cap."""

    __slots__ = ("num_vars", "terms", "cap")

    def __init__(self, num_vars: int, terms: dict | None = None, cap: int = 8):
        self.num_vars = num_vars
        self.cap = cap
        self.terms = {}
        if terms:
            for e, v in terms.items():
                if sum(e) <= cap and v != 0:
                    self.terms[tuple(e)] = v

    @classmethod
    def variable(cls, num_vars: int, i: int, cap: int) -> "MultiSeries":
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, {tuple(e): 1}, cap)

    @classmethod
    def constant(cls, num_vars: int, c, cap: int) -> "MultiSeries":
        return cls(num_vars, {(0,) * num_vars: c}, cap)

    def __add__(self, o):
        if not isinstance(o, MultiSeries):
            o = MultiSeries.constant(self.num_vars, o, self.cap)
        cap = min(self.cap, o.cap)
        t = dict(self.terms)
        for e, v in o.terms.items():
            t[e] = t.get(e, 0) + v
        return MultiSeries(self.num_vars, t, cap)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries(self.num_vars, {e: -v for e, v in self.terms.items()}, self.cap)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, MultiSeries):
            return MultiSeries(self.num_vars, {e: v * o for e, v in self.terms.items()}, self.cap)
        cap = min(self.cap, o.cap)
        t: dict = {}
        for e1, v1 in self.terms.items():
            d1 = sum(e1)
            for e2, v2 in o.terms.items():
                if d1 + sum(e2) > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + v1 * v2
        return MultiSeries(self.num_vars, t, cap)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        r = MultiSeries.constant(self.num_vars, 1, self.cap)
        for _ in range(k):
            r = r * self
        return r

    def constant_term(self):
        return self.terms.get((0,) * self.num_vars, 0)

    def homogeneous(self, d: int) -> "MultiSeries":
        return MultiSeries(self.num_vars, {e: v for e, v in self.terms.items() if sum(e) == d}, self.cap)

    def exp(self) -> "MultiSeries":
        """exp of a series without constant term, truncated at the cap."""
        if self.constant_term() != 0:
            raise ValueError("exp needs a vanishing constant term")
        out = MultiSeries.constant(self.num_vars, 1, self.cap)
        term = MultiSeries.constant(self.num_vars, 1, self.cap)
        for k in range(1, self.cap + 1):
            term = term * self * (Fraction(1, k) if self._exact() else mpmath.mpf(1) / k)
            if not term.terms:
                break
            out = out + term
        return out

    def _exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.terms.values())

    def linear_substitute(self, rows: list[list]) -> "MultiSeries":
        """Substitute x_i = sum_j rows[i][j] s_j."""
        lin = []
        m = len(rows[0]) if rows else 0
        for row in rows:
            lin.append(MultiSeries(m, {tuple(1 if k == j else 0 for k in range(m)): c for j, c in enumerate(row)}, self.cap))
        out = MultiSeries(m, {}, self.cap)
        for e, v in self.terms.items():
            term = MultiSeries.constant(m, v, self.cap)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * lin[i]
            out = out + term
        return out


# ---------------------------------------------------------------------------
# sparse bivariate polynomials


class BiPoly:
    """Sparse polynomial sum c_{ij} a^i b^j over Q.

    Used for defining polynomials A(x, y) and for operator coefficients
    c_k(x, hbar).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {}
        if terms:
            for e, v in terms.items():
                v = scalar(v) if not isinstance(v, Fraction) else v
                if v:
                    self.terms[(int(e[0]), int(e[1]))] = v

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def var(cls, which: int) -> "BiPoly":
        return cls({(1, 0): 1} if which == 0 else {(0, 1): 1})

    @classmethod
    def from_list(cls, items) -> "BiPoly":
        t: dict = {}
        for i, j, c in items:
            t[(i, j)] = t.get((i, j), Fraction(0)) + scalar(c)
        return cls(t)

    def to_list(self) -> list:
        return [[i, j, fmt_scalar(c)] for (i, j), c in sorted(self.terms.items())]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, o) -> bool:
        if isinstance(o, (int, Fraction)):
            o = BiPoly.const(o)
        if not isinstance(o, BiPoly):
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*a^{i}*b^{j}" for (i, j), c in sorted(self.terms.items()))

    @staticmethod
    def _coerce(o) -> "BiPoly":
        if isinstance(o, BiPoly):
            return o
        if isinstance(o, (int, Fraction)):
            return BiPoly.const(o)
        return NotImplemented

    def __add__(self, o):
        o = BiPoly._coerce(o)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for e, v in o.terms.items():
            t[e] = t.get(e, 0) + v
        return BiPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({e: -v for e, v in self.terms.items()})

    def __sub__(self, o):
        o = BiPoly._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = BiPoly._coerce(o)
        if o is NotImplemented:
            return o
        t: dict = {}
        for (i1, j1), v1 in self.terms.items():
            for (i2, j2), v2 in o.terms.items():
                e = (i1 + i2, j1 + j2)
                t[e] = t.get(e, 0) + v1 * v2
        return BiPoly(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        r = BiPoly.const(1)
        for _ in range(k):
            r = r * self
        return r

    def scale(self, c) -> "BiPoly":
        return BiPoly({e: v * c for e, v in self.terms.items()})

    def diff(self, which: int) -> "BiPoly":
        t = {}
        for (i, j), v in self.terms.items():
            k = i if which == 0 else j
            if k:
                t[(i - 1, j) if which == 0 else (i, j - 1)] = v * k
        return BiPoly(t)

    def degree(self, which: int) -> int:
        if not self.terms:
            return -1
        return max(e[which] for e in self.terms)

    def coeff(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def __call__(self, a, b):
        """Evaluate by Horner in b, powers cached in a."""
        if not self.terms:
            return 0
        exact_types = (int, Fraction, RatFunc, Poly, BiPoly)
        exact = isinstance(a, exact_types) and isinstance(b, exact_types)
        if not exact:
            a, b = to_mp(a), to_mp(b)
        da = self.degree(0)
        db = self.degree(1)
        apow = [1]
        for _ in range(da):
            apow.append(apow[-1] * a)
        acc = 0
        for j in range(db, -1, -1):
            cj = 0
            for (i, jj), v in self.terms.items():
                if jj == j:
                    cj = cj + apow[i] * (v if exact else to_mp(v))
            acc = acc * b + cj
        return acc

    def coeffs_in(self, which: int) -> dict[int, Poly]:
        """Group as sum_k p_k(other) * var^k."""
        out: dict[int, list] = {}
        for (i, j), v in self.terms.items():
            k, m = (i, j) if which == 0 else (j, i)
            lst = out.setdefault(k, [])
            while len(lst) <= m:
                lst.append(Fraction(0))
            lst[m] += v
        return {k: Poly(v) for k, v in out.items()}

    def normalized(self, i: int, j: int) -> "BiPoly":
        c = self.coeff(i, j)
        if not c:
            raise ValueError("normalizing monomial absent")
        return self.scale(1 / c)


def det_laplace(m: list[list]):
    """Division-free determinant by memoized Laplace expansion over column masks."""
    n = len(m)
    if n == 0:
        return 1
    memo: dict[int, object] = {}

    def rec(row: int, used: int):
        if row == n:
            return 1
        if used in memo:
            return memo[used]
        acc = 0
        free_idx = 0
        for j in range(n):
            if used >> j & 1:
                continue
            a = m[row][j]
            if (not isinstance(a, (int, Fraction)) and a) or (isinstance(a, (int, Fraction)) and a != 0):
                sub = rec(row + 1, used | (1 << j))
                term = a * sub
                acc = acc + term if free_idx % 2 == 0 else acc - term
            free_idx += 1
        memo[used] = acc
        return acc

    return rec(0, 0)


def sylvester(p: list, q: list) -> list[list]:
    """Sylvester matrix of two polynomials given by coefficient lists (low to high)."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = 0
    rows = []
    for r in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(p)):
            row[r + k] = c
        rows.append(row)
    for r in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(q)):
            row[r + k] = c
        rows.append(row)
    return rows


def isqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact nonnegative square root of a rational, or None."""
    q = scalar(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None
