"""Topological recursion on genus-zero spectral curves.

Exact path: for the two N=2 coordinates the involution is z -> -z and the
correlators are Laurent polynomials in z_1..z_n, stored as
``{exponent tuple: Fraction}`` (the coefficient of dz_1...dz_n).

Numeric path: for curves with finite simple ramification points a, every
stable correlator is a polynomial in the pole basis e_{a,j}(z) = (z-a)^(-j-1) dz,
j >= 1, with big-float coefficients.  Integration from z = infinity is then
analytic: the antiderivative of e_{a,j} is -(z-a)^(-j)/j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

import mpmath

from .curve import (
    CP1_SQRT,
    CP1_ZHUKOVSKY,
    RamificationPoint,
    SpectralCurve,
    _compose_series,
    _taylor_at,
    ramification_points,
    sheet_points,
)
from .exactalg import INF, Antiderivative, Poly, RatFunc, Z, fmt_scalar, scalar


class NotInvolutionCurveError(ValueError):
    pass


@dataclass
class KernelData:
    p_of_z: RatFunc
    ramification: list
    z_points: list = field(default_factory=list)  # residue points of the exact recursion


def kernel(curve: SpectralCurve) -> KernelData:
    if not curve.global_involution:
        raise NotInvolutionCurveError("curve has no global involution z -> -z; use numeric_correlators")
    x, y = curve.x, curve.y
    p = -x / ((y - y.reflect()) * x.deriv() * 2)
    ram = ramification_points(curve)
    pts = [r.z_value for r in ram]
    return KernelData(p, ram, pts)


# ---------------------------------------------------------------------------
# exact correlators


def _laurent_of(f: RatFunc) -> dict:
    """Laurent polynomial {exponent: coeff} of a rational function with monomial denominator."""
    den = f.den
    k = den.valuation()
    if den.degree != k:
        raise ValueError(f"{f} is not a Laurent polynomial")
    c = den.lc
    return {e - k: a / c for e, a in enumerate(f.num.c) if a}


def _lp_to_ratfunc(lp: dict) -> RatFunc:
    if not lp:
        return RatFunc()
    lo = min(min(lp), 0)
    hi = max(lp)
    num = Poly([lp.get(e + lo, 0) for e in range(hi - lo + 1)])
    return RatFunc(num, Poly.monomial(-lo))


def _mul(a: dict, b: dict, keep=None) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(u + v for u, v in zip(e1, e2))
            if keep is not None and not keep(e):
                continue
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _add_into(acc: dict, b: dict, scale=1):
    for e, c in b.items():
        v = acc.get(e, 0) + c * scale
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


class ExactRecursion:
    """Memoized correlators omega_n^(g) for an involution curve."""

    def __init__(self, curve: SpectralCurve):
        self.curve = curve
        self.kernel = kernel(curve)
        p = _laurent_of(self.kernel.p_of_z)
        # -2 w p(w), the w-dependent part of the recursion kernel
        self.wp = {e + 1: -2 * c for e, c in p.items()}
        self.points = [1 if pt == 0 else -1 for pt in self.kernel.z_points]
        self.cache: dict = {}

    def omega(self, g: int, n: int) -> dict:
        if 2 * g - 2 + n <= 0:
            raise ValueError("only stable correlators are stored")
        key = (g, n)
        if key not in self.cache:
            self.cache[key] = self._compute(g, n - 1)
        return self.cache[key]

    # tau = s * (exponent of w); at w=0 s=+1, at w=inf s=-1
    def _bseries(self, nv: int, slot: int, sign: int, s: int, bound: int, minus_w: bool) -> dict:
        """B(+-w, z_slot) expanded at the residue point, tau <= bound; includes d(-w) sign."""
        out = {}
        k = 0
        while True:
            tau = k if s == 1 else k + 2
            if tau > bound:
                break
            e = [0] * nv
            if s == 1:
                e[0], e[slot] = k, -k - 2
                par = k
            else:
                e[0], e[slot] = -k - 2, k
                par = k  # w^{-k-2} picks (-1)^k under w -> -w
            c = Fraction(k + 1)
            if minus_w:
                c = -c * _sign(par)
            out[tuple(e)] = c * sign
            k += 1
        return out

    def _embed(self, corr: dict, nv: int, slots: list, minus_w: bool) -> dict:
        """omega(+-w, z_slots) as a polynomial in (w, z_1..z_n)."""
        out = {}
        for e, c in corr.items():
            t = [0] * nv
            t[0] = e[0]
            for s_, v in zip(slots, e[1:]):
                t[s_] = v
            if minus_w:
                c = -c * _sign(e[0])
            out[tuple(t)] = c
        return out

    @staticmethod
    def _tau_min(d: dict, s: int) -> int:
        return min(s * e[0] for e in d) if d else 0

    def _compute(self, g: int, n: int) -> dict:
        """omega_{n+1}^{(g)}(z_0, z_1..z_n)."""
        nv = n + 1  # variables (w, z_1..z_n) for the integrand
        out: dict = {}
        J = list(range(1, n + 1))
        wpv = {(e,) + (0,) * n: c for e, c in self.wp.items()}
        for s in self.points:
            wp_min = self._tau_min(wpv, s)
            bound = -1 - wp_min
            stuff: dict = {}
            if g >= 1:
                if g == 1 and n == 0:
                    stuff[(-2,)] = Fraction(-1, 4)
                else:
                    corr = self.omega(g - 1, n + 2)
                    for e, c in corr.items():
                        t = (e[0] + e[1],) + tuple(e[2:])
                        v = stuff.get(t, 0) - c * _sign(e[1])
                        if v:
                            stuff[t] = v
                        else:
                            stuff.pop(t, None)
            for g1 in range(g + 1):
                g2 = g - g1
                for r in range(n + 1):
                    for I in combinations(J, r):
                        Jc = [j for j in J if j not in I]
                        if (g1 == 0 and not I) or (g2 == 0 and not Jc):
                            continue
                        f1 = None if (g1 == 0 and len(I) == 1) else self._embed(self.omega(g1, len(I) + 1), nv, list(I), False)
                        f2 = None if (g2 == 0 and len(Jc) == 1) else self._embed(self.omega(g2, len(Jc) + 1), nv, Jc, True)
                        m1 = self._tau_min(f1, s) if f1 is not None else (0 if s == 1 else 2)
                        m2 = self._tau_min(f2, s) if f2 is not None else (0 if s == 1 else 2)
                        if f1 is None:
                            f1 = self._bseries(nv, I[0], 1, s, bound - m2, False)
                        if f2 is None:
                            f2 = self._bseries(nv, Jc[0], 1, s, bound - m1, True)
                        _add_into(stuff, _mul(f1, f2, lambda e: s * e[0] <= bound))
            G = _mul(wpv, stuff, lambda e: s * e[0] <= -1)
            for e, c in G.items():
                k2 = -1 - e[0] if s == 1 else e[0] - 1
                if k2 < 0 or k2 % 2:
                    continue
                k = k2 // 2
                e0 = -2 * k - 2 if s == 1 else 2 * k
                key = (e0,) + e[1:]
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out


def correlators(curve: SpectralCurve, g_max: int, n_max: int, engine: ExactRecursion | None = None) -> list:
    """All stable omega_n^(g) with g <= g_max, n <= n_max as (g, n, dict)."""
    eng = engine or ExactRecursion(curve)
    out = []
    for g in range(g_max + 1):
        for n in range(1, n_max + 1):
            if 2 * g - 2 + n > 0:
                out.append((g, n, eng.omega(g, n)))
    return out


def correlator_ratfunc(corr: dict, n: int):
    """Common-denominator form: (numerator terms, denominator exponents) with z_i^k denominators."""
    shift = [min(0, min((e[i] for e in corr), default=0)) for i in range(n)]
    num = {tuple(a - b for a, b in zip(e, shift)): c for e, c in corr.items()}
    return num, [-s for s in shift]


def correlator_to_json(g: int, n: int, corr: dict) -> dict:
    num, den = correlator_ratfunc(corr, n)
    return {
        "g": g,
        "n": n,
        "num": [[list(e), fmt_scalar(c)] for e, c in sorted(num.items())],
        "den": [[i, k] for i, k in enumerate(den) if k],
    }


def is_symmetric(corr: dict) -> bool:
    from itertools import permutations

    if not corr:
        return True
    n = len(next(iter(corr)))
    for perm in permutations(range(n)):
        for e, c in corr.items():
            if corr.get(tuple(e[i] for i in perm)) != c:
                return False
    return True


def bergman_kernel(z1, z2):
    """B(z1, z2) / (dz1 dz2) on a genus-zero curve."""
    return 1 / (z1 - z2) ** 2


def regularized_bergman(curve: SpectralCurve, z1, z2):
    """B - dx1 dx2 / (x1 - x2)^2, divided by dz1 dz2, at two distinct points."""
    x, dx = curve.x, curve.x.deriv()
    return bergman_kernel(z1, z2) - dx(z1) * dx(z2) / (x(z1) - x(z2)) ** 2


def regularized_bergman_diagonal(curve: SpectralCurve) -> RatFunc:
    """Diagonal limit of ``regularized_bergman``: minus the Schwarzian of x over 6."""
    d1 = curve.x.deriv()
    d2, d3 = d1.deriv(), d1.deriv().deriv()
    return (d3 / d1 - (d2 / d1) * (d2 / d1) * Fraction(3, 2)) * Fraction(-1, 6)


# ---------------------------------------------------------------------------
# free energies


def _integral_from(e: int, z_star) -> dict:
    """Laurent polynomial of int_{z_*}^z t^e dt."""
    if e == -1:
        raise ValueError("correlator has a residue; integral is logarithmic")
    if z_star is INF:
        if e >= -1:
            raise ValueError("integral from infinity diverges")
        return {e + 1: Fraction(1, e + 1)}
    out = {e + 1: Fraction(1, e + 1)}
    const = -scalar(z_star) ** (e + 1) / (e + 1)
    out[0] = out.get(0, 0) + const
    return {k: v for k, v in out.items() if v}


def principal_free_energy(corr: dict, z_star) -> RatFunc:
    """F_n^(g)(z, ..., z; z_*) from the Laurent correlator."""
    cache: dict = {}
    total: dict = {}
    for e, c in corr.items():
        acc = {0: c}
        for ei in e:
            if ei not in cache:
                cache[ei] = _integral_from(ei, z_star)
            nxt: dict = {}
            for k1, v1 in acc.items():
                for k2, v2 in cache[ei].items():
                    nxt[k1 + k2] = nxt.get(k1 + k2, 0) + v1 * v2
            acc = nxt
        _add_into(total, acc)
    return _lp_to_ratfunc(total)


@dataclass
class FreeEnergyTable:
    entries: dict  # (g, n) -> Antiderivative
    divisor_endpoint: object
    curve: SpectralCurve | None = None

    def to_json(self) -> dict:
        return {
            "divisor_endpoint": "inf" if self.divisor_endpoint is INF else fmt_scalar(self.divisor_endpoint),
            "entries": [{"g": g, "n": n, **a.to_json()} for (g, n), a in sorted(self.entries.items())],
        }


def free_energy_table(curve: SpectralCurve, m_max: int, engine: ExactRecursion | None = None) -> FreeEnergyTable:
    eng = engine or ExactRecursion(curve)
    entries = {}
    for m in range(2, m_max + 1):
        for g in range(0, (m + 1) // 2 + 1):
            n = m + 1 - 2 * g
            if n >= 1:
                F = principal_free_energy(eng.omega(g, n), curve.z_star)
                entries[(g, n)] = Antiderivative(F, [], F.deriv())
    return FreeEnergyTable(entries, curve.z_star, curve)


def f0_derivative(curve: SpectralCurve) -> RatFunc:
    return curve.y * curve.x.deriv() / curve.x


def f1_derivative_regularized(curve: SpectralCurve, z_star=None) -> RatFunc:
    """d/dz of F_2^(0)(z, z)/2 with the double pole of B removed by dx dx/(x-x)^2."""
    z_star = curve.z_star if z_star is None else z_star
    x = curve.x
    dx = x.deriv()
    diag = -dx.deriv() / dx
    if z_star is INF:
        xinf = x.limit(INF)
        cross = RatFunc() if xinf is INF else dx / (x - xinf)
    else:
        zs = scalar(z_star)
        xs = x.limit(zs)
        cross = -1 / (Z - zs)
        if xs is not INF:
            cross = cross + dx / (x - xs)
    return (diag + cross * 2) * Fraction(1, 2)


def assemble_wavefunction(table: FreeEnergyTable, m_max: int) -> list:
    """F_0..F_m as Antiderivatives (m=0,1 from their seeds, m>=2 from the table)."""
    curve = table.curve
    out = [Antiderivative.of(f0_derivative(curve)), Antiderivative.of(f1_derivative_regularized(curve, table.divisor_endpoint))]
    for m in range(2, m_max + 1):
        total = RatFunc()
        for (g, n), a in table.entries.items():
            if 2 * g - 1 + n == m:
                if a.logs:
                    raise AssertionError(f"log part in F_{n}^({g})")
                total = total + a.rational * Fraction(1, factorial(n))
        out.append(Antiderivative(total, [], total.deriv()))
    return out[: m_max + 1]


def fm_recursion(curve: SpectralCurve, m_max: int, z_star=None) -> list:
    """dF_m/dz for m = 0..m_max from the kernel recursion."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    z_star = curve.z_star if z_star is None else z_star
    p = kernel(curve).p_of_z
    if z_star is INF:
        c = p.deriv() * 2
        f1 = -1 / (Z * 2)
    else:
        zs = scalar(z_star)
        c = p.deriv() * 2 - p * zs * 4 / (Z * Z - zs * zs)
        f1 = (2 / (Z + zs) - 1 / Z) * Fraction(1, 2)
    d = [f0_derivative(curve), f1]
    # the m=1 step: the quadratic term of the m >= 2 formula is replaced by -F_1'^2
    d.append(p * 2 * (f1.deriv() - f1 * f1) + c * f1)
    for m in range(2, m_max):
        quad = RatFunc()
        for a in range(2, m):
            b = m + 1 - a
            if b >= 2:
                quad = quad + d[a] * d[b]
        d.append(p * 2 * (d[m].deriv() + quad) + c * d[m])
    return d[: m_max + 1]


# ---------------------------------------------------------------------------
# numeric correlators in the pole basis


class _NS:
    """Truncated Laurent series sum c_i t^(v+i), i < len(c) (relative precision)."""

    __slots__ = ("v", "c")

    def __init__(self, v: int, c: list):
        self.v = v
        self.c = c

    def __add__(self, o: "_NS") -> "_NS":
        v = min(self.v, o.v)
        top = min(self.v + len(self.c), o.v + len(o.c))
        out = [mpmath.mpc(0)] * max(top - v, 0)
        for i, a in enumerate(self.c):
            k = self.v + i - v
            if k < len(out):
                out[k] += a
        for i, a in enumerate(o.c):
            k = o.v + i - v
            if k < len(out):
                out[k] += a
        return _NS(v, out)

    def __mul__(self, o):
        if not isinstance(o, _NS):
            return _NS(self.v, [a * o for a in self.c])
        n = min(len(self.c), len(o.c))
        out = [mpmath.mpc(0)] * n
        for i in range(n):
            a = self.c[i]
            if a:
                for j in range(n - i):
                    out[i + j] += a * o.c[j]
        return _NS(self.v + o.v, out)

    __rmul__ = __mul__

    def normalize(self, rel_tol=0) -> "_NS":
        """Drop leading coefficients that vanish (up to rel_tol times the largest one)."""
        cut = rel_tol * max((abs(a) for a in self.c), default=0)
        k = 0
        while k < len(self.c) - 1 and abs(self.c[k]) <= cut:
            k += 1
        return _NS(self.v + k, self.c[k:])

    def inverse(self) -> "_NS":
        s = self.normalize(mpmath.mpf(2) ** (30 - mpmath.mp.prec))
        c = s.c
        out = [mpmath.mpc(0)] * len(c)
        out[0] = 1 / c[0]
        for k in range(1, len(c)):
            acc = mpmath.mpc(0)
            for j in range(1, k + 1):
                acc += c[j] * out[k - j]
            out[k] = -acc / c[0]
        return _NS(-s.v, out)

    def power(self, k: int) -> "_NS":
        base = self if k >= 0 else self.inverse()
        r = _NS(0, [mpmath.mpc(1)] + [mpmath.mpc(0)] * (len(self.c) - 1))
        for _ in range(abs(k)):
            r = r * base
        return r

    def coeff(self, e: int):
        i = e - self.v
        if i < 0:
            return mpmath.mpc(0)
        if i >= len(self.c):
            raise ArithmeticError("series truncated below the requested order")
        return self.c[i]


class _LocalData:
    def __init__(self, curve: SpectralCurve, rp: RamificationPoint, length: int, points: list):
        a = mpmath.mpc(rp.z_value) if not isinstance(rp.z_value, Fraction) else mpmath.mpc(mpmath.mpf(rp.z_value.numerator) / rp.z_value.denominator)
        self.a = a
        L = length
        if rp.involution == "reflect":
            s = [0, -1] + [0] * (L + 2)
        else:
            s = [rp.involution[k] for k in range(0, L + 3)]
        s = [mpmath.mpc(v) for v in s[: L + 3]]
        self.sigma = _NS(0, s[: L + 2])
        self.dsigma = _NS(0, [(k + 1) * s[k + 1] for k in range(L + 1)])
        sig_over_t = _NS(0, s[1 : L + 2])
        self.sig_over_t = sig_over_t
        xs = [mpmath.mpc(v) for v in _taylor_at(curve.x, a, L + 4)]
        ys = [mpmath.mpc(v) for v in _taylor_at(curve.y, a, L + 4)]
        x_t = _NS(0, xs[: L + 3])
        dx_t = _NS(0, [(k + 1) * xs[k + 1] for k in range(L + 3)])
        y_t = _NS(0, ys[: L + 3])
        y_sig = _NS(0, [mpmath.mpc(v) for v in _compose_series(ys, s[: L + 3], L + 2)])
        self.D = (y_t + y_sig * -1) * dx_t * x_t.inverse() * 2
        self.length = L
        self.points = points
        self._cache: dict = {}

    def t_power(self, j: int) -> _NS:
        return _NS(j, [mpmath.mpc(1)] + [mpmath.mpc(0)] * (self.length - 1))

    def kappa(self, j: int) -> _NS:
        key = ("k", j)
        if key not in self._cache:
            sj = self.sig_over_t.power(j)
            diff = _NS(0, [mpmath.mpc(1)] + [mpmath.mpc(0)] * (self.length - 1)) + sj * -1
            self._cache[key] = _NS(j, diff.c) * self.D.inverse()
        return self._cache[key]

    def basis_at(self, b: int, j: int, on_sigma: bool) -> _NS:
        """e_{b,j} at a + t (or at a + sigma(t), times sigma'(t))."""
        key = ("e", b, j, on_sigma)
        if key in self._cache:
            return self._cache[key]
        L = self.length
        pb = self.points[b]
        if abs(pb - self.a) < mpmath.mpf(10) ** (-10) * (1 + abs(pb)):
            if on_sigma:
                res = _NS(-j - 1, self.sig_over_t.power(-j - 1).c) * self.dsigma
            else:
                res = _NS(-j - 1, [mpmath.mpc(1)] + [mpmath.mpc(0)] * (L - 1))
        else:
            d = self.a - pb
            tay = [_binom_neg(j + 1, k) * d ** (-j - 1 - k) for k in range(L + 2)]
            if on_sigma:
                res = _NS(0, [mpmath.mpc(v) for v in _compose_series(tay, [0] + list(self.sigma.c[1:]), L + 1)]) * self.dsigma
            else:
                res = _NS(0, [mpmath.mpc(v) for v in tay[:L]])
        self._cache[key] = res
        return res

    def bergman_coeff(self, k: int, on_sigma: bool) -> _NS:
        """Coefficient series of e_{a,k+1}(z) in B(a+t, z) (or at sigma with sigma')."""
        key = ("b", k, on_sigma)
        if key not in self._cache:
            if on_sigma:
                res = _NS(k, self.sig_over_t.power(k).c) * self.dsigma * (k + 1)
            else:
                res = _NS(k, [mpmath.mpc(k + 1)] + [mpmath.mpc(0)] * (self.length - 1))
            self._cache[key] = res
        return self._cache[key]

    def self_bergman(self) -> _NS:
        """B(a+t, a+sigma(t)) sigma'(t)."""
        diff = _NS(1, (_NS(0, [mpmath.mpc(1)] + [mpmath.mpc(0)] * self.length) + self.sig_over_t * -1).c)
        return diff.power(-2) * self.dsigma


def _binom_neg(m: int, k: int):
    """Coefficient of t^k in (d + t)^(-m) divided by d^(-m-k)."""
    c = Fraction(1)
    for i in range(k):
        c = c * (-m - i) / (i + 1)
    return mpmath.mpf(c.numerator) / c.denominator


class NumericRecursion:
    def __init__(self, curve: SpectralCurve, precision: int = 166, length: int = 40):
        self.curve = curve
        self.precision = precision
        with mpmath.workprec(precision):
            ram = ramification_points(curve, precision, order=length + 4)
            if any(r.z_value is INF for r in ram):
                raise ValueError("numeric engine needs finite ramification points")
            self.points = [mpmath.mpc(r.z_value) if not isinstance(r.z_value, Fraction) else mpmath.mpc(r.z_value.numerator) / r.z_value.denominator for r in ram]
            self.local = [_LocalData(curve, r, length, self.points) for r in ram]
        self.cache: dict = {}

    def omega(self, g: int, n: int) -> dict:
        key = (g, n)
        if key not in self.cache:
            with mpmath.workprec(self.precision):
                self.cache[key] = self._compute(g, n - 1)
        return self.cache[key]

    def _factor(self, loc: _LocalData, g: int, slots: tuple, on_sigma: bool) -> dict:
        """omega_{|slots|+1}^(g)(w or sigma(w), z_slots) as {labels of slots: series}."""
        out: dict = {}
        if g == 0 and len(slots) == 1:
            ai = self.local.index(loc)
            for k in range(loc.length):
                ser = loc.bergman_coeff(k, on_sigma)
                if ser.v > loc.length:
                    break
                out[((ai, k + 1),)] = ser
            return out
        for labels, c in self.omega(g, len(slots) + 1).items():
            ser = loc.basis_at(labels[0][0], labels[0][1], on_sigma) * c
            rest = labels[1:]
            out[rest] = out[rest] + ser if rest in out else ser
        return out

    def _compute(self, g: int, n: int) -> dict:
        J = tuple(range(n))
        out: dict = {}
        for ai, loc in enumerate(self.local):
            stuff: dict = {}

            def put(key, ser):
                stuff[key] = stuff[key] + ser if key in stuff else ser

            if g >= 1:
                if g == 1 and n == 0:
                    put((), loc.self_bergman())
                else:
                    for labels, c in self.omega(g - 1, n + 2).items():
                        ser = loc.basis_at(labels[0][0], labels[0][1], False) * loc.basis_at(labels[1][0], labels[1][1], True) * c
                        put(labels[2:], ser)
            for g1 in range(g + 1):
                g2 = g - g1
                for r in range(n + 1):
                    for I in combinations(J, r):
                        Jc = tuple(j for j in J if j not in I)
                        if (g1 == 0 and not I) or (g2 == 0 and not Jc):
                            continue
                        f1 = self._factor(loc, g1, I, False)
                        f2 = self._factor(loc, g2, Jc, True)
                        for k1, s1 in f1.items():
                            for k2, s2 in f2.items():
                                lab = [None] * n
                                for idx, l in zip(I, k1):
                                    lab[idx] = l
                                for idx, l in zip(Jc, k2):
                                    lab[idx] = l
                                put(tuple(lab), s1 * s2)
            for key, ser in stuff.items():
                ser = ser.normalize(mpmath.mpf(2) ** (30 - self.precision))
                j = 1
                while j - 2 + ser.v <= -1:
                    val = (loc.kappa(j) * ser).coeff(-1)
                    if val != 0:
                        full = ((ai, j),) + key
                        out[full] = out.get(full, 0) + val
                    j += 1
        return out

    def free_energy(self, g: int, n: int, z) -> object:
        total = mpmath.mpc(0)
        with mpmath.workprec(self.precision):
            prims: dict = {}
            for labels, c in self.omega(g, n).items():
                term = c
                for b, j in labels:
                    if (b, j) not in prims:
                        prims[(b, j)] = -((z - self.points[b]) ** (-j)) / j
                    term = term * prims[(b, j)]
                total += term
        return total


def numeric_correlators(curve: SpectralCurve, g_max: int, n_max: int, x_eval, precision: int = 166, z_points=None, engine=None) -> dict:
    """{m: [(z, F_m(z))]} over the sheets above x_eval, for every m whose terms fit in (g_max, n_max)."""
    ms = []
    m = 2
    while True:
        terms = [(g, m + 1 - 2 * g) for g in range(0, (m + 1) // 2 + 1) if m + 1 - 2 * g >= 1]
        if any(n > n_max for g, n in terms) or any(g > g_max for g, n in terms):
            if all(g > g_max or n > n_max for g, n in terms):
                break
            m += 1
            if m > 2 * g_max + n_max:
                break
            continue
        ms.append(m)
        m += 1
    if not ms:
        return {}
    eng = engine or NumericRecursion(curve, precision)
    with mpmath.workprec(precision):
        zs = z_points if z_points is not None else sheet_points(curve, x_eval, precision)
        out = {}
        for m in ms:
            vals = []
            for z in zs:
                z = mpmath.mpc(z)
                tot = mpmath.mpc(0)
                for g in range(0, (m + 1) // 2 + 1):
                    n = m + 1 - 2 * g
                    if n >= 1:
                        tot += eng.free_energy(g, n, z) / factorial(n)
                vals.append((z, tot))
            out[m] = vals
    return out
