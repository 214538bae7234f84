"""Exact WKB analysis of the equivariant CP^1 quantum curve.

The Schroedinger form has Q = Q0 + hbar^2 Q2 with
Q0 = (4x + (w0-w1)^2)/(4x^2) and Q2 = -1/(4x^2).  Everything on the
spectral curve is done in the uniformizing coordinate z with x = z^2 - c^2,
c = (w0-w1)/2, where sqrt(Q0) = z/x and sqrt(Q0) dx = 2z^2/(z^2-c^2) dz.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import INF, RatFunc, Z, fmt_scalar, residue, scalar

XV = RatFunc.z()  # x as the variable of Q0, Q2


@dataclass
class SchroedingerData:
    w0: Fraction
    w1: Fraction
    Q0: RatFunc  # in x
    Q2: RatFunc  # in x
    v: Fraction  # turning point

    @property
    def c(self) -> Fraction:
        """Half the equivariant gap: x = z^2 - c^2 and sqrt(Q0) = z/x."""
        return (self.w0 - self.w1) / 2

    def to_json(self) -> dict:
        return {
            "w0": fmt_scalar(self.w0),
            "w1": fmt_scalar(self.w1),
            "Q0": self.Q0.to_json(),
            "Q2": self.Q2.to_json(),
            "turning_point": fmt_scalar(self.v),
        }


def schroedinger_form(w0, w1) -> SchroedingerData:
    w0, w1 = scalar(w0), scalar(w1)
    if w0 == w1:
        raise ValueError("w0 = w1: the turning point coalesces with the pole at x = 0")
    d2 = (w0 - w1) ** 2
    Q0 = (XV * 4 + d2) / (XV * XV * 4)
    Q2 = RatFunc.const(Fraction(-1, 4)) / (XV * XV)
    return SchroedingerData(w0, w1, Q0, Q2, -d2 / 4)


# ---------------------------------------------------------------------------
# Riccati expansion


@dataclass
class RiccatiExpansion:
    data: SchroedingerData
    P_plus: list  # P_n^(+)(z)
    P_minus: list  # P_n^(-)(z) = P_n^(+)(-z)
    P_odd: list
    P_even: list
    checks: dict = field(default_factory=dict)

    def x_of_z(self) -> RatFunc:
        return Z * Z - self.data.c ** 2


def _neg_z(f: RatFunc) -> RatFunc:
    return f.reflect()


def _degree(f: RatFunc) -> int:
    return f.num.degree - f.den.degree


def riccati_expand(data: SchroedingerData, n_max: int) -> RiccatiExpansion:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    c = data.c
    x = Z * Z - c * c
    ddx = lambda f: f.deriv() / (Z * 2)  # noqa: E731
    Q2 = data.Q2(x)
    P = [Z / x]
    for n in range(n_max):
        acc = -ddx(P[n])
        if n == 1:
            acc = acc + Q2
        for n1 in range(1, n + 1):
            acc = acc - P[n1] * P[n + 1 - n1]
        P.append(acc / (P[0] * 2))
    Pm = [_neg_z(p) for p in P]
    odd = [(a - b) / 2 for a, b in zip(P, Pm)]
    even = [(a + b) / 2 for a, b in zip(P, Pm)]

    # residues of P_n dx at x = 0 on the first sheet (z = c); dx = 2z dz
    res = [residue(p * Z * 2, c) for p in P]
    holo = all(p.is_zero() or (p.valuation(c) >= 0 and p.valuation(-c) >= 0) for p in P[2:])
    # P_n = O(x^(-n/2-1/2)) at infinity, i.e. O(z^(-n-1))
    decay = all(p.is_zero() or _degree(p) <= -n - 1 for n, p in enumerate(P))
    # P_even = -(1/2) d log(P_odd)/dx order by order: sum_{a+b=m+2} E_a O_b = -(1/2) O'_{m+1}
    iii = True
    for m in range(n_max - 1):
        lhs = RatFunc()
        for a in range(m + 3):
            b = m + 2 - a
            if b <= n_max:
                lhs = lhs + even[a] * odd[b]
        if lhs != ddx(odd[m + 1]) * Fraction(-1, 2):
            iii = False
            break
    checks = {
        "residue_P0": res[0] == c,
        "residue_P1": res[1] == Fraction(1, 2),
        "holomorphic_n_ge_2": holo,
        "decay_at_infinity": decay,
        "even_odd_relation": iii,
        "residues": [fmt_scalar(r) for r in res],
    }
    return RiccatiExpansion(data, P, Pm, odd, even, checks)


@dataclass
class VorosCoefficient:
    two_pi_i_coefficient: Fraction  # V = 2 pi i * coefficient / hbar
    higher_residues: list  # residues of P_odd,n dx at x = 0, n >= 1
    higher_orders_vanish: bool

    def value(self, hbar: complex) -> complex:
        return 2j * math.pi * float(self.two_pi_i_coefficient) / hbar

    def to_json(self) -> dict:
        return {
            "V": f"2*pi*i*({fmt_scalar(self.two_pi_i_coefficient)})/hbar",
            "higher_residues": [fmt_scalar(r) for r in self.higher_residues],
            "higher_orders_vanish": self.higher_orders_vanish,
        }


def voros_coefficient(w0, w1, n_check: int = 6) -> VorosCoefficient:
    """Period of P_odd dx over gamma_0 - sigma_* gamma_0.

    P_odd is odd under the sheet exchange, so the period is twice the
    first-sheet residue at x = 0, times 2 pi i.
    """
    data = schroedinger_form(w0, w1)
    rx = riccati_expand(data, max(n_check, 2))
    c = data.c
    res = [residue(p * Z * 2, c) for p in rx.P_odd]
    lead = 2 * res[0]
    higher = res[1:]
    return VorosCoefficient(lead, higher, all(r == 0 for r in higher))


# ---------------------------------------------------------------------------
# Stokes graph


def _period_primitive(z: complex, c: float) -> complex:
    """Principal-branch primitive of 2z^2/(z^2-c^2) dz: 2z + c log((z-c)/(z+c))."""
    return 2 * z + c * cmath.log((z - c) / (z + c))


@dataclass
class StokesCurve:
    points: list  # x samples
    zs: list  # uniformizing coordinate samples
    end: str  # pole | infinity | returned | collapse
    winding: int
    arc_length: float
    invariant_error: float
    closest_return: float  # min |x - v| after leaving the turning point, with winding != 0


@dataclass
class StokesGraph:
    theta: float
    turning_points: list
    curves: list
    saddle_connections: list
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "turning_points": [_cj(v) for v in self.turning_points],
            "curves": [
                {
                    "end": cv.end,
                    "winding": cv.winding,
                    "arc_length": cv.arc_length,
                    "points": [_cj(p) for p in cv.points],
                }
                for cv in self.curves
            ],
            "saddle_connections": self.saddle_connections,
            "notes": self.notes,
        }


def _cj(v) -> dict:
    v = complex(v)
    return {"re": round(v.real, 12), "im": round(v.imag, 12)}


# Dormand-Prince 5(4)
_DP_C = [0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1]
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0]
_DP_B4 = [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]


def _dp_step(f, y: complex, h: float):
    k = []
    for i in range(7):
        yi = y + h * sum(a * kk for a, kk in zip(_DP_A[i], k))
        k.append(f(yi))
    y5 = y + h * sum(b * kk for b, kk in zip(_DP_B5, k))
    y4 = y + h * sum(b * kk for b, kk in zip(_DP_B4, k))
    return y5, abs(y5 - y4)


def _trace_one(c: float, theta: float, psi: float, tol: float, max_arc: float, pole_buffer: float,
               return_radius: float, max_step: float, start: float) -> StokesCurve:
    rot = cmath.exp(1j * theta)
    v = -c * c

    def field_(z: complex) -> complex:
        # dz/dtau with d(F)/dtau in the direction e^{i theta} and unit speed in x
        g = rot * (z * z - c * c) / (2 * z * z)
        return g / abs(2 * z * g)

    z = math.sqrt(start) * cmath.exp(1j * psi)
    F_start = _period_primitive(z, c)
    x = z * z - c * c
    xs, zs = [x], [z]
    arc = 0.0
    wind = 0.0
    h = min(max_step, math.sqrt(start))
    left = False
    closest = math.inf
    end = "infinity"
    inv_err = 0.0
    # continuous log branch of the primitive
    F_prev = F_start
    branch = 0.0
    while True:
        if h < 1e-14:
            end = "collapse"
            break
        z_new, err = _dp_step(field_, z, h)
        # error is in z; scale it by dx/dz and by dF/dz so that both the x
        # position and the conserved phase stay within tol
        zz = z * z
        scale = max(abs(2 * z), abs(2 * zz / (zz - c * c)) if zz != c * c else 1e300, 1e-300)
        if err * scale > tol:
            h *= max(0.2, 0.9 * (tol / (err * scale)) ** 0.2)
            continue
        # project back onto the level set Im(e^{-i theta}(F - F_start)) = 0
        dF = 2 * z_new * z_new / (z_new * z_new - c * c)
        drift = ((_period_primitive(z_new, c) + 1j * branch - F_start) / rot).imag
        if abs(drift) > 2 * math.pi * abs(c) * 0.25:
            drift = 0.0  # branch not yet unwrapped; the bookkeeping below handles it
        shift = -1j * drift * rot / dF if dF != 0 else 0
        if abs(shift) < 0.1 * abs(z_new - z):
            z_new += shift
        x_new = z_new * z_new - c * c
        dx = x_new - x
        arc += abs(dx)
        if x != 0 and x_new != 0:
            wind += cmath.phase(x_new / x)
        z, x = z_new, x_new
        xs.append(x)
        zs.append(z)
        F_raw = _period_primitive(z, c)
        # unwrap the log by multiples of 2 pi i c
        jump = (F_raw + 1j * branch - F_prev).imag
        period = 2 * math.pi * c
        if abs(jump) > abs(period) / 2:
            branch -= round(jump / period) * period
        F_cur = F_raw + 1j * branch
        F_prev = F_cur
        inv_err = max(inv_err, abs(((F_cur - F_start) / rot).imag))
        dist_v = abs(x - v)
        if dist_v > 1e-2 * abs(v):
            left = True
        n_wind = round(wind / (2 * math.pi))
        if left and n_wind != 0:
            closest = min(closest, dist_v)
        if left and dist_v < return_radius:
            end = "returned"
            break
        if abs(x) < pole_buffer:
            end = "pole"
            break
        if arc > max_arc:
            end = "infinity"
            break
        grow = 0.9 * (tol / max(err * scale, 1e-300)) ** 0.2
        h = min(max_step, h * min(4.0, grow))
        # keep the step below the distance to the pole and the turning point in z
        h = min(h, 0.25 * max(abs(x), pole_buffer))
        if left:
            h = min(h, 0.25 * max(dist_v, return_radius))
    return StokesCurve(xs, zs, end, round(wind / (2 * math.pi)), arc, inv_err, closest)


_LOCAL_TOL = 0.01


def trace_stokes_graph(data: SchroedingerData, theta: float, tol: float = 1e-10, max_arc: float | None = None,
                       pole_buffer: float = 1e-3, return_radius: float = 1e-6, max_step: float = 0.05) -> StokesGraph:
    if not 0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    c = float(data.c)
    v = float(data.v)
    if max_arc is None:
        max_arc = 50 * abs(v)
    start = 1e-7 * abs(v)
    # Near z = 0 the primitive is F(0) - (2/(3c^2)) z^3, so the three outgoing
    # directions with e^{-i theta}(F - F(0)) > 0 are 3 psi = theta + pi (mod 2 pi).
    curves = []
    for k in range(3):
        psi = (theta + math.pi + 2 * math.pi * k) / 3
        # the per-step tolerance is tightened so the accumulated drift stays below tol
        curves.append(_trace_one(c, theta, psi, tol * _LOCAL_TOL, max_arc, pole_buffer, return_radius, max_step, start))
    saddles = []
    returned = [i for i, cv in enumerate(curves) if cv.end == "returned"]
    # a loop through the single turning point is traced once from each end
    while returned:
        i = returned.pop(0)
        cv = curves[i]
        twin = [j for j in returned if curves[j].winding == -cv.winding]
        members = [i] + twin[:1]
        if twin:
            returned.remove(twin[0])
        saddles.append({"kind": "loop" if cv.winding else "segment", "winding_around_origin": abs(cv.winding), "curves": members})
    notes = {}
    if any(cv.end == "collapse" for cv in curves):
        notes["step_size_collapse"] = True
    return StokesGraph(theta, [complex(v)], curves, saddles, notes)


def loop_miss(data: SchroedingerData, theta: float, **opts) -> float:
    """Closest approach to the turning point of a curve that has wound around x = 0."""
    opts.setdefault("return_radius", 1e-12)  # keep tracing through the closest approach
    g = trace_stokes_graph(data, theta, **opts)
    return min(cv.closest_return for cv in g.curves)


def locate_loop_direction(data: SchroedingerData, lo: float, hi: float, iters: int = 40, **opts) -> tuple:
    """Golden-section search for the phase of the loop saddle connection in [lo, hi]."""
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c1 = b - g * (b - a)
    c2 = a + g * (b - a)
    f1, f2 = loop_miss(data, c1, **opts), loop_miss(data, c2, **opts)
    for _ in range(iters):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - g * (b - a)
            f1 = loop_miss(data, c1, **opts)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + g * (b - a)
            f2 = loop_miss(data, c2, **opts)
        if b - a < 1e-9:
            break
    theta = (a + b) / 2
    return theta, loop_miss(data, theta, **opts)


def loop_domain(data: SchroedingerData, x: complex, **opts) -> str:
    """"D0" if x lies inside the loop saddle connection (the side containing x = 0), else "Dinf".

    Only meaningful for real w0 - w1, where the loop sits at theta = pi/2.
    """
    g = trace_stokes_graph(data, math.pi / 2, **opts)
    if not g.saddle_connections:
        raise ArithmeticError("no loop saddle connection at theta = pi/2")
    poly = g.curves[g.saddle_connections[0]["curves"][0]].points
    x = complex(x)
    inside = False
    for a, b in zip(poly, poly[1:] + poly[:1]):
        if (a.imag > x.imag) != (b.imag > x.imag):
            t = (x.imag - a.imag) / (b.imag - a.imag)
            if x.real < a.real + t * (b.real - a.real):
                inside = not inside
    return "D0" if inside else "Dinf"


def graph_to_svg(graph: StokesGraph, size: int = 480, extent: float | None = None) -> str:
    pts = [p for cv in graph.curves for p in cv.points]
    if extent is None:
        extent = max(1.0, max((abs(p) for p in pts), default=1.0))
        extent = min(extent, 4 * max(1.0, abs(graph.turning_points[0])) + 2)
    s = size / (2 * extent)

    def tr(p: complex):
        return (size / 2 + p.real * s, size / 2 - p.imag * s)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    loops = {i for sc in graph.saddle_connections for i in sc["curves"]}
    for i, cv in enumerate(graph.curves):
        step = max(1, len(cv.points) // 2000)
        coords = " ".join("%.3f,%.3f" % tr(p) for p in cv.points[::step] if abs(p) <= 2 * extent)
        color = "red" if i in loops else "black"
        width = 2 if i in loops else 1
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{coords}"/>')
    for v in graph.turning_points:
        x, y = tr(v)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="4" fill="blue"/>')
    x0, y0 = tr(0j)
    out.append(f'<path d="M{x0 - 5:.3f},{y0 - 5:.3f} L{x0 + 5:.3f},{y0 + 5:.3f} M{x0 - 5:.3f},{y0 + 5:.3f} L{x0 + 5:.3f},{y0 - 5:.3f}" stroke="black" stroke-width="2"/>')
    out.append(f'<text x="8" y="18" font-size="14">theta = {graph.theta:.6f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Stokes directions at a point


def first_sheet_z(data: SchroedingerData, x: complex) -> complex:
    """z on the first sheet: principal square root, cut along (-inf, v], z -> c as x -> 0."""
    c = float(data.c)
    z = cmath.sqrt(x + c * c)
    return z if c > 0 else -z


def normalized_period(data: SchroedingerData, x: complex) -> complex:
    """w(x) = integral of sqrt(Q0) dx along gamma_x, i.e. twice the integral from v."""
    c = float(data.c)
    z = first_sheet_z(data, x)
    F0 = c * 1j * math.pi
    return 2 * (_period_primitive(z, c) - F0)


@dataclass
class StokesEvent:
    theta: float
    triangular: str  # lower | upper
    m: int
    sign: int  # +1: theta = arg(w + m delta), -1: arg(-w + m delta)

    def to_json(self) -> dict:
        return {"theta": self.theta, "triangular": self.triangular, "m": self.m, "sign": self.sign}


def _hits(data: SchroedingerData, theta: float, x: complex, radius: float, **opts):
    """Sheet signs (+1 first sheet, -1 second) at which a Stokes curve of phase theta passes x."""
    g = trace_stokes_graph(data, theta, **opts)
    zx = first_sheet_z(data, x)
    out = []
    for cv in g.curves:
        for a, b in zip(cv.zs, cv.zs[1:]):
            for sgn in (1, -1):
                if _seg_dist(sgn * zx, a, b) < radius:
                    out.append(sgn)
                    break
            else:
                continue
            break
    return out


def _seg_dist(p: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def stokes_events(data: SchroedingerData, x: complex, m_cut: int = 6, radius: float = 1e-4, **opts) -> dict:
    """Phases in (0, pi) at which a Stokes curve hits x, with the triangularity of each jump.

    Candidates are theta = arg(+-w(x) + m delta); each is confirmed by tracing
    the Stokes graph at that phase.  A hit on the first sheet means
    e^{-i theta} int_v^x sqrt(Q0) dx > 0 (lower triangular), on the second
    sheet < 0 (upper triangular).
    """
    x = complex(x)
    if x == 0 or abs(x - float(data.v)) < 1e-12:
        raise ValueError("x must differ from the pole and the turning point")
    w = normalized_period(data, x)
    delta = 2j * math.pi * float(data.w0 - data.w1)
    events = []
    truncated = False
    for sign in (1, -1):
        for m in range(-m_cut, m_cut + 1):
            u = sign * w + m * delta
            th = cmath.phase(u)
            if not 0 < th < math.pi:
                continue
            hits = _hits(data, th, x, radius, **opts)
            if not hits:
                continue
            if abs(m) == m_cut:
                truncated = True
            tri = "lower" if hits[0] == 1 else "upper"
            events.append(StokesEvent(th, tri, m, sign))
    events.sort(key=lambda e: e.theta)
    below = [e for e in events if e.theta < math.pi / 2]
    above = [e for e in events if e.theta > math.pi / 2]
    accumulating = truncated and len(below) >= m_cut - 1 and len(above) >= m_cut - 1
    return {
        "x": _cj(x),
        "w": _cj(w),
        "events": events,
        "accumulates_at_half_pi": accumulating,
        "truncated_at_m": m_cut if truncated else None,
    }


# ---------------------------------------------------------------------------
# Stokes matrices


def _gq(v) -> tuple:
    if isinstance(v, tuple):
        return v
    if isinstance(v, complex):
        raise TypeError("symbolic entries need exact coefficients")
    return (Fraction(v), Fraction(0))


class EPoly:
    """Laurent polynomial in E = e^V with Gaussian-rational coefficients.

    ``floor`` truncates powers below E^floor (power series in e^{-V}).
    """

    __slots__ = ("terms", "floor")

    def __init__(self, terms: dict | None = None, floor: int | None = None):
        self.floor = floor
        self.terms = {}
        for k, v in (terms or {}).items():
            v = _gq(v)
            if v != (0, 0) and (floor is None or k >= floor):
                self.terms[k] = v

    @classmethod
    def const(cls, re=0, im=0, floor=None) -> "EPoly":
        return cls({0: (Fraction(re), Fraction(im))}, floor)

    @classmethod
    def e(cls, k: int = 1, re=1, im=0, floor=None) -> "EPoly":
        return cls({k: (Fraction(re), Fraction(im))}, floor)

    def _fl(self, o):
        fs = [f for f in (self.floor, o.floor) if f is not None]
        return max(fs) if fs else None

    def __add__(self, o):
        o = o if isinstance(o, EPoly) else EPoly.const(o)
        t = dict(self.terms)
        for k, (a, b) in o.terms.items():
            p, q = t.get(k, (0, 0))
            t[k] = (p + a, q + b)
        return EPoly(t, self._fl(o))

    def __neg__(self):
        return EPoly({k: (-a, -b) for k, (a, b) in self.terms.items()}, self.floor)

    def __sub__(self, o):
        return self + (-(o if isinstance(o, EPoly) else EPoly.const(o)))

    def __mul__(self, o):
        o = o if isinstance(o, EPoly) else EPoly.const(o)
        fl = self._fl(o)
        t: dict = {}
        for k1, (a, b) in self.terms.items():
            for k2, (c, d) in o.terms.items():
                k = k1 + k2
                if fl is not None and k < fl:
                    continue
                p, q = t.get(k, (0, 0))
                t[k] = (p + a * c - b * d, q + a * d + b * c)
        return EPoly(t, fl)

    def __eq__(self, o):
        o = o if isinstance(o, EPoly) else EPoly.const(o)
        fl = self._fl(o)
        a = {k: v for k, v in self.terms.items() if fl is None or k >= fl}
        b = {k: v for k, v in o.terms.items() if fl is None or k >= fl}
        return a == b

    def evaluate(self, V: complex) -> complex:
        return sum(complex(float(a), float(b)) * cmath.exp(k * V) for k, (a, b) in self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for k in sorted(self.terms, reverse=True):
            coef = _gauss_str(*self.terms[k])
            if k:
                power = "e^V" if k == 1 else f"e^({k}V)"
                if coef in ("1", "-1"):
                    coef = coef[:-1]
                    term = coef + power
                else:
                    term = f"({coef})*{power}" if ("+" in coef[1:] or "-" in coef[1:]) else f"{coef}*{power}"
            else:
                term = coef
            out += term if not out else (" - " + term[1:] if term.startswith("-") else " + " + term)
        return out


def _gauss_str(a: Fraction, b: Fraction) -> str:
    if b == 0:
        return str(a)
    im = "i" if abs(b) == 1 else f"{str(abs(b))}i"
    if a == 0:
        return im if b > 0 else "-" + im
    return f"{str(a)}{'+' if b > 0 else '-'}{im}"


def _mat_mul(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


@dataclass
class StokesMatrix:
    entries: list  # 2x2 of complex or EPoly
    symbolic: bool
    region: str
    notes: dict = field(default_factory=dict)

    def det(self):
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def numeric(self, V: complex) -> list:
        if not self.symbolic:
            return self.entries
        return [[e.evaluate(V) for e in row] for row in self.entries]

    def to_json(self) -> dict:
        if self.symbolic:
            ent = [[str(e) for e in row] for row in self.entries]
        else:
            ent = [[_cj(e) for e in row] for row in self.entries]
        return {"region": self.region, "symbolic": self.symbolic, "entries": ent, "notes": self.notes}


def _x1_symbolic(floor=None):
    q = EPoly.e(-1, floor=floor)
    one = EPoly.const(1, floor=floor)
    mi = EPoly.const(0, -1, floor=floor)
    return [[one - q, mi * q], [mi, one]]


def _x3_symbolic():
    one = EPoly.const(1)
    mi = EPoly.const(0, -1)
    return [[one, EPoly()], [mi * (one + EPoly.e(1)), one]]


def _x2_factors_numeric(V: complex, cutoff: float):
    q = cmath.exp(-V)
    if abs(q) >= 1:
        raise ArithmeticError("|e^{-V}| >= 1: the infinite products diverge")
    n_terms = 1
    while abs(q) ** n_terms > cutoff:
        n_terms += 1
    lower = [[1, 0], [0, 1]]
    for n in range(0, n_terms + 1):
        lower = _mat_mul(lower, [[1, 0], [-1j * q ** n, 1]])
    upper = [[1, 0], [0, 1]]
    for n in range(1, n_terms + 1):
        upper = _mat_mul(upper, [[1, -1j * q ** n], [0, 1]])
    diag = [[1 - q, 0], [0, 1 / (1 - q)]]
    return lower, diag, upper, n_terms


def _x2_symbolic(order: int):
    fl = -order
    one = EPoly.const(1, floor=fl)
    mi = EPoly.const(0, -1, floor=fl)
    zero = EPoly(floor=fl)
    lower = [[one, zero], [zero, one]]
    for n in range(0, order + 1):
        lower = _mat_mul(lower, [[one, zero], [mi * EPoly.e(-n, floor=fl), one]])
    upper = [[one, zero], [zero, one]]
    for n in range(1, order + 1):
        upper = _mat_mul(upper, [[one, mi * EPoly.e(-n, floor=fl)], [zero, one]])
    q = EPoly.e(-1, floor=fl)
    geo = EPoly({-k: (1, 0) for k in range(order + 1)}, fl)  # 1/(1-q)
    diag = [[one - q, zero], [zero, geo]]
    return _mat_mul(_mat_mul(lower, diag), upper)


def total_stokes_matrix(region: str, V="symbol", cutoff: float = 1e-30, series_order: int = 12) -> StokesMatrix:
    """Total Stokes matrix at the base points x1 (outside the loop), x2 (inside) or x3.

    ``V`` is the Voros coefficient; "symbol" returns entries in E = e^V
    (for x2 as a power series in e^{-V} truncated at ``series_order``).
    """
    if region not in ("x1", "x2", "x3"):
        raise ValueError(f"unknown region {region!r}")
    if V == "symbol":
        if region == "x1":
            return StokesMatrix(_x1_symbolic(), True, region)
        if region == "x3":
            return StokesMatrix(_x3_symbolic(), True, region)
        return StokesMatrix(_x2_symbolic(series_order), True, region, {"series_in_e^-V_to_order": series_order})
    V = complex(V)
    if region == "x1":
        return StokesMatrix(StokesMatrix(_x1_symbolic(), True, region).numeric(V), False, region)
    if region == "x3":
        return StokesMatrix(StokesMatrix(_x3_symbolic(), True, region).numeric(V), False, region)
    lower, diag, upper, n = _x2_factors_numeric(V, cutoff)
    return StokesMatrix(_mat_mul(_mat_mul(lower, diag), upper), False, region, {"terms": n})


def wall_crossing_check(V: complex, cutoff: float = 1e-30) -> float:
    """Max-norm residual of upper(e^{-V}) lower(1) = lower-product * diag * upper-product."""
    V = complex(V)
    q = cmath.exp(-V)
    lhs = _mat_mul([[1, -1j * q], [0, 1]], [[1, 0], [-1j, 1]])
    lower, diag, upper, _ = _x2_factors_numeric(V, cutoff)
    rhs = _mat_mul(_mat_mul(lower, diag), upper)
    return max(abs(lhs[i][j] - rhs[i][j]) for i in range(2) for j in range(2))


def euler_pairing(w0, w1, hbar: complex) -> complex:
    """Equivariant Euler pairing 1 + e^{2 pi i (w0 - w1)/hbar}."""
    hbar = complex(hbar)
    if hbar == 0:
        raise ValueError("hbar must be nonzero")
    return 1 + cmath.exp(2j * math.pi * (float(w0) - float(w1)) / hbar)


def euler_pairing_symbolic() -> EPoly:
    """1 + E with E = e^{V}, V the Voros coefficient."""
    return EPoly.const(1) + EPoly.e(1)


def x3_multiplier_matches_euler_pairing() -> bool:
    S = total_stokes_matrix("x3")
    return S.entries[1][0] == EPoly.const(0, -1) * euler_pairing_symbolic()
