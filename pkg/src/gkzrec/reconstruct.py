"""Newton polygons, admissibility and reconstruction of the quantum curve
from the defining polynomial P(x, Y) = A(x, xY)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil, gcd

from .curve import SpectralCurve, STANDARD
from .exactalg import INF, BiPoly, Poly, RatFunc, Z, fmt_scalar
from .wkb import HBAR, X, ThetaOperator


@dataclass
class NewtonPolygon:
    support: list  # lattice points (k, i): x-exponent k, Y-exponent i
    hull: list  # counter-clockwise vertices
    alpha: dict  # level i -> min k on the hull
    beta: dict  # level i -> max k on the hull

    def area(self) -> Fraction:
        h = self.hull
        if len(h) < 3:
            return Fraction(0)
        s = 0
        for (x1, y1), (x2, y2) in zip(h, h[1:] + h[:1]):
            s += x1 * y2 - x2 * y1
        return Fraction(abs(s), 2)

    def boundary_points(self) -> int:
        h = self.hull
        if len(h) == 1:
            return 1
        if len(h) == 2:
            (x1, y1), (x2, y2) = h
            return gcd(abs(x2 - x1), abs(y2 - y1)) + 1
        return sum(gcd(abs(x2 - x1), abs(y2 - y1)) for (x1, y1), (x2, y2) in zip(h, h[1:] + h[:1]))

    def interior_points(self) -> list:
        """Lattice points strictly inside the hull, by enumeration over the bounding box."""
        h = self.hull
        if len(h) < 3:
            return []
        xs = [p[0] for p in h]
        ys = [p[1] for p in h]
        out = []
        for k in range(min(xs), max(xs) + 1):
            for i in range(min(ys), max(ys) + 1):
                if all(_cross(a, b, (k, i)) > 0 for a, b in zip(h, h[1:] + h[:1])):
                    out.append((k, i))
        return out

    def pick_interior(self) -> Fraction | None:
        if len(self.hull) < 3:
            return None
        return self.area() - Fraction(self.boundary_points(), 2) + 1

    def level_interior_count(self) -> int:
        """sum over strictly interior levels of (ceil(beta_i) - floor(alpha_i) - 1)."""
        levels = sorted(self.alpha)
        total = 0
        for i in levels[1:-1]:
            a, b = self.alpha[i], self.beta[i]
            lo = floor(a) + 1
            hi = ceil(b) - 1
            total += max(0, hi - lo + 1)
        return total

    def to_json(self, admissible: bool | None = None) -> dict:
        d = {"support": [list(p) for p in sorted(self.support)], "hull": [list(p) for p in self.hull]}
        d["alpha"] = {str(i): fmt_scalar(a) for i, a in sorted(self.alpha.items())}
        d["beta"] = {str(i): fmt_scalar(b) for i, b in sorted(self.beta.items())}
        if admissible is not None:
            d["admissible"] = admissible
        return d


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Andrew's monotone chain, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) > 1 else pts[:1]


def _level_range(hull: list, i: int):
    """(min, max) of k over the hull intersected with the line Y-exponent = i."""
    if len(hull) == 1:
        return Fraction(hull[0][0]), Fraction(hull[0][0])
    vals = []
    edges = list(zip(hull, hull[1:] + hull[:1])) if len(hull) > 2 else [(hull[0], hull[1])]
    for (k1, i1), (k2, i2) in edges:
        if i1 == i2:
            if i1 == i:
                vals += [Fraction(k1), Fraction(k2)]
        elif min(i1, i2) <= i <= max(i1, i2):
            vals.append(Fraction(k1) + Fraction((i - i1) * (k2 - k1), i2 - i1))
    return min(vals), max(vals)


def newton_polygon(P: BiPoly) -> NewtonPolygon:
    if P.is_zero():
        raise ValueError("zero polynomial has no Newton polygon")
    support = sorted(P.terms)
    hull = convex_hull(support)
    levels = [p[1] for p in support]
    alpha, beta = {}, {}
    for i in range(min(levels), max(levels) + 1):
        alpha[i], beta[i] = _level_range(hull, i)
    return NewtonPolygon(support, hull, alpha, beta)


def admissibility_check(polygon: NewtonPolygon, P: BiPoly) -> bool:
    if polygon.interior_points():
        return False
    if P.coeff(0, 0) == 0:
        if P.coeff(1, 0) == 0 and P.coeff(0, 1) == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class ReconstructionInput:
    P: BiPoly  # variables (x, Y)
    r: int
    p: list  # p_k(x) as Poly, P = sum_k p_k(x) Y^(r-k)
    alpha_floor: list  # floor(alpha_i), i = 0..r
    polygon: NewtonPolygon


def shifted_polynomial(A: BiPoly) -> BiPoly:
    """P(x, Y) = A(x, x Y)."""
    return BiPoly({(i + j, j): c for (i, j), c in A.terms.items()})


def reconstruction_input(curve: SpectralCurve) -> ReconstructionInput:
    P = shifted_polynomial(curve.A)
    poly = newton_polygon(P)
    if not admissibility_check(poly, P):
        raise ValueError("curve is not admissible")
    r = P.degree(1)
    cols = P.coeffs_in(1)
    p = [cols.get(r - k, Poly()) for k in range(r + 1)]
    floors = [floor(poly.alpha[i]) for i in range(r + 1)]
    return ReconstructionInput(P, r, p, floors, poly)


def ck_limits(curve: SpectralCurve, data: ReconstructionInput | None = None) -> list:
    """C_1..C_{r-1} as exact limits at the divisor endpoint z = infinity."""
    if curve.z_star is not INF or curve.kind != STANDARD:
        raise ValueError("ck_limits needs the standard coordinate with z_* = infinity")
    data = data or reconstruction_input(curve)
    x = curve.x
    Y = curve.y / x
    out = []
    for k in range(1, data.r):
        Pk = RatFunc()
        for i in range(1, k + 1):
            Pk = Pk + data.p[k - i](x) * Y ** i
        val = (Pk / x ** (data.alpha_floor[data.r - k] + 1)).limit(INF)
        if val is INF:
            raise ArithmeticError(f"C_{k} diverges; wrong alpha floor or inadmissible curve")
        out.append(val)
    return out


def _x_power(m: int) -> ThetaOperator:
    return ThetaOperator.mult(BiPoly({(m, 0): 1}))


def _poly_in_x(p: Poly, shift: int) -> ThetaOperator:
    return ThetaOperator.mult(BiPoly({(k - shift, 0): c for k, c in enumerate(p.c) if c}))


def assemble_operator(curve: SpectralCurve, data: ReconstructionInput | None = None) -> ThetaOperator:
    data = data or reconstruction_input(curve)
    r, a, p = data.r, data.alpha_floor, data.p
    C = ck_limits(curve, data)
    theta = ThetaOperator.theta()
    # D_k = hbar x^(a_k - a_{k-1}) d/dx = x^(a_k - a_{k-1} - 1) theta
    D = [None] + [_x_power(a[k] - a[k - 1] - 1) * theta for k in range(1, r + 1)]

    def chain(m: int) -> ThetaOperator:
        out = ThetaOperator.mult(1)
        for k in range(1, m + 1):
            out = out * D[k]
        return out

    op = ThetaOperator.mult(0)
    for j in range(r):
        op = op + chain(r - j - 1) * _poly_in_x(p[j], a[r - j]) * D[r - j]
    op = op + _poly_in_x(p[r], a[0])
    for k in range(1, r):
        op = op - chain(r - k - 1) * _x_power(a[r - k] - a[r - k - 1]) * (HBAR * C[k - 1])
    # clear negative powers of x by a left multiplication
    low = min((i for c in op.coeffs for (i, _j) in c.terms), default=0)
    if low < 0:
        op = _x_power(-low) * op
    return op


def equality_check(reconstructed: ThetaOperator, target: ThetaOperator) -> dict:
    """Coefficientwise equality up to one nonzero overall constant."""
    # normalize on the leading theta power
    ref = None
    for k in range(len(target.coeffs) - 1, -1, -1):
        c = target.coeffs[k]
        if c.terms:
            key = min(c.terms)
            ref = (k, key, c.terms[key])
            break
    if ref is None:
        return {"equal": reconstructed.coeffs == [BiPoly()], "constant": None}
    k0, key0, v0 = ref
    r0 = reconstructed.coeffs[k0].coeff(*key0) if k0 < len(reconstructed.coeffs) else 0
    if r0 == 0:
        return {"equal": False, "first_difference": [k0, key0[0], key0[1]], "constant": None}
    const = Fraction(r0) / v0
    n = max(len(reconstructed.coeffs), len(target.coeffs))
    for k in range(n):
        a = reconstructed.coeffs[k] if k < len(reconstructed.coeffs) else BiPoly()
        b = target.coeffs[k] if k < len(target.coeffs) else BiPoly()
        keys = sorted(set(a.terms) | set(b.terms))
        for key in keys:
            if a.coeff(*key) != b.coeff(*key) * const:
                return {"equal": False, "first_difference": [k, key[0], key[1]], "constant": fmt_scalar(const)}
    return {"equal": True, "constant": fmt_scalar(const)}


def key_identity_check(ell: int) -> bool:
    """x (theta + hbar)^l = theta^(l-1) x theta + hbar theta^(l-1) x, as actions on x^s."""
    theta = ThetaOperator.theta()
    xop = ThetaOperator.mult(X)
    lhs = xop * (theta + ThetaOperator.mult(HBAR)) ** ell
    rhs = theta ** (ell - 1) * xop * theta + theta ** (ell - 1) * xop * ThetaOperator.mult(HBAR)
    return lhs.act_on_power() == rhs.act_on_power() and lhs == rhs


def ck_closed_form(N: int, n: int, lam) -> list:
    """C_k = 0 for k <= N-n-1, else (-1)^(k-N+n) e_{k-N+n}(lambda)."""
    from .curve import elementary_symmetric

    out = []
    for k in range(1, N):
        if k <= N - n - 1:
            out.append(Fraction(0))
        else:
            j = k - N + n
            out.append((-1) ** j * elementary_symmetric(list(lam), j))
    return out
