"""Mirror Landau-Ginzburg potentials, their critical points and the
Gaussian-moment saddle-point expansion of the oscillatory integral.

Coordinates are ordered (u_1..u_{N-1}, v_1..v_n).  With T = x prod(v)/prod(u),

    W = sum_i (u_i + w_i log u_i) - sum_a (v_a + lambda_a log v_a) + T + w_0 log T.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .curve import CurveModel, critical_coordinates, critical_points_u1
from .exactalg import MultiSeries, to_mp


@dataclass
class LGPotential:
    model: CurveModel

    @property
    def dimension(self) -> int:
        return self.model.N - 1 + self.model.n

    def _split(self, coords):
        k = self.model.N - 1
        return list(coords[:k]), list(coords[k:])

    def _t(self, us, vs, x):
        t = mpmath.mpmathify(x)
        for v in vs:
            t *= v
        for u in us:
            t /= u
        return t

    def value(self, coords, x):
        """W on the principal branch of every logarithm."""
        m = self.model
        us, vs = self._split(coords)
        T = self._t(us, vs, x)
        out = mpmath.mpf(0)
        for u, wi in zip(us, m.w[1:]):
            out += u + to_mp(wi) * mpmath.log(u)
        for v, la in zip(vs, m.lam):
            out -= v + to_mp(la) * mpmath.log(v)
        return out + T + to_mp(m.w[0]) * mpmath.log(T)

    def gradient(self, coords, x) -> list:
        m = self.model
        us, vs = self._split(coords)
        T = self._t(us, vs, x)
        w0 = to_mp(m.w[0])
        g = [1 + (to_mp(wi) - T - w0) / u for u, wi in zip(us, m.w[1:])]
        g += [-1 + (T + w0 - to_mp(la)) / v for v, la in zip(vs, m.lam)]
        return g

    def hessian(self, coords, x) -> list:
        m = self.model
        us, vs = self._split(coords)
        T = self._t(us, vs, x)
        w0 = to_mp(m.w[0])
        zs = us + vs
        k = len(zs)
        nu = len(us)
        H = [[mpmath.mpf(0)] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                same_side = (i < nu) == (j < nu)
                if i == j:
                    if i < nu:
                        H[i][i] = (w0 - to_mp(m.w[i + 1]) + 2 * T) / zs[i] ** 2
                    else:
                        H[i][i] = (to_mp(m.lam[i - nu]) - w0) / zs[i] ** 2
                else:
                    H[i][j] = (T if same_side else -T) / (zs[i] * zs[j])
        return H


@dataclass
class CriticalPoint:
    coordinates: list
    type: int  # 1: grows like x^(1/(N-n)); 2: anchored at a lambda
    hessian_det: object
    x: object = None
    y: object = None  # x dW/dx at the point, a point of the spectral curve

    def to_json(self) -> dict:
        return {
            "coords": [_cjson(c) for c in self.coordinates],
            "type": self.type,
            "hessian_det": _cjson(self.hessian_det),
            "y": _cjson(self.y),
        }


def _cjson(v) -> dict:
    v = mpmath.mpc(v)
    return {"re": mpmath.nstr(v.real, 30), "im": mpmath.nstr(v.imag, 30)}


def _det(M: list):
    n = len(M)
    A = [row[:] for row in M]
    det = mpmath.mpf(1)
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(A[r][c]))
        if A[p][c] == 0:
            return mpmath.mpf(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for j in range(c, n):
                A[r][j] -= f * A[c][j]
    return det


# ---------------------------------------------------------------------------
# type classification by continuation to large x


def _u1_poly(model: CurveModel, x: complex) -> list:
    """Float coefficients (low to high) of prod(u + w1 - w_i) - x prod(u + w1 - lambda_a)."""
    w1 = float(model.w[1])

    def from_roots(shifts):
        c = [1.0 + 0j]
        for s in shifts:
            nxt = [0j] * (len(c) + 1)
            for i, a in enumerate(c):
                nxt[i] += a * s
                nxt[i + 1] += a
            c = nxt
        return c

    left = from_roots([w1 - float(wi) for wi in model.w])
    right = from_roots([w1 - float(la) for la in model.lam])
    return [a - x * (right[i] if i < len(right) else 0) for i, a in enumerate(left)]


def _newton(coeffs: list, z: complex, steps: int = 30) -> complex:
    d = [i * a for i, a in enumerate(coeffs)][1:]
    for _ in range(steps):
        p = 0j
        for a in reversed(coeffs):
            p = p * z + a
        q = 0j
        for a in reversed(d):
            q = q * z + a
        if q == 0:
            break
        dz = p / q
        z -= dz
        if abs(dz) <= 1e-14 * (1 + abs(z)):
            break
    return z


_DETOUR = 0.05


def classify_types(model: CurveModel, x, roots: list, x_far: float = 1e12) -> list:
    """Follow each root u_1(x) along a ray to |x| = x_far and read off its growth."""
    N, n = model.N, model.n
    if n == 0:
        return [1] * len(roots)
    x0 = complex(x)
    phase = x0 / abs(x0)
    t0 = math.log(abs(x0))
    t1 = max(math.log(x_far), t0 + 10)
    zs = [complex(r) for r in roots]
    steps = max(50, int((t1 - t0) / 0.02))
    # bend the path off the ray so it cannot run through a collision of roots
    for s in range(1, steps + 1):
        f = s / steps
        xt = phase * cmath.exp(t0 + (t1 - t0) * f + 1j * _DETOUR * math.sin(math.pi * f))
        coeffs = _u1_poly(model, xt)
        zs = [_newton(coeffs, z) for z in zs]
    X = math.exp(t1)
    w1 = float(model.w[1])
    out = []
    for z in zs:
        v_min = min(abs(z + w1 - float(la)) for la in model.lam)
        out.append(2 if v_min < X ** -0.5 else 1)
    if out.count(1) != N - n:
        raise ArithmeticError("continuation to large x lost track of the critical points")
    return out


def critical_points(pot: LGPotential, x, precision: int = 166) -> list:
    model = pot.model
    with mpmath.workprec(precision):
        exact = isinstance(x, (int, Fraction))
        xv = to_mp(x) if exact else mpmath.mpmathify(x)
        if xv == 0:
            raise ValueError("x must be nonzero")
        roots = [to_mp(r) if isinstance(r, Fraction) else r for r in critical_points_u1(model, x if exact else xv, precision)]
        tol = mpmath.mpf(2) ** (-precision // 2)
        for i, a in enumerate(roots):
            for b in roots[i + 1:]:
                if abs(a - b) <= tol * (1 + abs(a)):
                    raise ArithmeticError("degenerate critical point (multiple root)")
        types = classify_types(model, complex(xv), roots)
        out = []
        for r, tp in zip(roots, types):
            us, vs = critical_coordinates(model, r)
            coords = [to_mp(c) for c in us + vs]
            H = pot.hessian(coords, xv)
            det = _det(H)
            if det == 0:
                raise ArithmeticError("degenerate critical point (singular Hessian)")
            T = pot._t(*pot._split(coords), xv)
            out.append(CriticalPoint(coords, tp, det, xv, T + to_mp(model.w[0])))
        return out


def gradient_norm(pot: LGPotential, cp: CriticalPoint):
    return max(abs(g) for g in pot.gradient(cp.coordinates, cp.x)) if pot.dimension else mpmath.mpf(0)


# ---------------------------------------------------------------------------
# saddle-point expansion


def _log1p_series(t: MultiSeries, order: int) -> MultiSeries:
    out = MultiSeries(t.num_vars, {}, t.cap)
    p = t
    for j in range(1, order + 1):
        out = out + p * (mpmath.mpf((-1) ** (j + 1)) / j)
        p = p * t
    return out


def _inv1p_series(t: MultiSeries, order: int) -> MultiSeries:
    out = MultiSeries.constant(t.num_vars, 1, t.cap)
    p = MultiSeries.constant(t.num_vars, 1, t.cap)
    for _ in range(order):
        p = p * (-t)
        out = out + p
    return out


def taylor_at(pot: LGPotential, cp: CriticalPoint, order: int) -> MultiSeries:
    """W(cp + xi) - W(cp) as a polynomial in xi up to total degree ``order``."""
    m = pot.model
    k = pot.dimension
    us, vs = pot._split(cp.coordinates)
    T = pot._t(us, vs, cp.x)
    xi = [MultiSeries.variable(k, i, order) for i in range(k)]
    nu = len(us)
    out = MultiSeries(k, {}, order)
    log_ratio = MultiSeries(k, {}, order)
    for i, (u, wi) in enumerate(zip(us, m.w[1:])):
        L = _log1p_series(xi[i] * (1 / u), order)
        out = out + xi[i] + L * to_mp(wi)
        log_ratio = log_ratio - L
    for a, (v, la) in enumerate(zip(vs, m.lam)):
        L = _log1p_series(xi[nu + a] * (1 / v), order)
        out = out - xi[nu + a] - L * to_mp(la)
        log_ratio = log_ratio + L
    out = out + (log_ratio.exp() - 1) * T + log_ratio * to_mp(m.w[0])
    return out


def _ldl(H: list):
    """H = L diag(D) L^T for complex symmetric H without pivoting."""
    k = len(H)
    L = [[mpmath.mpf(1) if i == j else mpmath.mpf(0) for j in range(k)] for i in range(k)]
    D = [mpmath.mpf(0)] * k
    for j in range(k):
        D[j] = H[j][j] - sum(L[j][t] ** 2 * D[t] for t in range(j))
        if D[j] == 0:
            raise ArithmeticError("zero pivot in the quadratic form")
        for i in range(j + 1, k):
            L[i][j] = (H[i][j] - sum(L[i][t] * L[j][t] * D[t] for t in range(j))) / D[j]
    return L, D


def _morse_change(H: list):
    """C with C^T H C = identity, by completing squares."""
    k = len(H)
    L, D = _ldl(H)
    # C = L^{-T} diag(D)^{-1/2}; solve L^T C = diag(D)^{-1/2} by back substitution
    C = [[mpmath.mpf(0)] * k for _ in range(k)]
    for col in range(k):
        rhs = [mpmath.mpf(0)] * k
        rhs[col] = 1 / mpmath.sqrt(D[col])
        for i in range(k - 1, -1, -1):
            C[i][col] = rhs[i] - sum(L[t][i] * C[t][col] for t in range(i + 1, k))
    return C, D


def _graded_mul(a: list, b: list, top: int) -> list:
    out = [None] * (top + 1)
    for i, p in enumerate(a):
        if p is None or not p.terms:
            continue
        for j in range(top + 1 - i):
            q = b[j]
            if q is None or not q.terms:
                continue
            r = p * q
            out[i + j] = r if out[i + j] is None else out[i + j] + r
    return out


def _gaussian_mean(p: MultiSeries | None):
    """<p(s)> for the standard normal weight, normalized by (2 pi)^(k/2)."""
    if p is None:
        return mpmath.mpf(0)
    total = mpmath.mpf(0)
    for e, c in p.terms.items():
        if any(a % 2 for a in e):
            continue
        w = 1
        for a in e:
            w *= _double_factorial(a - 1)
        total += c * w
    return total


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def wick_expansion(W: MultiSeries, C: list, measure: MultiSeries | None, m_max: int) -> list:
    """I_1..I_m of exp(W/hbar) * measure around a critical point of W.

    W is a polynomial in xi (only degrees >= 3 are used), C satisfies
    C^T H C = 1 for the Hessian H of W.  With xi = (-hbar)^(1/2) C s and
    g = hbar^(1/2), the degree-j part of W contributes g^(j-2) W_j(i C s) and
    the degree-d part of the measure contributes g^d; I_m is the Gaussian mean
    of the g^(2m) coefficient.
    """
    k = W.num_vars
    top = 2 * m_max
    rows = [[1j * C[i][j] for j in range(k)] for i in range(k)]
    Ws = W.linear_substitute(rows)
    big = 3 * top + 2
    E = [None] * (top + 1)
    for j in range(3, top + 3):
        h = Ws.homogeneous(j)
        if h.terms:
            E[j - 2] = MultiSeries(k, h.terms, big)
    P = [MultiSeries.constant(k, 1, big)] + [None] * top
    if measure is not None:
        ms = measure.linear_substitute(rows)
        P = [None] * (top + 1)
        for d in range(top + 1):
            h = ms.homogeneous(d)
            if h.terms:
                P[d] = MultiSeries(k, h.terms, big)

    one = MultiSeries.constant(k, 1, big)
    expE = [one] + [None] * top
    power = [one] + [None] * top
    fact = 1
    for j in range(1, top + 1):
        power = _graded_mul(power, E, top)
        fact *= j
        for d in range(top + 1):
            if power[d] is not None and power[d].terms:
                add = power[d] * (mpmath.mpf(1) / fact)
                expE[d] = add if expE[d] is None else expE[d] + add
    F = _graded_mul(expE, P, top)
    return [_gaussian_mean(F[2 * m]) for m in range(1, m_max + 1)]


def hessian_of(W: MultiSeries) -> list:
    k = W.num_vars
    H = [[mpmath.mpf(0)] * k for _ in range(k)]
    for e, c in W.homogeneous(2).terms.items():
        i, j = [i for i, a in enumerate(e) for _ in range(a)]
        if i == j:
            H[i][i] = 2 * c
        else:
            H[i][j] = H[j][i] = c
    return H


@dataclass
class SaddleExpansion:
    critical_point: CriticalPoint
    S0: object
    prefactor: object
    I: list  # I_1..I_m
    condition: float
    precision_ok: bool
    branch_tag: str = "S0 mod 2 pi i (Z w_1 + ... + Z w_{N-1} + Z lambda + Z w_0)"
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = self.critical_point.to_json()
        d.update(
            S0=_cjson(self.S0),
            S0_branch=self.branch_tag,
            prefactor=_cjson(self.prefactor),
            I=[_cjson(v) for v in self.I],
            condition=self.condition,
            precision_ok=self.precision_ok,
        )
        return d


def saddle_expand(pot: LGPotential, cp: CriticalPoint, m_max: int = 2, precision: int = 166) -> SaddleExpansion:
    """S0, prefactor and I_1..I_m of exp(W/hbar) du/(u_1...u_{N-1}) around ``cp``."""
    if m_max < 1 or m_max > 2:
        raise ValueError("m_max must be 1 or 2")
    k = pot.dimension
    top = 2 * m_max
    order = top + 2
    with mpmath.workprec(precision):
        W = taylor_at(pot, cp, order)
        lin = max((abs(W.terms.get(tuple(1 if t == i else 0 for t in range(k)), 0)) for i in range(k)), default=0)
        # size of the individual terms of dW, so the test is relative
        params = [abs(to_mp(a)) for a in list(pot.model.w) + list(pot.model.lam)]
        T = pot._t(*pot._split(cp.coordinates), cp.x)
        scale = (1 + abs(T) + max(params)) * max(1 / abs(c) for c in cp.coordinates)
        if lin > mpmath.mpf(2) ** (-(precision * 3) // 4) * scale:
            raise ArithmeticError(f"not a critical point: |grad W| = {mpmath.nstr(lin, 5)}")
        H = hessian_of(W)
        C, D = _morse_change(H)
        det = mpmath.mpf(1)
        for d in D:
            det *= d
        absD = [abs(d) for d in D]
        cond = float(max(absD) / min(absD))
        precision_ok = cond < 2.0 ** (precision / 2)

        us, _vs = pot._split(cp.coordinates)
        xi = [MultiSeries.variable(k, i, top) for i in range(k)]
        # prod_i u_i^c / u_i = prod 1/(1 + xi_i/u_i)
        meas = MultiSeries.constant(k, 1, top)
        for i, u in enumerate(us):
            meas = meas * _inv1p_series(xi[i] * (1 / u), top)
        I = wick_expansion(W, C, meas, m_max)

        S0 = pot.value(cp.coordinates, cp.x)
        prod_u = mpmath.mpf(1)
        for u in us:
            prod_u *= u
        prefactor = 1 / (prod_u * mpmath.sqrt(det))
        return SaddleExpansion(cp, S0, prefactor, I, cond, precision_ok)


# ---------------------------------------------------------------------------
# large-x exponents


def expected_exponent(model: CurveModel, quantity: str, cp_type: int) -> float:
    N, n = model.N, model.n
    if quantity == "hess_prefactor":
        return -(N - n - 1) / (2 * (N - n)) if cp_type == 1 else -1.0
    if quantity.startswith("I_"):
        return -1 / (2 * (N - n)) if cp_type == 1 else 0.0
    raise ValueError(f"unknown quantity {quantity!r}")


def _pick(cps: list, cp_type: int):
    chosen = [c for c in cps if c.type == cp_type]
    if not chosen:
        raise ValueError(f"no critical point of type {cp_type}")
    # the one with the largest real part of u_1: real and positive for real x
    return max(chosen, key=lambda c: (mpmath.re(c.coordinates[0]), mpmath.im(c.coordinates[0])))


def exponent_scan(pot: LGPotential, quantity: str, cp_type: int, x_grid: list, precision: int = 166) -> dict:
    """Least-squares slope of log|quantity| against log x."""
    if len(x_grid) < 4:
        raise ValueError("x_grid needs at least 4 points")
    xs = sorted(x_grid)
    ratios = [b / a for a, b in zip(xs, xs[1:])]
    if max(ratios) / min(ratios) > 1 + 1e-9:
        raise ValueError("x_grid must be geometric")
    if xs[-1] < 1e8:
        raise ValueError("largest grid point must be at least 1e8")
    m = int(quantity[2:]) if quantity.startswith("I_") else 1
    lx, ly = [], []
    with mpmath.workprec(precision):
        for x in xs:
            xv = mpmath.mpf(x)
            cp = _pick(critical_points(pot, xv, precision), cp_type)
            ex = saddle_expand(pot, cp, max(1, m), precision)
            val = ex.prefactor if quantity == "hess_prefactor" else ex.I[m - 1]
            lx.append(float(mpmath.log(xv)))
            ly.append(float(mpmath.log(abs(val))))
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    slope = sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx)
    icpt = my - slope * mx
    resid = math.sqrt(sum((b - icpt - slope * a) ** 2 for a, b in zip(lx, ly)) / len(lx))
    expected = expected_exponent(pot.model, quantity, cp_type)
    return {
        "quantity": quantity,
        "type": cp_type,
        "slope": slope,
        "residual": resid,
        "expected": expected,
        "poor_fit": resid > 0.05,
        "ok": abs(slope - expected) <= 0.02 and resid <= 0.05,
    }
