import cmath
import math
from fractions import Fraction as Fr

from hypothesis import given, settings, strategies as st

from gkzrec.stokes import (
    loop_miss,
    riccati_expand,
    schroedinger_form,
    total_stokes_matrix,
    trace_stokes_graph,
)

N_EX = 20

gaps = st.tuples(
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
).filter(lambda p: p[0] != p[1])

upper_hbar = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(0.1, 2.0),
    st.floats(0.05, math.pi - 0.05),
)


@settings(max_examples=N_EX)
@given(upper_hbar, st.sampled_from(["x1", "x2", "x3"]))
def test_unit_determinant(hbar, region):
    V = 2j * math.pi / hbar
    if region == "x2" and abs(cmath.exp(-V)) > 0.9:
        return
    assert abs(total_stokes_matrix(region, V).det() - 1) < 1e-9


@settings(max_examples=N_EX)
@given(upper_hbar)
def test_x1_equals_x2(hbar):
    V = 2j * math.pi / hbar
    if abs(cmath.exp(-V)) > 0.9:
        return
    A = total_stokes_matrix("x1", V).entries
    B = total_stokes_matrix("x2", V).entries
    scale = max(1.0, max(abs(A[i][j]) for i in range(2) for j in range(2)))
    assert max(abs(A[i][j] - B[i][j]) for i in range(2) for j in range(2)) < 1e-9 * scale


@settings(max_examples=N_EX)
@given(gaps)
def test_riccati_checks(ws):
    rx = riccati_expand(schroedinger_form(*ws), 6)
    for name in ("holomorphic_n_ge_2", "decay_at_infinity", "even_odd_relation"):
        assert rx.checks[name] is True


@settings(max_examples=N_EX)
@given(gaps, st.floats(0.0, math.pi))
def test_trace_keeps_phase(ws, theta):
    g = trace_stokes_graph(schroedinger_form(*ws), theta, tol=1e-10)
    assert len(g.curves) == 3
    assert all(cv.invariant_error < 1e-10 for cv in g.curves)


@settings(max_examples=N_EX)
@given(gaps, st.floats(0.05, math.pi / 2 - 0.05))
def test_mirror_symmetry(ws, theta):
    data = schroedinger_form(*ws)
    g = trace_stokes_graph(data, theta)
    h = trace_stokes_graph(data, math.pi - theta)
    ends = sorted((cv.end, -cv.winding) for cv in g.curves)
    assert ends == sorted((cv.end, cv.winding) for cv in h.curves)
    for cv in g.curves:
        mirrored = [p.conjugate() for p in cv.points]
        assert any(_polyline_gap(mirrored, o.points) < 1 for o in h.curves)


def _seg_dist(p, a, b):
    d = b - a
    if d == 0:
        return abs(p - a)
    t = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(p - (a + t * d))


def _polyline_gap(pts, other, stride=40, window=80):
    """Largest distance from sampled points of ``pts`` to the polyline ``other``,
    in units of 1e-6 * max(1, |p|) plus the chord sagitta L^2 / |p|.

    Near the pole the curves spiral with curvature about 1/|x|, so a chord of
    length L sits up to L^2 / (8 |x|) away from the true curve.
    """
    # both traces stop on the first step past a threshold, so the ends may differ by a step
    last_step = max(abs(pts[-1] - pts[-2]), abs(other[-1] - other[-2]))
    if abs(pts[-1] - other[-1]) > 2 * last_step + 1e-6 * max(1.0, abs(pts[-1])):
        return math.inf
    worst = 0.0
    j = 0
    # the final sample is wherever the stopping test fired, which is step dependent
    for p in pts[:-1:stride]:
        lo, hi = max(0, j - window), min(len(other) - 1, j + window)
        best, j = min((_seg_dist(p, other[i], other[i + 1]), i) for i in range(lo, hi))
        chord = abs(other[j + 1] - other[j])
        worst = max(worst, best / (1e-6 * max(1.0, abs(p)) + chord ** 2 / abs(p)))
    return worst


@settings(max_examples=N_EX)
@given(gaps)
def test_loop_at_half_pi(ws):
    data = schroedinger_form(*ws)
    # the loop comes within about 0.44 |v| of the pole, so the buffer must scale with |v|
    opts = {"pole_buffer": 4e-3 * abs(float(data.v))}
    g = trace_stokes_graph(data, math.pi / 2, **opts)
    assert any(sc["kind"] == "loop" for sc in g.saddle_connections)
    assert loop_miss(data, math.pi / 2, **opts) < 1e-5
