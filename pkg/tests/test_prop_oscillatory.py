"""Randomized invariants of the mirror potential and the Wick engine."""

import mpmath
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gkzrec.exactalg import MultiSeries
from gkzrec.oscillatory import LGPotential, critical_points, wick_expansion
from strategies import models, small_fracs

N_EX = 20
PREC = 166
DIGITS = 50


def _random_point(data, k):
    vals = []
    for _ in range(k):
        re = data.draw(st.floats(0.3, 3.0))
        # stay off the real axis, where the logs have their cut
        im = data.draw(st.floats(0.05, 1.0)) * data.draw(st.sampled_from([1, -1]))
        sign = data.draw(st.sampled_from([1, -1]))
        vals.append(mpmath.mpc(sign * re, im))
    return vals


@settings(max_examples=N_EX)
@given(models(min_N=2, max_N=4), st.data())
def test_gradient_matches_finite_differences(model, data):
    pot = LGPotential(model)
    with mpmath.workprec(PREC):
        pt = _random_point(data, pot.dimension)
        x = mpmath.mpf(data.draw(st.floats(0.5, 20.0)))
        grad = pot.gradient(pt, x)
        h = mpmath.mpf(10) ** -18
        for i in range(pot.dimension):
            up = list(pt)
            dn = list(pt)
            up[i] += h
            dn[i] -= h
            fd = (pot.value(up, x) - pot.value(dn, x)) / (2 * h)
            assert abs(fd - grad[i]) <= mpmath.mpf(10) ** (-(DIGITS // 2)) * (1 + abs(grad[i]))


@settings(max_examples=N_EX)
@given(models(min_N=2, max_N=4), small_fracs.filter(lambda q: q > 0))
def test_critical_points_count_and_curve(model, x):
    assume(all(model.w[1] != a for a in model.lam))
    pot = LGPotential(model)
    with mpmath.workprec(PREC):
        try:
            cps = critical_points(pot, x, PREC)
        except ArithmeticError:
            assume(False)
        assert len(cps) == model.N
        A = model.closed_form_poly()
        for c in cps:
            assert abs(A(x, c.y)) < mpmath.mpf(10) ** (-(DIGITS - 10)) * (1 + abs(c.y)) ** model.N


@settings(max_examples=N_EX)
@given(st.integers(1, 3), st.data())
def test_pure_quadratic_has_no_corrections(k, data):
    xi = [MultiSeries.variable(k, i, 6) for i in range(k)]
    W = MultiSeries(k, {}, 6)
    for i in range(k):
        W = W + xi[i] * xi[i] * mpmath.mpf(data.draw(st.floats(0.5, 4.0)))
    C = [[mpmath.mpf(1) if i == j else 0 for j in range(k)] for i in range(k)]
    assert all(v == 0 for v in wick_expansion(W, C, None, 2))
