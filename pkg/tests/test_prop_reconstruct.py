"""Randomized Newton-polygon and reconstruction invariants."""

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gkzrec.curve import DegenerateCurveError, NonSimpleRamificationError, build_curve
from gkzrec.exactalg import BiPoly
from gkzrec.reconstruct import (
    assemble_operator,
    ck_closed_form,
    ck_limits,
    equality_check,
    newton_polygon,
    reconstruction_input,
)
from gkzrec.wkb import gkz_operator, semiclassical_limit
from strategies import models, nonzero_fracs

N_EX = 25

lattice = st.tuples(st.integers(0, 6), st.integers(0, 6))


@settings(max_examples=N_EX * 4)
@given(st.dictionaries(lattice, nonzero_fracs, min_size=3, max_size=9))
def test_enumeration_agrees_with_pick(terms):
    poly = newton_polygon(BiPoly(terms))
    assume(len(poly.hull) >= 3)
    assert poly.pick_interior() == len(poly.interior_points())
    for p in poly.support:
        i = p[1]
        assert poly.alpha[i] <= p[0] <= poly.beta[i]


@settings(max_examples=N_EX)
@given(models(min_N=2, max_N=5))
def test_gkz_family_reconstructs(model):
    try:
        curve = build_curve(model)
    except (DegenerateCurveError, NonSimpleRamificationError):
        assume(False)
    data = reconstruction_input(curve)
    ck = ck_limits(curve, data)
    assert ck == ck_closed_form(model.N, model.n, model.lam)
    op = assemble_operator(curve, data)
    assert equality_check(op, gkz_operator(model))["equal"]
    A = semiclassical_limit(op)
    key = max(curve.A.terms)
    assert A.normalized(*key) == curve.A.normalized(*key)


@settings(max_examples=N_EX)
@given(models(min_N=2, max_N=4), st.data())
def test_perturbed_target_is_rejected(model, data):
    try:
        curve = build_curve(model)
    except (DegenerateCurveError, NonSimpleRamificationError):
        assume(False)
    op = assemble_operator(curve)
    target = gkz_operator(model)
    k = data.draw(st.integers(0, target.order))
    bump = BiPoly({(data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))): 1})
    coeffs = list(target.coeffs)
    coeffs[k] = coeffs[k] + bump
    from gkzrec.wkb import ThetaOperator

    bumped = ThetaOperator(coeffs)
    assume(bumped.coeffs[-1] == target.coeffs[-1])
    assert not equality_check(op, bumped)["equal"]
