from fractions import Fraction as Fr

import pytest

from gkzrec.curve import CurveModel, build_curve
from gkzrec.exactalg import BiPoly
from gkzrec.reconstruct import (
    admissibility_check,
    assemble_operator,
    ck_closed_form,
    ck_limits,
    equality_check,
    key_identity_check,
    newton_polygon,
    reconstruction_input,
    shifted_polynomial,
)
from gkzrec.wkb import gkz_operator, semiclassical_limit

x, Y = BiPoly.var(0), BiPoly.var(1)


def test_cp1_polygon():
    w0, w1 = Fr(2), Fr(-3)
    P = x * x * Y * Y - (w0 + w1) * x * Y + w0 * w1 - x
    poly = newton_polygon(P)
    assert set(poly.support) == {(2, 2), (1, 1), (0, 0), (1, 0)}
    assert set(poly.hull) == {(0, 0), (1, 0), (2, 2)}
    assert admissibility_check(poly, P)
    assert P == shifted_polynomial(CurveModel.make(2, [w0, w1]).closed_form_poly())


def test_segment_polygon():
    P = Y - x
    poly = newton_polygon(P)
    assert len(poly.hull) == 2
    assert poly.interior_points() == []
    assert admissibility_check(poly, P)


def test_projective_three_polygon():
    P = shifted_polynomial(CurveModel.make(4, [1, 2, 3, 5]).closed_form_poly())
    poly = newton_polygon(P)
    assert set(poly.hull) == {(0, 0), (1, 0), (4, 4)}
    assert poly.interior_points() == []
    assert admissibility_check(poly, P)


def test_codimension_two_family_is_admissible():
    model = CurveModel.make(4, [0, 1, 2, 3], [Fr(7), Fr(-5)])
    data = reconstruction_input(build_curve(model))
    assert admissibility_check(data.polygon, data.P)


def test_cubic_singular_at_origin():
    P = Y ** 3 + x ** 3 + x * Y
    poly = newton_polygon(P)
    # the triangle (3,0), (0,3), (1,1) has no interior lattice point
    assert poly.interior_points() == []
    assert set(poly.hull) == {(3, 0), (0, 3), (1, 1)}
    # it fails because P(0,0) = 0 with a vanishing gradient
    assert not admissibility_check(poly, P)


def test_interior_point_rejected():
    P = 1 + x ** 2 + Y ** 2 + x * x * Y * Y
    poly = newton_polygon(P)
    assert poly.interior_points() == [(1, 1)]
    assert not admissibility_check(poly, P)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        newton_polygon(BiPoly())


@pytest.mark.parametrize("N, n, lam, expected", [
    (2, 0, [], [0]),
    (3, 2, [Fr(2), Fr(-7, 3)], [1, -(Fr(2) + Fr(-7, 3))]),
    (4, 1, [Fr(5)], [0, 0, 1]),
])
def test_ck_limits(N, n, lam, expected):
    w = [Fr(k * k + 1, k + 2) for k in range(N)]
    curve = build_curve(CurveModel.make(N, w, lam))
    assert ck_limits(curve) == expected
    assert ck_closed_form(N, n, lam) == expected


@pytest.mark.parametrize("N, w, lam", [
    (2, [1, 0], []),
    (3, [0, 1, 2], [5]),
    (2, [0, 3], [4]),
    (4, [0, 1, 3, 7], []),
    (3, [0, 1, 2], [5, -4]),
])
def test_reconstruction_matches_gkz(N, w, lam):
    model = CurveModel.make(N, w, lam)
    curve = build_curve(model)
    op = assemble_operator(curve)
    res = equality_check(op, gkz_operator(model))
    assert res["equal"], res
    A = semiclassical_limit(op)
    assert A.normalized(*max(A.terms)) == curve.A.normalized(*max(curve.A.terms))


def test_equality_detects_lambda_shift():
    model = CurveModel.make(3, [0, 1, 2], [5])
    op = assemble_operator(build_curve(model))
    other = gkz_operator(CurveModel.make(3, [0, 1, 2], [6]))
    res = equality_check(op, other)
    assert not res["equal"]
    assert res["first_difference"][0] == 0 and res["first_difference"][1] == 1


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_key_identity(ell):
    assert key_identity_check(ell)


def test_polygon_json():
    P = Y - x
    doc = newton_polygon(P).to_json(True)
    assert doc["admissible"] is True
    assert doc["support"] == [[0, 1], [1, 0]]
