from fractions import Fraction as Fr

import mpmath
import pytest

from gkzrec.curve import (
    CP1_SQRT,
    CP1_ZHUKOVSKY,
    CurveModel,
    DegenerateCurveError,
    NonSimpleRamificationError,
    NotRationalSquareError,
    build_curve,
    critical_points_u1,
    critical_set_check,
    ramification_points,
)
from gkzrec.exactalg import BiPoly, INF, Z

X, Y = BiPoly.var(0), BiPoly.var(1)


def test_cp1_sqrt_defining_polynomial():
    w0, w1 = Fr(3, 2), Fr(-1, 3)
    c = build_curve(CurveModel.make(2, [w0, w1]), CP1_SQRT)
    assert c.A == (Y - w0) * (Y - w1) - X
    assert c.x == Z * Z - (w0 - w1) ** 2 / 4
    assert c.z_star is INF


def test_degree_one_hypersurface_polynomial():
    w0, w1, l1 = Fr(0), Fr(3), Fr(4)
    for kind in ("standard", CP1_ZHUKOVSKY):
        c = build_curve(CurveModel.make(2, [w0, w1], [l1]), kind)
        assert c.A == Y * Y - (w0 + w1 + X) * Y + w0 * w1 + l1 * X


def test_zhukovsky_divisor_endpoint():
    c = build_curve(CurveModel.make(2, [0, 3], [4]), CP1_ZHUKOVSKY)
    assert c.z_star == -1
    assert c.x.den(Fr(-1)) == 0
    assert c.x.reflect() == c.x


def test_zhukovsky_needs_square():
    with pytest.raises(NotRationalSquareError):
        build_curve(CurveModel.make(2, [0, 1], [3]), CP1_ZHUKOVSKY)


def test_non_simple_ramification_rejected():
    with pytest.raises(NonSimpleRamificationError):
        build_curve(CurveModel.make(3, [0, 0, 0]))


def test_repeated_parameter_still_simple_for_n2():
    c = build_curve(CurveModel.make(2, [1, 1]))
    assert c.x == (Z - 1) ** 2


def test_model_validation():
    with pytest.raises(ValueError):
        CurveModel.make(2, [0, 1], [2, 3])
    with pytest.raises(ValueError):
        CurveModel("projective_space", 2, (0, 1), (5,))


def test_ramification_of_involution_curves():
    (r,) = ramification_points(build_curve(CurveModel.make(2, [1, 0]), CP1_SQRT))
    assert r.z_value == 0 and r.involution == "reflect"
    pts = ramification_points(build_curve(CurveModel.make(2, [0, 3], [4]), CP1_ZHUKOVSKY))
    assert [p.z_value for p in pts][0] == 0
    assert all(p.involution == "reflect" for p in pts)


def test_standard_n3_ramification_series():
    curve = build_curve(CurveModel.make(3, [0, 1, 2]))
    pts = ramification_points(curve, 166, order=10)
    assert len(pts) == 2
    with mpmath.workprec(166):
        for p in pts:
            assert abs(curve.x.deriv()(p.z_value)) < mpmath.mpf(10) ** -40
            t = mpmath.mpf("1e-3")
            s = p.sigma_at(t)
            diff = curve.x(p.z_value + s) - curve.x(p.z_value + t)
            assert abs(diff) < mpmath.mpf(10) ** -30
            assert abs(s + t) < mpmath.mpf("1e-2")


def test_critical_set_n2_exact():
    model = CurveModel.make(2, [1, 0])
    assert sorted(critical_points_u1(model, 2)) == [-1, 2]
    assert critical_set_check(model, 2)
    assert model.closed_form_poly()(Fr(2), Fr(2)) == 0


def test_critical_set_n3_n1():
    assert critical_set_check(CurveModel.make(3, [0, 1, 2], [5]), 7)


def test_critical_set_zero_x_rejected():
    with pytest.raises(ValueError):
        critical_set_check(CurveModel.make(2, [1, 0]), 0)


def test_curve_json_round_trip():
    c = build_curve(CurveModel.make(3, [0, 1, 2], [5]))
    doc = c.to_json()
    assert doc["coordinate"] == "standard"
    assert BiPoly.from_list(doc["A"]) == c.A
