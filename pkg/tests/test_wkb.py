from fractions import Fraction as Fr

import mpmath
import pytest

from gkzrec.curve import CP1_SQRT, CP1_ZHUKOVSKY, CurveModel, build_curve
from gkzrec.exactalg import INF, BiPoly, RatFunc, Z
from gkzrec.toprec import fm_recursion
from gkzrec.wkb import (
    HB,
    ThetaOperator,
    annihilation_check,
    coh_limit_check,
    compare_wavefunctions,
    gkz_operator,
    hierarchy_residuals,
    onshell_j_series,
    qdiff_check,
    semiclassical_limit,
    wkb_expand,
)

X, H = BiPoly.var(0), BiPoly.var(1)
Yv = BiPoly.var(1)


def test_gkz_operator_cp1():
    w0, w1 = Fr(2), Fr(-1, 2)
    op = gkz_operator(CurveModel.make(2, [w0, w1]))
    assert op == ThetaOperator([BiPoly.const(w0 * w1) - X, BiPoly.const(-(w0 + w1)), BiPoly.const(1)])


def test_gkz_operator_degree_one_hypersurface():
    w0, w1, l1 = Fr(1), Fr(2), Fr(5)
    op = gkz_operator(CurveModel.make(2, [w0, w1], [l1]))
    assert op == ThetaOperator([BiPoly.const(w0 * w1) - X * (H - l1), BiPoly.const(-(w0 + w1)) - X, BiPoly.const(1)])


def test_gkz_operator_first_order():
    assert gkz_operator(CurveModel.make(1, [0])) == ThetaOperator([-X, BiPoly.const(1)])


def test_semiclassical_limits():
    w = [Fr(0), Fr(1), Fr(2)]
    model = CurveModel.make(3, w, [Fr(5)])
    assert semiclassical_limit(gkz_operator(model)) == model.closed_form_poly()
    m2 = CurveModel.make(2, [Fr(3), Fr(1)])
    assert semiclassical_limit(gkz_operator(m2)) == (Yv - 3) * (Yv - 1) - X


def test_cp1_w0_table_rows():
    model = CurveModel.make(2, [0, 0])
    wk = wkb_expand(gkz_operator(model), build_curve(model, require_simple=False), 4)
    # branch z = +sqrt(x)
    assert wk.S[2].normalized(INF).rational == Fr(1, 16) / Z
    assert wk.S[3].normalized(INF).rational == Fr(1, 64) / Z ** 2
    assert wk.S[4].normalized(INF).rational == Fr(25, 3072) / Z ** 3


def test_equivariant_cp1_s3():
    w0, w1 = Fr(1), Fr(0)
    model = CurveModel.make(2, [w0, w1])
    curve = build_curve(model, CP1_SQRT)
    wk = wkb_expand(gkz_operator(model), curve, 3)
    x = curve.x
    d2 = (w0 - w1) ** 2
    assert wk.S[3].normalized(INF).rational == x * (x - d2) / (4 * x + d2) ** 3


def test_zhukovsky_first_order_derivative():
    model = CurveModel.make(2, [0, 3], [4])
    curve = build_curve(model, CP1_ZHUKOVSKY)
    wk = wkb_expand(gkz_operator(model), curve, 1)
    s = Fr(2)
    expected = -((Z + 1) ** 3) * (Z - 1) / (16 * Z * Z * s)
    assert wk.dS[1] / curve.x.deriv() == expected


def test_wkb_rejects_wrong_operator():
    model = CurveModel.make(2, [1, 0])
    other = gkz_operator(CurveModel.make(2, [2, 0]))
    with pytest.raises(ValueError):
        wkb_expand(other, build_curve(model), 2)
    with pytest.raises(ValueError):
        wkb_expand(gkz_operator(model), build_curve(model), 0)


def test_hierarchy_is_solved_exactly():
    model = CurveModel.make(3, [0, 1, 2], [5])
    op = gkz_operator(model)
    wk = wkb_expand(op, build_curve(model), 4)
    assert all(r.is_zero() for r in hierarchy_residuals(op, wk))


def test_compare_cp1_plus_branch():
    model = CurveModel.make(2, [1, 0])
    curve = build_curve(model, CP1_SQRT)
    wk = wkb_expand(gkz_operator(model), curve, 4)
    rep = compare_wavefunctions(wk, fm_recursion(curve, 4), 4)
    assert rep["equal"]
    x = curve.x
    S2 = (6 * x - 1) / (12 * (2 * Z) ** 3)
    assert wk.S[2].normalized(INF).rational == S2


def test_compare_zhukovsky_first_order():
    model = CurveModel.make(2, [0, 3], [4])
    curve = build_curve(model, CP1_ZHUKOVSKY)
    wk = wkb_expand(gkz_operator(model), curve, 3)
    rep = compare_wavefunctions(wk, fm_recursion(curve, 3), 3)
    assert rep["rows"][1]["equal"] and rep["equal"]


def test_compare_wrong_endpoint_fails_at_first_order():
    model = CurveModel.make(2, [1, 0])
    curve = build_curve(model, CP1_SQRT)
    wk = wkb_expand(gkz_operator(model), curve, 3)
    rep = compare_wavefunctions(wk, fm_recursion(curve, 3, z_star=Fr(0)), 3)
    assert not rep["rows"][1]["equal"]
    assert not rep["equal"]


def test_onshell_j_examples():
    w0, w1 = Fr(3), Fr(1, 2)
    js = onshell_j_series(CurveModel.make(2, [w0, w1]), 0, 1)
    assert js[1] == 1 / (HB * (w0 - w1 + HB))
    js1 = onshell_j_series(CurveModel.make(1, [Fr(7)]), 0, 5)
    for d in range(6):
        fact = 1
        for k in range(1, d + 1):
            fact *= k
        assert js1[d] == RatFunc.const(Fr(1, fact)) / HB ** d
    w = [Fr(0), Fr(1), Fr(2)]
    l1 = Fr(5)
    js3 = onshell_j_series(CurveModel.make(3, w, [l1]), 0, 2)
    den = 2 * HB * HB
    for wj in w[1:]:
        for m in (1, 2):
            den = den * (w[0] - wj + m * HB)
    assert js3[2] == (w[0] - l1 + HB) * (w[0] - l1 + 2 * HB) / den


def test_onshell_j_degenerate_pivot():
    with pytest.raises(ValueError):
        onshell_j_series(CurveModel.make(2, [1, 1]), 0, 2)


def test_annihilation_examples():
    m2 = CurveModel.make(2, [Fr(3, 2), Fr(-1, 3)])
    assert annihilation_check(gkz_operator(m2), onshell_j_series(m2, 0, 12), m2.w[0], 12)["ok"]
    m3 = CurveModel.make(3, [0, 1, 2], [5])
    assert annihilation_check(gkz_operator(m3), onshell_j_series(m3, 0, 8), 0, 8)["ok"]
    broken = gkz_operator(CurveModel.make(2, [m2.w[0] + 1, m2.w[1]]))
    res = annihilation_check(broken, onshell_j_series(m2, 0, 4), m2.w[0], 4)
    assert not res["ok"] and res["degree"] == 0


def test_qdiff_examples():
    assert qdiff_check(1, 0, 10)["ok"]
    assert qdiff_check(2, 1, 8)["ok"]
    assert qdiff_check(2, 1, 8, half_power_prefix=False)["ok"]
    bad = qdiff_check(2, 1, 4, lambda_shift=1)
    assert not bad["ok"] and bad["degree"] == 1


def test_coh_limit_degree_zero_and_slope():
    res = coh_limit_check(2, 0, Fr(1, 2), Fr(1, 3), [1e-2, 1e-3, 1e-4], d_max=1)
    assert res["rows"][0]["exact"]
    row = res["rows"][1]
    assert row["errors"][-1] < 10 * 1e-4
    res = coh_limit_check(2, 1, Fr(1, 2), Fr(1, 3), [1e-2, 1e-3, 1e-4], d_max=1)
    assert 0.9 <= res["rows"][1]["slope"] <= 1.1


def test_coh_limit_rejects_bad_beta_list():
    with pytest.raises(ValueError):
        coh_limit_check(2, 0, 1, 1, [1e-3, 1e-2])


def test_operator_json_round_trip():
    op = gkz_operator(CurveModel.make(3, [0, 1, 2], [5]))
    assert ThetaOperator.from_json(op.to_json()) == op
