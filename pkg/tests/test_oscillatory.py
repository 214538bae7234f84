from fractions import Fraction as Fr

import mpmath
import pytest

from gkzrec.curve import CurveModel, build_curve
from gkzrec.exactalg import INF, MultiSeries
from gkzrec.oscillatory import (
    LGPotential,
    critical_points,
    exponent_scan,
    gradient_norm,
    saddle_expand,
    wick_expansion,
)
from gkzrec.wkb import gkz_operator, wkb_expand


@pytest.fixture(scope="module")
def cp1():
    model = CurveModel.make(2, [1, 0])
    wk = wkb_expand(gkz_operator(model), build_curve(model), 3)
    return LGPotential(model), wk


def _type1(cps):
    return max(cps, key=lambda c: mpmath.re(c.coordinates[0]))


def test_cp1_critical_points():
    pot = LGPotential(CurveModel.make(2, [1, 0]))
    cps = critical_points(pot, 2)
    assert sorted(float(mpmath.re(c.coordinates[0])) for c in cps) == [-1.0, 2.0]
    assert all(c.type == 1 for c in cps)
    assert sorted(float(mpmath.re(c.y)) for c in cps) == [-1.0, 2.0]


def test_three_critical_points_for_hypersurface():
    pot = LGPotential(CurveModel.make(3, [0, 1, 2], [5]))
    with mpmath.workprec(166):
        cps = critical_points(pot, Fr(7, 3))
        assert len(cps) == 3
        for c in cps:
            assert gradient_norm(pot, c) < mpmath.mpf(10) ** -40
            assert c.hessian_det != 0


def test_type_counts_at_large_x():
    model = CurveModel.make(4, [0, 1, 2, 3], [Fr(7), Fr(-5, 2)])
    cps = critical_points(LGPotential(model), 10 ** 6)
    types = [c.type for c in cps]
    assert types.count(1) == 2 and types.count(2) == 2


def test_zero_x_rejected():
    with pytest.raises(ValueError):
        critical_points(LGPotential(CurveModel.make(2, [1, 0])), 0)


def test_saddle_matches_wkb(cp1):
    pot, wk = cp1
    S2 = wk.S[2].normalized(INF)
    S3 = wk.S[3].normalized(INF)
    with mpmath.workprec(166):
        cp = _type1(critical_points(pot, 1))
        ex = saddle_expand(pot, cp, 2)
        s2, s3 = S2.evaluate(cp.y), S3.evaluate(cp.y)
        assert abs(ex.I[0] - s2) < mpmath.mpf(10) ** -25
        assert abs(ex.I[1] - s3 - s2 * s2 / 2) < mpmath.mpf(10) ** -20
        assert ex.precision_ok


def test_prefactor_tracks_first_order(cp1):
    pot, wk = cp1
    with mpmath.workprec(166):
        ratios = []
        for x in (1, 5):
            cp = _type1(critical_points(pot, x))
            ex = saddle_expand(pot, cp, 1)
            ratios.append(ex.prefactor / mpmath.exp(wk.S[1].evaluate(cp.y)))
        assert abs(ratios[0] - ratios[1]) < mpmath.mpf(10) ** -25


def test_prefactor_quarter_power(cp1):
    pot, _ = cp1
    with mpmath.workprec(166):
        vals = []
        for x in (1, 7):
            ex = saddle_expand(pot, _type1(critical_points(pot, x)), 1)
            vals.append(abs(ex.prefactor) * (4 * mpmath.mpf(x) + 1) ** (mpmath.mpf(1) / 4))
        assert abs(vals[0] - vals[1]) < mpmath.mpf(10) ** -25


def test_saddle_order_cap(cp1):
    pot, _ = cp1
    cp = _type1(critical_points(pot, 1))
    with pytest.raises(ValueError):
        saddle_expand(pot, cp, 3)


def test_wick_pure_quadratic_vanishes():
    k = 2
    xi = [MultiSeries.variable(k, i, 6) for i in range(k)]
    W = xi[0] * xi[0] * 2 + xi[0] * xi[1] + xi[1] * xi[1] * 3
    C = [[mpmath.mpf(1), 0], [0, mpmath.mpf(1)]]
    assert all(v == 0 for v in wick_expansion(W, C, None, 2))


def test_wick_one_dimensional_closed_form():
    h, c3, c4 = mpmath.mpf(3), mpmath.mpf("0.7"), mpmath.mpf("-1.1")
    xi = MultiSeries.variable(1, 0, 6)
    W = xi * xi * (h / 2) + xi ** 3 * c3 + xi ** 4 * c4
    (I1,) = wick_expansion(W, [[1 / mpmath.sqrt(h)]], None, 1)
    assert abs(I1 - (3 * c4 / h ** 2 - mpmath.mpf(15) / 2 * c3 ** 2 / h ** 3)) < 1e-14


GRID = [10 ** 5, 10 ** 6, 10 ** 7, 10 ** 8]


@pytest.fixture(scope="module")
def pot31():
    return LGPotential(CurveModel.make(3, [0, Fr(5, 2), Fr(7, 3)], [Fr(-7, 4)]))


def test_prefactor_slope_type_one(pot31):
    res = exponent_scan(pot31, "hess_prefactor", 1, GRID)
    assert abs(res["slope"] + 0.25) <= 0.02 and not res["poor_fit"]


def test_prefactor_slope_type_two(pot31):
    res = exponent_scan(pot31, "hess_prefactor", 2, GRID)
    assert abs(res["slope"] + 1.0) <= 0.02 and not res["poor_fit"]


def test_first_correction_slope_cp1_target():
    """Target exponent -1/(2(N-n)) for N=2; the closed form decays like x^(-1/2)."""
    pot = LGPotential(CurveModel.make(2, [1, 0]))
    res = exponent_scan(pot, "I_1", 1, GRID)
    assert abs(res["slope"] + 0.25) <= 0.02


def test_first_correction_slope_cp1_closed_form():
    pot = LGPotential(CurveModel.make(2, [1, 0]))
    res = exponent_scan(pot, "I_1", 1, GRID)
    # S_2 = (6x - 1) / (12 (4x + 1)^(3/2)) ~ x^(-1/2)
    assert abs(res["slope"] + 0.5) <= 0.02


def test_first_correction_respects_upper_bound(pot31):
    res = exponent_scan(pot31, "I_1", 1, GRID)
    assert res["slope"] <= -0.25 + 0.02


def test_scan_grid_validation(pot31):
    with pytest.raises(ValueError):
        exponent_scan(pot31, "hess_prefactor", 1, [1, 2, 3])
    with pytest.raises(ValueError):
        exponent_scan(pot31, "hess_prefactor", 1, [10, 100, 1000, 10 ** 4])


def test_report_json(cp1):
    pot, _ = cp1
    ex = saddle_expand(pot, _type1(critical_points(pot, 1)), 1)
    doc = ex.to_json()
    assert set(doc) >= {"coords", "type", "S0", "prefactor", "I"}
