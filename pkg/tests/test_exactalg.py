from fractions import Fraction as Fr

import mpmath
import pytest

from gkzrec.exactalg import (
    INF,
    MultiSeries,
    Poly,
    RatFunc,
    Z,
    bigcomplex,
    fmt_scalar,
    hermite_antiderivative,
    laurent_expand,
    residue,
    resultant,
    scalar,
)


def test_scalar_canonical_form():
    q = scalar("-6/4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert fmt_scalar(0) == "0/1"
    assert fmt_scalar(Fr(4, 2)) == "2/1"


@pytest.mark.parametrize(
    "f, point, expected",
    [
        (1 / Z, 0, 1),
        (1 / Z ** 2, 0, 0),
        (1 / ((Z - 1) * (Z + 1)), 1, Fr(1, 2)),
        (Z + 3, 5, 0),
        (1 / Z, INF, -1),
    ],
)
def test_residue_examples(f, point, expected):
    assert residue(f, point) == expected


def test_laurent_geometric_series():
    s = laurent_expand(1 / (Z * Z - 1), 0, 2)
    assert s.min_exp == 0
    assert [s[k] for k in range(3)] == [-1, 0, -1]


def test_laurent_at_infinity_of_z():
    s = laurent_expand(Z, INF, 0)
    assert s.min_exp == -1 and s[-1] == 1 and s[0] == 0


def test_laurent_pole_order_three():
    s = laurent_expand((3 * Z * Z - 1) / (48 * Z ** 3), 0, -1)
    assert s.min_exp == -3
    assert [s[-3], s[-2], s[-1]] == [Fr(-1, 48), 0, Fr(3, 48)]


def test_laurent_rejects_order_below_pole():
    with pytest.raises(ValueError):
        laurent_expand(1 / Z ** 3, 0, -5)


def test_truncated_series_never_reads_past_order():
    s = laurent_expand(1 / (1 - Z), 0, 4)
    assert len(s.coeffs) == s.order - s.min_exp + 1
    with pytest.raises(IndexError):
        s[5]


def test_hermite_pure_log():
    rat, logs = hermite_antiderivative(RatFunc.const(Fr(-1, 2)) / Z)
    assert rat.is_zero()
    assert logs == [(Fr(-1, 2), Poly([0, 1]))]


def test_hermite_rational_part():
    rat, logs = hermite_antiderivative((1 - Z * Z) / (16 * Z ** 4))
    assert rat == (3 * Z * Z - 1) / (48 * Z ** 3)
    assert logs == []


def test_hermite_inverse_square():
    rat, logs = hermite_antiderivative(1 / Z ** 2)
    assert rat == -1 / Z and logs == []


def test_ratfunc_canonical_denominator_is_monic():
    f = RatFunc(Poly([2, 4]), Poly([6, 2]))
    assert f.den.lc == 1
    assert f == (Z + Fr(1, 2)) / (Z + 3) * 2


def test_ratfunc_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RatFunc(1, 0)


def test_resultant_detects_common_root():
    a = Poly.from_roots([1, 2])
    assert resultant(a, Poly.from_roots([2, 5])) == 0
    assert resultant(a, Poly.from_roots([3])) != 0


def test_multiseries_cap():
    u = MultiSeries.variable(2, 0, 3)
    v = MultiSeries.variable(2, 1, 3)
    p = (u + v) ** 5
    assert all(sum(e) <= 3 for e in p.terms)
    assert p.terms == {}
    q = (1 + u + v) ** 2
    assert q.terms[(1, 1)] == 2
    assert all(v != 0 for v in q.terms.values())


def test_bigcomplex_precision():
    with mpmath.workprec(166):
        c = bigcomplex(Fr(1, 3), Fr(-2, 7))
        assert mpmath.mp.prec == 166
        assert abs(c.real - mpmath.mpf(1) / 3) < mpmath.mpf(2) ** -160
