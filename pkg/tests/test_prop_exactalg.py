"""Randomized invariants of the exact algebra layer (200 cases each)."""

from hypothesis import given, settings
from hypothesis import strategies as st

from gkzrec.exactalg import INF, RatFunc, antiderivative_check, hermite_antiderivative, laurent_expand, residue
from strategies import ratfuncs, small_fracs, split_ratfuncs

N = 200


@settings(max_examples=N)
@given(ratfuncs(), small_fracs)
def test_residue_is_laurent_coefficient(f, q):
    v = f.valuation(q)
    order = max(0, v)
    ser = laurent_expand(f, q, order)
    assert residue(f, q) == ser[-1]


@settings(max_examples=N)
@given(split_ratfuncs(extra_degree=3, max_num_degree=12))
def test_hermite_round_trip(sample):
    f, _ = sample
    rat, logs = hermite_antiderivative(f)
    assert antiderivative_check(f, rat, logs)


@settings(max_examples=N)
@given(ratfuncs())
def test_difference_with_itself_is_zero(a):
    assert (a - a).is_zero()
    assert a - a == RatFunc()


@settings(max_examples=N)
@given(ratfuncs(), ratfuncs())
def test_quotient_times_inverse_is_one(a, b):
    assert (a / b) * (b / a) == RatFunc.const(1)


@settings(max_examples=N)
@given(split_ratfuncs(extra_degree=5))
def test_residues_sum_to_zero(sample):
    f, roots = sample
    total = sum(residue(f, r) for r in roots) + residue(f, INF)
    assert total == 0


@settings(max_examples=N)
@given(ratfuncs(), ratfuncs())
def test_field_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * a == a * a + b * a
    assert (a * b).deriv() == a.deriv() * b + a * b.deriv()
