"""Hypothesis strategies shared by the property suites."""

from fractions import Fraction as Fr

from hypothesis import strategies as st

from gkzrec.exactalg import Poly, RatFunc

small_fracs = st.builds(Fr, st.integers(-9, 9), st.integers(1, 5))
nonzero_fracs = small_fracs.filter(bool)


@st.composite
def polys(draw, max_degree=6, nonzero=False):
    coeffs = draw(st.lists(small_fracs, min_size=1, max_size=max_degree + 1))
    p = Poly(coeffs)
    if nonzero and p.is_zero():
        p = Poly([draw(nonzero_fracs)])
    return p


@st.composite
def split_denominators(draw, max_factors=4, max_mult=3):
    """Products of powers of linear factors with rational roots."""
    roots = draw(st.lists(small_fracs, min_size=1, max_size=max_factors, unique=True))
    d = Poly([1])
    for r in roots:
        d = d * Poly([-r, 1]) ** draw(st.integers(1, max_mult))
    return d, roots


@st.composite
def split_ratfuncs(draw, extra_degree=5, max_num_degree=12):
    d, roots = draw(split_denominators())
    top = min(max_num_degree, d.degree + extra_degree)
    num = draw(polys(max_degree=top, nonzero=True))
    return RatFunc(num, d), roots


@st.composite
def ratfuncs(draw, max_degree=5, nonzero=True):
    num = draw(polys(max_degree=max_degree, nonzero=nonzero))
    den = draw(polys(max_degree=max_degree, nonzero=True))
    return RatFunc(num, den)


@st.composite
def models(draw, min_N=2, max_N=4, max_n=None, allow_n=True):
    """Generic CurveModels with pairwise distinct rational parameters."""
    from gkzrec.curve import CurveModel

    N = draw(st.integers(min_N, max_N))
    top = N - 1 if max_n is None else min(max_n, N - 1)
    n = draw(st.integers(0, top)) if allow_n else 0
    vals = draw(st.lists(small_fracs, min_size=N + n, max_size=N + n, unique=True))
    return CurveModel.make(N, vals[:N], vals[N:])
