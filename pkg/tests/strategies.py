"""Hypothesis strategies for polynomials and points."""
from gmpy2 import mpq
from hypothesis import strategies as st

from improj.polycore import GaussQ, Poly

small_int = st.integers(-6, 6)
rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-40, 40), st.integers(1, 8))
gauss = st.builds(GaussQ, rationals, rationals)
real_gauss = st.builds(GaussQ, rationals)


@st.composite
def polys(draw, nvars=2, max_degree=3, max_terms=5, real=False):
    n = draw(nvars) if isinstance(nvars, st.SearchStrategy) else nvars
    exps = st.tuples(*[st.integers(0, max_degree)] * n)
    terms = draw(st.dictionaries(exps, real_gauss if real else gauss, max_size=max_terms))
    return Poly(n, terms)


@st.composite
def points(draw, n=2):
    return tuple(draw(rationals) for _ in range(n))
