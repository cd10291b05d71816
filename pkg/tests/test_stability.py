import random

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from improj.oracle import closed_form_region
from improj.parse import parse, parse_factors
from improj.polycore import GaussQ, Poly
from improj.stability import (
    PROPER_POSITION_SIGN,
    Stab,
    braenden_delta,
    direct_root_stability,
    hermite_biehler,
    hyperbolicity,
    multilinear_stability,
    restrict_to_line,
    stable_via_projection,
)

from corpus import random_complex_univariate

S, N, U = Stab.STABLE, Stab.NOT_STABLE, Stab.UNKNOWN


def test_hermite_biehler_examples():
    assert hermite_biehler(parse("z1^2-3*i*z1-2")).state is N
    assert hermite_biehler(parse("z1^2+3*i*z1-2")).state is S
    assert hermite_biehler(parse("z1^2+1")).state is N
    # real polynomials are stable exactly when real-rooted
    assert hermite_biehler(parse("z1^2-1")).state is S
    assert hermite_biehler(parse("(z1-1)^2*(z1+i)")).state is S
    with pytest.raises(ValueError):
        hermite_biehler(parse("i", 1))


def test_sign_convention_calibrated():
    # z + i is stable; Re = z, Im = 1, so W[Im, Re] = 0*z - 1*1 = -1
    assert PROPER_POSITION_SIGN == -1
    v = hermite_biehler(parse("z1+i"))
    assert v.state is S and v.detail["wronskian_sign"] == -1


def test_direct_root_examples():
    assert direct_root_stability(parse("z1+i")).state is S
    v = direct_root_stability(parse("z1-i"))
    assert v.state is N and abs(v.witness - 1j) < 1e-12
    assert direct_root_stability(parse("z1^2+3*i*z1-2")).state is S
    # a real root sits inside the margin
    assert direct_root_stability(parse("z1-1")).state is U


def test_hermite_biehler_matches_roots():
    rng = random.Random(21)
    agreed = 0
    for _ in range(300):
        f = random_complex_univariate(rng, rng.randint(1, 6))
        d = direct_root_stability(f)
        if d.state is U:
            continue
        assert hermite_biehler(f).state is d.state
        agreed += 1
    assert agreed > 200


def test_stable_products_of_constructed_roots():
    rng = random.Random(2)
    for _ in range(50):
        roots = [complex(rng.randint(-5, 5), -rng.randint(1, 5)) for _ in range(rng.randint(1, 5))]
        f = Poly.constant(1, 1)
        for r in roots:
            f = f * (Poly.var(0, 1) - GaussQ(int(r.real), int(r.imag)))
        assert hermite_biehler(f).state is S
        flipped = f * (Poly.var(0, 1) - GaussQ(0, 1))
        assert hermite_biehler(flipped).state is N


def test_delta_examples():
    d = braenden_delta(parse("z1*z2+z1+z2-1"), 0, 1)
    assert d.delta == parse("2", 2)
    assert d.nonnegativity.kind == "ProvedConstant" and d.nonnegativity.value == 2
    c = braenden_delta(parse("z1*z2+1"), 0, 1)
    assert c.delta == parse("-1", 2)
    assert c.nonnegativity.kind == "Counterexample"
    assert braenden_delta(parse("z1+z2"), 0, 1).nonnegativity.value == 1
    with pytest.raises(ValueError):
        braenden_delta(parse("z1^2*z2"), 0, 1)


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_delta_identity(c):
    a, b, g, d = c
    f = parse(f"({a})*z1*z2*z3 + ({b})*z1*z2 + ({g})*z3 + ({d})")
    rep = braenden_delta(f, 0, 2, samples=200)
    f1, f2 = f.derivative(0), f.derivative(2)
    assert rep.delta == f1 * f2 - f.derivative(0).derivative(2) * f


def test_multilinear_examples():
    assert multilinear_stability(parse("z1*z2+z1+z2-1")).state is S
    assert multilinear_stability(parse("z1*z2+1")).state is N
    # z1^2 polarises to z11*z12, whose Delta is identically zero
    v = multilinear_stability(parse("z1^2"))
    assert v.state is S and v.detail["polarized_nvars"] == 2
    assert braenden_delta(parse("z1*z2"), 0, 1).delta.is_zero()


def test_multilinear_unknown_when_only_sampled():
    v = multilinear_stability(parse("z1*z2+z1*z3+z2*z3"), samples=2000)
    assert v.state is U
    w = multilinear_stability(parse("z1*z2*z3+z1+z2+z3"), samples=2000)
    assert w.state is N


def test_hyperbolicity_examples():
    h = hyperbolicity(parse("z1^2+z2^2-z3^2"), (0, 0, 1))
    assert h.state == "Hyperbolic" and h.trials == 200
    n = hyperbolicity(parse("z1^2+z2^2"), (1, 0))
    assert n.state == "NotHyperbolic" and n.witness[1] != 0
    assert hyperbolicity(parse("z1*z2"), (1, 1)).state == "Hyperbolic"
    # f(e) = 0 fails at once
    assert hyperbolicity(parse("z1*z2"), (1, 0)).state == "NotHyperbolic"
    with pytest.raises(ValueError):
        hyperbolicity(parse("z1^2+z2"), (1, 0))


def test_restriction_is_exact():
    line = restrict_to_line(parse("z1^2+z2^2-z3^2"), (1, 2, 0), (0, 0, 1))
    assert line == [5, 0, -1]


QUADRIC_CONES = [
    "z1^2+z2^2-z3^2",
    "-z1^2+z2^2+z3^2",
    "z1^2-z2^2-z3^2",
    "z1^2+z2^2+z3^2",
    "z1^2+z2^2",
    "z1^2-z2^2",
    "z1^2",
    "2*z1^2+3*z2^2-z3^2",
]
DIRECTIONS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3)]


@pytest.mark.parametrize("text", QUADRIC_CONES)
def test_hyperbolicity_matches_projection(text):
    f = parse(text, 3)
    hyperbolic = any(hyperbolicity(f, e, trials=60).state == "Hyperbolic" for e in DIRECTIONS)
    assert hyperbolic == (not closed_form_region(f).is_everything())


def test_projection_examples():
    assert stable_via_projection(parse("z1*z2+z1+z2-1")).state is S
    v = stable_via_projection(parse("z1*z2+1"))
    assert v.state is N and all(c > 0 for c in v.witness)
    assert stable_via_projection(parse("z1^2+z2^2+1")).state is N


@given(st.lists(st.integers(-4, 4).filter(bool), min_size=2, max_size=3), st.integers(-5, 5))
def test_linear_case(coeffs, a0):
    terms = " + ".join(f"({c})*z{k + 1}" for k, c in enumerate(coeffs))
    f = parse(f"{terms} + ({a0})")
    expected = all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)
    assert (stable_via_projection(f).state is S) == expected
    assert stable_via_projection(f).state is not U


STABLE_2D = [
    "z1*z2+z1+z2-1",
    "z1*z2+2*z1+3*z2+1",
    "(z1+z2+i)*(2*z1+z2)",
    "(z1+2*z2)*(3*z1+z2)*(z1+z2+1)",
]
UPPER = [GaussQ(0), GaussQ(0, 1), GaussQ(2, 3), GaussQ(-1, mpq(1, 2)), GaussQ(5)]


def _univariate_verdict(g: Poly):
    if g.is_zero() or g.degree() < 1:
        return S
    return hermite_biehler(g.drop_vars([k for k in range(g.nvars) if g.degree_in(k)] or [0])).state


@pytest.mark.parametrize("text", STABLE_2D)
def test_stability_preserving_operations(text):
    f = parse(text, 2)
    z1 = Poly.var(0, 2)
    # specialisation at points of the closed upper half-plane
    for a in UPPER:
        for k in (0, 1):
            g = f.substitute({k: a})
            assert _univariate_verdict(g) is S, (text, k, a)
    # diagonalisation z2 = z1
    assert _univariate_verdict(f.compose([z1, z1])) is S
    # differentiation keeps stability; one-variable slices of the derivative must stay stable
    for k in (0, 1):
        d = f.derivative(k)
        for a in UPPER:
            for j in (0, 1):
                assert _univariate_verdict(d.substitute({j: a})) is S, (text, k, j, a)


def test_stable_examples_are_certified():
    for text in STABLE_2D[:2]:
        assert multilinear_stability(parse(text)).state is S
    # the factored form is certified factor by factor; the expanded one only sampled
    assert stable_via_projection(parse_factors("z1+z2+i; 2*z1+z2")).state is S
    assert stable_via_projection(parse("(z1+z2+i)*(2*z1+z2)")).state is U


def test_verdicts_serialise():
    doc = stable_via_projection(parse("z1*z2+1")).to_json()
    assert doc["state"] == "NotStable" and isinstance(doc["witness"], list)
    assert direct_root_stability(parse("z1-i")).to_json()["witness"] == [0.0, 1.0]
