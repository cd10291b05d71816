import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from improj.parse import format_poly, parse
from improj.polycore import (
    AffineMap,
    GaussQ,
    Poly,
    dehomogenize,
    depolarize,
    homogenize,
    mat_det,
    mat_inverse,
    mat_mul,
    polarization_blocks,
    polarize,
    pullback,
    realify,
)

from strategies import gauss, points, polys


def test_gaussq_arithmetic():
    a, b = GaussQ(1, 2), GaussQ(mpq(1, 2), -1)
    assert a * b == GaussQ(mpq(5, 2), 0)
    assert (a / b) * b == a
    assert a.conj() == GaussQ(1, -2)
    assert a.abs2() == 5
    assert GaussQ(0, 1) ** 2 == GaussQ(-1)
    with pytest.raises(ZeroDivisionError):
        a / GaussQ(0)


def test_realify_sum_of_squares():
    # z1^2+z2^2+1 with z = x + iy
    rp = realify(parse("z1^2+z2^2+1"))
    assert format_poly(rp.re) == format_poly(parse("z1^2 + z2^2 - z3^2 - z4^2 + 1"))
    assert format_poly(rp.im) == format_poly(parse("2*z1*z3 + 2*z2*z4"))


def test_homogenize_multilinear_example():
    # the homogenising variable comes first
    h = homogenize(parse("z1*z2+z1+z2-1"))
    assert h == parse("z2*z3 + z1*z2 + z1*z3 - z1^2")
    assert h.is_homogeneous()
    assert dehomogenize(h) == parse("z1*z2+z1+z2-1")


def test_pullback_shift_moves_projection():
    f = parse("z1")
    g = pullback(f, AffineMap.identity(1, imag_shift=[1]))
    assert g == parse("z1+i")
    # I(z1+i) = {y1 = -1}
    assert AffineMap.identity(1, imag_shift=[1]).image_point([-1]) == [0]


def test_polarize_example():
    f = parse("z1^2*z2")
    p = polarize(f)
    assert p == parse("z1*z2*z3")
    assert p.is_multilinear()
    assert polarization_blocks(f) == [[0, 1], [2]]
    assert depolarize(p, polarization_blocks(f)) == f


@given(polys(nvars=2, max_degree=3))
def test_polarize_roundtrip(f):
    p = polarize(f)
    assert p.is_multilinear()
    assert depolarize(p, polarization_blocks(f)) == f


@given(polys(nvars=2), polys(nvars=2), polys(nvars=2))
def test_ring_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert f * g == g * f
    assert f - f == Poly.zero(2)


@given(polys(nvars=2, max_degree=2), points(2), points(2))
def test_realify_evaluates_consistently(f, x, y):
    z = [GaussQ(a, b) for a, b in zip(x, y)]
    value = f.substitute({k: z[k] for k in range(2)}).constant_coeff()
    rp = realify(f)
    vals = {0: x[0], 1: x[1], 2: y[0], 3: y[1]}
    assert rp.re.substitute(vals).constant_coeff() == GaussQ(value.re)
    assert rp.im.substitute(vals).constant_coeff() == GaussQ(value.im)


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_matrix_inverse(rows):
    if mat_det(rows) == 0:
        with pytest.raises(ValueError):
            mat_inverse(rows)
        return
    prod = mat_mul(rows, mat_inverse(rows))
    assert all(prod[i][j] == (i == j) for i in range(3) for j in range(3))


def test_pullback_rejects_singular():
    with pytest.raises(ValueError):
        pullback(parse("z1+z2"), AffineMap([[1, 1], [2, 2]]))


@given(polys(nvars=2, max_degree=2), gauss)
def test_derivative_product_rule(f, c):
    g = f * Poly.var(0, 2) + Poly.constant(c, 2)
    assert g.derivative(0) == f.derivative(0) * Poly.var(0, 2) + f
