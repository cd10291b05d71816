import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from improj.parse import ParseError, format_poly, parse, parse_factors, read_corpus, tokenize
from improj.polycore import GaussQ, Poly

from strategies import polys


def test_examples():
    f = parse("z1^2 + z2^2 + 1")
    assert f.nvars == 2 and f.degree() == 2
    assert parse("(1+2i)*z1").coeff((1,)) == GaussQ(1, 2)
    g = parse("z1*z2 + z1 + z2 - 1")
    assert g.is_multilinear() and g.constant_coeff() == GaussQ(-1)


def test_format_examples():
    assert format_poly(Poly.zero(3)) == "0"
    assert format_poly(parse("z2^2+z1^2+1")) == "z1^2 + z2^2 + 1"
    assert format_poly(parse("(1/2+3/4*i)*z1 + i")) == "(1/2+3/4*i)*z1 + i"


def test_decimals_are_exact():
    f = parse("0.5*z2^2 + 1.5")
    assert f.coeff((0, 2)) == GaussQ(mpq(1, 2))
    assert f.constant_coeff() == GaussQ(mpq(3, 2))


def test_aliases_and_nvars():
    assert parse("x*y*z") == parse("z1*z2*z3")
    assert parse("z1", 3).nvars == 3
    with pytest.raises(ValueError):
        parse("z3", 2)


def test_imaginary_literal_binds_like_python():
    # 3/4i is 3/(4i), as in Python's 3/4j
    assert parse("3/4i") == parse("-3/4*i")


@pytest.mark.parametrize(
    "text",
    ["z1 z2", "z1^1001", "z1 $ 2", "((z1)", "z1)", "z0", "", "z1 +", "*z1", "z1^-1", "z1^z2"],
)
def test_rejects(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position >= 0


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse("z1 + z2 $")
    assert info.value.position == 8


@given(polys(nvars=st.integers(1, 3), max_degree=4, max_terms=6))
def test_roundtrip(f):
    text = format_poly(f)
    g = parse(text, f.nvars)
    assert g == f
    assert format_poly(g) == text


def test_roundtrip_thousand_random():
    rng = random.Random(3)
    for _ in range(1000):
        n = rng.randint(1, 4)
        terms = {
            tuple(rng.randint(0, 3) for _ in range(n)): GaussQ(mpq(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-2, 2))
            for _ in range(rng.randint(0, 5))
        }
        f = Poly(n, terms)
        assert parse(format_poly(f), n) == f


@given(st.data())
def test_unbalanced_parentheses_rejected(data):
    base = "((z1+1)*(z2-i))^2 - (3*(z1 + z2))"
    positions = [k for k, ch in enumerate(base) if ch in "()"]
    k = data.draw(st.sampled_from(positions))
    mutated = base[:k] + base[k + 1 :]
    with pytest.raises(ParseError):
        parse(mutated)


def test_tokens_carry_positions():
    toks = tokenize("z1 + 2*i")
    assert [t.pos for t in toks][:3] == [0, 3, 5]


def test_factors_and_corpus(tmp_path):
    fs = parse_factors("z1+1; z2+i")
    assert [f.nvars for f in fs] == [2, 2]
    path = tmp_path / "c.txt"
    path.write_text("# header\nz1+1\n\n  z1*z2  # trailing\n")
    assert read_corpus(path) == ["z1+1", "z1*z2"]
