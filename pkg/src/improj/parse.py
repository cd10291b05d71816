"""Parse and format polynomial expressions.

Grammar (whitespace is ignored)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := ('+' | '-') factor | power
    power   := atom ('^' INTEGER)?
    atom    := NUMBER [power-of-VAR-or-i] | 'i' | VAR | '(' expr ')'
    NUMBER  := digits ['.' digits]           exact, so 0.5 is 1/2
    VAR     := 'z' digits (index >= 1) | 'x' | 'y' | 'z'   (aliases of z1, z2, z3)

Division is only by a nonzero constant.  A number may be followed directly by
a variable or by ``i`` (``2z1^2`` is ``2*(z1^2)``, ``3i``); no other
juxtaposition is allowed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from gmpy2 import mpq

from improj.polycore import GaussQ, Poly

MAX_EXPONENT = 1000
MAX_DEGREE = 2000
ALIASES = {"x": 1, "y": 2, "z": 3}


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Token:
    kind: str  # num, var, i, op, lpar, rpar, end
    value: object
    pos: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<var>z\d+|[a-zA-Z_]\w*)|(?P<op>[-+*/^])|(?P<lpar>\()|(?P<rpar>\)))"
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        raw = m.group(kind)
        if kind == "num":
            tokens.append(Token("num", mpq(raw), start))
        elif kind == "var":
            if raw == "i":
                tokens.append(Token("i", None, start))
            elif raw in ALIASES:
                tokens.append(Token("var", ALIASES[raw], start))
            elif re.fullmatch(r"z\d+", raw):
                k = int(raw[1:])
                if k < 1 or raw[1] == "0":
                    raise ParseError(f"bad variable {raw!r}", start, text)
                tokens.append(Token("var", k, start))
            else:
                raise ParseError(f"unknown token {raw!r}", start, text)
        else:
            tokens.append(Token(kind, raw, start))
        pos = m.end()
    tokens.append(Token("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, tokens: list[Token], nvars: int):
        self.text = text
        self.tokens = tokens
        self.k = 0
        self.nvars = nvars

    def peek(self) -> Token:
        return self.tokens[self.k]

    def take(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok.pos, self.text)

    def parse(self) -> Poly:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.describe(self.peek())}")
        return p

    @staticmethod
    def describe(tok: Token) -> str:
        if tok.kind == "end":
            return "end of input"
        if tok.kind == "var":
            return f"variable z{tok.value}"
        return repr(tok.value if tok.kind != "i" else "i")

    def expr(self) -> Poly:
        p = self.term()
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = self.take().value
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek().kind == "op" and self.peek().value in "*/":
            op = self.take()
            q = self.factor()
            if op.value == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise self.error("division only by a nonzero constant", op)
                p = p / q.constant_coeff()
            self.check_degree(p, op)
        return p

    def factor(self) -> Poly:
        tok = self.peek()
        if tok.kind == "op" and tok.value in "+-":
            self.take()
            p = self.factor()
            return -p if tok.value == "-" else p
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().value == "^":
            op = self.take()
            tok = self.take()
            if tok.kind != "num" or tok.value.denominator != 1:
                raise self.error("exponent must be a non-negative integer", tok)
            k = int(tok.value)
            if k > MAX_EXPONENT or base.degree() * k > MAX_DEGREE:
                raise self.error("exponent overflow", tok)
            base = base ** k
            if self.peek().kind == "op" and self.peek().value == "^":
                raise self.error("chained exponents need parentheses", op)
        return base

    def atom(self) -> Poly:
        tok = self.take()
        n = self.nvars
        if tok.kind == "num":
            p = Poly.constant(tok.value, n)
            if self.peek().kind in ("var", "i"):
                # coefficient juxtaposed with a variable: 2z1^3 means 2*(z1^3)
                p = p * self.power()
            return p
        if tok.kind == "i":
            return Poly.constant(GaussQ(0, 1), n)
        if tok.kind == "var":
            return Poly.var(tok.value - 1, n)
        if tok.kind == "lpar":
            p = self.expr()
            if self.peek().kind != "rpar":
                raise self.error("expected ')'")
            self.take()
            return p
        raise self.error(f"unexpected {self.describe(tok)}", tok)

    def check_degree(self, p: Poly, tok: Token):
        if p.degree() > MAX_DEGREE:
            raise self.error("degree overflow", tok)


def parse(text: str, nvars: int | None = None) -> Poly:
    """Parse an expression into an exact :class:`Poly`.

    ``nvars`` defaults to the highest variable index used (at least 1); a
    larger value embeds the polynomial in more variables.
    """
    tokens = tokenize(text)
    depth = 0
    for tok in tokens:
        if tok.kind == "lpar":
            depth += 1
        elif tok.kind == "rpar":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", tok.pos, text)
    if depth:
        raise ParseError("unbalanced '('", len(text), text)
    used = max((t.value for t in tokens if t.kind == "var"), default=0)
    if nvars is None:
        nvars = max(used, 1)
    elif nvars < used:
        raise ParseError(f"expression uses z{used} but nvars={nvars}", 0, text)
    return _Parser(text, tokens, nvars).parse()


def parse_factors(text: str, nvars: int | None = None) -> list[Poly]:
    """Parse ``;``-separated factors into a common ring."""
    parts = [s for s in text.split(";") if s.strip()]
    if not parts:
        raise ParseError("empty factor list", 0, text)
    polys = [parse(s) for s in parts]
    n = max([p.nvars for p in polys] + [nvars or 0])
    return [parse(s, n) for s in parts]


def read_corpus(path) -> list[str]:
    """Expression lines of a corpus file; ``#`` starts a comment."""
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


# -- formatting -----------------------------------------------------------------


def _rat(q) -> str:
    q = mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _monomial(exp) -> str:
    parts = []
    for k, e in enumerate(exp):
        if e == 1:
            parts.append(f"z{k + 1}")
        elif e > 1:
            parts.append(f"z{k + 1}^{e}")
    return "*".join(parts)


def format_coeff(c: GaussQ) -> str:
    """Coefficient as a standalone, reparseable string."""
    if not c.im:
        return _rat(c.re)
    if not c.re:
        return "i" if c.im == 1 else "-i" if c.im == -1 else f"{_rat(c.im)}*i"
    sign = "+" if c.im > 0 else "-"
    mag = abs(c.im)
    im = "i" if mag == 1 else f"{_rat(mag)}*i"
    return f"({_rat(c.re)}{sign}{im})"


def format_poly(p: Poly) -> str:
    """Canonical text: graded-lex order, ``a/b`` rationals, ``(a+b*i)`` complex."""
    if p.is_zero():
        return "0"
    out = []
    for idx, (exp, c) in enumerate(p.sorted_terms()):
        mono = _monomial(exp)
        if c.re and c.im:
            neg = False
            body = format_coeff(c) + (f"*{mono}" if mono else "")
        else:
            val = c.re if c.re else c.im
            neg = val < 0
            mag = abs(val)
            unit = "" if c.re else "i"
            if unit:
                num = "i" if mag == 1 else f"{_rat(mag)}*i"
            else:
                num = _rat(mag)
            if mono and mag == 1 and not unit:
                body = mono
            elif mono:
                body = f"{num}*{mono}"
            else:
                body = num
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
