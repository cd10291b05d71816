"""Exact multivariate polynomials over the Gaussian rationals.

Coefficients are pairs of exact rationals (``gmpy2.mpq``).  A :class:`Poly`
stores its terms densely indexed by exponent tuples of length ``nvars``;
variable ``k`` (0-based) prints as ``z{k+1}``.

Realification follows the convention ``z_j = x_j + i y_j`` with the real
variables ordered ``(x_1..x_n, y_1..y_n)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from gmpy2 import mpq

MAX_VARS = 8

_ZERO = mpq(0)
_ONE = mpq(1)


def Q(x) -> mpq:
    """Exact rational from int, Fraction, mpq, float (binary-exact) or str."""
    if isinstance(x, type(_ZERO)):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return mpq(x)
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, np.integer):
        return mpq(int(x))
    if isinstance(x, np.floating):
        return Q(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class GaussQ:
    """Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussQ):
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, complex):
            re, im = re.real, re.imag
        self.re = Q(re)
        self.im = Q(im)

    @staticmethod
    def _raw(re, im) -> "GaussQ":
        g = object.__new__(GaussQ)
        g.re = re
        g.im = im
        return g

    @staticmethod
    def coerce(x) -> "GaussQ":
        return x if isinstance(x, GaussQ) else GaussQ(x)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        o = GaussQ.coerce(other)
        return GaussQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussQ.coerce(other)
        return GaussQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussQ.coerce(other) - self

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussQ.coerce(other)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussQ._raw(a * c, _ZERO)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussQ.coerce(other)
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero")
        return self * GaussQ._raw(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        return GaussQ.coerce(other) / self

    def __pow__(self, k: int):
        out = GaussQ._raw(_ONE, _ZERO)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self):
        return GaussQ._raw(self.re, -self.im)

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


_GZERO = GaussQ._raw(_ZERO, _ZERO)
_GONE = GaussQ._raw(_ONE, _ZERO)


def _grlex_key(exp):
    # descending total degree, then lexicographically descending exponents
    return (-sum(exp), tuple(-e for e in exp))


class Poly:
    """Sparse polynomial in ``nvars`` variables with Gaussian-rational coefficients.

    Instances are treated as immutable.  The zero polynomial has no terms.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in dict(terms).items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent {exp} for {nvars} variables")
                c = GaussQ.coerce(c)
                if c:
                    clean[exp] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, nvars, terms):
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._from_clean(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "Poly":
        c = GaussQ.coerce(c)
        return cls._from_clean(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, k: int, nvars: int) -> "Poly":
        if not 0 <= k < nvars:
            raise ValueError(f"variable index {k} out of range for {nvars} variables")
        exp = tuple(1 if j == k else 0 for j in range(nvars))
        return cls._from_clean(nvars, {exp: _GONE})

    @classmethod
    def monomial(cls, exp, c=1) -> "Poly":
        exp = tuple(exp)
        return cls(len(exp), {exp: c})

    # -- basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self) -> GaussQ:
        return self.terms.get((0,) * self.nvars, _GZERO)

    def coeff(self, exp) -> GaussQ:
        return self.terms.get(tuple(exp), _GZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self.terms), default=-1)

    def is_real(self) -> bool:
        return all(not c.im for c in self.terms.values())

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_multilinear(self) -> bool:
        return all(max(e, default=0) <= 1 for e in self.terms)

    def used_vars(self) -> list[int]:
        return [k for k in range(self.nvars) if any(e[k] for e in self.terms)]

    def sorted_terms(self):
        """Terms in graded-lex order (highest degree first, z1 > z2 > ...)."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._from_clean(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def leading_form(self) -> "Poly":
        return self.homogeneous_part(self.degree())

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._from_clean(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._from_clean(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = GaussQ.coerce(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._from_clean(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Poly._from_clean(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ValueError("can only divide by a nonzero constant")
            other = other.constant_coeff()
        c = GaussQ.coerce(other)
        return self * (_GONE / c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = Poly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.constant(other, self.nvars)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from improj.parse import format_poly

        return f"Poly({format_poly(self)!r}, nvars={self.nvars})"

    # -- structural operations ---------------------------------------------
    def conj(self) -> "Poly":
        """Conjugate every coefficient."""
        return Poly._from_clean(self.nvars, {e: c.conj() for e, c in self.terms.items()})

    def real_part(self) -> "Poly":
        """Coefficient-wise real part (the real part on real inputs)."""
        return Poly._from_clean(
            self.nvars, {e: GaussQ._raw(c.re, _ZERO) for e, c in self.terms.items() if c.re}
        )

    def imag_part(self) -> "Poly":
        return Poly._from_clean(
            self.nvars, {e: GaussQ._raw(c.im, _ZERO) for e, c in self.terms.items() if c.im}
        )

    def derivative(self, k: int) -> "Poly":
        if not 0 <= k < self.nvars:
            raise ValueError(f"variable index {k} out of range")
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1 :]
                out[ne] = c * e[k]
        return Poly._from_clean(self.nvars, out)

    def extend(self, nvars: int, positions=None) -> "Poly":
        """Embed into ``nvars`` variables; variable j goes to ``positions[j]``."""
        if positions is None:
            positions = list(range(self.nvars))
        if len(positions) != self.nvars or nvars < self.nvars:
            raise ValueError("bad embedding")
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for j, p in enumerate(positions):
                ne[p] += e[j]
            out[tuple(ne)] = c
        return Poly._from_clean(nvars, out)

    def drop_vars(self, keep) -> "Poly":
        """Restrict to the variables in ``keep`` (others must not occur)."""
        keep = list(keep)
        out = {}
        for e, c in self.terms.items():
            if any(e[j] for j in range(self.nvars) if j not in keep):
                raise ValueError("dropping a variable that occurs")
            out[tuple(e[j] for j in keep)] = c
        return Poly._from_clean(len(keep), out)

    def compose(self, subs) -> "Poly":
        """Substitute ``z_j -> subs[j]`` (all Polys in a common ring)."""
        subs = list(subs)
        if len(subs) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutions, got {len(subs)}")
        if not subs:
            return self
        m = subs[0].nvars
        if any(s.nvars != m for s in subs):
            raise ValueError("substitutions live in different rings")
        cache = {}

        def power(j, k):
            key = (j, k)
            if key not in cache:
                cache[key] = subs[j] ** k
            return cache[key]

        out = Poly.zero(m)
        for e, c in self.terms.items():
            t = Poly.constant(c, m)
            for j, k in enumerate(e):
                if k:
                    t = t * power(j, k)
            out = out + t
        return out

    def substitute(self, values: dict) -> "Poly":
        """Partially evaluate: ``values`` maps variable index -> scalar. Keeps nvars."""
        vals = {k: GaussQ.coerce(v) for k, v in values.items()}
        out = {}
        for e, c in self.terms.items():
            coef = c
            ne = list(e)
            for k, v in vals.items():
                if e[k]:
                    coef = coef * v ** e[k]
                    ne[k] = 0
            ne = tuple(ne)
            s = out.get(ne)
            out[ne] = coef if s is None else s + coef
        return Poly._from_clean(self.nvars, {e: c for e, c in out.items() if c})

    def coeffs_in(self, k: int) -> list["Poly"]:
        """Coefficients as a polynomial in variable k: ``f = sum c_j z_k^j``."""
        d = self.degree_in(k)
        parts = [dict() for _ in range(max(d, 0) + 1)]
        for e, c in self.terms.items():
            parts[e[k]][e[:k] + (0,) + e[k + 1 :]] = c
        return [Poly._from_clean(self.nvars, p) for p in parts] if d >= 0 else []

    # -- evaluation ---------------------------------------------------------
    def __call__(self, *point):
        return self.eval(point)

    def eval(self, point):
        """Evaluate at a point.

        Exact (``GaussQ``) when every entry is exact (int, Fraction, mpq or
        GaussQ); complex float otherwise.
        """
        point = list(point)
        if len(point) != self.nvars:
            raise ValueError(f"dimension mismatch: point has {len(point)} entries, expected {self.nvars}")
        exact = all(isinstance(v, (int, Fraction, GaussQ, type(_ZERO))) for v in point)
        if exact:
            pts = [GaussQ.coerce(v) for v in point]
            total = _GZERO
            for e, c in self.terms.items():
                t = c
                for v, k in zip(pts, e):
                    if k:
                        t = t * v ** k
                total = total + t
            return total
        pts = [complex(v) for v in point]
        total = 0j
        for e, c in self.terms.items():
            t = complex(c)
            for v, k in zip(pts, e):
                if k:
                    t *= v ** k
            total += t
        return total

    def eval_real_exact(self, point) -> mpq:
        """Exact value of a real-coefficient polynomial at a rational point."""
        pts = [Q(v) for v in point]
        total = _ZERO
        for e, c in self.terms.items():
            t = c.re
            for v, k in zip(pts, e):
                if k:
                    t = t * v ** k
            total += t
        return total

    def eval_numpy(self, *arrays):
        """Vectorised complex evaluation over broadcastable numpy arrays."""
        if len(arrays) != self.nvars:
            raise ValueError("dimension mismatch")
        arrays = [np.asarray(a, dtype=complex) for a in arrays]
        shape = np.broadcast(*arrays).shape if arrays else ()
        total = np.zeros(shape, dtype=complex)
        for e, c in self.terms.items():
            t = np.full(shape, complex(c))
            for a, k in zip(arrays, e):
                if k:
                    t = t * a ** k
            total = total + t
        return total

    def univariate_coeffs(self, k: int | None = None) -> list[GaussQ]:
        """Dense ascending coefficients of a polynomial in a single variable k."""
        if k is None:
            used = self.used_vars()
            if len(used) > 1:
                raise ValueError("polynomial is not univariate")
            k = used[0] if used else 0
        if any(e[j] for e in self.terms for j in range(self.nvars) if j != k):
            raise ValueError("polynomial depends on other variables")
        d = self.degree_in(k)
        out = [_GZERO] * (max(d, 0) + 1)
        for e, c in self.terms.items():
            out[e[k]] = c
        return out


def poly_from_univariate(coeffs, nvars: int = 1, k: int = 0) -> Poly:
    """Build a Poly in variable k from dense ascending coefficients."""
    terms = {}
    for j, c in enumerate(coeffs):
        exp = [0] * nvars
        exp[k] = j
        terms[tuple(exp)] = c
    return Poly(nvars, terms)


def variables(nvars: int) -> list[Poly]:
    return [Poly.var(k, nvars) for k in range(nvars)]


# -- realification --------------------------------------------------------------


@dataclass(frozen=True)
class RePair:
    """``f(x + iy) = re(x, y) + i*im(x, y)``; both real, in ``2n`` variables."""

    re: Poly
    im: Poly

    @property
    def n(self) -> int:
        return self.re.nvars // 2

    def specialize_y(self, y) -> "RePair":
        """Fix the imaginary parts; result is real polynomials in ``x`` only."""
        n = self.n
        vals = {n + j: Q(v) for j, v in enumerate(y)}
        keep = list(range(n))
        return RePair(self.re.substitute(vals).drop_vars(keep), self.im.substitute(vals).drop_vars(keep))


def realify(f: Poly) -> RePair:
    n = f.nvars
    xs = variables(2 * n)
    i = GaussQ._raw(_ZERO, _ONE)
    g = f.compose([xs[j] + xs[n + j] * i for j in range(n)])
    return RePair(g.real_part(), g.imag_part())


# -- homogenisation -------------------------------------------------------------


def homogenize(f: Poly) -> Poly:
    """``f_h(z0, z1..zn)`` of degree ``deg f`` with ``f_h(1, z) = f(z)``."""
    if f.is_zero():
        raise ValueError("cannot homogenize the zero polynomial")
    d = f.degree()
    return Poly._from_clean(f.nvars + 1, {(d - sum(e),) + e: c for e, c in f.terms.items()})


def dehomogenize(fh: Poly) -> Poly:
    """Set the leading variable z0 = 1."""
    out = Poly.zero(fh.nvars - 1)
    for e, c in fh.terms.items():
        out = out + Poly._from_clean(fh.nvars - 1, {e[1:]: c})
    return out


# -- rational linear algebra ----------------------------------------------------


def mat_q(rows) -> list[list[mpq]]:
    return [[Q(v) for v in row] for row in rows]


def mat_inverse(a) -> list[list[mpq]]:
    """Exact inverse by Gauss-Jordan; raises ValueError when singular."""
    n = len(a)
    m = [list(map(Q, row)) + [_ONE if i == j else _ZERO for j in range(n)] for i, row in enumerate(a)]
    if any(len(row) != 2 * n for row in m):
        raise ValueError("matrix must be square")
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                fac = m[r][col]
                m[r] = [v - fac * w for v, w in zip(m[r], m[col])]
    return [row[n:] for row in m]


def mat_det(a) -> mpq:
    n = len(a)
    m = [list(map(Q, row)) for row in a]
    det = _ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return _ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                fac = m[r][col] / m[col][col]
                m[r] = [v - fac * w for v, w in zip(m[r], m[col])]
    return det


def mat_vec(a, v) -> list[mpq]:
    return [sum((Q(x) * Q(y) for x, y in zip(row, v)), _ZERO) for row in a]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), _ZERO) for col in bt] for row in a]


# -- affine maps ----------------------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """``z -> A z + a + i b`` with rational ``A``, ``a``, ``b``."""

    matrix: tuple
    real_shift: tuple
    imag_shift: tuple

    def __init__(self, matrix, real_shift=None, imag_shift=None):
        A = tuple(tuple(Q(v) for v in row) for row in matrix)
        n = len(A)
        if any(len(row) != n for row in A):
            raise ValueError("matrix must be square")
        a = tuple(Q(v) for v in (real_shift if real_shift is not None else [0] * n))
        b = tuple(Q(v) for v in (imag_shift if imag_shift is not None else [0] * n))
        if len(a) != n or len(b) != n:
            raise ValueError("shift dimension does not match matrix")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "real_shift", a)
        object.__setattr__(self, "imag_shift", b)

    @classmethod
    def identity(cls, n: int, real_shift=None, imag_shift=None) -> "AffineMap":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], real_shift, imag_shift)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def is_invertible(self) -> bool:
        return mat_det(self.matrix) != 0

    def image_point(self, y) -> list[mpq]:
        """Where ``y`` lands in the original coordinates: ``A y + b``.

        ``y`` lies in I(pullback(f, m)) exactly when ``A y + b`` lies in I(f).
        """
        return [v + s for v, s in zip(mat_vec(self.matrix, y), self.imag_shift)]


def pullback(f: Poly, m: AffineMap) -> Poly:
    """``f(A z + a + i b)``."""
    if m.n != f.nvars:
        raise ValueError(f"map acts on {m.n} variables, polynomial has {f.nvars}")
    if not m.is_invertible():
        raise ValueError("singular matrix")
    n = f.nvars
    zs = variables(n)
    subs = []
    for j in range(n):
        s = Poly.constant(GaussQ._raw(m.real_shift[j], m.imag_shift[j]), n)
        for k in range(n):
            if m.matrix[j][k]:
                s = s + zs[k] * m.matrix[j][k]
        subs.append(s)
    return f.compose(subs)


# -- polarisation ---------------------------------------------------------------


def polarization_blocks(f: Poly) -> list[list[int]]:
    """Variable indices of the polarised ring, one block per original variable."""
    blocks, nxt = [], 0
    for k in range(f.nvars):
        size = max(f.degree_in(k), 1)
        blocks.append(list(range(nxt, nxt + size)))
        nxt += size
    return blocks


def polarize(f: Poly) -> Poly:
    """Multilinear, block-symmetric polynomial collapsing to f on the diagonal.

    Variable ``z_j`` of degree ``d_j`` becomes the block ``z_j1..z_jd_j``
    (blocks laid out consecutively, see :func:`polarization_blocks`), and
    ``z_j^k`` is replaced by the normalised k-th elementary symmetric function
    of its block.  Multilinear input is returned unchanged.
    """
    if f.is_multilinear():
        return f
    blocks = polarization_blocks(f)
    m = blocks[-1][-1] + 1 if blocks else 0
    out = {}
    for e, c in f.terms.items():
        choices = []
        for k, block in enumerate(blocks):
            choices.append(list(itertools.combinations(block, e[k])))
        weight = reduce(lambda acc, kb: acc * math.comb(len(kb[1]), e[kb[0]]), enumerate(blocks), 1)
        coef = c * Q(Fraction(1, weight))
        for combo in itertools.product(*choices):
            exp = [0] * m
            for subset in combo:
                for v in subset:
                    exp[v] = 1
            exp = tuple(exp)
            s = out.get(exp)
            out[exp] = coef if s is None else s + coef
    return Poly._from_clean(m, {e: c for e, c in out.items() if c})


def depolarize(p: Poly, blocks) -> Poly:
    """Apply ``z_jk -> z_j``; inverse of :func:`polarize` on the diagonal."""
    n = len(blocks)
    zs = variables(n)
    subs = [None] * p.nvars
    for j, block in enumerate(blocks):
        for v in block:
            subs[v] = zs[j]
    return p.compose(subs)
