"""Univariate real-root machinery over Q, plus a complex root finder.

A real univariate polynomial is a dense ascending list of ``mpq``
coefficients with no trailing zeros; ``[]`` is the zero polynomial.
Everything here is exact except :func:`complex_roots`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import gmpy2
from gmpy2 import mpq, mpz

from improj.polycore import Poly, Q

_ZERO = mpq(0)
_ONE = mpq(1)


class NotApplicable(ValueError):
    """Raised when an operation's real-rootedness precondition fails."""


class SharedComponent(ArithmeticError):
    """Two bivariate polynomials share a non-constant factor."""

    def __init__(self, factor):
        super().__init__("polynomials share a common factor")
        self.factor = factor


class RootFindingError(RuntimeError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


# -- dense arithmetic -----------------------------------------------------------


def trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def as_upoly(p) -> list:
    """Coerce a Poly in one variable, or a coefficient sequence, to a dense list."""
    if isinstance(p, Poly):
        coeffs = p.univariate_coeffs()
        if any(c.im for c in coeffs):
            raise ValueError("polynomial has non-real coefficients")
        return trim(c.re for c in coeffs)
    return trim(Q(c) for c in p)


def deg(p) -> int:
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else _ZERO) + (q[i] if i < len(q) else _ZERO) for i in range(n))


def sub(p, q):
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else _ZERO) - (q[i] if i < len(q) else _ZERO) for i in range(n))


def mul(p, q):
    if not p or not q:
        return []
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p, c):
    c = Q(c)
    return trim(a * c for a in p) if c else []


def deriv(p):
    return trim(p[i] * i for i in range(1, len(p)))


def divmod_(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    lc = q[-1]
    if len(r) <= dq:
        return [], trim(r)
    quo = [_ZERO] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lc
        quo[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quo), trim(r[:dq])


def rem(p, q):
    return divmod_(p, q)[1]


def monic(p):
    return [c / p[-1] for c in p] if p else []


def evaluate(p, x):
    acc = _ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def primitive(p):
    """Positive rational multiple of ``p`` with coprime integer coefficients."""
    p = trim(p)
    if not p:
        return []
    den = mpz(1)
    for c in p:
        den = gmpy2.lcm(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for c in p]
    g = mpz(0)
    for c in ints:
        g = gmpy2.gcd(g, c)
    return [mpq(c // g) for c in ints]


def sign_at(p, x) -> int:
    """Sign of ``p(x)`` for integer coefficients ``p`` and rational ``x``.

    Evaluates ``b^d p(a/b)`` in integers, which has the same sign since ``b > 0``.
    """
    x = Q(x)
    a, b = x.numerator, x.denominator
    d = len(p) - 1
    if d < 0:
        return 0
    acc = mpz(p[-1].numerator)
    bp = mpz(1)
    for c in reversed(p[:-1]):
        bp *= b
        acc = acc * a + c.numerator * bp
    return (acc > 0) - (acc < 0)


def sign(v) -> int:
    return (v > 0) - (v < 0)


def gcd(p, q):
    """Monic gcd; ``gcd(0, 0) = 0``."""
    p, q = as_upoly(p), as_upoly(q)
    if p and q:
        p, q = primitive(p), primitive(q)
    while q:
        p, q = q, primitive(rem(p, q))
    return monic(p)


def squarefree(p):
    p = as_upoly(p)
    if len(p) <= 2:
        return monic(p) if p else []
    g = gcd(p, deriv(p))
    return monic(divmod_(p, g)[0]) if len(g) > 1 else monic(p)


def wronskian(f, g):
    """``W[f, g] = f' g - f g'``."""
    f, g = as_upoly(f), as_upoly(g)
    return sub(mul(deriv(f), g), mul(f, deriv(g)))


def compose_shift_scale(p, a, b):
    """``p(a*x + b)``."""
    out = []
    lin = trim([Q(b), Q(a)])
    for c in reversed(p):
        out = add(mul(out, lin), [c] if c else [])
    return out


def from_roots(roots):
    out = [_ONE]
    for r in roots:
        out = mul(out, [-Q(r), _ONE])
    return out


# -- Sturm chains ---------------------------------------------------------------


@dataclass(frozen=True)
class SturmChain:
    sequence: tuple

    @classmethod
    def of(cls, p) -> "SturmChain":
        """Chain of the square-free part of ``p``."""
        p = squarefree(as_upoly(p))
        if not p:
            raise ValueError("zero polynomial")
        # primitive integer rescaling by positive factors keeps every sign
        seq = [primitive(p)]
        if len(p) > 1:
            seq.append(primitive(deriv(p)))
            while True:
                r = rem(seq[-2], seq[-1])
                if not r:
                    break
                seq.append([-c for c in primitive(r)])
        return cls(tuple(tuple(s) for s in seq))

    def variations_at(self, x) -> int:
        """Sign variations at x; ``None`` means -inf, ``'+inf'`` means +inf."""
        signs = []
        for s in self.sequence:
            if x is None:
                v = sign(s[-1]) * (1 if (len(s) - 1) % 2 == 0 else -1)
            elif isinstance(x, str):
                v = sign(s[-1])
            else:
                v = sign_at(s, x)
            if v:
                signs.append(v)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def count(self, lo=None, hi=None) -> int:
        """Distinct real roots in ``(lo, hi]``; ``None`` bounds are infinite."""
        vlo = self.variations_at(lo)
        vhi = self.variations_at("+inf" if hi is None else hi)
        return vlo - vhi


def count_real_roots(p, interval=(None, None)) -> int:
    """Number of distinct real roots of ``p`` in the half-open ``(lo, hi]``."""
    p = as_upoly(p)
    if not p:
        raise ValueError("zero polynomial")
    lo, hi = interval
    lo = None if lo is None or lo == -math.inf else Q(lo)
    hi = None if hi is None or hi == math.inf else Q(hi)
    return SturmChain.of(p).count(lo, hi)


def has_real_root(p) -> bool:
    """Exact test for a real root.  Odd degree decides immediately."""
    p = as_upoly(p)
    if not p:
        raise ValueError("zero polynomial")
    d = len(p) - 1
    if d == 0:
        return False
    if d % 2:
        return True
    if d == 2:
        return p[1] * p[1] - 4 * p[0] * p[2] >= 0
    # variations at -inf minus variations at +inf, computed from leading terms
    seq = [primitive(p), primitive(deriv(p))]
    while True:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in primitive(r)])
    lo, hi = [], []
    for s in seq:
        lc = sign(s[-1])
        hi.append(lc)
        lo.append(lc if (len(s) - 1) % 2 == 0 else -lc)

    def var(signs):
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return var(lo) - var(hi) > 0


def cauchy_bound(p) -> mpq:
    lc = abs(p[-1])
    return 1 + max((abs(c) / lc for c in p[:-1]), default=_ZERO)


@dataclass
class RootIntervals:
    """Isolated distinct real roots of a square-free polynomial.

    ``intervals`` are open rational intervals each holding one root that has
    not been pinned down exactly; ``exact`` lists roots hit exactly.
    """

    poly: list
    intervals: list = field(default_factory=list)
    exact: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.intervals) + len(self.exact)

    def sorted(self):
        """All roots as closed ``(lo, hi)`` pairs, exact ones degenerate, in order."""
        items = list(self.intervals) + [(r, r) for r in self.exact]
        return sorted(items, key=lambda iv: (iv[0], iv[1]))

    def refine(self, width) -> "RootIntervals":
        """Bisect every open interval until narrower than ``width``."""
        width = Q(width)
        intervals = []
        exact = list(self.exact)
        for lo, hi in self.intervals:
            res = refine_interval(self.poly, lo, hi, width)
            if res[0] == res[1]:
                exact.append(res[0])
            else:
                intervals.append(res)
        self.intervals, self.exact = sorted(intervals), sorted(exact)
        return self

    def midpoints(self) -> list:
        return [(lo + hi) / 2 for lo, hi in self.sorted()]


def refine_interval(p, lo, hi, width):
    """Shrink an isolating interval of a simple root below ``width``.

    Returns ``(r, r)`` if a bisection point turns out to be the root.
    """
    slo = sign(evaluate(p, lo))
    while hi - lo >= width:
        mid = (lo + hi) / 2
        sm = sign(evaluate(p, mid))
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def isolate_real_roots(p) -> RootIntervals:
    """Isolate the distinct real roots of ``p`` by Sturm-guided bisection."""
    p = as_upoly(p)
    if not p:
        raise ValueError("zero polynomial")
    sf = squarefree(p)
    out = RootIntervals(poly=sf)
    if len(sf) <= 1:
        return out
    if len(sf) == 2:
        out.exact.append(-sf[0] / sf[1])
        return out
    chain = SturmChain.of(sf)
    b = cauchy_bound(sf)
    stack = [(-b, b, chain.count(-b, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            if evaluate(sf, hi) == 0:
                out.exact.append(hi)
                continue
            # lo may be a neighbouring root (it is excluded from (lo, hi]); move off it
            while evaluate(sf, lo) == 0:
                mid = (lo + hi) / 2
                if evaluate(sf, mid) == 0:
                    break
                if chain.count(mid, hi) == 1:
                    lo = mid
                else:
                    hi = mid
            if evaluate(sf, lo) == 0:
                out.exact.append((lo + hi) / 2)
            else:
                out.intervals.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        nl = chain.count(lo, mid)
        stack.append((mid, hi, n - nl))
        stack.append((lo, mid, nl))
    # an interval whose open part holds the root but whose lo is an exact root neighbour is fine;
    # make the open intervals strictly exclude the exact roots by construction above
    out.intervals.sort()
    out.exact.sort()
    return out


def real_rooted(p) -> bool:
    """All roots real: distinct real count of the square-free part equals its degree."""
    sf = squarefree(as_upoly(p))
    if not sf:
        raise ValueError("zero polynomial")
    return count_real_roots(sf) == len(sf) - 1


def constant_sign_on_reals(p) -> int:
    """+1 / -1 if p >= 0 / p <= 0 everywhere on R (0 counts as both), else 0.

    The zero polynomial returns 2 (both signs).
    """
    p = trim(p)
    if not p:
        return 2
    roots = isolate_real_roots(p)
    pts = []
    items = roots.sorted()
    if not items:
        pts = [_ZERO]
    else:
        edges = []
        for lo, hi in items:
            edges.append((lo, hi))
        pts.append(edges[0][0] - 1)
        for (a_lo, a_hi), (b_lo, b_hi) in zip(edges, edges[1:]):
            pts.append((a_hi + b_lo) / 2)
        pts.append(edges[-1][1] + 1)
    # refine so that sample points between intervals do not hit other roots
    signs = {sign(evaluate(p, x)) for x in pts} - {0}
    if not signs:
        return 2
    if len(signs) == 2:
        return 0
    return signs.pop()


def interlace(f, g) -> bool:
    """Strict interlacing of the roots of two real-rooted polynomials.

    Both must be real-rooted with simple roots (a repeated root cannot
    interlace strictly); degrees may differ by at most one.  A constant
    interlaces vacuously with any polynomial of degree at most one.
    Raises :class:`NotApplicable` when an input has non-real roots.
    """
    f, g = as_upoly(f), as_upoly(g)
    if not f or not g:
        raise NotApplicable("zero polynomial")
    for p in (f, g):
        if len(p) > 1 and not real_rooted(p):
            raise NotApplicable("input is not real-rooted")
    df, dg = len(f) - 1, len(g) - 1
    if min(df, dg) == 0:
        return max(df, dg) <= 1
    if abs(df - dg) > 1:
        return False
    if len(squarefree(f)) - 1 != df or len(squarefree(g)) - 1 != dg:
        return False
    if len(gcd(f, g)) > 1:
        return False
    rf, rg = isolate_real_roots(f), isolate_real_roots(g)
    items = [(iv, 0) for iv in rf.sorted()] + [(iv, 1) for iv in rg.sorted()]
    # refine until all isolating intervals are pairwise disjoint
    width = mpq(1)
    while True:
        items.sort(key=lambda t: t[0])
        if all(a[0][1] < b[0][0] for a, b in zip(items, items[1:])):
            break
        width /= 4
        rf.refine(width)
        rg.refine(width)
        items = [(iv, 0) for iv in rf.sorted()] + [(iv, 1) for iv in rg.sorted()]
    labels = [lab for _, lab in items]
    return all(a != b for a, b in zip(labels, labels[1:]))


# -- bivariate helpers (real coefficients) ------------------------------------------
#
# A bivariate real polynomial in (u, v) is handled as a dense list in v whose
# coefficients are dense lists in u.


def to_nested(p: Poly, outer: int) -> list:
    """Real bivariate Poly as ``[c_0(u), c_1(u), ...]`` in variable ``outer``."""
    if p.nvars != 2:
        raise ValueError("expected a bivariate polynomial")
    inner = 1 - outer
    d = p.degree_in(outer)
    out = [[] for _ in range(max(d, 0) + 1)]
    for e, c in p.terms.items():
        if c.im:
            raise ValueError("polynomial has non-real coefficients")
        row = out[e[outer]]
        k = e[inner]
        if len(row) <= k:
            row.extend([_ZERO] * (k + 1 - len(row)))
        row[k] += c.re
    out = [trim(r) for r in out]
    while out and not out[-1]:
        out.pop()
    return out


def from_nested(nested, outer: int) -> Poly:
    terms = {}
    for j, row in enumerate(nested):
        for k, c in enumerate(row):
            if c:
                exp = [0, 0]
                exp[outer] = j
                exp[1 - outer] = k
                terms[tuple(exp)] = c
    return Poly(2, terms)


def _det(m):
    """Exact determinant by Gaussian elimination over Q."""
    n = len(m)
    a = [list(r) for r in m]
    det = _ONE
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return _ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def sylvester_det(p, q):
    """Resultant of two univariate lists with formal degrees len-1."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    if size == 0:
        return _ONE
    rows = []
    for i in range(n):
        row = [_ZERO] * size
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [_ZERO] * size
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    return _det(rows)


def subresultant1_det(p, q):
    """Coefficients ``(s0, s1)`` of the first subresultant ``s1*x + s0``.

    Formal degrees are ``len-1`` and both must be at least 2.  Where one
    leading coefficient is nonzero and ``s1 != 0``, the gcd of ``p`` and
    ``q`` has degree at most one.
    """
    m, n = len(p) - 1, len(q) - 1
    size = m + n - 1
    rows = []
    for i in range(n - 1):
        row = [_ZERO] * size
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(m - 1):
        row = [_ZERO] * size
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    base = list(range(size - 2))
    s1 = _det([[r[c] for c in base + [size - 2]] for r in rows])
    s0 = _det([[r[c] for c in base + [size - 1]] for r in rows])
    return s0, s1


def interpolate(xs, ys):
    """Newton interpolation through the points; dense ascending result."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [coef[-1]]
    for i in range(n - 2, -1, -1):
        out = add(mul(out, [-xs[i], _ONE]), [coef[i]])
    return trim(out)


def resultant(p: Poly, q: Poly, eliminate: int) -> list:
    """Sylvester resultant of two real bivariate polynomials.

    The Sylvester matrix uses the degrees of ``p`` and ``q`` in the eliminated
    variable; the result is a dense list in the remaining variable.  With
    ``p = x1^2 + x2^2 - 1`` and ``q = x1``, eliminating x1 gives
    ``x2^2 - 1`` and eliminating x2 gives ``x1^2``.
    """
    P, R = to_nested(p, eliminate), to_nested(q, eliminate)
    if len(P) <= 1 and len(R) <= 1:
        raise ValueError("both inputs are constant in the eliminated variable")
    if not P or not R:
        return []
    m, n = len(P) - 1, len(R) - 1
    dp = max((len(c) - 1 for c in P), default=0)
    dq = max((len(c) - 1 for c in R), default=0)
    bound = n * dp + m * dq
    xs = [mpq(k) - bound // 2 for k in range(bound + 1)]
    ys = []
    for x in xs:
        pv = [evaluate(c, x) for c in P]
        qv = [evaluate(c, x) for c in R]
        ys.append(sylvester_det(pv, qv))
    return interpolate(xs, ys)


def subresultant1(p: Poly, q: Poly, eliminate: int) -> tuple[list, list]:
    """First subresultant coefficients of two bivariate polynomials, as dense lists.

    Both must have degree at least 2 in the eliminated variable.
    """
    P, R = to_nested(p, eliminate), to_nested(q, eliminate)
    if len(P) < 3 or len(R) < 3:
        raise ValueError("degree at least 2 in the eliminated variable is required")
    m, n = len(P) - 1, len(R) - 1
    dp = max(len(c) - 1 for c in P)
    dq = max(len(c) - 1 for c in R)
    bound = n * dp + m * dq
    xs = [mpq(k) - bound // 2 for k in range(bound + 1)]
    y0, y1 = [], []
    for x in xs:
        a, b = subresultant1_det([evaluate(c, x) for c in P], [evaluate(c, x) for c in R])
        y0.append(a)
        y1.append(b)
    return interpolate(xs, y0), interpolate(xs, y1)


def _content(nested):
    g = []
    for c in nested:
        g = gcd(g, c)
        if len(g) == 1:
            break
    return g


def _prim(nested):
    c = _content(nested)
    if len(c) <= 1:
        return [list(r) for r in nested], c or [_ONE]
    return [divmod_(r, c)[0] for r in nested], c


def _nested_mul_scalar(nested, u):
    return [mul(r, u) for r in nested]


def _nested_sub(a, b):
    n = max(len(a), len(b))
    out = [sub(a[i] if i < len(a) else [], b[i] if i < len(b) else []) for i in range(n)]
    while out and not out[-1]:
        out.pop()
    return out


def _pseudo_rem(a, b):
    """Pseudo-remainder of nested polys in the outer variable."""
    r = [list(x) for x in a]
    db = len(b) - 1
    lc = b[-1]
    while r and len(r) - 1 >= db:
        k = len(r) - 1 - db
        lr = r[-1]
        r = _nested_mul_scalar(r, lc)
        shifted = [[] for _ in range(k)] + _nested_mul_scalar(b, lr)
        r = _nested_sub(r, shifted)
    return r


def gcd_bivariate(p: Poly, q: Poly) -> Poly:
    """Gcd of two real bivariate polynomials, normalised to be primitive.

    Primitive polynomial remainder sequence over Q[z1][z2].
    """
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    A, B = to_nested(p, 1), to_nested(q, 1)
    A, ca = _prim(A)
    B, cb = _prim(B)
    cont = gcd(ca, cb) or [_ONE]
    if len(A) < len(B):
        A, B = B, A
    while B and len(B) > 1:
        R = _pseudo_rem(A, B)
        A = B
        if not R:
            B = []
            break
        B, _ = _prim(R)
    if B and len(B) == 1:
        g = [cont]
    else:
        g = [mul(r, cont) for r in A]
    out = from_nested(g, 1)
    # normalise: leading coefficient in grlex order becomes 1
    lead = out.sorted_terms()[0][1]
    return out / lead


def divide_bivariate(p: Poly, d: Poly) -> Poly:
    """Exact quotient ``p / d``; raises if the division is not exact."""
    A, D = to_nested(p, 1), to_nested(d, 1)
    if len(D) == 1:
        c = D[0]
        rows = []
        for r in A:
            qq, rr = divmod_(r, c)
            if rr:
                raise ArithmeticError("inexact division")
            rows.append(qq)
        return from_nested(rows, 1)
    quo = [[] for _ in range(max(len(A) - len(D) + 1, 0))]
    R = [list(r) for r in A]
    while R and len(R) >= len(D):
        k = len(R) - len(D)
        qq, rr = divmod_(R[-1], D[-1])
        if rr:
            raise ArithmeticError("inexact division")
        quo[k] = qq
        shifted = [[] for _ in range(k)] + [mul(r, qq) for r in D]
        R = _nested_sub(R, shifted)
    if R:
        raise ArithmeticError("inexact division")
    return from_nested(quo, 1)


# -- complex roots ----------------------------------------------------------------


def _aberth_batch(a, z, tol, max_iter):
    """Vectorised Aberth iteration; ``a`` is (m, d+1) ascending monic, ``z`` is (m, d)."""
    d = z.shape[1]
    rev = a[:, ::-1]
    dcoef = (a[:, 1:] * np.arange(1, d + 1))[:, ::-1]
    active = np.ones(z.shape[0], dtype=bool)
    eye = np.eye(d, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        zz = z[idx]
        pv = np.zeros_like(zz)
        for k in range(rev.shape[1]):
            pv = pv * zz + rev[idx, k][:, None]
        dv = np.zeros_like(zz)
        for k in range(dcoef.shape[1]):
            dv = dv * zz + dcoef[idx, k][:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = zz[:, :, None] - zz[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            w = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(w)
        w[bad] = 0.0
        zz = zz - w
        z[idx] = zz
        done = (np.abs(w) <= tol * (1.0 + np.abs(zz))).all(axis=1)
        active[idx[done]] = False
    return z, active


def _residual_ok(a, z, res_tol):
    # |p(z)| relative to sum |a_k||z|^k
    absz = np.abs(z)
    pv = np.zeros_like(z)
    sc = np.zeros(z.shape, dtype=float)
    for k in range(a.shape[1] - 1, -1, -1):
        pv = pv * z + a[:, k][:, None]
        sc = sc * absz + np.abs(a[:, k])[:, None]
    return np.abs(pv) <= res_tol * np.maximum(sc, 1e-300)


def complex_roots_batch(coeffs, tol=1e-14, res_tol=1e-9, seed=0, max_iter=400, restarts=4):
    """Roots of many polynomials of equal degree.

    ``coeffs`` is an (m, d+1) complex array of ascending coefficients with
    nonzero leading entries.  Returns ``(roots, ok)`` where ``ok`` flags rows
    that converged and passed the residual check.
    """
    a = np.asarray(coeffs, dtype=complex)
    if a.ndim != 2 or a.shape[1] < 2:
        raise ValueError("need degree >= 1")
    lead = a[:, -1]
    if np.any(lead == 0):
        raise ValueError("leading coefficient is zero")
    a = a / lead[:, None]
    m, d = a.shape[0], a.shape[1] - 1
    rng = np.random.default_rng(seed)
    # Fujiwara-style radius estimate per row
    ratios = np.abs(a[:, :-1]) ** (1.0 / (d - np.arange(d)))
    radius = np.maximum(ratios.max(axis=1), 1e-3)
    roots = np.zeros((m, d), dtype=complex)
    ok = np.zeros(m, dtype=bool)
    todo = np.arange(m)
    for attempt in range(restarts + 1):
        if todo.size == 0:
            break
        phase = rng.uniform(0, 2 * np.pi)
        ang = 2 * np.pi * np.arange(d) / d + phase + 0.4 / d
        z0 = (radius[todo] * (0.5 + 0.5 * attempt / max(restarts, 1)))[:, None] * np.exp(1j * ang)[None, :]
        z, _ = _aberth_batch(a[todo], z0.copy(), tol, max_iter)
        # Newton polish
        for _ in range(3):
            pv = np.zeros_like(z)
            dv = np.zeros_like(z)
            for k in range(d, -1, -1):
                dv = dv * z + pv
                pv = pv * z + a[todo, k][:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(dv != 0, pv / dv, 0)
            step[~np.isfinite(step)] = 0
            z = z - step
        good = _residual_ok(a[todo], z, res_tol).all(axis=1) & np.isfinite(z).all(axis=1)
        roots[todo] = z
        ok[todo[good]] = True
        todo = todo[~good]
    return roots, ok


def complex_roots(p, tol=1e-14, res_tol=1e-9, seed=0, max_iter=400, restarts=4):
    """All complex roots (with multiplicity) of a univariate polynomial.

    ``p`` is an ascending coefficient sequence (complex, GaussQ or rational)
    or a univariate Poly.  Raises :class:`RootFindingError` carrying the best
    approximations when the residual check fails after all restarts.
    """
    if isinstance(p, Poly):
        p = p.univariate_coeffs()
    c = [complex(v) for v in p]
    while c and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        raise ValueError("need degree >= 1")
    zeros = 0
    while c[0] == 0:
        c.pop(0)
        zeros += 1
    if len(c) == 1:
        return np.zeros(zeros, dtype=complex)
    roots, ok = complex_roots_batch([c], tol, res_tol, seed, max_iter, restarts)
    out = np.concatenate([roots[0], np.zeros(zeros, dtype=complex)])
    if not ok[0]:
        raise RootFindingError("root finder did not converge", out)
    return out
