"""Exact decision of ``y in I(f)`` for one and two variables.

The fiber over ``y`` is the real solution set of ``Re f(x+iy) = Im f(x+iy) = 0``.
For two variables the pair is reduced to a coprime pair, ``x2`` is
eliminated with a resultant, and every real root ``a`` of the resultant is
checked for a common real ``x2``.  Usually the first subresultant settles
this: when its leading coefficient is nonzero at ``a``, the gcd of the
specialised pair is linear and its root lies in ``Q(a)``, so it is real.
Otherwise the gcd is computed over ``Q(a)``.  Arithmetic in ``Q(a)`` uses a defining polynomial that is
split lazily whenever a zero test hits a proper factor.
"""
from __future__ import annotations

from gmpy2 import mpq

from improj import realroots as rr
from improj.polycore import Poly, Q, realify

_ZERO = mpq(0)
_ONE = mpq(1)


class RealAlgebraic:
    """A real root of ``m`` (square-free) isolated in the open interval (lo, hi).

    ``m`` is replaced by a factor whenever a zero test finds one containing
    the root, so elements reduced modulo the old ``m`` stay valid.
    """

    __slots__ = ("m", "lo", "hi", "value")

    def __init__(self, m, lo, hi):
        m = rr.monic(rr.trim(m))
        self.m = m
        self.lo, self.hi = lo, hi
        self.value = -m[0] if len(m) == 2 else None

    @classmethod
    def rational(cls, r) -> "RealAlgebraic":
        r = Q(r)
        return cls([-r, _ONE], r, r)

    def _set_m(self, m):
        self.m = rr.monic(m)
        if len(self.m) == 2:
            self.value = -self.m[0]
            self.lo = self.hi = self.value

    def reduce(self, c):
        c = rr.trim(c)
        if self.value is not None:
            return [rr.evaluate(c, self.value)] if c else []
        return rr.rem(c, self.m) if len(c) >= len(self.m) else c

    def sign(self, c) -> int:
        """Exact sign of ``c(alpha)``."""
        c = self.reduce(c)
        if not c:
            return 0
        if self.value is not None:
            return rr.sign(c[0])
        if len(c) == 1:
            return rr.sign(c[0])
        g = rr.gcd(c, self.m)
        if len(g) > 1:
            if rr.SturmChain.of(g).count(self.lo, self.hi) > 0:
                self._set_m(g)
                return 0
            self._set_m(rr.divmod_(self.m, g)[0])
            c = self.reduce(c)
            if not c:  # pragma: no cover - c coprime to the new m
                return 0
            if self.value is not None:
                return rr.sign(c[0])
        chain = rr.SturmChain.of(c)
        mp, cp = rr.primitive(self.m), rr.primitive(c)
        slo = rr.sign_at(mp, self.lo)
        while chain.count(self.lo, self.hi) > 0:
            mid = (self.lo + self.hi) / 2
            sm = rr.sign_at(mp, mid)
            if sm == 0:
                self._set_m([-mid, _ONE])
                return rr.sign_at(cp, mid)
            if sm == slo:
                self.lo = mid
            else:
                self.hi = mid
        return rr.sign_at(cp, self.hi)

    def is_zero(self, c) -> bool:
        return self.sign(c) == 0

    def mul(self, a, b):
        return self.reduce(rr.mul(a, b))

    def inverse(self, c):
        """Inverse of a nonzero element (call :meth:`sign` first so m is coprime)."""
        c = self.reduce(c)
        if self.value is not None:
            return [1 / c[0]]
        # extended Euclid: s*c + t*m = 1
        r0, r1 = self.m, c
        s0, s1 = [], [_ONE]
        while len(r1) > 1:
            q, r = rr.divmod_(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, rr.sub(s0, rr.mul(q, s1))
        if not r1:
            raise ZeroDivisionError("element is not invertible")
        return self.reduce(rr.scale(s1, 1 / r1[0]))

    def __float__(self):
        if self.value is not None:
            return float(self.value)
        return float((self.lo + self.hi) / 2)


# polynomials over Q(alpha): dense lists (ascending in x) of elements (dense lists in alpha)


def _trim_over(alpha, p):
    p = [alpha.reduce(c) for c in p]
    while p and alpha.is_zero(p[-1]):
        p.pop()
    return p


def _rem_over(alpha, p, q):
    """Remainder of p by q over Q(alpha); q has a nonzero leading coefficient."""
    r = list(p)
    inv = alpha.inverse(q[-1])
    dq = len(q) - 1
    while True:
        r = _trim_over(alpha, r)
        if len(r) - 1 < dq:
            return r
        k = len(r) - 1 - dq
        c = alpha.mul(r[-1], inv)
        for j in range(dq + 1):
            r[k + j] = rr.sub(r[k + j], alpha.mul(c, q[j]))
        r[-1] = []


def gcd_over(alpha, p, q):
    p, q = _trim_over(alpha, p), _trim_over(alpha, q)
    while q:
        p, q = q, _rem_over(alpha, p, q)
    return p


def has_real_root_over(alpha, p) -> bool:
    """Sturm test at +-infinity for a polynomial over Q(alpha)."""
    p = _trim_over(alpha, p)
    if not p:
        raise ValueError("zero polynomial")
    d = len(p) - 1
    if d == 0:
        return False
    if d % 2:
        return True
    dp = [rr.scale(p[i], i) for i in range(1, len(p))]
    seq = [p, _trim_over(alpha, dp)]
    while True:
        r = _rem_over(alpha, seq[-2], seq[-1])
        if not r:
            break
        seq.append([rr.scale(c, -1) for c in r])
    hi, lo = [], []
    for s in seq:
        sg = alpha.sign(s[-1])
        hi.append(sg)
        lo.append(sg if (len(s) - 1) % 2 == 0 else -sg)

    def var(signs):
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return var(lo) - var(hi) > 0


def _specialize(nested, alpha):
    """Nested coefficients in x2 over Q[x1] evaluated at x1 = alpha."""
    return [alpha.reduce(c) for c in nested]


def _roots_as_algebraic(p):
    """Distinct real roots of a univariate rational polynomial."""
    iso = rr.isolate_real_roots(p)
    out = [RealAlgebraic.rational(r) for r in iso.exact]
    out += [RealAlgebraic(iso.poly, lo, hi) for lo, hi in iso.intervals]
    return out


# -- real zeros of bivariate systems ---------------------------------------------------


def _univariate_in(p: Poly, k: int):
    """Dense rational list if p only involves variable k, else None."""
    if any(e[1 - k] for e in p.terms):
        return None
    return rr.trim(p.coeff((j, 0) if k == 0 else (0, j)).re for j in range(p.degree_in(k) + 1))


def real_zero_exists(G: Poly) -> bool:
    """Does the real bivariate polynomial G vanish somewhere on R^2?"""
    if G.is_zero():
        return True
    if G.is_constant():
        return False
    u = _univariate_in(G, 0)
    if u is not None:
        return rr.has_real_root(u)
    u = _univariate_in(G, 1)
    if u is not None:
        return rr.has_real_root(u)
    nested = rr.to_nested(G, 1)
    cont = rr._content(nested)
    if len(cont) > 1 and rr.has_real_root(cont):
        return True
    P = rr.from_nested(rr._prim(nested)[0], 1)
    dP = P.derivative(1)
    g = rr.gcd_bivariate(P, dP)
    if not g.is_constant():
        P = rr.divide_bivariate(P, g)
    Pn = rr.to_nested(P, 1)
    if len(Pn) == 1:
        return False  # the primitive part is constant in x2
    disc = rr.resultant(P, P.derivative(1), 1)
    crit = rr.mul(disc, Pn[-1])
    crit_roots = rr.isolate_real_roots(crit) if crit else None
    # sample between critical abscissae
    samples = []
    if crit_roots is None or crit_roots.count == 0:
        samples = [_ZERO]
    else:
        items = crit_roots.sorted()
        samples.append(items[0][0] - 1)
        for (alo, ahi), (blo, bhi) in zip(items, items[1:]):
            samples.append((ahi + blo) / 2)
        samples.append(items[-1][1] + 1)
    for t in samples:
        row = rr.trim(rr.evaluate(c, t) for c in Pn)
        if row and rr.has_real_root(row):
            return True
    if crit_roots is not None:
        for alpha in _roots_as_algebraic(crit):
            row = _specialize(Pn, alpha)
            row = _trim_over(alpha, row)
            if row and has_real_root_over(alpha, row):
                return True
    return False


def common_real_zero(p: Poly, q: Poly) -> bool:
    """Do two real bivariate polynomials share a real zero?"""
    if p.is_zero():
        return real_zero_exists(q)
    if q.is_zero():
        return real_zero_exists(p)
    if p.is_constant() or q.is_constant():
        return False
    g = rr.gcd_bivariate(p, q)
    if not g.is_constant():
        if real_zero_exists(g):
            return True
        p = rr.divide_bivariate(p, g)
        q = rr.divide_bivariate(q, g)
        if p.is_constant() or q.is_constant():
            return False
    # both free of x2: common root of the x1-polynomials means a whole vertical line
    up, uq = _univariate_in(p, 0), _univariate_in(q, 0)
    if up is not None and uq is not None:
        return rr.has_real_root(rr.gcd(up, uq))
    elim = 1
    if p.degree_in(1) == 0 and q.degree_in(1) == 0:  # pragma: no cover - handled above
        elim = 0
    R = rr.resultant(p, q, elim)
    if not R:
        raise rr.SharedComponent(rr.gcd_bivariate(p, q))
    if len(R) == 1:
        return False
    Pn, Qn = rr.to_nested(p, elim), rr.to_nested(q, elim)
    # a linear gcd over Q(alpha) has its root in Q(alpha), hence real
    if len(Pn) == 2:
        s1 = Pn[1]
    elif len(Qn) == 2:
        s1 = Qn[1]
    elif len(Pn) > 2 and len(Qn) > 2:
        s1 = rr.subresultant1(p, q, elim)[1]
    else:
        s1 = []
    for alpha in _roots_as_algebraic(R):
        if alpha.sign(s1) and (alpha.sign(Pn[-1]) or alpha.sign(Qn[-1])):
            return True
        a = _specialize(Pn, alpha)
        b = _specialize(Qn, alpha)
        g = gcd_over(alpha, a, b)
        if len(g) > 1 and has_real_root_over(alpha, g):
            return True
    return False


def fiber_pair(f: Poly, y) -> tuple[Poly, Poly]:
    """``Re f(x+iy)``, ``Im f(x+iy)`` as real polynomials in x."""
    pair = realify(f).specialize_y([Q(v) for v in y])
    return pair.re, pair.im


def fiber_nonempty(f: Poly, y) -> bool:
    """Exact ``y in I(f)`` for ``f`` in one or two variables."""
    n = f.nvars
    if n not in (1, 2):
        raise ValueError("exact fiber decision supports n <= 2 only")
    if f.is_zero():
        raise ValueError("zero polynomial")
    if len(y) != n:
        raise ValueError(f"dimension mismatch: point has {len(y)} entries, expected {n}")
    re, im = fiber_pair(f, y)
    if n == 1:
        a = rr.as_upoly([re.coeff((j,)).re for j in range(max(re.degree(), 0) + 1)]) if not re.is_zero() else []
        b = rr.as_upoly([im.coeff((j,)).re for j in range(max(im.degree(), 0) + 1)]) if not im.is_zero() else []
        g = rr.gcd(a, b)
        if not g:
            return True
        return rr.has_real_root(g)
    return common_real_zero(re, im)
