"""Affine normal forms of real quadrics and their imaginary projections.

Classification works over Q: the quadratic part is diagonalised by a
congruence (symmetric Gaussian elimination), squares are completed and the
leftover linear form becomes a new coordinate.  Square roots are never
taken, so the normal form keeps positive rational weights::

    (I)   sum_{j<p} w_j v_j^2 - sum_{p<=j<r} w_j v_j^2
    (II)  ...                                            + 1
    (III) ...                                            + v_r

Scaling ``v_j`` by ``sqrt(w_j)`` turns these into the unit forms, which
only rescales squared imaginary parts, so every region below is stated in
terms of ``Q_w(v) = sum_{j<p} w_j v_j^2 - sum_{p<=j<r} w_j v_j^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from improj.polycore import AffineMap, Poly, Q, mat_inverse, pullback, variables
from improj.regions import FALSE, TRUE, All, AnyOf, Atom, Region

_ZERO = mpq(0)
_ONE = mpq(1)

# (kind, r, p) -> bivariate family label
_FAMILY2 = {
    ("II", 2, 0): "(i)",
    ("II", 2, 1): "(ii)",
    ("III", 1, 1): "(iii)",
    ("II", 2, 2): "(iv)",
    ("I", 2, 1): "(v)",
    ("II", 1, 0): "(vi)",
    ("I", 1, 1): "(vi)",
    ("I", 2, 2): "(vii)",
    ("II", 1, 1): "(viii)",
}


@dataclass(frozen=True)
class QuadricForm:
    """``f = scale * pullback(normal_form(), map)``."""

    family: str
    kind: str
    signature: tuple
    weights: tuple
    map: AffineMap
    scale: mpq
    nvars: int

    @property
    def p(self) -> int:
        return self.signature[0]

    @property
    def r(self) -> int:
        return self.signature[1]

    def normal_form(self) -> Poly:
        n = self.nvars
        v = variables(n)
        out = Poly.zero(n)
        for j, w in enumerate(self.weights):
            term = v[j] * v[j] * w
            out = out + term if j < self.p else out - term
        if self.kind == "II":
            out = out + 1
        elif self.kind == "III":
            out = out + v[self.r]
        return out

    def region_normal(self) -> Region:
        return quadric_region(self.kind, self.p, self.r, self.weights, self.nvars)

    def region(self) -> Region:
        """The imaginary projection in the original coordinates."""
        return self.region_normal().pulled_back(self.map.matrix)


def _sym_matrix(f: Poly):
    n = f.nvars
    M = [[_ZERO] * n for _ in range(n)]
    b = [_ZERO] * n
    c = _ZERO
    for e, coef in f.terms.items():
        v = coef.re
        d = sum(e)
        idx = [j for j, k in enumerate(e) for _ in range(k)]
        if d == 2:
            i, j = idx
            if i == j:
                M[i][i] += v
            else:
                M[i][j] += v / 2
                M[j][i] += v / 2
        elif d == 1:
            b[idx[0]] += v
        else:
            c += v
    return M, b, c


def congruence_diagonalize(M):
    """Rational ``P`` and diagonal ``d`` with ``P^T M P = diag(d)``."""
    n = len(M)
    S = [list(map(Q, row)) for row in M]
    P = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]

    def add_col(dst, src, fac):
        # basis vector dst += fac * src (columns of P), congruence on S
        for i in range(n):
            P[i][dst] += fac * P[i][src]
        for i in range(n):
            S[i][dst] += fac * S[i][src]
        for j in range(n):
            S[dst][j] += fac * S[src][j]

    def swap(a, b):
        for row in P:
            row[a], row[b] = row[b], row[a]
        for row in S:
            row[a], row[b] = row[b], row[a]
        S[a], S[b] = S[b], S[a]

    for k in range(n):
        if not S[k][k]:
            j = next((j for j in range(k + 1, n) if S[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if S[k][j]), None)
                if j is None:
                    continue
                add_col(k, j, _ONE)
        piv = S[k][k]
        for j in range(k + 1, n):
            if S[k][j]:
                add_col(j, k, -S[k][j] / piv)
    return P, [S[i][i] for i in range(n)]


def classify_quadric(f: Poly) -> QuadricForm:
    """Normal form, family and signature of a real quadric."""
    if not f.is_real():
        raise ValueError("quadric classification needs real coefficients")
    if f.degree() != 2:
        raise ValueError("polynomial is not of degree 2")
    n = f.nvars
    M, b, c = _sym_matrix(f)
    P, d = congruence_diagonalize(M)
    Pinv = mat_inverse(P)
    # z = P u, so the linear part in u is P^T b
    beta = [sum((P[i][j] * b[i] for i in range(n)), _ZERO) for j in range(n)]
    nonzero = [j for j in range(n) if d[j]]
    kernel = [j for j in range(n) if not d[j]]
    const = c - sum((beta[j] * beta[j] / (4 * d[j]) for j in nonzero), _ZERO)
    # rows of T and tau with w = T z + tau
    T = [list(Pinv[j]) for j in range(n)]
    tau = [beta[j] / (2 * d[j]) if d[j] else _ZERO for j in range(n)]
    lin = [j for j in kernel if beta[j]]
    coeffs = {j: d[j] for j in nonzero}
    linear_var = None
    if lin:
        kind = "III"
        k0 = lin[0]
        T[k0] = [sum((beta[j] * Pinv[j][i] for j in kernel), _ZERO) for i in range(n)]
        tau[k0] = const
        linear_var = k0
        scale = _ONE
    elif const:
        kind = "II"
        scale = const
        coeffs = {j: v / const for j, v in coeffs.items()}
    else:
        kind = "I"
        scale = _ONE
    r = len(nonzero)
    pos = [j for j in nonzero if coeffs[j] > 0]
    if kind in ("I", "III") and 2 * len(pos) < r:
        scale = -scale
        coeffs = {j: -v for j, v in coeffs.items()}
        if linear_var is not None:
            T[linear_var] = [-v for v in T[linear_var]]
            tau[linear_var] = -tau[linear_var]
        pos = [j for j in nonzero if coeffs[j] > 0]
    neg = [j for j in nonzero if coeffs[j] < 0]
    order = pos + neg
    if linear_var is not None:
        order.append(linear_var)
    order += [j for j in range(n) if j not in order]
    A = [T[j] for j in order]
    a = [tau[j] for j in order]
    weights = tuple(abs(coeffs[j]) for j in pos + neg)
    p = len(pos)
    family = _FAMILY2.get((kind, r, p)) if n == 2 else f"({kind})"
    if family is None:  # pragma: no cover - every bivariate case is listed
        raise AssertionError(f"unclassified quadric {(kind, r, p)}")
    form = QuadricForm(family, kind, (p, r), weights, AffineMap(A, a), scale, n)
    if pullback(form.normal_form(), form.map) * scale != f:  # pragma: no cover
        raise AssertionError("normal form does not reproduce the input")
    return form


def _qw(weights, p, n) -> Poly:
    v = variables(n)
    out = Poly.zero(n)
    for j, w in enumerate(weights):
        t = v[j] * v[j] * w
        out = out + t if j < p else out - t
    return out


def quadric_region(kind, p, r, weights, n) -> Region:
    """I(normal form) in normal coordinates.

    Follows the bivariate list (i)-(viii) for ``r <= 2`` (extended
    cylindrically when n > 2) and the classes (I)-(III) for ``r >= 3``.
    """
    v = variables(n)
    qw = _qw(weights, p, n)
    one = Poly.constant(1, n)
    origin = tuple(mpq(0) for _ in range(n))
    label = f"{kind} p={p} r={r}"
    if kind == "III":
        cond = AnyOf(tuple(Atom(v[j], "!=") for j in range(r)) + (Atom(v[r], "=="),))
        return Region(n, cond, label)
    if kind == "I":
        if r == 1:
            return Region(n, Atom(v[0], "=="), label, thin=(v[0],))
        if r == 2:
            if p == 2:
                return Region(n, TRUE, label)
            return Region(n, Atom(qw, "=="), label, thin=(qw,))
        if p == r - 1:
            return Region(n, Atom(qw, ">="), label)
        return Region(n, TRUE, label)
    # kind II
    if r == 1:
        if p == 1:
            return Region(n, Atom(qw - one, "=="), label, thin=(qw - one,))
        return Region(n, Atom(v[0], "=="), label, thin=(v[0],))
    if r == 2:
        if p == 2:
            return Region(n, Atom(qw - one, ">="), label)
        if p == 1:
            band = All((Atom(qw, ">"), Atom(qw - one, "<=")))
            zero = All((Atom(v[0], "=="), Atom(v[1], "==")))
            return Region(n, AnyOf((band, zero)), label, thin=(qw, qw - one), points=(origin,) if n == 2 else ())
        return Region(n, TRUE, label)
    if p == 0:
        return Region(n, TRUE, label)
    if p == 1:
        return Region(n, Atom(qw - one, "<="), label)
    if p == r - 1:
        return Region(n, Atom(qw + one, ">="), label)
    if p == r:
        return Region(n, Atom(qw - one, ">="), label)
    return Region(n, TRUE, label)


__all__ = ["QuadricForm", "classify_quadric", "congruence_diagonalize", "quadric_region", "FALSE"]
