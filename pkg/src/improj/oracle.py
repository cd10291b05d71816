"""Membership ``y in I(f)``: closed forms, exact elimination, numeric fallback.

:func:`member` dispatches in this order: explicit factor lists (union of
the factors' projections), constants, affine-linear polynomials, bivariate
bilinear polynomials, real quadrics, split-linear bivariates
(``f = g + z_k h``), the exact fiber oracle for ``n <= 2`` and finally a
seeded numeric search that can prove ``In`` but never ``Out``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from improj import realroots as rr
from improj.fiber import fiber_nonempty
from improj.polycore import GaussQ, Poly, Q, realify, variables
from improj.quadric import QuadricForm, classify_quadric
from improj.regions import TRUE, All, AnyOf, Atom, Region

_ZERO = mpq(0)


class State(str, Enum):
    IN = "In"
    OUT = "Out"
    UNCERTAIN = "Uncertain"


@dataclass(frozen=True)
class MembershipVerdict:
    state: State
    method: str
    witness: tuple | None = None
    residual: float | None = None

    def __bool__(self):
        raise TypeError("use verdict.state; a verdict may be Uncertain")

    @property
    def is_in(self) -> bool:
        return self.state is State.IN

    def to_json(self) -> dict:
        out = {"state": self.state.value, "method": self.method}
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        if self.residual is not None:
            out["residual"] = float(self.residual)
        return out


def _verdict(flag: bool, method: str) -> MembershipVerdict:
    return MembershipVerdict(State.IN if flag else State.OUT, method)


# -- special shapes ----------------------------------------------------------------


@dataclass(frozen=True)
class AffineLinear:
    a0: GaussQ
    a: tuple

    def poly(self) -> Poly:
        n = len(self.a)
        out = Poly.constant(self.a0, n)
        for j, c in enumerate(self.a):
            out = out + Poly.var(j, n) * c
        return out


@dataclass(frozen=True)
class BivariateBilinear:
    """``alpha z1 z2 + beta z1 + gamma z2 + delta`` with real coefficients."""

    alpha: mpq
    beta: mpq
    gamma: mpq
    delta: mpq

    def poly(self) -> Poly:
        return Poly(2, {(1, 1): self.alpha, (1, 0): self.beta, (0, 1): self.gamma, (0, 0): self.delta})

    @property
    def c(self) -> mpq:
        """``delta - beta*gamma`` after normalising alpha to 1."""
        return self.delta / self.alpha - (self.beta / self.alpha) * (self.gamma / self.alpha)


@dataclass(frozen=True)
class SplitLinearForm:
    """``f = g + z_k h`` with g, h free of ``z_k``."""

    g: Poly
    h: Poly
    var: int

    def poly(self) -> Poly:
        return self.g + Poly.var(self.var, self.g.nvars) * self.h


@dataclass(frozen=True)
class Generic:
    f: Poly


def detect_shape(f: Poly):
    """Most specific structural description of ``f``."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = f.nvars
    if f.degree() == 1:
        return AffineLinear(f.constant_coeff(), tuple(f.coeff(tuple(int(j == k) for j in range(n))) for k in range(n)))
    if (
        n == 2
        and f.is_real()
        and f.degree() == 2
        and f.is_multilinear()
        and f.coeff((1, 1))
    ):
        return BivariateBilinear(f.coeff((1, 1)).re, f.coeff((1, 0)).re, f.coeff((0, 1)).re, f.coeff((0, 0)).re)
    if n >= 2:
        for k in reversed(range(n)):
            if f.degree_in(k) == 1:
                cs = f.coeffs_in(k)
                return SplitLinearForm(cs[0], cs[1], k)
    return Generic(f)


# -- closed forms -----------------------------------------------------------------------


def linear_region(shape: AffineLinear) -> Region:
    """Hyperplane when the coefficient vector is a complex multiple of a real one, else R^n."""
    a = shape.a
    n = len(a)
    ref = next((c for c in a if c), None)
    if ref is None:
        raise ValueError("all linear coefficients vanish")
    ratios = [c / ref for c in a]
    if any(r.im for r in ratios):
        return Region(n, TRUE, "linear: all of R^n")
    ys = variables(n)
    plane = Poly.constant((shape.a0 / ref).im, n)
    for j, r in enumerate(ratios):
        if r.re:
            plane = plane + ys[j] * r.re
    return Region(n, Atom(plane, "=="), "linear: hyperplane", thin=(plane,))


def member_linear(shape: AffineLinear, y) -> MembershipVerdict:
    return _verdict(linear_region(shape).contains(y), "linear")


def bilinear_region(shape: BivariateBilinear) -> Region:
    """``0 < y1 y2 / c <= 1`` or ``y = 0`` with ``c = delta - beta*gamma``; the axes when c = 0."""
    y1, y2 = variables(2)
    c = shape.c
    prod = y1 * y2
    if not c:
        return Region(2, Atom(prod, "=="), "bilinear: axes", thin=(prod,))
    ratio = prod / c
    band = All((Atom(ratio, ">"), Atom(ratio - 1, "<=")))
    origin = All((Atom(y1, "=="), Atom(y2, "==")))
    # band edges lie in the closure, marking them keeps thin far-out stretches visible in rasters
    return Region(2, AnyOf((band, origin)), "bilinear: hyperbola band", thin=(prod, prod - c), points=((_ZERO, _ZERO),))


def member_bilinear(shape: BivariateBilinear, y) -> MembershipVerdict:
    return _verdict(bilinear_region(shape).contains(y), "bilinear")


def member_quadric(form: QuadricForm, y) -> MembershipVerdict:
    v = [sum((Q(a) * Q(b) for a, b in zip(row, y)), _ZERO) for row in form.map.matrix]
    v = [vj + bj for vj, bj in zip(v, form.map.imag_shift)]
    return _verdict(form.region_normal().contains(v), f"quadric{form.family}")


# -- split-linear forms ----------------------------------------------------------------


def det_condition_poly(g: Poly, h: Poly, v=None) -> Poly:
    """``Im(conj(g) h) - v |h|^2`` in the real variables of g and h.

    The result lives in ``(x_1..x_n, y_1..y_n)``; with ``v=None`` a further
    variable standing for ``v`` is appended.  This is the 2x2 determinant
    ``(Re g - v Im h) Im h - Re h (Im g + v Re h)``.
    """
    if h.is_zero():
        raise ValueError("h must be nonzero")
    if g.nvars != h.nvars:
        raise ValueError("g and h live in different rings")
    rg, rh = realify(g), realify(h)
    A = rg.re * rh.im - rg.im * rh.re
    B = rh.re * rh.re + rh.im * rh.im
    if v is None:
        m = A.nvars + 1
        A = A.extend(m)
        B = B.extend(m)
        return A - B * Poly.var(m - 1, m)
    return A - B * Q(v)


@dataclass
class _Column:
    A: list
    B: list
    Hs: list
    common: bool


def _as_list(p: Poly) -> list:
    if p.is_zero():
        return []
    return rr.trim(p.coeff((j,)).re for j in range(p.degree() + 1))


@lru_cache(maxsize=4096)
def _split_column(g: Poly, h: Poly, other: int, yo) -> _Column:
    g1, h1 = g.drop_vars([other]), h.drop_vars([other])
    rg = realify(g1).specialize_y([yo])
    rh = realify(h1).specialize_y([yo])
    Rg, Ig, Rh, Ih = (_as_list(p) for p in (rg.re, rg.im, rh.re, rh.im))
    A = rr.sub(rr.mul(Rg, Ih), rr.mul(Ig, Rh))
    B = rr.add(rr.mul(Rh, Rh), rr.mul(Ih, Ih))
    H = rr.gcd(Rh, Ih)
    Hs = rr.squarefree(H) if len(H) > 1 else []
    common = False
    if Hs:
        G = rr.gcd(rr.gcd(H, Rg), Ig) if (Rg or Ig) else H
        common = len(G) > 1 and rr.has_real_root(G)
    return _Column(A, B, Hs, common)


def split_decide(shape: SplitLinearForm, y) -> bool:
    """Exact decision for bivariate ``g + z_k h``.

    ``z_k = -g/h`` must have imaginary part ``v = y_k``, i.e. a real root of
    ``Im(conj(g) h) - v |h|^2`` where ``h != 0``; where ``h = 0`` the fiber is
    nonempty iff ``g`` vanishes too.
    """
    k = shape.var
    o = 1 - k
    col = _split_column(shape.g, shape.h, o, Q(y[o]))
    v = Q(y[k])
    D = rr.sub(col.A, rr.scale(col.B, v)) if v else list(col.A)
    if not D:
        return True
    if col.Hs:
        while True:
            gg = rr.gcd(D, col.Hs)
            if len(gg) <= 1:
                break
            D = rr.divmod_(D, gg)[0]
    if len(D) > 1 and rr.has_real_root(D):
        return True
    return col.common


# -- exact and numeric fibers --------------------------------------------------------------


def member_fiber_exact(f: Poly, y) -> MembershipVerdict:
    """Exact decision for n <= 2 by elimination."""
    return _verdict(fiber_nonempty(f, [Q(v) for v in y]), "fiber-exact")


def _seed_for(f: Poly, y) -> int:
    from improj.parse import format_poly

    key = format_poly(f) + "|" + ",".join(str(Q(v)) for v in y)
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def _magnitude(f: Poly, z) -> float:
    total = 0.0
    az = np.abs(z)
    for e, c in f.terms.items():
        total += abs(complex(c)) * float(np.prod(az ** np.array(e)))
    return total


def member_fiber_numeric(f: Poly, y, starts: int = 24, tol: float = 1e-10, max_nfev: int = 400) -> MembershipVerdict:
    """Multistart least squares on ``|f(x + iy)|^2``; proves In or says Uncertain."""
    from scipy.optimize import least_squares

    n = f.nvars
    yq = [Q(v) for v in y]
    if f.eval([GaussQ(0, v) for v in yq]) == 0:
        return MembershipVerdict(State.IN, "numeric", tuple(0.0 for _ in range(n)), 0.0)
    yf = np.array([float(v) for v in yq])
    grads = [f.derivative(j) for j in range(n)]

    def fun(x):
        val = f.eval_numpy(*(x + 1j * yf))
        return np.array([val.real, val.imag])

    def jac(x):
        z = x + 1j * yf
        cols = [g.eval_numpy(*z) for g in grads]
        return np.array([[c.real for c in cols], [c.imag for c in cols]])

    rng = np.random.default_rng(_seed_for(f, yq))
    spread = 1.0 + float(np.linalg.norm(yf))
    best = (np.inf, None)
    for s in range(starts):
        x0 = np.zeros(n) if s == 0 else rng.normal(scale=spread * (1 + s / 4), size=n)
        try:
            sol = least_squares(fun, x0, jac=jac, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        except (ValueError, FloatingPointError):  # pragma: no cover - defensive
            continue
        z = sol.x + 1j * yf
        res = float(np.hypot(*fun(sol.x)))
        scale = max(_magnitude(f, z), 1.0)
        if res <= tol * scale:
            return MembershipVerdict(State.IN, "numeric", tuple(float(v) for v in sol.x), res)
        if res < best[0]:
            best = (res, sol.x)
    return MembershipVerdict(State.UNCERTAIN, "numeric", None, best[0] if np.isfinite(best[0]) else None)


# -- dispatch ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Plan:
    """How membership is decided for one polynomial."""

    kind: str  # constant, region, split, fiber, numeric
    method: str
    region: Region | None = None
    shape: object = None
    f: Poly | None = None


@lru_cache(maxsize=256)
def compile_plan(f: Poly) -> Plan:
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = f.nvars
    if f.is_constant():
        return Plan("constant", "constant", Region(n, AnyOf(()), "empty"), f=f)
    shape = detect_shape(f)
    if isinstance(shape, AffineLinear):
        return Plan("region", "linear", linear_region(shape), shape, f)
    if isinstance(shape, BivariateBilinear):
        return Plan("region", "bilinear", bilinear_region(shape), shape, f)
    if f.is_real() and f.degree() == 2:
        form = classify_quadric(f)
        return Plan("region", f"quadric{form.family}", form.region(), form, f)
    if n == 2 and isinstance(shape, SplitLinearForm):
        return Plan("split", "split-linear", None, shape, f)
    if n <= 2:
        return Plan("fiber", "fiber-exact", None, shape, f)
    return Plan("numeric", "numeric", None, shape, f)


def member_plan(plan: Plan, y, numeric_starts: int = 24) -> MembershipVerdict:
    if plan.kind in ("constant", "region"):
        return _verdict(plan.region.contains(y), plan.method)
    if plan.kind == "split":
        return _verdict(split_decide(plan.shape, y), plan.method)
    if plan.kind == "fiber":
        return member_fiber_exact(plan.f, y)
    return member_fiber_numeric(plan.f, y, starts=numeric_starts)


def member(f, y, numeric_starts: int = 24) -> MembershipVerdict:
    """Decide ``y in I(f)``.

    ``f`` may be a :class:`Poly` or a sequence of factors; for factors the
    answer is the union over the factors' projections.
    """
    if isinstance(f, Poly):
        if len(y) != f.nvars:
            raise ValueError(f"dimension mismatch: point has {len(y)} entries, expected {f.nvars}")
        return member_plan(compile_plan(f), y, numeric_starts)
    factors = list(f)
    if not factors:
        raise ValueError("empty factor list")
    verdicts = [member(g, y, numeric_starts) for g in factors]
    for j, v in enumerate(verdicts):
        if v.state is State.IN:
            return MembershipVerdict(State.IN, f"product[{j}]:{v.method}", v.witness, v.residual)
    if all(v.state is State.OUT for v in verdicts):
        return MembershipVerdict(State.OUT, "product:" + ",".join(v.method for v in verdicts))
    return MembershipVerdict(State.UNCERTAIN, "product:" + ",".join(v.method for v in verdicts))


def closed_form_region(f: Poly) -> Region | None:
    """Region for f when one of the closed forms applies."""
    plan = compile_plan(f)
    return plan.region


__all__ = [
    "State",
    "MembershipVerdict",
    "AffineLinear",
    "BivariateBilinear",
    "SplitLinearForm",
    "Generic",
    "detect_shape",
    "linear_region",
    "member_linear",
    "bilinear_region",
    "member_bilinear",
    "classify_quadric",
    "member_quadric",
    "det_condition_poly",
    "split_decide",
    "member_fiber_exact",
    "member_fiber_numeric",
    "Plan",
    "compile_plan",
    "member_plan",
    "member",
    "closed_form_region",
]
