"""Stability certificates.

A polynomial is stable when it has no zero with every coordinate in the
open upper half-plane, equivalently ``I(f)`` misses the open positive
orthant.  Four routes are offered: Hermite-Biehler for one variable, the
Delta_jk criterion for multilinear real polynomials (after polarisation),
trial-based hyperbolicity for homogeneous ones, and a direct look at the
imaginary projection.

Sign convention.  Writing ``f = p + i q`` with real ``p, q``, ``f`` is stable
exactly when ``p`` and ``q`` interlace and ``W[q, p] = q'p - qp' <= 0`` on R
(``z + i`` gives ``W = -1``).  Literature states the Wronskian condition
with either sign; the value here was fixed against the direct root oracle
and is exposed as :data:`PROPER_POSITION_SIGN`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np
from gmpy2 import mpq

from improj import realroots as rr
from improj.oracle import (
    AffineLinear,
    BivariateBilinear,
    State,
    compile_plan,
    detect_shape,
    member_plan,
)
from improj.polycore import GaussQ, Poly, Q, polarize, variables
from improj.quadric import QuadricForm

PROPER_POSITION_SIGN = -1
ROOT_MARGIN = 1e-8


class Stab(str, Enum):
    STABLE = "Stable"
    NOT_STABLE = "NotStable"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class StabilityVerdict:
    state: Stab
    method: str
    witness: object = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"state": self.state.value, "method": self.method}
        if self.witness is not None:
            w = self.witness
            if isinstance(w, (list, tuple, np.ndarray)):
                out["witness"] = [_jsonable(v) for v in w]
            else:
                out["witness"] = _jsonable(w)
        if self.detail:
            out["detail"] = {k: _jsonable(v) for k, v in self.detail.items()}
        return out


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "numerator") and not isinstance(v, (int, bool)):
        return float(v)
    return v


# -- one variable -----------------------------------------------------------------------


def _re_im(f: Poly):
    if f.nvars != 1:
        raise ValueError("expected a univariate polynomial")
    coeffs = f.univariate_coeffs(0)
    return rr.trim(c.re for c in coeffs), rr.trim(c.im for c in coeffs)


def hermite_biehler(f: Poly) -> StabilityVerdict:
    """Exact stability test for a univariate complex polynomial."""
    if f.degree() < 1:
        raise ValueError("degree must be at least 1")
    p, q = _re_im(f)
    method = "hermite-biehler"
    # a vanishing real or imaginary part: f is a constant multiple of a real polynomial
    if not q or not p:
        real = p or q
        ok = rr.real_rooted(real)
        return StabilityVerdict(Stab.STABLE if ok else Stab.NOT_STABLE, method, detail={"reason": "real multiple"})
    g = rr.gcd(p, q)
    if len(g) > 1:
        if not rr.real_rooted(g):
            return StabilityVerdict(Stab.NOT_STABLE, method, detail={"reason": "common factor with non-real roots"})
        p, q = rr.divmod_(p, g)[0], rr.divmod_(q, g)[0]
    for part in (p, q):
        if len(part) > 1 and not rr.real_rooted(part):
            return StabilityVerdict(Stab.NOT_STABLE, method, detail={"reason": "not real-rooted"})
    try:
        inter = rr.interlace(q, p)
    except rr.NotApplicable:  # pragma: no cover - real-rootedness checked above
        return StabilityVerdict(Stab.NOT_STABLE, method, detail={"reason": "not real-rooted"})
    if not inter:
        return StabilityVerdict(Stab.NOT_STABLE, method, detail={"reason": "no interlacing"})
    w = rr.wronskian(q, p)
    s = rr.constant_sign_on_reals(w)
    ok = s == 2 or s == PROPER_POSITION_SIGN
    return StabilityVerdict(Stab.STABLE if ok else Stab.NOT_STABLE, method, detail={"wronskian_sign": s})


def direct_root_stability(f: Poly, margin: float = ROOT_MARGIN, seed: int = 0) -> StabilityVerdict:
    """Locate the roots numerically and inspect their imaginary parts."""
    if f.degree() < 1:
        raise ValueError("degree must be at least 1")
    try:
        roots = rr.complex_roots(f.univariate_coeffs(0), seed=seed)
    except rr.RootFindingError:
        return StabilityVerdict(Stab.UNKNOWN, "direct-roots", detail={"reason": "root finder failed"})
    upper = [z for z in roots if z.imag > margin]
    if upper:
        z = max(upper, key=lambda r: r.imag)
        return StabilityVerdict(Stab.NOT_STABLE, "direct-roots", witness=complex(z))
    if any(abs(z.imag) <= margin for z in roots):
        return StabilityVerdict(Stab.UNKNOWN, "direct-roots", detail={"reason": "root within margin of the real axis"})
    return StabilityVerdict(Stab.STABLE, "direct-roots")


# -- Delta_jk ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Nonnegativity:
    kind: str  # ProvedConstant, SamplingNoCounterexample, Counterexample
    value: object = None
    count: int | None = None
    point: tuple | None = None

    @property
    def nonnegative(self) -> bool | None:
        if self.kind == "ProvedConstant":
            return True
        if self.kind == "Counterexample":
            return False
        return None


@dataclass(frozen=True)
class DeltaReport:
    j: int
    k: int
    delta: Poly
    nonnegativity: Nonnegativity


def braenden_delta(f: Poly, j: int, k: int, samples: int = 100_000, radius: float = 10.0, seed: int = 0) -> DeltaReport:
    """``Delta_jk = d_j f * d_k f - d_j d_k f * f`` and its sign on R^n."""
    if not f.is_multilinear():
        raise ValueError("Delta_jk criterion needs a multilinear polynomial")
    if not f.is_real():
        raise ValueError("Delta_jk criterion needs real coefficients")
    fj, fk = f.derivative(j), f.derivative(k)
    delta = fj * fk - fj.derivative(k) * f
    n = f.nvars
    if delta.is_constant():
        c = delta.constant_coeff().re
        if c >= 0:
            return DeltaReport(j, k, delta, Nonnegativity("ProvedConstant", c))
        return DeltaReport(j, k, delta, Nonnegativity("Counterexample", c, point=tuple(mpq(0) for _ in range(n))))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-radius, radius, size=(samples, n))
    vals = delta.eval_numpy(*pts.T).real
    order = np.argsort(vals)[:16]
    for idx in order:
        if vals[idx] >= 0:
            break
        pt = tuple(Q(float(v)) for v in pts[idx])
        exact = delta.eval_real_exact(pt)
        if exact < 0:
            return DeltaReport(j, k, delta, Nonnegativity("Counterexample", exact, point=pt))
    return DeltaReport(j, k, delta, Nonnegativity("SamplingNoCounterexample", count=samples))


def multilinear_stability(f: Poly, samples: int = 100_000, seed: int = 0) -> StabilityVerdict:
    """Stability of a real polynomial through all Delta_jk of its polarisation."""
    if not f.is_real():
        raise ValueError("needs real coefficients")
    if f.is_zero():
        raise ValueError("zero polynomial")
    g = polarize(f)
    reports = [braenden_delta(g, j, k, samples=samples, seed=seed) for j, k in combinations(range(g.nvars), 2)]
    detail = {"pairs": len(reports), "polarized_nvars": g.nvars}
    for rep in reports:
        if rep.nonnegativity.kind == "Counterexample":
            return StabilityVerdict(
                Stab.NOT_STABLE, "delta-jk", witness=rep.nonnegativity.point, detail={**detail, "pair": [rep.j, rep.k]}
            )
    if all(rep.nonnegativity.kind == "ProvedConstant" for rep in reports):
        return StabilityVerdict(Stab.STABLE, "delta-jk", detail=detail)
    return StabilityVerdict(Stab.UNKNOWN, "delta-jk", detail={**detail, "samples": samples})


# -- hyperbolicity ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperbolicityVerdict:
    state: str  # Hyperbolic, NotHyperbolic, Unknown
    direction: tuple
    witness: tuple | None = None
    trials: int = 0
    seed: int = 0


def restrict_to_line(f: Poly, x, e) -> list:
    """Exact ``t -> f(x + t e)`` as a dense rational list."""
    t = Poly.var(0, 1)
    subs = [Poly.constant(Q(a), 1) + t * Q(b) for a, b in zip(x, e)]
    g = f.compose(subs)
    return rr.trim(c.re for c in g.univariate_coeffs(0)) if not g.is_zero() else []


def hyperbolicity(f: Poly, e, trials: int = 200, seed: int = 0) -> HyperbolicityVerdict:
    """Monte Carlo hyperbolicity test in direction ``e`` with exact per-line checks."""
    if not f.is_homogeneous():
        raise ValueError("hyperbolicity needs a homogeneous polynomial")
    if not f.is_real():
        raise ValueError("hyperbolicity needs real coefficients")
    e = tuple(Q(v) for v in e)
    if len(e) != f.nvars:
        raise ValueError("direction has the wrong dimension")
    if f.eval_real_exact(e) == 0:
        return HyperbolicityVerdict("NotHyperbolic", e, None, 0, seed)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        x = tuple(mpq(int(a), int(b)) for a, b in zip(rng.integers(-20, 21, f.nvars), rng.integers(1, 8, f.nvars)))
        line = restrict_to_line(f, x, e)
        if len(line) > 1 and not rr.real_rooted(line):
            return HyperbolicityVerdict("NotHyperbolic", e, x, trial + 1, seed)
    return HyperbolicityVerdict("Hyperbolic", e, None, trials, seed)


# -- orthant emptiness -----------------------------------------------------------------------


def _exists_on_positive_axis(p, op: str) -> bool:
    """Is there ``t > 0`` with ``p(t) op 0``?  ``op`` in {'>', '>=', '=='}."""
    p = rr.trim(p)
    if not p:
        return op in (">=", "==")
    has_zero = len(p) > 1 and rr.SturmChain.of(p).count(mpq(0), None) > 0
    if op == "==" or (op == ">=" and has_zero):
        return has_zero
    # one sample per sign segment of (0, inf): isolate the roots of t*p, 0 included
    items = rr.isolate_real_roots([mpq(0)] + list(p)).sorted()
    at = next(i for i, (lo, hi) in enumerate(items) if lo <= 0 <= hi)
    samples = [(a[1] + b[0]) / 2 for a, b in zip(items[at:], items[at + 1 :])]
    samples.append(items[-1][1] + 1)
    return any(rr.evaluate(p, t) > 0 for t in samples)


def _form_on_positive_quadrant(q: Poly, op: str) -> bool:
    """Decide ``exists y > 0 : q(y) op 0`` for a binary form ``q`` via ``y = (t, 1)``."""
    coeffs = [mpq(0)] * (q.degree() + 1 if not q.is_zero() else 1)
    for e, c in q.terms.items():
        coeffs[e[0]] += c.re
    return _exists_on_positive_axis(coeffs, op)


def _linear_orthant(shape: AffineLinear):
    """True when the hyperplane (or R^n) meets the open positive orthant."""
    ref = next(c for c in shape.a if c)
    ratios = [c / ref for c in shape.a]
    if any(r.im for r in ratios):
        return True
    r = [x.re for x in ratios]
    c = (shape.a0 / ref).im
    if any(v > 0 for v in r) and any(v < 0 for v in r):
        return True
    if all(v >= 0 for v in r):
        return -c > 0
    return -c < 0


def _quadric_orthant(form: QuadricForm):
    """True/False when decidable, None otherwise."""
    region = form.region()
    if region.is_everything():
        return True
    n = form.nvars
    kind, p, r = form.kind, form.p, form.r
    if kind == "III":
        return True
    # v = A y is linear, so every condition is on a form in y that scales homogeneously
    A = form.map.matrix
    ys = variables(n)
    v = [sum((ys[k] * Q(A[j][k]) for k in range(n) if A[j][k]), Poly.zero(n)) for j in range(n)]
    qw = Poly.zero(n)
    for j, w in enumerate(form.weights):
        qw = qw + v[j] * v[j] * w if j < p else qw - v[j] * v[j] * w
    if kind == "II" and r == 1 and p == 1:
        return True  # w v1^2 = 1 meets every open cone where v1 is not identically zero
    if (kind == "II" and r == 1 and p == 0) or (kind == "I" and r == 1):
        target, op = v[0], "=="
    elif kind == "I" and r == 2 and p == 1:
        target, op = qw, "=="
    elif kind == "I" and p == r - 1:
        target, op = qw, ">="
    elif kind == "II" and r == 2 and p == 2:
        target, op = qw, ">"
    elif kind == "II" and r == 2 and p == 1:
        target, op = qw, ">"
    elif kind == "II" and p == r:
        target, op = qw, ">"
    else:  # Q_w <= 1 or Q_w >= -1 hold near the origin
        return True
    if n != 2:
        return None
    if target.degree() == 1:
        a, b = target.coeff((1, 0)).re, target.coeff((0, 1)).re
        return a * b < 0
    return _form_on_positive_quadrant(target, op)


def stable_via_projection(f, radius: float = 10.0, resolution: int = 24) -> StabilityVerdict:
    """Stability as emptiness of ``I(f)`` on the open positive orthant.

    ``f`` may be a Poly or a list of factors (stable iff every factor is).
    """
    if not isinstance(f, Poly):
        verdicts = [stable_via_projection(g, radius, resolution) for g in f]
        for v in verdicts:
            if v.state is Stab.NOT_STABLE:
                return v
        if all(v.state is Stab.STABLE for v in verdicts):
            return StabilityVerdict(Stab.STABLE, "projection:product")
        return StabilityVerdict(Stab.UNKNOWN, "projection:product")
    n = f.nvars
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.is_constant():
        return StabilityVerdict(Stab.STABLE, "projection:constant")
    if n == 1:
        v = hermite_biehler(f)
        return StabilityVerdict(v.state, "projection:hermite-biehler", detail=v.detail)
    plan = compile_plan(f)
    shape = plan.shape
    decided = None
    if isinstance(shape, AffineLinear):
        decided = _linear_orthant(shape)
    elif isinstance(shape, BivariateBilinear):
        decided = shape.c > 0
    elif isinstance(shape, QuadricForm):
        decided = _quadric_orthant(shape)
    if decided is False:
        return StabilityVerdict(Stab.STABLE, f"projection:{plan.method}", detail={"orthant": "empty"})
    # search the box (0, R]^n for a point of I(f)
    k = resolution if n <= 2 else max(4, int(round(resolution ** (2 / n))))
    grid = [Q(radius) * mpq(j, k) for j in range(1, k + 1)]
    ones = tuple(mpq(1) for _ in range(n))
    candidates = [ones] + [tuple(grid[i] for i in idx) for idx in np.ndindex(*([k] * n))]
    uncertain = 0
    for y in candidates:
        v = member_plan(plan, y)
        if v.state is State.IN:
            return StabilityVerdict(Stab.NOT_STABLE, f"projection:{plan.method}", witness=tuple(y), detail={"witness_kind": "imaginary part"})
        if v.state is State.UNCERTAIN:
            uncertain += 1
    if decided is True:  # the region meets the orthant only on a thin piece the grid missed
        return StabilityVerdict(Stab.NOT_STABLE, f"projection:{plan.method}", detail={"orthant": "nonempty"})
    return StabilityVerdict(
        Stab.UNKNOWN,
        f"projection:{plan.method}",
        detail={"sampled": len(candidates), "uncertain": uncertain, "box": float(radius)},
    )
