"""Limit directions of imaginary projections.

``I_inf(f)`` collects the limit points of ``(1/r) I(f)`` on the unit sphere
as ``r`` grows.  Every zero at infinity ``(0 : p)`` of the homogenisation
contributes the great circle (or antipodal pair) cut out by
``span(Re p, Im p)``; in two variables these exhaust the limit set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from improj import realroots as rr
from improj.oracle import State, compile_plan, member_plan
from improj.polycore import GaussQ, Poly, Q

REALNESS_MARGIN = 1e-9


@dataclass(frozen=True)
class ZerosAtInfinity:
    """Zeros ``(0 : 1 : a_j)`` of the leading form, plus ``(0 : 0 : 1)`` if present."""

    a: tuple  # complex values, with multiplicity
    all_real: bool  # decided exactly
    vertical: int  # multiplicity of (0:0:1)
    near_real: tuple = ()  # non-real a_j with |Im a_j| below the margin
    simple: bool = True  # no repeated zero at infinity, decided exactly


def _angle(u, v) -> float:
    """Angle between two vectors, accurate for nearly parallel ones."""
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return math.pi / 2
    c = float(np.dot(u, v)) / nv
    return math.atan2(float(np.linalg.norm(u - c * v / nv)), c)


@dataclass(frozen=True)
class LimitPlane:
    re: tuple
    im: tuple
    dim: int
    basis: tuple  # orthonormal rows spanning the plane (or line)

    def angle_to(self, u) -> float:
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u)
        proj = sum(np.dot(u, b) * b for b in map(np.asarray, self.basis))
        return _angle(u, proj)


@dataclass(frozen=True)
class LimitSet:
    kind: str  # FiniteDirections, FullSphere, PlaneSections, CoordinateHyperplanes
    n: int
    directions: tuple = ()
    planes: tuple = ()
    certified: str = "exact"
    notes: dict = field(default_factory=dict)

    def angle_to(self, u) -> float:
        """Angular distance (radians) from the unit vector along ``u`` to the set."""
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u)
        if self.kind == "FullSphere":
            return 0.0
        if self.kind == "CoordinateHyperplanes":
            return math.asin(min(1.0, float(np.min(np.abs(u)))))
        if self.kind == "PlaneSections":
            return min(p.angle_to(u) for p in self.planes)
        return min(_angle(u, np.asarray(d, dtype=float)) for d in self.directions)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "certified": self.certified}
        if self.directions:
            out["directions"] = [list(map(float, d)) for d in self.directions]
        if self.planes:
            out["planes"] = [{"dim": p.dim, "basis": [list(map(float, b)) for b in p.basis]} for p in self.planes]
        if self.notes:
            out["notes"] = self.notes
        return out


def _unit(v) -> tuple:
    v = np.asarray(v, dtype=float)
    return tuple(float(x) for x in v / np.linalg.norm(v))


def _with_negatives(dirs) -> tuple:
    out = []
    for d in dirs:
        for s in (d, tuple(-x for x in d)):
            if not any(np.allclose(s, e, atol=1e-12) for e in out):
                out.append(tuple(0.0 if x == 0 else x for x in s))
    return tuple(sorted(out, key=lambda d: math.atan2(d[1], d[0]) % (2 * math.pi)))


# -- bivariate ----------------------------------------------------------------------------


def _leading_in_a(f: Poly):
    """Leading form at ``z1 = 1`` as a list of GaussQ in ``a``, and the (0:0:1) multiplicity."""
    d = f.degree()
    L = f.homogeneous_part(d)
    coeffs = [L.coeff((d - k, k)) for k in range(d + 1)]
    top = max(k for k, c in enumerate(coeffs) if c)
    return coeffs[: top + 1], d - top


def _real_roots_float(p) -> list:
    """Real roots of a rational polynomial to double precision, with multiplicity."""
    out = []
    rest = rr.trim(p)
    while len(rest) > 1:
        sq = rr.squarefree(rest)
        iso = rr.isolate_real_roots(sq).refine(mpq(1, 2**60))
        out.extend(float(v) for v in iso.midpoints())
        rest = rr.divmod_(rest, sq)[0]
    return sorted(out)


def zeros_at_infinity_bivariate(f: Poly) -> ZerosAtInfinity:
    if f.nvars != 2:
        raise ValueError("expects a bivariate polynomial")
    if f.degree() < 1:
        raise ValueError("constant polynomial has no zeros at infinity")
    coeffs, vertical = _leading_in_a(f)
    if len(coeffs) == 1:
        return ZerosAtInfinity((), True, vertical, simple=vertical <= 1)
    lc = coeffs[-1]
    monic = [c / lc for c in coeffs]
    real_coeffs = all(c.is_real() for c in monic)
    all_real = real_coeffs and rr.real_rooted([c.re for c in monic])
    if all_real:
        re = [c.re for c in monic]
        simple = vertical <= 1 and len(rr.squarefree(re)) == len(re)
        roots = tuple(complex(r) for r in _real_roots_float(re))
        return ZerosAtInfinity(roots, True, vertical, simple=simple)
    if len(coeffs) == 3:
        a, b, c = (complex(x) for x in reversed(coeffs))
        s = np.sqrt(complex(b * b - 4 * a * c))
        roots = ((-b + s) / (2 * a), (-b - s) / (2 * a))
    elif len(coeffs) == 2:
        roots = (complex(-coeffs[0] / coeffs[1]),)
    else:
        roots = tuple(complex(z) for z in rr.complex_roots(coeffs))
    near = tuple(z for z in roots if abs(z.imag) < REALNESS_MARGIN)
    return ZerosAtInfinity(tuple(sorted(roots, key=lambda z: (z.real, z.imag))), False, vertical, near)


def limit_set_bivariate(f: Poly) -> LimitSet:
    """Limit directions from the zeros at infinity.

    A non-real zero gives the whole circle.  Simple real zeros give exactly
    the lines through ``(1, a_j)``.  A repeated real zero still contributes its
    line, but a branch through it may have an imaginary part of lower order
    pointing elsewhere (the parabola ``z1^2 + z2`` has every direction as a
    limit), so the result is then only a certified subset.
    """
    z = zeros_at_infinity_bivariate(f)
    notes = {"zeros_at_infinity": [[w.real, w.imag] for w in z.a], "vertical": z.vertical}
    if z.near_real:
        notes["near_real_flagged"] = [[w.real, w.imag] for w in z.near_real]
    if not z.all_real:
        return LimitSet("FullSphere", 2, notes=notes)
    dirs = [_unit((1.0, w.real)) for w in z.a]
    if z.vertical:
        dirs.append((0.0, 1.0))
    if not z.simple:
        notes["repeated_zero_at_infinity"] = True
        return LimitSet("FiniteDirections", 2, _with_negatives(dirs), certified="certified subset", notes=notes)
    return LimitSet("FiniteDirections", 2, _with_negatives(dirs), notes=notes)


# -- general n ----------------------------------------------------------------------------------


def limit_plane(p) -> LimitPlane:
    """``span(Re p, Im p)`` for a zero at infinity ``(0 : p)``."""
    p = [complex(v) for v in p]
    re = np.array([v.real for v in p])
    im = np.array([v.imag for v in p])
    if not re.any() and not im.any():
        raise ValueError("zero vector")
    m = np.vstack([re, im])
    _, s, vt = np.linalg.svd(m)
    dim = int(np.sum(s > 1e-12 * s[0]))
    basis = tuple(tuple(float(x) for x in vt[k]) for k in range(dim))
    return LimitPlane(tuple(re), tuple(im), dim, basis)


def limit_set_multilinear(f: Poly) -> LimitSet:
    n = f.nvars
    if not f.is_multilinear():
        raise ValueError("polynomial is not multilinear")
    if not f.coeff((1,) * n):
        raise ValueError("the monomial z1*...*zn is absent")
    dirs = ()
    if n == 2:
        dirs = _with_negatives([(1.0, 0.0), (0.0, 1.0)])
    return LimitSet("CoordinateHyperplanes", n, dirs)


def limit_set_from_zeros(f: Poly, zeros) -> LimitSet:
    """Certified subset of ``I_inf(f)`` from caller-supplied zeros at infinity."""
    n = f.nvars
    L = f.homogeneous_part(f.degree())
    planes = []
    for p in zeros:
        if len(p) != n:
            raise ValueError("zero at infinity has the wrong dimension")
        val = L.eval([GaussQ.coerce(v) if not isinstance(v, complex) else v for v in p])
        if abs(complex(val)) > 1e-9 * max(1.0, max(abs(complex(v)) for v in p)) ** L.degree():
            raise ValueError(f"{p} is not a zero of the leading form")
        planes.append(limit_plane(p))
    return LimitSet("PlaneSections", n, planes=tuple(planes), certified="certified subset")


def limit_set(f: Poly, zeros=None) -> LimitSet:
    """Dispatch to the most specific description available."""
    if f.is_constant():
        raise ValueError("constant polynomial")
    if f.nvars == 2:
        return limit_set_bivariate(f)
    if f.is_multilinear() and f.coeff((1,) * f.nvars):
        return limit_set_multilinear(f)
    if f.nvars == 1:
        # I(f) is a finite set
        return LimitSet("FiniteDirections", 1, (), notes={"bounded": True})
    if zeros:
        return limit_set_from_zeros(f, zeros)
    raise ValueError("limit set for n >= 3 needs multilinear input or explicit zeros at infinity")


# -- empirical --------------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalLimits:
    radius: float
    bins: int
    hit: np.ndarray  # boolean per angular bin
    clusters: tuple  # (start angle, end angle, centre unit vector)

    @property
    def coverage(self) -> float:
        return float(self.hit.mean())

    @property
    def directions(self) -> list:
        return [c[2] for c in self.clusters]


def _forward_hits(f: Poly, radius: float, bins: int, samples: int, window: float, seed: int) -> np.ndarray:
    """Bins hit by imaginary parts of sampled zeros with norm near ``radius``."""
    rng = np.random.default_rng(seed)
    hit = np.zeros(bins, dtype=bool)
    for k in (0, 1):  # solve for z_{k+1} with the other coordinate sampled
        d = f.degree_in(k)
        if d == 0:
            continue
        other = 1 - k
        w = rng.uniform(-2 * radius, 2 * radius, samples) + 1j * rng.uniform(-1.2 * radius, 1.2 * radius, samples)
        cols = []
        for c in f.coeffs_in(k):
            args = [w, w]
            cols.append(c.eval_numpy(*args) * np.ones(samples))
        coeffs = np.stack(cols, axis=1)
        keep = np.abs(coeffs[:, -1]) > 1e-300
        roots, ok = rr.complex_roots_batch(coeffs[keep], seed=seed)
        wk = w[keep][ok]
        roots = roots[ok]
        ys = np.empty(roots.shape + (2,))
        ys[..., k] = roots.imag
        ys[..., other] = wk.imag[:, None]
        ys = ys.reshape(-1, 2)
        r = np.hypot(ys[:, 0], ys[:, 1])
        sel = np.abs(r - radius) <= window * radius
        ang = np.arctan2(ys[sel, 1], ys[sel, 0]) % (2 * np.pi)
        hit[(ang / (2 * np.pi) * bins).astype(int) % bins] = True
    return hit


def _clusters(hit: np.ndarray) -> tuple:
    bins = len(hit)
    width = 2 * math.pi / bins
    if hit.all():
        return ((0.0, 2 * math.pi, None),)
    if not hit.any():
        return ()
    start = int(np.argmin(hit))  # begin the scan on an empty bin so runs do not wrap
    runs, cur = [], None
    for s in range(1, bins + 1):
        j = (start + s) % bins
        if hit[j]:
            cur = [j, j] if cur is None else [cur[0], j]
        elif cur is not None:
            runs.append(cur)
            cur = None
    out = []
    for a, b in runs:
        lo = a * width
        hi = (b + 1) * width if b >= a else (b + 1 + bins) * width
        mid = (lo + hi) / 2
        out.append((lo, hi, (math.cos(mid), math.sin(mid))))
    return tuple(out)


def empirical_limit_directions(
    f: Poly, radius: float = 100.0, bins: int = 720, samples: int = 20000, window: float = 0.1, seed: int = 0
) -> EmpiricalLimits:
    """Angular bins of the circle of radius R that meet I(f).

    A bin counts as hit when the oracle puts its centre point in I(f) or when
    the imaginary part of a sampled zero lands in the annular cell around it.
    The second test catches bands far narrower than a bin.
    """
    if f.nvars != 2:
        raise ValueError("empirical limit directions support n = 2")
    if f.is_constant():
        raise ValueError("constant polynomial")
    plan = compile_plan(f)
    hit = _forward_hits(f, radius, bins, samples, window, seed)
    r = Q(radius)
    for j in range(bins):
        if hit[j]:
            continue
        t = (j + 0.5) * 2 * math.pi / bins
        y = (r * Q(round(math.cos(t), 12)), r * Q(round(math.sin(t), 12)))
        if member_plan(plan, y).state is State.IN:
            hit[j] = True
    return EmpiricalLimits(float(radius), bins, hit, _clusters(hit))
