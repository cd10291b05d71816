"""Semialgebraic regions in y-space, evaluated exactly on points and grids.

A :class:`Region` is a boolean combination of sign conditions ``P(y) op 0``
on real polynomials, together with lower-dimensional pieces of its closure
(hypersurfaces ``P = 0`` and isolated points).  The pieces matter for
rasters: a cell centre almost never lands on a line or inside a band
narrower than a cell, so a cell is also marked when such a hypersurface
crosses it or when it contains a listed point.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from improj.polycore import Poly, Q, variables

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}


@dataclass(frozen=True)
class Atom:
    poly: Poly
    op: str

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class All:
    parts: tuple = ()


@dataclass(frozen=True)
class AnyOf:
    parts: tuple = ()


TRUE = All(())
FALSE = AnyOf(())


def _eval_cond(cond, value_of):
    if isinstance(cond, Atom):
        return _OPS[cond.op](value_of(cond.poly), 0)
    if isinstance(cond, All):
        out = True
        for c in cond.parts:
            out = np.logical_and(out, _eval_cond(c, value_of))
        return out
    if isinstance(cond, AnyOf):
        out = False
        for c in cond.parts:
            out = np.logical_or(out, _eval_cond(c, value_of))
        return out
    raise TypeError(f"bad condition {cond!r}")


def _map_cond(cond, fn):
    if isinstance(cond, Atom):
        return Atom(fn(cond.poly), cond.op)
    return type(cond)(tuple(_map_cond(c, fn) for c in cond.parts))


def _describe(cond) -> str:
    from improj.parse import format_poly

    if isinstance(cond, Atom):
        return f"{format_poly(cond.poly)} {cond.op} 0"
    if isinstance(cond, All):
        return "true" if not cond.parts else " and ".join(f"({_describe(c)})" for c in cond.parts)
    return "false" if not cond.parts else " or ".join(f"({_describe(c)})" for c in cond.parts)


class GridEvaluator:
    """Exact polynomial values on a tensor grid of rational axis points."""

    def __init__(self, axes):
        self.axes = [np.array([Q(v) for v in ax], dtype=object) for ax in axes]
        self.n = len(self.axes)
        self.shape = tuple(len(a) for a in self.axes)
        self._pow = {}
        self._cache = {}

    def _axis_pow(self, j, e):
        key = (j, e)
        if key not in self._pow:
            shape = [1] * self.n
            shape[j] = self.shape[j]
            self._pow[key] = (self.axes[j] ** e).reshape(shape)
        return self._pow[key]

    def __call__(self, p: Poly):
        if p in self._cache:
            return self._cache[p]
        out = np.full(self.shape, mpq(0), dtype=object)
        for e, c in p.terms.items():
            t = c.re
            for j, k in enumerate(e):
                if k:
                    t = t * self._axis_pow(j, k)
            out = out + t
        self._cache[p] = out
        return out


@dataclass(frozen=True)
class Region:
    """``{y : cond(y)}`` plus the thin pieces the set contains."""

    nvars: int
    cond: object
    label: str = ""
    thin: tuple = ()
    points: tuple = field(default=())

    def contains(self, y) -> bool:
        y = [Q(v) for v in y]
        if len(y) != self.nvars:
            raise ValueError("dimension mismatch")
        return bool(_eval_cond(self.cond, lambda p: p.eval_real_exact(y)))

    def describe(self) -> str:
        return _describe(self.cond)

    def is_everything(self) -> bool:
        return self.cond == TRUE

    def pulled_back(self, matrix, shift=None) -> "Region":
        """Region in y-coordinates given this region in ``v = M y + s``."""
        n = self.nvars
        ys = variables(n)
        shift = [Q(v) for v in (shift or [0] * n)]
        subs = []
        for j in range(n):
            s = Poly.constant(shift[j], n)
            for k in range(n):
                if matrix[j][k]:
                    s = s + ys[k] * Q(matrix[j][k])
            subs.append(s)

        def fn(p):
            return p.compose(subs)

        from improj.polycore import mat_inverse, mat_vec

        inv = mat_inverse(matrix) if self.points else None
        pts = tuple(
            tuple(mat_vec(inv, [a - b for a, b in zip(pt, shift)])) for pt in self.points
        )
        return Region(
            n,
            _map_cond(self.cond, fn),
            self.label,
            tuple(fn(p) for p in self.thin),
            pts,
        )

    def mask_centers(self, axes) -> np.ndarray:
        ev = GridEvaluator(axes)
        out = _eval_cond(self.cond, ev)
        return np.broadcast_to(np.asarray(out, dtype=bool), ev.shape).copy()

    def mask_thin(self, corner_axes) -> np.ndarray:
        """Cells (between consecutive corner coordinates) marked by a thin piece.

        A hypersurface marks the cells whose centre it passes through and,
        for each pair of axis-neighbours whose centres it separates, the one
        with the smaller absolute value (the nearer one, to first order).  Every 4-connected (6 in 3-D) path between centres on
        opposite sides therefore meets a marked cell, while the marked set
        stays one cell thick.  Listed points mark every closed cell they lie in.
        """
        shape = tuple(len(a) - 1 for a in corner_axes)
        out = np.zeros(shape, dtype=bool)
        if self.thin:
            centres = [[(a + b) / 2 for a, b in zip(ax, ax[1:])] for ax in corner_axes]
            ev = GridEvaluator(centres)
            for p in self.thin:
                vals = np.broadcast_to(ev(p), ev.shape)
                s = (vals > 0).astype(np.int8) - (vals < 0).astype(np.int8)
                mag = np.abs(vals)
                out |= s == 0
                for ax in range(len(shape)):
                    lo = [slice(None)] * len(shape)
                    hi = [slice(None)] * len(shape)
                    lo[ax] = slice(0, -1)
                    hi[ax] = slice(1, None)
                    lo, hi = tuple(lo), tuple(hi)
                    cross = s[lo] != s[hi]
                    nearer_lo = np.asarray(mag[lo] <= mag[hi], dtype=bool)
                    out[lo] |= cross & nearer_lo
                    out[hi] |= cross & ~nearer_lo
        for pt in self.points:
            idx = []
            for j, ax in enumerate(corner_axes):
                ax = [Q(v) for v in ax]
                hit = [k for k in range(len(ax) - 1) if ax[k] <= pt[j] <= ax[k + 1]]
                idx.append(hit)
            for cell in np.ndindex(*[len(h) for h in idx]):
                out[tuple(idx[j][c] for j, c in enumerate(cell))] = True
        return out
