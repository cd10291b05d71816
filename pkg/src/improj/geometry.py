"""Rasters of imaginary projections, amoebas and coamoebas; complement components.

Cells are indexed ``[i1, i2(, i3)]`` with axis ``j`` running over ``y_{j+1}``.
Closed-form regions are evaluated exactly at the cell centres and
hypersurfaces of their closure mark a one-cell-thick trace.  Everything
else is decided per cell centre by the membership oracle, in parallel over
chunks of the first axis.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np
from gmpy2 import mpq
from scipy import ndimage

from improj import realroots as rr
from improj.oracle import State, compile_plan, member_plan
from improj.parse import format_poly
from improj.polycore import Poly, Q

IN, OUT, UNCERTAIN = 0, 255, 128
_CODE = {State.IN: IN, State.OUT: OUT, State.UNCERTAIN: UNCERTAIN}


@dataclass
class Raster:
    box: tuple  # ((lo, hi), ...) as mpq
    res: tuple  # cells per axis
    cells: np.ndarray  # uint8 codes IN / OUT / UNCERTAIN
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.res)

    @property
    def cell_size(self) -> tuple:
        return tuple(float((hi - lo) / k) for (lo, hi), k in zip(self.box, self.res))

    def counts(self) -> dict:
        return {
            "in": int(np.sum(self.cells == IN)),
            "out": int(np.sum(self.cells == OUT)),
            "uncertain": int(np.sum(self.cells == UNCERTAIN)),
        }

    def digest(self) -> str:
        return hashlib.sha256(self.cells.tobytes()).hexdigest()


def parse_box(box, n: int | None = None) -> tuple:
    """``"-4:4,-4:4"`` or a sequence of pairs to a tuple of rational pairs."""
    if isinstance(box, str):
        pairs = [part.split(":") for part in box.split(",")]
    else:
        pairs = list(box)
    out = []
    for pair in pairs:
        if len(pair) != 2:
            raise ValueError(f"bad box interval {pair!r}")
        lo, hi = Q(pair[0]), Q(pair[1])
        if not lo < hi:
            raise ValueError("degenerate box")
        out.append((lo, hi))
    if n is not None:
        if len(out) == 1:
            out = out * n
        if len(out) != n:
            raise ValueError(f"box has {len(out)} intervals, expected {n}")
    return tuple(out)


def _res_tuple(res, n: int) -> tuple:
    res = (res,) * n if isinstance(res, int) else tuple(res)
    if len(res) != n or any(int(k) < 1 for k in res):
        raise ValueError("resolution must be a positive integer per axis")
    return tuple(int(k) for k in res)


def centre_axes(box, res) -> list:
    return [[lo + (hi - lo) * mpq(2 * j + 1, 2 * k) for j in range(k)] for (lo, hi), k in zip(box, res)]


def corner_axes(box, res) -> list:
    return [[lo + (hi - lo) * mpq(j, k) for j in range(k + 1)] for (lo, hi), k in zip(box, res)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("IMPROJ_WORKERS", "1")))
    except ValueError:
        return 1


def _eval_rows(args):
    f, axes, rows, numeric_starts = args
    plan = compile_plan(f)
    rest = [len(a) for a in axes[1:]]
    out = np.empty((len(rows), *rest), dtype=np.uint8)
    methods = set()
    for r, i in enumerate(rows):
        for idx in np.ndindex(*rest):
            y = (axes[0][i],) + tuple(axes[j + 1][k] for j, k in enumerate(idx))
            v = member_plan(plan, y, numeric_starts)
            out[(r, *idx)] = _CODE[v.state]
            methods.add(v.method)
    return out, methods


def _pointwise(f: Poly, axes, workers: int, numeric_starts: int):
    k0 = len(axes[0])
    if workers <= 1 or k0 < 2:
        return _eval_rows((f, axes, list(range(k0)), numeric_starts))
    # chunks are fixed by the grid, so results do not depend on the worker count
    chunk = max(1, k0 // (8 * workers))
    jobs = [(f, axes, list(range(s, min(s + chunk, k0))), numeric_starts) for s in range(0, k0, chunk)]
    with get_context("fork").Pool(workers) as pool:
        parts = pool.map(_eval_rows, jobs)
    return np.concatenate([p[0] for p in parts]), set().union(*(p[1] for p in parts))


def raster_factor(f: Poly, box, res, workers: int = 1, numeric_starts: int = 24):
    """Codes for one polynomial and the set of methods used."""
    plan = compile_plan(f)
    if plan.region is not None:
        inside = plan.region.mask_centers(centre_axes(box, res))
        inside |= plan.region.mask_thin(corner_axes(box, res))
        return np.where(inside, IN, OUT).astype(np.uint8), {plan.method}
    return _pointwise(f, centre_axes(box, res), workers, numeric_starts)


def raster_improj(f, box, res, workers: int | None = None, numeric_starts: int = 24, seed: int = 0) -> Raster:
    """Raster of ``I(f)`` (or of the union over a factor list) on a box.

    ``seed`` is recorded only: every random choice downstream is derived
    from the polynomial and the point.
    """
    factors = [f] if isinstance(f, Poly) else list(f)
    if not factors:
        raise ValueError("empty factor list")
    n = factors[0].nvars
    if any(g.nvars != n for g in factors):
        raise ValueError("factors live in different dimensions")
    if n not in (2, 3):
        raise ValueError("rasters support n = 2 and n = 3")
    box = parse_box(box, n)
    res = _res_tuple(res, n)
    workers = default_workers() if workers is None else max(1, int(workers))
    union = np.full(res, OUT, dtype=np.uint8)
    methods = set()
    for g in factors:
        if g.is_zero():
            raise ValueError("zero polynomial")
        codes, used = raster_factor(g, box, res, workers, numeric_starts)
        methods |= used
        unc = (codes == UNCERTAIN) & (union != IN)
        union[codes == IN] = IN
        union[unc] = UNCERTAIN
    text = " ; ".join(format_poly(g) for g in factors)
    meta = {
        "kind": "improj",
        "poly": text,
        "poly_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "methods": sorted(methods),
        "seed": seed,
    }
    return Raster(box, res, union, meta)


# -- amoebas and coamoebas -------------------------------------------------------------


def _check_amoeba_input(f: Poly):
    if f.nvars != 2:
        raise ValueError("amoebas and coamoebas are rasterised for n = 2")
    if len(f.terms) < 2:
        raise ValueError("a monomial has an empty amoeba")


def _solve_chart(f: Poly, k: int, w: np.ndarray, seed: int):
    """Roots in ``z_{k+1}`` of ``f`` with the other coordinate set to ``w``."""
    if f.degree_in(k) == 0:
        return np.empty((0, 2), dtype=complex), 0
    cols = [c.eval_numpy(w, w) * np.ones(w.shape) for c in f.coeffs_in(k)]
    coeffs = np.stack(cols, axis=1)
    keep = np.abs(coeffs[:, -1]) > 1e-12 * np.abs(coeffs).max(axis=1)
    coeffs, w = coeffs[keep], w[keep]
    if coeffs.shape[0] == 0:
        return np.empty((0, 2), dtype=complex), 0
    roots, ok = rr.complex_roots_batch(coeffs, seed=seed)
    gaps = int(np.sum(~ok))
    roots, w = roots[ok], w[ok]
    pts = np.empty(roots.shape + (2,), dtype=complex)
    pts[..., k] = roots
    pts[..., 1 - k] = w[:, None]
    return pts.reshape(-1, 2), gaps


def _mark(points: np.ndarray, box, res) -> np.ndarray:
    hit = np.zeros(res, dtype=bool)
    lo = np.array([float(b[0]) for b in box])
    hi = np.array([float(b[1]) for b in box])
    k = np.array(res)
    idx = np.floor((points - lo) / (hi - lo) * k).astype(np.int64)
    good = np.all((idx >= 0) & (idx < k), axis=1) & np.all(np.isfinite(points), axis=1)
    idx = idx[good]
    hit[tuple(idx.T)] = True
    return hit


def _forward_raster(f, box, res, coords, samples, seed, kind, modulus_range):
    _check_amoeba_input(f)
    rng = np.random.default_rng(seed)
    hit = np.zeros(res, dtype=bool)
    gaps = 0
    for k in (1, 0):
        j = 1 - k  # the sampled coordinate
        log_r = rng.uniform(modulus_range[j][0], modulus_range[j][1], samples)
        arg = rng.uniform(-math.pi, math.pi, samples)
        w = np.exp(log_r + 1j * arg)
        pts, g = _solve_chart(f, k, w, seed)
        gaps += g
        with np.errstate(divide="ignore", invalid="ignore"):
            hit |= _mark(coords(pts), box, res)
    cells = np.where(hit, IN, OUT).astype(np.uint8)
    meta = {"kind": kind, "poly": format_poly(f), "samples_per_chart": samples, "seed": seed, "gaps": gaps}
    return Raster(box, res, cells, meta)


def raster_amoeba(f: Poly, box="-4:4,-4:4", res=200, samples: int | None = None, seed: int = 0) -> Raster:
    """Forward-sampled amoeba ``Log|z|`` (natural log) on a box.

    The sampled coordinate has ``log|z_j|`` uniform over the box range widened
    by 2 and a uniform argument; tentacle tips are sparser than the body.
    """
    box = parse_box(box, 2)
    res = _res_tuple(res, 2)
    samples = samples or 40 * res[0] * res[1]
    ranges = [(float(lo) - 2, float(hi) + 2) for lo, hi in box]
    return _forward_raster(f, box, res, lambda z: np.log(np.abs(z)), samples, seed, "amoeba", ranges)


def raster_coamoeba(f: Poly, res=200, samples: int | None = None, seed: int = 0, log_modulus: float = 6.0) -> Raster:
    """Forward-sampled coamoeba ``Arg z`` on the torus ``[-pi, pi]^2``."""
    box = parse_box([(Q(-math.pi), Q(math.pi))] * 2, 2)
    res = _res_tuple(res, 2)
    samples = samples or 40 * res[0] * res[1]
    ranges = [(-log_modulus, log_modulus)] * 2
    return _forward_raster(f, box, res, np.angle, samples, seed, "coamoeba", ranges)


# -- components -------------------------------------------------------------------------------


@dataclass(frozen=True)
class Convexity:
    status: str  # Pass, Fail, Skipped
    witness: tuple | None = None  # (cell a, cell b, midpoint cell)
    pairs: int = 0


@dataclass(frozen=True)
class Component:
    id: int
    cells: int
    touches_box_boundary: bool
    convexity: Convexity
    bounded_estimate: bool
    cell_indices: np.ndarray = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class ComponentReport:
    components: tuple
    uncertain_cells: int
    connectivity: int
    fragments: int = 0  # components below the size threshold (wedge tips at vertices)

    @property
    def count(self) -> int:
        return len(self.components)

    @property
    def bounded(self) -> int:
        return sum(c.bounded_estimate for c in self.components)

    @property
    def unbounded(self) -> int:
        return self.count - self.bounded

    def to_json(self) -> dict:
        comps = []
        for c in self.components:
            conv = {"status": c.convexity.status, "pairs": c.convexity.pairs}
            if c.convexity.witness is not None:
                conv["witness"] = [list(map(int, w)) for w in c.convexity.witness]
            comps.append(
                {
                    "id": c.id,
                    "cells": c.cells,
                    "touches_box_boundary": c.touches_box_boundary,
                    "convexity": conv,
                    "bounded_estimate": c.bounded_estimate,
                }
            )
        return {
            "components": comps,
            "totals": {"count": self.count, "bounded": self.bounded, "unbounded": self.unbounded},
            "uncertain_cells": self.uncertain_cells,
            "connectivity": self.connectivity,
            "fragments": self.fragments,
        }


def convexity_check(mask: np.ndarray, pairs: int = 2000, seed: int = 0, slack: int = 1) -> Convexity:
    """Midpoints of sampled cell pairs must lie in (or within ``slack`` cells of) the component."""
    idx = np.argwhere(mask)
    if len(idx) < 3:
        return Convexity("Pass", None, 0)
    near = ndimage.binary_dilation(mask, structure=np.ones((3,) * mask.ndim, dtype=bool), iterations=slack)
    rng = np.random.default_rng(seed)
    a = idx[rng.integers(0, len(idx), pairs)]
    b = idx[rng.integers(0, len(idx), pairs)]
    mid = (a + b) // 2
    ok = near[tuple(mid.T)]
    if ok.all():
        return Convexity("Pass", None, pairs)
    j = int(np.argmin(ok))
    return Convexity("Fail", (tuple(a[j]), tuple(b[j]), tuple(mid[j])), pairs)


def components(
    r: Raster, convexity_pairs: int = 2000, seed: int = 0, check_convexity: bool = True, min_cells: int = 2
) -> ComponentReport:
    """Connected components of the Out cells, 4-connected in 2-D and 6-connected in 3-D.

    Near a vertex where two marked curves meet at a sharp angle, the tip of
    a wedge can be cut off from its region by the digital curves.  Pieces
    with fewer than ``min_cells`` cells are counted as fragments and left
    out of the component list; ``min_cells=1`` keeps everything.
    """
    out = r.cells == OUT
    structure = ndimage.generate_binary_structure(out.ndim, 1)
    labels, count = ndimage.label(out, structure=structure)
    edge = np.zeros_like(out)
    for ax in range(out.ndim):
        sl = [slice(None)] * out.ndim
        sl[ax] = 0
        edge[tuple(sl)] = True
        sl[ax] = -1
        edge[tuple(sl)] = True
    touching = set(np.unique(labels[edge & out]).tolist())
    sizes = ndimage.sum_labels(out, labels, index=np.arange(1, count + 1)) if count else []
    comps = []
    fragments = 0
    for cid in range(1, count + 1):
        if sizes[cid - 1] < min_cells:
            fragments += 1
            continue
        mask = labels == cid
        conv = convexity_check(mask, convexity_pairs, seed + cid) if check_convexity else Convexity("Skipped")
        touches = cid in touching
        comps.append(Component(len(comps) + 1, int(sizes[cid - 1]), touches, conv, not touches, np.argwhere(mask)))
    connectivity = 4 if out.ndim == 2 else 6
    return ComponentReport(tuple(comps), int(np.sum(r.cells == UNCERTAIN)), connectivity, fragments)


# -- export -------------------------------------------------------------------------------------


def to_image(r: Raster) -> np.ndarray:
    """2-D image with ``y2`` increasing upwards; 3-D rasters stack their ``y3`` slices vertically."""
    if r.n == 2:
        return np.ascontiguousarray(r.cells.T[::-1])
    return np.concatenate([np.ascontiguousarray(r.cells[:, :, k].T[::-1]) for k in range(r.res[2])])


def write_pgm(r: Raster, path) -> None:
    img = to_image(r)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.astype(np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def raster_json(r: Raster) -> dict:
    return {
        "box": [[float(lo), float(hi)] for lo, hi in r.box],
        "resolution": list(r.res),
        "counts": r.counts(),
        "sha256": r.digest(),
        "meta": r.meta,
    }


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
