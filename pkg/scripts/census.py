"""Component census over the corpus: counts, boundedness and convexity per polynomial.

    python3 scripts/census.py --res2 200 --out census.json

Trivariate inputs without a closed form would go through the numeric
fallback, which spends one to two seconds per cell and leaves Uncertain
cells where it finds no zero.  They are skipped unless ``--numeric-3d`` is
given.
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from improj.geometry import components, raster_improj
from improj.oracle import compile_plan
from improj.parse import parse, parse_factors, read_corpus

DEFAULT_CORPUS = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus.txt"


@dataclass
class CensusConfig:
    corpus: str = str(DEFAULT_CORPUS)
    box2: str = "-4:4,-4:4"
    box3: str = "-4:4,-4:4,-4:4"
    res2: int = 200
    res3: int = 12
    workers: int = 1
    numeric_3d: bool = False


def _show(row):
    flag = "" if row["all_convex"] else "  NOT CONVEX"
    line = (
        f"{row['poly']:<40} {row['components']:>3} comps  {row['bounded']} bounded"
        f"  {row['uncertain_cells']:>5} uncertain  {row['seconds']:>7.2f}s{flag}"
    )
    print(line, flush=True)


def census(cfg: CensusConfig, on_row=None) -> list:
    rows = []
    for line in read_corpus(cfg.corpus):
        f = parse_factors(line) if ";" in line else parse(line)
        n = f.nvars if hasattr(f, "nvars") else f[0].nvars
        if n == 1:
            f, n = f.extend(2), 2
        box, res = (cfg.box2, cfg.res2) if n == 2 else (cfg.box3, cfg.res3)
        factors = f if isinstance(f, list) else [f]
        if n == 3 and not cfg.numeric_3d and any(compile_plan(g).kind == "numeric" for g in factors):
            print(f"{line:<40} skipped (numeric fallback; pass --numeric-3d)", flush=True)
            continue
        start = time.perf_counter()
        r = raster_improj(f, box, res, workers=cfg.workers)
        rep = components(r)
        rows.append(
            {
                "poly": line,
                "n": n,
                "methods": r.meta["methods"],
                "components": rep.count,
                "bounded": rep.bounded,
                "unbounded": rep.unbounded,
                "fragments": rep.fragments,
                "uncertain_cells": rep.uncertain_cells,
                "all_convex": all(c.convexity.status == "Pass" for c in rep.components),
                "seconds": round(time.perf_counter() - start, 3),
            }
        )
        if on_row:
            on_row(rows[-1])
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(CensusConfig()).items():
        flag = f"--{name.replace('_', '-')}"
        if isinstance(default, bool):
            ap.add_argument(flag, action="store_true")
        else:
            ap.add_argument(flag, type=type(default), default=default)
    ap.add_argument("--out", help="JSON output (default: table on stdout)")
    args = ap.parse_args()
    cfg = CensusConfig(**{k: getattr(args, k) for k in asdict(CensusConfig())})
    rows = census(cfg, on_row=_show)
    if args.out:
        Path(args.out).write_text(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2) + "\n")


if __name__ == "__main__":
    main()
