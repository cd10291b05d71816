"""Symbolic limit directions against an empirical sweep of a large circle.

For each bivariate corpus polynomial the script prints the symbolic limit
set, the empirical bin coverage and the largest angle between an empirical
cluster centre and the nearest symbolic direction.
"""
import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from improj.asymptotics import empirical_limit_directions, limit_set
from improj.parse import parse, read_corpus

DEFAULT_CORPUS = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus.txt"


@dataclass
class SweepConfig:
    corpus: str = str(DEFAULT_CORPUS)
    radius: float = 100.0
    bins: int = 720
    samples: int = 20000
    seed: int = 0


def sweep(cfg: SweepConfig) -> list:
    rows = []
    for line in read_corpus(cfg.corpus):
        if ";" in line:
            continue
        f = parse(line)
        if f.nvars != 2 or f.is_constant():
            continue
        ls = limit_set(f)
        emp = empirical_limit_directions(f, cfg.radius, cfg.bins, cfg.samples, seed=cfg.seed)
        worst = None
        if ls.kind == "FiniteDirections" and ls.directions:
            worst = 0.0
            for d in emp.directions:
                if d is not None:  # None marks a cluster covering the whole circle
                    worst = max(worst, ls.angle_to(d))
        rows.append(
            {
                "poly": line,
                "kind": ls.kind,
                "certified": ls.certified,
                "symbolic": [list(map(float, d)) for d in ls.directions],
                "coverage": emp.coverage,
                "clusters": len(emp.clusters),
                "max_angle": worst,
            }
        )
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(SweepConfig()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = SweepConfig(**{k: getattr(args, k) for k in asdict(SweepConfig())})
    rows = sweep(cfg)
    if args.out:
        Path(args.out).write_text(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2) + "\n")
    for r in rows:
        angle = "-" if r["max_angle"] is None else f"{r['max_angle']:.4f}"
        print(f"{r['poly']:<36} {r['kind']:<11} {r['certified']:<17} cov={r['coverage']:.3f} angle={angle}")


if __name__ == "__main__":
    main()
