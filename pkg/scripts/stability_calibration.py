"""Agreement of the stability certificates on random inputs.

Univariate: Hermite-Biehler against numerical roots.  Bilinear with
integer coefficients: the sampled Delta test against the projection
certificate.
"""
import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

from improj.parse import format_poly, parse
from improj.polycore import GaussQ, Poly
from improj.stability import direct_root_stability, hermite_biehler, multilinear_stability, stable_via_projection


@dataclass
class CalibrationConfig:
    univariate: int = 500
    degree: int = 5
    bilinear: int = 200
    delta_samples: int = 20000
    seed: int = 0


def _univariate(rng, degree):
    terms = {(k,): GaussQ(rng.randint(-5, 5), rng.randint(-5, 5)) for k in range(degree + 1)}
    while not terms[(degree,)]:
        terms[(degree,)] = GaussQ(rng.randint(-5, 5), rng.randint(-5, 5))
    return Poly(1, terms)


def calibrate(cfg: CalibrationConfig) -> dict:
    rng = random.Random(cfg.seed)
    uni = Counter()
    disagreements = []
    for _ in range(cfg.univariate):
        f = _univariate(rng, rng.randint(1, cfg.degree))
        a, b = hermite_biehler(f).state, direct_root_stability(f).state
        uni[(a.value, b.value)] += 1
        if a != b and "Unknown" not in (a.value, b.value):
            disagreements.append(format_poly(f))
    bil = Counter()
    for _ in range(cfg.bilinear):
        a, b, c, d = (rng.randint(-4, 4) for _ in range(4))
        f = parse(f"{a}*z1*z2 + {b}*z1 + {c}*z2 + {d}")
        if f.is_constant() or f.degree() < 1:
            continue
        delta = multilinear_stability(f, samples=cfg.delta_samples, seed=cfg.seed).state.value
        proj = stable_via_projection(f).state.value
        bil[(delta, proj)] += 1
    return {
        "univariate": {f"{k[0]}/{k[1]}": v for k, v in sorted(uni.items())},
        "univariate_disagreements": disagreements,
        "bilinear_delta_vs_projection": {f"{k[0]}/{k[1]}": v for k, v in sorted(bil.items())},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(CalibrationConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = CalibrationConfig(**{k: getattr(args, k) for k in asdict(CalibrationConfig())})
    doc = calibrate(cfg)
    text = json.dumps({"config": asdict(cfg), **doc}, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)


if __name__ == "__main__":
    main()
