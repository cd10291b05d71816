"""Shared test inputs."""
from pathlib import Path

from improj.parse import parse, read_corpus
from improj.polycore import GaussQ, Poly

CORPUS_PATH = Path(__file__).parent / "data" / "corpus.txt"
CORPUS = read_corpus(CORPUS_PATH)
CORPUS_2D = [s for s in CORPUS if parse(s).nvars <= 2]
REAL_CORPUS = [s for s in CORPUS if parse(s).is_real()]


def random_complex_univariate(rng, degree: int, span: int = 5) -> Poly:
    terms = {}
    for k in range(degree + 1):
        terms[(k,)] = GaussQ(rng.randint(-span, span), rng.randint(-span, span))
    while not terms[(degree,)]:
        terms[(degree,)] = GaussQ(rng.randint(-span, span), rng.randint(-span, span))
    return Poly(1, terms)
