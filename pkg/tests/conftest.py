import random

import pytest

from mtfacets.corpus import Corpus, Segment

FIXTURES_DIR = None  # set lazily below to avoid import-order surprises


def seg(text: str) -> Segment:
    return Segment(tuple(text.split()))


def corpus(*lines: str, name: str = "c") -> Corpus:
    return Corpus(name, tuple(seg(line) for line in lines))


def random_corpus(rng: random.Random, n_segments: int, vocab=None,
                  max_len: int = 8, name: str = "rand") -> Corpus:
    vocab = vocab or ["a", "b", "c", "dd", "ee", "xyz", "w"]
    segments = []
    for _ in range(n_segments):
        k = rng.randint(0, max_len)
        segments.append(Segment(tuple(rng.choice(vocab) for _ in range(k))))
    return Corpus(name, tuple(segments))


@pytest.fixture
def toy_config_path():
    from pathlib import Path
    return Path(__file__).parent / "fixtures" / "toy" / "config.json"
