from __future__ import annotations

import json
from pathlib import Path

import pytest

from paramine.embed import HashedNgramEmbedder
from paramine.sentsplit import make_sentence

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden_pairs() -> list[dict]:
    with open(DATA_DIR / "golden_pairs.json", encoding="utf-8") as fh:
        return json.load(fh)["pairs"]


@pytest.fixture(scope="session")
def fallback_embedder() -> HashedNgramEmbedder:
    return HashedNgramEmbedder(512)


@pytest.fixture
def corpus_path() -> Path:
    return DATA_DIR / "corpus.jsonl"


def sentences_from_texts(texts, article_id="a"):
    """Build Sentence records for ad-hoc fixtures, one article per call."""
    return [make_sentence(article_id, i, t) for i, t in enumerate(texts)]


# Unit-norm partners found by ulp search so that np.linalg.norm([x, b]) is
# exactly 1.0; the cosine of (x, b) against (1, 0) is then exactly x.
UNIT_PARTNER_AT_0935 = float.fromhex("0x1.6b28c51b9a74fp-2")
UNIT_PARTNER_ABOVE_0935 = float.fromhex("0x1.6b28142e135eep-2")


class FixedVectorProvider:
    """Provider serving fixed vectors keyed by sentence text."""

    def __init__(self, mapping):
        import numpy as np

        self.mapping = {k: np.asarray(v, dtype=float) for k, v in mapping.items()}

    def embed_sentence(self, text, key=None):
        return self.mapping[text]


def mine_two_sentences_with_cosine(x, b, threshold=0.935):
    """Mine exactly two distinct sentences whose cosine is exactly x."""
    from paramine.miner import MinerConfig, mine_pairs

    provider = FixedVectorProvider(
        {"Satz eins hier.": [1.0, 0.0], "Satz zwei dort.": [x, b]}
    )
    sentences = [
        make_sentence("a", 0, "Satz eins hier."),
        make_sentence("b", 0, "Satz zwei dort."),
    ]
    return mine_pairs(sentences, provider, MinerConfig(threshold=threshold))
