"""Pairwise candidate mining over sentence embeddings.

Every sentence is compared to every other sentence; a pair survives when its
cosine similarity is strictly greater than the threshold. The blocked variant
changes iteration order only, never the result.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .embed import cosine
from .sentsplit import Sentence, make_sentence


class MiningError(Exception):
    pass


@dataclass(frozen=True)
class MinerConfig:
    """Mining thresholds. A pair at exactly `threshold` is excluded."""

    threshold: float = 0.935
    exclude_same_article: bool = True
    min_tokens: int = 3

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise MiningError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.min_tokens < 0:
            raise MiningError(f"min_tokens must be >= 0, got {self.min_tokens}")


@dataclass(frozen=True)
class CandidatePair:
    """Two distinct sentences above the similarity threshold, oriented so
    that src.id < para.id."""

    pair_id: str
    src: Sentence
    para: Sentence
    cosine: float


def pair_id_for(src_id: str, para_id: str) -> str:
    """Stable 16-hex-digit id derived from the ordered sentence ids."""
    digest = hashlib.sha256(f"{src_id}\x1f{para_id}".encode("utf-8")).hexdigest()
    return digest[:16]


def _check_unique_ids(sentences: list[Sentence]) -> None:
    seen: set[str] = set()
    for s in sentences:
        if s.id in seen:
            raise MiningError(f"duplicate sentence id {s.id!r}")
        seen.add(s.id)


def _embed_all(sentences: list[Sentence], provider) -> dict[str, object]:
    vectors: dict[str, object] = {}
    for s in sentences:
        try:
            vectors[s.id] = provider.embed_sentence(s.text, key=s.id)
        except Exception as exc:
            raise MiningError(f"embedding failed for sentence {s.id}: {exc}") from exc
    return vectors


def _candidate(a: Sentence, b: Sentence, vectors, cfg: MinerConfig) -> CandidatePair | None:
    if a.text == b.text:
        return None
    if cfg.exclude_same_article and a.article_id == b.article_id:
        return None
    sim = cosine(vectors[a.id], vectors[b.id])
    if sim <= cfg.threshold:
        return None
    src, para = (a, b) if a.id < b.id else (b, a)
    return CandidatePair(pair_id_for(src.id, para.id), src, para, sim)


def _sort_pairs(pairs: list[CandidatePair]) -> list[CandidatePair]:
    return sorted(pairs, key=lambda p: (-p.cosine, p.pair_id))


def mine_pairs(
    sentences: list[Sentence], provider, cfg: MinerConfig = MinerConfig()
) -> list[CandidatePair]:
    """All unordered sentence pairs with cosine strictly above the threshold,
    excluding identical texts, undersized sentences and (by default)
    same-article pairs. Sorted by descending cosine, then pair id.
    """
    _check_unique_ids(sentences)
    eligible = [s for s in sentences if len(s.tokens) >= cfg.min_tokens]
    vectors = _embed_all(eligible, provider)
    out: list[CandidatePair] = []
    for i in range(len(eligible)):
        for j in range(i + 1, len(eligible)):
            pair = _candidate(eligible[i], eligible[j], vectors, cfg)
            if pair is not None:
                out.append(pair)
    return _sort_pairs(out)


def mine_pairs_blocked(
    sentences: list[Sentence],
    provider,
    cfg: MinerConfig = MinerConfig(),
    block_size: int = 256,
) -> list[CandidatePair]:
    """Identical output to mine_pairs; iterates block-by-block for memory
    locality on large sentence sets.
    """
    if block_size < 1:
        raise MiningError(f"block_size must be >= 1, got {block_size}")
    _check_unique_ids(sentences)
    eligible = [s for s in sentences if len(s.tokens) >= cfg.min_tokens]
    vectors = _embed_all(eligible, provider)
    blocks = [eligible[k : k + block_size] for k in range(0, len(eligible), block_size)]
    out: list[CandidatePair] = []
    for bi, block_a in enumerate(blocks):
        for bj in range(bi, len(blocks)):
            block_b = blocks[bj]
            if bi == bj:
                for i in range(len(block_a)):
                    for j in range(i + 1, len(block_a)):
                        pair = _candidate(block_a[i], block_a[j], vectors, cfg)
                        if pair is not None:
                            out.append(pair)
            else:
                for a in block_a:
                    for b in block_b:
                        pair = _candidate(a, b, vectors, cfg)
                        if pair is not None:
                            out.append(pair)
    return _sort_pairs(out)


@dataclass(frozen=True)
class PairRecord:
    """The serialized form of a candidate pair, as read back from disk."""

    pair_id: str
    src_id: str
    para_id: str
    src: str
    para: str
    cosine: float


def pair_to_record(pair: CandidatePair) -> PairRecord:
    return PairRecord(
        pair_id=pair.pair_id,
        src_id=pair.src.id,
        para_id=pair.para.id,
        src=pair.src.text,
        para=pair.para.text,
        cosine=round(pair.cosine, 6),
    )


def write_pairs(pairs: list[CandidatePair], path: str | Path) -> None:
    """One JSON object per line; cosine rounded to 6 decimal places."""
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            rec = pair_to_record(pair)
            fh.write(
                json.dumps(
                    {
                        "pair_id": rec.pair_id,
                        "src_id": rec.src_id,
                        "para_id": rec.para_id,
                        "src": rec.src,
                        "para": rec.para,
                        "cosine": rec.cosine,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_pairs(path: str | Path) -> list[PairRecord]:
    records: list[PairRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(
                    PairRecord(
                        pair_id=str(obj["pair_id"]),
                        src_id=str(obj["src_id"]),
                        para_id=str(obj["para_id"]),
                        src=str(obj["src"]),
                        para=str(obj["para"]),
                        cosine=float(obj["cosine"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MiningError(f"{path}: line {lineno}: bad pair record: {exc}") from exc
    return records


def write_sentences(sentences: list[Sentence], path: str | Path) -> None:
    """One JSON object per line; tokens are recomputed on load."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(
                json.dumps(
                    {
                        "id": s.id,
                        "article_id": s.article_id,
                        "ordinal": s.ordinal,
                        "text": s.text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_sentences(path: str | Path) -> list[Sentence]:
    sentences: list[Sentence] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                s = make_sentence(str(obj["article_id"]), int(obj["ordinal"]), str(obj["text"]))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MiningError(f"{path}: line {lineno}: bad sentence record: {exc}") from exc
            if s.id != obj.get("id", s.id):
                raise MiningError(
                    f"{path}: line {lineno}: id {obj['id']!r} does not match "
                    f"article_id:ordinal"
                )
            sentences.append(s)
    return sentences
