"""Rule-based sentence splitting and tokenization for normalized German text.

The splitter is deliberately deterministic: a boundary is a '.', '!' or '?'
followed by whitespace and a capital or opening quote, except after a known
abbreviation or a digit-period (ordinals and dates such as "2. Mai").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_TERMINATORS = ".!?"
# Characters that may open a sentence besides capital letters.
_OPENERS = "\"'„“‚‘»«›‹(["
_LEADING_PUNCT = "\"'„“‚‘»«›‹([-–—"

# Numbers keep German grouping and decimals ("1.000,50"); words keep
# intra-word hyphens ("E-Mail"). Everything else is discarded.
_TOKEN = re.compile(r"\d+(?:[.,]\d+)*|[^\W_]+(?:-[^\W_]+)*")


def _load_default_abbreviations() -> frozenset[str]:
    text = resources.files("paramine").joinpath("data/abbreviations_de.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


DEFAULT_ABBREVIATIONS = _load_default_abbreviations()


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list, one entry per line, '#' comments allowed."""
    return frozenset(
        line.strip().lower()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class Sentence:
    """A sentence tied to its article, with lowercased word tokens."""

    id: str
    article_id: str
    ordinal: int
    text: str
    tokens: list[str]


def make_sentence(article_id: str, ordinal: int, text: str) -> Sentence:
    return Sentence(
        id=f"{article_id}:{ordinal}",
        article_id=article_id,
        ordinal=ordinal,
        text=text,
        tokens=tokenize(text),
    )


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with punctuation removed.

    Intra-word hyphens and digit-internal '.'/',' survive, so "E-Mail",
    "40" and "1.000,50" each stay one token. Idempotent on its own
    space-joined output.
    """
    return _TOKEN.findall(text.lower())


def _is_boundary(text: str, i: int, abbreviations: frozenset[str]) -> bool:
    """Is the terminator at text[i] a sentence boundary?"""
    j = i + 1
    if j >= len(text) or not text[j].isspace():
        return False
    k = j
    while k < len(text) and text[k].isspace():
        k += 1
    if k >= len(text):
        return False
    nxt = text[k]
    if not (nxt.isupper() or nxt in _OPENERS):
        return False
    if text[i] != ".":
        return True
    if i > 0 and text[i - 1].isdigit():
        return False
    start = i
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start : i + 1].lstrip(_LEADING_PUNCT).lower()
    return word not in abbreviations


def split_text(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split normalized text into sentence strings.

    Text with no terminator yields one sentence; empty text yields none.
    Joining the result with single spaces reconstructs normalized input.
    """
    abbrs = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINATORS and _is_boundary(text, i, abbrs):
            chunk = text[start : i + 1].strip()
            if chunk:
                sentences.append(chunk)
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(article, abbreviations: frozenset[str] | None = None) -> list[Sentence]:
    """Split an article's (already normalized) text into Sentence records
    with dense ordinals starting at 0.
    """
    return [
        make_sentence(article.id, ordinal, text)
        for ordinal, text in enumerate(split_text(article.text, abbreviations))
    ]
