"""Automated pair-quality metrics.

Six scores per candidate pair, all in [0, 1]:

* r1 / r2 — F1 over clipped unigram / bigram multiset overlap
* rn      — F1 from the longest common token subsequence
* bs      — greedy maximum-cosine token alignment F1 over provider embeddings
* fcs     — exact agreement of the fact sets (numbers, percents, dates,
            currency amounts, years, gazetteer/NER entities) of both texts
* gs      — grammar well-formedness from an external checker's error count

Fact extraction is rule-based over digit-bearing expressions; entity facts
come only from a gazetteer or an NER service, never from capitalization
(German capitalizes every noun). Fuzzy fact matching ("John Doe" vs
"Mr. Doe") is out of scope.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .sentsplit import tokenize

logger = logging.getLogger(__name__)

LT_URL_ENV = "PARA_LT_URL"
NER_URL_ENV = "PARA_NER_URL"

FACT_KINDS = ("number", "percent", "year", "date", "currency", "entity")


class MetricError(Exception):
    """A sub-metric failed hard for a pair."""


class CheckerUnavailableError(Exception):
    """Grammar checker transport failure; the pair's gs becomes absent."""

    retryable = True


class NerUnavailableError(Exception):
    """NER service transport failure; fact extraction degrades to rules."""

    retryable = True


# ---------------------------------------------------------------------------
# n-gram overlap


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(a: list[str], b: list[str], n: int) -> float:
    """F1 over clipped n-gram multiset overlap; 0 when either side has no
    n-grams or nothing matches."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    grams_a = _ngrams(a, n)
    grams_b = _ngrams(b, n)
    if not grams_a or not grams_b:
        return 0.0
    match = sum(min(count, grams_b[g]) for g, count in grams_a.items())
    if match == 0:
        return 0.0
    precision = match / sum(grams_b.values())
    recall = match / sum(grams_a.values())
    return 2 * precision * recall / (precision + recall)


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length, O(len(a) * len(b))."""
    if not a or not b:
        return 0
    row = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        prev = 0
        for j in range(1, len(b) + 1):
            tmp = row[j]
            if a[i - 1] == b[j - 1]:
                row[j] = prev + 1
            else:
                row[j] = max(row[j], row[j - 1])
            prev = tmp
    return row[len(b)]


def rouge_longest(a: list[str], b: list[str]) -> float:
    """F1 from the longest common token subsequence."""
    if not a or not b:
        return 0.0
    length = lcs_length(a, b)
    if length == 0:
        return 0.0
    precision = length / len(b)
    recall = length / len(a)
    return 2 * precision * recall / (precision + recall)


def longest_common_ngram(a: list[str], b: list[str]) -> int:
    """Length of the longest contiguous token run shared by both sides."""
    best = 0
    if not a or not b:
        return 0
    grams_b: set[tuple[str, ...]] = set()
    for n in range(1, min(len(a), len(b)) + 1):
        grams_b = {tuple(b[i : i + n]) for i in range(len(b) - n + 1)}
        found = any(tuple(a[i : i + n]) in grams_b for i in range(len(a) - n + 1))
        if not found:
            break
        best = n
    return best


def rouge_longest_contiguous(a: list[str], b: list[str]) -> float:
    """Alternative rn: F1 from the longest shared contiguous n-gram."""
    if not a or not b:
        return 0.0
    length = longest_common_ngram(a, b)
    if length == 0:
        return 0.0
    precision = length / len(b)
    recall = length / len(a)
    return 2 * precision * recall / (precision + recall)


# ---------------------------------------------------------------------------
# embedding alignment


def bert_score(a: list[str], b: list[str], provider) -> float:
    """Greedy-matching F1 over token embeddings: each token is aligned to its
    maximum-cosine counterpart. No IDF weighting, no baseline rescaling.
    Clamped to [0, 1]; 0 when either token list is empty.
    """
    if not a or not b:
        return 0.0
    vecs_a = np.stack(provider.embed_tokens(list(a)))
    vecs_b = np.stack(provider.embed_tokens(list(b)))
    norms_a = np.linalg.norm(vecs_a, axis=1)
    norms_b = np.linalg.norm(vecs_b, axis=1)
    # Zero-norm vectors contribute cosine 0 against everything.
    safe_a = np.where(norms_a == 0.0, 1.0, norms_a)
    safe_b = np.where(norms_b == 0.0, 1.0, norms_b)
    sims = (vecs_a / safe_a[:, None]) @ (vecs_b / safe_b[:, None]).T
    sims = np.clip(sims, -1.0, 1.0)
    recall = float(sims.max(axis=1).mean())
    precision = float(sims.max(axis=0).mean())
    if precision + recall <= 0.0:
        return 0.0
    f1 = 2 * precision * recall / (precision + recall)
    return min(1.0, max(0.0, f1))


# ---------------------------------------------------------------------------
# facts


@dataclass(frozen=True)
class Fact:
    """A fact is its exact surface string; comparison is exact equality."""

    kind: str
    surface: str


_NUMBER_PAT = r"\d{1,3}(?:\.\d{3})+(?:,\d+)?|\d+(?:,\d+)?"
_MONTHS = (
    "Januar|Februar|März|April|Mai|Juni|Juli|August|September|Oktober"
    "|November|Dezember"
)
_CURRENCY_WORDS = r"Euro|EUR|Cent|Dollar|US-Dollar|Franken|Pfund"

_DATE_RE = re.compile(
    rf"\b\d{{1,2}}\.\d{{1,2}}\.\d{{4}}\b|\b\d{{1,2}}\.\s(?:{_MONTHS})\s\d{{4}}\b"
)
_PERCENT_RE = re.compile(rf"(?:{_NUMBER_PAT})\s?(?:%|Prozent\b)", re.IGNORECASE)
_CURRENCY_RE = re.compile(
    rf"(?:{_NUMBER_PAT})\s?(?:€|\$|(?:{_CURRENCY_WORDS})\b)"
    rf"|[€$]\s?(?:{_NUMBER_PAT})"
)
_YEAR_RE = re.compile(r"\b(?:19|20)\d{2}\b")
_NUMBER_RE = re.compile(rf"\b(?:{_NUMBER_PAT})\b")

# Extraction order doubles as a subsumption rule: a span consumed by an
# earlier kind is masked out, so the year inside "01.02.2023" or the number
# inside "40 Prozent" is never emitted separately.
_RULES: tuple[tuple[str, re.Pattern[str]], ...] = (
    ("date", _DATE_RE),
    ("percent", _PERCENT_RE),
    ("currency", _CURRENCY_RE),
    ("year", _YEAR_RE),
    ("number", _NUMBER_RE),
)


def _word_bounded(surface: str) -> re.Pattern[str]:
    return re.compile(rf"(?<!\w){re.escape(surface)}(?!\w)")


def load_gazetteer(path: str | Path) -> frozenset[str]:
    """One known entity surface per line; '#' comments allowed."""
    return frozenset(
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    )


class NerClient:
    """Optional NER endpoint: POST {"text": ...} -> {"entities": [{"surface": ...}]}."""

    def __init__(self, endpoint: str, *, timeout: float = 30.0, session=None):
        self.endpoint = endpoint
        self.timeout = timeout
        self._session = session if session is not None else requests.Session()

    def extract(self, text: str) -> list[str]:
        try:
            resp = self._session.post(
                self.endpoint, json={"text": text}, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise NerUnavailableError(f"NER endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise NerUnavailableError(f"NER endpoint returned HTTP {resp.status_code}")
        try:
            entities = resp.json()["entities"]
            return [str(e["surface"]) for e in entities]
        except (ValueError, KeyError, TypeError) as exc:
            raise NerUnavailableError(f"malformed NER response: {exc}") from exc


def extract_facts(
    text: str,
    *,
    gazetteer: frozenset[str] | None = None,
    ner: NerClient | None = None,
) -> frozenset[Fact]:
    """Deterministic fact extraction from raw (case-preserved) text.

    Rules find digit-bearing expressions; entities come from the gazetteer
    (exact word-bounded match) and/or the NER service. If the NER service is
    unreachable the extraction degrades to rules with a logged warning.
    """
    facts: set[Fact] = set()
    masked = text
    for kind, pattern in _RULES:
        spans: list[tuple[int, int]] = []
        for m in pattern.finditer(masked):
            facts.add(Fact(kind, m.group(0)))
            spans.append(m.span())
        for start, end in spans:
            masked = masked[:start] + "\x00" * (end - start) + masked[end:]
    if gazetteer:
        for surface in gazetteer:
            if surface and _word_bounded(surface).search(text):
                facts.add(Fact("entity", surface))
    if ner is not None:
        try:
            surfaces = ner.extract(text)
        except NerUnavailableError as exc:
            logger.warning("NER unavailable, using rule-based facts only: %s", exc)
            surfaces = []
        for surface in surfaces:
            if surface:
                facts.add(Fact("entity", surface))
    return frozenset(facts)


def factual_correctness(
    a: str,
    b: str,
    *,
    mode: str = "strict",
    gazetteer: frozenset[str] | None = None,
    ner: NerClient | None = None,
) -> float:
    """Strict mode: 1.0 iff both fact sets are exactly equal (two empty sets
    agree). Jaccard mode: |intersection| / |union|, 1.0 for an empty union.
    """
    facts_a = extract_facts(a, gazetteer=gazetteer, ner=ner)
    facts_b = extract_facts(b, gazetteer=gazetteer, ner=ner)
    if mode == "strict":
        return 1.0 if facts_a == facts_b else 0.0
    if mode == "jaccard":
        union = facts_a | facts_b
        if not union:
            return 1.0
        return len(facts_a & facts_b) / len(union)
    raise ValueError(f"unknown fcs mode {mode!r}")


# ---------------------------------------------------------------------------
# grammar


class LanguageToolChecker:
    """Grammar checker speaking the LanguageTool HTTP protocol."""

    def __init__(
        self,
        base_url: str,
        *,
        language: str = "de-DE",
        timeout: float = 30.0,
        session=None,
    ):
        self.base_url = base_url.rstrip("/")
        self.language = language
        self.timeout = timeout
        self._session = session if session is not None else requests.Session()

    def count_matches(self, text: str) -> int:
        try:
            resp = self._session.post(
                f"{self.base_url}/v2/check",
                data={"text": text, "language": self.language},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise CheckerUnavailableError(f"checker unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise CheckerUnavailableError(
                f"checker returned HTTP {resp.status_code}"
            )
        try:
            return len(resp.json()["matches"])
        except (ValueError, KeyError, TypeError) as exc:
            raise CheckerUnavailableError(f"malformed checker response: {exc}") from exc


class StubChecker:
    """Deterministic stand-in checker reporting a fixed match count."""

    def __init__(self, matches: int = 0):
        self.matches = matches

    def count_matches(self, text: str) -> int:
        return self.matches


def grammar_score(a: str, b: str, checker) -> float:
    """1 - errors/tokens over both sentences together, floored at 0.
    A checker reporting zero matches always yields 1.0.
    """
    errors = checker.count_matches(a) + checker.count_matches(b)
    total_tokens = len(tokenize(a)) + len(tokenize(b))
    if total_tokens == 0:
        return 1.0 if errors == 0 else 0.0
    return max(0.0, 1.0 - errors / total_tokens)


# ---------------------------------------------------------------------------
# composition


@dataclass(frozen=True)
class MetricReport:
    """The six automated scores for one pair; gs is None when the grammar
    checker was unavailable (distinct from a score of 0)."""

    pair_id: str
    fcs: float
    gs: float | None
    r1: float
    r2: float
    rn: float
    bs: float


@dataclass
class MetricSuite:
    """Providers and modes shared by all pairs of one scoring run."""

    embedder: object
    checker: object | None = None
    gazetteer: frozenset[str] | None = None
    ner: NerClient | None = None
    fcs_mode: str = "strict"
    rn_mode: str = "lcs"


def _run(name: str, pair_id: str, fn):
    try:
        return fn()
    except CheckerUnavailableError:
        raise
    except Exception as exc:
        raise MetricError(f"{name} failed for pair {pair_id}: {exc}") from exc


def score_pair(pair, suite: MetricSuite) -> MetricReport:
    """Compute all six scores for a pair record (needs .pair_id/.src/.para)."""
    pid = pair.pair_id
    tokens_a = tokenize(pair.src)
    tokens_b = tokenize(pair.para)
    fcs = _run(
        "fcs",
        pid,
        lambda: factual_correctness(
            pair.src,
            pair.para,
            mode=suite.fcs_mode,
            gazetteer=suite.gazetteer,
            ner=suite.ner,
        ),
    )
    r1 = _run("r1", pid, lambda: rouge_n(tokens_a, tokens_b, 1))
    r2 = _run("r2", pid, lambda: rouge_n(tokens_a, tokens_b, 2))
    if suite.rn_mode == "lcs":
        rn = _run("rn", pid, lambda: rouge_longest(tokens_a, tokens_b))
    elif suite.rn_mode == "contiguous":
        rn = _run("rn", pid, lambda: rouge_longest_contiguous(tokens_a, tokens_b))
    else:
        raise MetricError(f"unknown rn mode {suite.rn_mode!r}")
    bs = _run("bs", pid, lambda: bert_score(tokens_a, tokens_b, suite.embedder))
    gs: float | None = None
    if suite.checker is not None:
        try:
            gs = _run("gs", pid, lambda: grammar_score(pair.src, pair.para, suite.checker))
        except CheckerUnavailableError as exc:
            logger.warning("grammar checker unavailable for pair %s: %s", pid, exc)
            gs = None
    return MetricReport(pair_id=pid, fcs=fcs, gs=gs, r1=r1, r2=r2, rn=rn, bs=bs)


# ---------------------------------------------------------------------------
# TSV serialization

METRIC_COLUMNS = ("pair_id", "fcs", "gs", "r1", "r2", "rn", "bs")


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_metrics(reports: list[MetricReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(METRIC_COLUMNS) + "\n")
        for r in reports:
            fh.write(
                "\t".join(
                    (
                        r.pair_id,
                        _fmt(r.fcs),
                        _fmt(r.gs),
                        _fmt(r.r1),
                        _fmt(r.r2),
                        _fmt(r.rn),
                        _fmt(r.bs),
                    )
                )
                + "\n"
            )


def load_metrics(path: str | Path) -> list[MetricReport]:
    reports: list[MetricReport] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split("\t") != list(METRIC_COLUMNS):
            raise MetricError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            cells = line.rstrip("\n").split("\t")
            if len(cells) != len(METRIC_COLUMNS):
                raise MetricError(f"{path}: line {lineno}: expected "
                                  f"{len(METRIC_COLUMNS)} columns, got {len(cells)}")
            try:
                reports.append(
                    MetricReport(
                        pair_id=cells[0],
                        fcs=float(cells[1]),
                        gs=float(cells[2]) if cells[2] else None,
                        r1=float(cells[3]),
                        r2=float(cells[4]),
                        rn=float(cells[5]),
                        bs=float(cells[6]),
                    )
                )
            except ValueError as exc:
                raise MetricError(f"{path}: line {lineno}: {exc}") from exc
    return reports
