"""Article ingestion and corpus-level filtering.

Articles arrive as JSON Lines. Filtering keeps articles from one country,
drops articles from thin sources, strips boilerplate lines (bylines, contact
blocks, calls to action, ads), normalizes whitespace and rejects articles
that are too short or do not end in final punctuation.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class CorpusError(ValueError):
    """Malformed corpus input or invalid filter configuration."""


_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")
_REQUIRED_FIELDS = ("id", "url", "source", "country", "text")


@dataclass(frozen=True)
class Article:
    """One corpus document with publisher and country metadata."""

    id: str
    url: str
    source: str
    country: str
    text: str


@dataclass(frozen=True)
class CorpusFilterConfig:
    """Thresholds for the article-level filters.

    The defaults keep German articles from sources with at least 1000
    articles, whose stripped text has at least 700 characters and ends
    with '!', '?' or '.'. An article with exactly 700 characters or from
    a source with exactly 1000 articles is kept.
    """

    country: str = "DE"
    min_source_articles: int = 1000
    min_chars: int = 700
    final_punctuation: frozenset[str] = frozenset({"!", "?", "."})

    def __post_init__(self) -> None:
        if self.min_source_articles < 1:
            raise CorpusError("min_source_articles must be >= 1")
        if self.min_chars < 0:
            raise CorpusError("min_chars must be >= 0")


def load_articles(path: str | Path) -> list[Article]:
    """Read articles from a JSON Lines file, one object per line.

    Duplicate ids and malformed lines are rejected with the offending line
    number(s). Unknown fields are ignored; blank lines are skipped.
    """
    articles: list[Article] = []
    seen: dict[str, int] = {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{path}: not valid UTF-8 ({exc.reason})") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(
                f"{path}: line {lineno}: invalid JSON ({exc.msg})"
            ) from exc
        if not isinstance(obj, dict):
            raise CorpusError(f"{path}: line {lineno}: expected a JSON object")
        missing = [f for f in _REQUIRED_FIELDS if f not in obj]
        if missing:
            raise CorpusError(
                f"{path}: line {lineno}: missing field(s) {', '.join(missing)}"
            )
        article = Article(
            id=str(obj["id"]),
            url=str(obj["url"]),
            source=str(obj["source"]),
            country=str(obj["country"]),
            text=str(obj["text"]),
        )
        if not article.id:
            raise CorpusError(f"{path}: line {lineno}: empty article id")
        if not _COUNTRY_RE.match(article.country):
            raise CorpusError(
                f"{path}: line {lineno}: country must be two uppercase "
                f"letters, got {article.country!r}"
            )
        if article.id in seen:
            raise CorpusError(
                f"{path}: duplicate article id {article.id!r} on lines "
                f"{seen[article.id]} and {lineno}"
            )
        seen[article.id] = lineno
        articles.append(article)
    return articles


def filter_by_country(
    articles: list[Article], cfg: CorpusFilterConfig
) -> list[Article]:
    """Keep articles whose country field matches cfg.country, in order.

    An empty cfg.country disables the filter.
    """
    if not cfg.country:
        return list(articles)
    return [a for a in articles if a.country == cfg.country]


def filter_min_source_articles(
    articles: list[Article], cfg: CorpusFilterConfig
) -> list[Article]:
    """Keep articles whose source contributes >= cfg.min_source_articles
    articles to the input, in order. Counting happens over the given list,
    so apply the country filter first to reproduce the default pipeline.
    """
    counts = Counter(a.source for a in articles)
    return [a for a in articles if counts[a.source] >= cfg.min_source_articles]


def filter_article_shape(article: Article, cfg: CorpusFilterConfig) -> bool:
    """True when the trimmed text has at least cfg.min_chars characters
    (Unicode code points) and its last character is final punctuation.
    """
    text = article.text.strip()
    return (
        bool(text)
        and len(text) >= cfg.min_chars
        and text[-1] in cfg.final_punctuation
    )


PATTERN_CATEGORIES = frozenset({"byline", "contact", "call-to-action", "advertisement"})


@dataclass(frozen=True)
class BoilerplatePattern:
    category: str
    regex: re.Pattern[str]


def parse_patterns(lines: list[str], origin: str = "<patterns>") -> list[BoilerplatePattern]:
    """Parse `<category>\\t<regex>` lines; '#' starts a comment line.

    Invalid patterns fail here, at load time, never mid-run.
    """
    patterns: list[BoilerplatePattern] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        category, sep, raw = line.partition("\t")
        if not sep or not raw:
            raise CorpusError(
                f"{origin}: line {lineno}: expected '<category>\\t<regex>'"
            )
        if category not in PATTERN_CATEGORIES:
            raise CorpusError(
                f"{origin}: line {lineno}: unknown category {category!r} "
                f"(expected one of {sorted(PATTERN_CATEGORIES)})"
            )
        try:
            regex = re.compile(raw)
        except re.error as exc:
            raise CorpusError(
                f"{origin}: line {lineno}: invalid pattern: {exc}"
            ) from exc
        patterns.append(BoilerplatePattern(category, regex))
    return patterns


def load_patterns(path: str | Path) -> list[BoilerplatePattern]:
    """Load boilerplate patterns from a file."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_patterns(text.splitlines(), origin=str(path))


def default_patterns() -> list[BoilerplatePattern]:
    """The bundled default pattern file (bylines, agency credits, contact
    lines, newsletter calls to action, ad markers). Users can extend or
    replace it; the patterns are data, not code.
    """
    text = resources.files("paramine").joinpath("data/boilerplate_patterns.tsv").read_text("utf-8")
    return parse_patterns(text.splitlines(), origin="boilerplate_patterns.tsv")


def strip_boilerplate(text: str, patterns: list[BoilerplatePattern]) -> str:
    """Drop every line matched by any pattern; a matched line is removed whole.

    Idempotent: stripping cannot produce new matching lines.
    """
    kept = [
        line
        for line in text.splitlines()
        if not any(p.regex.search(line) for p in patterns)
    ]
    return "\n".join(kept)


_WS_RUN = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """NFC-normalize, collapse whitespace runs (including newlines) to single
    spaces and trim. Idempotent; the output never contains tabs.
    """
    return _WS_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip()
