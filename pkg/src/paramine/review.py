"""Reviewer ratings: durable append-only log, normalization and aggregation.

Reviewers rate three aspects of a pair from 1 (worst) to 5 (best):

* ld — how different the surface form of the paraphrase is
* cs — how close the semantic and pragmatic content is
* oq — overall paraphrase quality

Raw scores normalize as (raw - 1) / 4 and aggregate as the unweighted mean
over reviewers. A reviewer re-rating a pair supersedes their earlier rating.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

logger = logging.getLogger(__name__)

ASPECTS = ("ld", "cs", "oq")


class RatingError(ValueError):
    """Invalid rating; `field` names the offending field."""

    def __init__(self, message: str, field: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class ReviewerRating:
    reviewer_id: str
    pair_id: str
    ld: int
    cs: int
    oq: int
    timestamp: datetime


@dataclass(frozen=True)
class AggregatedRating:
    """Per-aspect mean of normalized ratings over distinct reviewers."""

    pair_id: str
    ld: float
    cs: float
    oq: float
    n_reviewers: int


def normalize_score(raw: int) -> float:
    """Map the 1-5 scale onto [0, 1]: 1 -> 0.0, 3 -> 0.5, 5 -> 1.0."""
    if raw not in (1, 2, 3, 4, 5):
        raise RatingError(f"score must be an integer in 1..5, got {raw!r}", "score")
    return (raw - 1) / 4


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _parse_ts(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def _format_ts(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


class RatingStore:
    """Append-only JSONL ratings log bound to a known candidate set.

    All durable state lives in the log; replaying it rebuilds identical
    aggregates. Writes serialize through one lock; reads see a consistent
    in-memory snapshot. Last write wins per (reviewer, pair), keyed by
    timestamp with log order as tiebreaker.
    """

    def __init__(self, log_path: str | Path, known_pair_ids):
        self._path = Path(log_path)
        self._known = frozenset(known_pair_ids)
        self._lock = threading.Lock()
        # (reviewer, pair) -> ((timestamp, seq), rating)
        self._effective: dict[tuple[str, str], tuple[tuple[datetime, int], ReviewerRating]] = {}
        self._seq = 0
        self._lines = 0
        if self._path.exists():
            self._replay()

    @property
    def path(self) -> Path:
        return self._path

    @property
    def line_count(self) -> int:
        return self._lines

    def _replay(self) -> None:
        with open(self._path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    rating = ReviewerRating(
                        reviewer_id=str(obj["reviewer"]),
                        pair_id=str(obj["pair_id"]),
                        ld=int(obj["ld"]),
                        cs=int(obj["cs"]),
                        oq=int(obj["oq"]),
                        timestamp=_parse_ts(str(obj["ts"])),
                    )
                    self._validate(rating)
                except (KeyError, ValueError, TypeError) as exc:
                    logger.warning(
                        "%s: line %d skipped (%s)", self._path, lineno, exc
                    )
                    continue
                self._lines += 1
                self._apply(rating)

    def _validate(self, rating: ReviewerRating) -> None:
        if not rating.reviewer_id:
            raise RatingError("reviewer id must be non-empty", "reviewer")
        if rating.pair_id not in self._known:
            raise RatingError(f"unknown pair_id {rating.pair_id!r}", "pair_id")
        for aspect in ASPECTS:
            value = getattr(rating, aspect)
            if not isinstance(value, int) or value < 1 or value > 5:
                raise RatingError(
                    f"{aspect} must be an integer in 1..5, got {value!r}", aspect
                )

    def _apply(self, rating: ReviewerRating) -> None:
        self._seq += 1
        key = (rating.reviewer_id, rating.pair_id)
        order = (rating.timestamp, self._seq)
        current = self._effective.get(key)
        if current is None or order >= current[0]:
            self._effective[key] = (order, rating)

    def record(self, rating: ReviewerRating) -> None:
        """Validate, append to the log, and update the effective snapshot."""
        self._validate(rating)
        line = json.dumps(
            {
                "reviewer": rating.reviewer_id,
                "pair_id": rating.pair_id,
                "ld": rating.ld,
                "cs": rating.cs,
                "oq": rating.oq,
                "ts": _format_ts(rating.timestamp),
            },
            ensure_ascii=False,
        )
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
            self._lines += 1
            self._apply(rating)

    def effective_ratings(self) -> list[ReviewerRating]:
        return [rating for _, rating in self._effective.values()]

    def reviewers(self) -> set[str]:
        return {reviewer for reviewer, _ in self._effective}

    def rated_pair_ids(self, reviewer_id: str) -> set[str]:
        return {
            pair for reviewer, pair in self._effective if reviewer == reviewer_id
        }

    def aggregate(self, pair_id: str) -> AggregatedRating | None:
        """Mean normalized rating per aspect, or None when unrated (distinct
        from an all-zero aggregate)."""
        ratings = [
            rating
            for (_, pair), (_, rating) in self._effective.items()
            if pair == pair_id
        ]
        if not ratings:
            return None
        n = len(ratings)
        return AggregatedRating(
            pair_id=pair_id,
            ld=sum(normalize_score(r.ld) for r in ratings) / n,
            cs=sum(normalize_score(r.cs) for r in ratings) / n,
            oq=sum(normalize_score(r.oq) for r in ratings) / n,
            n_reviewers=n,
        )

    def aggregates(self) -> dict[str, AggregatedRating]:
        by_pair: dict[str, list[ReviewerRating]] = {}
        for (_, pair), (_, rating) in self._effective.items():
            by_pair.setdefault(pair, []).append(rating)
        out: dict[str, AggregatedRating] = {}
        for pair, ratings in by_pair.items():
            n = len(ratings)
            out[pair] = AggregatedRating(
                pair_id=pair,
                ld=sum(normalize_score(r.ld) for r in ratings) / n,
                cs=sum(normalize_score(r.cs) for r in ratings) / n,
                oq=sum(normalize_score(r.oq) for r in ratings) / n,
                n_reviewers=n,
            )
        return out
