"""HTTP API for the human review round.

Stateless by design: the reviewer id travels in each request and every
durable fact lives in the ratings log, so restarting the service on the same
log reproduces identical pair sequences and progress. Reviewers receive the
pairs in a deterministic per-reviewer shuffle so ordering effects decorrelate
across reviewers. Automated scores are never exposed to reviewers while
rating (blind review).
"""

from __future__ import annotations

import hashlib

from fastapi import FastAPI, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .metrics import MetricReport
from .miner import PairRecord
from .report import build_report, render_report
from .review import RatingError, RatingStore, ReviewerRating, utcnow


class RatingSubmission(BaseModel):
    model_config = ConfigDict(extra="forbid")

    reviewer: str
    pair_id: str
    ld: int
    cs: int
    oq: int


def reviewer_order(reviewer_id: str, pair_ids) -> list[str]:
    """Deterministic per-reviewer shuffle: pairs sorted by a hash keyed on
    the reviewer id. Stable across restarts and platforms."""

    def key(pair_id: str) -> bytes:
        return hashlib.sha256(f"{reviewer_id}\x1f{pair_id}".encode("utf-8")).digest()

    return sorted(pair_ids, key=key)


def create_app(
    pairs: list[PairRecord],
    store: RatingStore,
    metrics: list[MetricReport] | None = None,
    ui_dir: str | None = None,
    report_pairs: list[PairRecord] | None = None,
) -> FastAPI:
    """Wire the review API over a candidate set, a ratings store and,
    optionally, precomputed metrics (for /api/report.tsv) and a static UI
    directory mounted at the root path.

    `pairs` is what reviewers see; `report_pairs` (default: the same list)
    supplies texts for the report join and must cover every metrics row,
    even when reviewers only see a filtered subset.
    """
    app = FastAPI(title="paramine review service", docs_url=None, redoc_url=None)
    by_id = {p.pair_id: p for p in pairs}
    pair_ids = sorted(by_id)
    join_pairs = pairs if report_pairs is None else report_pairs

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        errors = exc.errors()
        field = "request"
        if errors and errors[0].get("loc"):
            field = str(errors[0]["loc"][-1])
        message = errors[0].get("msg", "invalid request") if errors else "invalid request"
        return JSONResponse({"error": message, "field": field}, status_code=400)

    @app.get("/api/pairs/next")
    def next_pair(reviewer: str):
        rated = store.rated_pair_ids(reviewer)
        for pair_id in reviewer_order(reviewer, pair_ids):
            if pair_id not in rated:
                pair = by_id[pair_id]
                return {"pair_id": pair.pair_id, "src": pair.src, "para": pair.para}
        return Response(status_code=204)

    @app.post("/api/ratings", status_code=201)
    def submit_rating(submission: RatingSubmission):
        rating = ReviewerRating(
            reviewer_id=submission.reviewer,
            pair_id=submission.pair_id,
            ld=submission.ld,
            cs=submission.cs,
            oq=submission.oq,
            timestamp=utcnow(),
        )
        try:
            store.record(rating)
        except RatingError as exc:
            return JSONResponse(
                {"error": str(exc), "field": exc.field}, status_code=400
            )
        return {"status": "recorded", "pair_id": submission.pair_id}

    @app.get("/api/progress")
    def progress():
        total = len(pair_ids)
        reviewers = {}
        for reviewer_id in sorted(store.reviewers()):
            rated = len(store.rated_pair_ids(reviewer_id))
            reviewers[reviewer_id] = {"rated": rated, "remaining": total - rated}
        return {"total_pairs": total, "reviewers": reviewers}

    @app.get("/api/report.tsv")
    def report_tsv():
        rows = build_report(metrics or [], join_pairs, store)
        return PlainTextResponse(
            render_report(rows), media_type="text/tab-separated-values"
        )

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
