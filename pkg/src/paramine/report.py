"""Combined report: automated metrics left-joined with human aggregates.

One row per metrics entry, ordered by pair id. Human columns stay empty
until at least one rating exists for the pair. TSV throughout; normalized
sentence text cannot contain tabs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .metrics import MetricReport
from .miner import PairRecord
from .review import RatingStore

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "pair_id", "src", "para",
    "fcs", "gs", "r1", "r2", "rn", "bs",
    "ld", "cs", "oq",
)


class ReportError(Exception):
    pass


@dataclass(frozen=True)
class CombinedRow:
    pair_id: str
    src: str
    para: str
    fcs: float
    gs: float | None
    r1: float
    r2: float
    rn: float
    bs: float
    ld: float | None
    cs: float | None
    oq: float | None


def build_report(
    metrics: list[MetricReport],
    pairs: list[PairRecord],
    store: RatingStore | None,
) -> list[CombinedRow]:
    """Left-join metrics with rating aggregates on pair id, sorted by pair id.

    Every metrics row appears exactly once; aggregates without a metrics row
    are logged and dropped.
    """
    texts = {p.pair_id: p for p in pairs}
    aggregates = store.aggregates() if store is not None else {}
    metric_ids = {m.pair_id for m in metrics}
    for pair_id in sorted(set(aggregates) - metric_ids):
        logger.warning("rating for pair %s has no metrics row; excluded", pair_id)
    rows: list[CombinedRow] = []
    for m in sorted(metrics, key=lambda m: m.pair_id):
        pair = texts.get(m.pair_id)
        if pair is None:
            raise ReportError(f"no pair texts for metrics row {m.pair_id}")
        agg = aggregates.get(m.pair_id)
        rows.append(
            CombinedRow(
                pair_id=m.pair_id,
                src=pair.src,
                para=pair.para,
                fcs=m.fcs,
                gs=m.gs,
                r1=m.r1,
                r2=m.r2,
                rn=m.rn,
                bs=m.bs,
                ld=agg.ld if agg else None,
                cs=agg.cs if agg else None,
                oq=agg.oq if agg else None,
            )
        )
    return rows


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def render_report(rows: list[CombinedRow]) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for r in rows:
        lines.append(
            "\t".join(
                (
                    r.pair_id, r.src, r.para,
                    _fmt(r.fcs), _fmt(r.gs), _fmt(r.r1), _fmt(r.r2),
                    _fmt(r.rn), _fmt(r.bs),
                    _fmt(r.ld), _fmt(r.cs), _fmt(r.oq),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_report(rows: list[CombinedRow], path: str | Path) -> None:
    Path(path).write_text(render_report(rows), encoding="utf-8")
