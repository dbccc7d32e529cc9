"""Command-line pipeline: ingest -> mine -> score -> serve / report.

Every stage reads and writes files, so each one can be re-run and tested in
isolation. Exit codes: 0 success, 1 partial metric failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__, corpus, metrics, miner, review, sentsplit
from .embed import EMBED_URL_ENV, EmbeddingError, EmbeddingProviderConfig, make_provider
from .filters import FilterError, compile_filter
from .report import ReportError, build_report, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


class ConfigurationError(Exception):
    pass


def _add_embedder_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--embedder",
        choices=("fallback", "file", "remote"),
        default="fallback",
        help="embedding provider (remote reads %s)" % EMBED_URL_ENV,
    )
    parser.add_argument("--embed-file", help="vector file for --embedder file")
    parser.add_argument(
        "--dimension", type=int, default=512, help="fallback embedder dimension"
    )


def _build_embedder(args: argparse.Namespace):
    cfg = EmbeddingProviderConfig(
        kind=args.embedder,
        dimension=args.dimension,
        file_path=args.embed_file,
        endpoint=os.environ.get(EMBED_URL_ENV),
    )
    try:
        return make_provider(cfg)
    except EmbeddingError as exc:
        raise ConfigurationError(str(exc)) from exc


def _parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigurationError(f"--bind expects host:port, got {bind!r}")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramine",
        description="Mine and evaluate paraphrase candidate pairs from German news corpora.",
    )
    parser.add_argument("--version", action="version", version=f"paramine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser(
        "ingest", help="filter a JSONL article corpus and split it into sentences"
    )
    p_ingest.add_argument("corpus", help="input articles, one JSON object per line")
    p_ingest.add_argument("-o", "--output", required=True, help="sentences JSONL")
    p_ingest.add_argument("--country", default="DE", help="keep this country only (empty disables)")
    p_ingest.add_argument("--min-source-articles", type=int, default=1000)
    p_ingest.add_argument("--min-chars", type=int, default=700)
    p_ingest.add_argument("--patterns", help="boilerplate pattern file (default: bundled)")
    p_ingest.add_argument("--abbreviations", help="abbreviation list (default: bundled)")

    p_mine = sub.add_parser("mine", help="mine candidate pairs above the cosine threshold")
    p_mine.add_argument("sentences", help="sentences JSONL from ingest")
    p_mine.add_argument("-o", "--output", required=True, help="pairs JSONL")
    p_mine.add_argument("--threshold", type=float, default=0.935)
    p_mine.add_argument("--min-tokens", type=int, default=3)
    p_mine.add_argument(
        "--include-same-article",
        action="store_true",
        help="also pair sentences from the same article",
    )
    p_mine.add_argument("--block-size", type=int, help="mine block-by-block (same output)")
    _add_embedder_args(p_mine)

    p_score = sub.add_parser("score", help="compute the automated metric suite per pair")
    p_score.add_argument("pairs", help="pairs JSONL from mine")
    p_score.add_argument("-o", "--output", required=True, help="metrics TSV")
    p_score.add_argument(
        "--checker",
        choices=("stub", "remote", "off"),
        default="off",
        help="grammar checker: stub (always clean), remote (%s), off (gs column empty)" % metrics.LT_URL_ENV,
    )
    p_score.add_argument("--fcs-mode", choices=("strict", "jaccard"), default="strict")
    p_score.add_argument("--rn-mode", choices=("lcs", "contiguous"), default="lcs")
    p_score.add_argument("--gazetteer", help="entity surface list for fact extraction")
    p_score.add_argument(
        "--ner",
        choices=("off", "remote"),
        default="off",
        help="NER entity source (remote reads %s)" % metrics.NER_URL_ENV,
    )
    _add_embedder_args(p_score)

    p_serve = sub.add_parser("serve", help="run the review service (and UI, if built)")
    p_serve.add_argument("--pairs", required=True, help="pairs JSONL")
    p_serve.add_argument("--log", required=True, help="ratings JSONL log (created if missing)")
    p_serve.add_argument("--metrics", help="metrics TSV for /api/report.tsv")
    p_serve.add_argument(
        "--filter",
        help="serve only pairs whose metrics pass, e.g. 'r2 < 0.8 and fcs == 1'",
    )
    p_serve.add_argument("--bind", default="127.0.0.1:8765", help="host:port")
    p_serve.add_argument("--ui", help="static UI directory to mount at /")

    p_report = sub.add_parser("report", help="join metrics with human aggregates")
    p_report.add_argument("metrics", help="metrics TSV from score")
    p_report.add_argument("ratings", help="ratings JSONL log")
    p_report.add_argument("--pairs", required=True, help="pairs JSONL (for sentence texts)")
    p_report.add_argument("-o", "--output", required=True, help="combined report TSV")

    return parser


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = corpus.CorpusFilterConfig(
        country=args.country,
        min_source_articles=args.min_source_articles,
        min_chars=args.min_chars,
    )
    patterns = (
        corpus.load_patterns(args.patterns)
        if args.patterns
        else corpus.default_patterns()
    )
    abbreviations = (
        sentsplit.load_abbreviations(args.abbreviations) if args.abbreviations else None
    )
    articles = corpus.load_articles(args.corpus)
    by_country = corpus.filter_by_country(articles, cfg)
    by_source = corpus.filter_min_source_articles(by_country, cfg)

    kept: list[corpus.Article] = []
    for article in by_source:
        cleaned = corpus.normalize_text(
            corpus.strip_boilerplate(article.text, patterns)
        )
        candidate = corpus.Article(
            id=article.id,
            url=article.url,
            source=article.source,
            country=article.country,
            text=cleaned,
        )
        if corpus.filter_article_shape(candidate, cfg):
            kept.append(candidate)

    sentences: list[sentsplit.Sentence] = []
    for article in kept:
        sentences.extend(sentsplit.split_sentences(article, abbreviations))
    miner.write_sentences(sentences, args.output)

    print(f"articles_in={len(articles)}")
    print(f"dropped_country={len(articles) - len(by_country)}")
    print(f"dropped_source={len(by_country) - len(by_source)}")
    print(f"dropped_shape={len(by_source) - len(kept)}")
    print(f"articles_out={len(kept)}")
    print(f"sentences={len(sentences)}")
    return EXIT_OK


def cmd_mine(args: argparse.Namespace) -> int:
    provider = _build_embedder(args)
    cfg = miner.MinerConfig(
        threshold=args.threshold,
        exclude_same_article=not args.include_same_article,
        min_tokens=args.min_tokens,
    )
    sentences = miner.load_sentences(args.sentences)
    if args.block_size is not None:
        pairs = miner.mine_pairs_blocked(sentences, provider, cfg, args.block_size)
    else:
        pairs = miner.mine_pairs(sentences, provider, cfg)
    miner.write_pairs(pairs, args.output)
    print(f"sentences={len(sentences)}")
    print(f"pairs={len(pairs)}")
    return EXIT_OK


def _build_suite(args: argparse.Namespace) -> metrics.MetricSuite:
    embedder = _build_embedder(args)
    checker = None
    if args.checker == "stub":
        checker = metrics.StubChecker(0)
    elif args.checker == "remote":
        lt_url = os.environ.get(metrics.LT_URL_ENV)
        if not lt_url:
            raise ConfigurationError(f"--checker remote requires {metrics.LT_URL_ENV}")
        checker = metrics.LanguageToolChecker(lt_url)
    ner = None
    if args.ner == "remote":
        ner_url = os.environ.get(metrics.NER_URL_ENV)
        if not ner_url:
            raise ConfigurationError(f"--ner remote requires {metrics.NER_URL_ENV}")
        ner = metrics.NerClient(ner_url)
    gazetteer = metrics.load_gazetteer(args.gazetteer) if args.gazetteer else None
    return metrics.MetricSuite(
        embedder=embedder,
        checker=checker,
        gazetteer=gazetteer,
        ner=ner,
        fcs_mode=args.fcs_mode,
        rn_mode=args.rn_mode,
    )


def cmd_score(args: argparse.Namespace) -> int:
    suite = _build_suite(args)
    pairs = miner.load_pairs(args.pairs)
    reports: list[metrics.MetricReport] = []
    failed = 0
    for pair in pairs:
        try:
            reports.append(metrics.score_pair(pair, suite))
        except metrics.MetricError as exc:
            failed += 1
            logger.error("%s", exc)
    metrics.write_metrics(reports, args.output)
    print(f"pairs={len(pairs)}")
    print(f"scored={len(reports)}")
    print(f"failed={failed}")
    return EXIT_PARTIAL if failed else EXIT_OK


def _filtered_pairs(pairs, metric_rows, expression):
    predicate = compile_filter(expression)
    by_id = {m.pair_id: m for m in metric_rows}
    kept = []
    for pair in pairs:
        m = by_id.get(pair.pair_id)
        if m is None:
            continue
        row = {
            "fcs": m.fcs, "gs": m.gs, "r1": m.r1, "r2": m.r2,
            "rn": m.rn, "bs": m.bs, "cosine": pair.cosine,
        }
        if predicate(row):
            kept.append(pair)
    return kept


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    all_pairs = miner.load_pairs(args.pairs)
    metric_rows = metrics.load_metrics(args.metrics) if args.metrics else None
    pairs = all_pairs
    if args.filter:
        if metric_rows is None:
            raise ConfigurationError("--filter requires --metrics")
        pairs = _filtered_pairs(all_pairs, metric_rows, args.filter)
    store = review.RatingStore(args.log, [p.pair_id for p in pairs])
    app = create_app(
        pairs, store, metrics=metric_rows, ui_dir=args.ui, report_pairs=all_pairs
    )
    host, port = _parse_bind(args.bind)
    print(f"serving {len(pairs)} pairs on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    metric_rows = metrics.load_metrics(args.metrics)
    pairs = miner.load_pairs(args.pairs)
    store = review.RatingStore(args.ratings, [p.pair_id for p in pairs])
    rows = build_report(metric_rows, pairs, store)
    write_report(rows, args.output)
    print(f"rows={len(rows)}")
    return EXIT_OK


_HANDLERS = {
    "ingest": cmd_ingest,
    "mine": cmd_mine,
    "score": cmd_score,
    "serve": cmd_serve,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (
        ConfigurationError,
        corpus.CorpusError,
        miner.MiningError,
        metrics.MetricError,
        ReportError,
        FilterError,
        EmbeddingError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
