"""Paraphrase candidate mining and evaluation for German news corpora.

The pipeline runs in file-separated stages: ingest a JSONL article corpus
into sentences, mine near-duplicate sentence pairs by embedding cosine,
score each pair with automated metrics, collect human ratings through a
small HTTP service, and join everything into one report.
"""

__version__ = "0.1.0"
