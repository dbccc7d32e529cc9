"""Embedding providers and cosine similarity.

The default provider hashes character n-grams into a fixed-dimension unit
vector. It is bit-deterministic across runs and platforms and needs no model
files, which makes mining reproducible out of the box. Real sentence
embeddings can be plugged in through the file provider (vectors computed
offline) or the remote provider (an HTTP embedding endpoint).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

EMBED_URL_ENV = "PARA_EMBED_URL"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1
_SIGN_BIT = 1 << 63

_BOUNDARY = "§"
_NGRAM_SIZES = (3, 4, 5)


class EmbeddingError(Exception):
    """Base class for embedding failures."""


class DimensionMismatchError(EmbeddingError):
    pass


class UnknownKeyError(EmbeddingError):
    """A file-backed provider has no vector for the requested key."""


class RemoteEmbeddingError(EmbeddingError):
    """Transport-level failure talking to a remote embedder; safe to retry."""

    retryable = True


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class HashedNgramEmbedder:
    """Deterministic embedder over character 3-, 4- and 5-grams.

    The lowercased text is wrapped in '§' boundary markers; every n-gram is
    FNV-1a-hashed into one of `dimension` signed buckets and the result is
    L2-normalized. Empty text maps to the zero vector.
    """

    kind = "fallback"

    def __init__(self, dimension: int = 512):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension

    def embed_sentence(self, text: str, key: str | None = None) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        wrapped = _BOUNDARY + text.lower() + _BOUNDARY
        for n in _NGRAM_SIZES:
            for i in range(len(wrapped) - n + 1):
                h = fnv1a64(wrapped[i : i + n].encode("utf-8"))
                vec[h % self.dimension] += -1.0 if h & _SIGN_BIT else 1.0
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            return vec
        return vec / norm

    def embed_tokens(self, tokens: list[str]) -> list[np.ndarray]:
        return [self.embed_sentence(t) for t in tokens]


class FileEmbedder:
    """Vectors read from a file: header line 'D=<dim>', then one
    '<key>\\t<comma-separated floats>' line per entry. Keys are sentence ids
    (or token texts for token lookups).
    """

    kind = "file"

    def __init__(self, path: str | Path):
        self._path = str(path)
        self._vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("D=") or not header[2:].isdigit():
                raise EmbeddingError(
                    f"{path}: expected header 'D=<dim>', got {header!r}"
                )
            self.dimension = int(header[2:])
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                key, sep, raw = line.rstrip("\n").partition("\t")
                if not sep:
                    raise EmbeddingError(f"{path}: line {lineno}: missing tab")
                try:
                    vec = np.array([float(x) for x in raw.split(",")], dtype=np.float64)
                except ValueError as exc:
                    raise EmbeddingError(
                        f"{path}: line {lineno}: bad float: {exc}"
                    ) from exc
                if vec.shape[0] != self.dimension:
                    raise EmbeddingError(
                        f"{path}: line {lineno}: expected {self.dimension} "
                        f"values, got {vec.shape[0]}"
                    )
                self._vectors[key] = vec

    def embed_sentence(self, text: str, key: str | None = None) -> np.ndarray:
        lookup = key if key is not None else text
        try:
            return self._vectors[lookup]
        except KeyError:
            raise UnknownKeyError(
                f"{self._path}: no vector for {lookup!r}"
            ) from None

    def embed_tokens(self, tokens: list[str]) -> list[np.ndarray]:
        return [self.embed_sentence(t) for t in tokens]


class RemoteEmbedder:
    """HTTP embedding endpoint: POST {"texts": [...]} -> {"vectors": [[...]]}.

    Responses are order-preserving. Transport failures and non-200 responses
    raise RemoteEmbeddingError (retryable); malformed payloads raise
    EmbeddingError (not retryable). At most `max_in_flight` requests run
    concurrently.
    """

    kind = "remote"

    def __init__(
        self,
        endpoint: str,
        *,
        batch_size: int = 64,
        max_in_flight: int = 4,
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self._session = session if session is not None else requests.Session()

    def _post(self, texts: list[str]) -> list[np.ndarray]:
        try:
            resp = self._session.post(
                self.endpoint, json={"texts": texts}, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise RemoteEmbeddingError(
                f"embedding endpoint unreachable: {exc}"
            ) from exc
        if resp.status_code != 200:
            raise RemoteEmbeddingError(
                f"embedding endpoint returned HTTP {resp.status_code}"
            )
        try:
            vectors = resp.json()["vectors"]
        except (ValueError, KeyError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(texts):
            raise EmbeddingError(
                f"embedding endpoint returned {len(vectors)} vectors "
                f"for {len(texts)} texts"
            )
        return [np.asarray(v, dtype=np.float64) for v in vectors]

    def embed_many(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            return []
        chunks = [
            texts[i : i + self.batch_size]
            for i in range(0, len(texts), self.batch_size)
        ]
        if len(chunks) == 1:
            return self._post(chunks[0])
        workers = min(self.max_in_flight, len(chunks))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(self._post, chunks))
        return [vec for chunk in results for vec in chunk]

    def embed_sentence(self, text: str, key: str | None = None) -> np.ndarray:
        return self._post([text])[0]

    def embed_tokens(self, tokens: list[str]) -> list[np.ndarray]:
        return self.embed_many(list(tokens))


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    kind: str = "fallback"
    dimension: int = 512
    file_path: str | None = None
    endpoint: str | None = None


def make_provider(cfg: EmbeddingProviderConfig):
    """Build a provider from config; the remote endpoint falls back to the
    PARA_EMBED_URL environment variable."""
    if cfg.kind == "fallback":
        return HashedNgramEmbedder(cfg.dimension)
    if cfg.kind == "file":
        if not cfg.file_path:
            raise EmbeddingError("file provider requires file_path")
        return FileEmbedder(cfg.file_path)
    if cfg.kind == "remote":
        endpoint = cfg.endpoint or os.environ.get(EMBED_URL_ENV)
        if not endpoint:
            raise EmbeddingError(
                f"remote provider requires an endpoint ({EMBED_URL_ENV})"
            )
        return RemoteEmbedder(endpoint)
    raise EmbeddingError(f"unknown provider kind {cfg.kind!r}")


def cosine(u, v) -> float:
    """Cosine similarity in [-1, 1]; 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}"
        )
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c
