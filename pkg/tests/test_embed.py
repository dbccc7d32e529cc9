from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paramine.embed import (
    DimensionMismatchError,
    EmbeddingError,
    EmbeddingProviderConfig,
    FileEmbedder,
    HashedNgramEmbedder,
    RemoteEmbedder,
    RemoteEmbeddingError,
    UnknownKeyError,
    cosine,
    fnv1a64,
    make_provider,
)


def oracle_vector(text: str, dim: int) -> list[float]:
    """Independent reimplementation of the hashing scheme: explicit n-gram
    enumeration, textbook FNV-1a, pure-Python normalization."""
    s = "§" + text.lower() + "§"
    ngrams = []
    for n in (3, 4, 5):
        for i in range(len(s) - n + 1):
            ngrams.append(s[i : i + n])
    buckets = [0.0] * dim
    for gram in ngrams:
        h = 0xCBF29CE484222325
        for byte in gram.encode("utf-8"):
            h = ((h ^ byte) * 0x100000001B3) % 2**64
        sign = 1.0 if (h >> 63) == 0 else -1.0
        buckets[h % dim] += sign
    norm = math.sqrt(sum(x * x for x in buckets))
    if norm == 0.0:
        return buckets
    return [x / norm for x in buckets]


class TestHashedNgramEmbedder:
    def test_empty_text_is_zero_vector(self):
        vec = HashedNgramEmbedder(16).embed_sentence("")
        assert vec.shape == (16,)
        assert not vec.any()

    def test_abc_dim8_frozen(self):
        # Frozen from the oracle: "§abc§" has n-grams {§ab, abc, bc§, §abc,
        # abc§, §abc§}; two pairs collide into buckets 2..5 with these signs.
        vec = HashedNgramEmbedder(8).embed_sentence("abc")
        expected = [0.0, 0.0, -0.5, -0.5, 0.5, 0.5, 0.0, 0.0]
        assert vec.tolist() == expected

    @pytest.mark.parametrize("text", ["abc", "Die Polizei", "Straße", "ä", "40 Prozent"])
    @pytest.mark.parametrize("dim", [8, 64, 512])
    def test_matches_independent_oracle(self, text, dim):
        vec = HashedNgramEmbedder(dim).embed_sentence(text)
        assert np.allclose(vec, oracle_vector(text, dim), atol=1e-12)

    @given(st.text(min_size=1, max_size=60))
    @settings(max_examples=200)
    def test_unit_norm_for_nonempty(self, text):
        vec = HashedNgramEmbedder(64).embed_sentence(text)
        norm = float(np.linalg.norm(vec))
        # Sign cancellation to an all-zero vector is possible in principle
        # but must never produce a norm other than 0 or 1.
        assert norm == 0.0 or abs(norm - 1.0) <= 1e-9

    def test_deterministic(self):
        e = HashedNgramEmbedder(128)
        a = e.embed_sentence("Die Straße ist nass.")
        b = e.embed_sentence("Die Straße ist nass.")
        assert a.tolist() == b.tolist()

    def test_embed_tokens(self):
        e = HashedNgramEmbedder(32)
        assert e.embed_tokens([]) == []
        two = e.embed_tokens(["a", "a"])
        assert two[0].tolist() == two[1].tolist()
        assert e.embed_tokens(["polizei"])[0].tolist() == e.embed_sentence("polizei").tolist()

    def test_fnv1a64_reference_values(self):
        # Published FNV-1a test vectors.
        assert fnv1a64(b"") == 0xCBF29CE484222325
        assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
        assert fnv1a64(b"foobar") == 0x85944171F73967E8

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            HashedNgramEmbedder(0)


class TestCosine:
    def test_self_similarity(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_analytic_45_degrees(self):
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.7071067811865475, abs=1e-9)

    def test_zero_norm_returns_zero(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine([1.0], [1.0, 2.0])

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    )
    def test_symmetry_and_bounds(self, u, v):
        a = cosine(u, v)
        b = cosine(v, u)
        assert a == b
        assert -1.0 <= a <= 1.0


class TestFileEmbedder:
    def write_vectors(self, path, dim, rows):
        lines = [f"D={dim}"] + [f"{k}\t{','.join(str(x) for x in v)}" for k, v in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_lookup_by_key(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        self.write_vectors(p, 3, [("s1", [1, 0, 0]), ("s2", [0, 1, 0])])
        e = FileEmbedder(p)
        assert e.dimension == 3
        assert e.embed_sentence("whatever text", key="s1").tolist() == [1.0, 0.0, 0.0]

    def test_missing_key_names_id(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        self.write_vectors(p, 2, [("s1", [1, 0])])
        with pytest.raises(UnknownKeyError, match="s9"):
            FileEmbedder(p).embed_sentence("text", key="s9")

    def test_bad_header(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("dim 4\n", encoding="utf-8")
        with pytest.raises(EmbeddingError, match="header"):
            FileEmbedder(p)

    def test_wrong_width(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        self.write_vectors(p, 3, [("s1", [1, 0])])
        with pytest.raises(EmbeddingError, match="line 2"):
            FileEmbedder(p)


class FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self._responses = list(responses)
        self.calls = []

    def post(self, url, **kwargs):
        self.calls.append(kwargs)
        resp = self._responses.pop(0)
        if isinstance(resp, Exception):
            raise resp
        return resp


class TestRemoteEmbedder:
    def test_order_preserving(self):
        session = FakeSession([FakeResponse(payload={"vectors": [[1, 0], [0, 1]]})])
        e = RemoteEmbedder("http://x/embed", session=session)
        vecs = e.embed_tokens(["a", "b"])
        assert vecs[0].tolist() == [1.0, 0.0]
        assert vecs[1].tolist() == [0.0, 1.0]
        assert session.calls[0]["json"] == {"texts": ["a", "b"]}

    def test_non_200_is_retryable(self):
        session = FakeSession([FakeResponse(status_code=503)])
        e = RemoteEmbedder("http://x/embed", session=session)
        with pytest.raises(RemoteEmbeddingError) as exc_info:
            e.embed_sentence("hallo")
        assert exc_info.value.retryable

    def test_transport_failure_is_retryable(self):
        import requests

        session = FakeSession([requests.ConnectionError("refused")])
        e = RemoteEmbedder("http://x/embed", session=session)
        with pytest.raises(RemoteEmbeddingError):
            e.embed_sentence("hallo")

    def test_count_mismatch_is_data_error(self):
        session = FakeSession([FakeResponse(payload={"vectors": [[1, 0]]})])
        e = RemoteEmbedder("http://x/embed", session=session)
        with pytest.raises(EmbeddingError) as exc_info:
            e.embed_tokens(["a", "b"])
        assert not isinstance(exc_info.value, RemoteEmbeddingError)

    def test_batching(self):
        session = FakeSession(
            [
                FakeResponse(payload={"vectors": [[1.0], [2.0]]}),
                FakeResponse(payload={"vectors": [[3.0]]}),
            ]
        )
        e = RemoteEmbedder("http://x/embed", batch_size=2, max_in_flight=1, session=session)
        vecs = e.embed_many(["a", "b", "c"])
        assert [v.tolist() for v in vecs] == [[1.0], [2.0], [3.0]]


class TestProviderConfig:
    def test_fallback(self):
        p = make_provider(EmbeddingProviderConfig(kind="fallback", dimension=8))
        assert isinstance(p, HashedNgramEmbedder)
        assert p.dimension == 8

    def test_file_requires_path(self):
        with pytest.raises(EmbeddingError, match="file_path"):
            make_provider(EmbeddingProviderConfig(kind="file"))

    def test_remote_requires_endpoint(self, monkeypatch):
        monkeypatch.delenv("PARA_EMBED_URL", raising=False)
        with pytest.raises(EmbeddingError, match="PARA_EMBED_URL"):
            make_provider(EmbeddingProviderConfig(kind="remote"))

    def test_remote_from_env(self, monkeypatch):
        monkeypatch.setenv("PARA_EMBED_URL", "http://env-endpoint/embed")
        p = make_provider(EmbeddingProviderConfig(kind="remote"))
        assert isinstance(p, RemoteEmbedder)
        assert p.endpoint == "http://env-endpoint/embed"

    def test_unknown_kind(self):
        with pytest.raises(EmbeddingError, match="kind"):
            make_provider(EmbeddingProviderConfig(kind="magic"))
