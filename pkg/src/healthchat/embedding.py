"""Text embedding behind a provider seam, plus the cosine arithmetic.

Two providers: a remote HTTP provider for plugging in a real sentence
embedding service, and an offline fallback that hashes character 3-grams
into a fixed-dimension signed count vector. The fallback is a pure
function of the text bytes and the seed, so every test and build step
runs without network access and reproduces bit-identical vectors.
"""

from __future__ import annotations

import hashlib
import re
from typing import Sequence

import httpx
import numpy as np

from .errors import HealthchatError


class EmbeddingError(HealthchatError):
    """Embedding failed; the message names the provider."""


class EmbeddingProvider:
    """Deterministic text-to-vector mapping with a fixed output dimension."""

    name: str
    dim: int

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        """Embed many texts; rows align with the input order."""
        return np.stack([self.embed(t) for t in texts])


_NON_ALNUM = re.compile(r"[^a-z0-9]+")


class HashedNgramProvider(EmbeddingProvider):
    """Offline fallback: hashed character 3-gram counts with random signs.

    Each 3-gram of the normalized text is hashed (keyed by the seed) to a
    bucket and a sign; counts accumulate and the result is L2-normalized.
    Texts with no alphanumeric content have no features and raise.
    """

    def __init__(self, dim: int = 64, seed: int = 0, name: str = "hashed-ngram"):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self.name = name
        self._key = seed.to_bytes(8, "little", signed=True)

    def _features(self, text: str) -> list[str]:
        normalized = _NON_ALNUM.sub(" ", text.lower()).strip()
        normalized = " ".join(normalized.split())
        if not normalized:
            return []
        if len(normalized) < 3:
            return [normalized]
        return [normalized[i : i + 3] for i in range(len(normalized) - 2)]

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmbeddingError(f"{self.name}: cannot embed empty text")
        features = self._features(text)
        if not features:
            raise EmbeddingError(f"{self.name}: no embeddable features in {text!r}")
        vec = np.zeros(self.dim, dtype=np.float64)
        for gram in features:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8, key=self._key).digest()
            h = int.from_bytes(digest, "little")
            bucket = h % self.dim
            sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise EmbeddingError(f"{self.name}: features cancelled to a zero vector")
        return vec / norm


class RemoteEmbeddingProvider(EmbeddingProvider):
    """HTTP provider posting {"texts": [...]} and expecting {"vectors": [[...]]}."""

    def __init__(
        self,
        endpoint: str,
        dim: int,
        name: str = "remote",
        timeout: float = 10.0,
        client: httpx.Client | None = None,
    ):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.endpoint = endpoint
        self.dim = dim
        self.name = name
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        for text in texts:
            if not text.strip():
                raise EmbeddingError(f"{self.name}: cannot embed empty text")
        try:
            response = self._client.post(
                self.endpoint, json={"texts": list(texts)}, timeout=self.timeout
            )
            response.raise_for_status()
        except httpx.HTTPError as e:
            raise EmbeddingError(f"{self.name}: request failed: {e}") from e
        try:
            vectors = response.json()["vectors"]
        except (KeyError, ValueError) as e:
            raise EmbeddingError(f"{self.name}: malformed response") from e
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.shape != (len(texts), self.dim):
            raise EmbeddingError(
                f"{self.name}: expected shape {(len(texts), self.dim)}, got {matrix.shape}"
            )
        if not np.all(np.isfinite(matrix)):
            raise EmbeddingError(f"{self.name}: non-finite values in response")
        return matrix


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1], clamped against rounding."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise EmbeddingError("cosine undefined for zero-norm vectors")
    value = float(np.dot(a, b) / (norm_a * norm_b))
    return max(-1.0, min(1.0, value))
