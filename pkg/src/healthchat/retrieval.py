"""Exact top-k cosine retrieval over embedded documents.

Corpora here top out at a few thousand documents, so the index is a plain
normalized matrix and every query is a vectorized full scan. That keeps
results exact (oracle-testable) and the hot path is one matrix-vector
product over vectors normalized once at build time.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import EmbeddingProvider
from .errors import SnapshotError, ValidationError
from .snapshots import read_snapshot, write_snapshot


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float
    rank: int  # 1-based, consecutive


class DocIndex:
    """Immutable embedded-document index bound to one embedding provider."""

    def __init__(
        self,
        doc_ids: Sequence[str],
        texts: Sequence[str],
        matrix: np.ndarray,
        provider: EmbeddingProvider,
        payloads: Sequence[str | None] | None = None,
    ):
        self.doc_ids = list(doc_ids)
        self.texts = list(texts)
        self.payloads = list(payloads) if payloads is not None else [None] * len(self.doc_ids)
        self._matrix = matrix
        self.provider = provider
        self.provider_name = provider.name
        self.dim = provider.dim
        self._id_to_pos = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    def __len__(self) -> int:
        return len(self.doc_ids)

    def text_of(self, doc_id: str) -> str:
        return self.texts[self._id_to_pos[doc_id]]

    def payload_of(self, doc_id: str) -> str | None:
        return self.payloads[self._id_to_pos[doc_id]]

    def vector_of(self, doc_id: str) -> np.ndarray:
        return self._matrix[self._id_to_pos[doc_id]]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._id_to_pos


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValidationError("zero-norm embedding in index build")
    return matrix / norms


def build_index(
    docs: Iterable[tuple[str, str]] | Iterable[tuple[str, str, str | None]],
    provider: EmbeddingProvider,
) -> DocIndex:
    """Embed all docs and build an immutable index.

    Accepts (id, text) or (id, text, payload) tuples. Any embedding failure
    aborts the whole build; no partial index is ever returned.
    """
    doc_ids: list[str] = []
    texts: list[str] = []
    payloads: list[str | None] = []
    seen: set[str] = set()
    for doc in docs:
        doc_id, text = doc[0], doc[1]
        payload = doc[2] if len(doc) > 2 else None
        if doc_id in seen:
            raise ValidationError(f"duplicate doc id '{doc_id}'")
        seen.add(doc_id)
        doc_ids.append(doc_id)
        texts.append(text)
        payloads.append(payload)
    if not doc_ids:
        raise ValidationError("cannot build an index over an empty doc list")
    matrix = _normalize_rows(provider.embed_batch(texts))
    return DocIndex(doc_ids, texts, matrix, provider, payloads)


def top_k(
    index: DocIndex,
    query: str,
    k: int,
    allowed_ids: set[str] | None = None,
) -> list[ScoredDoc]:
    """Top-k docs by descending cosine to the query, ties by ascending doc_id.

    With allowed_ids, ranking is restricted to that subset. Results are
    capped at the number of candidate docs.
    """
    if not query.strip():
        raise ValidationError("empty query")
    if k < 1:
        raise ValidationError("k must be >= 1")
    query_vec = index.provider.embed(query)
    query_vec = query_vec / np.linalg.norm(query_vec)
    scores = index._matrix @ query_vec
    candidates = range(len(index.doc_ids))
    if allowed_ids is not None:
        candidates = [i for i in candidates if index.doc_ids[i] in allowed_ids]
    order = sorted(candidates, key=lambda i: (-scores[i], index.doc_ids[i]))
    result = []
    for rank, i in enumerate(order[:k], start=1):
        score = max(-1.0, min(1.0, float(scores[i])))
        result.append(ScoredDoc(doc_id=index.doc_ids[i], score=score, rank=rank))
    return result


def save_index(index: DocIndex, path: str | Path) -> None:
    """Persist the index as a versioned JSON snapshot."""
    write_snapshot(
        path,
        "doc_index",
        {
            "provider_name": index.provider_name,
            "dim": index.dim,
            "doc_ids": index.doc_ids,
            "texts": index.texts,
            "payloads": index.payloads,
            "vectors": index._matrix.tolist(),
        },
    )


def load_index(path: str | Path, provider: EmbeddingProvider) -> DocIndex:
    """Load a snapshot, refusing a provider different from the build-time one."""
    doc = read_snapshot(path, "doc_index")
    if doc["provider_name"] != provider.name or doc["dim"] != provider.dim:
        raise SnapshotError(
            f"index {path} was built with provider "
            f"{doc['provider_name']!r} (dim={doc['dim']}), got "
            f"{provider.name!r} (dim={provider.dim})"
        )
    matrix = np.asarray(doc["vectors"], dtype=np.float64)
    return DocIndex(doc["doc_ids"], doc["texts"], matrix, provider, doc["payloads"])
