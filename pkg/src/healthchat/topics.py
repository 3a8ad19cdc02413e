"""Topic clustering of conversation questions and the fixed switch taxonomy.

The clustering backend is a seeded spherical k-means over the embedding
space. The centroid_outlier backend adds an outlier rule afterwards: any
question whose cosine to its nearest centroid falls below the threshold is
assigned the outlier id -1 and gets no in-topic retrieval context. The
kmeans backend runs the same clustering without the outlier step, so every
question keeps a topic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .embedding import EmbeddingProvider
from .errors import SnapshotError, ValidationError
from .llm import CompletionRequest, LLMError, LLMGateway, Message
from .retrieval import DocIndex, ScoredDoc, top_k
from .snapshots import read_snapshot, write_snapshot

if TYPE_CHECKING:
    from .chat import ChatSession

OUTLIER_TOPIC = -1
BACKENDS = ("centroid_outlier", "kmeans")
DEFAULT_OUTLIER_THRESHOLD = 0.15

# The sixteen switch topics, in their fixed display order.
SWITCH_TOPICS = (
    "Medical Definitions",
    "Medication Use",
    "Medical Decision-Making",
    "Colon Cancer Treatment",
    "Symptoms and Signs",
    "Misconceptions About Colonoscopy",
    "Family History Risks",
    "Cancer Prevention",
    "Dietary Focus",
    "Risk Factor Identification",
    "Pain Management",
    "Follow-Up Care",
    "Infection Prevention",
    "Dietary Preparation",
    "Colonoscopy Information",
    "Colon Cancer Screening Guidelines",
)

# Fallback keyword rules, walked in order; more specific topics come first
# so e.g. "diet before the colonoscopy" lands on Dietary Preparation rather
# than Dietary Focus. Used when the LLM reply is not a valid topic name or
# the LLM is unavailable.
DEFAULT_SWITCH_RULES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("Dietary Preparation", ("bowel prep", "diet before", "fasting", "preparation", "prep")),
    ("Colon Cancer Screening Guidelines", ("screening", "how often", "what age", "guideline")),
    ("Misconceptions About Colonoscopy", ("myth", "misconception", "really necessary", "rumor")),
    ("Family History Risks", ("family history", "hereditary", "genetic", "relative")),
    ("Infection Prevention", ("infection", "hygiene", "sterile", "disinfect")),
    ("Pain Management", ("painkiller", "pain relief", "manage pain", "analgesic", "sedation")),
    ("Follow-Up Care", ("follow-up", "after surgery", "recovery", "recheck", "aftercare")),
    ("Colonoscopy Information", ("colonoscopy", "endoscopy", "procedure", "scope")),
    ("Colon Cancer Treatment", ("treatment", "surgery", "chemotherapy", "radiation", "resection")),
    ("Medication Use", ("medication", "medicine", "drug", "pill", "dose")),
    ("Cancer Prevention", ("prevent", "reduce risk", "avoid cancer", "lower the risk")),
    ("Risk Factor Identification", ("risk factor", "smoking", "alcohol", "obesity", "cause")),
    ("Dietary Focus", ("diet", "food", "eat", "nutrition", "fiber")),
    ("Symptoms and Signs", ("symptom", "sign", "blood in", "pain", "bleeding")),
    ("Medical Decision-Making", ("should i", "decide", "option", "choose", "second opinion")),
    ("Medical Definitions", ("what is", "what does", "definition", "meaning", "stand for")),
)


@dataclass(frozen=True)
class SwitchTaxonomy:
    """The 16 switch topic names plus ordered keyword fallback rules."""

    topics: tuple[str, ...]
    rules: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if self.topics != SWITCH_TOPICS:
            raise ValidationError("switch taxonomy must list the 16 canonical topics in order")
        for topic, _ in self.rules:
            if topic not in self.topics:
                raise ValidationError(f"rule references unknown topic {topic!r}")


def default_taxonomy() -> SwitchTaxonomy:
    return SwitchTaxonomy(topics=SWITCH_TOPICS, rules=DEFAULT_SWITCH_RULES)


def load_taxonomy(path: str | Path) -> SwitchTaxonomy:
    """Load the taxonomy configuration (topic names restated, keyword rules)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    topics = tuple(doc["topics"])
    rules = tuple(
        (rule["topic"], tuple(rule["keywords"])) for rule in doc.get("rules", [])
    )
    return SwitchTaxonomy(topics=topics, rules=rules)


@dataclass
class TopicModel:
    """Fitted clustering over conversation questions."""

    backend: str
    k: int
    seed: int
    outlier_threshold: float
    centroids: np.ndarray  # (k, dim), rows L2-normalized
    assignments: dict[str, int]  # doc_id -> topic id, or -1 for outliers
    provider_name: str
    dim: int


def _kmeans_pp_init(matrix: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    """k-means++ seeding with cosine distance (1 - dot on normalized rows)."""
    n = matrix.shape[0]
    centroids = np.empty((k, matrix.shape[1]), dtype=np.float64)
    first = int(rng.randint(n))
    centroids[0] = matrix[first]
    closest = 1.0 - matrix @ centroids[0]
    for j in range(1, k):
        weights = np.clip(closest, 0.0, None)
        total = weights.sum()
        if total <= 0.0:
            pick = int(rng.randint(n))
        else:
            pick = int(rng.choice(n, p=weights / total))
        centroids[j] = matrix[pick]
        closest = np.minimum(closest, 1.0 - matrix @ centroids[j])
    return centroids


def _update_centroid(matrix: np.ndarray, members: np.ndarray) -> np.ndarray | None:
    mean = matrix[members].mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        return None
    return mean / norm


def fit_topics(
    questions: Sequence[tuple[str, str]],
    backend: str,
    k: int,
    seed: int,
    provider: EmbeddingProvider,
    outlier_threshold: float = DEFAULT_OUTLIER_THRESHOLD,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> TopicModel:
    """Seeded spherical k-means to convergence, then the backend's outlier rule.

    Runs to centroid shift < tol or max_iter sweeps, then performs a final
    assignment pass so stored assignments agree with the final centroids.
    """
    if backend not in BACKENDS:
        raise ValidationError(f"unknown backend {backend!r}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    if len(questions) < k:
        raise ValidationError(f"need at least k={k} questions, got {len(questions)}")
    doc_ids = [q[0] for q in questions]
    if len(set(doc_ids)) != len(doc_ids):
        raise ValidationError("duplicate question ids")
    texts = [q[1] for q in questions]

    matrix = provider.embed_batch(texts)
    matrix = matrix / np.linalg.norm(matrix, axis=1, keepdims=True)

    rng = np.random.RandomState(seed)
    centroids = _kmeans_pp_init(matrix, k, rng)

    for _ in range(max_iter):
        sims = matrix @ centroids.T
        assign = sims.argmax(axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            members = np.flatnonzero(assign == j)
            if members.size == 0:
                # Reseed an empty cluster from the point worst served by
                # the current centroids; deterministic pick.
                worst = int(sims.max(axis=1).argmin())
                new_centroids[j] = matrix[worst]
                continue
            updated = _update_centroid(matrix, members)
            if updated is not None:
                new_centroids[j] = updated
        shift = float(np.linalg.norm(new_centroids - centroids, axis=1).max())
        centroids = new_centroids
        if shift < tol:
            break

    # Final pass keeps stored assignments consistent with final centroids.
    sims = matrix @ centroids.T
    assign = sims.argmax(axis=1)
    best = sims.max(axis=1)

    assignments: dict[str, int] = {}
    for i, doc_id in enumerate(doc_ids):
        topic = int(assign[i])
        if backend == "centroid_outlier" and best[i] < outlier_threshold:
            topic = OUTLIER_TOPIC
        assignments[doc_id] = topic

    return TopicModel(
        backend=backend,
        k=k,
        seed=seed,
        outlier_threshold=outlier_threshold,
        centroids=centroids,
        assignments=assignments,
        provider_name=provider.name,
        dim=provider.dim,
    )


def assign_topic(model: TopicModel, question: str, provider: EmbeddingProvider) -> int:
    """Nearest centroid by cosine; -1 under centroid_outlier when too far."""
    if not question.strip():
        raise ValidationError("empty question")
    vec = provider.embed(question)
    vec = vec / np.linalg.norm(vec)
    sims = model.centroids @ vec
    topic = int(sims.argmax())
    if model.backend == "centroid_outlier" and float(sims[topic]) < model.outlier_threshold:
        return OUTLIER_TOPIC
    return topic


def in_topic_docs(
    model: TopicModel,
    topic: int,
    query: str,
    index: DocIndex,
    n: int = 10,
) -> list[ScoredDoc]:
    """Top-n retrieval restricted to the docs assigned to one topic."""
    if topic == OUTLIER_TOPIC:
        raise ValidationError("topic -1 is the outlier id; no in-topic retrieval exists")
    if not 0 <= topic < model.k:
        raise ValidationError(f"topic {topic} out of range [0, {model.k - 1}]")
    member_ids = {doc_id for doc_id, t in model.assignments.items() if t == topic}
    if not member_ids:
        return []
    return top_k(index, query, n, allowed_ids=member_ids)


_CLASSIFY_INSTRUCTIONS = (
    "You are classifying a health question into exactly one topic. "
    "Reply with the topic name only, copied exactly from this list:\n{topics}\n"
    "Recent conversation:\n{history}\n"
    "Question to classify: {query}"
)


def classify_switch_topic(
    query: str,
    history: "ChatSession | None",
    llm: LLMGateway | None,
    taxonomy: SwitchTaxonomy,
) -> str:
    """Classify a query into one of the 16 switch topics.

    Asks the LLM first; any reply that is not verbatim one of the 16 names,
    or any LLM failure, falls back to the keyword rules, and finally to the
    first taxonomy entry. Always returns a valid topic name.
    """
    if not query.strip():
        raise ValidationError("empty query")
    if llm is not None:
        history_text = ""
        if history is not None:
            history_text = "\n".join(
                f"{turn.role}: {turn.text}" for turn in history.history
            )
        prompt = _CLASSIFY_INSTRUCTIONS.format(
            topics="\n".join(taxonomy.topics), history=history_text, query=query
        )
        try:
            reply = llm.complete(
                CompletionRequest(messages=(Message("user", prompt),))
            ).strip()
            if reply in taxonomy.topics:
                return reply
        except LLMError:
            pass
    lowered = query.lower()
    for topic, keywords in taxonomy.rules:
        if any(keyword.lower() in lowered for keyword in keywords):
            return topic
    return taxonomy.topics[0]


def save_topic_model(model: TopicModel, path: str | Path) -> None:
    write_snapshot(
        path,
        "topic_model",
        {
            "backend": model.backend,
            "k": model.k,
            "seed": model.seed,
            "outlier_threshold": model.outlier_threshold,
            "centroids": model.centroids.tolist(),
            "assignments": model.assignments,
            "provider_name": model.provider_name,
            "dim": model.dim,
        },
    )


def load_topic_model(path: str | Path, provider: EmbeddingProvider) -> TopicModel:
    doc = read_snapshot(path, "topic_model")
    if doc["provider_name"] != provider.name or doc["dim"] != provider.dim:
        raise SnapshotError(
            f"topic model {path} was built with provider "
            f"{doc['provider_name']!r} (dim={doc['dim']}), got "
            f"{provider.name!r} (dim={provider.dim})"
        )
    return TopicModel(
        backend=doc["backend"],
        k=doc["k"],
        seed=doc["seed"],
        outlier_threshold=doc["outlier_threshold"],
        centroids=np.asarray(doc["centroids"], dtype=np.float64),
        assignments={k: int(v) for k, v in doc["assignments"].items()},
        provider_name=doc["provider_name"],
        dim=doc["dim"],
    )
