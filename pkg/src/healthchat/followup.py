"""Suggested follow-up questions via four selectable methods.

Three methods prompt the LLM (with or without in-topic retrieval context);
the fourth is pure retrieval over the disease-lookup corpus, keyed on the
diseases the latest query mentions. All four produce a FollowupSet of one
to four distinct questions or raise a typed error naming the method.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

from .corpus import QAPair
from .embedding import EmbeddingProvider, cosine
from .errors import HealthchatError, ValidationError
from .llm import CompletionRequest, LLMError, LLMGateway, Message
from .retrieval import DocIndex
from .topics import OUTLIER_TOPIC, TopicModel, assign_topic, in_topic_docs

if TYPE_CHECKING:
    from .chat import ChatSession

FOLLOWUP_CAP = 4
TOPIC_CONTEXT_SIZE = 10


class FollowupMethod(str, Enum):
    TOPIC_LLM = "topic_llm"
    KMEANS_LLM = "kmeans_llm"
    LLM_ONLY = "llm_only"
    RETRIEVAL_BASED = "retrieval_based"


# Which clustering backend each topic-grounded method expects.
_METHOD_BACKEND = {
    FollowupMethod.TOPIC_LLM: "centroid_outlier",
    FollowupMethod.KMEANS_LLM: "kmeans",
}


class FollowupError(HealthchatError):
    """Follow-up generation failed; the message names the method."""


@dataclass(frozen=True)
class FollowupSet:
    questions: tuple[str, ...]
    method: FollowupMethod
    context_doc_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not 1 <= len(self.questions) <= FOLLOWUP_CAP:
            raise ValidationError(
                f"a followup set holds 1-{FOLLOWUP_CAP} questions, got {len(self.questions)}"
            )
        trimmed = [q.strip() for q in self.questions]
        if len(set(trimmed)) != len(trimmed):
            raise ValidationError("followup questions must be pairwise distinct")


def load_template(name: str, template_dir: str | Path | None = None) -> str:
    """Read a prompt template, from an override directory or the packaged set."""
    if template_dir is not None:
        return (Path(template_dir) / name).read_text(encoding="utf-8")
    return (resources.files("healthchat") / "templates" / name).read_text(encoding="utf-8")


_LIST_MARKER = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")


def parse_questions(reply: str, cap: int = FOLLOWUP_CAP) -> list[str]:
    """Split an LLM reply into distinct questions: one per line, markers stripped."""
    seen: dict[str, None] = {}
    for line in reply.splitlines():
        question = _LIST_MARKER.sub("", line).strip()
        if question:
            seen.setdefault(question)
    return list(seen)[:cap]


def render_history(history: Sequence) -> str:
    """Stable textual rendering of (role, text) turns."""
    if not history:
        return "(no earlier conversation)"
    return "\n".join(f"{turn.role}: {turn.text}" for turn in history)


def render_followup_prompt(
    session: "ChatSession",
    topic_questions: Sequence[str],
    template_dir: str | Path | None = None,
) -> str:
    """Deterministic follow-up prompt. The bulleted topic-question block is
    omitted entirely when there are no topic questions."""
    query, answer = session.latest_exchange()
    earlier = session.history_before_latest_exchange()
    if topic_questions:
        bullets = "\n".join(f"- {q}" for q in topic_questions)
        block = f"\nQuestions other patients asked on this topic:\n{bullets}\n"
    else:
        block = ""
    template = load_template("followup.txt", template_dir)
    return template.format(
        history=render_history(earlier),
        query=query,
        answer=answer,
        topic_questions=block,
    )


def _detect_diseases(query: str, lookup_qa: Sequence[QAPair]) -> list[str]:
    vocabulary = sorted({tag for qa in lookup_qa for tag in qa.disease_tags})
    lowered = query.lower()
    return [tag for tag in vocabulary if tag.lower() in lowered]


def _retrieval_based(
    session: "ChatSession",
    lookup_qa: Sequence[QAPair],
    provider: EmbeddingProvider,
) -> FollowupSet:
    if not lookup_qa:
        raise FollowupError("retrieval_based: lookup corpus is empty")
    query, _ = session.latest_exchange()
    detected = set(_detect_diseases(query, lookup_qa))
    candidates = [qa for qa in lookup_qa if detected & set(qa.disease_tags)]
    if not candidates:
        # Documented degradation: no disease mentioned, rank the whole corpus.
        candidates = list(lookup_qa)
    query_vec = provider.embed(query)
    scored = sorted(
        candidates,
        key=lambda qa: (-cosine(provider.embed(qa.question), query_vec), qa.id),
    )
    questions: list[str] = []
    context: list[str] = []
    for qa in scored:
        text = qa.question.strip()
        if text in questions:
            continue
        questions.append(text)
        context.append(qa.id)
        if len(questions) == FOLLOWUP_CAP:
            break
    return FollowupSet(
        questions=tuple(questions),
        method=FollowupMethod.RETRIEVAL_BASED,
        context_doc_ids=tuple(context),
    )


def suggest_followups(
    session: "ChatSession",
    method: FollowupMethod,
    llm: LLMGateway,
    model: TopicModel | None = None,
    conv_index: DocIndex | None = None,
    lookup_qa: Sequence[QAPair] | None = None,
    provider: EmbeddingProvider | None = None,
    template_dir: str | Path | None = None,
) -> FollowupSet:
    """Generate follow-ups for the latest exchange with the chosen method.

    topic_llm / kmeans_llm ground the prompt in the query's topic cluster;
    an outlier query degrades to the plain prompt with no context. The
    retrieval method never touches the LLM.
    """
    method = FollowupMethod(method)
    if method is FollowupMethod.RETRIEVAL_BASED:
        if lookup_qa is None or provider is None:
            raise ValidationError("retrieval_based needs lookup_qa and provider")
        return _retrieval_based(session, lookup_qa, provider)

    topic_questions: list[str] = []
    context_ids: list[str] = []
    if method in _METHOD_BACKEND:
        if model is None or conv_index is None:
            raise ValidationError(f"{method.value} needs a topic model and conv index")
        if model.backend != _METHOD_BACKEND[method]:
            raise ValidationError(
                f"{method.value} expects the {_METHOD_BACKEND[method]} backend, "
                f"got {model.backend}"
            )
        query, _ = session.latest_exchange()
        topic = assign_topic(model, query, conv_index.provider)
        if topic != OUTLIER_TOPIC:
            docs = in_topic_docs(model, topic, query, conv_index, n=TOPIC_CONTEXT_SIZE)
            topic_questions = [conv_index.text_of(d.doc_id) for d in docs]
            context_ids = [d.doc_id for d in docs]

    prompt = render_followup_prompt(session, topic_questions, template_dir)
    try:
        reply = llm.complete(CompletionRequest(messages=(Message("user", prompt),)))
    except LLMError as e:
        raise FollowupError(f"{method.value}: {e}") from e
    questions = parse_questions(reply)
    if not questions:
        raise FollowupError(f"{method.value}: the model returned no usable questions")
    return FollowupSet(
        questions=tuple(questions),
        method=method,
        context_doc_ids=tuple(context_ids),
    )
