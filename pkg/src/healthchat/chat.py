"""Session orchestration: grounded responses, terminology explanation,
topic switching, and follow-up refresh.

Each operation on a session runs under that session's lock; a second
request while one is in flight is rejected with a busy error rather than
queued. Sessions append to a JSON Lines event log so a restarted process
can replay them.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .corpus import QAPair
from .errors import SessionBusyError, UnknownSessionError, ValidationError
from .followup import (
    FollowupError,
    FollowupMethod,
    FollowupSet,
    load_template,
    parse_questions,
    render_history,
    suggest_followups,
)
from .llm import CompletionRequest, LLMGateway, Message
from .retrieval import DocIndex, top_k
from .topics import SwitchTaxonomy, TopicModel, classify_switch_topic

logger = logging.getLogger(__name__)

RETRIEVAL_K = 10
EXPLAIN_TEMPLATE = "Please introduce what {selected} is"
MAX_SELECTION_LENGTH = 200
DEFAULT_GREETING = (
    "Hello! I can answer any questions about colorectal cancer. "
    "Ask me anything, or pick one of the suggested questions below."
)


@dataclass(frozen=True)
class ChatTurn:
    role: str  # "user" | "agent"
    text: str
    timestamp: float


@dataclass
class ChatSession:
    session_id: str
    history: list[ChatTurn] = field(default_factory=list)
    current_followups: FollowupSet | None = None
    active_topic: str | None = None

    def latest_exchange(self) -> tuple[str, str]:
        """The most recent (user query, agent answer) pair."""
        for i in range(len(self.history) - 2, -1, -1):
            if self.history[i].role == "user" and self.history[i + 1].role == "agent":
                return self.history[i].text, self.history[i + 1].text
        raise ValidationError("session has no completed exchange yet")

    def history_before_latest_exchange(self) -> list[ChatTurn]:
        for i in range(len(self.history) - 2, -1, -1):
            if self.history[i].role == "user" and self.history[i + 1].role == "agent":
                return self.history[:i]
        return list(self.history)

    def latest_user_query(self) -> str:
        for turn in reversed(self.history):
            if turn.role == "user":
                return turn.text
        raise ValidationError("no query yet")


@dataclass(frozen=True)
class EnrichedPrompt:
    """The grounded prompt behind every generated response."""

    system_block: str
    retrieved_block: tuple[str, ...]  # each entry "Q: ...\nA: ..."
    history: tuple[tuple[str, str], ...]  # (role, text)
    query_block: str

    @property
    def history_block(self) -> str:
        if not self.history:
            return "(no earlier conversation)"
        return "\n".join(f"{role}: {text}" for role, text in self.history)

    def to_messages(self) -> tuple[Message, ...]:
        system = self.system_block
        if self.retrieved_block:
            system += "\n\nReference QA pairs:\n\n" + "\n\n".join(self.retrieved_block)
        messages = [Message("system", system)]
        for role, text in self.history:
            messages.append(Message("assistant" if role == "agent" else "user", text))
        messages.append(Message("user", self.query_block))
        return tuple(messages)


def build_enriched_prompt(
    system_text: str,
    retrieved: Sequence[tuple[str, str]],
    history: Sequence[ChatTurn],
    query: str,
) -> EnrichedPrompt:
    """Assemble the prompt from retrieved QA pairs, history, and the query."""
    if len(retrieved) > RETRIEVAL_K:
        raise ValidationError(f"retrieved block capped at {RETRIEVAL_K} pairs")
    return EnrichedPrompt(
        system_block=system_text,
        retrieved_block=tuple(f"Q: {q}\nA: {a}" for q, a in retrieved),
        history=tuple((t.role, t.text) for t in history),
        query_block=query,
    )


class SessionStore:
    """In-memory sessions backed by an append-only event log per session."""

    def __init__(self, log_dir: str | Path | None = None):
        self._sessions: dict[str, ChatSession] = {}
        self._log_dir = Path(log_dir) if log_dir is not None else None
        if self._log_dir is not None:
            self._log_dir.mkdir(parents=True, exist_ok=True)
            for log_path in sorted(self._log_dir.glob("*.jsonl")):
                session = self._replay(log_path)
                self._sessions[session.session_id] = session

    def _replay(self, log_path: Path) -> ChatSession:
        session = ChatSession(session_id=log_path.stem)
        with log_path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                kind = event["event"]
                if kind == "turn":
                    session.history.append(
                        ChatTurn(event["role"], event["text"], event["ts"])
                    )
                elif kind == "followups":
                    session.current_followups = FollowupSet(
                        questions=tuple(event["questions"]),
                        method=FollowupMethod(event["method"]),
                        context_doc_ids=tuple(event["context"]),
                    )
                elif kind == "topic":
                    session.active_topic = event["name"]
        return session

    def log_event(self, session_id: str, event: dict) -> None:
        if self._log_dir is None:
            return
        path = self._log_dir / f"{session_id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def add(self, session: ChatSession) -> None:
        self._sessions[session.session_id] = session

    def get(self, session_id: str) -> ChatSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def __contains__(self, session_id: str) -> bool:
        return session_id in self._sessions


class ChatEngine:
    """Everything behind the HTTP surface, wired to immutable artifacts."""

    def __init__(
        self,
        *,
        qa_index: DocIndex,
        llm: LLMGateway,
        lookup_qa: Sequence[QAPair] = (),
        conv_index: DocIndex | None = None,
        topic_models: dict[str, TopicModel] | None = None,
        taxonomy: SwitchTaxonomy | None = None,
        initial_suggestions: Sequence[str] = (),
        default_method: FollowupMethod = FollowupMethod.TOPIC_LLM,
        greeting: str = DEFAULT_GREETING,
        top_k: int = RETRIEVAL_K,
        max_history_turns: int | None = None,
        template_dir: str | Path | None = None,
        session_dir: str | Path | None = None,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] | None = None,
    ):
        self.qa_index = qa_index
        self.llm = llm
        self.lookup_qa = list(lookup_qa)
        self.conv_index = conv_index
        self.topic_models = topic_models or {}
        self.taxonomy = taxonomy
        self.initial_suggestions = [s for s in initial_suggestions][:4]
        self.default_method = FollowupMethod(default_method)
        self.greeting = greeting
        self.top_k = top_k
        self.max_history_turns = max_history_turns
        self.template_dir = template_dir
        self.system_text = load_template("system.txt", template_dir)
        self._clock = clock
        self._id_factory = id_factory or (lambda: uuid.uuid4().hex)
        self.store = SessionStore(session_dir)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _acquire(self, session_id: str) -> threading.Lock:
        lock = self._lock_for(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusyError(f"session {session_id} has an operation in flight")
        return lock

    # -- session lifecycle -------------------------------------------------

    def create_session(self, session_id: str | None = None) -> ChatSession:
        """New session with the greeting turn and seeded suggestions."""
        session_id = session_id or self._id_factory()
        if session_id in self.store:
            raise ValidationError(f"session id {session_id!r} already exists")
        session = ChatSession(session_id=session_id)
        ts = self._clock()
        session.history.append(ChatTurn("agent", self.greeting, ts))
        self.store.add(session)
        self.store.log_event(
            session_id, {"event": "turn", "role": "agent", "text": self.greeting, "ts": ts}
        )
        if self.initial_suggestions:
            seeded = FollowupSet(
                questions=tuple(self.initial_suggestions),
                method=FollowupMethod.RETRIEVAL_BASED,
            )
            session.current_followups = seeded
            self._log_followups(session_id, seeded)
        return session

    def get_session(self, session_id: str) -> ChatSession:
        return self.store.get(session_id)

    def _log_followups(self, session_id: str, followups: FollowupSet) -> None:
        self.store.log_event(
            session_id,
            {
                "event": "followups",
                "questions": list(followups.questions),
                "method": followups.method.value,
                "context": list(followups.context_doc_ids),
            },
        )

    # -- core operations ---------------------------------------------------

    def respond(
        self,
        session_id: str,
        query: str,
        method: FollowupMethod | None = None,
    ) -> str:
        """Grounded response to a query; appends both turns and refreshes
        follow-ups. On LLM failure the history is left untouched."""
        lock = self._acquire(session_id)
        try:
            return self._respond_locked(session_id, query, method)
        finally:
            lock.release()

    def _respond_locked(
        self, session_id: str, query: str, method: FollowupMethod | None
    ) -> str:
        session = self.store.get(session_id)
        query = query.strip()
        if not query:
            raise ValidationError("empty query")

        retrieved_docs = top_k(self.qa_index, query, self.top_k)
        retrieved = [
            (self.qa_index.text_of(d.doc_id), self.qa_index.payload_of(d.doc_id) or "")
            for d in retrieved_docs
        ]
        history = session.history
        if self.max_history_turns is not None:
            history = history[-self.max_history_turns :]
        prompt = build_enriched_prompt(self.system_text, retrieved, history, query)
        reply = self.llm.complete(CompletionRequest(messages=prompt.to_messages()))

        for role, text in (("user", query), ("agent", reply)):
            ts = self._clock()
            session.history.append(ChatTurn(role, text, ts))
            self.store.log_event(
                session_id, {"event": "turn", "role": role, "text": text, "ts": ts}
            )

        self._refresh_followups(session, method)
        return reply

    def _refresh_followups(
        self, session: ChatSession, method: FollowupMethod | None
    ) -> None:
        method = FollowupMethod(method) if method is not None else self.default_method
        model = self.topic_models.get(
            {"topic_llm": "centroid_outlier", "kmeans_llm": "kmeans"}.get(method.value, "")
        )
        try:
            followups = suggest_followups(
                session,
                method,
                self.llm,
                model=model,
                conv_index=self.conv_index,
                lookup_qa=self.lookup_qa,
                provider=self.qa_index.provider,
                template_dir=self.template_dir,
            )
        except (FollowupError, ValidationError) as e:
            # Non-fatal: the response already succeeded, keep the old chips.
            logger.warning("followup refresh failed for %s: %s", session.session_id, e)
            return
        session.current_followups = followups
        self._log_followups(session.session_id, followups)

    def explain_term(
        self,
        session_id: str,
        selected: str,
        method: FollowupMethod | None = None,
    ) -> str:
        """Terminology explanation: the fixed query template through the
        same grounded pipeline as respond."""
        selected = selected.strip()
        if not selected:
            raise ValidationError("empty selection")
        if len(selected) > MAX_SELECTION_LENGTH:
            raise ValidationError(
                f"selection longer than {MAX_SELECTION_LENGTH} characters"
            )
        query = EXPLAIN_TEMPLATE.format(selected=selected)
        lock = self._acquire(session_id)
        try:
            return self._respond_locked(session_id, query, method)
        finally:
            lock.release()

    def switch_topic(self, session_id: str, topic_name: str) -> FollowupSet:
        """Set the active topic and replace the follow-ups with questions
        about it. On LLM failure the previous follow-ups stay in place."""
        if self.taxonomy is None:
            raise ValidationError("no switch taxonomy configured")
        if topic_name not in self.taxonomy.topics:
            raise ValidationError(
                f"unknown topic {topic_name!r}; valid topics: "
                + ", ".join(self.taxonomy.topics)
            )
        lock = self._acquire(session_id)
        try:
            session = self.store.get(session_id)
            template = load_template("topic_switch.txt", self.template_dir)
            prompt = template.format(
                topic=topic_name, history=render_history(session.history)
            )
            reply = self.llm.complete(
                CompletionRequest(messages=(Message("user", prompt),))
            )
            questions = parse_questions(reply)
            if not questions:
                raise FollowupError("topic switch returned no usable questions")
            followups = FollowupSet(
                questions=tuple(questions), method=FollowupMethod.LLM_ONLY
            )
            session.active_topic = topic_name
            session.current_followups = followups
            self.store.log_event(session_id, {"event": "topic", "name": topic_name})
            self._log_followups(session_id, followups)
            return followups
        finally:
            lock.release()

    def current_topic(self, session_id: str) -> str:
        """Classify the latest user query into the 16-topic taxonomy."""
        if self.taxonomy is None:
            raise ValidationError("no switch taxonomy configured")
        lock = self._acquire(session_id)
        try:
            session = self.store.get(session_id)
            query = session.latest_user_query()
            return classify_switch_topic(query, session, self.llm, self.taxonomy)
        finally:
            lock.release()
