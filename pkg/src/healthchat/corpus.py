"""Loading, validation, and normalization of the three data sources.

All corpus files are JSON Lines (UTF-8, one object per line). Text fields
are trimmed of surrounding whitespace at load time; nothing else is
mutated, so terminology survives a round trip intact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import ValidationError


class QASource(str, Enum):
    BASE = "base"
    DISEASE_LOOKUP = "disease_lookup"
    CONVERSATION = "conversation"


class Speaker(str, Enum):
    PATIENT = "patient"
    DOCTOR = "doctor"


class CorpusError(ValidationError):
    """A corpus file failed validation; the message names the offending line."""


@dataclass(frozen=True)
class QAPair:
    id: str
    question: str
    answer: str
    source: QASource
    disease_tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Turn:
    speaker: Speaker
    text: str


@dataclass(frozen=True)
class Conversation:
    id: str
    turns: tuple[Turn, ...]


@dataclass(frozen=True)
class RawPost:
    id: str
    title: str
    body: str
    tags: tuple[str, ...]
    likes: int
    comments: int
    shares: int
    collections: int
    ad_flag: bool
    created_at: int


@dataclass
class CorpusBundle:
    """The three QA corpora plus the raw peer posts, loaded and validated."""

    base_qa: list[QAPair] = field(default_factory=list)
    lookup_qa: list[QAPair] = field(default_factory=list)
    conversation_qa: list[QAPair] = field(default_factory=list)
    posts: list[RawPost] = field(default_factory=list)


def _iter_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    # Missing file is an I/O failure, not a content problem: callers map
    # OSError and validation errors to different exit codes.
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({e.msg})") from e
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: expected an object")
            yield lineno, record


def _require_text(record: dict, key: str, path: Path, lineno: int) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise CorpusError(f"{path}:{lineno}: missing or non-string field '{key}'")
    value = value.strip()
    if not value:
        raise CorpusError(f"{path}:{lineno}: empty field '{key}'")
    return value


def load_qa_corpus(path: str | Path, source: QASource) -> list[QAPair]:
    """Load a QA corpus file, validating every record. Order is preserved."""
    path = Path(path)
    pairs: list[QAPair] = []
    seen: set[str] = set()
    for lineno, record in _iter_jsonl(path):
        pair_id = _require_text(record, "id", path, lineno)
        question = _require_text(record, "question", path, lineno)
        answer = _require_text(record, "answer", path, lineno)
        tags = record.get("disease_tags", [])
        if not isinstance(tags, list) or any(not isinstance(t, str) for t in tags):
            raise CorpusError(f"{path}:{lineno}: 'disease_tags' must be a list of strings")
        if pair_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate id '{pair_id}'")
        seen.add(pair_id)
        pairs.append(
            QAPair(
                id=pair_id,
                question=question,
                answer=answer,
                source=source,
                disease_tags=tuple(t.strip() for t in tags),
            )
        )
    if not pairs:
        raise CorpusError(f"{path}: empty corpus")
    return pairs


def load_conversations(path: str | Path) -> list[Conversation]:
    """Load doctor-patient conversations from JSON Lines."""
    path = Path(path)
    conversations: list[Conversation] = []
    seen: set[str] = set()
    for lineno, record in _iter_jsonl(path):
        conv_id = _require_text(record, "id", path, lineno)
        if conv_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate id '{conv_id}'")
        seen.add(conv_id)
        raw_turns = record.get("turns")
        if not isinstance(raw_turns, list) or not raw_turns:
            raise CorpusError(f"{path}:{lineno}: 'turns' must be a non-empty list")
        turns = []
        for turn in raw_turns:
            if not isinstance(turn, dict):
                raise CorpusError(f"{path}:{lineno}: turn entries must be objects")
            speaker_raw = turn.get("speaker")
            try:
                speaker = Speaker(speaker_raw)
            except ValueError:
                raise CorpusError(
                    f"{path}:{lineno}: unknown speaker {speaker_raw!r}"
                ) from None
            text = turn.get("text")
            if not isinstance(text, str) or not text.strip():
                raise CorpusError(f"{path}:{lineno}: empty turn text")
            turns.append(Turn(speaker=speaker, text=text.strip()))
        conversations.append(Conversation(id=conv_id, turns=tuple(turns)))
    if not conversations:
        raise CorpusError(f"{path}: empty corpus")
    return conversations


def pair_conversation(conv: Conversation) -> list[QAPair]:
    """Turn a conversation into (question, answer) pairs by run-length merging.

    Consecutive patient turns concatenate into one question, the doctor turns
    that immediately follow concatenate into one answer. Patient turns at the
    end with no doctor reply emit nothing; leading doctor turns are dropped.
    """
    pairs: list[QAPair] = []
    i = 0
    turns = conv.turns
    while i < len(turns):
        if turns[i].speaker is not Speaker.PATIENT:
            i += 1
            continue
        question_parts = []
        while i < len(turns) and turns[i].speaker is Speaker.PATIENT:
            question_parts.append(turns[i].text)
            i += 1
        answer_parts = []
        while i < len(turns) and turns[i].speaker is Speaker.DOCTOR:
            answer_parts.append(turns[i].text)
            i += 1
        if not answer_parts:
            break
        pairs.append(
            QAPair(
                id=f"{conv.id}#{len(pairs)}",
                question=" ".join(question_parts),
                answer=" ".join(answer_parts),
                source=QASource.CONVERSATION,
            )
        )
    return pairs


def pair_conversations(conversations: Iterable[Conversation]) -> list[QAPair]:
    """Pair every conversation, keeping file order."""
    out: list[QAPair] = []
    for conv in conversations:
        out.extend(pair_conversation(conv))
    return out


def load_posts(path: str | Path) -> list[RawPost]:
    """Load peer-community posts, validating counters and ids."""
    path = Path(path)
    posts: list[RawPost] = []
    seen: set[str] = set()
    counters = ("likes", "comments", "shares", "collections")
    for lineno, record in _iter_jsonl(path):
        post_id = _require_text(record, "id", path, lineno)
        if post_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate id '{post_id}'")
        seen.add(post_id)
        body = _require_text(record, "body", path, lineno)
        title = record.get("title", "")
        if not isinstance(title, str):
            raise CorpusError(f"{path}:{lineno}: 'title' must be a string")
        tags = record.get("tags", [])
        if not isinstance(tags, list) or any(not isinstance(t, str) for t in tags):
            raise CorpusError(f"{path}:{lineno}: 'tags' must be a list of strings")
        counts = {}
        for key in counters:
            value = record.get(key, 0)
            if not isinstance(value, int) or isinstance(value, bool):
                raise CorpusError(f"{path}:{lineno}: '{key}' must be an integer")
            if value < 0:
                raise CorpusError(f"{path}:{lineno}: negative counter '{key}'")
            counts[key] = value
        ad_flag = record.get("ad_flag", False)
        if not isinstance(ad_flag, bool):
            raise CorpusError(f"{path}:{lineno}: 'ad_flag' must be a boolean")
        created_at = record.get("created_at", 0)
        if not isinstance(created_at, int) or isinstance(created_at, bool):
            raise CorpusError(f"{path}:{lineno}: 'created_at' must be an integer")
        posts.append(
            RawPost(
                id=post_id,
                title=title.strip(),
                body=body,
                tags=tuple(t.strip() for t in tags),
                ad_flag=ad_flag,
                created_at=created_at,
                **counts,
            )
        )
    if not posts:
        raise CorpusError(f"{path}: empty corpus")
    return posts


def dump_qa_corpus(pairs: Iterable[QAPair], path: str | Path) -> None:
    """Write QA pairs back to JSON Lines (inverse of load_qa_corpus)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for pair in pairs:
            record = {
                "id": pair.id,
                "question": pair.question,
                "answer": pair.answer,
                "disease_tags": list(pair.disease_tags),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def dump_posts(posts: Iterable[RawPost], path: str | Path) -> None:
    """Write posts back to JSON Lines (inverse of load_posts)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for post in posts:
            record = {
                "id": post.id,
                "title": post.title,
                "body": post.body,
                "tags": list(post.tags),
                "likes": post.likes,
                "comments": post.comments,
                "shares": post.shares,
                "collections": post.collections,
                "ad_flag": post.ad_flag,
                "created_at": post.created_at,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_bundle(
    base_path: str | Path,
    lookup_path: str | Path,
    conversations_path: str | Path,
    posts_path: str | Path,
) -> CorpusBundle:
    """Load all four corpus files into one bundle."""
    conversations = load_conversations(conversations_path)
    return CorpusBundle(
        base_qa=load_qa_corpus(base_path, QASource.BASE),
        lookup_qa=load_qa_corpus(lookup_path, QASource.DISEASE_LOOKUP),
        conversation_qa=pair_conversations(conversations),
        posts=load_posts(posts_path),
    )
