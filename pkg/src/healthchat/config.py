"""Application configuration loaded from a single JSON document.

Every tunable lives here so the CLI and server share one source of
truth. Unknown keys are rejected to catch typos early.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ValidationError


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "hashed"  # "hashed" | "remote"
    dim: int = 64
    seed: int = 0
    name: str = ""
    endpoint: str = ""

    def __post_init__(self):
        if self.kind not in ("hashed", "remote"):
            raise ValidationError(f"unknown provider kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValidationError("remote provider needs an endpoint")


@dataclass(frozen=True)
class LLMConfig:
    kind: str = "scripted"  # "scripted" | "remote"
    script_path: str = ""
    endpoint: str = ""
    model: str = ""
    timeout: float = 30.0

    def __post_init__(self):
        if self.kind not in ("scripted", "remote"):
            raise ValidationError(f"unknown llm kind {self.kind!r}")
        if self.kind == "scripted" and not self.script_path:
            raise ValidationError("scripted llm needs a script_path")
        if self.kind == "remote" and not (self.endpoint and self.model):
            raise ValidationError("remote llm needs endpoint and model")


@dataclass(frozen=True)
class AppConfig:
    data_dir: str = "data"
    base_qa_path: str = "fixtures/base_qa.jsonl"
    lookup_qa_path: str = "fixtures/lookup_qa.jsonl"
    conversations_path: str = "fixtures/conversations.jsonl"
    posts_path: str = "fixtures/posts.jsonl"
    qa_index_path: str = "snapshots/qa_index.json"
    conv_index_path: str = "snapshots/conv_index.json"
    topic_model_paths: dict = field(
        default_factory=lambda: {
            "centroid_outlier": "snapshots/topics_centroid.json",
            "kmeans": "snapshots/topics_kmeans.json",
        }
    )  # backend -> snapshot path
    curated_path: str = "snapshots/curated_posts.json"
    post_index_path: str = "snapshots/post_index.json"
    session_dir: str = "sessions"
    template_dir: str = ""
    ui_dir: str = ""
    taxonomy_path: str = ""
    categories_path: str = ""
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    llm: LLMConfig = field(default_factory=lambda: LLMConfig(script_path="stub.json"))
    top_k: int = 10
    suggestion_limit: int = 5
    posts_per_category: int = 30
    default_method: str = "topic_llm"
    greeting: str = ""
    max_history_turns: int = 0  # 0 = unlimited
    cors_origins: tuple = ()
    host: str = "127.0.0.1"
    port: int = 8000

    def resolve(self, rel: str) -> Path:
        """Resolve a config-relative path against the data dir."""
        p = Path(rel)
        return p if p.is_absolute() else Path(self.data_dir) / p


def load_config(path: str | Path) -> AppConfig:
    """Parse and validate a JSON config file into an AppConfig."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"config {path}: invalid JSON ({e})") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path}: expected a JSON object")

    known = {f.name for f in fields(AppConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"config {path}: unknown keys {sorted(unknown)}")

    kwargs = dict(raw)
    for key, cls in (("provider", ProviderConfig), ("llm", LLMConfig)):
        if key in kwargs:
            try:
                kwargs[key] = cls(**kwargs[key])
            except TypeError as e:
                raise ValidationError(f"config {path}: {key}: {e}") from None
    if "cors_origins" in kwargs:
        kwargs["cors_origins"] = tuple(kwargs["cors_origins"])
    try:
        config = AppConfig(**kwargs)
    except TypeError as e:
        raise ValidationError(f"config {path}: {e}") from None

    if config.top_k < 1:
        raise ValidationError("top_k must be at least 1")
    if config.default_method not in ("topic_llm", "kmeans_llm", "llm_only", "retrieval_based"):
        raise ValidationError(f"unknown default_method {config.default_method!r}")
    return config
