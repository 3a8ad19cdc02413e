"""Peer-community post curation and example serving.

Pipeline: categorize posts by their tags (LLM assist for unmatched ones),
aggregate engagement, keep the top posts per category with ads dropped,
then at serve time match the current exchange to a category and return the
closest selected post — always with the fixed disclaimer attached.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .corpus import RawPost
from .embedding import cosine
from .errors import ValidationError
from .llm import CompletionRequest, LLMError, LLMGateway, Message
from .retrieval import DocIndex
from .snapshots import read_snapshot, write_snapshot

logger = logging.getLogger(__name__)

DISCLAIMER = (
    "The following content is for reference only and has not been "
    "scientifically verified; if you experience any health issues, please "
    "consult a medical professional promptly"
)

DEFAULT_CATEGORY_CAP = 30

# The four broad groups every category config must contain.
BROAD_CATEGORIES = (
    "anti-cancer diaries",
    "symptoms and signs",
    "diagnosis and screening",
    "treatment and hospitals",
)


@dataclass(frozen=True)
class CategoryConfig:
    """Nine ordered category names plus the tag-pattern rules that fill them.

    Specific-condition categories come before the broad groups; the last
    name doubles as the fallback for posts nothing else claims.
    """

    names: tuple[str, ...]
    tag_rules: tuple[tuple[str, str], ...]  # (pattern, category), walked in order

    def __post_init__(self):
        if len(self.names) != 9:
            raise ValidationError(f"expected exactly 9 categories, got {len(self.names)}")
        if len(set(self.names)) != 9:
            raise ValidationError("category names must be unique")
        for broad in BROAD_CATEGORIES:
            if broad not in self.names:
                raise ValidationError(f"missing broad category {broad!r}")
        specific = [n for n in self.names if n not in BROAD_CATEGORIES]
        if self.names != tuple(specific) + tuple(
            n for n in self.names if n in BROAD_CATEGORIES
        ):
            raise ValidationError("specific-condition categories must precede broad ones")
        for _, category in self.tag_rules:
            if category not in self.names:
                raise ValidationError(f"rule targets unknown category {category!r}")

    @property
    def fallback(self) -> str:
        return self.names[-1]


def default_category_config() -> CategoryConfig:
    return CategoryConfig(
        names=(
            "rectal cancer",
            "descending colon cancer",
            "intestinal polyps",
            "bowel obstruction",
            "enteritis",
            "anti-cancer diaries",
            "symptoms and signs",
            "diagnosis and screening",
            "treatment and hospitals",
        ),
        tag_rules=(
            ("rectal cancer", "rectal cancer"),
            ("descending colon", "descending colon cancer"),
            ("polyp", "intestinal polyps"),
            ("obstruction", "bowel obstruction"),
            ("enteritis", "enteritis"),
            ("diary", "anti-cancer diaries"),
            ("journey", "anti-cancer diaries"),
            ("recovery story", "anti-cancer diaries"),
            ("symptom", "symptoms and signs"),
            ("blood", "symptoms and signs"),
            ("pain", "symptoms and signs"),
            ("screening", "diagnosis and screening"),
            ("colonoscopy", "diagnosis and screening"),
            ("diagnosis", "diagnosis and screening"),
            ("surgery", "treatment and hospitals"),
            ("hospital", "treatment and hospitals"),
            ("chemotherapy", "treatment and hospitals"),
            ("treatment", "treatment and hospitals"),
        ),
    )


def load_category_config(path: str | Path) -> CategoryConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return CategoryConfig(
        names=tuple(doc["names"]),
        tag_rules=tuple((r["pattern"], r["category"]) for r in doc.get("tag_rules", [])),
    )


@dataclass(frozen=True)
class CuratedPost:
    post: RawPost
    category: str
    engagement: int
    selected: bool = False

    @property
    def id(self) -> str:
        return self.post.id


def _match_rules(texts: Sequence[str], config: CategoryConfig) -> str | None:
    lowered = [t.lower() for t in texts]
    for pattern, category in config.tag_rules:
        needle = pattern.lower()
        if any(needle in text for text in lowered):
            return category
    return None


def _ask_category(llm: LLMGateway, config: CategoryConfig, text: str) -> str | None:
    prompt = (
        "Assign the following community post to exactly one category. "
        "Reply with the category name only, copied exactly from this list:\n"
        + "\n".join(config.names)
        + "\n\nPost:\n"
        + text
    )
    try:
        reply = llm.complete(CompletionRequest(messages=(Message("user", prompt),))).strip()
    except LLMError:
        return None
    return reply if reply in config.names else None


def categorize_posts(
    posts: Sequence[RawPost],
    config: CategoryConfig,
    llm: LLMGateway | None = None,
) -> list[CuratedPost]:
    """Assign every post a category and compute its engagement score.

    Tag rules are walked in config order; posts matching no rule go to the
    LLM, and any invalid reply (or no LLM at all) lands in the last,
    broadest category. Total by construction.
    """
    curated = []
    for post in posts:
        category = _match_rules(post.tags, config)
        if category is None and llm is not None:
            category = _ask_category(llm, config, f"{post.title}\n{post.body}")
        if category is None:
            category = config.fallback
        engagement = post.likes + post.comments + post.shares + post.collections
        curated.append(CuratedPost(post=post, category=category, engagement=engagement))
    return curated


def rank_and_filter(
    curated: Sequence[CuratedPost],
    per_category_cap: int = DEFAULT_CATEGORY_CAP,
) -> list[CuratedPost]:
    """Mark the top posts per category as selected; ads never qualify.

    Within each category, eligible posts sort by descending engagement,
    then descending created_at, then ascending id, and the top cap are
    selected. Idempotent: re-running on its own output changes nothing.
    """
    if per_category_cap < 1:
        raise ValidationError("per_category_cap must be >= 1")
    by_category: dict[str, list[CuratedPost]] = {}
    for item in curated:
        by_category.setdefault(item.category, []).append(item)
    selected_ids: set[str] = set()
    for items in by_category.values():
        eligible = [c for c in items if not c.post.ad_flag]
        eligible.sort(key=lambda c: (-c.engagement, -c.post.created_at, c.id))
        selected_ids.update(c.id for c in eligible[:per_category_cap])
    return [replace(c, selected=c.id in selected_ids) for c in curated]


def curation_report(curated: Sequence[CuratedPost]) -> dict:
    """Machine-readable summary: per-category counts, selections, exclusions."""
    categories: dict[str, dict] = {}
    for item in curated:
        entry = categories.setdefault(
            item.category, {"total": 0, "selected": [], "excluded": {}}
        )
        entry["total"] += 1
        if item.selected:
            entry["selected"].append(item.id)
        elif item.post.ad_flag:
            entry["excluded"][item.id] = "advertisement"
        else:
            entry["excluded"][item.id] = "below engagement cutoff"
    for entry in categories.values():
        entry["selected"].sort()
    return {"categories": dict(sorted(categories.items()))}


def classify_exchange(
    query: str,
    response: str,
    config: CategoryConfig,
    llm: LLMGateway | None,
) -> str:
    """Match an exchange to a category, specific conditions taking priority."""
    text = f"{query}\n{response}"
    if llm is not None:
        category = _ask_category(llm, config, text)
        if category is not None:
            return category
    category = _match_rules([text], config)
    return category if category is not None else config.fallback


def fetch_example(
    query: str,
    response: str,
    curated: Sequence[CuratedPost],
    post_index: DocIndex,
    config: CategoryConfig,
    llm: LLMGateway | None = None,
    category: str | None = None,
) -> tuple[CuratedPost, str]:
    """The most relevant selected post for this exchange, plus the disclaimer.

    Classifies query+response to a category (unless one is given), then picks
    the selected post in it whose body embedding is closest to the exchange.
    An empty category degrades to the best-cosine selected post overall.
    """
    selected = [c for c in curated if c.selected]
    if not selected:
        raise ValidationError("no selected posts available")
    if category is None:
        category = classify_exchange(query, response, config, llm)
    elif category not in config.names:
        raise ValidationError(
            f"unknown category {category!r}; valid categories: " + ", ".join(config.names)
        )
    pool = [c for c in selected if c.category == category]
    if not pool:
        logger.info("category %r has no selected posts; falling back to global pool", category)
        pool = selected
    probe = post_index.provider.embed(f"{query} {response}")
    scored = []
    for item in pool:
        if item.id not in post_index:
            continue
        scored.append((-cosine(post_index.vector_of(item.id), probe), item.id, item))
    if not scored:
        raise ValidationError("selected posts missing from the post index")
    scored.sort(key=lambda t: (t[0], t[1]))
    return scored[0][2], DISCLAIMER


def save_curated(curated: Sequence[CuratedPost], path: str | Path) -> None:
    """Persist the curated set as a versioned snapshot."""
    write_snapshot(
        path,
        "curated_posts",
        {
            "posts": [
                {
                    "id": c.post.id,
                    "title": c.post.title,
                    "body": c.post.body,
                    "tags": list(c.post.tags),
                    "likes": c.post.likes,
                    "comments": c.post.comments,
                    "shares": c.post.shares,
                    "collections": c.post.collections,
                    "ad_flag": c.post.ad_flag,
                    "created_at": c.post.created_at,
                    "category": c.category,
                    "engagement": c.engagement,
                    "selected": c.selected,
                }
                for c in curated
            ]
        },
    )


def load_curated(path: str | Path) -> list[CuratedPost]:
    doc = read_snapshot(path, "curated_posts")
    out = []
    for record in doc["posts"]:
        post = RawPost(
            id=record["id"],
            title=record["title"],
            body=record["body"],
            tags=tuple(record["tags"]),
            likes=record["likes"],
            comments=record["comments"],
            shares=record["shares"],
            collections=record["collections"],
            ad_flag=record["ad_flag"],
            created_at=record["created_at"],
        )
        out.append(
            CuratedPost(
                post=post,
                category=record["category"],
                engagement=record["engagement"],
                selected=record["selected"],
            )
        )
    return out
