"""Prefix autocomplete over the disease-lookup questions.

A sorted key array with binary search stands in for an external search
engine: same observable behavior (prefix match, top five), none of the
operational weight. Among matches, shorter questions rank first; doc id
breaks ties so results are stable.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from typing import Sequence

from .corpus import QAPair
from .errors import ValidationError

SUGGESTION_LIMIT = 5


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


class PrefixIndex:
    """Immutable prefix-lookup structure over question texts."""

    def __init__(self, entries: Sequence[tuple[str, str, str]]):
        # entries: (normalized_key, doc_id, original_question), sorted by key
        self._entries = sorted(entries)
        self._keys = [e[0] for e in self._entries]

    def __len__(self) -> int:
        return len(self._entries)

    def suggest(self, typed: str, limit: int = SUGGESTION_LIMIT) -> list[str]:
        """Up to `limit` original questions whose key starts with the input.

        Ranked by ascending key length then ascending doc id. Empty input
        returns no suggestions.
        """
        prefix = _normalize(typed)
        if not prefix:
            return []
        i = bisect_left(self._keys, prefix)
        matches = []
        while i < len(self._entries):
            key, doc_id, original = self._entries[i]
            if not key.startswith(prefix):
                break
            matches.append((len(key), doc_id, original))
            i += 1
        best = heapq.nsmallest(limit, matches)
        return [original for _, _, original in best]


def build_prefix_index(lookup_qa: Sequence[QAPair]) -> PrefixIndex:
    """One entry per lookup question, keyed by the normalized text."""
    if not lookup_qa:
        raise ValidationError("cannot build a prefix index over an empty corpus")
    return PrefixIndex(
        [(_normalize(qa.question), qa.id, qa.question) for qa in lookup_qa]
    )
