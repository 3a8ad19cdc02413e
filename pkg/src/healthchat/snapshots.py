"""Versioned JSON snapshot files shared by the build commands and the server.

Every snapshot carries the same header so a running server can refuse
artifacts written by an incompatible build. Writes are deterministic:
identical payloads serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SnapshotError

SNAPSHOT_VERSION = 1


def write_snapshot(path: str | Path, kind: str, payload: dict) -> None:
    """Write a snapshot atomically with the version header."""
    path = Path(path)
    doc = {"version": SNAPSHOT_VERSION, "kind": kind}
    doc.update(payload)
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    tmp = path.with_suffix(path.suffix + ".tmp")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp.write_text(text + "\n", encoding="utf-8")
    tmp.replace(path)


def read_snapshot(path: str | Path, kind: str) -> dict:
    """Read a snapshot, enforcing kind and version compatibility."""
    path = Path(path)
    if not path.exists():
        raise SnapshotError(f"snapshot not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SnapshotError(f"corrupt snapshot {path}: {e}") from e
    if not isinstance(doc, dict):
        raise SnapshotError(f"corrupt snapshot {path}: not an object")
    version = doc.get("version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(
            f"snapshot {path} has version {version}, expected {SNAPSHOT_VERSION}"
        )
    if doc.get("kind") != kind:
        raise SnapshotError(
            f"snapshot {path} has kind {doc.get('kind')!r}, expected {kind!r}"
        )
    return doc
