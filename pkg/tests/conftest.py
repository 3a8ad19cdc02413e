"""Shared fixtures: the whole suite runs with outbound networking blocked,
so every LLM call goes through the scripted stub and every embedding
through the deterministic local provider."""

from __future__ import annotations

import socket
from pathlib import Path

import pytest

from healthchat.autocomplete import build_prefix_index
from healthchat.corpus import load_bundle
from healthchat.embedding import HashedNgramProvider
from healthchat.posts import categorize_posts, default_category_config, rank_and_filter
from healthchat.retrieval import build_index
from healthchat.topics import default_taxonomy, fit_topics

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "data" / "fixtures"
CONFIG_DIR = REPO / "data" / "config"

_real_connect = socket.socket.connect


def _blocked_connect(self, address):
    raise RuntimeError(f"network disabled in tests: connect to {address!r} blocked")


@pytest.fixture(scope="session", autouse=True)
def no_network():
    """Hard-disable outbound connections for the entire suite."""
    socket.socket.connect = _blocked_connect
    try:
        yield
    finally:
        socket.socket.connect = _real_connect


@pytest.fixture(scope="session")
def provider():
    return HashedNgramProvider()


@pytest.fixture(scope="session")
def bundle():
    return load_bundle(
        FIXTURES / "base_qa.jsonl",
        FIXTURES / "lookup_qa.jsonl",
        FIXTURES / "conversations.jsonl",
        FIXTURES / "posts.jsonl",
    )


@pytest.fixture(scope="session")
def qa_index(bundle, provider):
    all_qa = bundle.base_qa + bundle.lookup_qa + bundle.conversation_qa
    return build_index([(qa.id, qa.question, qa.answer) for qa in all_qa], provider)


@pytest.fixture(scope="session")
def conv_index(bundle, provider):
    return build_index(
        [(qa.id, qa.question, qa.answer) for qa in bundle.conversation_qa], provider
    )


@pytest.fixture(scope="session")
def post_index(bundle, provider):
    return build_index(
        [(p.id, f"{p.title} {p.body}") for p in bundle.posts], provider
    )


@pytest.fixture(scope="session")
def topic_model(bundle, provider):
    questions = [(qa.id, qa.question) for qa in bundle.conversation_qa]
    return fit_topics(questions, "centroid_outlier", k=13, seed=0, provider=provider)


@pytest.fixture(scope="session")
def kmeans_model(bundle, provider):
    questions = [(qa.id, qa.question) for qa in bundle.conversation_qa]
    return fit_topics(questions, "kmeans", k=13, seed=0, provider=provider)


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


@pytest.fixture(scope="session")
def category_config():
    return default_category_config()


@pytest.fixture(scope="session")
def curated(bundle, category_config):
    return rank_and_filter(categorize_posts(bundle.posts, category_config), 30)


@pytest.fixture(scope="session")
def prefix_index(bundle):
    return build_prefix_index(bundle.lookup_qa)


@pytest.fixture(scope="session")
def fixtures(bundle, qa_index, conv_index, topic_model, kmeans_model, taxonomy):
    """The engine's constructor arguments, bundled for test factories."""
    return {
        "bundle": bundle,
        "qa_index": qa_index,
        "conv_index": conv_index,
        "topic_model": topic_model,
        "kmeans_model": kmeans_model,
        "taxonomy": taxonomy,
    }


@pytest.fixture(scope="session")
def built_config(
    tmp_path_factory, bundle, provider, qa_index, conv_index, post_index,
    topic_model, kmeans_model, curated,
):
    """Snapshots on disk plus a config pointing at them, as `serve` sees it."""
    from healthchat.config import AppConfig
    from healthchat.posts import save_curated
    from healthchat.retrieval import save_index
    from healthchat.topics import save_topic_model

    root = tmp_path_factory.mktemp("server-data")
    (root / "snapshots").mkdir()
    save_index(qa_index, root / "snapshots" / "qa_index.json")
    save_index(conv_index, root / "snapshots" / "conv_index.json")
    save_index(post_index, root / "snapshots" / "post_index.json")
    save_topic_model(topic_model, root / "snapshots" / "topics_centroid.json")
    save_topic_model(kmeans_model, root / "snapshots" / "topics_kmeans.json")
    save_curated(curated, root / "snapshots" / "curated_posts.json")
    return AppConfig(
        data_dir=str(root),
        base_qa_path=str(FIXTURES / "base_qa.jsonl"),
        lookup_qa_path=str(FIXTURES / "lookup_qa.jsonl"),
        conversations_path=str(FIXTURES / "conversations.jsonl"),
        posts_path=str(FIXTURES / "posts.jsonl"),
    )


@pytest.fixture
def counter_clock():
    """Deterministic clock: 1000.0, 1001.0, ... per call."""
    state = {"t": 999.0}

    def tick() -> float:
        state["t"] += 1.0
        return state["t"]

    return tick


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                name = nodeid.split("::")[-1]
                verdict = "PASS" if outcome == "passed" else "FAIL"
                lines.append(f"{verdict}  {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split(None, 1)[1]):
            terminalreporter.write_line(line)
