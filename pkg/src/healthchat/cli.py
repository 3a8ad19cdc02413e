"""Command line entry points: corpus ingestion, artifact builds, the
server, and the follow-up evaluation harness.

Exit codes: 0 on success, 1 on a usage or validation error, 2 on an I/O
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .autocomplete import build_prefix_index
from .chat import ChatSession, ChatTurn
from .config import AppConfig, load_config
from .corpus import load_bundle
from .errors import HealthchatError
from .followup import FollowupError, FollowupMethod, suggest_followups
from .posts import (
    categorize_posts,
    default_category_config,
    load_category_config,
    rank_and_filter,
    save_curated,
)
from .retrieval import build_index, load_index, save_index
from .topics import BACKENDS, fit_topics, load_topic_model, save_topic_model

logger = logging.getLogger(__name__)


def _load_bundle(config: AppConfig):
    return load_bundle(
        config.resolve(config.base_qa_path),
        config.resolve(config.lookup_qa_path),
        config.resolve(config.conversations_path),
        config.resolve(config.posts_path),
    )


def cmd_ingest(config: AppConfig, args: argparse.Namespace) -> int:
    """Load and validate every corpus file, then report counts."""
    bundle = _load_bundle(config)
    print(
        f"base={len(bundle.base_qa)} lookup={len(bundle.lookup_qa)} "
        f"conv_pairs={len(bundle.conversation_qa)} posts={len(bundle.posts)}"
    )
    return 0


def cmd_build_index(config: AppConfig, args: argparse.Namespace) -> int:
    """Embed the corpora into the three retrieval indexes and snapshot them."""
    from .server import make_provider

    provider = make_provider(config)
    bundle = _load_bundle(config)

    all_qa = bundle.base_qa + bundle.lookup_qa + bundle.conversation_qa
    qa_index = build_index([(qa.id, qa.question, qa.answer) for qa in all_qa], provider)
    save_index(qa_index, config.resolve(config.qa_index_path))
    print(f"qa index: {len(qa_index)} docs -> {config.resolve(config.qa_index_path)}")

    conv_index = build_index(
        [(qa.id, qa.question, qa.answer) for qa in bundle.conversation_qa], provider
    )
    save_index(conv_index, config.resolve(config.conv_index_path))
    print(f"conversation index: {len(conv_index)} docs -> {config.resolve(config.conv_index_path)}")

    post_index = build_index(
        [(p.id, f"{p.title} {p.body}") for p in bundle.posts], provider
    )
    save_index(post_index, config.resolve(config.post_index_path))
    print(f"post index: {len(post_index)} docs -> {config.resolve(config.post_index_path)}")
    return 0


def cmd_fit_topics(config: AppConfig, args: argparse.Namespace) -> int:
    """Cluster conversation questions and snapshot the fitted model(s)."""
    from .server import make_provider

    provider = make_provider(config)
    bundle = _load_bundle(config)
    questions = [(qa.id, qa.question) for qa in bundle.conversation_qa]

    backends = BACKENDS if args.backend == "all" else (args.backend,)
    for backend in backends:
        if backend not in config.topic_model_paths:
            print(f"no snapshot path configured for backend {backend!r}", file=sys.stderr)
            return 1
        model = fit_topics(questions, backend, args.k, args.seed, provider)
        path = config.resolve(config.topic_model_paths[backend])
        save_topic_model(model, path)
        outliers = sum(1 for t in model.assignments.values() if t == -1)
        print(f"{backend}: k={model.k} over {len(questions)} questions, "
              f"{outliers} outliers -> {path}")
    return 0


def cmd_curate_posts(config: AppConfig, args: argparse.Namespace) -> int:
    """Categorize posts, rank by engagement, and snapshot the curated set."""
    bundle = _load_bundle(config)
    category_config = (
        load_category_config(config.resolve(config.categories_path))
        if config.categories_path
        else default_category_config()
    )
    curated = categorize_posts(bundle.posts, category_config, llm=None)
    curated = rank_and_filter(curated, config.posts_per_category)
    save_curated(curated, config.resolve(config.curated_path))
    selected = sum(1 for c in curated if c.selected)
    print(f"curated {len(curated)} posts, {selected} selected "
          f"-> {config.resolve(config.curated_path)}")
    return 0


def cmd_serve(config: AppConfig, args: argparse.Namespace) -> int:
    from .server import serve

    if args.host:
        config = replace_config(config, host=args.host)
    if args.port:
        config = replace_config(config, port=args.port)
    serve(config)
    return 0


def replace_config(config: AppConfig, **changes) -> AppConfig:
    from dataclasses import replace

    return replace(config, **changes)


METHOD_ORDER = (
    FollowupMethod.TOPIC_LLM,
    FollowupMethod.KMEANS_LLM,
    FollowupMethod.LLM_ONLY,
    FollowupMethod.RETRIEVAL_BASED,
)


def cmd_eval_followups(config: AppConfig, args: argparse.Namespace) -> int:
    """Run every follow-up method over the base questions; one JSONL row
    per (question, method)."""
    from .server import load_stub_script, make_provider
    from .llm import ScriptedLLM

    provider = make_provider(config)
    bundle = _load_bundle(config)
    conv_index = load_index(config.resolve(config.conv_index_path), provider)
    models = {}
    for backend, rel in config.topic_model_paths.items():
        path = config.resolve(rel)
        if path.exists():
            models[backend] = load_topic_model(path, provider)

    if args.script:
        llm = ScriptedLLM(load_stub_script(args.script))
    else:
        from .server import make_llm

        llm = make_llm(config)

    backend_for = {"topic_llm": "centroid_outlier", "kmeans_llm": "kmeans"}
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    failures = 0
    with out_path.open("w", encoding="utf-8") as fh:
        for qa in bundle.base_qa:
            session = ChatSession(session_id=f"eval-{qa.id}")
            session.history.append(ChatTurn("user", qa.question, 0.0))
            session.history.append(ChatTurn("agent", qa.answer, 0.0))
            for method in METHOD_ORDER:
                row = {"query_id": qa.id, "query": qa.question, "method": method.value}
                try:
                    result = suggest_followups(
                        session,
                        method,
                        llm,
                        model=models.get(backend_for.get(method.value, "")),
                        conv_index=conv_index,
                        lookup_qa=bundle.lookup_qa,
                        provider=provider,
                    )
                    row["questions"] = list(result.questions)
                    row["context_doc_ids"] = list(result.context_doc_ids)
                except (FollowupError, HealthchatError) as e:
                    row["error"] = str(e)
                    failures += 1
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
                rows += 1
    print(f"wrote {rows} rows ({failures} failures) -> {out_path}")
    return 1 if failures else 0


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="healthchat",
        description="Community-grounded conversational engine for health questions.",
    )
    parser.add_argument(
        "--config", default="data/config/app.json", help="path to the JSON config file"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", help="validate the corpus files and report counts")
    sub.add_parser("build-index", help="embed corpora and write index snapshots")

    fit = sub.add_parser("fit-topics", help="cluster conversation questions")
    fit.add_argument("--backend", choices=BACKENDS + ("all",), default="all")
    fit.add_argument("--k", type=int, default=13)
    fit.add_argument("--seed", type=int, default=0)

    sub.add_parser("curate-posts", help="categorize and rank peer posts")

    srv = sub.add_parser("serve", help="run the HTTP server")
    srv.add_argument("--host", default="")
    srv.add_argument("--port", type=int, default=0)

    ev = sub.add_parser("eval-followups", help="run all follow-up methods over the base questions")
    ev.add_argument("--out", required=True, help="output JSONL path")
    ev.add_argument("--script", default="", help="override stub reply script for the run")

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    handlers = {
        "ingest": cmd_ingest,
        "build-index": cmd_build_index,
        "fit-topics": cmd_fit_topics,
        "curate-posts": cmd_curate_posts,
        "serve": cmd_serve,
        "eval-followups": cmd_eval_followups,
    }
    try:
        config = load_config(args.config)
        return handlers[args.command](config, args)
    except HealthchatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
