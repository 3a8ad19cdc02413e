"""HTTP endpoint contract: status codes, response shapes, the one error
shape, and the mandatory example disclaimer."""

from __future__ import annotations

import time

from fastapi.testclient import TestClient

from healthchat.llm import ScriptedLLM
from healthchat.posts import DISCLAIMER
from healthchat.server import build_state, create_app

ANSWER = "A grounded reply."
CHIPS = "Chip one?\nChip two?\nChip three?\nChip four?"


def make_client(built_config, script, **config_changes):
    import dataclasses

    config = dataclasses.replace(built_config, **config_changes) if config_changes else built_config
    state = build_state(config, llm=ScriptedLLM(script))
    return TestClient(create_app(state)), state


def started_session(client):
    response = client.post("/sessions")
    assert response.status_code == 201
    return response.json()["session_id"]


class TestHealthAndShapes:
    def test_healthz(self, built_config):
        client, _ = make_client(built_config, [])
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_create_session_shape(self, built_config):
        client, state = make_client(built_config, [])
        response = client.post("/sessions")
        assert response.status_code == 201
        body = response.json()
        assert set(body) == {"greeting", "session_id", "followups", "active_topic"}
        assert body["greeting"] == state.engine.greeting
        assert body["active_topic"] is None
        assert body["followups"]["method"] == "retrieval_based"
        assert 1 <= len(body["followups"]["questions"]) <= 4

    def test_get_session_includes_history(self, built_config):
        client, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        client.post(f"/sessions/{sid}/messages", json={"query": "What is a polyp?"})
        body = client.get(f"/sessions/{sid}").json()
        roles = [t["role"] for t in body["history"]]
        assert roles == ["agent", "user", "agent"]
        assert body["history"][1]["text"] == "What is a polyp?"
        assert all(set(t) == {"role", "text", "ts"} for t in body["history"])

    def test_message_reply_shape(self, built_config):
        client, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        response = client.post(
            f"/sessions/{sid}/messages", json={"query": "What is a polyp?"}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["reply"] == ANSWER
        assert body["session_id"] == sid
        assert body["followups"]["questions"] == [
            "Chip one?", "Chip two?", "Chip three?", "Chip four?"
        ]
        assert body["followups"]["method"] == "topic_llm"

    def test_method_override(self, built_config):
        client, _ = make_client(built_config, [ANSWER])
        sid = started_session(client)
        body = client.post(
            f"/sessions/{sid}/messages",
            json={"query": "tell me about enteritis", "method": "retrieval_based"},
        ).json()
        assert body["followups"]["method"] == "retrieval_based"

    def test_explain(self, built_config):
        client, state = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/explain", json={"selected": "ECG"})
        assert response.status_code == 200
        assert response.json()["reply"] == ANSWER
        recorded = state.llm.recording[0].messages[-1].content
        assert recorded == "Please introduce what ECG is"

    def test_autocomplete(self, built_config, bundle, prefix_index):
        client, _ = make_client(built_config, [])
        response = client.get("/autocomplete", params={"q": "hem"})
        assert response.status_code == 200
        suggestions = response.json()["suggestions"]
        assert suggestions == prefix_index.suggest("hem", 5)
        assert 0 < len(suggestions) <= 5
        assert client.get("/autocomplete", params={"q": ""}).json()["suggestions"] == []
        assert client.get("/autocomplete").json()["suggestions"] == []

    def test_topics_listing(self, built_config, taxonomy):
        client, _ = make_client(built_config, [])
        body = client.get("/topics").json()
        assert body["topics"] == list(taxonomy.topics)
        assert len(body["topics"]) == 16

    def test_current_topic(self, built_config, taxonomy):
        client, _ = make_client(built_config, [ANSWER, CHIPS, "not a topic"])
        sid = started_session(client)
        client.post(
            f"/sessions/{sid}/messages",
            json={"query": "How should I prepare my diet before a colonoscopy?"},
        )
        body = client.get(f"/sessions/{sid}/topic").json()
        assert body["topic"] in taxonomy.topics

    def test_switch_topic(self, built_config):
        client, _ = make_client(built_config, [CHIPS])
        sid = started_session(client)
        response = client.post(
            f"/sessions/{sid}/topic", json={"topic": "Dietary Preparation"}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["topic"] == "Dietary Preparation"
        assert body["followups"]["method"] == "llm_only"
        assert client.get(f"/sessions/{sid}").json()["active_topic"] == "Dietary Preparation"


class TestExampleEndpoint:
    def test_serves_post_with_disclaimer(self, built_config):
        client, _ = make_client(built_config, [ANSWER, CHIPS, "Surgery Stories"])
        sid = started_session(client)
        client.post(
            f"/sessions/{sid}/messages",
            json={"query": "What is recovery like after colon surgery?"},
        )
        response = client.post(f"/sessions/{sid}/example", json={})
        assert response.status_code == 200
        body = response.json()
        assert body["disclaimer"] == DISCLAIMER
        assert set(body["post"]) == {"id", "title", "body", "category", "engagement"}
        assert body["post"]["engagement"] >= 0

    def test_category_override(self, built_config, curated):
        client, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        client.post(f"/sessions/{sid}/messages", json={"query": "what is a polyp"})
        body = client.post(
            f"/sessions/{sid}/example", json={"category": "intestinal polyps"}
        ).json()
        assert body["post"]["category"] == "intestinal polyps"
        assert body["disclaimer"] == DISCLAIMER

    def test_unknown_category(self, built_config):
        client, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        client.post(f"/sessions/{sid}/messages", json={"query": "what is a polyp"})
        response = client.post(
            f"/sessions/{sid}/example", json={"category": "Nonsense"}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_request"

    def test_requires_a_completed_exchange(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/example", json={})
        assert response.status_code == 400
        assert "exchange" in response.json()["message"]

    def test_never_serves_an_ad(self, built_config, bundle):
        ad_ids = {p.id for p in bundle.posts if p.ad_flag}
        client, _ = make_client(
            built_config, [ANSWER, CHIPS] + ["anti-cancer diaries"] * 10
        )
        sid = started_session(client)
        client.post(f"/sessions/{sid}/messages", json={"query": "what should I eat"})
        for _ in range(10):
            body = client.post(f"/sessions/{sid}/example", json={}).json()
            assert body["post"]["id"] not in ad_ids


class TestErrorShape:
    def test_unknown_session_404(self, built_config):
        client, _ = make_client(built_config, [])
        for call in (
            lambda: client.get("/sessions/ghost"),
            lambda: client.post("/sessions/ghost/messages", json={"query": "hi"}),
            lambda: client.post("/sessions/ghost/explain", json={"selected": "x"}),
            lambda: client.post("/sessions/ghost/example", json={}),
        ):
            response = call()
            assert response.status_code == 404
            body = response.json()
            assert body["code"] == "unknown_session"
            assert set(body) == {"code", "message"}

    def test_empty_query_400(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/messages", json={"query": "   "})
        assert response.status_code == 400
        assert response.json() == {"code": "invalid_request", "message": "empty query"}

    def test_malformed_body_400(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/messages", json={"wrong": "field"})
        assert response.status_code == 400
        assert response.json() == {
            "code": "invalid_request",
            "message": "malformed request body",
        }

    def test_unknown_method_400(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(
            f"/sessions/{sid}/messages", json={"query": "hi", "method": "telepathy"}
        )
        assert response.status_code == 400
        assert "telepathy" in response.json()["message"]

    def test_overlong_selection_400(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(
            f"/sessions/{sid}/explain", json={"selected": "x" * 201}
        )
        assert response.status_code == 400

    def test_unknown_topic_400(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/topic", json={"topic": "Nope"})
        assert response.status_code == 400
        assert "Medical Definitions" in response.json()["message"]

    def test_busy_session_409(self, built_config):
        client, state = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        lock = state.engine._lock_for(sid)
        assert lock.acquire(blocking=False)
        try:
            response = client.post(
                f"/sessions/{sid}/messages", json={"query": "hi"}
            )
            assert response.status_code == 409
            assert response.json()["code"] == "session_busy"
        finally:
            lock.release()

    def test_exhausted_gateway_502(self, built_config):
        client, _ = make_client(built_config, [])
        sid = started_session(client)
        response = client.post(f"/sessions/{sid}/messages", json={"query": "hi"})
        assert response.status_code == 502
        assert response.json()["code"] == "llm_unavailable"


class TestCors:
    def test_origin_allowed_when_configured(self, built_config):
        client, _ = make_client(
            built_config, [], cors_origins=("http://localhost:5173",)
        )
        response = client.get(
            "/healthz", headers={"Origin": "http://localhost:5173"}
        )
        assert response.headers.get("access-control-allow-origin") == "http://localhost:5173"

    def test_no_cors_headers_by_default(self, built_config):
        client, _ = make_client(built_config, [])
        response = client.get("/healthz", headers={"Origin": "http://evil.example"})
        assert "access-control-allow-origin" not in response.headers


class TestPersistence:
    def test_sessions_survive_a_rebuild(self, built_config):
        client1, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client1)
        client1.post(f"/sessions/{sid}/messages", json={"query": "What is a polyp?"})

        client2, _ = make_client(built_config, [ANSWER, CHIPS])
        body = client2.get(f"/sessions/{sid}").json()
        assert [t["role"] for t in body["history"]] == ["agent", "user", "agent"]
        follow = client2.post(
            f"/sessions/{sid}/messages", json={"query": "Is it dangerous?"}
        )
        assert follow.status_code == 200


class TestLatency:
    def test_reads_answer_quickly(self, built_config):
        client, _ = make_client(built_config, [ANSWER, CHIPS])
        sid = started_session(client)
        client.post(f"/sessions/{sid}/messages", json={"query": "what is a polyp"})
        for path, params in (
            ("/healthz", None),
            ("/autocomplete", {"q": "hemorrhoid"}),
            (f"/sessions/{sid}", None),
            ("/topics", None),
        ):
            start = time.perf_counter()
            client.get(path, params=params)
            elapsed = time.perf_counter() - start
            assert elapsed < 0.1, f"{path} took {elapsed * 1000:.1f}ms"
