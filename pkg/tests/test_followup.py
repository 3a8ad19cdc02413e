"""The four follow-up generation methods and their prompt contract."""

import pytest

from healthchat.chat import ChatSession, ChatTurn
from healthchat.errors import ValidationError
from healthchat.followup import (
    FOLLOWUP_CAP,
    FollowupError,
    FollowupMethod,
    FollowupSet,
    parse_questions,
    render_followup_prompt,
    render_history,
    suggest_followups,
)
from healthchat.llm import FailingLLM, ScriptedLLM
from healthchat.topics import OUTLIER_TOPIC, assign_topic

from .oracles import retrieval_followups_oracle
from .test_topics import FAR_QUERY

FOUR = "Q one?\nQ two?\nQ three?\nQ four?"


def session_with_exchange(query, answer, session_id="s1", earlier=()):
    session = ChatSession(session_id=session_id)
    for role, text in earlier:
        session.history.append(ChatTurn(role, text, 0.0))
    session.history.append(ChatTurn("user", query, 1.0))
    session.history.append(ChatTurn("agent", answer, 2.0))
    return session


class TestParseQuestions:
    def test_plain_lines(self):
        assert parse_questions("A?\nB?\nC?") == ["A?", "B?", "C?"]

    def test_list_markers_stripped(self):
        reply = "1. First?\n2) Second?\n- Third?\n* Fourth?"
        assert parse_questions(reply) == ["First?", "Second?", "Third?", "Fourth?"]

    def test_bullet_character_stripped(self):
        assert parse_questions("• Bullet question?") == ["Bullet question?"]

    def test_blank_lines_ignored(self):
        assert parse_questions("A?\n\n   \nB?") == ["A?", "B?"]

    def test_duplicates_collapse(self):
        assert parse_questions("Same?\nSame?\nOther?") == ["Same?", "Other?"]

    def test_capped_at_four(self):
        reply = "\n".join(f"Q{i}?" for i in range(9))
        assert len(parse_questions(reply)) == FOLLOWUP_CAP

    def test_empty_reply(self):
        assert parse_questions("") == []
        assert parse_questions("\n  \n") == []


class TestFollowupSet:
    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            FollowupSet(questions=(), method=FollowupMethod.LLM_ONLY)

    def test_five_rejected(self):
        with pytest.raises(ValidationError):
            FollowupSet(
                questions=("a", "b", "c", "d", "e"), method=FollowupMethod.LLM_ONLY
            )

    def test_duplicates_rejected(self):
        with pytest.raises(ValidationError, match="distinct"):
            FollowupSet(questions=("a", "a"), method=FollowupMethod.LLM_ONLY)


class TestPromptRendering:
    def test_contains_exchange_and_history(self):
        session = session_with_exchange(
            "what are polyps", "small growths",
            earlier=(("agent", "hello there"),),
        )
        prompt = render_followup_prompt(session, [])
        assert "what are polyps" in prompt
        assert "small growths" in prompt
        assert "agent: hello there" in prompt
        assert "Questions other patients asked" not in prompt

    def test_topic_block_lists_questions_as_bullets(self):
        session = session_with_exchange("q", "a")
        prompt = render_followup_prompt(session, ["T1?", "T2?"])
        assert "Questions other patients asked on this topic:" in prompt
        assert "- T1?" in prompt and "- T2?" in prompt

    def test_empty_history_placeholder(self):
        assert render_history([]) == "(no earlier conversation)"

    def test_deterministic(self):
        session = session_with_exchange("q", "a")
        assert render_followup_prompt(session, ["T?"]) == render_followup_prompt(
            session, ["T?"]
        )


class TestTopicMethods:
    def test_topic_llm_grounds_prompt_in_cluster(self, topic_model, conv_index, bundle):
        query = bundle.conversation_qa[0].question
        session = session_with_exchange(query, "an answer")
        llm = ScriptedLLM([FOUR])
        result = suggest_followups(
            session, FollowupMethod.TOPIC_LLM, llm,
            model=topic_model, conv_index=conv_index,
        )
        assert result.method is FollowupMethod.TOPIC_LLM
        assert 1 <= len(result.questions) <= 4
        assert 1 <= len(result.context_doc_ids) <= 10
        # the recorded prompt embeds exactly the in-topic questions
        prompt = llm.recording[0].messages[0].content
        for doc_id in result.context_doc_ids:
            assert conv_index.text_of(doc_id) in prompt

    def test_context_comes_from_the_assigned_topic(self, topic_model, conv_index, bundle, provider):
        query = bundle.conversation_qa[5].question
        session = session_with_exchange(query, "an answer")
        result = suggest_followups(
            session, FollowupMethod.TOPIC_LLM, ScriptedLLM([FOUR]),
            model=topic_model, conv_index=conv_index,
        )
        topic = assign_topic(topic_model, query, provider)
        assert topic != OUTLIER_TOPIC
        for doc_id in result.context_doc_ids:
            assert topic_model.assignments[doc_id] == topic

    def test_outlier_query_degrades_to_no_context(self, topic_model, conv_index):
        session = session_with_exchange(FAR_QUERY, "an answer")
        llm = ScriptedLLM([FOUR])
        result = suggest_followups(
            session, FollowupMethod.TOPIC_LLM, llm,
            model=topic_model, conv_index=conv_index,
        )
        assert result.context_doc_ids == ()
        assert "Questions other patients asked" not in llm.recording[0].messages[0].content

    def test_kmeans_method_requires_kmeans_backend(self, topic_model, conv_index):
        session = session_with_exchange("q", "a")
        with pytest.raises(ValidationError, match="kmeans"):
            suggest_followups(
                session, FollowupMethod.KMEANS_LLM, ScriptedLLM([FOUR]),
                model=topic_model, conv_index=conv_index,
            )

    def test_kmeans_far_query_still_gets_context(self, kmeans_model, conv_index):
        session = session_with_exchange(FAR_QUERY, "a")
        result = suggest_followups(
            session, FollowupMethod.KMEANS_LLM, ScriptedLLM([FOUR]),
            model=kmeans_model, conv_index=conv_index,
        )
        assert len(result.context_doc_ids) > 0

    def test_missing_model_rejected(self, conv_index):
        session = session_with_exchange("q", "a")
        with pytest.raises(ValidationError):
            suggest_followups(
                session, FollowupMethod.TOPIC_LLM, ScriptedLLM([FOUR]),
                conv_index=conv_index,
            )

    def test_llm_failure_is_typed_and_names_method(self, topic_model, conv_index):
        session = session_with_exchange("q", "a")
        with pytest.raises(FollowupError, match="topic_llm"):
            suggest_followups(
                session, FollowupMethod.TOPIC_LLM, FailingLLM(),
                model=topic_model, conv_index=conv_index,
            )

    def test_unusable_reply_is_typed_error(self, topic_model, conv_index):
        session = session_with_exchange("q", "a")
        with pytest.raises(FollowupError, match="no usable"):
            suggest_followups(
                session, FollowupMethod.TOPIC_LLM, ScriptedLLM(["\n  \n"]),
                model=topic_model, conv_index=conv_index,
            )


class TestLLMOnly:
    def test_needs_no_index_or_model(self):
        session = session_with_exchange("what is staging", "levels of spread")
        llm = ScriptedLLM([FOUR])
        result = suggest_followups(session, FollowupMethod.LLM_ONLY, llm)
        assert result.method is FollowupMethod.LLM_ONLY
        assert result.context_doc_ids == ()
        assert result.questions == ("Q one?", "Q two?", "Q three?", "Q four?")

    def test_prompt_carries_no_topic_block(self):
        session = session_with_exchange("q", "a")
        llm = ScriptedLLM([FOUR])
        suggest_followups(session, FollowupMethod.LLM_ONLY, llm)
        assert "Questions other patients asked" not in llm.recording[0].messages[0].content


class TestRetrievalBased:
    def test_never_calls_the_llm(self, bundle, provider):
        session = session_with_exchange("tell me about hemorrhoids", "a")
        llm = ScriptedLLM([])  # any call would fail loudly
        result = suggest_followups(
            session, FollowupMethod.RETRIEVAL_BASED, llm,
            lookup_qa=bundle.lookup_qa, provider=provider,
        )
        assert llm.calls == 0
        assert result.method is FollowupMethod.RETRIEVAL_BASED

    def test_disease_mention_filters_candidates(self, bundle, provider):
        session = session_with_exchange("I was told I have diverticulitis", "a")
        result = suggest_followups(
            session, FollowupMethod.RETRIEVAL_BASED, ScriptedLLM([]),
            lookup_qa=bundle.lookup_qa, provider=provider,
        )
        by_id = {qa.id: qa for qa in bundle.lookup_qa}
        for doc_id in result.context_doc_ids:
            assert "diverticulitis" in by_id[doc_id].disease_tags

    def test_matches_filter_then_rank_oracle(self, bundle, provider):
        queries = [
            "my doctor suspects ulcerative colitis",
            "is appendicitis an emergency",
            "no disease mentioned at all here",
        ]
        items = [
            {"id": qa.id, "question": qa.question, "disease_tags": list(qa.disease_tags)}
            for qa in bundle.lookup_qa
        ]
        tag_vocab = {t for qa in bundle.lookup_qa for t in qa.disease_tags}
        for query in queries:
            session = session_with_exchange(query, "a")
            result = suggest_followups(
                session, FollowupMethod.RETRIEVAL_BASED, ScriptedLLM([]),
                lookup_qa=bundle.lookup_qa, provider=provider,
            )
            detected = {t for t in tag_vocab if t.lower() in query.lower()}
            sims = {
                qa.id: float(
                    provider.embed(qa.question) @ provider.embed(query)
                )
                for qa in bundle.lookup_qa
            }
            expected = retrieval_followups_oracle(items, detected, sims)
            assert list(result.questions) == expected, query

    def test_no_mention_degrades_to_global_ranking(self, bundle, provider):
        session = session_with_exchange("totally generic question", "a")
        result = suggest_followups(
            session, FollowupMethod.RETRIEVAL_BASED, ScriptedLLM([]),
            lookup_qa=bundle.lookup_qa, provider=provider,
        )
        assert len(result.questions) == 4

    def test_missing_corpus_rejected(self, provider):
        session = session_with_exchange("q", "a")
        with pytest.raises(ValidationError):
            suggest_followups(
                session, FollowupMethod.RETRIEVAL_BASED, ScriptedLLM([]),
                provider=provider,
            )


class TestTotality:
    def test_every_method_yields_set_or_typed_error(
        self, bundle, topic_model, kmeans_model, conv_index, provider
    ):
        model_for = {
            FollowupMethod.TOPIC_LLM: topic_model,
            FollowupMethod.KMEANS_LLM: kmeans_model,
        }
        for qa in bundle.base_qa[:6]:
            for method in FollowupMethod:
                session = session_with_exchange(qa.question, qa.answer)
                try:
                    result = suggest_followups(
                        session, method, ScriptedLLM([FOUR]),
                        model=model_for.get(method),
                        conv_index=conv_index,
                        lookup_qa=bundle.lookup_qa,
                        provider=provider,
                    )
                except FollowupError:
                    continue
                assert 1 <= len(result.questions) <= 4
                assert all(q.strip() for q in result.questions)
