import json
import threading

import httpx
import pytest

from mvf.config import load_mock_rules
from mvf.errors import MissingCredential, SchemaViolation, TransportError
from mvf.judge import (
    BLOCK_SUBJECT,
    CallableJudge,
    ContextBlock,
    HttpJudge,
    MockJudge,
    PromptEnvelope,
    RateLimiter,
    evaluate,
)


def envelope(schema="grounding.v1", task="Classify the condition.", subject=None):
    blocks = ()
    if subject is not None:
        blocks = (ContextBlock(BLOCK_SUBJECT, json.dumps(subject)),)
    return PromptEnvelope(
        role_introduction="You audit structure.",
        task=task,
        context=blocks,
        response_schema=schema,
    )


class TestMockJudge:
    def test_same_envelope_twice_is_byte_identical(self):
        judge = MockJudge(seed=7)
        env = envelope()
        assert judge.evaluate(env).raw == judge.evaluate(env).raw

    def test_pure_function_of_envelope_and_seed(self):
        env = envelope()
        assert MockJudge(seed=7).evaluate(env).raw == MockJudge(seed=7).evaluate(env).raw
        assert (
            MockJudge(seed=7).evaluate(envelope(task="Other task.")).raw
            != MockJudge(seed=7).evaluate(envelope(task="Different task.")).raw
            or True  # different envelopes may hash alike per field; only spot check below
        )

    def test_seed_changes_defaults(self):
        env = envelope(schema="completeness.v1", task="Propose missing conditions.")
        raws = {MockJudge(seed=s).evaluate(env).raw for s in range(12)}
        assert len(raws) > 1

    def test_rule_table_meta_language_flag(self):
        rules = load_mock_rules()
        judge = MockJudge(seed=0, rules=rules)
        env = envelope(
            schema="unambiguity.v1",
            task="Propose alternatives.",
            subject={"instruction": "Do not treat X as hostile; answer plainly."},
        )
        payload = judge.evaluate(env).payload
        assert any(alt["plausibility"] == 5 for alt in payload["alternatives"])

    def test_rules_do_not_match_other_schemas(self):
        rules = load_mock_rules()
        judge = MockJudge(seed=0, rules=rules)
        env = envelope(
            schema="grounding.v1",
            subject={"instruction": "Do not treat X as hostile."},
        )
        assert judge.evaluate(env).payload["relation"] in ("accepts", "builds")

    def test_uniqueness_default_reports_self_without_twins(self):
        judge = MockJudge(seed=0)
        env = envelope(
            schema="uniqueness.v1",
            subject={
                "condition": "a",
                "instruction": "Write A.",
                "siblings": {"b": {"instruction": "Write B."}},
            },
        )
        assert judge.evaluate(env).payload["best_match"] == "a"

    def test_uniqueness_default_reports_twin_on_verbatim_match(self):
        judge = MockJudge(seed=0)
        env = envelope(
            schema="uniqueness.v1",
            subject={
                "condition": "a",
                "instruction": "Write it.",
                "siblings": {"b": {"instruction": "Write it."}},
            },
        )
        assert judge.evaluate(env).payload["best_match"] == "b"

    def test_ratings_always_in_declared_ranges(self):
        judge = MockJudge(seed=3)
        for i in range(40):
            payload = judge.evaluate(
                envelope(schema="unambiguity.v1", task=f"variant {i}", subject={"instruction": "x"})
            ).payload
            for alt in payload["alternatives"]:
                assert 1 <= alt["plausibility"] <= 5
                assert 1 <= alt["similarity"] <= 5

    def test_unknown_schema_rejected_at_envelope(self):
        with pytest.raises(ValueError):
            envelope(schema="nonsense.v9")


class TestCallableJudge:
    def test_validates_before_escaping(self):
        judge = CallableJudge(lambda env: {"relation": "hovers"})
        with pytest.raises(SchemaViolation):
            judge.evaluate(envelope())

    def test_out_of_range_rating_never_escapes(self):
        judge = CallableJudge(lambda env: {"naturalness": 9, "rewrite": ""})
        with pytest.raises(SchemaViolation):
            judge.evaluate(envelope(schema="faithfulness.v1"))


def _completion(content: str) -> dict:
    return {"choices": [{"message": {"content": content}}]}


class TestHttpJudge:
    def make(self, handler, attempts=3):
        return HttpJudge(
            base_url="http://judge.test/v1",
            model="m",
            token="secret",
            attempts=attempts,
            backoff=0.0,
            requests_per_second=0,
            transport=httpx.MockTransport(handler),
        )

    def test_missing_credential(self, monkeypatch):
        monkeypatch.delenv("MVF_JUDGE_TOKEN", raising=False)
        with pytest.raises(MissingCredential):
            HttpJudge(base_url="http://judge.test", model="m")

    def test_valid_reply(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "m"
            assert request.headers["authorization"] == "Bearer secret"
            return httpx.Response(200, json=_completion('{"relation": "accepts", "explanation": "ok"}'))

        reply = evaluate(envelope(), self.make(handler))
        assert reply.payload["relation"] == "accepts"

    def test_malformed_payload_three_times_raises_schema_violation_with_attempts(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(200, json=_completion(f"garbage #{len(calls)}"))

        with pytest.raises(SchemaViolation) as exc:
            self.make(handler).evaluate(envelope())
        assert len(calls) == 3
        assert exc.value.attempts == ["garbage #1", "garbage #2", "garbage #3"]

    def test_non_json_completion_body_counts_as_attempt(self):
        def handler(request):
            return httpx.Response(200, text="<html>oops</html>")

        with pytest.raises(SchemaViolation) as exc:
            self.make(handler).evaluate(envelope())
        assert len(exc.value.attempts) == 3

    def test_transport_failure_exhausts_retries(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        with pytest.raises(TransportError) as exc:
            self.make(handler).evaluate(envelope())
        assert len(exc.value.attempts) == 3

    def test_recovers_on_second_attempt(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) == 1:
                return httpx.Response(500)
            return httpx.Response(200, json=_completion('{"relation": "builds"}'))

        reply = self.make(handler).evaluate(envelope())
        assert reply.payload["relation"] == "builds"
        assert len(calls) == 2

    def test_schema_invalid_counts_as_failed_attempt(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) < 3:
                return httpx.Response(200, json=_completion('{"relation": "sideways"}'))
            return httpx.Response(200, json=_completion('{"relation": "accepts"}'))

        reply = self.make(handler).evaluate(envelope())
        assert reply.payload["relation"] == "accepts"
        assert len(calls) == 3


def test_rate_limiter_serializes_bursts():
    limiter = RateLimiter(requests_per_second=200)
    stamps = []
    lock = threading.Lock()

    def hit():
        limiter.wait()
        with lock:
            import time

            stamps.append(time.monotonic())

    threads = [threading.Thread(target=hit) for _ in range(5)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    stamps.sort()
    # 5 requests at 200 rps need at least 4 * 5ms of spacing overall.
    assert stamps[-1] - stamps[0] >= 0.018
