"""Gateway to judge backends: a deterministic mock and an HTTP service.

Every judge interaction goes through a PromptEnvelope naming a registered
reply schema; replies are validated here so out-of-range ratings never
escape to callers. The mock backend is a pure function of (envelope, seed,
rule table): rules are matched first, then a schema-specific default is
derived from a stable hash of the envelope. The HTTP backend speaks a
chat-completion style JSON protocol with retries, exponential backoff, and
a request rate limiter.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import httpx
import jsonschema

from .errors import MissingCredential, SchemaViolation, TransportError

ENV_TOKEN = "MVF_JUDGE_TOKEN"
ENV_URL = "MVF_JUDGE_URL"
ENV_MODEL = "MVF_JUDGE_MODEL"

# Context block titles with structured (JSON) bodies the mock can read.
BLOCK_SUBJECT = "subject"
BLOCK_PATH = "path"
BLOCK_AXES = "axes"
BLOCK_TERMINALS = "terminals"
BLOCK_FEEDBACK = "feedback"

_RATING_5 = {"type": "integer", "minimum": 1, "maximum": 5}
_RATING_4 = {"type": "integer", "minimum": 1, "maximum": 4}

SCHEMAS: dict[str, dict] = {
    "unambiguity.v1": {
        "type": "object",
        "required": ["alternatives"],
        "properties": {
            "alternatives": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["output", "plausibility", "similarity"],
                    "properties": {
                        "output": {"type": "string"},
                        "plausibility": _RATING_5,
                        "similarity": _RATING_5,
                    },
                },
            }
        },
    },
    "completeness.v1": {
        "type": "object",
        "required": ["proposals"],
        "properties": {
            "proposals": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["condition", "plausibility", "ruled_out"],
                    "properties": {
                        "condition": {"type": "string"},
                        "plausibility": _RATING_5,
                        "ruled_out": {"type": "boolean"},
                        "ruled_out_by": {"type": "string"},
                    },
                },
            }
        },
    },
    "faithfulness.v1": {
        "type": "object",
        "required": ["naturalness", "rewrite"],
        "properties": {"naturalness": _RATING_4, "rewrite": {"type": "string"}},
    },
    "grounding.v1": {
        "type": "object",
        "required": ["relation"],
        "properties": {
            "relation": {"enum": ["accepts", "builds", "stretches", "contradicts"]},
            "explanation": {"type": "string"},
        },
    },
    "continuity.v1": {
        "type": "object",
        "required": ["alternative_question", "follows_rating", "similarity"],
        "properties": {
            "alternative_question": {"type": "string"},
            "follows_rating": _RATING_5,
            "similarity": _RATING_5,
        },
    },
    "uniqueness.v1": {
        "type": "object",
        "required": ["alternative_transformation", "likelihood", "best_match"],
        "properties": {
            "alternative_transformation": {"type": "string"},
            "likelihood": _RATING_5,
            "best_match": {"type": "string"},
        },
    },
    "tag-bootstrap.v1": {
        "type": "object",
        "required": ["vocabularies", "assignments"],
        "properties": {
            "vocabularies": {
                "type": "object",
                "additionalProperties": {"type": "array", "items": {"type": "string"}},
            },
            "assignments": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "additionalProperties": {"type": "string"},
                },
            },
        },
    },
    "tag-assign.v1": {
        "type": "object",
        "required": ["tags"],
        "properties": {
            "tags": {"type": "object", "additionalProperties": {"type": "string"}}
        },
    },
    "review.v1": {
        "type": "object",
        "required": ["field", "rewritten", "reason"],
        "properties": {
            "field": {"type": "string"},
            "rewritten": {"type": "string"},
            "reason": {"enum": ["coyness", "jargon", "clarity", "none"]},
        },
    },
    "regen.v1": {
        "type": "object",
        "required": ["decline", "edits"],
        "properties": {
            "decline": {"type": "boolean"},
            "edits": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["field", "rewritten"],
                    "properties": {"field": {"type": "string"}, "rewritten": {"type": "string"}},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ContextBlock:
    title: str
    body: str


@dataclass(frozen=True)
class PromptEnvelope:
    role_introduction: str
    task: str
    context: tuple[ContextBlock, ...]
    response_schema: str

    def __post_init__(self):
        if self.response_schema not in SCHEMAS:
            raise ValueError(f"unknown response schema {self.response_schema!r}")

    def block(self, title: str) -> str | None:
        for blk in self.context:
            if blk.title == title:
                return blk.body
        return None

    def canonical(self) -> str:
        return json.dumps(
            {
                "role_introduction": self.role_introduction,
                "task": self.task,
                "context": [[b.title, b.body] for b in self.context],
                "response_schema": self.response_schema,
            },
            sort_keys=True,
            ensure_ascii=False,
        )

    def with_feedback(self, feedback: str) -> "PromptEnvelope":
        kept = tuple(b for b in self.context if b.title != BLOCK_FEEDBACK)
        return PromptEnvelope(
            role_introduction=self.role_introduction,
            task=self.task,
            context=kept + (ContextBlock(BLOCK_FEEDBACK, feedback),),
            response_schema=self.response_schema,
        )

    def render_user_message(self) -> str:
        parts = [self.task, ""]
        for blk in self.context:
            parts.append(f"## {blk.title}")
            parts.append(blk.body)
            parts.append("")
        parts.append(
            "Reply with a single JSON object matching this schema "
            f"({self.response_schema}):"
        )
        parts.append(json.dumps(SCHEMAS[self.response_schema]))
        return "\n".join(parts)


@dataclass(frozen=True)
class JudgeReply:
    schema: str
    payload: dict
    raw: str


def validate_payload(schema_name: str, payload: object, attempts: list[str] | None = None) -> dict:
    try:
        jsonschema.validate(payload, SCHEMAS[schema_name])
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(schema_name, exc.message, attempts) from None
    return payload  # type: ignore[return-value]


class JudgeBackend(Protocol):
    def evaluate(self, env: PromptEnvelope) -> JudgeReply: ...


def evaluate(env: PromptEnvelope, backend: JudgeBackend) -> JudgeReply:
    """Run one judge interaction; the reply is schema-valid or this raises."""
    return backend.evaluate(env)


# ---------------------------------------------------------------------------
# Deterministic mock


def _stable_hash(seed: int, text: str) -> int:
    digest = hashlib.sha256(f"{seed}:{text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _json_block(env: PromptEnvelope, title: str) -> dict:
    body = env.block(title)
    if body is None:
        return {}
    try:
        return json.loads(body)
    except json.JSONDecodeError:
        return {}


class MockJudge:
    """Deterministic judge: rule table first, hash-derived defaults second.

    Rules match on (schema, case-insensitive substring); the substring is
    searched in the task, subject block, and feedback block, so content in
    the path context never triggers a rule meant for the node under review.
    """

    def __init__(self, seed: int = 0, rules: list[dict] | None = None):
        self.seed = seed
        self.rules = list(rules or [])

    def evaluate(self, env: PromptEnvelope) -> JudgeReply:
        payload = self._rule_payload(env)
        if payload is None:
            payload = self._default_payload(env)
        validate_payload(env.response_schema, payload)
        raw = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return JudgeReply(schema=env.response_schema, payload=payload, raw=raw)

    def _match_text(self, env: PromptEnvelope) -> str:
        parts = [env.task]
        for title in (BLOCK_SUBJECT, BLOCK_FEEDBACK):
            body = env.block(title)
            if body:
                parts.append(body)
        return "\n".join(parts).lower()

    def _rule_payload(self, env: PromptEnvelope) -> dict | None:
        text = self._match_text(env)
        for rule in self.rules:
            if rule.get("schema") != env.response_schema:
                continue
            needle = rule.get("when_contains", "").lower()
            if needle and needle in text:
                return json.loads(json.dumps(rule["payload"]))
        return None

    def _default_payload(self, env: PromptEnvelope) -> dict:
        h = _stable_hash(self.seed, env.canonical())
        schema = env.response_schema
        if schema == "unambiguity.v1":
            return {
                "alternatives": [
                    {
                        "output": "A nearby reading that stays within the committed interpretation",
                        "plausibility": 1 + h % 2,
                        "similarity": 4 + (h >> 2) % 2,
                    }
                ]
            }
        if schema == "completeness.v1":
            ruled_out = h % 2 == 0
            return {
                "proposals": [
                    {
                        "condition": "A further stance this decision might also have covered",
                        "plausibility": 1 + h % 3,
                        "ruled_out": ruled_out,
                        "ruled_out_by": "an upstream commitment" if ruled_out else "",
                    }
                ]
            }
        if schema == "faithfulness.v1":
            return {"naturalness": 3 + h % 2, "rewrite": ""}
        if schema == "grounding.v1":
            return {
                "relation": "accepts" if h % 2 == 0 else "builds",
                "explanation": "Coherent with the commitments established upstream.",
            }
        if schema == "continuity.v1":
            return {
                "alternative_question": "A rephrasing of the same next question",
                "follows_rating": 4 + h % 2,
                "similarity": 3 + (h >> 2) % 3,
            }
        if schema == "uniqueness.v1":
            subject = _json_block(env, BLOCK_SUBJECT)
            own_key = subject.get("condition", "")
            instruction = subject.get("instruction", "")
            best = own_key
            twins = sorted(
                key
                for key, sib in (subject.get("siblings") or {}).items()
                if sib.get("instruction") == instruction
            )
            if twins:
                best = twins[0]
            return {
                "alternative_transformation": "A variant transformation the condition could also license",
                "likelihood": 4 + h % 2,
                "best_match": best,
            }
        if schema == "tag-bootstrap.v1":
            subject = _json_block(env, BLOCK_SUBJECT)
            axes = subject.get("axes", [])
            terminals = subject.get("terminals", {})
            vocabularies: dict[str, list[str]] = {}
            for axis in axes:
                if axis["mode"] == "discovered":
                    lo, hi = axis["min_values"], axis["max_values"]
                    count = lo + _stable_hash(self.seed, axis["name"]) % (hi - lo + 1)
                    vocabularies[axis["name"]] = [
                        f"{axis['name']} theme {i + 1}" for i in range(count)
                    ]
            assignments: dict[str, dict[str, str]] = {}
            for tid in terminals:
                tags = {}
                for axis in axes:
                    values = vocabularies.get(axis["name"]) or axis.get("values") or []
                    pick = _stable_hash(self.seed, f"{tid}:{axis['name']}") % len(values)
                    tags[axis["name"]] = values[pick]
                assignments[tid] = tags
            return {"vocabularies": vocabularies, "assignments": assignments}
        if schema == "tag-assign.v1":
            subject = _json_block(env, BLOCK_SUBJECT)
            tags = {}
            for axis in subject.get("axes", []):
                values = axis.get("values") or []
                tid = subject.get("terminal", "")
                pick = _stable_hash(self.seed, f"{tid}:{axis['name']}") % len(values)
                tags[axis["name"]] = values[pick]
            return {"tags": tags}
        if schema == "review.v1":
            return {"field": "", "rewritten": "", "reason": "none"}
        if schema == "regen.v1":
            return {"decline": True, "edits": []}
        raise ValueError(f"no mock default for schema {schema!r}")


class CallableJudge:
    """Adapter for scripted judges in tests: a function from envelope to
    payload dict (validated here before it escapes)."""

    def __init__(self, fn: Callable[[PromptEnvelope], dict]):
        self.fn = fn

    def evaluate(self, env: PromptEnvelope) -> JudgeReply:
        payload = validate_payload(env.response_schema, self.fn(env))
        return JudgeReply(env.response_schema, payload, json.dumps(payload, sort_keys=True))


# ---------------------------------------------------------------------------
# HTTP backend


class RateLimiter:
    """Serializes bursts to at most requests_per_second across threads."""

    def __init__(self, requests_per_second: float):
        self.interval = 1.0 / requests_per_second if requests_per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def wait(self):
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_slot)
            self._next_slot = slot + self.interval
        delay = slot - now
        if delay > 0:
            time.sleep(delay)


class HttpJudge:
    """Chat-completion-style HTTP judge.

    Configured from MVF_JUDGE_URL / MVF_JUDGE_MODEL / MVF_JUDGE_TOKEN unless
    overridden. Retries transport failures and schema-invalid payloads up to
    `attempts` times with exponential backoff, then raises with all raw
    attempt bodies attached.
    """

    def __init__(
        self,
        base_url: str | None = None,
        model: str | None = None,
        token: str | None = None,
        attempts: int = 3,
        backoff: float = 0.5,
        requests_per_second: float = 4.0,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 60.0,
    ):
        self.base_url = (base_url or os.environ.get(ENV_URL, "http://localhost:8080/v1")).rstrip("/")
        self.model = model or os.environ.get(ENV_MODEL, "judge")
        self.token = token if token is not None else os.environ.get(ENV_TOKEN)
        if not self.token:
            raise MissingCredential(ENV_TOKEN)
        self.attempts = attempts
        self.backoff = backoff
        self.limiter = RateLimiter(requests_per_second)
        self._client = httpx.Client(transport=transport, timeout=timeout)

    def close(self):
        self._client.close()

    def evaluate(self, env: PromptEnvelope) -> JudgeReply:
        raw_attempts: list[str] = []
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            self.limiter.wait()
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions",
                    headers={"Authorization": f"Bearer {self.token}"},
                    json={
                        "model": self.model,
                        "temperature": 0,
                        "messages": [
                            {"role": "system", "content": env.role_introduction},
                            {"role": "user", "content": env.render_user_message()},
                        ],
                    },
                )
                response.raise_for_status()
            except httpx.HTTPError as exc:
                last_error = exc
                raw_attempts.append(f"<transport: {exc}>")
                continue
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                last_error = SchemaViolation(env.response_schema, f"malformed completion body: {exc}")
                raw_attempts.append(response.text)
                continue
            raw_attempts.append(content)
            try:
                payload = json.loads(content)
                validate_payload(env.response_schema, payload)
            except (json.JSONDecodeError, SchemaViolation) as exc:
                last_error = exc
                continue
            return JudgeReply(env.response_schema, payload, content)
        if isinstance(last_error, httpx.HTTPError):
            raise TransportError(
                f"judge unreachable after {self.attempts} attempts: {last_error}", raw_attempts
            )
        raise SchemaViolation(env.response_schema, str(last_error), raw_attempts)
