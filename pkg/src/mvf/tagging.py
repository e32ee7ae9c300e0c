"""Axis tagging of terminal outputs: bootstrap (propose + assign) and grow.

Bootstrap is one batched judge interaction over every terminal at once, so
vocabulary and assignments come from a single consistent view; discovered
axes are frozen afterward. Grow tags new terminals one at a time against
the frozen vocabulary and can never change it: an out-of-vocabulary reply
is re-prompted once with the vocabulary restated, then the terminal is
recorded as Untagged and the run continues.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import (
    AxesNotFinalized,
    BootstrapAlreadyDone,
    IncompleteAssignment,
    InvalidFixedValue,
    VocabularyOutOfRange,
)
from .judge import BLOCK_SUBJECT, ContextBlock, JudgeBackend, PromptEnvelope

FIXED = "fixed"
DISCOVERED = "discovered"


@dataclass(frozen=True)
class AxisSpec:
    name: str
    mode: str  # FIXED or DISCOVERED
    values: tuple[str, ...]
    min_values: int | None = None
    max_values: int | None = None
    frozen: bool = False

    @classmethod
    def fixed(cls, name: str, values: list[str]) -> "AxisSpec":
        if not values:
            raise ValueError(f"fixed axis {name!r} needs a nonempty value list")
        return cls(name=name, mode=FIXED, values=tuple(values), frozen=True)

    @classmethod
    def discovered(cls, name: str, min_values: int, max_values: int) -> "AxisSpec":
        return cls(
            name=name, mode=DISCOVERED, values=(), min_values=min_values, max_values=max_values
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "values": list(self.values),
            "min_values": self.min_values,
            "max_values": self.max_values,
            "frozen": self.frozen,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AxisSpec":
        return cls(
            name=raw["name"],
            mode=raw["mode"],
            values=tuple(raw["values"]),
            min_values=raw.get("min_values"),
            max_values=raw.get("max_values"),
            frozen=raw.get("frozen", False),
        )


@dataclass(frozen=True)
class TagAssignment:
    terminal_id: str
    tags: dict[str, str]

    def to_dict(self) -> dict:
        return {"terminal": self.terminal_id, "tags": dict(self.tags)}


@dataclass(frozen=True)
class Untagged:
    terminal_id: str
    reason: str

    def to_dict(self) -> dict:
        return {"terminal": self.terminal_id, "reason": self.reason}


@dataclass
class TagStore:
    """On-disk shape of tags.json: frozen axes plus assignments."""

    axes: list[AxisSpec]
    assignments: dict[str, dict[str, str]] = field(default_factory=dict)
    untagged: list[Untagged] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "axes": [a.to_dict() for a in self.axes],
            "assignments": self.assignments,
            "untagged": [u.to_dict() for u in self.untagged],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TagStore":
        return cls(
            axes=[AxisSpec.from_dict(a) for a in raw["axes"]],
            assignments={t: dict(tags) for t, tags in raw["assignments"].items()},
            untagged=[Untagged(u["terminal"], u["reason"]) for u in raw.get("untagged", [])],
        )


def _axes_payload(axes: list[AxisSpec]) -> list[dict]:
    return [
        {
            "name": a.name,
            "mode": a.mode,
            "values": list(a.values),
            "min_values": a.min_values,
            "max_values": a.max_values,
        }
        for a in axes
    ]


def _bootstrap_envelope(terminals: Mapping[str, str], axes: list[AxisSpec]) -> PromptEnvelope:
    subject = {"axes": _axes_payload(axes), "terminals": dict(terminals)}
    return PromptEnvelope(
        role_introduction=(
            "You tag the terminal outputs of a decision tree along the declared axes, "
            "seeing every output at once so labels stay consistent across the tree."
        ),
        task=(
            "For each discovered axis, propose its vocabulary (between its declared minimum "
            "and maximum number of values). Then assign every terminal exactly one value per "
            "axis, drawing fixed-axis values only from the declared list."
        ),
        context=(ContextBlock(BLOCK_SUBJECT, json.dumps(subject, ensure_ascii=False, sort_keys=True)),),
        response_schema="tag-bootstrap.v1",
    )


def _validate_bootstrap(
    payload: dict, terminals: Mapping[str, str], axes: list[AxisSpec]
) -> str | None:
    """Returns a feedback string describing the first problem, or None."""
    vocabularies = payload["vocabularies"]
    for axis in axes:
        if axis.mode == DISCOVERED:
            proposed = vocabularies.get(axis.name, [])
            if not (axis.min_values <= len(set(proposed)) <= axis.max_values) or len(
                set(proposed)
            ) != len(proposed):
                return (
                    f"axis {axis.name!r} needs between {axis.min_values} and {axis.max_values} "
                    f"distinct values; got {len(proposed)}"
                )
    assignments = payload["assignments"]
    vocab = {
        a.name: set(vocabularies.get(a.name, [])) if a.mode == DISCOVERED else set(a.values)
        for a in axes
    }
    for tid in terminals:
        tags = assignments.get(tid, {})
        for axis in axes:
            value = tags.get(axis.name)
            if value is None:
                return f"terminal {tid!r} is missing a value for axis {axis.name!r}"
            if value not in vocab[axis.name]:
                return (
                    f"terminal {tid!r}: value {value!r} is not in axis {axis.name!r}; "
                    f"choose one of {sorted(vocab[axis.name])}"
                )
    return None


def _classify_bootstrap_failure(
    payload: dict, terminals: Mapping[str, str], axes: list[AxisSpec]
):
    vocabularies = payload["vocabularies"]
    for axis in axes:
        if axis.mode == DISCOVERED:
            count = len(set(vocabularies.get(axis.name, [])))
            if not (axis.min_values <= count <= axis.max_values):
                raise VocabularyOutOfRange(axis.name, count, axis.min_values, axis.max_values)
    assignments = payload["assignments"]
    missing: list[tuple[str, str]] = []
    for tid in terminals:
        tags = assignments.get(tid, {})
        for axis in axes:
            value = tags.get(axis.name)
            if value is None:
                missing.append((tid, axis.name))
            elif axis.mode == FIXED and value not in axis.values:
                raise InvalidFixedValue(axis.name, value, tid)
            elif axis.mode == DISCOVERED and value not in set(vocabularies.get(axis.name, [])):
                raise InvalidFixedValue(axis.name, value, tid)
    raise IncompleteAssignment(missing)


def bootstrap_tags(
    terminals: Mapping[str, str],
    axes: list[AxisSpec],
    judge: JudgeBackend,
) -> tuple[list[AxisSpec], list[TagAssignment]]:
    """Propose discovered vocabularies and tag every terminal at once.

    Re-prompts once with feedback on an invalid reply, then fails with
    VocabularyOutOfRange / InvalidFixedValue / IncompleteAssignment.
    """
    if not terminals:
        raise ValueError("bootstrap needs at least one terminal")
    for axis in axes:
        if axis.mode == DISCOVERED and axis.frozen:
            raise BootstrapAlreadyDone(axis.name)

    env = _bootstrap_envelope(terminals, axes)
    payload = judge.evaluate(env).payload
    problem = _validate_bootstrap(payload, terminals, axes)
    if problem is not None:
        payload = judge.evaluate(env.with_feedback(problem)).payload
        if _validate_bootstrap(payload, terminals, axes) is not None:
            _classify_bootstrap_failure(payload, terminals, axes)

    finalized = [
        replace(a, values=tuple(payload["vocabularies"][a.name]), frozen=True)
        if a.mode == DISCOVERED
        else a
        for a in axes
    ]
    assignments = [
        TagAssignment(tid, {a.name: payload["assignments"][tid][a.name] for a in axes})
        for tid in terminals
    ]
    return finalized, assignments


def _assign_envelope(tid: str, text: str, axes: list[AxisSpec]) -> PromptEnvelope:
    subject = {
        "terminal": tid,
        "text": text,
        "axes": [{"name": a.name, "values": list(a.values)} for a in axes],
    }
    return PromptEnvelope(
        role_introduction=(
            "You tag one new terminal output of a decision tree against the frozen "
            "vocabulary established when the tree was first tagged."
        ),
        task=(
            "Assign this terminal exactly one value per axis. Use only values from each "
            "axis's vocabulary; never invent a new value."
        ),
        context=(ContextBlock(BLOCK_SUBJECT, json.dumps(subject, ensure_ascii=False, sort_keys=True)),),
        response_schema="tag-assign.v1",
    )


def _validate_assignment(tags: dict, axes: list[AxisSpec]) -> str | None:
    for axis in axes:
        value = tags.get(axis.name)
        if value is None:
            return f"missing a value for axis {axis.name!r}; vocabulary: {sorted(axis.values)}"
        if value not in axis.values:
            return (
                f"value {value!r} is not in axis {axis.name!r}; "
                f"the frozen vocabulary is {sorted(axis.values)}"
            )
    return None


def grow_tags(
    new_terminals: Mapping[str, str],
    axes: list[AxisSpec],
    judge: JudgeBackend,
) -> list[TagAssignment | Untagged]:
    """Tag new terminals against frozen vocabularies; never changes axes."""
    for axis in axes:
        if not axis.frozen:
            raise AxesNotFinalized(axis.name)
    results: list[TagAssignment | Untagged] = []
    for tid, text in new_terminals.items():
        env = _assign_envelope(tid, text, axes)
        tags = judge.evaluate(env).payload["tags"]
        problem = _validate_assignment(tags, axes)
        if problem is not None:
            tags = judge.evaluate(env.with_feedback(problem)).payload["tags"]
            problem = _validate_assignment(tags, axes)
        if problem is not None:
            results.append(Untagged(tid, problem))
        else:
            results.append(TagAssignment(tid, {a.name: tags[a.name] for a in axes}))
    return results
