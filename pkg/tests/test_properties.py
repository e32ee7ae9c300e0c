"""Hypothesis property tests over generated documents and states."""

import json
import random

from hypothesis import given, settings, strategies as st

from mvf.annotations import AnnotationLedger, aggregate_ratings
from mvf.compiler import compile_text, export_tree
from mvf.model import (
    EMPTY_STATE,
    ConditionBranch,
    StateRecord,
    TransformationRecord,
    apply_step,
    fold_path,
    subtree_terminals,
)

from randgen import as_text, random_document
from test_annotations import brute_force_summaries

keys = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
states = st.dictionaries(keys, st.text(max_size=12), max_size=6)


def make_branch(operation, output, reads=()):
    return ConditionBranch(
        key="k",
        condition="c",
        condition_expanded="",
        justification="",
        transformation=TransformationRecord(
            instruction="i",
            reads_from=tuple(reads),
            writes_to=tuple(output) or ("x",),
            operation=operation,
        ),
        output=StateRecord(dict(output) or {"x": "v"}),
    )


@given(prior=states, output=states.filter(lambda d: d))
def test_replace_result_is_exactly_the_output(prior, output):
    result = apply_step(StateRecord(prior), make_branch("replace", output))
    assert result.entries == output


@given(prior=states, output=states.filter(lambda d: d))
def test_append_preserves_unwritten_keys_and_overwrites_collisions(prior, output):
    result = apply_step(StateRecord(prior), make_branch("append", output))
    for key, value in prior.items():
        if key not in output:
            assert result.entries[key] == value
    for key, value in output.items():
        assert result.entries[key] == value
    assert set(result.entries) == set(prior) | set(output)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_round_trip_on_generated_documents(seed):
    rng = random.Random(seed)
    tree = compile_text(as_text(random_document(rng, rng.randint(2, 40))))
    assert compile_text(export_tree(tree)) == tree


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_decision_order_is_irrelevant(seed):
    rng = random.Random(seed)
    doc = random_document(rng, rng.randint(2, 30))
    base = compile_text(as_text(doc))
    rng.shuffle(doc["decisions"])
    assert compile_text(as_text(doc)) == base


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_fold_prefixes_match_stepwise_refold(seed):
    rng = random.Random(seed)
    tree = compile_text(as_text(random_document(rng, rng.randint(2, 30))))
    tid = rng.choice(list(tree.terminal_index))
    steps = tree.terminal_index[tid]
    state = EMPTY_STATE
    for k, (decision_id, key) in enumerate(steps, start=1):
        state = apply_step(state, tree.node(decision_id).branch(key))
        assert fold_path(tree, list(steps[:k])).entries == state.entries
    assert "output" in state


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_terminal_partition_at_every_node(seed):
    rng = random.Random(seed)
    tree = compile_text(as_text(random_document(rng, rng.randint(2, 30))))
    for decision_id, node in tree.nodes.items():
        sets = [subtree_terminals(tree, (decision_id, key)) for key in node.branches]
        assert sum(map(len, sets)) == len(set().union(*sets))
        assert set().union(*sets) == subtree_terminals(tree, decision_id)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), fraction=st.floats(0.0, 1.0))
def test_aggregation_matches_brute_force(seed, fraction):
    rng = random.Random(seed)
    tree = compile_text(as_text(random_document(rng, rng.randint(2, 30))))
    ledger = AnnotationLedger.for_tree(tree)
    for tid in tree.terminal_index:
        if rng.random() < fraction:
            ledger.set_rating(tid, rng.choice(["approve", "neutral", "reject"]))
    assert aggregate_ratings(tree, ledger) == brute_force_summaries(tree, ledger)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_export_bytes_stable_and_json(seed):
    rng = random.Random(seed)
    tree = compile_text(as_text(random_document(rng, rng.randint(2, 25))))
    a = export_tree(tree)
    assert a == export_tree(tree)
    json.loads(a)
