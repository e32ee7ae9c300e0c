"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Every criterion runs against the mock judge; no UI or network
is involved.
"""

import copy
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from mvf.annotations import AnnotationLedger, aggregate_ratings
from mvf.cli import main
from mvf.compiler import (
    compile_text,
    compute_stats,
    document_to_dict,
    export_tree,
    parse_document,
    validate_and_compile,
)
from mvf.config import load_axes, load_calibration, load_metalanguage_patterns, load_mock_rules
from mvf.errors import MultiverseError
from mvf.judge import MockJudge
from mvf.model import fold_path, terminal_id
from mvf.sessions import open_session
from mvf.tagging import bootstrap_tags, grow_tags
from mvf.verification import (
    ScriptedEditor,
    run_checks,
    run_verification_rounds,
)

from randgen import as_text, full_binary_document, random_document
from test_annotations import brute_force_summaries
from test_model import VERIDICAL_STATE

FIXTURES = Path(__file__).parent / "fixtures"


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL", file=sys.stderr)
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


def test_fixture_fidelity(free_will_text):
    with criterion("fixture-fidelity"):
        started = time.perf_counter()
        tree = validate_and_compile(parse_document(free_will_text))
        state = fold_path(tree, [("d1", "experience"), ("d2_experience", "veridical")])
        elapsed = time.perf_counter() - started

        assert list(tree.node("d1").branches) == [
            "experience",
            "science",
            "practical",
            "conceptual",
            "spiritual",
        ]
        assert state.entries == VERIDICAL_STATE  # string equality, all six keys
        assert elapsed < 1.0


def test_seeded_defect_corpus(defect_manifest):
    with criterion("seeded-defect-corpus"):
        assert len(defect_manifest) >= 10
        hits = 0
        for entry in defect_manifest:
            text = (FIXTURES / "defects" / entry["file"]).read_text(encoding="utf-8")
            try:
                validate_and_compile(parse_document(text))
            except MultiverseError as exc:
                # The FIRST error raised must be the intended one.
                assert exc.code == entry["error"], entry["file"]
                hits += 1
        assert hits == len(defect_manifest)  # 100% hit rate


def test_round_trip_100_random_documents():
    with criterion("round-trip"):
        rng = random.Random(1234)
        sizes = [rng.randint(2, 80) for _ in range(85)] + [
            rng.randint(100, 400) for _ in range(12)
        ] + [600, 800, 1000]
        assert len(sizes) == 100
        for i, size in enumerate(sizes):
            doc = random_document(random.Random(9000 + i), size, exact=(size == 1000))
            tree = compile_text(as_text(doc))
            assert compile_text(export_tree(tree)) == tree, f"doc {i} (size {size})"

        big = random_document(random.Random(77), 1000, exact=True)
        text = as_text(big)
        started = time.perf_counter()
        tree = validate_and_compile(parse_document(text))
        elapsed = time.perf_counter() - started
        assert len(tree.nodes) == 1000
        assert elapsed < 1.0


def test_verification_determinism(tmp_path, free_will_text):
    with criterion("verification-determinism"):
        doc = tmp_path / "free_will.mv.json"
        doc.write_text(free_will_text, encoding="utf-8")
        reports = []
        for name, extra in (("r1", []), ("r2", []), ("p4", ["--parallelism", "4"])):
            out = tmp_path / name
            code = main(
                ["verify", str(doc), "--judge", "mock", "--seed", "7", "--out", str(out)] + extra
            )
            assert code == 0
            reports.append((out / "round-1.report.json").read_bytes())
        assert reports[0] == reports[1] == reports[2]

        # Every check kind has at least one flagging and one passing case
        # across the probe and death fixtures.
        cal = load_calibration("philosophy")
        judge = MockJudge(seed=7, rules=load_mock_rules())
        patterns = load_metalanguage_patterns()
        findings = []
        for fixture in ("checks_probe.mv.json", "death.mv.json"):
            tree = compile_text((FIXTURES / fixture).read_text(encoding="utf-8"))
            findings.extend(run_checks(tree, cal, judge, patterns=patterns))
        for kind in ("unambiguity", "completeness", "faithfulness", "grounding", "continuity", "uniqueness"):
            batch = [f for f in findings if f.kind.value == kind]
            assert any(f.flagged for f in batch), f"{kind}: no flagging case"
            assert any(not f.flagged for f in batch), f"{kind}: no passing case"


def test_regeneration_discipline():
    with criterion("regeneration-discipline"):
        tree = compile_text((FIXTURES / "checks_probe.mv.json").read_text(encoding="utf-8"))
        cal = load_calibration("philosophy")
        judge = MockJudge(seed=7, rules=load_mock_rules())
        patterns = load_metalanguage_patterns()

        # Scripted editor that fixes every flag the mock raises on this corpus.
        editor = ScriptedEditor(
            {
                "p1": [
                    (
                        "conditions.meta_patch.transformation.instruction",
                        "Write into stance that the request is taken at face value, committing "
                        "to the plain reading. Reads from: none. Writes to: stance. Operation: append.",
                    ),
                    (
                        "conditions.meta_patch.condition",
                        "Take the request at face value; a plain reading is the best reading.",
                    ),
                ],
                "p2": [
                    ("ambiguity", "Given the face-value stance, what should the reply emphasize?"),
                    (
                        "conditions.twin_b.condition",
                        "Emphasize caution in the reply, staying within what the stance established.",
                    ),
                    (
                        "conditions.twin_b.transformation.instruction",
                        "Compose into output a cautious version of the reply, qualifying each "
                        "claim. Reads from: stance. Writes to: output. Operation: replace.",
                    ),
                ],
            }
        )
        outcomes = run_verification_rounds(
            tree, cal, judge, patterns=patterns, rounds=2, editor=editor
        )
        assert len(outcomes) <= 2
        assert outcomes[0].residual > 0

        final = outcomes[-1]
        assert final.residual == 0  # every flag resolved within two rounds

        # Document diff is confined to flagged decisions.
        flagged = {r.decision for r in outcomes[0].reports if r.flagged}
        before = {d["id"]: d for d in document_to_dict(tree.document)["decisions"]}
        after = {d["id"]: d for d in document_to_dict(final.tree.document)["decisions"]}
        changed = {i for i in before if before[i] != after[i]}
        assert changed <= flagged
        assert final.modified <= flagged


def test_tagging_bootstrap_and_grow(free_will_tree):
    with criterion("tagging"):
        terminals = {
            tid: free_will_tree.terminal_output_text(tid) for tid in free_will_tree.terminal_index
        }
        for domain, register_range in (("philosophy", (3, 6)), ("alignment", (3, 6)), ("poetry", (4, 6))):
            axes = load_axes(domain)
            finalized, assignments = bootstrap_tags(terminals, axes, MockJudge(seed=11))
            assert {a.terminal_id for a in assignments} == set(terminals)
            for axis in finalized:
                assert axis.frozen
                if axis.mode == "discovered":
                    lo, hi = register_range if domain == "poetry" and axis.name == "register" else (
                        axis.min_values,
                        axis.max_values,
                    )
                    assert lo <= len(axis.values) <= hi
            for assignment in assignments:
                assert set(assignment.tags) == {a.name for a in finalized}

            pre_grow = copy.deepcopy(finalized)
            new_terminals = {f"synthetic_{i}.out": f"New output {i}." for i in range(50)}
            results = grow_tags(new_terminals, finalized, MockJudge(seed=11))
            assert len(results) == 50
            assert all(hasattr(r, "tags") for r in results)
            assert finalized == pre_grow  # vocabularies deep-equal to pre-grow state


def test_annotation_oracle_200_random_trees():
    with criterion("annotation-oracle"):
        rng = random.Random(31)
        sizes = [rng.randint(2, 50) for _ in range(187)] + [
            rng.randint(100, 250) for _ in range(10)
        ] + [350, 450, 500]
        assert len(sizes) == 200
        for i, size in enumerate(sizes):
            tree_rng = random.Random(5000 + i)
            tree = compile_text(as_text(random_document(tree_rng, size)))
            ledger = AnnotationLedger.for_tree(tree)
            for tid in tree.terminal_index:
                if tree_rng.random() < 0.6:
                    ledger.set_rating(tid, tree_rng.choice(["approve", "neutral", "reject"]))
            summaries = aggregate_ratings(tree, ledger)
            assert summaries == brute_force_summaries(tree, ledger), f"tree {i}"
            for decision_id, node in tree.nodes.items():
                for category in ("approve", "neutral", "reject", "unrated"):
                    assert summaries[decision_id].counts[category] == sum(
                        summaries[terminal_id(decision_id, key)].counts[category]
                        for key in node.branches
                    )


def test_navigation_oracle(free_will_tree):
    with criterion("navigation-oracle"):
        session = open_session("free_will", free_will_tree)
        for tid in free_will_tree.terminal_index:
            session.goto_output(tid)
            folded = fold_path(free_will_tree, session.steps)
            assert folded["output"] == free_will_tree.terminal_output_text(tid)

        rng = random.Random(17)
        for _ in range(50):
            session = open_session("free_will", free_will_tree)
            k = 0
            while not session.at_terminal and rng.random() < 0.8:
                node = free_will_tree.node(session.current_decision)
                session.select_condition(rng.choice(list(node.branches)))
                k += 1
            for _ in range(k):
                session.step_back()
            assert session.steps == [] and session.current_decision == "d1"


def test_tree_stats(free_will_tree):
    with criterion("tree-stats"):
        stats = compute_stats(free_will_tree)
        # Hand enumeration of the fixture file.
        assert stats.decision_count == 11
        assert stats.output_count == 15
        assert stats.max_depth == 4
        assert stats.branching_histogram == {5: 1, 2: 10}

        binary = compute_stats(compile_text(as_text(full_binary_document(5))))
        assert binary.decision_count == 31
        assert binary.output_count == 32
        assert binary.max_depth == 5
