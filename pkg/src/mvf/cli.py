"""Operator command line: compile, verify, tag, annotate summaries, serve.

Exit codes: 0 success, 1 validation or module errors (with file/node
locations in the message), 2 usage errors (argparse's native behavior).
`--json` switches machine-readable output that mirrors the library records.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as config_mod
from .compiler import compute_stats, export_tree, parse_document, validate_and_compile
from .errors import MultiverseError
from .judge import HttpJudge, MockJudge
from .store import TreeStore
from .tagging import TagStore, bootstrap_tags, grow_tags
from .verification import (
    ALL_KINDS,
    CheckKind,
    JudgeEditor,
    JudgeRewriter,
    render_report,
    run_review_pass,
    run_verification_rounds,
)

DEFAULT_CONFIG_DIR = "./config"


def _config_dir(args) -> str | None:
    if args.config is not None:
        return args.config
    return DEFAULT_CONFIG_DIR if Path(DEFAULT_CONFIG_DIR).is_dir() else None


def _load_tree(path: str):
    text = Path(path).read_text(encoding="utf-8")
    doc = parse_document(text)
    return doc, validate_and_compile(doc)


def _make_judge(args, config_dir):
    if args.judge == "mock":
        return MockJudge(seed=args.seed, rules=config_mod.load_mock_rules(config_dir))
    return HttpJudge()


def _check_kinds(args) -> tuple[CheckKind, ...]:
    if not getattr(args, "checks", None):
        return ALL_KINDS
    kinds = []
    for name in args.checks.split(","):
        name = name.strip()
        try:
            kinds.append(CheckKind(name))
        except ValueError:
            raise MultiverseError(
                f"unknown check {name!r}; choose from "
                + ", ".join(k.value for k in ALL_KINDS)
            ) from None
    return tuple(kinds)


def _domain(args, doc) -> str:
    return args.domain or doc.domain


def _emit(args, record: dict, human: str):
    print(json.dumps(record, ensure_ascii=False, indent=2) if args.json else human)


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args) -> int:
    try:
        _, tree = _load_tree(args.document)
    except MultiverseError as exc:
        if args.json:
            print(json.dumps({"ok": False, "error": exc.code, "detail": str(exc)}))
        else:
            print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    warnings = [d.to_dict() for d in tree.diagnostics]
    _emit(
        args,
        {"ok": True, "errors": 0, "warnings": warnings},
        f"0 errors, {len(warnings)} warnings",
    )
    return 0


def cmd_compile(args) -> int:
    doc_path = Path(args.document)
    _, tree = _load_tree(args.document)
    out = Path(args.out) if args.out else doc_path.with_suffix("").with_suffix(".tree.json")
    out.write_text(export_tree(tree), encoding="utf-8")
    stats = compute_stats(tree)
    _emit(
        args,
        {"out": str(out), "stats": stats.to_dict()},
        f"wrote {out} ({stats.decision_count} decisions, {stats.output_count} outputs)",
    )
    return 0


def cmd_export(args) -> int:
    _, tree = _load_tree(args.document)
    text = export_tree(tree)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_stats(args) -> int:
    _, tree = _load_tree(args.document)
    stats = compute_stats(tree)
    _emit(
        args,
        stats.to_dict(),
        (
            f"decisions: {stats.decision_count}\noutputs: {stats.output_count}\n"
            f"max depth: {stats.max_depth}\nbranching: "
            + ", ".join(f"{k}x{v}" for k, v in sorted(stats.branching_histogram.items()))
        ),
    )
    return 0


def _write_rounds(outcomes, kinds, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for outcome in outcomes:
        path = out_dir / f"round-{outcome.round_number}.report.json"
        path.write_text(render_report(outcome.round_number, outcome.reports, kinds), encoding="utf-8")
        paths.append(path)
    return paths


def cmd_verify(args) -> int:
    doc, tree = _load_tree(args.document)
    config_dir = _config_dir(args)
    cal = config_mod.load_calibration(_domain(args, doc), config_dir)
    patterns = config_mod.load_metalanguage_patterns(config_dir)
    judge = _make_judge(args, config_dir)
    kinds = _check_kinds(args)
    outcomes = run_verification_rounds(
        tree, cal, judge, kinds=kinds, patterns=patterns, rounds=1, parallelism=args.parallelism
    )
    out_dir = Path(args.out) if args.out else Path(args.document).parent
    paths = _write_rounds(outcomes, kinds, out_dir)
    flags = outcomes[-1].residual
    _emit(
        args,
        {"reports": [str(p) for p in paths], "flags": flags},
        f"wrote {paths[0]} ({flags} flagged findings)",
    )
    return 0


def cmd_regen(args) -> int:
    doc, tree = _load_tree(args.document)
    config_dir = _config_dir(args)
    cal = config_mod.load_calibration(_domain(args, doc), config_dir)
    patterns = config_mod.load_metalanguage_patterns(config_dir)
    judge = _make_judge(args, config_dir)
    kinds = _check_kinds(args)
    outcomes = run_verification_rounds(
        tree,
        cal,
        judge,
        kinds=kinds,
        patterns=patterns,
        rounds=args.rounds,
        editor=JudgeEditor(judge, cal),
        parallelism=args.parallelism,
    )
    out_dir = Path(args.out) if args.out else Path(args.document).parent
    paths = _write_rounds(outcomes, kinds, out_dir)
    final = outcomes[-1]
    if args.doc_out:
        Path(args.doc_out).write_text(export_tree(final.tree), encoding="utf-8")
    modified = sorted(set().union(*(o.modified for o in outcomes)))
    _emit(
        args,
        {
            "rounds": len(outcomes),
            "reports": [str(p) for p in paths],
            "modified": modified,
            "residual_flags": final.residual,
        },
        f"{len(outcomes)} round(s); modified {len(modified)} decision(s); "
        f"residual flags: {final.residual}",
    )
    return 0


def cmd_review(args) -> int:
    doc, tree = _load_tree(args.document)
    config_dir = _config_dir(args)
    cal = config_mod.load_calibration(_domain(args, doc), config_dir)
    judge = _make_judge(args, config_dir)
    result = run_review_pass(tree, args.batch_size, JudgeRewriter(judge, cal))
    if args.out:
        Path(args.out).write_text(
            json.dumps(result.log.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    _emit(
        args,
        result.log.to_dict(),
        f"reviewed {len(tree.nodes)} node(s) in {len(result.log.batches)} batch(es); "
        f"{len(result.log.entries)} edit(s)",
    )
    return 0


def cmd_tag_bootstrap(args) -> int:
    doc, tree = _load_tree(args.document)
    config_dir = _config_dir(args)
    axes = config_mod.load_axes(_domain(args, doc), config_dir)
    judge = _make_judge(args, config_dir)
    terminals = {tid: tree.terminal_output_text(tid) for tid in tree.terminal_index}
    finalized, assignments = bootstrap_tags(terminals, axes, judge)
    store = TagStore(axes=finalized, assignments={a.terminal_id: a.tags for a in assignments})
    out = Path(args.out) if args.out else Path(args.document).parent / "tags.json"
    out.write_text(json.dumps(store.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    _emit(
        args,
        {"out": str(out), "terminals": len(assignments), "axes": [a.to_dict() for a in finalized]},
        f"wrote {out}: {len(assignments)} terminals tagged on {len(finalized)} axes",
    )
    return 0


def cmd_tag_grow(args) -> int:
    doc, tree = _load_tree(args.document)
    config_dir = _config_dir(args)
    judge = _make_judge(args, config_dir)
    tags_path = Path(args.tags)
    store = TagStore.from_dict(json.loads(tags_path.read_text(encoding="utf-8")))
    new_terminals = {
        tid: tree.terminal_output_text(tid)
        for tid in tree.terminal_index
        if tid not in store.assignments
    }
    results = grow_tags(new_terminals, store.axes, judge)
    tagged = 0
    for result in results:
        if hasattr(result, "tags"):
            store.assignments[result.terminal_id] = result.tags
            tagged += 1
        else:
            store.untagged.append(result)
    tags_path.write_text(json.dumps(store.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    _emit(
        args,
        {"new": len(new_terminals), "tagged": tagged, "untagged": len(new_terminals) - tagged},
        f"tagged {tagged}/{len(new_terminals)} new terminals",
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        TreeStore(args.store), session_ttl=args.session_ttl, frontend_dir=args.frontend
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    def add_doc(p):
        p.add_argument("document", help="multiverse document (.mv.json)")

    def add_judge(p):
        p.add_argument("--judge", choices=["mock", "http"], default="mock")
        p.add_argument("--seed", type=int, default=0, help="mock judge seed")
        p.add_argument("--domain", default=None, help="override the document's domain")
        p.add_argument("--config", default=None, help="config dir (default ./config if present)")

    p = add("validate", cmd_validate, help="parse + static checks, report errors")
    add_doc(p)

    p = add("compile", cmd_compile, help="validate and write the compiled tree")
    add_doc(p)
    p.add_argument("--out", default=None, help="output .tree.json path")

    p = add("export", cmd_export, help="print canonical compiled-tree JSON")
    add_doc(p)
    p.add_argument("--out", default=None)

    p = add("stats", cmd_stats, help="tree statistics")
    add_doc(p)

    p = add("verify", cmd_verify, help="run the six checks, write round-1.report.json")
    add_doc(p)
    add_judge(p)
    p.add_argument("--checks", default=None, help="comma list of check kinds (default all)")
    p.add_argument("--out", default=None, help="report directory (default: document's)")
    p.add_argument("--parallelism", type=int, default=1)

    p = add("regen", cmd_regen, help="verify + regeneration rounds with a judge-backed editor")
    add_doc(p)
    add_judge(p)
    p.add_argument("--checks", default=None)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--out", default=None, help="report directory (default: document's)")
    p.add_argument("--doc-out", default=None, help="write the final compiled tree here")
    p.add_argument("--parallelism", type=int, default=1)

    p = add("review", cmd_review, help="clarity review pass over every node")
    add_doc(p)
    add_judge(p)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--out", default=None, help="write the edit log here")

    p = add("tag-bootstrap", cmd_tag_bootstrap, help="propose vocabularies and tag all terminals")
    add_doc(p)
    add_judge(p)
    p.add_argument("--out", default=None, help="tags.json path (default: next to document)")

    p = add("tag-grow", cmd_tag_grow, help="tag terminals missing from tags.json")
    add_doc(p)
    add_judge(p)
    p.add_argument("--tags", required=True, help="existing tags.json")

    p = add("serve", cmd_serve, help="run the navigation HTTP service")
    p.add_argument("--store", required=True, help="store directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8901)
    p.add_argument("--session-ttl", type=float, default=24 * 3600.0)
    p.add_argument("--frontend", default=None, help="serve this directory as the UI (e.g. frontend/)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MultiverseError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
