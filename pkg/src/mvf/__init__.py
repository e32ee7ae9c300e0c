"""Engine for conceptual-multiverse documents: compile declarative decision
trees, replay accumulated state along any path, run graded structural checks
through a pluggable judge, tag and annotate terminal outputs, and serve
interactive navigation sessions."""

from .annotations import AnnotationLedger, NodeRatingSummary, aggregate_ratings, set_rating
from .compiler import (
    CompiledTree,
    MultiverseDocument,
    TreeStats,
    compile_text,
    compute_stats,
    export_tree,
    parse_document,
    validate_and_compile,
)
from .judge import HttpJudge, JudgeReply, MockJudge, PromptEnvelope, evaluate
from .model import (
    ConditionBranch,
    DecisionNode,
    PathCursor,
    StateRecord,
    TransformationRecord,
    apply_step,
    fold_path,
    subtree_terminals,
)
from .sessions import OutputView, Session, open_session
from .tagging import AxisSpec, TagAssignment, Untagged, bootstrap_tags, grow_tags
from .verification import (
    CheckFinding,
    CheckKind,
    DecisionReport,
    DomainCalibration,
    compile_report,
    run_check,
    run_checks,
    run_regeneration_round,
    run_review_pass,
    run_verification_rounds,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationLedger",
    "AxisSpec",
    "CheckFinding",
    "CheckKind",
    "CompiledTree",
    "ConditionBranch",
    "DecisionNode",
    "DecisionReport",
    "DomainCalibration",
    "HttpJudge",
    "JudgeReply",
    "MockJudge",
    "MultiverseDocument",
    "NodeRatingSummary",
    "OutputView",
    "PathCursor",
    "PromptEnvelope",
    "Session",
    "StateRecord",
    "TagAssignment",
    "TransformationRecord",
    "TreeStats",
    "Untagged",
    "aggregate_ratings",
    "apply_step",
    "bootstrap_tags",
    "compile_report",
    "compile_text",
    "compute_stats",
    "evaluate",
    "export_tree",
    "fold_path",
    "grow_tags",
    "open_session",
    "parse_document",
    "run_check",
    "run_checks",
    "run_regeneration_round",
    "run_review_pass",
    "run_verification_rounds",
    "set_rating",
    "subtree_terminals",
    "validate_and_compile",
]
