"""Exception taxonomy shared across the engine.

Compile-time errors carry a stable ``code`` string so defect corpora and CLI
output can match on the error kind without parsing messages.
"""

from __future__ import annotations


class MultiverseError(Exception):
    """Base class for all engine errors."""

    code = "error"


class DocumentSyntaxError(MultiverseError):
    """The document text is not well-formed JSON."""

    code = "syntax_error"

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class SchemaError(MultiverseError):
    """The document parses as JSON but violates the document schema."""

    code = "schema_error"

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class CompileError(MultiverseError):
    """Base class for semantic validation failures."""

    code = "compile_error"


class DuplicateDecisionId(CompileError):
    code = "duplicate_decision_id"

    def __init__(self, decision_id: str):
        super().__init__(f"decision id {decision_id!r} appears more than once")
        self.decision_id = decision_id


class MissingRoot(CompileError):
    code = "missing_root"

    def __init__(self):
        super().__init__("no decision has a null source (ROOT)")


class MultipleRoots(CompileError):
    code = "multiple_roots"

    def __init__(self, roots: list[str]):
        super().__init__(f"multiple root decisions: {', '.join(roots)}")
        self.roots = roots


class UnresolvedSource(CompileError):
    code = "unresolved_source"

    def __init__(self, decision_id: str, ref_decision: str, ref_condition: str, reason: str):
        super().__init__(
            f"decision {decision_id!r} sources ({ref_decision!r}, {ref_condition!r}): {reason}"
        )
        self.decision_id = decision_id
        self.ref_decision = ref_decision
        self.ref_condition = ref_condition


class ChildOfTerminal(CompileError):
    code = "child_of_terminal"

    def __init__(self, decision_id: str, parent: str, condition: str):
        super().__init__(
            f"decision {decision_id!r} hangs off terminal branch {parent}.{condition}"
        )
        self.decision_id = decision_id
        self.parent = parent
        self.condition = condition


class DuplicateChild(CompileError):
    code = "duplicate_child"

    def __init__(self, parent: str, condition: str, children: list[str]):
        super().__init__(
            f"branch {parent}.{condition} has multiple children: {', '.join(children)}"
        )
        self.parent = parent
        self.condition = condition
        self.children = children


class CycleDetected(CompileError):
    code = "cycle_detected"

    def __init__(self, cycle: list[str]):
        super().__init__("source references form a cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class DegenerateDecision(CompileError):
    code = "degenerate_decision"

    def __init__(self, decision_id: str):
        super().__init__(
            f"decision {decision_id!r} has a single non-terminal branch and forks nothing"
        )
        self.decision_id = decision_id


class OutputKeyMismatch(CompileError):
    code = "output_key_mismatch"

    def __init__(self, decision_id: str, condition: str, missing: list[str], extra: list[str]):
        parts = []
        if missing:
            parts.append("missing from output: " + ", ".join(missing))
        if extra:
            parts.append("not in writes_to: " + ", ".join(extra))
        super().__init__(f"{decision_id}.{condition}: " + "; ".join(parts))
        self.decision_id = decision_id
        self.condition = condition
        self.missing = missing
        self.extra = extra


class TerminalNotReplace(CompileError):
    code = "terminal_not_replace"

    def __init__(self, decision_id: str, condition: str):
        super().__init__(
            f"terminal branch {decision_id}.{condition} must use operation=replace"
        )
        self.decision_id = decision_id
        self.condition = condition


class TerminalMarkMismatch(CompileError):
    code = "terminal_mark_mismatch"

    def __init__(self, unmarked: list[str], marked_non_output: list[str]):
        parts = []
        if unmarked:
            parts.append("output-writing branches missing a mark: " + ", ".join(unmarked))
        if marked_non_output:
            parts.append("marked branches that do not write output: " + ", ".join(marked_non_output))
        super().__init__("; ".join(parts))
        self.unmarked = unmarked
        self.marked_non_output = marked_non_output


class DanglingBranch(CompileError):
    code = "dangling_branch"

    def __init__(self, decision_id: str, condition: str):
        super().__init__(
            f"non-terminal branch {decision_id}.{condition} has no child decision"
        )
        self.decision_id = decision_id
        self.condition = condition


class MissingReadKey(CompileError):
    """A transformation reads a key that is not available at its node.

    Raised both at compile time (against the availability fold) and at
    fold/apply time (against an actual prior state).
    """

    code = "missing_read_key"

    def __init__(self, key: str, decision_id: str | None = None, condition: str | None = None):
        where = f" in {decision_id}.{condition}" if decision_id else ""
        super().__init__(f"read of missing key {key!r}{where}")
        self.key = key
        self.decision_id = decision_id
        self.condition = condition


class BrokenChain(MultiverseError):
    code = "broken_chain"

    def __init__(self, message: str):
        super().__init__(message)


class UnknownNode(MultiverseError):
    code = "unknown_node"

    def __init__(self, node: object):
        super().__init__(f"unknown node {node!r}")
        self.node = node


class UnknownTerminal(MultiverseError):
    code = "unknown_terminal"

    def __init__(self, terminal_id: str):
        super().__init__(f"unknown terminal {terminal_id!r}")
        self.terminal_id = terminal_id


class UnknownCondition(MultiverseError):
    code = "unknown_condition"

    def __init__(self, decision_id: str, condition: str):
        super().__init__(f"decision {decision_id!r} has no condition {condition!r}")
        self.decision_id = decision_id
        self.condition = condition


class UnknownTree(MultiverseError):
    code = "unknown_tree"

    def __init__(self, tree_id: str):
        super().__init__(f"unknown tree {tree_id!r}")
        self.tree_id = tree_id


class UnknownSession(MultiverseError):
    code = "unknown_session"

    def __init__(self, session_id: str):
        super().__init__(f"unknown or expired session {session_id!r}")
        self.session_id = session_id


class AtRoot(MultiverseError):
    code = "at_root"

    def __init__(self):
        super().__init__("already at the root decision; nothing to step back to")


class NotOnPath(MultiverseError):
    code = "not_on_path"

    def __init__(self, decision_id: str):
        super().__init__(f"decision {decision_id!r} is not on the current path")
        self.decision_id = decision_id


class JudgeError(MultiverseError):
    code = "judge_error"


class TransportError(JudgeError):
    code = "transport_error"

    def __init__(self, message: str, attempts: list[str] | None = None):
        super().__init__(message)
        self.attempts = attempts or []


class SchemaViolation(JudgeError):
    """The judge's reply failed schema validation (after retries, for http)."""

    code = "schema_violation"

    def __init__(self, schema: str, reason: str, attempts: list[str] | None = None):
        super().__init__(f"reply does not satisfy schema {schema!r}: {reason}")
        self.schema = schema
        self.reason = reason
        self.attempts = attempts or []


class MissingCredential(JudgeError):
    code = "missing_credential"

    def __init__(self, var: str):
        super().__init__(f"environment variable {var} is not set")
        self.var = var


class JudgeUnavailable(JudgeError):
    code = "judge_unavailable"


class ForeignFinding(MultiverseError):
    code = "foreign_finding"

    def __init__(self, node: object):
        super().__init__(f"finding references node {node!r} which is not in the tree")
        self.node = node


class RecompileFailure(MultiverseError):
    code = "recompile_failure"

    def __init__(self, cause: MultiverseError):
        super().__init__(f"edited document no longer compiles: {cause}")
        self.cause = cause


class RewriterUnavailable(MultiverseError):
    code = "rewriter_unavailable"


class VocabularyOutOfRange(MultiverseError):
    code = "vocabulary_out_of_range"

    def __init__(self, axis: str, count: int, lo: int, hi: int):
        super().__init__(
            f"axis {axis!r}: judge proposed {count} values; needs between {lo} and {hi}"
        )
        self.axis = axis
        self.count = count


class InvalidFixedValue(MultiverseError):
    code = "invalid_fixed_value"

    def __init__(self, axis: str, value: str, terminal_id: str):
        super().__init__(
            f"terminal {terminal_id!r}: value {value!r} is not in fixed axis {axis!r}"
        )
        self.axis = axis
        self.value = value
        self.terminal_id = terminal_id


class IncompleteAssignment(MultiverseError):
    code = "incomplete_assignment"

    def __init__(self, missing: list[tuple[str, str]]):
        pairs = ", ".join(f"{t}:{a}" for t, a in missing[:5])
        more = "" if len(missing) <= 5 else f" (+{len(missing) - 5} more)"
        super().__init__(f"bootstrap left terminals untagged: {pairs}{more}")
        self.missing = missing


class BootstrapAlreadyDone(MultiverseError):
    code = "bootstrap_already_done"

    def __init__(self, axis: str):
        super().__init__(
            f"discovered axis {axis!r} is already frozen; re-bootstrap is an operator decision"
        )
        self.axis = axis


class AxesNotFinalized(MultiverseError):
    code = "axes_not_finalized"

    def __init__(self, axis: str):
        super().__init__(f"axis {axis!r} has no frozen vocabulary; run bootstrap first")
        self.axis = axis
