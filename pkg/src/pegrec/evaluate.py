"""Recovery-quality measurement.

A corpus case pairs a broken source file with the corrected source it was
derived from.  Both are parsed with the same grammar; the recovered tree is
compared to the intended tree structurally (rule names and token kinds
only, spans ignored).  An error placeholder counts as equal to the single
node it stands in for when its expectation names that node's kind.  Each
case is then rated:

  excellent     recovered tree structurally equal to the intended tree
  needs-review  parse produced a tree, but not the intended shape
  failed        recovery did not produce a tree at all

The harness also checks the first reported label when the case declares
which one it expects, so a corpus can pin down where each breakage is
detected, not just that something was.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    ErrorNode,
    ParseOutcome,
    RuleNode,
    Session,
    TokenLeaf,
    tree_from_json,
)
from .lexer import TokenStream
from .model import Grammar

EXCELLENT = "excellent"
NEEDS_REVIEW = "needs-review"
FAILED = "failed"


def ast_structural_eq(got, want) -> bool:
    """Structural tree equality ignoring spans.  An ErrorNode on either side
    matches one node whose rule name or token kind equals its expectation;
    two ErrorNodes match when they expect the same thing."""
    if isinstance(got, ErrorNode) or isinstance(want, ErrorNode):
        if isinstance(got, ErrorNode) and isinstance(want, ErrorNode):
            return got.expected == want.expected
        node, err = (want, got) if isinstance(got, ErrorNode) else (got, want)
        if isinstance(node, RuleNode):
            return node.name == err.expected
        if isinstance(node, TokenLeaf):
            return node.kind == err.expected
        return False
    if isinstance(got, RuleNode) and isinstance(want, RuleNode):
        return (
            got.name == want.name
            and len(got.children) == len(want.children)
            and all(ast_structural_eq(a, b)
                    for a, b in zip(got.children, want.children))
        )
    if isinstance(got, TokenLeaf) and isinstance(want, TokenLeaf):
        return got.kind == want.kind
    return False


def classify_recovery(outcome: ParseOutcome, intended) -> str:
    if outcome.tree is None:
        return FAILED
    if intended is not None and ast_structural_eq(outcome.tree, intended):
        return EXCELLENT
    return NEEDS_REVIEW


# --- corpus ------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusCase:
    name: str
    bad_path: Path
    ok_path: Path | None = None
    tree_path: Path | None = None
    expected_label: str | None = None


@dataclass
class CaseResult:
    name: str
    rating: str
    error_count: int
    first_label: str | None
    expected_label: str | None
    label_ok: bool
    note: str = ""


@dataclass
class CorpusSummary:
    results: list[CaseResult] = field(default_factory=list)
    unreadable: list[str] = field(default_factory=list)

    def count(self, rating: str) -> int:
        return sum(1 for r in self.results if r.rating == rating)

    @property
    def label_mismatches(self) -> int:
        return sum(1 for r in self.results if not r.label_ok)

    @property
    def exit_code(self) -> int:
        # unreadable inputs are reported but do not fail the run
        if self.count(FAILED) or self.label_mismatches:
            return 1
        return 0

    def table(self) -> str:
        total = len(self.results)
        lines = [f"{'category':<14}{'count':>7}{'percent':>10}"]
        for rating in (EXCELLENT, NEEDS_REVIEW, FAILED):
            n = self.count(rating)
            pct = 100.0 * n / total if total else 0.0
            lines.append(f"{rating:<14}{n:>7}{pct:>9.1f}%")
        lines.append(f"{'total':<14}{total:>7}")
        if self.label_mismatches:
            lines.append(f"label mismatches: {self.label_mismatches}")
        for name in self.unreadable:
            lines.append(f"unreadable: {name}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "cases": [dict(vars(r)) for r in self.results],
            "counts": {rating: self.count(rating)
                       for rating in (EXCELLENT, NEEDS_REVIEW, FAILED)},
            "label_mismatches": self.label_mismatches,
            "unreadable": list(self.unreadable),
        }


def load_corpus(directory: str | Path) -> list[CorpusCase]:
    """Cases from a directory: <name>.bad is the broken input; optional
    <name>.ok (corrected source), <name>.tree (intended tree as JSON), and
    <name>.label (expected first label) refine the check."""
    directory = Path(directory)
    cases = []
    for bad in sorted(directory.glob("*.bad")):
        stem = bad.with_suffix("")
        ok = stem.with_suffix(".ok")
        tree = stem.with_suffix(".tree")
        label = stem.with_suffix(".label")
        expected_label = None
        if label.exists():
            expected_label = label.read_text(encoding="utf-8").strip() or None
        cases.append(CorpusCase(
            name=bad.stem,
            bad_path=bad,
            ok_path=ok if ok.exists() else None,
            tree_path=tree if tree.exists() else None,
            expected_label=expected_label,
        ))
    return cases


def run_case(grammar: Grammar, case: CorpusCase,
             max_errors: int = 50) -> CaseResult:
    text = case.bad_path.read_text(encoding="utf-8")
    outcome = Session(grammar, text, max_errors=max_errors).parse()

    intended = None
    note = ""
    if case.tree_path is not None:
        intended = tree_from_json(json.loads(
            case.tree_path.read_text(encoding="utf-8")))
    elif case.ok_path is not None:
        ok_outcome = Session(
            grammar, case.ok_path.read_text(encoding="utf-8")).parse()
        if ok_outcome.ok:
            intended = ok_outcome.tree
        else:
            note = "corrected source does not parse cleanly"

    rating = classify_recovery(outcome, intended)
    if intended is None and rating != FAILED:
        rating = NEEDS_REVIEW
        note = note or "no intended tree to compare against"

    first_label = outcome.errors[0].label if outcome.errors else None
    label_ok = (case.expected_label is None
                or first_label == case.expected_label)
    return CaseResult(
        name=case.name, rating=rating,
        error_count=len(outcome.errors),
        first_label=first_label,
        expected_label=case.expected_label,
        label_ok=label_ok, note=note,
    )


def run_corpus(grammar: Grammar, cases: list[CorpusCase],
               max_errors: int = 50) -> CorpusSummary:
    summary = CorpusSummary()
    for case in cases:
        try:
            summary.results.append(run_case(grammar, case, max_errors))
        except OSError as exc:
            summary.unreadable.append(f"{case.name}: {exc}")
    return summary


# --- mutation ----------------------------------------------------------------

@dataclass(frozen=True)
class Mutant:
    """A single-token edit of a valid source text."""

    text: str
    kind: str          # "delete" or "duplicate"
    token_index: int
    token_text: str


def token_spans(grammar: Grammar, text: str) -> list[tuple[int, int]]:
    stream = TokenStream(grammar, text)
    spans = []
    i = 0
    while (tok := stream.token(i)) is not None:
        spans.append((tok.start, tok.end))
        i += 1
    return spans


def delete_token(grammar: Grammar, text: str, index: int) -> Mutant:
    spans = token_spans(grammar, text)
    s, e = spans[index]
    # a space keeps the neighbors from fusing into one token
    return Mutant(text[:s] + " " + text[e:], "delete", index, text[s:e])


def duplicate_token(grammar: Grammar, text: str, index: int) -> Mutant:
    spans = token_spans(grammar, text)
    s, e = spans[index]
    return Mutant(text[:e] + " " + text[s:e] + text[e:],
                  "duplicate", index, text[s:e])


def random_mutants(grammar: Grammar, text: str, count: int,
                   seed: int = 0) -> list[Mutant]:
    rng = random.Random(seed)
    spans = token_spans(grammar, text)
    out = []
    for _ in range(count):
        index = rng.randrange(len(spans))
        op = rng.choice((delete_token, duplicate_token))
        out.append(op(grammar, text, index))
    return out
