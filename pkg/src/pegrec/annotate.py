"""Automatic insertion of error labels and recovery expressions.

The annotator walks each syntactic rule tracking two facts about the
current position: whether some input must already have been consumed on
the way here (``seq``), and which token kinds may legally follow the
current expression (``flw``).  A terminal or non-nullable nonterminal at a
``seq`` position cannot fail by ordinary alternation, only by broken
input, so it is wrapped in an annotation [p]^l with a fresh label.  Each
fresh label gets a synthesized recovery expression (!(f1 / ... / fk) .)*
that skips tokens until one of the follow kinds, letting the parse resume
where the enclosing context can continue.

Sites are left unlabeled when labeling could change the accepted language:
the first position of a rule or alternative (failure there must stay an
ordinary backtrack), a nullable nonterminal, an alternative whose FIRST
overlaps what follows the choice, and a repetition whose body's FIRST
overlaps its follow set.  Every skip is reported with its reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from .analysis import Analysis, TokenSet
from .model import (
    AnyToken,
    Choice,
    Empty,
    Expr,
    Grammar,
    GrammarError,
    NonTerminal,
    Not,
    Sequence,
    Star,
    Terminal,
    Throw,
    annotation_parts,
    describe,
    desugar,
    strip_labels,
    validate,
)


@dataclass(frozen=True)
class AnnotatorConfig:
    """preserve_existing keeps hand-written annotations as-is and only adds
    what they are missing (recovery expressions, labels elsewhere).
    star_mode_rules opts listed rules into recovering inside repetitions."""

    preserve_existing: bool = False
    star_mode_rules: tuple[str, ...] = ()
    label_prefix: str = "Err"


@dataclass(frozen=True)
class InsertedSite:
    rule: str
    path: str
    label: str
    expected: str
    followed_by: tuple[str, ...]


@dataclass(frozen=True)
class SkippedSite:
    rule: str
    path: str
    reason: str  # first-position | nullable | non-disjoint-choice | repetition-overlap
    expected: str


@dataclass(frozen=True)
class RecoveredLabel:
    """An existing label that was given a synthesized recovery expression."""

    rule: str
    path: str
    label: str
    followed_by: tuple[str, ...]


@dataclass
class AnnotationReport:
    inserted: list[InsertedSite] = field(default_factory=list)
    skipped: list[SkippedSite] = field(default_factory=list)
    recovered: list[RecoveredLabel] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "inserted": [vars(s) | {"followed_by": list(s.followed_by)}
                         for s in self.inserted],
            "skipped": [dict(vars(s)) for s in self.skipped],
            "recovered": [vars(r) | {"followed_by": list(r.followed_by)}
                          for r in self.recovered],
            "warnings": list(self.warnings),
        }

    def format(self) -> str:
        lines = [f"inserted {len(self.inserted)} label(s), "
                 f"skipped {len(self.skipped)} site(s), "
                 f"synthesized recovery for {len(self.recovered)} existing label(s)"]
        for s in self.inserted:
            flw = ", ".join(s.followed_by)
            lines.append(f"  + {s.rule} at {s.path}: [{s.expected}]^{s.label}"
                         f"  (recover until: {flw})")
        for s in self.skipped:
            lines.append(f"  - {s.rule} at {s.path}: {s.expected}  ({s.reason})")
        for r in self.recovered:
            flw = ", ".join(r.followed_by)
            lines.append(f"  ~ {r.rule} at {r.path}: ^{r.label}"
                         f"  (recover until: {flw})")
        for w in self.warnings:
            lines.append(f"  ! {w}")
        return "\n".join(lines)


def _build_choice(alternatives: list[Expr]) -> Expr:
    return reduce(lambda a, b: Choice(a, b), alternatives)


class _Annotator:
    def __init__(self, grammar: Grammar, config: AnnotatorConfig):
        self.config = config
        g = desugar(grammar)
        if not config.preserve_existing:
            g = strip_labels(g)
        self.grammar = g
        self.analysis = Analysis(g)
        self.report = AnnotationReport()
        self.recovery: dict[str, Expr] = dict(g.recovery)
        self.used_labels: set[str] = set(g.labels)
        self.rule = ""
        self.counter = 0
        self.star_mode = False
        self.star_found = False
        self.insert_enabled = True

    # -- helpers ---------------------------------------------------------------

    def _fresh_label(self) -> str:
        while True:
            self.counter += 1
            candidate = f"{self.config.label_prefix}_{self.rule}_{self.counter}"
            if candidate not in self.used_labels:
                self.used_labels.add(candidate)
                return candidate

    def _follow_kinds(self, flw: TokenSet) -> tuple[str, ...]:
        return tuple(self.grammar.sorted_kinds(flw.kinds))

    def _sync_expr(self, flw: TokenSet) -> Expr:
        """(!(f1 / ... / fk) .)* -- skip tokens until a follow kind."""
        kinds = self._follow_kinds(flw)
        if not kinds:
            return Empty()
        stop = _build_choice([Terminal(k) for k in kinds])
        return Star(Sequence(Not(stop), AnyToken()))

    def _addlab(self, e: Expr, flw: TokenSet, path: list[str]) -> Expr:
        if not self.insert_enabled:
            return e
        label = self._fresh_label()
        self.recovery[label] = self._sync_expr(flw)
        self.report.inserted.append(InsertedSite(
            rule=self.rule, path=_fmt_path(path), label=label,
            expected=describe(e), followed_by=self._follow_kinds(flw),
        ))
        return Choice(e, Throw(label))

    def _skip(self, e: Expr, reason: str, path: list[str]) -> None:
        if not self.insert_enabled:
            return
        self.report.skipped.append(SkippedSite(
            rule=self.rule, path=_fmt_path(path),
            reason=reason, expected=describe(e),
        ))

    def _register_existing(self, label: str, flw: TokenSet, path: list[str]) -> None:
        if label in self.recovery:
            return
        self.recovery[label] = self._sync_expr(flw)
        self.report.recovered.append(RecoveredLabel(
            rule=self.rule, path=_fmt_path(path), label=label,
            followed_by=self._follow_kinds(flw),
        ))

    def _register_descend(self, e: Expr, flw: TokenSet, path: list[str]) -> None:
        """Walk a region the algorithm must not relabel, only to give any
        hand-written labels inside it a recovery expression."""
        saved = self.insert_enabled
        self.insert_enabled = False
        try:
            self._labexp(e, False, flw, path)
        finally:
            self.insert_enabled = saved

    # -- the walk ----------------------------------------------------------------

    def annotate_rule(self, name: str, body: Expr, star_mode: bool) -> Expr:
        self.rule = name
        self.counter = 0
        self.star_mode = star_mode
        self.star_found = False
        return self._labexp(body, False, self.analysis.follow_of(name), [])

    def _labexp(self, e: Expr, seq: bool, flw: TokenSet, path: list[str]) -> Expr:
        an = self.analysis

        parts = annotation_parts(e)
        if parts is not None:
            # existing annotation (preserve mode): keep it, fill in recovery
            self._register_existing(parts[1], flw, path)
            self._register_descend(parts[0], flw, path)
            return e

        if isinstance(e, Terminal):
            if seq:
                return self._addlab(e, flw, path)
            self._skip(e, "first-position", path)
            return e

        if isinstance(e, NonTerminal):
            if not seq:
                self._skip(e, "first-position", path)
                return e
            if an.first_of(e).has_epsilon:
                self._skip(e, "nullable", path)
                return e
            return self._addlab(e, flw, path)

        if isinstance(e, Sequence):
            left = self._labexp(e.left, seq, an.calck(e.right, flw), path + ["0"])
            right_seq = seq or not an.first_of(e.left).has_epsilon
            right = self._labexp(e.right, right_seq, flw, path + ["1"])
            return Sequence(left, right)

        if isinstance(e, Choice):
            if an.first_of(e.first).disjoint(an.calck(e.second, flw)):
                first = self._labexp(e.first, False, flw, path + ["0"])
            else:
                # relabeling here could steal inputs from the second
                # alternative; existing labels still deserve recovery
                self._skip(e.first, "non-disjoint-choice", path + ["0"])
                self._register_descend(e.first, flw, path + ["0"])
                first = e.first
            second = self._labexp(e.second, False, flw, path + ["1"])
            out = Choice(first, second)
            if seq and not an.first_of(e).has_epsilon:
                return self._addlab(out, flw, path)
            return out

        if isinstance(e, Star):
            if not an.first_of(e.body).disjoint(flw):
                self._skip(e.body, "repetition-overlap", path + ["*"])
                self._register_descend(e.body, flw, path + ["*"])
                return e
            if self.star_mode and flw.kinds:
                # report-and-skip inside the loop: a broken element throws,
                # recovery resynchronizes at the next element start (or a
                # follow token), and the guard stops the loop cleanly once
                # a follow token is next
                self.star_found = True
                wide = an.first_of(e.body).without_epsilon().union(
                    flw.without_epsilon())
                inner = self._labexp(e.body, False, wide, path + ["*"])
                guard = Not(_build_choice(
                    [Terminal(k) for k in self._follow_kinds(flw)]))
                return Star(Sequence(guard, self._addlab(inner, wide, path + ["*"])))
            return Star(self._labexp(e.body, False, flw, path + ["*"]))

        if isinstance(e, Throw):
            self._register_existing(e.label, flw, path)
            return e

        # Empty, Not, AnyToken: nothing to do; predicate bodies must keep
        # their exact failure behavior, so they are never annotated.
        return e


def _fmt_path(path: list[str]) -> str:
    return "/".join(path) if path else "."


def annotate(grammar: Grammar,
             config: AnnotatorConfig | None = None) -> tuple[Grammar, AnnotationReport]:
    """Annotated copy of the grammar plus a report of what was done.

    The result is desugared except for annotation sites, which serialize
    back to the [p]^l form.  Labels are named <prefix>_<Rule>_<n> with n
    counting sites left to right within each rule.
    """
    config = config or AnnotatorConfig()
    worker = _Annotator(grammar, config)
    g = worker.grammar

    unknown = [r for r in config.star_mode_rules if r not in g.rules]
    if unknown:
        raise GrammarError(
            f"star-mode rule(s) not in grammar: {', '.join(sorted(unknown))}")
    star_rules = set(config.star_mode_rules)

    new_rules: dict[str, Expr] = {}
    for name, body in g.rules.items():
        new_rules[name] = worker.annotate_rule(name, body, name in star_rules)
        if name in star_rules and not worker.star_found:
            worker.report.warnings.append(
                f"star-mode rule {name} has no eligible repetition")

    out = Grammar(
        rules=new_rules,
        lexical=dict(g.lexical),
        start=g.start,
        recovery=worker.recovery,
        messages=dict(g.messages),
        rule_positions=dict(g.rule_positions),
        desugared=True,
    )
    validate(out)
    return out, worker.report
