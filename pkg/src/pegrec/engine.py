"""Parsing with labeled failures and recovery.

Positions are token indices.  A failure is either the plain ``fail`` label,
which ordered choice and repetition absorb by backtracking, or a named
label, which propagates until something fields it: a recovery expression
registered for that label, a syntactic predicate, or the top level.

Recovery for label l runs the grammar's recovery expression from the throw
position, typically skipping tokens until a synchronization point.  The
skipped region becomes an ErrorNode standing in for the subtree that could
not be built, and parsing resumes after it.  Recovery is suppressed inside
predicates, inside another recovery, after max_errors diagnostics, and when
the same label has already been attempted at the same position (so a loop
of throw/recover/backtrack cannot diverge).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .model import (
    AnyToken,
    Choice,
    Empty,
    EOF_KIND,
    Expr,
    FAIL,
    Grammar,
    NonTerminal,
    Not,
    Sequence,
    Star,
    Terminal,
    Throw,
    desugar,
    desugar_expr,
)
from .lexer import TokenStream


# --- syntax trees -----------------------------------------------------------

@dataclass(frozen=True)
class TokenLeaf:
    kind: str | None
    span: tuple[int, int]


@dataclass(frozen=True)
class RuleNode:
    name: str
    span: tuple[int, int]
    children: tuple = ()


@dataclass(frozen=True)
class ErrorNode:
    """Placeholder for input that was skipped (or found missing) while
    recovering from ``label``.  ``expected`` names what should have been
    here: the annotated expression's terminal kind or rule name."""

    label: str
    expected: str
    span: tuple[int, int]


def tree_to_json(node):
    if isinstance(node, RuleNode):
        return {
            "rule": node.name,
            "span": list(node.span),
            "children": [tree_to_json(c) for c in node.children],
        }
    if isinstance(node, TokenLeaf):
        return {"token": node.kind, "span": list(node.span)}
    if isinstance(node, ErrorNode):
        return {"error": node.label, "expected": node.expected, "span": list(node.span)}
    raise TypeError(f"not a tree node: {node!r}")


def tree_from_json(data):
    span = tuple(data["span"])
    if "rule" in data:
        return RuleNode(data["rule"], span,
                        tuple(tree_from_json(c) for c in data["children"]))
    if "token" in data:
        return TokenLeaf(data["token"], span)
    if "error" in data:
        return ErrorNode(data["error"], data["expected"], span)
    raise ValueError(f"not a tree: {data!r}")


# --- diagnostics ------------------------------------------------------------

@dataclass(frozen=True)
class ParseError:
    """One recorded syntax error.  ``offset``/``line``/``col`` point at the
    end of the last token consumed before the failure (start of input when
    nothing was consumed, end of input when everything was)."""

    label: str
    message: str
    offset: int
    line: int
    col: int
    token_index: int


@dataclass
class ParseOutcome:
    status: str  # "matched" or "failed"
    tree: RuleNode | None
    errors: list[ParseError]
    end: int | None = None
    fail_label: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "matched" and not self.errors


@dataclass
class MatchResult:
    """Result of matching a single expression (not a whole file)."""

    status: str
    end: int | None
    fail_label: str | None = None
    errors: list[ParseError] = field(default_factory=list)
    children: tuple = ()


class _Fail:
    __slots__ = ("label", "pos", "logged")

    def __init__(self, label: str, pos: int, logged: bool = False):
        self.label = label
        self.pos = pos
        self.logged = logged


DEFAULT_MAX_ERRORS = 50


class Session:
    """One parse over one input text."""

    def __init__(self, grammar: Grammar, text: str,
                 max_errors: int = DEFAULT_MAX_ERRORS,
                 messages: dict[str, str] | None = None):
        self.grammar = desugar(grammar)
        self.stream = TokenStream(self.grammar, text)
        self.max_errors = max_errors
        self.messages = dict(self.grammar.messages)
        if messages:
            self.messages.update(messages)
        self.errors: list[ParseError] = []
        self.guard: set[tuple[str, int]] = set()
        self.pred_depth = 0
        self.rec_depth = 0
        self.farthest = 0
        limit = sys.getrecursionlimit()
        if limit < 20000:
            sys.setrecursionlimit(20000)

    # -- error records --------------------------------------------------------

    def _message_for(self, label: str) -> str:
        msg = self.messages.get(label)
        if msg is None:
            msg = f"unexpected input ({label})"
        return msg

    def _record(self, label: str, pos: int, message: str | None = None) -> None:
        offset = self.stream.frontier_offset(pos)
        line, col = self.stream.pos_info(offset)
        self.errors.append(ParseError(
            label=label,
            message=message if message is not None else self._message_for(label),
            offset=offset, line=line, col=col, token_index=pos,
        ))

    # -- the matcher -----------------------------------------------------------

    def _match(self, e: Expr, pos: int, acc: list):
        if isinstance(e, Empty):
            return pos
        if isinstance(e, Terminal):
            if e.kind == EOF_KIND:
                if self.stream.token(pos) is None:
                    return pos
                return self._fail(pos)
            tok = self.stream.token(pos)
            if tok is not None and tok.kind == e.kind:
                acc.append(TokenLeaf(tok.kind, (tok.start, tok.end)))
                return pos + 1
            return self._fail(pos)
        if isinstance(e, AnyToken):
            tok = self.stream.token(pos)
            if tok is None:
                return self._fail(pos)
            acc.append(TokenLeaf(tok.kind, (tok.start, tok.end)))
            return pos + 1
        if isinstance(e, Sequence):
            r = self._match(e.left, pos, acc)
            if isinstance(r, _Fail):
                return r
            return self._match(e.right, r, acc)
        if isinstance(e, Choice):
            n_acc, n_err = len(acc), len(self.errors)
            r = self._match(e.first, pos, acc)
            if not isinstance(r, _Fail) or r.label != FAIL:
                return r
            del acc[n_acc:]
            del self.errors[n_err:]
            return self._match(e.second, pos, acc)
        if isinstance(e, Star):
            while True:
                n_acc, n_err = len(acc), len(self.errors)
                r = self._match(e.body, pos, acc)
                if isinstance(r, _Fail):
                    if r.label != FAIL:
                        return r
                    del acc[n_acc:]
                    del self.errors[n_err:]
                    return pos
                if r == pos:
                    # no progress; a nullable body would loop forever
                    del acc[n_acc:]
                    del self.errors[n_err:]
                    return pos
                pos = r
        if isinstance(e, Not):
            n_acc, n_err = len(acc), len(self.errors)
            self.pred_depth += 1
            try:
                r = self._match(e.body, pos, acc)
            finally:
                self.pred_depth -= 1
            del acc[n_acc:]
            del self.errors[n_err:]
            if isinstance(r, _Fail):
                return pos
            return self._fail(pos)
        if isinstance(e, NonTerminal):
            children: list = []
            r = self._match(self.grammar.rules[e.name], pos, children)
            if isinstance(r, _Fail):
                return r
            if children:
                span = (children[0].span[0], children[-1].span[1])
            else:
                anchor = self.stream.start_offset(pos)
                span = (anchor, anchor)
            acc.append(RuleNode(e.name, span, tuple(children)))
            return r
        if isinstance(e, Throw):
            return self._throw(e.label, pos, acc)
        raise TypeError(f"unexpected node in syntactic rule: {e!r}")

    def _fail(self, pos: int) -> _Fail:
        if pos > self.farthest:
            self.farthest = pos
        return _Fail(FAIL, pos)

    def _throw(self, label: str, pos: int, acc: list):
        recovery = self.grammar.recovery.get(label)
        if (recovery is None or self.pred_depth > 0 or self.rec_depth > 0):
            return _Fail(label, pos)
        if (label, pos) in self.guard:
            return _Fail(label, pos)
        if len(self.errors) >= self.max_errors:
            return _Fail(label, pos, logged=True)
        self.guard.add((label, pos))
        self._record(label, pos)
        scratch: list = []
        self.rec_depth += 1
        try:
            r = self._match(recovery, pos, scratch)
        finally:
            self.rec_depth -= 1
        if isinstance(r, _Fail):
            return _Fail(label, pos, logged=True)
        expected = self.grammar.label_descriptions.get(label, label)
        if r > pos:
            first_tok = self.stream.token(pos)
            last_tok = self.stream.token(r - 1)
            span = (first_tok.start, last_tok.end)
        else:
            anchor = self.stream.start_offset(pos)
            span = (anchor, anchor)
        acc.append(ErrorNode(label, expected, span))
        return r

    # -- entry points -----------------------------------------------------------

    def parse(self) -> ParseOutcome:
        acc: list = []
        r = self._match(NonTerminal(self.grammar.start), 0, acc)
        if isinstance(r, _Fail):
            if r.label == FAIL:
                at = max(r.pos, self.farthest)
                self._record(FAIL, at, "unexpected input")
            elif not r.logged:
                self._record(r.label, r.pos)
            return ParseOutcome(status="failed", tree=None,
                                errors=self.errors, fail_label=r.label)
        if self.stream.token(r) is not None:
            self._record(FAIL, r, "expected end of input")
        return ParseOutcome(status="matched", tree=acc[0],
                            errors=self.errors, end=r)

    def match_expr(self, expr: Expr, pos: int = 0) -> MatchResult:
        body = desugar_expr(expr)
        acc: list = []
        r = self._match(body, pos, acc)
        if isinstance(r, _Fail):
            return MatchResult(status="failed", end=None,
                               fail_label=r.label, errors=self.errors)
        return MatchResult(status="matched", end=r,
                           errors=self.errors, children=tuple(acc))


def parse(grammar: Grammar, text: str,
          max_errors: int = DEFAULT_MAX_ERRORS,
          messages: dict[str, str] | None = None) -> ParseOutcome:
    """Parse text from the grammar's start rule."""
    return Session(grammar, text, max_errors=max_errors, messages=messages).parse()


def match(grammar: Grammar, expr: Expr, text: str, pos: int = 0,
          max_errors: int = DEFAULT_MAX_ERRORS) -> MatchResult:
    """Match one expression against text starting at token index pos."""
    return Session(grammar, text, max_errors=max_errors).match_expr(expr, pos)
