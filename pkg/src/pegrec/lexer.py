"""Tokenizer driven by the grammar's lexical rules.

Tokens are produced lazily, longest match first, with declaration order
breaking ties (lexical rules in order, then anonymous literals in order of
first appearance).  Whitespace and ``//`` line comments are skipped between
tokens.  A character no rule can start is emitted as a one-character token
with kind None so the parser can report it or step over it during recovery;
a rule that matches zero characters at a position is ignored there.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .model import (
    AnyToken,
    CharClass,
    Choice,
    Empty,
    Expr,
    Grammar,
    Literal,
    NonTerminal,
    Not,
    Sequence,
    Star,
    desugar_expr,
)


@dataclass(frozen=True)
class Token:
    kind: str | None
    text: str
    start: int
    end: int


class _CharMatcher:
    """Character-level PEG interpreter over the source text."""

    def __init__(self, rules: dict[str, Expr], text: str):
        self.rules = rules
        self.text = text

    def match(self, e: Expr, pos: int) -> int | None:
        if isinstance(e, Literal):
            if self.text.startswith(e.text, pos):
                return pos + len(e.text)
            return None
        if isinstance(e, CharClass):
            if pos >= len(self.text):
                return None
            ch = self.text[pos]
            for lo, hi in e.ranges:
                if lo <= ch <= hi:
                    return pos + 1
            return None
        if isinstance(e, AnyToken):
            return pos + 1 if pos < len(self.text) else None
        if isinstance(e, Empty):
            return pos
        if isinstance(e, Sequence):
            mid = self.match(e.left, pos)
            if mid is None:
                return None
            return self.match(e.right, mid)
        if isinstance(e, Choice):
            out = self.match(e.first, pos)
            if out is not None:
                return out
            return self.match(e.second, pos)
        if isinstance(e, Star):
            while True:
                nxt = self.match(e.body, pos)
                if nxt is None or nxt == pos:
                    return pos
                pos = nxt
        if isinstance(e, Not):
            return pos if self.match(e.body, pos) is None else None
        if isinstance(e, NonTerminal):
            return self.match(self.rules[e.name], pos)
        raise TypeError(f"unexpected node in lexical pattern: {e!r}")


class TokenStream:
    """Lazy token sequence over one source text."""

    def __init__(self, grammar: Grammar, text: str):
        self.text = text
        rules = {n: desugar_expr(b) for n, b in grammar.lexical.items()}
        self._matcher = _CharMatcher(rules, text)
        # priority order: named rules as declared, then literal kinds
        self._patterns: list[tuple[str, Expr]] = list(rules.items()) + [
            (kind, Literal(kind[1:-1])) for kind in grammar.literal_kinds]
        self._tokens: list[Token] = []
        self._scan_pos = 0
        self._done = False
        self._line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self._line_starts.append(i + 1)

    def _skip_layout(self) -> None:
        text = self.text
        pos = self._scan_pos
        while pos < len(text):
            if text[pos] in " \t\r\n":
                pos += 1
            elif text.startswith("//", pos):
                while pos < len(text) and text[pos] != "\n":
                    pos += 1
            else:
                break
        self._scan_pos = pos

    def _scan_one(self) -> bool:
        self._skip_layout()
        pos = self._scan_pos
        if pos >= len(self.text):
            self._done = True
            return False
        best_kind: str | None = None
        best_end = pos
        for kind, pat in self._patterns:
            end = self._matcher.match(pat, pos)
            if end is not None and end > pos and end > best_end:
                best_kind, best_end = kind, end
        if best_kind is None:
            # stray character: one-char token the grammar has no kind for
            tok = Token(None, self.text[pos], pos, pos + 1)
            self._scan_pos = pos + 1
        else:
            tok = Token(best_kind, self.text[pos:best_end], pos, best_end)
            self._scan_pos = best_end
        self._tokens.append(tok)
        return True

    def token(self, i: int) -> Token | None:
        """i-th token, or None at/after end of input."""
        while not self._done and len(self._tokens) <= i:
            self._scan_one()
        if i < len(self._tokens):
            return self._tokens[i]
        return None

    def frontier_offset(self, i: int) -> int:
        """Character offset used to report an error at token position i:
        the end of the previous token, or the start of the very first token,
        or end of input (after trailing layout) when i is past the last."""
        if i == 0:
            tok = self.token(0)
            return tok.start if tok is not None else self.eof_offset()
        prev = self.token(i - 1)
        if prev is None:
            return self.eof_offset()
        return prev.end

    def start_offset(self, i: int) -> int:
        """Character offset where token i starts (end of input when past)."""
        tok = self.token(i)
        return tok.start if tok is not None else self.eof_offset()

    def eof_offset(self) -> int:
        while not self._done:
            self._scan_one()
        self._skip_layout()
        return self._scan_pos

    def pos_info(self, offset: int) -> tuple[int, int]:
        """1-based (line, column) of a character offset."""
        line = bisect.bisect_right(self._line_starts, offset)
        col = offset - self._line_starts[line - 1] + 1
        return line, col
