"""FIRST and FOLLOW set computation over the token alphabet.

FIRST(p) is the set of token kinds that can begin a successful match of p,
plus an epsilon marker when p can succeed consuming nothing.  FOLLOW(A) is
the set of kinds that can appear immediately after a complete match of a
syntactic rule A, seeded with EOF for the start rule.  Both are least fixed
points.  Conventions:

  - FIRST(throw l) is empty: a throw never begins a match.
  - FIRST(!p) = FIRST(&p) = {epsilon}: predicates consume nothing.
  - FIRST(.) is every declared kind.  "." also accepts stray-character
    tokens outside the alphabet, so this is the declared approximation.
  - Predicate bodies contribute nothing to FOLLOW.
  - FOLLOW sets never contain epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    And,
    Annotated,
    AnyToken,
    Choice,
    Empty,
    EOF_KIND,
    Expr,
    Grammar,
    NonTerminal,
    Not,
    Optional,
    Plus,
    Sequence,
    Star,
    Terminal,
    Throw,
)


@dataclass(frozen=True)
class TokenSet:
    """A set of token kinds plus an epsilon flag."""

    kinds: frozenset[str]
    has_epsilon: bool = False

    def union(self, other: "TokenSet") -> "TokenSet":
        return TokenSet(self.kinds | other.kinds, self.has_epsilon or other.has_epsilon)

    def without_epsilon(self) -> "TokenSet":
        return TokenSet(self.kinds, False)

    def with_epsilon(self) -> "TokenSet":
        return TokenSet(self.kinds, True)

    def disjoint(self, other: "TokenSet") -> bool:
        return not (self.kinds & other.kinds)

    def __contains__(self, kind: str) -> bool:
        return kind in self.kinds

    def __iter__(self):
        return iter(self.kinds)

    def __bool__(self) -> bool:
        return bool(self.kinds) or self.has_epsilon


EMPTY_SET = TokenSet(frozenset())
EPSILON_ONLY = TokenSet(frozenset(), True)


class Analysis:
    """FIRST/FOLLOW tables for one grammar.

    Works on sugared or desugared grammars.  Token kinds are the grammar's
    lexical rule names plus its anonymous literal kinds; EOF is tracked as
    the epsilon-like pseudo-kind of the Terminal("EOF") expression rather
    than as a member of the alphabet.
    """

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.all_kinds = frozenset(grammar.token_kinds())
        self._first: dict[str, TokenSet] = {n: EMPTY_SET for n in grammar.rules}
        self._compute_first()
        self._follow: dict[str, TokenSet] = {n: EMPTY_SET for n in grammar.rules}
        self._compute_follow()

    # -- FIRST ---------------------------------------------------------------

    def first_of(self, e: Expr) -> TokenSet:
        if isinstance(e, Empty):
            return EPSILON_ONLY
        if isinstance(e, Terminal):
            if e.kind == EOF_KIND:
                # matches only at end of input, consuming nothing
                return EPSILON_ONLY
            return TokenSet(frozenset((e.kind,)))
        if isinstance(e, NonTerminal):
            return self._first[e.name]
        if isinstance(e, Sequence):
            lhs = self.first_of(e.left)
            if not lhs.has_epsilon:
                return lhs
            return lhs.without_epsilon().union(self.first_of(e.right))
        if isinstance(e, Choice):
            return self.first_of(e.first).union(self.first_of(e.second))
        if isinstance(e, Star):
            return self.first_of(e.body).with_epsilon()
        if isinstance(e, Optional):
            return self.first_of(e.body).with_epsilon()
        if isinstance(e, Plus):
            return self.first_of(e.body)
        if isinstance(e, (Not, And)):
            return EPSILON_ONLY
        if isinstance(e, Throw):
            return EMPTY_SET
        if isinstance(e, AnyToken):
            return TokenSet(self.all_kinds)
        if isinstance(e, Annotated):
            return self.first_of(e.body)
        raise TypeError(f"no FIRST for {e!r}")

    def _compute_first(self) -> None:
        changed = True
        while changed:
            changed = False
            for name, body in self.grammar.rules.items():
                new = self.first_of(body)
                if new != self._first[name]:
                    self._first[name] = new
                    changed = True

    # -- FOLLOW --------------------------------------------------------------

    def calck(self, e: Expr, flw: TokenSet) -> TokenSet:
        """Kinds that can follow the current point when e then flw remain:
        FIRST(e) if e is not nullable, else (FIRST(e) minus epsilon) with flw."""
        f = self.first_of(e)
        if not f.has_epsilon:
            return f
        return f.without_epsilon().union(flw.without_epsilon())

    def _compute_follow(self) -> None:
        g = self.grammar
        self._follow[g.start] = TokenSet(frozenset((EOF_KIND,)))

        def visit(e: Expr, flw: TokenSet) -> None:
            if isinstance(e, NonTerminal):
                merged = self._follow[e.name].union(flw.without_epsilon())
                if merged != self._follow[e.name]:
                    self._follow[e.name] = merged
                    self._dirty = True
            elif isinstance(e, Sequence):
                visit(e.left, self.calck(e.right, flw))
                visit(e.right, flw)
            elif isinstance(e, Choice):
                visit(e.first, flw)
                visit(e.second, flw)
            elif isinstance(e, (Star, Plus)):
                inner = self.first_of(e.body).without_epsilon().union(flw.without_epsilon())
                visit(e.body, inner)
            elif isinstance(e, Optional):
                visit(e.body, flw)
            elif isinstance(e, Annotated):
                visit(e.body, flw)
            elif isinstance(e, (Not, And)):
                pass  # predicates consume nothing; their bodies follow nothing

        self._dirty = True
        while self._dirty:
            self._dirty = False
            for name, body in g.rules.items():
                visit(body, self._follow[name])

    def follow_of(self, rule: str) -> TokenSet:
        return self._follow[rule]

    def first_of_rule(self, rule: str) -> TokenSet:
        return self._first[rule]

    def nullable(self, e: Expr) -> bool:
        return self.first_of(e).has_epsilon

    # -- display -------------------------------------------------------------

    def format_set(self, ts: TokenSet) -> str:
        """Declaration-order rendering; epsilon prints last."""
        parts = self.grammar.sorted_kinds(k for k in ts.kinds if k != EOF_KIND)
        if EOF_KIND in ts.kinds:
            parts.append(EOF_KIND)
        if ts.has_epsilon:
            parts.append("''")
        return "{ " + ", ".join(parts) + " }" if parts else "{ }"
