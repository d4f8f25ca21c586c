"""Shared test utilities.

naive_match is an independent reference implementation of the matching
semantics over a plain kind sequence, written directly from the defining
equations with no sharing of engine code, so differential tests mean
something.  The generators produce random grammars (acyclic by
construction: each rule only references later ones) and random valid
programs for the miniature Java grammar.
"""

from __future__ import annotations

import random

from pegrec.model import (
    AnyToken,
    Choice,
    Empty,
    Expr,
    Grammar,
    NonTerminal,
    Not,
    Sequence,
    Star,
    Terminal,
    validate,
)

EOF = "EOF"


def naive_match(rules: dict[str, Expr], e: Expr, kinds: tuple[str, ...],
                pos: int) -> int | None:
    """End position if e matches kinds at pos, else None.  Handles only
    label-free desugared grammars; Terminal('EOF') matches at the end."""
    if isinstance(e, Empty):
        return pos
    if isinstance(e, Terminal):
        if e.kind == EOF:
            return pos if pos == len(kinds) else None
        if pos < len(kinds) and kinds[pos] == e.kind:
            return pos + 1
        return None
    if isinstance(e, AnyToken):
        return pos + 1 if pos < len(kinds) else None
    if isinstance(e, Sequence):
        mid = naive_match(rules, e.left, kinds, pos)
        if mid is None:
            return None
        return naive_match(rules, e.right, kinds, mid)
    if isinstance(e, Choice):
        out = naive_match(rules, e.first, kinds, pos)
        if out is not None:
            return out
        return naive_match(rules, e.second, kinds, pos)
    if isinstance(e, Star):
        while True:
            nxt = naive_match(rules, e.body, kinds, pos)
            if nxt is None or nxt == pos:
                return pos
            pos = nxt
    if isinstance(e, Not):
        return pos if naive_match(rules, e.body, kinds, pos) is None else None
    if isinstance(e, NonTerminal):
        return naive_match(rules, rules[e.name], kinds, pos)
    raise TypeError(f"naive_match cannot handle {e!r}")


# --- random grammars ---------------------------------------------------------

ALPHABET = ("AA", "BB", "CC")
ALPHABET_LEXICAL = {"AA": "a", "BB": "b", "CC": "c"}


def _random_expr(rng: random.Random, later_rules: list[str], depth: int,
                 nullable_rules: set[str]) -> tuple[Expr, bool]:
    """Random expression plus its nullability (needed to keep star bodies
    from being nullable, which would make repetition ill-defined)."""
    choices = ["terminal", "terminal", "terminal", "empty"]
    if depth > 0:
        choices += ["seq", "seq", "choice", "choice", "star", "not"]
    if later_rules:
        choices += ["ref", "ref"]
    kind = rng.choice(choices)
    if kind == "terminal":
        return Terminal(rng.choice(ALPHABET)), False
    if kind == "empty":
        return Empty(), True
    if kind == "ref":
        name = rng.choice(later_rules)
        return NonTerminal(name), name in nullable_rules
    if kind == "seq":
        a, na = _random_expr(rng, later_rules, depth - 1, nullable_rules)
        b, nb = _random_expr(rng, later_rules, depth - 1, nullable_rules)
        return Sequence(a, b), na and nb
    if kind == "choice":
        a, na = _random_expr(rng, later_rules, depth - 1, nullable_rules)
        b, nb = _random_expr(rng, later_rules, depth - 1, nullable_rules)
        return Choice(a, b), na or nb
    if kind == "star":
        for _ in range(20):
            body, nb = _random_expr(rng, later_rules, depth - 1, nullable_rules)
            if not nb:
                return Star(body), True
        return Star(Terminal(rng.choice(ALPHABET))), True
    if kind == "not":
        body, _ = _random_expr(rng, later_rules, depth - 1, nullable_rules)
        return Not(body), True
    raise AssertionError(kind)


def random_grammar(seed: int, max_rules: int = 5, depth: int = 3) -> Grammar:
    """Small random grammar over the a/b/c alphabet.  Acyclic, so free of
    left recursion; rule R0 is the start."""
    rng = random.Random(seed)
    n = rng.randint(1, max_rules)
    names = [f"R{i}" for i in range(n)]
    rules: dict[str, Expr] = {}
    nullable_rules: set[str] = set()
    for i in reversed(range(n)):
        later = names[i + 1:]
        body, nb = _random_expr(rng, later, depth, nullable_rules)
        rules[names[i]] = body
        if nb:
            nullable_rules.add(names[i])
    ordered = {name: rules[name] for name in names}
    g = Grammar(rules=ordered, lexical={}, start="R0")
    return validate(_with_abc_lexicon(g))


def _with_abc_lexicon(g: Grammar) -> Grammar:
    from pegrec.model import Literal

    g.lexical = {kind: Literal(text) for kind, text in ALPHABET_LEXICAL.items()}
    return g


def render_input(kinds: tuple[str, ...]) -> str:
    """Text whose token sequence is exactly `kinds`."""
    return " ".join(ALPHABET_LEXICAL[k] for k in kinds)


def all_inputs(max_len: int):
    """Every kind sequence over the alphabet up to max_len, shortest first."""
    frontier: list[tuple[str, ...]] = [()]
    for seq in frontier:
        yield seq
        if len(seq) < max_len:
            frontier.extend(seq + (k,) for k in ALPHABET)


# --- random miniature Java programs ------------------------------------------

NAMES = ("x", "y", "z", "count", "total", "value", "i_0", "tmp")


def random_program(seed: int) -> str:
    """A syntactically valid program for the tiny_java grammar."""
    rng = random.Random(seed)

    def atom(depth: int) -> str:
        roll = rng.random()
        if depth > 0 and roll < 0.2:
            return f"( {expr(depth - 1)} )"
        if roll < 0.6:
            return str(rng.randint(0, 9999))
        return rng.choice(NAMES)

    def expr(depth: int) -> str:
        # ops appear tightest first, so the chain always parses
        parts = [atom(depth)]
        for op in ("*", "/", "+", "-", "<", "=="):
            while rng.random() < 0.2:
                parts.append(op)
                parts.append(atom(depth))
        return " ".join(parts)

    def stmt(depth: int) -> str:
        roll = rng.randrange(6) if depth > 0 else rng.randrange(3)
        if roll == 0:
            return f"int {rng.choice(NAMES)} = {expr(depth)} ;"
        if roll == 1:
            return f"int {rng.choice(NAMES)} ;"
        if roll == 2:
            return f"{rng.choice(NAMES)} = {expr(depth)} ;"
        if roll == 3:
            return f"System.out.println ( {expr(depth)} ) ;"
        if roll == 4:
            body = stmt(depth - 1)
            alt = f" else {stmt(depth - 1)}" if rng.random() < 0.5 else ""
            return f"if ( {expr(depth)} ) {body}{alt}"
        if roll == 5:
            return f"while ( {expr(depth)} ) {block(depth - 1)}"
        raise AssertionError

    def block(depth: int) -> str:
        stmts = " ".join(stmt(depth) for _ in range(rng.randrange(3)))
        return "{ " + stmts + " }" if stmts else "{ }"

    body = " ".join(stmt(2) for _ in range(rng.randint(1, 4)))
    return ("public class Example { "
            "public static void main ( String [ ] args ) { "
            f"{body} }} }}")
