"""Rendering and filtering of recorded syntax errors."""

from __future__ import annotations

import json
import warnings

from .engine import ParseError
from .model import Grammar, GrammarError


def format_error(filename: str, err: ParseError) -> str:
    """Conventional one-line form: <file>:<line>: syntax error, <message>."""
    return f"{filename}:{err.line}: syntax error, {err.message}"


def load_messages(path: str, grammar: Grammar | None = None) -> dict[str, str]:
    """Label-to-message table from a JSON file, merged over the grammar's
    defaults.  Unknown labels are kept but flagged with a warning so a
    renamed label does not silently lose its message."""
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise GrammarError(
                f"malformed message file {path}: {exc.msg}",
                exc.lineno, exc.colno) from exc
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise GrammarError(f"message file {path} must map label names to strings")
    merged: dict[str, str] = dict(grammar.messages) if grammar is not None else {}
    if grammar is not None:
        for label in data:
            if label not in grammar.labels:
                warnings.warn(f"message for unknown label {label!r} in {path}")
    merged.update(data)
    return merged


def suppress_cascaded(errors: list[ParseError], window: int) -> list[ParseError]:
    """Drop errors reported fewer than ``window`` tokens after the previous
    kept one.  Recovery restarts the parse mid-stream, so a burst of
    diagnostics right after a repair usually restates one mistake."""
    if window <= 0:
        return list(errors)
    kept: list[ParseError] = []
    for err in errors:
        if kept and err.token_index - kept[-1].token_index < window:
            continue
        kept.append(err)
    return kept
