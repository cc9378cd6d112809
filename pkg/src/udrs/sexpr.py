"""Minimal s-expression reader/writer with source positions.

Symbols are plain ``str``; lists are Python lists.  Every list produced by
:func:`loads` remembers where it started so syntax checks further up can
report line/column.
"""
from __future__ import annotations

from typing import Iterator, Union

SExpr = Union[str, list]


class SExprError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class Form(list):
    """A list that carries the position of its opening paren."""

    line = 0
    col = 0


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isspace():
            i, col = i + 1, col + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i, col = i + 1, col + 1
        else:
            start, scol = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i, col = i + 1, col + 1
            yield text[start:i], line, scol


def loads_all(text: str) -> list[SExpr]:
    """Parse every top-level form in ``text``."""
    stack: list[Form] = []
    out: list[SExpr] = []
    for tok, line, col in _tokens(text):
        if tok == "(":
            f = Form()
            f.line, f.col = line, col
            stack.append(f)
        elif tok == ")":
            if not stack:
                raise SExprError("unbalanced ')'", line, col)
            f = stack.pop()
            (stack[-1] if stack else out).append(f)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise SExprError("unclosed '('", stack[-1].line, stack[-1].col)
    return out


def loads(text: str) -> SExpr:
    forms = loads_all(text)
    if len(forms) != 1:
        raise SExprError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def dumps(x: SExpr) -> str:
    if isinstance(x, list):
        return "(" + " ".join(dumps(e) for e in x) + ")"
    return str(x)


def pretty(x: SExpr, width: int = 78, indent: int = 0) -> str:
    """Pretty-print; forms that fit on one line stay on one line."""
    flat = dumps(x)
    if not isinstance(x, list) or len(flat) + indent <= width or len(x) < 2:
        return flat
    head = dumps(x[0])
    pad = " " * (indent + 2)
    parts = []
    i = 1
    # keep ":key value" pairs on one line
    while i < len(x):
        e = x[i]
        if isinstance(e, str) and e.startswith(":") and i + 1 < len(x):
            val = pretty(x[i + 1], width, indent + 2 + len(e) + 1)
            parts.append(f"{e} {val}")
            i += 2
        else:
            parts.append(pretty(e, width, indent + 2))
            i += 1
    return "(" + head + "\n" + "\n".join(pad + p for p in parts) + ")"


def where(x: SExpr) -> tuple[int, int]:
    return (getattr(x, "line", 0), getattr(x, "col", 0))
