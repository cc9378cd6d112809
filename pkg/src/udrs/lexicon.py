"""Lexical theory: hyponymy, complement postulates, exchange and determiner tables."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import UdrsError
from .sexpr import SExpr, dumps, pretty


class LexError(UdrsError):
    pass


DEFAULT_PI = frozenset({("a", "every"), ("some", "every"), ("at-least-one", "every")})
DEFAULT_DETRULES: frozenset[tuple[str, str]] = frozenset()


@dataclass(frozen=True)
class LexTheory:
    """Meaning postulates over predicate and determiner names.

    ``hypo`` holds pairs ``(p, q)`` read "every p is a q"; ``compl`` holds
    ``(a, b)`` read "a is the complement of b"; ``pi`` lists determiner
    pairs allowed to trade scope; ``detrules`` lists ``(q1, q2)`` with
    ``q1 >> q2`` on identical restrictor and scope.
    """

    hypo: frozenset[tuple[str, str]] = frozenset()
    compl: frozenset[tuple[str, str]] = frozenset()
    pi: frozenset[tuple[str, str]] = field(default=DEFAULT_PI)
    detrules: frozenset[tuple[str, str]] = field(default=DEFAULT_DETRULES)

    def __post_init__(self):
        self._check_acyclic()
        seen: dict[str, str] = {}
        for a, b in self.compl:
            if a == b:
                raise LexError(f"{a} cannot be its own complement")
            if a in seen and seen[a] != b:
                raise LexError(f"{a} declared the complement of both {seen[a]} and {b}")
            seen[a] = b
        for a in seen:
            x, steps = a, 0
            while x in seen:
                x, steps = seen[x], steps + 1
                if steps > len(seen):
                    raise LexError(f"complement postulates around {a} are circular")

    def _check_acyclic(self) -> None:
        clo = self.hyponymy_closure()
        for p, q in clo:
            if p != q and (q, p) in clo:
                raise LexError(f"hyponymy cycle between {p} and {q}")

    def hyponymy_closure(self) -> frozenset[tuple[str, str]]:
        preds = {p for pair in self.hypo for p in pair}
        up = {p: {q for (a, q) in self.hypo if a == p} for p in preds}
        out = set()
        for p in preds:
            seen, stack = {p}, [p]
            while stack:
                x = stack.pop()
                for y in up.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            out |= {(p, q) for q in seen}
        return frozenset(out)

    def below(self, p: str, q: str) -> bool:
        """``p`` entails ``q`` (reflexive)."""
        return p == q or (p, q) in self.hyponymy_closure()

    def with_hypo(self, pairs) -> "LexTheory":
        """Add hyponymy pairs, skipping any that would close a cycle."""
        out = self
        for pair in sorted(pairs):
            if out.below(*pair):
                continue
            try:
                out = LexTheory(out.hypo | {pair}, out.compl, out.pi, out.detrules)
            except LexError:
                continue
        return out

    def merge(self, other: "LexTheory") -> "LexTheory":
        pi = self.pi | other.pi
        return LexTheory(self.hypo | other.hypo, self.compl | other.compl, pi,
                         self.detrules | other.detrules)

    def predicates(self) -> set[str]:
        return {p for pair in self.hypo | self.compl for p in pair}


def lex_from_sexpr(x: SExpr) -> LexTheory:
    from .syntax import _fail  # shared error formatting

    if not isinstance(x, list) or not x or x[0] != "lex":
        raise _fail("expected (lex ...)", x)
    hypo, compl, pi, det = set(), set(), set(), set()
    for item in x[1:]:
        if not isinstance(item, list) or len(item) != 3 or not all(isinstance(t, str) for t in item):
            raise _fail("lex entries are (hypo P Q), (compl P Q), (pi Q1 Q2) or (detrule Q1 Q2)", item)
        kind, a, b = item
        target = {"hypo": hypo, "compl": compl, "pi": pi, "detrule": det}.get(kind)
        if target is None:
            raise _fail(f"unknown lex entry {kind}", item)
        target.add((a, b))
    try:
        return LexTheory(frozenset(hypo), frozenset(compl), DEFAULT_PI | frozenset(pi),
                         DEFAULT_DETRULES | frozenset(det))
    except LexError as e:
        raise _fail(str(e), x) from None


def lex_to_sexpr(lex: LexTheory) -> list:
    out: list = ["lex"]
    for kind, pairs in (("hypo", lex.hypo), ("compl", lex.compl),
                        ("pi", lex.pi - DEFAULT_PI), ("detrule", lex.detrules - DEFAULT_DETRULES)):
        out += [[kind, a, b] for a, b in sorted(pairs)]
    return out


def print_lex(lex: LexTheory) -> str:
    return pretty(lex_to_sexpr(lex))


__all__ = ["LexTheory", "LexError", "lex_from_sexpr", "lex_to_sexpr", "print_lex", "dumps"]
