"""UDRS data model: labelled components, clauses, the subordination order.

A :class:`Udrs` is a tree of :class:`Clause` objects.  Each clause has an
upper bound, a lower bound carrying the verb's atoms, a set of scope-bearing
nodes (quantifiers, implicative universals, negations) and an explicit
partial order ``ord``.  Everything structural that the definition makes
implicit (``res(l) < l``, ``node <= upper``, ``lower <= scope(node)``, ...)
is *not* stored; :func:`implicit_closure` adds it on demand.

All values are frozen dataclasses and can be shared freely.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterator, Mapping


class UdrsError(Exception):
    """Base class for all errors raised by this package."""


class NotPartialOrder(UdrsError):
    pass


class UnknownLabel(UdrsError, KeyError):
    def __str__(self) -> str:
        return f"unknown label {self.args[0]!r}"


def label_key(name: str):
    """Natural sort key, so that ``l2`` sorts before ``l10``."""
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...]

    def rename(self, m: Mapping[str, str]) -> "Atom":
        return Atom(self.pred, tuple(m.get(a, a) for a in self.args))


@dataclass(frozen=True)
class Drs:
    universe: tuple[str, ...] = ()
    atoms: tuple[Atom, ...] = ()

    def rename(self, m: Mapping[str, str]) -> "Drs":
        return Drs(tuple(m.get(x, x) for x in self.universe),
                   tuple(a.rename(m) for a in self.atoms))


@dataclass(frozen=True)
class Quant:
    """``<Q x, res, scope>``.

    ``var=None`` is the implicative form ``res => scope``: every referent of
    the restrictor universe is bound unselectively.  Its quantifier name is
    always ``every``.
    """

    name: str
    var: str | None
    res: str
    restrictor: Drs
    scope: str

    @property
    def implicative(self) -> bool:
        return self.var is None

    def bound(self) -> tuple[str, ...]:
        vs = () if self.var is None else (self.var,)
        return vs + tuple(x for x in self.restrictor.universe if x != self.var)


@dataclass(frozen=True)
class Neg:
    body: str

    @property
    def res(self) -> str:
        return self.body

    @property
    def scope(self) -> str:
        return self.body


@dataclass(frozen=True)
class Node:
    label: str
    cond: Quant | Neg

    @property
    def res(self) -> str:
        return self.cond.res

    @property
    def scope(self) -> str:
        return self.cond.scope

    @property
    def kind(self) -> str:
        return "neg" if isinstance(self.cond, Neg) else "quant"

    @property
    def qname(self) -> str:
        return "not" if isinstance(self.cond, Neg) else self.cond.name


@dataclass(frozen=True)
class Edge:
    """``lo <= hi`` where ``hi`` may be wrapped in ``scope(.)`` or ``res(.)``."""

    lo: str
    hi: str
    fn: str = "label"  # label | scope | res


@dataclass(frozen=True)
class Sub:
    """A subordinate clause attached below ``host`` (``sub(upper)`` at host)."""

    host: str
    clause: "Clause"


@dataclass(frozen=True)
class Clause:
    upper: str
    lower: str
    nodes: tuple[Node, ...] = ()
    base: tuple[Atom, ...] = ()
    ord: tuple[Edge, ...] = ()
    subs: tuple[Sub, ...] = ()
    index: str | None = None
    only: tuple[tuple[str, ...], ...] | None = None  # explicit reading set, if any

    def node(self, label: str) -> Node:
        for n in self.nodes:
            if n.label == label:
                return n
        raise UnknownLabel(label)

    @property
    def node_labels(self) -> tuple[str, ...]:
        return tuple(n.label for n in self.nodes)


@dataclass(frozen=True)
class Udrs:
    top: str
    clause: Clause
    index: str | None = None
    universe: tuple[str, ...] = ()


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


# ---------------------------------------------------------------- traversal


def clauses(u: Udrs) -> Iterator[tuple[tuple[int, ...], Clause]]:
    """Depth-first ``(path, clause)``; the main clause has path ``()``."""

    def walk(path, c):
        yield path, c
        for k, s in enumerate(c.subs):
            yield from walk(path + (k,), s.clause)

    yield from walk((), u.clause)


def clause_at(u: Udrs, path: tuple[int, ...]) -> Clause:
    c = u.clause
    for k in path:
        c = c.subs[k].clause
    return c


def all_nodes(u: Udrs) -> Iterator[tuple[Clause, Node]]:
    for _, c in clauses(u):
        for n in c.nodes:
            yield c, n


def label_list(u: Udrs) -> list[str]:
    """Every label occurrence that introduces a label (duplicates kept)."""
    out = [u.top] if u.top != u.clause.upper else []
    for _, c in clauses(u):
        out += [c.upper, c.lower]
        for n in c.nodes:
            out.append(n.label)
            if isinstance(n.cond, Neg):
                out.append(n.cond.body)
            else:
                out += [n.cond.res, n.cond.scope]
    return out


def labels(u: Udrs) -> set[str]:
    return set(label_list(u))


def referent_list(u: Udrs) -> list[str]:
    out = list(u.universe)
    for _, n in all_nodes(u):
        if isinstance(n.cond, Quant):
            out += list(n.cond.bound())
    return out


def referents(u: Udrs) -> set[str]:
    return set(referent_list(u))


def atoms_of(u: Udrs) -> Iterator[Atom]:
    for _, c in clauses(u):
        yield from c.base
        for n in c.nodes:
            if isinstance(n.cond, Quant):
                yield from n.cond.restrictor.atoms


def constants(u: Udrs) -> set[str]:
    refs = referents(u)
    return {a for at in atoms_of(u) for a in at.args if a not in refs}


def predicates(u: Udrs) -> dict[str, int]:
    out: dict[str, int] = {}
    for at in atoms_of(u):
        if out.setdefault(at.pred, len(at.args)) != len(at.args):
            raise UdrsError(f"predicate {at.pred} used with two arities")
    return out


def names(u: Udrs) -> set[str]:
    return labels(u) | referents(u) | constants(u)


def find_label(u: Udrs, label: str) -> tuple[str, tuple[int, ...], Node | None]:
    """Classify ``label``: ``(role, clause path, node)``.

    Roles: top, upper, lower, node, res, scope (neg bodies report ``scope``).
    """
    if label == u.top and u.top != u.clause.upper:
        return "top", (), None
    for path, c in clauses(u):
        if label == c.upper:
            return "upper", path, None
        if label == c.lower:
            return "lower", path, None
        for n in c.nodes:
            if label == n.label:
                return "node", path, n
            if isinstance(n.cond, Neg):
                if label == n.cond.body:
                    return "scope", path, n
            elif label == n.cond.res:
                return "res", path, n
            elif label == n.cond.scope:
                return "scope", path, n
    raise UnknownLabel(label)


# ---------------------------------------------------------------- order


def _resolve(c_nodes: Mapping[str, Node], e: Edge) -> str:
    if e.fn == "label":
        return e.hi
    n = c_nodes.get(e.hi)
    if n is None:
        raise UnknownLabel(e.hi)
    return n.scope if e.fn == "scope" else n.res


def node_index(u: Udrs) -> dict[str, Node]:
    return {n.label: n for _, n in all_nodes(u)}


def resolve_edge(u: Udrs, e: Edge) -> tuple[str, str]:
    return e.lo, _resolve(node_index(u), e)


def structural_edges(u: Udrs) -> list[tuple[str, str]]:
    """Edges every UDRS carries implicitly, plus the resolved explicit ORD."""
    idx = node_index(u)
    out = []
    if u.top != u.clause.upper:
        out.append((u.clause.upper, u.top))
    for _, c in clauses(u):
        out.append((c.lower, c.upper))
        for n in c.nodes:
            out.append((n.label, c.upper))
            out.append((c.lower, n.scope))
            out.append((n.res, n.label))
            out.append((n.scope, n.label))
        for s in c.subs:
            out.append((s.clause.upper, s.host))
        for e in c.ord:
            out.append((e.lo, _resolve(idx, e)))
    return out


@lru_cache(maxsize=8192)
def implicit_closure(u: Udrs) -> frozenset[tuple[str, str]]:
    """Reflexive-transitive closure of explicit plus structural edges.

    Raises :class:`NotPartialOrder` when the result is not antisymmetric.
    """
    labs = labels(u)
    up: dict[str, set[str]] = {l: set() for l in labs}
    for a, b in structural_edges(u):
        if a not in up:
            raise UnknownLabel(a)
        if b not in up:
            raise UnknownLabel(b)
        up[a].add(b)
    reach: dict[str, set[str]] = {}
    for l in labs:
        seen = {l}
        stack = [l]
        while stack:
            x = stack.pop()
            for y in up[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach[l] = seen
    for a in labs:
        for b in reach[a]:
            if a != b and a in reach[b]:
                raise NotPartialOrder(f"{a} and {b} subordinate each other")
    return frozenset((a, b) for a in labs for b in reach[a])


def leq(u: Udrs, a: str, b: str) -> bool:
    return (a, b) in implicit_closure(u)


def node_precedence(u: Udrs, c: Clause) -> frozenset[tuple[str, str]]:
    """Pairs ``(m, n)`` of clause nodes where ``m`` outscopes ``n`` in every reading."""
    clo = implicit_closure(u)
    out = set()
    for m in c.nodes:
        for n in c.nodes:
            if m is n:
                continue
            if (n.label, m.scope) in clo or (n.label, m.label) in clo:
                out.add((m.label, n.label))
    return frozenset(out)


def is_semilattice(u: Udrs) -> bool:
    clo = implicit_closure(u)
    labs = sorted(labels(u), key=label_key)
    if any((l, u.top) not in clo for l in labs):
        return False
    for a, b in itertools.combinations(labs, 2):
        ubs = [c for c in labs if (a, c) in clo and (b, c) in clo]
        if not any(all((m, c) in clo for c in ubs) for m in ubs):
            return False
    return True


# ---------------------------------------------------------------- validation


def validate(u: Udrs) -> Violation | None:
    """Check ``u`` against the definition of UDRSs.  ``None`` means ok."""
    seen: set[str] = set()
    for l in label_list(u):
        if l in seen:
            return Violation("duplicate-label", f"label {l} introduced twice")
        seen.add(l)
    refs = referent_list(u)
    dup = [x for x in set(refs) if refs.count(x) > 1]
    if dup:
        return Violation("duplicate-referent", f"referent {sorted(dup)[0]} declared twice")
    if set(refs) & seen:
        return Violation("label-referent-clash", f"{sorted(set(refs) & seen)[0]} is both")
    for path, c in clauses(u):
        if c.upper == c.lower and c.nodes:
            return Violation("clause-bounds", f"clause {c.upper} has equal upper and lower bound")
        own = {c.upper, c.lower}
        for n in c.nodes:
            if n.label == c.lower:
                return Violation("lower-bound-distinguished",
                                 f"lower bound {c.lower} carries a distinguished condition")
            if isinstance(n.cond, Quant):
                if n.cond.res == n.cond.scope:
                    return Violation("res-equals-scope", f"node {n.label} has res = scope")
                if n.cond.implicative and n.cond.name != "every":
                    return Violation("implicative-name", f"node {n.label}: implicative form must be 'every'")
            own |= {n.label, n.res, n.scope}
        for s in c.subs:
            if s.host == c.lower:
                return Violation("lower-bound-subordinate",
                                 f"clause attached below lower bound {c.lower}")
            if s.host not in own:
                return Violation("sub-host", f"sub clause host {s.host} is not a label of clause {c.upper}")
        node_labels = set(c.node_labels)
        for e in c.ord:
            if e.lo not in seen:
                return Violation("unknown-label", f"ORD mentions unknown label {e.lo}")
            if e.fn != "label" and e.hi not in node_labels:
                return Violation("unknown-label", f"ORD mentions {e.fn}({e.hi}) for a non-node")
            if e.fn == "label" and e.hi not in seen:
                return Violation("unknown-label", f"ORD mentions unknown label {e.hi}")
            if e.fn == "label" and e.hi == c.lower and e.lo != c.lower:
                return Violation("lower-bound-subordinate", f"{e.lo} placed below lower bound {c.lower}")
    try:
        clo = implicit_closure(u)
    except NotPartialOrder as exc:
        return Violation("ord-cycle", str(exc))
    for _, c in clauses(u):
        below = [a for (a, b) in clo if b == c.lower and a != c.lower]
        if below:
            return Violation("lower-bound-subordinate", f"{below[0]} below lower bound {c.lower}")
        if c.only is not None:
            prec = node_precedence(u, c)
            if not c.only:
                return Violation("empty-reading-set", f"clause {c.upper} lists no admissible reading")
            for r in c.only:
                at = {l: i for i, l in enumerate(r)}
                if sorted(r) != sorted(c.node_labels) or any(at[a] > at[b] for a, b in prec):
                    return Violation("reading-set", f"listed order {' '.join(r)} is not a reading of {c.upper}")
    if not is_semilattice(u):
        return Violation("not-semilattice", f"labels do not form an upper semilattice with top {u.top}")
    return None


def check(u: Udrs) -> Udrs:
    v = validate(u)
    if v is not None:
        raise UdrsError(str(v))
    return u


# ---------------------------------------------------------------- renaming


class Namer:
    """Deterministic fresh-name supply: ``l1`` -> ``l1_7`` with a shared counter."""

    def __init__(self, taken: set[str], counter: int = 0):
        self.taken = set(taken)
        self.counter = counter

    def fresh(self, name: str) -> str:
        base = re.sub(r"_\d+$", "", name)
        while True:
            self.counter += 1
            cand = f"{base}_{self.counter}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


def _map_clause(c: Clause, lm: Mapping[str, str], rm: Mapping[str, str]) -> Clause:
    L = lambda l: lm.get(l, l)  # noqa: E731
    nodes = []
    for n in c.nodes:
        if isinstance(n.cond, Neg):
            cond: Quant | Neg = Neg(L(n.cond.body))
        else:
            q = n.cond
            cond = Quant(q.name, None if q.var is None else rm.get(q.var, q.var), L(q.res),
                         q.restrictor.rename(rm), L(q.scope))
        nodes.append(Node(L(n.label), cond))
    return Clause(
        upper=L(c.upper), lower=L(c.lower), nodes=tuple(nodes),
        base=tuple(a.rename(rm) for a in c.base),
        ord=tuple(Edge(L(e.lo), L(e.hi), e.fn) for e in c.ord),
        subs=tuple(Sub(L(s.host), _map_clause(s.clause, lm, rm)) for s in c.subs),
        index=c.index,
        only=None if c.only is None else tuple(tuple(L(x) for x in r) for r in c.only),
    )


def rename(u: Udrs, label_map: Mapping[str, str], ref_map: Mapping[str, str] = {}) -> Udrs:
    return Udrs(label_map.get(u.top, u.top), _map_clause(u.clause, label_map, ref_map),
                u.index, tuple(ref_map.get(x, x) for x in u.universe))


@dataclass(frozen=True)
class Variant:
    udrs: Udrs
    labels: dict[str, str]
    refs: dict[str, str]


def fresh_variant(u: Udrs, namer: Namer) -> Variant:
    """Isomorphic copy with all labels and referents replaced by fresh ones."""
    namer.taken |= names(u)
    lm = {l: namer.fresh(l) for l in sorted(labels(u), key=label_key)}
    rm = {x: namer.fresh(x) for x in sorted(referents(u), key=label_key)}
    return Variant(rename(u, lm, rm), lm, rm)


# ---------------------------------------------------------------- sub-UDRS


def _restrict_edges(edges, keep):
    return tuple(e for e in edges if e.lo in keep and (e.hi in keep))


def sub_udrs(u: Udrs, label: str) -> Udrs:
    """The sub-UDRS dominated by ``label``.

    Supported for the top, clause upper bounds, restrictor labels and scope
    (or negation body) labels.  Node labels are rejected: the fragment they
    dominate has no upper bound of its own.
    """
    role, path, node = find_label(u, label)
    if role == "top" or (role == "upper" and path == ()):
        return u
    c = clause_at(u, path)
    if role == "upper":
        return Udrs(label, c, c.index)
    if role == "lower":
        return Udrs(label, Clause(label, label, (), c.base))
    if role == "node":
        raise UdrsError(f"{label} is a node label; ask for its res or scope label")
    assert node is not None
    subs = tuple(s for s in c.subs if s.host == label)
    if role == "res":
        q = node.cond
        assert isinstance(q, Quant)
        uni = q.bound()
        return Udrs(label, Clause(label, label, (), q.restrictor.atoms, (), subs), None, uni)
    clo = implicit_closure(u)
    below = tuple(n for n in c.nodes if n is not node and (n.label, label) in clo)
    keep = {n.label for n in below} | {c.lower, label}
    subs = tuple(s for s in c.subs if s.host == label or s.host in keep
                 or any(s.host in (n.res, n.scope) for n in below))
    ords = tuple(e for e in c.ord if e.lo in keep and (e.hi in keep))
    ords = tuple(e if e.hi != c.upper else Edge(e.lo, label) for e in ords)
    return Udrs(label, Clause(label, c.lower, below, c.base, ords, subs), None)


# ---------------------------------------------------------------- database


@dataclass(frozen=True)
class Database:
    """An ordered set of UDRSs plus the fresh-name counter."""

    entries: tuple[Udrs, ...] = ()
    counter: int = 0

    def names(self) -> set[str]:
        out: set[str] = set()
        for u in self.entries:
            out |= names(u)
            out |= {c.index for _, c in clauses(u) if c.index}
            if u.index:
                out.add(u.index)
        return out

    def namer(self) -> Namer:
        return Namer(self.names(), self.counter)

    @property
    def registry(self) -> set[str]:
        out = set()
        for u in self.entries:
            if u.index:
                out.add(u.index)
            out |= {c.index for _, c in clauses(u) if c.index}
        return out

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Udrs:
        return self.entries[i]

    def add(self, u: Udrs) -> "Database":
        """Append ``u``; labels clashing with existing entries are freshened."""
        taken = set()
        for e in self.entries:
            taken |= labels(e)
        if labels(u) & taken:
            namer = self.namer()
            namer.taken |= names(u)
            lm = {l: namer.fresh(l) for l in sorted(labels(u), key=label_key)}
            u = rename(u, lm)
            return Database(self.entries + (u,), namer.counter)
        return Database(self.entries + (u,), self.counter)

    def replace_entry(self, i: int, u: Udrs) -> "Database":
        es = list(self.entries)
        es[i] = u
        return Database(tuple(es), self.counter)

    def fresh_index(self) -> tuple[str, "Database"]:
        namer = self.namer()
        idx = namer.fresh("i")
        return idx, replace(self, counter=namer.counter)

    def ensure_index(self, i: int) -> tuple[str, "Database"]:
        """Give entry ``i`` an explicit index (semantically a no-op)."""
        u = self.entries[i]
        if u.index is not None:
            return u.index, self
        idx, db = self.fresh_index()
        return idx, db.replace_entry(i, replace(u, index=idx))


def standalone(u: Udrs, path: tuple[int, ...], own: str = "") -> Udrs:
    """Clause ``path`` of ``u`` as a UDRS of its own, keeping its correlation index."""
    c = clause_at(u, path)
    idx = effective_indices(u, own or "@").get(path) if path else u.index
    if idx is not None and idx.startswith("@"):
        idx = None
    top = "t_" + c.upper
    taken = labels(u)
    while top in taken:
        top = "t_" + top
    return Udrs(top, replace(c, index=None), idx)


def effective_indices(u: Udrs, own: str) -> dict[tuple[int, ...], str]:
    """Correlation index of every clause of ``u``.

    The main clause takes the UDRS index (or ``own`` when unindexed); a
    subclause takes its explicit index, otherwise ``parent/k``.
    """
    out: dict[tuple[int, ...], str] = {}
    for path, c in clauses(u):
        if path == ():
            out[path] = u.index if u.index is not None else own
        elif c.index is not None:
            out[path] = c.index
        else:
            out[path] = f"{out[path[:-1]]}/{path[-1]}"
    return out


__all__ = [
    "Atom", "Drs", "Quant", "Neg", "Node", "Edge", "Sub", "Clause", "Udrs", "Database",
    "Violation", "Variant", "Namer", "UdrsError", "NotPartialOrder", "UnknownLabel",
    "validate", "check", "implicit_closure", "leq", "node_precedence", "is_semilattice",
    "sub_udrs", "fresh_variant", "rename", "clauses", "clause_at", "all_nodes", "labels",
    "referents", "constants", "predicates", "names", "find_label", "label_key",
    "effective_indices", "atoms_of", "standalone",
]
