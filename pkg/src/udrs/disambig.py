"""Readings of UDRSs: scopings, type-sameness, correlated disambiguation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from . import kernels
from .core import (Clause, Database, Node, Quant, Udrs, UdrsError, clauses, effective_indices,
                   implicit_closure, label_key, node_precedence)


class CorrelationError(UdrsError):
    """Coindexed representations that cannot be disambiguated together."""


@dataclass(frozen=True)
class Scoping:
    """One permutation (widest scope first) per clause, keyed by clause path.

    A ``None`` permutation marks a clause forced to falsity: its correlation
    partner picked an order this clause does not admit.
    """

    per_clause: tuple[tuple[tuple[int, ...], tuple[str, ...] | None], ...]

    def __getitem__(self, path: tuple[int, ...]) -> tuple[str, ...] | None:
        for p, perm in self.per_clause:
            if p == path:
                return perm
        raise KeyError(path)

    def by_upper(self, u: Udrs) -> dict[str, tuple[str, ...] | None]:
        ups = {p: c.upper for p, c in clauses(u)}
        return {ups[p]: perm for p, perm in self.per_clause}

    @property
    def total(self) -> bool:
        return all(perm is not None for _, perm in self.per_clause)


# ---------------------------------------------------------------- enumeration


def linear_extensions(items: Sequence[str], above: set[tuple[str, str]] | frozenset) -> list[tuple[str, ...]]:
    """All orders of ``items`` with ``a`` before ``b`` for every ``(a, b)`` in ``above``.

    Output is lexicographic in :func:`label_key` order.
    """
    items = sorted(items, key=label_key)
    preds = {x: {a for (a, b) in above if b == x} for x in items}
    out: list[tuple[str, ...]] = []
    placed: list[str] = []
    done: set[str] = set()

    def rec():
        if len(placed) == len(items):
            out.append(tuple(placed))
            return
        for x in items:
            if x not in done and preds[x] <= done:
                placed.append(x)
                done.add(x)
                rec()
                done.discard(x)
                placed.pop()

    rec()
    return out


def clause_readings(u: Udrs, c: Clause) -> list[tuple[str, ...]]:
    out = linear_extensions(c.node_labels, node_precedence(u, c))
    if c.only is not None:
        allowed = set(c.only)
        out = [r for r in out if r in allowed]
    return out


def enumerate_scopings(u: Udrs) -> list[Scoping]:
    """Every total scoping consistent with the implicit closure of ``u``."""
    paths, per = [], []
    for path, c in clauses(u):
        paths.append(path)
        per.append(clause_readings(u, c))
    return [Scoping(tuple(zip(paths, combo))) for combo in itertools.product(*per)]


def count_readings(u: Udrs) -> int:
    """Reading count without enumerating (bitmask DP per clause)."""
    total = 1
    for _, c in clauses(u):
        if c.only is not None:
            total *= len(set(c.only))
            continue
        labs = sorted(c.node_labels, key=label_key)
        pos = {l: i for i, l in enumerate(labs)}
        masks = [0] * len(labs)
        for a, b in node_precedence(u, c):
            masks[pos[b]] |= 1 << pos[a]
        total *= kernels.count_linear_extensions(masks)
    return total


def consistent(u: Udrs, s: Scoping) -> bool:
    for path, c in clauses(u):
        perm = s[path]
        if perm is None:
            continue
        if sorted(perm) != sorted(c.node_labels):
            return False
        at = {l: i for i, l in enumerate(perm)}
        if any(at[a] > at[b] for a, b in node_precedence(u, c)):
            return False
        if c.only is not None and perm not in c.only:
            return False
    return True


# ---------------------------------------------------------------- type sameness


def signature(n: Node) -> tuple[str, str]:
    return (n.kind, n.qname)


def _restrictor_preds(n: Node) -> tuple[str, ...]:
    if isinstance(n.cond, Quant):
        return tuple(sorted(a.pred for a in n.cond.restrictor.atoms))
    return ()


def _shape(n: Node) -> tuple[str, bool]:
    return (n.kind, isinstance(n.cond, Quant) and n.cond.implicative)


def node_maps(c1: Clause, c2: Clause, *, injective: bool = False, loose: bool = False
              ) -> Iterator[dict[str, str]]:
    """Signature-preserving maps from the nodes of ``c1`` into those of ``c2``.

    Bijections unless ``injective``.  With ``loose`` only the node kind must
    agree, so determiners may differ.  Maps that agree on determiners and
    restrictor predicates come first.
    """
    if not injective and len(c1.nodes) != len(c2.nodes):
        return
    if len(c1.nodes) > len(c2.nodes):
        return
    key = _shape if loose else signature
    found = []
    for combo in itertools.permutations(c2.nodes, len(c1.nodes)):
        if all(key(a) == key(b) for a, b in zip(c1.nodes, combo)):
            score = (sum(signature(a) != signature(b) for a, b in zip(c1.nodes, combo)),
                     sum(_restrictor_preds(a) != _restrictor_preds(b) for a, b in zip(c1.nodes, combo)))
            found.append((score, {a.label: b.label for a, b in zip(c1.nodes, combo)}))
    found.sort(key=lambda t: t[0])
    for _, m in found:
        yield m


def _clause_label_map(c1: Clause, c2: Clause, nm: Mapping[str, str]) -> dict[str, str]:
    out = {c1.upper: c2.upper, c1.lower: c2.lower}
    for n in c1.nodes:
        m = c2.node(nm[n.label])
        out[n.label] = m.label
        out[n.res] = m.res
        out[n.scope] = m.scope
    return out


def _tree_maps(c1: Clause, c2: Clause) -> Iterator[dict[str, str]]:
    if len(c1.subs) != len(c2.subs):
        return
    for nm in node_maps(c1, c2):
        lm = _clause_label_map(c1, c2, nm)
        yield from _subs_maps(list(c1.subs), list(c2.subs), lm)


def _subs_maps(s1, s2, lm) -> Iterator[dict[str, str]]:
    if not s1:
        yield dict(lm)
        return
    first, rest = s1[0], s1[1:]
    for j, cand in enumerate(s2):
        if lm.get(first.host) != cand.host:
            continue
        for sub in _tree_maps(first.clause, cand.clause):
            merged = {**lm, **sub}
            yield from _subs_maps(rest, s2[:j] + s2[j + 1:], merged)


def same_type(u1: Udrs, u2: Udrs) -> dict[str, str] | None:
    """A label bijection preserving clause structure, node kinds, quantifier
    names and the implicit subordination order, or ``None``.

    Atoms (restrictor and verb content) are not compared.
    """
    c1, c2 = implicit_closure(u1), implicit_closure(u2)
    for lm in _tree_maps(u1.clause, u2.clause):
        # a top that coincides with the clause's upper bound is already mapped
        if u1.top not in lm and u2.top not in lm.values():
            lm[u1.top] = u2.top
        if {(lm[a], lm[b]) for a, b in c1 if a in lm and b in lm} == {
                (a, b) for a, b in c2 if a in lm.values() and b in lm.values()} and _same_only(u1, u2, lm):
            return lm
    return None


def _same_only(u1: Udrs, u2: Udrs, lm: Mapping[str, str]) -> bool:
    by_upper = {c.upper: c for _, c in clauses(u2)}
    for _, a in clauses(u1):
        b = by_upper[lm[a.upper]]
        ra = None if a.only is None else {tuple(lm[x] for x in r) for r in a.only}
        rb = None if b.only is None else set(b.only)
        if ra != rb:
            return False
    return True


# ---------------------------------------------------------------- correlation


@dataclass(frozen=True)
class Unit:
    """A clause taking part in a disambiguation."""

    entry: int
    path: tuple[int, ...]
    clause: Clause
    udrs: Udrs


@dataclass(frozen=True)
class Group:
    index: str
    template: Unit
    members: tuple[tuple[Unit, dict[str, str]], ...]   # member node -> template node
    readings: tuple[tuple[str, ...], ...]               # template node orders


@dataclass(frozen=True)
class CorrelatedAssignment:
    by_index: tuple[tuple[str, tuple[str, ...]], ...]
    by_entry: tuple[Scoping, ...]

    def index_choice(self) -> dict[str, tuple[str, ...]]:
        return dict(self.by_index)


def _transport(order: tuple[str, ...], m: Mapping[str, str]) -> tuple[str, ...]:
    inv = {v: k for k, v in m.items()}
    return tuple(inv[t] for t in order if t in inv)


def _best_map(m: Unit, template: Unit, t_readings) -> dict[str, str] | None:
    """Node map of ``m`` into the template under which the fewest template
    readings transport to orders ``m`` does not admit."""
    maps = list(node_maps(m.clause, template.clause, injective=True, loose=True))
    if len(maps) <= 1:
        return maps[0] if maps else None
    own = set(clause_readings(m.udrs, m.clause))
    misses = [sum(_transport(r, nm) not in own for r in t_readings) for nm in maps]
    return maps[misses.index(min(misses))]


def build_groups(udrss: Sequence[Udrs], respect: set[str] | None = None) -> list[Group]:
    """Group clauses by correlation index.

    Indices outside ``respect`` (when given) are treated as if each clause
    carried its own fresh index.
    """
    grouped: dict[str, list[Unit]] = {}
    for e, u in enumerate(udrss):
        eff = effective_indices(u, f"@{e}")
        for path, c in clauses(u):
            idx = eff[path]
            root = idx.split("/", 1)[0]
            if respect is not None and root not in respect and not root.startswith("@"):
                idx = f"@{e}:{idx}"
            grouped.setdefault(idx, []).append(Unit(e, path, c, u))
    groups = []
    for idx, units in grouped.items():
        template = max(units, key=lambda x: len(x.clause.nodes))
        members = []
        readings: set[tuple[str, ...]] = set(clause_readings(template.udrs, template.clause))
        t_readings = clause_readings(template.udrs, template.clause)
        for m in units:
            nm = _best_map(m, template, t_readings)
            if nm is None:
                raise CorrelationError(
                    f"clauses {template.clause.upper} and {m.clause.upper} share index {idx} "
                    "but are not of the same type")
            members.append((m, nm))
            if len(m.clause.nodes) == len(template.clause.nodes):
                for r in clause_readings(m.udrs, m.clause):
                    readings.add(tuple(nm[x] for x in r))
        ordered = tuple(sorted(readings, key=lambda r: [label_key(x) for x in r]))
        groups.append(Group(idx, template, tuple(members), ordered))
    return groups


def correlated_assignments(db: Database | Sequence[Udrs], respect: set[str] | None = None
                           ) -> list[CorrelatedAssignment]:
    """Every disambiguation of ``db`` that respects the indices in ``respect``.

    The count is the product of the per-group reading counts, so coindexed
    entries never multiply readings.
    """
    udrss = list(db.entries) if isinstance(db, Database) else list(db)
    groups = build_groups(udrss, respect)
    admissible = {}
    for g in groups:
        for m, _ in g.members:
            admissible[(m.entry, m.path)] = set(clause_readings(m.udrs, m.clause))
    out = []
    for combo in itertools.product(*(g.readings for g in groups)):
        per_entry: dict[int, dict[tuple[int, ...], tuple[str, ...] | None]] = {}
        for g, order in zip(groups, combo):
            for m, nm in g.members:
                local = _transport(order, nm)
                ok = local in admissible[(m.entry, m.path)]
                per_entry.setdefault(m.entry, {})[m.path] = local if ok else None
        scopings = []
        for e, u in enumerate(udrss):
            paths = [p for p, _ in clauses(u)]
            scopings.append(Scoping(tuple((p, per_entry[e][p]) for p in paths)))
        out.append(CorrelatedAssignment(tuple((g.index, o) for g, o in zip(groups, combo)),
                                        tuple(scopings)))
    return out


# ---------------------------------------------------------------- alignment


@dataclass(frozen=True)
class Alignment:
    """A structure-preserving correspondence of labels and referents."""

    labels: dict[str, str]
    refs: dict[str, str]


def _ref_map(u1: Udrs, u2: Udrs, lm: Mapping[str, str]) -> dict[str, str] | None:
    if len(u1.universe) != len(u2.universe):
        return None
    rm = dict(zip(u1.universe, u2.universe))
    nodes2 = {n.label: n for _, c in clauses(u2) for n in c.nodes}
    for _, c in clauses(u1):
        for n in c.nodes:
            m = nodes2[lm[n.label]]
            if not isinstance(n.cond, Quant):
                continue
            b1, b2 = n.cond.bound(), m.cond.bound()
            if len(b1) != len(b2) or (n.cond.var is None) != (m.cond.var is None):
                return None
            for a, b in zip(b1, b2):
                if rm.setdefault(a, b) != b:
                    return None
    if len(set(rm.values())) != len(rm):
        return None
    return rm


def _atoms_match(xs, ys, rm, refs2) -> bool:
    def ren(a):
        args = []
        for t in a.args:
            if t in rm:
                args.append(rm[t])
            elif t in refs2:
                return None
            else:
                args.append(t)
        return (a.pred, tuple(args))
    mapped = [ren(a) for a in xs]
    if any(m is None for m in mapped):
        return False
    return sorted(mapped) == sorted((a.pred, a.args) for a in ys)


def content_equal(u1: Udrs, u2: Udrs, lm: Mapping[str, str], rm: Mapping[str, str]) -> bool:
    from .core import referents

    refs2 = referents(u2)
    by_upper = {c.upper: c for _, c in clauses(u2)}
    nodes2 = {n.label: n for _, c in clauses(u2) for n in c.nodes}
    for _, a in clauses(u1):
        b = by_upper[lm[a.upper]]
        if not _atoms_match(a.base, b.base, rm, refs2):
            return False
        for n in a.nodes:
            m = nodes2[lm[n.label]]
            if isinstance(n.cond, Quant):
                if not _atoms_match(n.cond.restrictor.atoms, m.cond.restrictor.atoms, rm, refs2):
                    return False
    return True


def _closure_preserved(u1: Udrs, u2: Udrs, lm: Mapping[str, str]) -> bool:
    c1, c2 = implicit_closure(u1), implicit_closure(u2)
    vals = set(lm.values())
    return ({(lm[a], lm[b]) for a, b in c1 if a in lm and b in lm}
            == {(a, b) for a, b in c2 if a in vals and b in vals}) and _same_only(u1, u2, lm)


def align(u1: Udrs, u2: Udrs, *, content: bool = True, order: bool = True) -> Alignment | None:
    """Match ``u1`` against ``u2`` up to renaming of labels and referents.

    With ``order`` the subordination closures must agree; with ``content``
    the atoms must agree.  Both on means alpha-equality.
    """
    for lm in _tree_maps(u1.clause, u2.clause):
        # a top that coincides with the clause's upper bound is already mapped
        if u1.top not in lm and u2.top not in lm.values():
            lm[u1.top] = u2.top
        if order and not _closure_preserved(u1, u2, lm):
            continue
        rm = _ref_map(u1, u2, lm)
        if rm is None:
            continue
        if content and not content_equal(u1, u2, lm, rm):
            continue
        return Alignment(lm, rm)
    return None


def alpha_equal(u1: Udrs, u2: Udrs) -> bool:
    return align(u1, u2) is not None
