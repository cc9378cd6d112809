"""Inference rules on UDRS databases: NeU, DET, AI, DIFF, plus polarity marking.

Every rule takes a :class:`Database` and returns a :class:`Step` carrying the
new database, the derived entry and the side conditions it discharged, so
the engine can record and replay it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .core import (Atom, Clause, Database, Edge, Neg, Node, Quant, Udrs, UdrsError, clause_at, clauses,
                   effective_indices, label_key, names, node_precedence, referents, rename, standalone,
                   validate)
from .disambig import align, clause_readings, count_readings, enumerate_scopings, linear_extensions
from .lexicon import LexTheory
from .modelsem import Oracle, QuantifierSemantics, checked_determiners

POSITIVE, NEGATIVE, UNDEFINED = "+", "-", "?"


class RuleError(UdrsError):
    """A rule does not apply; ``code`` says why."""

    def __init__(self, code: str, msg: str):
        super().__init__(f"{code}: {msg}")
        self.code = code


class Inconsistent(RuleError):
    def __init__(self, msg: str):
        super().__init__("inconsistent", msg)


@dataclass(frozen=True)
class Step:
    rule: str
    inputs: tuple[int, ...]
    params: tuple = ()
    discharges: tuple = ()
    db: Database = field(default_factory=Database)
    output: Udrs | None = None


# ---------------------------------------------------------------- polarity


def _flip(p: str) -> str:
    return {POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}.get(p, UNDEFINED)


def right_effect(n: Node, dets: Mapping[str, QuantifierSemantics]) -> str:
    """How ``n`` affects the polarity of its scope: up, down or none."""
    if isinstance(n.cond, Neg):
        return "down"
    q = dets.get(n.cond.name)
    return q.right if q is not None else "none"


def base_persistence(n: Node, dets: Mapping[str, QuantifierSemantics]) -> str:
    if isinstance(n.cond, Neg):
        return "none"
    q = dets.get(n.cond.name)
    return q.persistence if q is not None else "none"


def _through(p: str, effect: str) -> str:
    return p if effect == "up" else _flip(p) if effect == "down" else UNDEFINED


def _arg_marks(out: dict, n: Node, pol: str, dets) -> None:
    scope_pol = _through(pol, right_effect(n, dets))
    if isinstance(n.cond, Neg):
        out[n.cond.body] = scope_pol
        return
    out[n.scope] = scope_pol
    pers = base_persistence(n, dets)
    out[n.res] = pol if pers == "persistent" else _flip(pol) if pers == "anti-persistent" else UNDEFINED


def polarity(u: Udrs, dets: Mapping[str, QuantifierSemantics] | None = None) -> dict[str, str]:
    """Polarity of every label, by the path rule (no readings are enumerated).

    A node is positive (negative) when an even (odd) number of
    polarity-changing clause-mates outscope it in every reading; as soon as
    a changer is unordered with respect to it, its polarity is undefined.
    """
    dets = dets if dets is not None else checked_determiners()
    out: dict[str, str] = {u.top: POSITIVE}

    def visit(path, c: Clause, p_upper: str):
        out[c.upper] = p_upper
        if c.only is not None:
            _marks_from_orders(out, c, [tuple(r) for r in c.only], p_upper, dets)
        else:
            prec = node_precedence(u, c)
            changers = [m for m in c.nodes if right_effect(m, dets) != "up"]
            for n in c.nodes:
                pol = p_upper
                for m in changers:
                    if m is n or pol == UNDEFINED:
                        continue
                    if (m.label, n.label) in prec:
                        pol = _through(pol, right_effect(m, dets))
                    elif (n.label, m.label) not in prec:
                        pol = UNDEFINED
                out[n.label] = pol
                _arg_marks(out, n, pol, dets)
            low = p_upper
            for m in changers:
                low = _through(low, right_effect(m, dets))
            out[c.lower] = low
        for k, s in enumerate(c.subs):
            visit(path + (k,), s.clause, out[s.host])

    visit((), u.clause, POSITIVE)
    return out


def _marks_from_orders(out: dict, c: Clause, orders, p_upper: str, dets) -> None:
    per_label: dict[str, set[str]] = {}
    for perm in orders:
        local: dict[str, str] = {}
        run = p_upper
        for lab in perm:
            n = c.node(lab)
            local[lab] = run
            _arg_marks(local, n, run, dets)
            run = _through(run, right_effect(n, dets))
        local[c.lower] = run
        for k, v in local.items():
            per_label.setdefault(k, set()).add(v)
    for k, vs in per_label.items():
        out[k] = vs.pop() if len(vs) == 1 else UNDEFINED


def polarity_by_enumeration(u: Udrs, dets: Mapping[str, QuantifierSemantics] | None = None) -> dict[str, str]:
    """Reference definition: count polarity changers above each label in every reading."""
    dets = dets if dets is not None else checked_determiners()
    seen: dict[str, set[str]] = {}
    for s in enumerate_scopings(u):
        perms = dict(s.per_clause)
        local: dict[str, str] = {u.top: POSITIVE}

        def visit(path, c, p_upper):
            local[c.upper] = p_upper
            run = p_upper
            for lab in perms[path]:
                n = c.node(lab)
                local[lab] = run
                _arg_marks(local, n, run, dets)
                run = _through(run, right_effect(n, dets))
            local[c.lower] = run
            for k, sub in enumerate(c.subs):
                visit(path + (k,), sub.clause, local[sub.host])

        visit((), u.clause, POSITIVE)
        for k, v in local.items():
            seen.setdefault(k, set()).add(v)
    return {k: (next(iter(v)) if len(v) == 1 else UNDEFINED) for k, v in seen.items()}


def persistent_in_clause(u: Udrs, node_label: str, dets=None) -> str:
    """persistent, anti-persistent or none for the NP at ``node_label``.

    Read off the polarity of the restrictor: growing (shrinking) the
    restrictor preserves truth in every reading exactly when the restrictor
    label is positive (negative).
    """
    dets = dets if dets is not None else checked_determiners()
    n = next((m for _, c in clauses(u) for m in c.nodes if m.label == node_label), None)
    if n is None or not isinstance(n.cond, Quant):
        raise UdrsError(f"{node_label} is not a quantifier node")
    p = polarity(u, dets)[n.res]
    return {POSITIVE: "persistent", NEGATIVE: "anti-persistent"}.get(p, "none")


# ---------------------------------------------------------------- NeU


def neu(u: Udrs, refs: Sequence[str], taken: set[str] | None = None) -> Udrs:
    """Add ``refs`` to the top universe."""
    clash = set(refs) & (names(u) | (taken or set()))
    if clash or len(set(refs)) != len(refs):
        raise RuleError("ref-collision", f"referents {sorted(clash) or list(refs)} are not fresh")
    return replace(u, universe=u.universe + tuple(refs))


def neu_step(db: Database, entry: int, count: int = 1) -> Step:
    namer = db.namer()
    refs = tuple(namer.fresh("y") for _ in range(count))
    out = neu(db[entry], refs, db.names())
    db2 = Database(db.entries + (out,), namer.counter)
    return Step("NeU", (entry,), (("refs", refs),), (), db2, out)


# ---------------------------------------------------------------- embeddings


@dataclass(frozen=True)
class Embedding:
    """Referent map of a restrictor into the facts; labels map onto the host's upper bound."""

    refs: tuple[tuple[str, str], ...]
    label: str

    def ref_map(self) -> dict[str, str]:
        return dict(self.refs)


def fact_pool(db: Database, exclude: Sequence[int] = ()) -> list[Atom]:
    """Ground atoms of entries that contain no scope-bearing material."""
    out: list[Atom] = []
    for i, u in enumerate(db.entries):
        if i in exclude:
            continue
        cs = [c for _, c in clauses(u)]
        if any(c.nodes or c.subs for c in cs):
            continue
        refs = referents(u)
        for c in cs:
            out += [a for a in c.base if not set(a.args) & refs]
    return sorted(set(out), key=lambda a: (a.pred, a.args))


def embed_atoms(vars_: Sequence[str], atoms: Sequence[Atom], pool: Sequence[Atom],
                lex: LexTheory | None = None) -> list[dict[str, str]]:
    """Injective maps of ``vars_`` to constants under which every atom is matched in ``pool``."""
    lex = lex or LexTheory()
    vs = list(vars_)
    out: list[dict[str, str]] = []

    def fits(a: Atom, m: dict[str, str]) -> bool | None:
        if any(t in vs and t not in m for t in a.args):
            return None
        args = tuple(m.get(t, t) for t in a.args)
        return any(p.args == args and lex.below(p.pred, a.pred) for p in pool)

    cands = sorted({t for p in pool for t in p.args}, key=label_key)

    def rec(i: int, m: dict[str, str]):
        for a in atoms:
            if fits(a, m) is False:
                return
        if i == len(vs):
            if all(fits(a, m) for a in atoms):
                out.append(dict(m))
            return
        for c in cands:
            if c in m.values():
                continue
            m[vs[i]] = c
            rec(i + 1, m)
            del m[vs[i]]

    rec(0, {})
    return out


def find_embeddings(db: Database, entry: int, node_label: str, lex: LexTheory | None = None) -> list[Embedding]:
    """Embeddings of the restrictor of ``node_label`` into the facts of ``db``."""
    u = db[entry]
    n = _node(u, node_label)
    if not isinstance(n.cond, Quant):
        return []
    q = n.cond
    pool = fact_pool(db, (entry,))
    return [Embedding(tuple(sorted(m.items())), u.clause.upper)
            for m in embed_atoms(q.bound(), q.restrictor.atoms, pool, lex)]


def _node(u: Udrs, label: str) -> Node:
    for _, c in clauses(u):
        for n in c.nodes:
            if n.label == label:
                return n
    raise RuleError("unknown-label", f"{label} is not a node")


def _reduce(pairs: set[tuple[str, str]]) -> list[tuple[str, str]]:
    """Covering pairs of a strict order given by all its pairs."""
    out = []
    for a, b in pairs:
        if not any((a, c) in pairs and (c, b) in pairs for c in {x for p in pairs for x in p}):
            out.append((a, b))
    return sorted(out, key=lambda p: (label_key(p[0]), label_key(p[1])))


def _order_edges(prec: set[tuple[str, str]]) -> tuple[Edge, ...]:
    return tuple(Edge(b, a, "scope") for a, b in _reduce(set(prec)))


def _is_node_edge(e: Edge, node_labels) -> bool:
    return e.fn == "scope" and e.lo in node_labels and e.hi in node_labels


def _freshen(db: Database, u: Udrs, keep_refs: Mapping[str, str] = {}) -> tuple[Udrs, Database]:
    namer = db.namer()
    namer.taken |= names(u)
    from .core import labels as _labels
    lm = {l: namer.fresh(l) for l in sorted(_labels(u), key=label_key)}
    rm = {x: keep_refs.get(x) or namer.fresh(x) for x in sorted(referents(u), key=label_key)}
    return rename(u, lm, rm), Database(db.entries, namer.counter)


def _append(db: Database, u: Udrs) -> Database:
    v = validate(u)
    if v is not None:
        raise RuleError("invalid-result", str(v))
    return Database(db.entries + (u,), db.counter)


# ---------------------------------------------------------------- DET


def det_universal(db: Database, entry: int, node_label: str, emb: Embedding,
                  lex: LexTheory | None = None, dets=None) -> Step:
    """Detach the scope of a universal whose restrictor embeds into the facts."""
    dets = dets if dets is not None else checked_determiners()
    u = db[entry]
    n = _node(u, node_label)
    c = u.clause
    if n not in c.nodes:
        raise RuleError("unsupported", "detachment of universals inside subordinate clauses")
    if not isinstance(n.cond, Quant) or n.cond.name != "every":
        raise RuleError("not-universal", f"{node_label} is not a universal")
    pol = polarity(u, dets)[node_label]
    if pol != POSITIVE:
        raise RuleError("polarity", f"{node_label} has polarity {pol}, detachment needs +")
    if any(s.host in (n.label, n.res, n.scope) for s in c.subs):
        raise RuleError("unsupported", "restrictors or scopes hosting subordinate clauses")
    f = emb.ref_map()
    q = n.cond
    if set(f) != set(q.bound()):
        raise RuleError("no-embedding", "embedding does not cover the restrictor universe")
    pool = fact_pool(db, (entry,))
    if not embed_atoms(q.bound(), q.restrictor.atoms, pool, lex) or f not in embed_atoms(
            q.bound(), q.restrictor.atoms, pool, lex):
        raise RuleError("no-embedding", f"restrictor of {node_label} does not embed into the facts")
    idx, db = db.ensure_index(entry)
    u = db[entry]
    c = u.clause
    gone = {n.label, n.res, n.scope}
    rest = tuple(m for m in c.nodes if m is not n)
    keep = {m.label for m in rest}
    prec = {(a, b) for a, b in node_precedence(u, c) if a in keep and b in keep}
    others = tuple(e for e in c.ord
                   if e.lo not in gone and e.hi not in gone and not _is_node_edge(e, c.node_labels))
    clause = replace(c, nodes=rest, ord=_order_edges(prec) + others, only=None)
    if c.only is not None:
        clause = replace(clause, only=tuple(sorted({tuple(x for x in r if x in keep) for r in c.only})))
    v = Udrs(u.top, clause, idx, u.universe)
    v = rename(v, {}, f)
    out, db = _freshen(db, v, {x: x for x in f.values()})
    out = replace(out, index=idx)
    discharges = (("polarity", node_label, pol), ("embedding", *[f"{a}->{b}" for a, b in sorted(f.items())]),
                  ("index", idx))
    return Step("DET", (entry,), (("node", node_label), ("embedding", emb.refs)), discharges,
                _append(db, out), out)


@dataclass(frozen=True)
class Conditional:
    node: Node
    ante: tuple[int, ...]
    cons: tuple[int, ...]


def as_conditional(u: Udrs) -> Conditional | None:
    """Recognise ``if A then B`` with A, B subordinate clauses."""
    c = u.clause
    if len(c.nodes) != 1 or c.base:
        return None
    n = c.nodes[0]
    if not isinstance(n.cond, Quant) or not n.cond.implicative or n.cond.restrictor != type(n.cond.restrictor)():
        return None
    ante = [(k,) for k, s in enumerate(c.subs) if s.host == n.res]
    cons = [(k,) for k, s in enumerate(c.subs) if s.host == n.scope]
    if len(ante) != 1 or len(cons) != 1 or len(c.subs) != 2:
        return None
    return Conditional(n, ante[0], cons[0])


def det_conditional(db: Database, cond_entry: int, minor_entry: int, oracle: Oracle | None = None) -> Step:
    """Modus ponens with correlated antecedent: ``A_i => B_j``, ``A_k`` gives ``B_j``.

    Applies when ``i = k``, or when ``i != k`` and the oracle shows the two
    antecedents equivalent given the database.
    """
    oracle = oracle or Oracle()
    if as_conditional(db[cond_entry]) is None:
        raise RuleError("not-conditional", f"entry {cond_entry} is not a conditional")
    _, db = db.ensure_index(cond_entry)
    u = db[cond_entry]
    cond = as_conditional(u)
    eff = effective_indices(u, "@")
    ante = standalone(u, cond.ante)
    minor = db[minor_entry]
    if align(minor, ante) is None:
        raise RuleError("structure", "minor premise does not match the antecedent")
    i, k = eff[cond.ante], minor.index
    if k is not None and i == k:
        side = ("index", i)
    else:
        if not oracle.equivalent(db.entries, ante, minor):
            raise RuleError("equivalence",
                            f"antecedent ({i}) and minor premise ({k or 'unindexed'}) are not equivalent "
                            f"at bound {oracle.bound}")
        side = ("equivalent", i, k or "none", "bound", str(oracle.bound))
    result = standalone(u, cond.cons)
    out, db = _freshen(db, result)
    out = replace(out, index=result.index)
    return Step("DET", (cond_entry, minor_entry), (("conditional", cond.node.label),), (side,),
                _append(db, out), out)


# ---------------------------------------------------------------- AI


def ai(db: Database, i: int, j: int) -> Step:
    """Merge two readings present in ``db`` into one ambiguous entry with a new index."""
    u1, u2 = db[i], db[j]
    if count_readings(u1) != 1 or count_readings(u2) != 1:
        raise RuleError("ambiguous", "ambiguity introduction needs two fully scoped entries")
    if any(p for p, _ in clauses(u1)) or any(p for p, _ in clauses(u2)):
        raise RuleError("unsupported", "ambiguity introduction on multi-clause entries")
    al = align(u1, u2, order=False)
    if al is None:
        raise RuleError("structure", "entries differ in more than their orders")
    inv = {v: k for k, v in al.labels.items()}
    c1, c2 = u1.clause, u2.clause
    p1 = set(node_precedence(u1, c1))
    p2 = {(inv[a], inv[b]) for a, b in node_precedence(u2, c2)}
    p3 = p1 & p2
    other2 = {(inv.get(e.lo, e.lo), inv.get(e.hi, e.hi), e.fn) for e in c2.ord}
    others = tuple(e for e in c1.ord if not _is_node_edge(e, c1.node_labels)
                   and (e.lo, e.hi, e.fn) in other2)
    merged = replace(u1, clause=replace(c1, ord=_order_edges(p3) + others, only=None))
    v = validate(merged)
    if v is not None:
        raise RuleError("invalid-result", str(v))
    want = set(clause_readings(u1, c1)) | {tuple(inv[x] for x in r) for r in clause_readings(u2, c2)}
    got = set(clause_readings(merged, merged.clause))
    if got != want:
        raise RuleError("over-generation",
                        f"the common order admits {len(got)} readings, the data holds {len(want)}")
    idx, db = db.fresh_index()
    out, db = _freshen(db, merged)
    out = replace(out, index=idx)
    return Step("AI", (i, j), (), (("readings", str(len(got))), ("index", idx)), _append(db, out), out)


# ---------------------------------------------------------------- DIFF


@dataclass(frozen=True)
class Difference:
    kind: str                                     # falsity | order | readings
    order: frozenset = frozenset()                # precedence pairs (wide, narrow)
    readings: tuple[tuple[str, ...], ...] = ()

    @property
    def flagged(self) -> bool:
        return self.kind == "readings"


def structural_difference(ord1, ord2, nodes: Sequence[str]) -> Difference:
    """Orders of ``ord1`` that ``ord2`` does not admit.

    ``ord1``/``ord2`` are sets of ``(wide, narrow)`` pairs, or explicit lists
    of readings.  The result is the weakest order whose extensions are
    exactly that set, falsity when the set is empty, or the explicit set when
    no single order describes it.
    """
    def ext(o):
        if isinstance(o, (list, tuple)) and (not o or isinstance(o[0], tuple) and len(o[0]) == len(nodes)
                                              and set(o[0]) == set(nodes)):
            return set(o)
        return set(linear_extensions(nodes, set(o)))
    e1, e2 = ext(ord1), ext(ord2)
    left = e1 - e2
    if not left:
        return Difference("falsity")
    common = {(a, b) for a in nodes for b in nodes if a != b
              and all(r.index(a) < r.index(b) for r in left)}
    ordered = tuple(sorted(left, key=lambda r: [label_key(x) for x in r]))
    if set(linear_extensions(nodes, common)) == left:
        return Difference("order", frozenset(common), ordered)
    return Difference("readings", frozenset(common), ordered)


def negated_clause(u: Udrs) -> tuple[int, ...] | None:
    """Path of the negated clause when ``u`` is ``not(alpha)``."""
    c = u.clause
    if len(c.nodes) != 1 or not isinstance(c.nodes[0].cond, Neg) or c.base:
        return None
    subs = [(k,) for k, s in enumerate(c.subs) if s.host == c.nodes[0].cond.body]
    if len(subs) != 1 or len(c.subs) != 1:
        return None
    return subs[0]


def diff(db: Database, alpha_entry: int, neg_entry: int) -> Step:
    """Narrow ``alpha`` by the readings excluded by a negated, coindexed variant."""
    alpha, neg = db[alpha_entry], db[neg_entry]
    path = negated_clause(neg)
    if path is None:
        raise RuleError("structure", f"entry {neg_entry} is not a negated clause")
    if any(p for p, _ in clauses(alpha)):
        raise RuleError("unsupported", "structural difference on multi-clause entries")
    a2 = standalone(neg, path)
    if any(p for p, _ in clauses(a2)):
        raise RuleError("unsupported", "structural difference on multi-clause entries")
    al = align(a2, alpha, order=False)
    if al is None:
        raise RuleError("structure", "negated clause and entry differ in content")
    ambiguous = count_readings(alpha) > 1 or count_readings(a2) > 1
    if ambiguous and (alpha.index is None or a2.index != alpha.index):
        raise RuleError("index", "the negated clause must be coindexed with the entry")
    c = alpha.clause
    e1 = clause_readings(alpha, c)
    e2 = [tuple(al.labels[x] for x in r) for r in clause_readings(a2, a2.clause)]
    d = structural_difference(e1, e2, list(c.node_labels))
    if d.kind == "falsity":
        raise Inconsistent(f"entries {alpha_entry} and {neg_entry} exclude every reading")
    others = tuple(e for e in c.ord if not _is_node_edge(e, c.node_labels))
    clause = replace(c, ord=_order_edges(set(d.order)) + others,
                     only=None if d.kind == "order" else d.readings)
    if alpha.index is None:
        _, db = db.ensure_index(alpha_entry)
        alpha = db[alpha_entry]
    narrowed = replace(alpha, clause=clause)
    out, db = _freshen(db, narrowed)
    out = replace(out, index=alpha.index)
    disc = (("difference", d.kind, str(len(d.readings))),)
    return Step("DIFF", (alpha_entry, neg_entry), (), disc, _append(db, out), out)


def difference_is_falsity(db: Database, alpha_entry: int, neg_entry: int) -> bool:
    try:
        diff(db, alpha_entry, neg_entry)
    except Inconsistent:
        return True
    except RuleError:
        return False
    return False


__all__ = [
    "POSITIVE", "NEGATIVE", "UNDEFINED", "RuleError", "Inconsistent", "Step", "polarity",
    "polarity_by_enumeration", "persistent_in_clause", "neu", "neu_step", "Embedding", "fact_pool",
    "embed_atoms", "find_embeddings", "det_universal", "det_conditional", "as_conditional", "ai",
    "Difference", "structural_difference", "negated_clause", "diff", "difference_is_falsity",
    "right_effect", "base_persistence", "clause_at",
]
