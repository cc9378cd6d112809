"""Replacement calculus: polarity-directed substitution of components.

A *move* names one replacement inside an entry.  Moves are plain tuples of
strings and nested lists so that a proof trace can store and replay them:

``("base", LOWER, ATOMS)``       new verb-level conditions at a lower bound
``("res", NODE, DRS)``           new restrictor for a quantifier node
``("det", NODE, NAME)``          new determiner
``("inst", NODE, CONSTANT...)``  universal replaced by its instance
``("no-every", NODE)``           ``no`` rewritten as ``every ... not``
``("some-not", NODE)``           ``some ... not`` rewritten as ``not every``
``("pi", WIDE, NARROW)``         neighbour exchange of two quantifiers

The first three keep the entry's correlation index (the readings of source
and result correspond one to one).  The structural moves produce a fresh
index and are only accepted when the bounded-model oracle confirms them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Sequence

from . import kernels
from .core import (Atom, Clause, Database, Drs, Edge, Neg, Node, Quant, Udrs, clauses, label_key,
                   node_precedence, referents, validate)
from .disambig import _ref_map, count_readings, enumerate_scopings
from .lexicon import LexError, LexTheory
from .modelsem import Oracle, SAtom, SDrs, SQuant, checked_determiners, resolve
from .rules import (NEGATIVE, POSITIVE, UNDEFINED, RuleError, Step, _append, _freshen, _is_node_edge,
                    _order_edges, base_persistence, det_universal, find_embeddings, persistent_in_clause,
                    polarity)


# ---------------------------------------------------------------- judgements


@dataclass(frozen=True)
class Judgment:
    """Outcome of a ``>>`` check, with the rule and branch that settled it."""

    holds: bool
    rule: str
    branch: str = ""
    detail: str = ""
    uses: tuple[tuple[str, str], ...] = ()   # lexical postulates the derivation relied on

    def __bool__(self) -> bool:
        return self.holds

    def to_sexpr(self) -> list:
        out = ["judgment", self.rule, "yes" if self.holds else "no"]
        if self.branch:
            out += [":branch", self.branch]
        if self.detail:
            out += [":detail", self.detail]
        return out


def db_hyponyms(db: Database | Sequence[Udrs]) -> set[tuple[str, str]]:
    """Pairs ``(p, q)`` for entries of the shape "whatever is p is q"."""
    entries = db.entries if isinstance(db, Database) else db
    out = set()
    for u in entries:
        c = u.clause
        if len(c.nodes) != 1 or c.subs or len(c.base) != 1 or u.universe:
            continue
        q = c.nodes[0].cond
        if not isinstance(q, Quant) or q.name != "every" or len(q.bound()) != 1 or len(q.restrictor.atoms) != 1:
            continue
        (x,) = q.bound()
        a, b = q.restrictor.atoms[0], c.base[0]
        if a.args == (x,) and b.args == (x,):
            out.add((a.pred, b.pred))
    return out


def validate_detrules(lex: LexTheory, few_k: int = 2) -> None:
    """Every ``(q1, q2)`` determiner rule must be an entailment on all small domains."""
    dets = checked_determiners(few_k)
    for q1, q2 in sorted(lex.detrules):
        if q1 not in dets or q2 not in dets:
            raise LexError(f"determiner rule {q1} >> {q2} names an unknown determiner")
        for n in range(max(4, few_k + 2) + 1):
            if not kernels.gq_entails_numpy(dets[q1].table(n), dets[q2].table(n), n):
                raise LexError(f"determiner rule {q1} >> {q2} fails on a domain of size {n}")


def validate_pi(lex: LexTheory, few_k: int = 2, bound: int = 3) -> None:
    """Each exchange pair must license the exchange on all models up to ``bound``."""
    dets = checked_determiners(few_k)
    oracle = Oracle(LexTheory(), bound, few_k)
    for q1, q2 in sorted(lex.pi):
        if q1 not in dets or q2 not in dets:
            raise LexError(f"exchange pair ({q1}, {q2}) names an unknown determiner")
        r1, r2 = SDrs(("x",), (SAtom("p", ("x",)),)), SDrs(("y",), (SAtom("q", ("y",)),))
        body = SDrs((), (SAtom("r", ("x", "y")),))
        wide = SQuant(q1, "x", r1, SDrs((), (SQuant(q2, "y", r2, body),)))
        narrow = SQuant(q2, "y", r2, SDrs((), (SQuant(q1, "x", r1, body),)))
        ok, _ = oracle.implies((SDrs((), (wide,)),), SDrs((), (narrow,)))
        if not ok:
            raise LexError(f"exchange pair ({q1}, {q2}) is not valid")


@dataclass
class Context:
    """What a ``>>`` check may use: lexicon, database hyponyms and the oracle."""

    db: Database
    lex: LexTheory
    oracle: Oracle

    def __post_init__(self):
        self.lex = self.lex.with_hypo(db_hyponyms(self.db))
        self._memo: dict = {}

    @property
    def dets(self):
        return self.oracle.dets

    def background(self) -> tuple[SDrs, ...]:
        """Unambiguous entries, usable as plain premises."""
        out = []
        for u in self.db.entries:
            if count_readings(u) == 1:
                out.append(resolve(u, enumerate_scopings(u)[0]))
        return tuple(out)


# ---------------------------------------------------------------- >> on DRSs and conditions


def _atom_gg(a: Atom, b: Atom, f: Mapping[str, str], lex: LexTheory) -> bool:
    return tuple(f.get(t, t) for t in a.args) == b.args and lex.below(a.pred, b.pred)


def gg_drs(ctx: Context, k1: Drs, k2: Drs) -> Judgment:
    """``K >> K'``: some map of K's universe into K' carries each condition of K' onto one of K."""
    key = ("drs", k1, k2)
    if key in ctx._memo:
        return ctx._memo[key]
    u1, u2 = list(k1.universe), list(k2.universe)
    found = None
    # identity on shared referents first, then every other function
    options = [[x] + [y for y in u2 if y != x] if x in u2 else u2 for x in u1]
    for img in itertools.product(*options) if u1 else [()]:
        f = dict(zip(u1, img))
        if all(any(_atom_gg(a, b, f, ctx.lex) for a in k1.atoms) for b in k2.atoms):
            found = f
            break
    if found is None:
        j = Judgment(False, "DRS", detail="no map of referents covers every condition")
    else:
        uses = sorted({(a.pred, b.pred) for b in k2.atoms for a in k1.atoms
                       if a.pred != b.pred and _atom_gg(a, b, found, ctx.lex)})
        j = Judgment(True, "DRS", "1", " ".join(f"{a}->{b}" for a, b in sorted(found.items())), tuple(uses))
    ctx._memo[key] = j
    return j


def _sdrs(d: Drs) -> SDrs:
    return SDrs(d.universe, tuple(SAtom(a.pred, a.args) for a in d.atoms))


def implication(ctx: Context, k1: Drs, k2: Drs, free: Sequence[str]) -> Judgment:
    """Oracle check of ``K -> K'`` for all values of ``free`` and the shared universe."""
    vars_ = tuple(dict.fromkeys(tuple(free) + k1.universe))
    ante = SDrs(vars_, tuple(SAtom(a.pred, a.args) for a in k1.atoms))
    cons = SDrs(tuple(x for x in k2.universe if x not in vars_), tuple(SAtom(a.pred, a.args) for a in k2.atoms))
    goal = SDrs((), (SQuant("every", None, ante, cons),))
    ok, _ = ctx.oracle.implies(ctx.background(), goal)
    return Judgment(ok, "->", "2", f"bound {ctx.oracle.bound}")


@dataclass(frozen=True)
class Cond:
    """A complex condition reduced to what ``>>`` inspects: kind, determiner, argument DRS."""

    kind: str          # neg | impl | quant
    name: str
    arg: Drs

    @staticmethod
    def of(n: Node) -> "Cond":
        if isinstance(n.cond, Neg):
            return Cond("neg", "not", Drs())
        q = n.cond
        return Cond("impl" if q.implicative else "quant", q.name,
                    Drs(q.bound(), q.restrictor.atoms))


def gg_cond(ctx: Context, c1: Cond, c2: Cond, free: Sequence[str] = ()) -> Judgment:
    """``>>`` for implications, quantifiers and negations with the same scope.

    Branch 1 recurses into the argument DRSs, branch 2 asks the oracle for
    the implication between them.
    """
    if (c1.kind, c1.name) != (c2.kind, c2.name):
        return Judgment(False, "cond", detail="different operators")
    rule = {"neg": "not", "impl": "=>", "quant": "Q"}[c1.kind]
    if c1.kind == "quant":
        q = ctx.dets.get(c1.name)
        pers = q.persistence if q is not None else "none"
    else:
        pers = "anti-persistent"  # an implication and a negation are downward in their argument
    if pers == "none":
        return Judgment(False, rule, detail=f"{c1.name} is neither persistent nor anti-persistent")
    lo, hi = (c1.arg, c2.arg) if pers == "persistent" else (c2.arg, c1.arg)
    j = gg_drs(ctx, lo, hi)
    if j:
        return Judgment(True, rule, "1", j.detail, j.uses)
    j = implication(ctx, lo, hi, free)
    return Judgment(j.holds, rule, "2" if j.holds else "", j.detail)


def gg_det(ctx: Context, q1: str, q2: str) -> Judgment:
    """Determiner rule ``<q1, l1, l2> >> <q2, l1, l2>``."""
    if q1 == q2:
        return Judgment(True, "Lex", "refl")
    if (q1, q2) in ctx.lex.detrules:
        return Judgment(True, "Lex", "table", f"{q1} >> {q2}")
    return Judgment(False, "Lex", detail=f"no determiner rule {q1} >> {q2}")


# ---------------------------------------------------------------- SUBST


def _node_of(u: Udrs, label: str) -> tuple[tuple[int, ...], Clause, Node]:
    for path, c in clauses(u):
        for n in c.nodes:
            if n.label == label:
                return path, c, n
    raise RuleError("unknown-label", f"{label} is not a node")


def _clause_of_lower(u: Udrs, label: str) -> tuple[tuple[int, ...], Clause]:
    for path, c in clauses(u):
        if c.lower == label:
            return path, c
    raise RuleError("unknown-label", f"{label} is not the lower bound of a clause")


def _replace_clause(u: Udrs, path: tuple[int, ...], new: Clause) -> Udrs:
    def rec(c: Clause, p):
        if not p:
            return new
        k = p[0]
        subs = list(c.subs)
        subs[k] = replace(subs[k], clause=rec(subs[k].clause, p[1:]))
        return replace(c, subs=tuple(subs))
    return replace(u, clause=rec(u.clause, path))


def _replace_node(c: Clause, n: Node) -> Clause:
    return replace(c, nodes=tuple(n if m.label == n.label else m for m in c.nodes))


def _need(pol: str, label: str) -> None:
    if pol == UNDEFINED:
        raise RuleError("polarity", f"{label} has undefined polarity")


def subst(ctx: Context, u: Udrs, move: tuple) -> tuple[Udrs, Judgment, str]:
    """Apply a base/res/det move to ``u`` if polarity licenses it.

    Returns the new UDRS, the sub-derivation and the polarity used.
    """
    kind, label = move[0], move[1]
    pols = polarity(u, ctx.dets)
    free = tuple(sorted(referents(u), key=label_key))
    if kind == "base":
        path, c = _clause_of_lower(u, label)
        pol = pols[label]
        _need(pol, label)
        new_atoms = tuple(move[2])
        k, k2 = Drs((), c.base), Drs((), new_atoms)
        j = gg_drs(ctx, k, k2) if pol == POSITIVE else gg_drs(ctx, k2, k)
        out = _replace_clause(u, path, replace(c, base=new_atoms))
    elif kind == "res":
        path, c, n = _node_of(u, label)
        if not isinstance(n.cond, Quant):
            raise RuleError("structure", f"{label} has no restrictor")
        pol = pols[label]
        _need(pol, label)
        d: Drs = move[2]
        q = n.cond
        q2 = replace(q, restrictor=Drs(tuple(x for x in d.universe if x != q.var), d.atoms))
        n2 = Node(n.label, q2)
        a, b = (Cond.of(n), Cond.of(n2)) if pol == POSITIVE else (Cond.of(n2), Cond.of(n))
        j = gg_cond(ctx, a, b, tuple(x for x in free if x not in q.bound()))
        out = _replace_clause(u, path, _replace_node(c, n2))
    elif kind == "det":
        path, c, n = _node_of(u, label)
        if not isinstance(n.cond, Quant) or n.cond.implicative:
            raise RuleError("structure", f"{label} has no determiner to replace")
        pol = pols[label]
        _need(pol, label)
        name = move[2]
        j = gg_det(ctx, n.cond.name, name) if pol == POSITIVE else gg_det(ctx, name, n.cond.name)
        out = _replace_clause(u, path, _replace_node(c, Node(n.label, replace(n.cond, name=name))))
    else:
        raise RuleError("unsupported", f"SUBST does not handle {kind} moves")
    if not j:
        raise RuleError("no-derivation", f"{kind} replacement at {label} ({pol}): {j.detail}")
    return out, j, pol


# ---------------------------------------------------------------- structural rewrites


def may_immediately_dominate(u: Udrs, c: Clause, wide: str) -> list[str]:
    """Clause-mates that sit directly below ``wide`` in at least one reading."""
    prec = node_precedence(u, c)
    out = []
    for m in c.node_labels:
        if m == wide or (m, wide) in prec:
            continue
        if any((wide, k) in prec and (k, m) in prec for k in c.node_labels):
            continue
        out.append(m)
    return out


def gg_pi(ctx: Context, u: Udrs, wide: str, narrow: str) -> tuple[Udrs, Judgment]:
    """Exchange two neighbouring quantifiers when every possible neighbour allows it."""
    path, c, n1 = _node_of(u, wide)
    n2 = c.node(narrow) if narrow in c.node_labels else None
    if n2 is None:
        raise RuleError("structure", f"{narrow} is not a clause-mate of {wide}")
    if Edge(narrow, wide, "scope") not in c.ord:
        raise RuleError("structure", f"no edge {narrow} <= scope({wide})")
    if not isinstance(n1.cond, Quant) or not isinstance(n2.cond, Quant):
        raise RuleError("pi", "a negation cannot be exchanged")
    pol = polarity(u, ctx.dets)[wide]
    _need(pol, wide)
    pairs = ctx.lex.pi if pol == POSITIVE else {(b, a) for a, b in ctx.lex.pi}
    q1 = n1.cond.name
    for m in may_immediately_dominate(u, c, wide):
        node = c.node(m)
        if isinstance(node.cond, Neg):
            raise RuleError("pi", f"{m} is a negation that may sit directly below {wide}")
        if (q1, node.cond.name) not in pairs:
            raise RuleError("pi", f"({q1}, {node.cond.name}) is not an exchange pair")
    ord2 = tuple(e for e in c.ord if e != Edge(narrow, wide, "scope")) + (Edge(wide, narrow, "scope"),)
    return _replace_clause(u, path, replace(c, ord=ord2, only=None)), Judgment(True, "pi", "1", f"{q1}")


def _fixed(prec, labels: Sequence[str], n: str) -> bool:
    return all(m == n or (m, n) in prec or (n, m) in prec for m in labels)


def _rebuild(c: Clause, nodes: tuple[Node, ...], prec: set[tuple[str, str]], gone: set[str]) -> Clause:
    keep = tuple(e for e in c.ord if not _is_node_edge(e, c.node_labels) and e.hi not in gone and e.lo not in gone)
    return replace(c, nodes=nodes, ord=_order_edges(prec) + keep, only=None)


def lex_no_every(ctx: Context, u: Udrs, label: str, namer) -> Udrs:
    """``<no, R, S>`` becomes ``<every, R, not S>``."""
    path, c, n = _node_of(u, label)
    if not isinstance(n.cond, Quant) or n.cond.name != "no":
        raise RuleError("structure", f"{label} is not a 'no' node")
    pol = polarity(u, ctx.dets)[label]
    if pol != POSITIVE:
        raise RuleError("polarity", f"{label} has polarity {pol}, the rewrite needs +")
    prec = set(node_precedence(u, c))
    if not _fixed(prec, c.node_labels, label):
        raise RuleError("structure", f"{label} is not ordered with all of its clause-mates")
    if any(s.host == n.scope for s in c.subs):
        raise RuleError("unsupported", "a scope hosting subordinate clauses")
    neg = Node(namer.fresh("lneg"), Neg(namer.fresh("lnegb")))
    every = Node(n.label, replace(n.cond, name="every"))
    below = {b for a, b in prec if a == label}
    prec |= {(label, neg.label)} | {(a, neg.label) for a, b in set(prec) if b == label}
    prec |= {(neg.label, b) for b in below}
    nodes = tuple(every if m.label == label else m for m in c.nodes) + (neg,)
    return _replace_clause(u, path, _rebuild(c, nodes, prec, set()))


def lex_some_not(ctx: Context, u: Udrs, label: str) -> Udrs:
    """``<some, R, not S>`` becomes ``not <every, R, S>``."""
    path, c, n = _node_of(u, label)
    if not isinstance(n.cond, Quant) or n.cond.name not in ("some", "a", "at-least-one"):
        raise RuleError("structure", f"{label} is not an existential node")
    pol = polarity(u, ctx.dets)[label]
    if pol != POSITIVE:
        raise RuleError("polarity", f"{label} has polarity {pol}, the rewrite needs +")
    prec = set(node_precedence(u, c))
    negs = [m for m in c.nodes if isinstance(m.cond, Neg) and (label, m.label) in prec
            and not any((label, k) in prec and (k, m.label) in prec for k in c.node_labels)]
    if len(negs) != 1 or not _fixed(prec, c.node_labels, label) or not _fixed(prec, c.node_labels, negs[0].label):
        raise RuleError("structure", f"{label} does not sit directly over a negation in every reading")
    m = negs[0]
    if any(s.host in (m.cond.body, m.label) for s in c.subs):
        raise RuleError("unsupported", "a negation hosting subordinate clauses")
    above = {a for a, b in prec if b == label}
    below = {b for a, b in prec if a == label and b != m.label}
    prec2 = {(a, b) for a, b in prec if m.label not in (a, b)}
    prec2 |= {(m.label, label)} | {(a, m.label) for a in above} | {(m.label, b) for b in below}
    every = Node(n.label, replace(n.cond, name="every"))
    nodes = tuple(every if x.label == label else x for x in c.nodes)
    return _replace_clause(u, path, _rebuild(c, nodes, prec2, set()))


# ---------------------------------------------------------------- RR


INDEX_KEEPING = ("base", "res", "det")


def move_to_sexpr(move: tuple) -> list:
    kind = move[0]
    if kind == "base":
        return [kind, move[1], [[a.pred, *a.args] for a in move[2]]]
    if kind == "res":
        d: Drs = move[2]
        return [kind, move[1], ["drs", list(d.universe), [[a.pred, *a.args] for a in d.atoms]]]
    return [str(x) for x in move]


def move_from_sexpr(x: list) -> tuple:
    kind = x[0]
    if kind == "base":
        return (kind, x[1], tuple(Atom(a[0], tuple(a[1:])) for a in x[2]))
    if kind == "res":
        d = x[2]
        return (kind, x[1], Drs(tuple(d[1]), tuple(Atom(a[0], tuple(a[1:])) for a in d[2])))
    return tuple(x)


def _reindex_changed(u: Udrs, out: Udrs, db: Database) -> tuple[Udrs, Database]:
    """A rewritten subclause loses its old correlation: give it a fresh index."""
    before = dict(clauses(u))
    for path, c in list(clauses(out)):
        if path and c.index is not None and before.get(path) != c:
            idx, db = db.fresh_index()
            out = _replace_clause(out, path, replace(c, index=idx))
    return out, db


def rr(db: Database, entry: int, move: tuple, lex: LexTheory | None = None,
       oracle: Oracle | None = None) -> Step:
    """Add the result of one replacement inside entry ``entry`` to ``db``."""
    oracle = oracle or Oracle(lex)
    lex = lex or oracle.lex
    ctx = Context(db, lex, oracle)
    kind = move[0]
    if kind in INDEX_KEEPING:
        idx, db = db.ensure_index(entry)
        u = db[entry]
        out, j, pol = subst(ctx, u, move)
        disc = (("subst", move[1], pol), (j.rule, j.branch or "-"))
        disc += tuple(("lex", p, q) for p, q in j.uses)
        if j.branch == "2":
            disc += (("oracle", "bound", str(oracle.bound)),)
        out, db = _freshen(db, out)
        out = replace(out, index=idx)
        return Step("RR", (entry,), (("move", move_to_sexpr(move)),), disc, _append(db, out), out)
    if kind == "inst":
        label = move[1]
        embs = [e for e in find_embeddings(db, entry, label, ctx.lex)
                if tuple(v for _, v in e.refs) == tuple(move[2:])]
        if not embs:
            raise RuleError("no-embedding", f"no instance {move[2:]} of {label} in the facts")
        st = det_universal(db, entry, label, embs[0], ctx.lex, ctx.dets)
        return Step("RR", (entry,), (("move", move_to_sexpr(move)),),
                    (("lex", "instance", label),) + st.discharges, st.db, st.output)
    u = db[entry]
    namer = db.namer()
    if kind == "pi":
        out, j = gg_pi(ctx, u, move[1], move[2])
    elif kind == "no-every":
        out = lex_no_every(ctx, u, move[1], namer)
        db = Database(db.entries, namer.counter)
    elif kind == "some-not":
        out = lex_some_not(ctx, u, move[1])
    else:
        raise RuleError("unsupported", f"unknown move {kind}")
    out, db = _reindex_changed(u, out, db)
    bad = validate(out)
    if bad is not None:
        raise RuleError("structure", f"{kind} at {move[1]} gives no well-formed UDRS ({bad})")
    idx, db = db.fresh_index()
    out = replace(out, index=idx)
    verdict = oracle.entails(db.entries, out, "r8")
    if not verdict.holds:
        raise RuleError("no-derivation", f"{kind} at {move[1]} is not confirmed at bound {oracle.bound}")
    out, db = _freshen(db, out)
    out = replace(out, index=idx)
    disc = ((kind, *move[1:]), ("oracle", "bound", str(oracle.bound)), ("index", idx))
    return Step("RR", (entry,), (("move", move_to_sexpr(move)),), disc, _append(db, out), out)


# ---------------------------------------------------------------- goal-directed move proposals


def _loose_maps(c1: Clause, c2: Clause) -> Iterator[dict[str, str]]:
    """Label maps that pair nodes by kind only, so determiners may differ."""
    if len(c1.nodes) != len(c2.nodes) or len(c1.subs) != len(c2.subs):
        return
    kind = lambda n: (n.kind, isinstance(n.cond, Quant) and n.cond.implicative)  # noqa: E731
    for combo in itertools.permutations(c2.nodes):
        if all(kind(a) == kind(b) for a, b in zip(c1.nodes, combo)):
            lm = {c1.upper: c2.upper, c1.lower: c2.lower}
            for a, b in zip(c1.nodes, combo):
                lm.update({a.label: b.label, a.res: b.res, a.scope: b.scope})
            if not c1.subs:
                yield lm
                continue
            for sub in _subs_maps_loose(list(c1.subs), list(c2.subs), lm):
                yield sub


def _subs_maps_loose(s1, s2, lm):
    if not s1:
        yield dict(lm)
        return
    first, rest = s1[0], s1[1:]
    for j, cand in enumerate(s2):
        if lm.get(first.host) != cand.host:
            continue
        for sub in _loose_maps(first.clause, cand.clause):
            yield from _subs_maps_loose(rest, s2[:j] + s2[j + 1:], {**lm, **sub})


def _rename_atoms(atoms, rm_inv: Mapping[str, str]) -> tuple[Atom, ...]:
    return tuple(Atom(a.pred, tuple(rm_inv.get(t, t) for t in a.args)) for a in atoms)


def propose_moves(u: Udrs, goal: Udrs) -> list[tuple]:
    """Replacements that bring ``u`` one component closer to ``goal``."""
    out: list[tuple] = []
    for lm in _loose_maps(u.clause, goal.clause):
        if u.top not in lm and goal.top not in lm.values():
            lm[u.top] = goal.top
        rm = _ref_map(u, goal, lm)
        if rm is None:
            continue
        inv = {v: k for k, v in rm.items()}
        g_clauses = {c.upper: c for _, c in clauses(goal)}
        g_nodes = {n.label: n for _, c in clauses(goal) for n in c.nodes}
        for _, c in clauses(u):
            gc = g_clauses[lm[c.upper]]
            want = _rename_atoms(gc.base, inv)
            if sorted(want, key=repr) != sorted(c.base, key=repr):
                out.append(("base", c.lower, want))
            for n in c.nodes:
                g = g_nodes[lm[n.label]]
                if not isinstance(n.cond, Quant):
                    continue
                if n.cond.name != g.cond.name:
                    out.append(("det", n.label, g.cond.name))
                want_r = _rename_atoms(g.cond.restrictor.atoms, inv)
                if sorted(want_r, key=repr) != sorted(n.cond.restrictor.atoms, key=repr):
                    out.append(("res", n.label, Drs(n.cond.bound(), want_r)))
            prec_u = node_precedence(u, c)
            prec_g = {(a, b) for a, b in node_precedence(goal, gc)}
            inv_l = {v: k for k, v in lm.items()}
            mapped = {(inv_l[a], inv_l[b]) for a, b in prec_g}
            if set(prec_u) != mapped:
                for e in c.ord:
                    if _is_node_edge(e, c.node_labels) and (e.hi, e.lo) not in mapped:
                        out.append(("pi", e.hi, e.lo))
        if out:
            break
    if not out:
        # node counts differ: offer instantiation and the determiner table rewrites
        for _, c in clauses(u):
            for n in c.nodes:
                if isinstance(n.cond, Quant) and n.cond.name == "no":
                    out.append(("no-every", n.label))
                if isinstance(n.cond, Quant) and n.cond.name in ("some", "a", "at-least-one"):
                    out.append(("some-not", n.label))
    seen, uniq = set(), []
    for m in out:
        k = repr(move_to_sexpr(m))
        if k not in seen:
            seen.add(k)
            uniq.append(m)
    return uniq


def instance_moves(db: Database, entry: int, lex: LexTheory) -> list[tuple]:
    u = db[entry]
    out = []
    for n in u.clause.nodes:
        if isinstance(n.cond, Quant) and n.cond.name == "every":
            for e in find_embeddings(db, entry, n.label, lex):
                out.append(("inst", n.label, *(v for _, v in e.refs)))
    return out


__all__ = [
    "Judgment", "Context", "Cond", "db_hyponyms", "validate_detrules", "validate_pi", "gg_drs", "gg_cond",
    "gg_det", "gg_pi", "implication", "subst", "lex_no_every", "lex_some_not", "rr", "propose_moves",
    "instance_moves", "move_to_sexpr", "move_from_sexpr", "persistent_in_clause", "may_immediately_dominate",
    "base_persistence", "NEGATIVE",
]
