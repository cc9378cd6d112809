"""Random UDRS builders shared by the property tests."""
from __future__ import annotations

import random
from pathlib import Path

from hypothesis import strategies as st

from udrs.core import Atom, Clause, Drs, Edge, Neg, Node, Quant, Sub, Udrs

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
DETS = ("every", "some", "no", "few", "more-than-half", "a")


def _node(i: int, kind: str, det: str, pred: str) -> Node:
    lab = f"l{i}"
    if kind == "neg":
        return Node(lab, Neg(f"{lab}b"))
    if kind == "impl":
        return Node(lab, Quant("every", None, f"{lab}r", Drs((f"x{i}",), (Atom(pred, (f"x{i}",)),)), f"{lab}s"))
    return Node(lab, Quant(det, f"x{i}", f"{lab}r", Drs((), (Atom(pred, (f"x{i}",)),)), f"{lab}s"))


def build_clause(specs, order, edges, base_vars, upper="lt", lower="l0", start=1, index=None) -> Clause:
    """``specs`` are ``(kind, det, pred)``; ``edges`` pairs ``(a, b)`` mean node ``a`` outscopes ``b``."""
    nodes = tuple(_node(start + k, *s) for k, s in enumerate(specs))
    labs = [n.label for n in nodes]
    ord_ = tuple(Edge(labs[b], labs[a], "scope") for a, b in edges)
    if len(base_vars) >= 2:
        base = (Atom("r", tuple(base_vars[:2])),)
    elif base_vars:
        base = (Atom("p", (base_vars[0],)),)
    else:
        base = ()
    return Clause(upper, lower, nodes, base, ord_, (), index)


def _vars(specs, start=1):
    return [f"x{start + k}" for k, s in enumerate(specs) if s[0] != "neg"]


def random_udrs(rng: random.Random, max_nodes: int = 4, sub: bool = True, dets=DETS) -> Udrs:
    """Single clause, optionally with one subordinate clause under some node."""
    k = rng.randint(1, max_nodes)
    specs = [(rng.choice(["quant", "quant", "neg", "impl"]), rng.choice(dets), rng.choice("pq")) for _ in range(k)]
    perm = list(range(k))
    rng.shuffle(perm)
    edges = [(perm[a], perm[b]) for a in range(k) for b in range(a + 1, k) if rng.random() < 0.35]
    c = build_clause(specs, perm, edges, _vars(specs))
    if sub and rng.random() < 0.4:
        host_node = rng.choice(c.nodes)
        host = rng.choice([host_node.res, host_node.scope]) if host_node.kind == "quant" else host_node.scope
        sk = rng.randint(1, 2)
        sspecs = [(rng.choice(["quant", "neg"]), rng.choice(dets), rng.choice("pq")) for _ in range(sk)]
        sperm = list(range(sk))
        rng.shuffle(sperm)
        sedges = [(sperm[0], sperm[1])] if sk == 2 and rng.random() < 0.5 else []
        sv = _vars(sspecs, 10) or _vars(specs)[:1]
        sc = build_clause(sspecs, sperm, sedges, sv, upper="su", lower="s0", start=10)
        c = Clause(c.upper, c.lower, c.nodes, c.base, c.ord, (Sub(host, sc),), c.index)
    return Udrs("lt", c)


@st.composite
def udrs_strategy(draw, max_nodes: int = 4, sub: bool = True):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_udrs(random.Random(seed), max_nodes, sub)


@st.composite
def order_strategy(draw, max_nodes: int = 5):
    """A clause of quantifiers with a random set of outscoping edges (any DAG)."""
    k = draw(st.integers(1, max_nodes))
    perm = draw(st.permutations(range(k)))
    pairs = [(perm[a], perm[b]) for a in range(k) for b in range(a + 1, k)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    specs = [("quant", "some", "p")] * k
    return Udrs("lt", build_clause(specs, perm, chosen, []))


# ---------------------------------------------------------------- whole databases for rule soundness

SMALL_DETS = ("every", "some", "no", "a")


def _fact(rng: random.Random, i: int) -> Udrs:
    a = rng.choice([Atom("p", ("c",)), Atom("q", ("c",)), Atom("r", ("c", "d"))])
    return Udrs(f"ft{i}", Clause(f"ft{i}", f"f{i}", (), (a,)))


def _mutate(rng: random.Random, u: Udrs) -> Udrs:
    """Same shape, some determiners, restrictors or scope edges changed."""
    from dataclasses import replace

    c = u.clause
    nodes = []
    for n in c.nodes:
        if isinstance(n.cond, Quant) and rng.random() < 0.5:
            q = n.cond
            if q.var is not None and rng.random() < 0.5:
                q = replace(q, name=rng.choice(SMALL_DETS + ("few",)))
            else:
                atoms = tuple(Atom(rng.choice("pq"), a.args) for a in q.restrictor.atoms)
                q = replace(q, restrictor=Drs(q.restrictor.universe, atoms))
            n = Node(n.label, q)
        nodes.append(n)
    ord_ = c.ord
    if rng.random() < 0.3 and len(c.nodes) >= 2:
        a, b = rng.sample(list(c.node_labels), 2)
        ord_ = tuple(e for e in c.ord if {e.lo, e.hi} != {a, b}) + (Edge(b, a, "scope"),)
    if rng.random() < 0.2:
        nodes = [n for n in nodes if n.kind != "neg"] or nodes
        keep = {n.label for n in nodes}
        ord_ = tuple(e for e in ord_ if e.lo in keep and e.hi in keep)
    return replace(u, clause=replace(c, nodes=tuple(nodes), ord=ord_))


def _negated(u: Udrs, rng: random.Random) -> Udrs:
    """``not(u')`` with ``u'`` a relabelled copy of ``u`` carrying one extra scope edge."""
    from udrs.core import rename, labels, referents

    lm = {l: "m" + l for l in labels(u)}
    rm = {x: x for x in referents(u)}
    inner = rename(u, lm, rm).clause
    labs = list(inner.node_labels)
    ord_ = inner.ord
    if len(labs) >= 2 and rng.random() < 0.8:
        a, b = rng.sample(labs, 2)
        ord_ = ord_ + (Edge(b, a, "scope"),)
    from dataclasses import replace

    inner = replace(inner, ord=ord_, index=u.index)
    c = Clause("nt", "n0", (Node("n1", Neg("n1b")),), (), (), (Sub("n1b", inner),))
    return Udrs("nt", c)


def _conditional(rng: random.Random) -> tuple[Udrs, Udrs]:
    ante = random_udrs(rng, 2, sub=False, dets=SMALL_DETS).clause
    from dataclasses import replace

    idx = rng.choice(["i", "j"])
    ante_c = replace(ante, upper="la", index=idx)
    cons_c = Clause("lb", "lb0", (), (Atom(rng.choice("pq"), ("c",)),))
    c = Clause("ct", "c0", (Node("c1", Quant("every", None, "c1r", Drs(), "c1s")),), (), (),
               (Sub("c1r", ante_c), Sub("c1s", cons_c)))
    minor = Udrs("mt", replace(ante, upper="mt", index=None), rng.choice(["i", "k"]))
    from udrs.core import rename, labels

    minor = rename(minor, {l: "n" + l for l in labels(minor)})
    return Udrs("ct", c), minor


def random_database(rng: random.Random):
    """``(Database, goal)`` in one of a few shapes that exercise different rules."""
    from dataclasses import replace
    from udrs.core import Database

    shape = rng.choice(["plain", "plain", "diff", "cond"])
    u = random_udrs(rng, 3, sub=False, dets=SMALL_DETS)
    if rng.random() < 0.5 or shape == "diff":
        u = replace(u, index="i")
    es = [u]
    if shape == "diff":
        es.append(_negated(u, rng))
    if shape == "cond":
        es = list(_conditional(rng))
        u = es[1]
    es += [_fact(rng, k) for k in range(rng.randint(0, 2))]
    db = Database()
    for e in es:
        db = db.add(e)
    goal = _mutate(rng, u)
    if rng.random() < 0.5:
        goal = replace(goal, index=u.index)
    return db, goal
