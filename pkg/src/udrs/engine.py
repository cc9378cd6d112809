"""Proof search over UDRS databases, with replayable traces.

The search is iterative deepening over rule applications in the fixed order
DIFF, DET, RR, AI, NeU.  Each node of the search first tries the direct
proof: an entry equal to the goal up to renaming, with the same correlation
index (or, for an unindexed goal, a goal with a single reading).
Conditionalisation and reductio are only offered when one operator of the
goal's main clause outscopes all others in every reading.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from .core import (Clause, Database, Quant, Sub, Udrs, UdrsError, clauses, node_precedence, referents, rename,
                   standalone)
from .disambig import align, alpha_equal, count_readings
from .lexicon import LexTheory
from .modelsem import Oracle, Verdict
from .replace import move_from_sexpr, move_to_sexpr, propose_moves, rr
from .rules import (Embedding, Inconsistent, RuleError, Step, _append, _order_edges, _is_node_edge, ai,
                    as_conditional, det_conditional, det_universal, diff, find_embeddings, negated_clause,
                    neu_step, polarity)
from .sexpr import loads, pretty
from .syntax import print_database, udrs_from_sexpr, udrs_to_sexpr

FALSUM = "falsum"


class GuardError(RuleError):
    def __init__(self, msg: str):
        super().__init__("guard", msg)


@dataclass(frozen=True)
class Goal:
    udrs: Udrs | None          # None stands for falsity (inside a reductio)
    mode: str = "search"       # direct | search

    def to_sexpr(self) -> list:
        return [FALSUM] if self.udrs is None else udrs_to_sexpr(self.udrs)


@dataclass(frozen=True)
class Action:
    """A rule application in replayable form."""

    rule: str
    inputs: tuple[int, ...] = ()
    args: tuple = ()

    def to_sexpr(self) -> list:
        return [self.rule, [str(i) for i in self.inputs], *[_sx(a) for a in self.args]]


def _sx(x):
    if isinstance(x, (tuple, list)):
        return [_sx(y) for y in x]
    return str(x)


@dataclass(frozen=True)
class TraceStep:
    action: Action
    step: Step
    goal: Goal

    def to_sexpr(self) -> list:
        s = self.step
        out: list = ["step", ":rule", self.action.rule, ":inputs", [str(i) for i in self.action.inputs]]
        out += [":params", [_sx(a) for a in self.action.args]]
        out += [":discharge", [_sx(d) for d in s.discharges]]
        if s.output is not None:
            out += [":output", udrs_to_sexpr(s.output)]
        if self.action.rule in ("COND", "RAA"):
            out += [":subgoal", self.goal.to_sexpr()]
        return out


@dataclass
class ProofTrace:
    db: Database
    goal: Goal
    steps: list[TraceStep] = field(default_factory=list)
    verdict: str = "exhausted"     # proved | refuted | exhausted
    closed_by: tuple = ()
    budget: int = 8
    bound: int = 4
    countermodel: Verdict | None = None

    @property
    def final_db(self) -> Database:
        return self.steps[-1].step.db if self.steps else self.db

    def rule_names(self) -> list[str]:
        return [t.action.rule for t in self.steps]

    def to_sexpr(self) -> list:
        out: list = ["trace", ":budget", str(self.budget), ":bound", str(self.bound),
                     ":goal", self.goal.to_sexpr()]
        out += [t.to_sexpr() for t in self.steps]
        v: list = ["verdict", self.verdict, ":steps", str(len(self.steps))]
        if self.closed_by:
            v += [":by", _sx(self.closed_by)]
        if self.countermodel is not None:
            v += [":oracle", self.countermodel.to_sexpr()]
        out.append(v)
        return out

    def dumps(self) -> str:
        return pretty(self.to_sexpr()) + "\n"


@dataclass(frozen=True)
class Settings:
    lex: LexTheory = field(default_factory=LexTheory)
    bound: int = 4
    few_k: int = 2
    budget: int = 8
    refute: bool = False

    @property
    def oracle(self) -> Oracle:
        return Oracle(self.lex, self.bound, self.few_k)


# ---------------------------------------------------------------- direct proof


def direct_proof(db: Database, goal: Udrs) -> int | None:
    """Index of an entry that is the goal itself, respecting correlation indices."""
    for k, u in enumerate(db.entries):
        if goal.index is not None:
            if u.index == goal.index and alpha_equal(u, goal):
                return k
        elif count_readings(goal) == 1 and alpha_equal(u, goal):
            return k
    return None


def find_inconsistency(db: Database) -> tuple[int, int] | None:
    for k, u in enumerate(db.entries):
        if negated_clause(u) is None:
            continue
        for a in range(len(db)):
            if a == k:
                continue
            try:
                diff(db, a, k)
            except Inconsistent:
                return (a, k)
            except RuleError:
                continue
    return None


# ---------------------------------------------------------------- COND / RAA


def widest_operator(u: Udrs):
    """The node of the main clause that outscopes all clause-mates in every reading."""
    c = u.clause
    if not c.nodes:
        return None
    prec = node_precedence(u, c)
    for n in c.nodes:
        if all(m is n or (n.label, m.label) in prec for m in c.nodes):
            return n
    return None


def _drop_node(u: Udrs, n, ref_map=None) -> Udrs:
    """``u`` without node ``n``; its labels are replaced by the clause's upper bound."""
    c = u.clause
    gone = {n.label, n.res, n.scope}
    rest = tuple(m for m in c.nodes if m is not n)
    keep = {m.label for m in rest}
    prec = {(a, b) for a, b in node_precedence(u, c) if a in keep and b in keep}
    others = tuple(e for e in c.ord
                   if e.lo not in gone and e.hi not in gone and not _is_node_edge(e, c.node_labels))
    subs = tuple(Sub(c.upper if s.host in (n.label, n.scope) else s.host, s.clause) for s in c.subs)
    clause = replace(c, nodes=rest, ord=_order_edges(prec) + others, subs=subs, only=None)
    out = Udrs(u.top, clause, u.index, u.universe)
    return rename(out, {}, ref_map or {})


def cond(db: Database, goal: Udrs) -> tuple[Database, Udrs, Step]:
    """Conditionalisation: assume the antecedent, prove the consequent."""
    n = widest_operator(goal)
    if n is None:
        raise GuardError("no operator has widest scope in the goal")
    if not isinstance(n.cond, Quant) or n.cond.name != "every":
        raise GuardError(f"the widest operator {n.label} is not an implication")
    c = goal.clause
    namer = db.namer()
    namer.taken |= referents(goal)
    pc = as_conditional(goal)
    if pc is not None:
        ante = standalone(goal, pc.ante)
        sub = standalone(goal, pc.cons)
        added, params = ante, ()
    else:
        if any(s.host == n.res for s in c.subs):
            raise RuleError("unsupported", "restrictors hosting subordinate clauses")
        consts = {x: namer.fresh("a") for x in n.cond.bound()}
        top = namer.fresh("lt")
        base = tuple(a.rename(consts) for a in n.cond.restrictor.atoms)
        added = Udrs(top, Clause(top, namer.fresh("l0"), (), base))
        sub = _drop_node(goal, n, consts)
        params = tuple(sorted(consts.items()))
    db = Database(db.entries, namer.counter)
    db = _append(db, added)
    disc = (("widest", n.label),) + tuple(("constant", x, a) for x, a in params)
    return db, sub, Step("COND", (), (), disc, db, added)


def raa(db: Database, goal: Udrs) -> tuple[Database, None, Step]:
    """Reductio: assume the negated material and derive falsity."""
    n = widest_operator(goal)
    if n is None:
        raise GuardError("no operator has widest scope in the goal")
    if isinstance(n.cond, Quant):
        raise GuardError(f"the widest operator {n.label} is not a negation")
    body = _drop_node(goal, n)
    if not body.clause.nodes and not body.clause.base and len(body.clause.subs) == 1:
        body = standalone(body, (0,))
        if goal.index is not None:
            body = replace(body, index=goal.index)
    db = db.add(body)
    return db, None, Step("RAA", (), (), (("widest", n.label),), db, db.entries[-1])


# ---------------------------------------------------------------- actions


def execute(db: Database, goal: Goal, a: Action, st: Settings) -> tuple[Database, Goal, Step]:
    """Run one action; raises :class:`RuleError` when it does not apply."""
    oracle = st.oracle
    r = a.rule
    if r == "COND":
        if goal.udrs is None:
            raise GuardError("nothing to conditionalise")
        db2, sub, step = cond(db, goal.udrs)
        return db2, Goal(sub), step
    if r == "RAA":
        if goal.udrs is None:
            raise GuardError("already inside a reductio")
        db2, _, step = raa(db, goal.udrs)
        return db2, Goal(None), step
    if r == "DIFF":
        step = diff(db, *a.inputs)
    elif r == "DET":
        if a.args and a.args[0][0] == "conditional":
            step = det_conditional(db, a.inputs[0], a.inputs[1], oracle)
        else:
            node = a.args[0][1]
            refs = tuple((p[0], p[1]) for p in a.args[1][1:])
            step = det_universal(db, a.inputs[0], node, Embedding(refs, db[a.inputs[0]].clause.upper),
                                 st.lex, oracle.dets)
    elif r == "RR":
        step = rr(db, a.inputs[0], move_from_sexpr(a.args[0][1]), st.lex, oracle)
    elif r == "AI":
        step = ai(db, *a.inputs)
    elif r == "NeU":
        step = neu_step(db, a.inputs[0], int(a.args[0][1]))
    else:
        raise RuleError("unsupported", f"unknown rule {r}")
    return step.db, goal, step


def candidates(db: Database, goal: Goal, st: Settings) -> Iterator[Action]:
    """Applicable-looking actions in canonical order; each may still be refused."""
    g = goal.udrs
    if g is not None and widest_operator(g) is not None:
        n = widest_operator(g)
        if isinstance(n.cond, Quant) and n.cond.name == "every":
            yield Action("COND", (), (("node", n.label),))
        elif not isinstance(n.cond, Quant):
            yield Action("RAA", (), (("node", n.label),))
    for k, u in enumerate(db.entries):
        if negated_clause(u) is not None:
            for a in range(len(db)):
                if a != k and negated_clause(db[a]) is None:
                    yield Action("DIFF", (a, k))
    for k, u in enumerate(db.entries):
        if as_conditional(u) is not None:
            for m in range(len(db)):
                if m != k:
                    yield Action("DET", (k, m), (("conditional",),))
        for n in u.clause.nodes:
            if isinstance(n.cond, Quant) and n.cond.name == "every" and polarity(u)[n.label] == "+":
                for e in find_embeddings(db, k, n.label, st.lex):
                    yield Action("DET", (k,), (("node", n.label), ("embedding", *[list(p) for p in e.refs])))
    if g is not None:
        for k, u in enumerate(db.entries):
            for mv in propose_moves(u, g):
                yield Action("RR", (k,), (("move", move_to_sexpr(mv)),))
        unamb = [k for k, u in enumerate(db.entries) if count_readings(u) == 1 and len(list(clauses(u))) == 1]
        if count_readings(g) > 1:
            for i in unamb:
                for j in unamb:
                    if i < j and align(db[i], db[j], order=False) is not None:
                        yield Action("AI", (i, j))
        if g.universe:
            for k, u in enumerate(db.entries):
                if len(u.universe) < len(g.universe):
                    yield Action("NeU", (k,), (("count", len(g.universe) - len(u.universe)),))


def _duplicate(db: Database, out: Udrs | None) -> bool:
    if out is None:
        return False
    return any(u.index == out.index and alpha_equal(u, out) for u in db.entries[:-1])


def _closed(db: Database, goal: Goal) -> tuple | None:
    pair = find_inconsistency(db)
    if pair is not None:
        return ("inconsistency", *pair)
    if goal.udrs is not None:
        k = direct_proof(db, goal.udrs)
        if k is not None:
            return ("direct", k)
    return None


def prove(db: Database, goal: Udrs | Goal, settings: Settings | None = None) -> ProofTrace:
    """Search for a derivation of ``goal``; the trace records every step taken."""
    st = settings or Settings()
    g0 = goal if isinstance(goal, Goal) else Goal(goal)
    trace = ProofTrace(db, g0, budget=st.budget, bound=st.bound)
    if g0.mode == "direct":
        k = direct_proof(db, g0.udrs) if g0.udrs is not None else None
        if k is not None:
            trace.verdict, trace.closed_by = "proved", ("direct", k)
        return _maybe_refute(trace, st)
    for depth in range(st.budget + 1):
        path: list[TraceStep] = []
        found = _dfs(db, g0, depth, st, path)
        if found is not None:
            trace.steps, trace.verdict, trace.closed_by = path, "proved", found
            return trace
    return _maybe_refute(trace, st)


def _dfs(db: Database, goal: Goal, depth: int, st: Settings, path: list[TraceStep]) -> tuple | None:
    done = _closed(db, goal)
    if done is not None:
        return done
    if depth == 0:
        return None
    for a in candidates(db, goal, st):
        try:
            db2, g2, step = execute(db, goal, a, st)
        except RuleError:
            continue
        if a.rule not in ("COND", "RAA") and _duplicate(db2, step.output):
            continue
        path.append(TraceStep(a, step, g2))
        found = _dfs(db2, g2, depth - 1, st, path)
        if found is not None:
            return found
        path.pop()
    return None


def _maybe_refute(trace: ProofTrace, st: Settings) -> ProofTrace:
    if st.refute and trace.verdict != "proved" and trace.goal.udrs is not None:
        v = st.oracle.entails(trace.db, trace.goal.udrs, "r8")
        trace.countermodel = v
        if not v.holds:
            trace.verdict = "refuted"
    return trace


# ---------------------------------------------------------------- replay


def parse_trace(text: str) -> tuple[Goal, list[Action], str]:
    t = loads(text)
    if not isinstance(t, list) or not t or t[0] != "trace":
        raise UdrsError("expected (trace ...)")
    i = 1
    goal = None
    while i < len(t) and isinstance(t[i], str) and t[i].startswith(":"):
        if t[i] == ":goal":
            g = t[i + 1]
            goal = Goal(None) if g == [FALSUM] else Goal(udrs_from_sexpr(g))
        i += 2
    actions, verdict = [], "exhausted"
    for form in t[i:]:
        if form[0] == "step":
            kw = {form[j]: form[j + 1] for j in range(1, len(form) - 1, 2)}
            params = tuple(_tup(p) for p in kw[":params"])
            # moves keep their nested list shape so move_from_sexpr can read them
            if kw[":rule"] == "RR":
                params = (("move", kw[":params"][0][1]),)
            actions.append(Action(kw[":rule"], tuple(int(v) for v in kw[":inputs"]), params))
        elif form[0] == "verdict":
            verdict = form[1]
    if goal is None:
        raise UdrsError("trace has no :goal")
    return goal, actions, verdict


def _tup(y):
    return tuple(_tup(z) for z in y) if isinstance(y, list) else y


def replay(db: Database, trace_text: str, settings: Settings | None = None) -> tuple[Database, Goal, str]:
    """Re-run the recorded steps from ``db``; returns the final database, goal and verdict."""
    st = settings or Settings()
    goal, actions, verdict = parse_trace(trace_text)
    for a in actions:
        db, goal, _ = execute(db, goal, a, st)
    return db, goal, verdict


def final_database_text(db: Database) -> str:
    return print_database(db)


__all__ = [
    "Goal", "Action", "TraceStep", "ProofTrace", "Settings", "GuardError", "prove", "cond", "raa",
    "direct_proof", "find_inconsistency", "widest_operator", "execute", "candidates", "replay",
    "parse_trace", "final_database_text", "FALSUM",
]
