"""Command line front end.

Exit codes: 0 proved/holds, 1 refuted/fails, 2 exhausted/inapplicable,
3 input error.  Verdicts go to standard output as s-expressions.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from .core import Database, UdrsError, validate
from .disambig import count_readings, enumerate_scopings
from .engine import Settings, prove, replay
from .lexicon import LexTheory, lex_from_sexpr
from .modelsem import Oracle, model_from_sexpr, resolve, scoping_sexpr, sdrs_to_sexpr
from .replace import validate_detrules, validate_pi
from .rules import Inconsistent, RuleError, diff, negated_clause, polarity
from .sexpr import SExprError, loads, pretty
from .syntax import ParseError, load_database, load_udrs, print_database, read_forms

OK, FAILS, EXHAUSTED, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _out(form) -> None:
    print(pretty(form))


def _load_lex(args, lex: LexTheory) -> LexTheory:
    if getattr(args, "lex", None):
        for f in read_forms(args.lex):
            lex = lex.merge(lex_from_sexpr(f))
    validate_detrules(lex, args.few_k)
    if lex.pi != LexTheory().pi:
        validate_pi(lex, args.few_k)
    return lex


def _db(args, path: str) -> tuple[Database, LexTheory]:
    db, lex = load_database(path)
    for i, u in enumerate(db.entries):
        v = validate(u)
        if v is not None:
            raise InputError(f"{path}: entry {i}: {v}")
    return db, _load_lex(args, lex)


def _goal(path: str):
    g = load_udrs(path)
    v = validate(g)
    if v is not None:
        raise InputError(f"{path}: {v}")
    return g


def digest(db: Database) -> str:
    return hashlib.sha256(print_database(db).encode()).hexdigest()[:16]


def cmd_readings(args) -> int:
    u = _goal(args.file)
    out: list = ["readings", ":count", str(count_readings(u))]
    for k, s in enumerate(enumerate_scopings(u), 1):
        out.append(["reading", str(k), ":order", scoping_sexpr(s), ":drs", sdrs_to_sexpr(resolve(u, s))])
    _out(out)
    return OK


def cmd_validate(args) -> int:
    db, _ = load_database(args.file)
    bad = [(i, validate(u)) for i, u in enumerate(db.entries)]
    bad = [(i, v) for i, v in bad if v is not None]
    if not bad:
        _out(["valid", ":entries", str(len(db))])
        return OK
    for i, v in bad:
        _out(["invalid", ":entry", str(i), ":rule", v.rule, ":detail", v.detail.replace(" ", "_")])
    return FAILS


def cmd_polarity(args) -> int:
    u = _goal(args.file)
    pol = polarity(u, Oracle(few_k=args.few_k).dets)
    _out(["polarity", *[[k, v] for k, v in sorted(pol.items())]])
    return OK


def _models(path: str | None):
    if path is None:
        return None
    files = sorted(p for p in Path(path).iterdir() if p.suffix in (".sexp", ".model"))
    return [model_from_sexpr(f) for p in files for f in read_forms(p)]


def cmd_entail(args) -> int:
    db, lex = _db(args, args.db)
    goal = _goal(args.goal)
    oracle = Oracle(lex, args.bound, args.few_k)
    v = oracle.entails(db, goal, args.rel, _models(args.models))
    _out(v.to_sexpr())
    return OK if v.holds else FAILS


def cmd_diff(args) -> int:
    db, _ = _db(args, args.db)
    applied = 0
    for k, u in enumerate(db.entries):
        if negated_clause(u) is None:
            continue
        for a in range(len(db)):
            if a == k or negated_clause(db[a]) is not None:
                continue
            try:
                step = diff(db, a, k)
            except Inconsistent as e:
                _out(["inconsistent", ":entries", [str(a), str(k)], ":reason", e.code])
                return FAILS
            except RuleError:
                continue
            db = step.db
            applied += 1
            _out(["diff", ":inputs", [str(a), str(k)], ":discharge", [list(d) for d in step.discharges]])
    if not applied:
        _out(["diff", ":applied", "0"])
        return EXHAUSTED
    sys.stdout.write(print_database(db))
    return OK


def _settings(args, lex) -> Settings:
    return Settings(lex, args.bound, args.few_k, args.budget, getattr(args, "refute", False))


def cmd_prove(args) -> int:
    db, lex = _db(args, args.db)
    goal = _goal(args.goal)
    trace = prove(db, goal, _settings(args, lex))
    form = trace.to_sexpr()
    form[-1] += [":digest", digest(trace.final_db)]
    text = pretty(form) + "\n"
    if args.trace:
        Path(args.trace).write_text(text, encoding="utf-8")
    _out(form[-1])
    return {"proved": OK, "refuted": FAILS}.get(trace.verdict, EXHAUSTED)


def cmd_replay(args) -> int:
    db, lex = _db(args, args.db)
    text = Path(args.trace).read_text(encoding="utf-8")
    final, _, verdict = replay(db, text, _settings(args, lex))
    got = digest(final)
    verdict_form = loads(text)[-1]
    want = None
    if ":digest" in verdict_form:
        want = verdict_form[verdict_form.index(":digest") + 1]
    _out(["replay", ":verdict", verdict, ":digest", got, ":match", "yes" if want in (None, got) else "no"])
    if args.print_db:
        sys.stdout.write(print_database(final))
    return OK if want in (None, got) else FAILS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="udrs", description="Reasoning with underspecified DRSs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=4, help="largest model domain (default 4)")
    common.add_argument("--budget", type=int, default=8, help="rule applications per proof (default 8)")
    common.add_argument("--few-k", type=int, default=2, help="'few' means at most K (default 2)")
    common.add_argument("--lex", help="extra lexicon file")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("readings", parents=[common], help="enumerate and count readings")
    s.add_argument("file")
    s.set_defaults(fn=cmd_readings)

    s = sub.add_parser("validate", parents=[common], help="check well-formedness")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("polarity", parents=[common], help="polarity of every label")
    s.add_argument("file")
    s.set_defaults(fn=cmd_polarity)

    s = sub.add_parser("entail", parents=[common], help="bounded-model consequence check")
    s.add_argument("--rel", choices=["r1", "r3", "r4", "r8"], default="r8")
    s.add_argument("--models", help="directory of model files to check instead of enumerating")
    s.add_argument("db")
    s.add_argument("goal")
    s.set_defaults(fn=cmd_entail)

    s = sub.add_parser("diff", parents=[common], help="apply ambiguity elimination where possible")
    s.add_argument("db")
    s.set_defaults(fn=cmd_diff)

    s = sub.add_parser("prove", parents=[common], help="search for a derivation")
    s.add_argument("db")
    s.add_argument("goal")
    s.add_argument("--trace", help="write the proof trace here")
    s.add_argument("--refute", action="store_true", help="on failure, look for a countermodel")
    s.set_defaults(fn=cmd_prove)

    s = sub.add_parser("replay", parents=[common], help="re-run a recorded trace")
    s.add_argument("db")
    s.add_argument("trace")
    s.add_argument("--print-db", action="store_true", help="print the final database")
    s.set_defaults(fn=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    try:
        return args.fn(args)
    except (ParseError, SExprError, InputError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except UdrsError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
