"""Command-line interface.

Every subcommand prints a report (text or JSON) and exits with 0 when all
checks pass, 1 when a counterexample or rejection is found, and 2 on usage or
configuration errors.  JSON reports share the top-level keys ``command`` and
``status`` (``"pass"``, ``"fail"`` or ``"error"``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import lind
from .config import ConfigError, load_env, load_glue, load_model, load_signature
from .evaluate import EvalError, evaluate
from .generate import UninhabitedError, generate_terms
from .logrel import check_basic_lemma, check_effect_sim
from .semantics import (BudgetExceeded, NonFiniteError, UnsupportedOperation, algebra_model, atoms,
                        make_monad, show)
from .syntax import BaseT, CompType, FreeT, ParseError, Signature, parse_program, parse_type, print_term, print_type
from .typecheck import CBPVTypeError, elaborate

PASS, FAIL, ERROR = 0, 1, 2

_VIOLATIONS = {"type": "array", "items": {"type": "object", "required": ["axiom"]}}
_SIM = {
    "required": ["verdict", "terms", "counterexamples", "notes"],
    "properties": {
        "verdict": {"enum": ["pass", "fail"]},
        "terms": {"type": "array", "items": {"type": "object", "required": ["index", "verdict"]}},
        "counterexamples": {"type": "array", "items": {"type": "object", "required": ["kind", "clause"]}},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


def _when(command, then):
    return {"if": {"properties": {"command": {"const": command}, "status": {"enum": ["pass", "fail"]}}},
            "then": then}


# JSON Schema (draft 2020-12) for every ``--format json`` report.
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "status"],
    "properties": {
        "command": {"enum": ["check", "eval", "logrel", "simulate", "gen", "lind", "lind check"]},
        "status": {"enum": ["pass", "fail", "error"]},
    },
    "allOf": [
        {"if": {"properties": {"status": {"const": "error"}}},
         "then": {"required": ["error"], "properties": {"error": {"type": "string"}}}},
        _when("check", {"required": ["file"], "properties": {"type": {"type": "string"}}}),
        _when("eval", {"required": ["file", "type", "denotation"]}),
        _when("gen", {"required": ["type", "terms"],
                      "properties": {"terms": {"type": "array", "items": {"type": "string"}}}}),
        _when("logrel", _SIM),
        _when("simulate", _SIM),
        _when("lind check", {
            "required": ["file", "kind"],
            "properties": {
                "kind": {"enum": ["lind", "functor"]},
                "violations": _VIOLATIONS,
                "source": {"type": "object", "required": ["checked", "violations"]},
                "target": {"type": "object", "required": ["checked", "violations"]},
                "functor": {"type": "object", "required": ["checked", "violations"]},
                "fibration": {"type": "object",
                              "required": ["index_arrows_without_lift", "failures", "lifts", "checked"]},
            },
        }),
    ],
}


class UsageError(Exception):
    pass


def _emit(args, report: dict, text: str):
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(text)


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None


def _sig(path: Optional[str]) -> Signature:
    return load_signature(path) if path else Signature()


def _type_arg(text: Optional[str], sig: Signature):
    if text is None:
        return None
    try:
        return parse_type(text, sig)
    except ParseError as e:
        raise ConfigError(f"bad type {text!r}: {e}") from None


def read_corpus(path: str, sig: Signature, consts=None) -> list:
    """One term per line; blank lines and ``#`` comments are skipped."""
    terms = []
    for lineno, line in enumerate(_read(path).splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            terms.append(parse_program(line, sig, consts))
        except ParseError as e:
            raise ConfigError(f"{path}:{lineno}: {e}") from None
    return terms


# ---------------------------------------------------------------- subcommands


def _consts(args, sig):
    if not getattr(args, "model", None):
        return sig, {}
    loaded = load_model(args.model, sig if args.sig else None)
    return loaded.model.sig, loaded.const_types


def cmd_check(args) -> int:
    sig, consts = _consts(args, _sig(args.sig))
    expected = _type_arg(args.type, sig)
    try:
        term = parse_program(_read(args.file), sig, list(consts))
        ty, _ = elaborate(term, env=consts, sig=sig, expected=expected)
    except (ParseError, CBPVTypeError) as e:
        _emit(args, {"command": "check", "status": "fail", "file": args.file, "error": str(e)},
              f"{args.file}: rejected: {e}")
        return FAIL
    _emit(args, {"command": "check", "status": "pass", "file": args.file, "type": print_type(ty)},
          f"{args.file}: {print_type(ty)}")
    return PASS


def cmd_eval(args) -> int:
    sig = load_signature(args.sig) if args.sig else None
    loaded = load_model(args.model, sig)
    model = loaded.model
    ctx, env = load_env(args.env, loaded) if args.env else ({}, {})
    expected = _type_arg(args.type, model.sig)
    names = list(loaded.const_types)
    try:
        term = parse_program(_read(args.file), model.sig, names, scope=list(ctx))
        ty, den = evaluate(model, term, env, ctx=ctx, consts=loaded.const_types, expected=expected)
    except (ParseError, CBPVTypeError) as e:
        raise ConfigError(f"{args.file}: {e}") from None
    _emit(args, {"command": "eval", "status": "pass", "file": args.file, "type": print_type(ty),
                 "denotation": show(den)},
          f"{print_type(ty)}\n{show(den)}")
    return PASS


def _corpus_for(args, sig, consts):
    if args.corpus and args.file:
        raise UsageError("give either --corpus or a program file, not both")
    if args.corpus:
        return read_corpus(args.corpus, sig, list(consts))
    if args.file:
        try:
            return [parse_program(_read(args.file), sig, list(consts))]
        except ParseError as e:
            raise ConfigError(f"{args.file}: {e}") from None
    if args.count is None:
        raise UsageError("give --corpus, a program file, or --count with --seed and --type")
    if args.seed is None or args.type is None:
        raise UsageError("generated corpora need --seed and --type")
    return generate_terms(sig, _type_arg(args.type, sig), args.depth, args.seed, args.count, consts=consts)


def cmd_logrel(args) -> int:
    g = load_glue(args.glue, load_signature(args.sig) if args.sig else None)
    g.arrow_budget = args.budget
    sig = g.base.sig
    consts = dict(g.const_types)
    corpus = _corpus_for(args, sig, consts)
    expected = _type_arg(args.type, sig)
    rep = check_basic_lemma(g, corpus, expected=expected)
    lines = [rep.summary()] + [f"note: {n}" for n in rep.notes]
    for c in rep.counterexamples:
        if c["kind"] == "unrelated constant":
            lines.append(f"unrelated constant {c['constant']} : {c['type']} = {c['denotation']} ({c['clause']})")
        else:
            lines.append(f"counterexample #{c['index']}: {c['term']} : {c['type']} = {c['denotation']} ({c['clause']})")
    out = {"command": "logrel", "status": rep.verdict}
    out.update(rep.to_json())
    _emit(args, out, "\n".join(lines))
    return PASS if rep.ok else FAIL


def cmd_simulate(args) -> int:
    sig = load_signature(args.sig)
    names = {(o.name, o.arity) for o in sig.operations}
    if names != {("or", 2), ("fail", 0)} or any(o.param is not None for o in sig.operations):
        raise ConfigError("simulation needs exactly the operations or/2 and fail/0")
    if not sig.value_bases:
        raise ConfigError("simulation needs a value base type")
    base = args.base or sig.value_bases[0]
    if base not in sig.value_bases:
        raise ConfigError(f"unknown base type {base!r}")
    elements = atoms([f"a{i}" for i in range(args.size)])
    bases = {b: elements for b in sig.value_bases}
    # one constant per element of the simulated base type
    consts = {e.name: BaseT(base) for e in elements}
    interp = {e.name: e for e in elements}
    m_set = algebra_model(make_monad("pfin"), sig, bases, interp)
    m_list = algebra_model(make_monad("list"), sig, bases, interp)
    ty = FreeT(BaseT(base))
    corpus = generate_terms(sig, ty, args.depth, args.seed, args.count, consts=consts)
    rep = check_effect_sim(m_set, m_list, corpus, consts=consts, expected=ty)
    lines = [f"{'#':>4}  {'verdict':7}  {'set':16}  list"]
    for row in rep.verdicts:
        lines.append(f"{row['index']:>4}  {row['verdict']:7}  {row['set']:16}  {row['list']}")
    for c in rep.counterexamples:
        lines.append(f"counterexample #{c['index']}: {c['term']} ({c['clause']})")
    lines.append(rep.summary())
    out = {"command": "simulate", "status": rep.verdict}
    out.update(rep.to_json())
    _emit(args, out, "\n".join(lines))
    return PASS if rep.ok else FAIL


def cmd_gen(args) -> int:
    sig, consts = _consts(args, load_signature(args.sig))
    ty = _type_arg(args.type, sig)
    if not isinstance(ty, CompType):
        raise ConfigError("generation targets a computation type")
    terms = [print_term(t) for t in generate_terms(sig, ty, args.depth, args.seed, args.count, consts=consts)]
    _emit(args, {"command": "gen", "status": "pass", "type": print_type(ty), "terms": terms}, "\n".join(terms))
    return PASS


def cmd_lind(args) -> int:
    try:
        obj = lind.load(args.file)
    except ConfigError:
        raise
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load {args.file}: {e}") from None
    except lind.MalformedTable as e:
        raise ConfigError(f"{args.file}: {e}") from None
    out = {"command": "lind check", "file": args.file}
    lines = []
    if isinstance(obj, lind.FinLInd):
        rep = lind.check_lind_axioms(obj)
        out.update({"kind": "lind", "checked": rep.checked, "violations": rep.violations})
        lines.append(rep.summary())
        lines += [json.dumps(v) for v in rep.violations]
        ok = rep.ok
    else:
        reps = {"source": lind.check_lind_axioms(obj.source), "target": lind.check_lind_axioms(obj.target),
                "functor": lind.check_functor(obj)}
        out["kind"] = "functor"
        ok = all(r.ok for r in reps.values())
        for name, r in reps.items():
            out[name] = {"checked": r.checked, "violations": r.violations}
            lines.append(f"{name}: {r.summary()}")
            lines += [f"  {json.dumps(v)}" for v in r.violations]
        if ok:
            fib = lind.check_fibration_property(obj, budget=args.budget)
            out["fibration"] = {"index_arrows_without_lift": fib.index_fibration,
                                "failures": fib.failures, "lifts": len(fib.lifts), "checked": fib.checked}
            lines.append(fib.summary())
            for f in fib.index_fibration:
                lines.append(f"  index arrow without cartesian lift: {f['arrow']} over {f['over']}")
            for f in fib.failures:
                lines.append(f"  no lift for k = {f['k']} : {f['from']} -> P({f['to']})")
            ok = fib.ok
        else:
            lines.append("fibration property not checked: tables violate the axioms")
    out["status"] = "pass" if ok else "fail"
    _emit(args, out, "\n".join(lines))
    return PASS if ok else FAIL


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    p = argparse.ArgumentParser(prog="cbpv", description="CBPV semantics and logical relations workbench")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="typecheck a program")
    c.add_argument("file")
    c.add_argument("--sig")
    c.add_argument("--model", help="model file declaring constants")
    c.add_argument("--type", help="expected type, for otherwise ambiguous programs")
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("eval", parents=[common], help="evaluate a program in a model")
    e.add_argument("file")
    e.add_argument("--model", required=True)
    e.add_argument("--env")
    e.add_argument("--sig")
    e.add_argument("--type")
    e.set_defaults(run=cmd_eval)

    lr = sub.add_parser("logrel", parents=[common], help="check the basic lemma in a glued model")
    lr.add_argument("file", nargs="?")
    lr.add_argument("--glue", required=True)
    lr.add_argument("--corpus")
    lr.add_argument("--sig")
    lr.add_argument("--type")
    lr.add_argument("--count", type=int)
    lr.add_argument("--seed", type=int)
    lr.add_argument("--depth", type=int, default=4)
    lr.add_argument("--budget", type=int, default=100_000)
    lr.set_defaults(run=cmd_logrel)

    s = sub.add_parser("simulate", parents=[common], help="compare set and list semantics of choice")
    s.add_argument("--sig", required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--depth", type=int, default=5)
    s.add_argument("--base")
    s.add_argument("--size", type=int, default=2)
    s.set_defaults(run=cmd_simulate)

    g = sub.add_parser("gen", parents=[common], help="generate closed well-typed terms")
    g.add_argument("--sig", required=True)
    g.add_argument("--type", required=True)
    g.add_argument("--depth", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--model", help="model file declaring constants")
    g.set_defaults(run=cmd_gen)

    ld = sub.add_parser("lind", help="locally indexed categories")
    lsub = ld.add_subparsers(dest="lind_command", required=True)
    lc = lsub.add_parser("check", parents=[common], help="check axioms (and the fibration property of functors)")
    lc.add_argument("file")
    lc.add_argument("--budget", type=int, default=50_000_000)
    lc.set_defaults(run=cmd_lind)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        for attr in ("sig", "model", "env", "glue", "corpus"):
            path = getattr(args, attr, None)
            if path and not os.path.exists(path):
                raise ConfigError(f"no such file: {path}")
        return args.run(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"cbpv: error: {e}", file=sys.stderr)
        return ERROR
    except (ConfigError, BudgetExceeded, NonFiniteError, UnsupportedOperation, UninhabitedError,
            EvalError, lind.MalformedTable) as e:
        if getattr(args, "format", "text") == "json":
            print(json.dumps({"command": args.command, "status": "error", "error": str(e)}, indent=2))
        print(f"cbpv: error: {e}", file=sys.stderr)
        return ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
