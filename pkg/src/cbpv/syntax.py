"""CBPV abstract syntax, concrete grammar, parser and printer.

Value types::

    A ::= beta | 1 | A * A | 0 | A + A | U B

Computation types::

    B ::= kappa | F A | Top | B & B | A -> B

Terms are split into values and computations.  ``Const`` is shared by both
sorts: whether a constant is a value or a computation is decided by the
constant environment it is typed against.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union


# ---------------------------------------------------------------- types


class ValueType:
    __slots__ = ()


class CompType:
    __slots__ = ()


@dataclass(frozen=True)
class BaseT(ValueType):
    name: str


@dataclass(frozen=True)
class UnitT(ValueType):
    pass


@dataclass(frozen=True)
class ProdT(ValueType):
    left: ValueType
    right: ValueType


@dataclass(frozen=True)
class EmptyT(ValueType):
    pass


@dataclass(frozen=True)
class SumT(ValueType):
    left: ValueType
    right: ValueType


@dataclass(frozen=True)
class ThunkT(ValueType):
    comp: CompType


@dataclass(frozen=True)
class CompBaseT(CompType):
    name: str


@dataclass(frozen=True)
class FreeT(CompType):
    value: ValueType


@dataclass(frozen=True)
class TopT(CompType):
    pass


@dataclass(frozen=True)
class WithT(CompType):
    left: CompType
    right: CompType


@dataclass(frozen=True)
class ArrowT(CompType):
    arg: ValueType
    result: CompType


Type = Union[ValueType, CompType]

UNIT = UnitT()
EMPTY = EmptyT()
TOP = TopT()
BOOL = SumT(UNIT, UNIT)


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class OpDecl:
    name: str
    arity: int
    param: Optional[ValueType] = None


@dataclass(frozen=True)
class Signature:
    value_bases: tuple[str, ...] = ()
    comp_bases: tuple[str, ...] = ()
    operations: tuple[OpDecl, ...] = ()

    def __post_init__(self):
        for label, names in (("value base", self.value_bases),
                             ("computation base", self.comp_bases),
                             ("operation", [o.name for o in self.operations])):
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate {label} name in signature")
        for op in self.operations:
            if op.arity < 0:
                raise ValueError(f"operation {op.name} has negative arity")
        clash = set(self.value_bases) & set(self.comp_bases)
        if clash:
            raise ValueError(f"names used as both value and computation bases: {sorted(clash)}")

    def op(self, name: str) -> OpDecl:
        for o in self.operations:
            if o.name == name:
                return o
        raise KeyError(name)

    def has_op(self, name: str) -> bool:
        return any(o.name == name for o in self.operations)

    @classmethod
    def build(cls, value_bases: Iterable[str] = (), comp_bases: Iterable[str] = (),
              ops: Iterable = ()) -> "Signature":
        """Convenience constructor; ``ops`` holds ``OpDecl``s or ``(name, arity)`` pairs."""
        decls = tuple(o if isinstance(o, OpDecl) else OpDecl(*o) for o in ops)
        return cls(tuple(value_bases), tuple(comp_bases), decls)

    @classmethod
    def from_json(cls, doc: dict) -> "Signature":
        vb = tuple(doc.get("value_bases", ()))
        cb = tuple(doc.get("comp_bases", ()))
        bare = cls(vb, cb, ())
        ops = []
        for entry in doc.get("operations", ()):
            param = entry.get("param")
            ptype = parse_vtype(param, bare) if param is not None else None
            ops.append(OpDecl(entry["name"], int(entry["arity"]), ptype))
        return cls(vb, cb, tuple(ops))

    def to_json(self) -> dict:
        return {
            "value_bases": list(self.value_bases),
            "comp_bases": list(self.comp_bases),
            "operations": [
                {"name": o.name, "arity": o.arity,
                 "param": None if o.param is None else print_type(o.param)}
                for o in self.operations
            ],
        }


# ---------------------------------------------------------------- terms


class Term:
    __slots__ = ()


class Value(Term):
    __slots__ = ()


class Comp(Term):
    __slots__ = ()


@dataclass(frozen=True)
class Var(Value):
    name: str


@dataclass(frozen=True)
class UnitVal(Value):
    pass


@dataclass(frozen=True)
class Pair(Value):
    left: Value
    right: Value


@dataclass(frozen=True)
class Inl(Value):
    value: Value


@dataclass(frozen=True)
class Inr(Value):
    value: Value


@dataclass(frozen=True)
class Thunk(Value):
    body: Comp


@dataclass(frozen=True)
class Const(Value, Comp):
    name: str


@dataclass(frozen=True)
class Return(Comp):
    value: Value


@dataclass(frozen=True)
class To(Comp):
    first: Comp
    var: str
    then: Comp
    # result type filled in by elaboration; ignored by equality
    ty: Optional[CompType] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Force(Comp):
    value: Value


@dataclass(frozen=True)
class Lam(Comp):
    var: str
    body: Comp
    ty: Optional[ValueType] = None


@dataclass(frozen=True)
class App(Comp):
    fn: Comp
    arg: Value


@dataclass(frozen=True)
class CPair(Comp):
    left: Comp
    right: Comp


@dataclass(frozen=True)
class CUnit(Comp):
    """The unique computation of type Top."""


@dataclass(frozen=True)
class Fst(Comp):
    body: Comp


@dataclass(frozen=True)
class Snd(Comp):
    body: Comp


@dataclass(frozen=True)
class PmPair(Comp):
    value: Value
    left: str
    right: str
    body: Comp


@dataclass(frozen=True)
class Case(Comp):
    value: Value
    lvar: str
    lbody: Comp
    rvar: str
    rbody: Comp


@dataclass(frozen=True)
class Case0(Comp):
    value: Value
    ty: CompType


@dataclass(frozen=True)
class Let(Comp):
    var: str
    value: Value
    body: Comp


@dataclass(frozen=True)
class Op(Comp):
    name: str
    param: Optional[Value]
    args: tuple[Comp, ...]
    ty: Optional[CompType] = field(default=None, compare=False, repr=False)


UNIT_VAL = UnitVal()
TT = Inl(UNIT_VAL)
FF = Inr(UNIT_VAL)


def is_value(t: Term) -> bool:
    return isinstance(t, Value)


def is_comp(t: Term) -> bool:
    return isinstance(t, Comp)


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (Var, UnitVal, Const, CUnit)):
        return ()
    if isinstance(t, (Pair, CPair)):
        return (t.left, t.right)
    if isinstance(t, (Inl, Inr, Return, Force)):
        return (t.value,)
    if isinstance(t, Thunk):
        return (t.body,)
    if isinstance(t, To):
        return (t.first, t.then)
    if isinstance(t, (Lam, Fst, Snd)):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, PmPair):
        return (t.value, t.body)
    if isinstance(t, Case):
        return (t.value, t.lbody, t.rbody)
    if isinstance(t, Case0):
        return (t.value,)
    if isinstance(t, Let):
        return (t.value, t.body)
    if isinstance(t, Op):
        return ((t.param,) if t.param is not None else ()) + t.args
    raise TypeError(f"not a term: {t!r}")


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in children(t))


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, (To,)):
        return free_vars(t.first) | (free_vars(t.then) - {t.var})
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, PmPair):
        return free_vars(t.value) | (free_vars(t.body) - {t.left, t.right})
    if isinstance(t, Case):
        return (free_vars(t.value) | (free_vars(t.lbody) - {t.lvar})
                | (free_vars(t.rbody) - {t.rvar}))
    if isinstance(t, Let):
        return free_vars(t.value) | (free_vars(t.body) - {t.var})
    out: frozenset[str] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


# ---------------------------------------------------------------- alpha-equivalence


def debruijn(t: Term, scope: tuple[str, ...] = ()) -> tuple:
    """Nameless form of ``t``; bound variables become indices, free ones keep names."""
    def var(name):
        for i, bound in enumerate(reversed(scope)):
            if bound == name:
                return ("#", i)
        return ("free", name)

    d = debruijn
    if isinstance(t, Var):
        return var(t.name)
    if isinstance(t, UnitVal):
        return ("unit",)
    if isinstance(t, Const):
        return ("const", t.name)
    if isinstance(t, Pair):
        return ("pair", d(t.left, scope), d(t.right, scope))
    if isinstance(t, Inl):
        return ("inl", d(t.value, scope))
    if isinstance(t, Inr):
        return ("inr", d(t.value, scope))
    if isinstance(t, Thunk):
        return ("thunk", d(t.body, scope))
    if isinstance(t, Return):
        return ("return", d(t.value, scope))
    if isinstance(t, To):
        return ("to", d(t.first, scope), d(t.then, scope + (t.var,)))
    if isinstance(t, Force):
        return ("force", d(t.value, scope))
    if isinstance(t, Lam):
        return ("lam", t.ty, d(t.body, scope + (t.var,)))
    if isinstance(t, App):
        return ("app", d(t.fn, scope), d(t.arg, scope))
    if isinstance(t, CPair):
        return ("cpair", d(t.left, scope), d(t.right, scope))
    if isinstance(t, CUnit):
        return ("cunit",)
    if isinstance(t, Fst):
        return ("fst", d(t.body, scope))
    if isinstance(t, Snd):
        return ("snd", d(t.body, scope))
    if isinstance(t, PmPair):
        return ("pm", d(t.value, scope), d(t.body, scope + (t.left, t.right)))
    if isinstance(t, Case):
        return ("case", d(t.value, scope), d(t.lbody, scope + (t.lvar,)),
                d(t.rbody, scope + (t.rvar,)))
    if isinstance(t, Case0):
        return ("case0", d(t.value, scope), t.ty)
    if isinstance(t, Let):
        return ("let", d(t.value, scope), d(t.body, scope + (t.var,)))
    if isinstance(t, Op):
        param = None if t.param is None else d(t.param, scope)
        return ("op", t.name, param, tuple(d(a, scope) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: Term, b: Term) -> bool:
    return debruijn(a) == debruijn(b)


# ---------------------------------------------------------------- substitution


def fresh_name(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789'") or "v"
    i = 0
    while True:
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
        i += 1


def substitute(t: Term, name: str, v: Value) -> Term:
    """Capture-avoiding ``t[v/name]``.  Only used by test oracles."""
    fv = free_vars(v)

    def binder(x: str, body: Term, other: Iterable[str] = ()) -> tuple[str, Term]:
        if x == name:
            return x, body
        if x in fv:
            y = fresh_name(x, set(fv) | set(free_vars(body)) | {name} | set(other))
            body = substitute(body, x, Var(y))
            x = y
        return x, substitute(body, name, v)

    s = lambda u: substitute(u, name, v)  # noqa: E731
    if isinstance(t, Var):
        return v if t.name == name else t
    if isinstance(t, (UnitVal, Const, CUnit)):
        return t
    if isinstance(t, Pair):
        return Pair(s(t.left), s(t.right))
    if isinstance(t, Inl):
        return Inl(s(t.value))
    if isinstance(t, Inr):
        return Inr(s(t.value))
    if isinstance(t, Thunk):
        return Thunk(s(t.body))
    if isinstance(t, Return):
        return Return(s(t.value))
    if isinstance(t, Force):
        return Force(s(t.value))
    if isinstance(t, To):
        x, body = binder(t.var, t.then)
        return To(s(t.first), x, body, t.ty)
    if isinstance(t, Lam):
        x, body = binder(t.var, t.body)
        return Lam(x, body, t.ty)
    if isinstance(t, App):
        return App(s(t.fn), s(t.arg))
    if isinstance(t, CPair):
        return CPair(s(t.left), s(t.right))
    if isinstance(t, Fst):
        return Fst(s(t.body))
    if isinstance(t, Snd):
        return Snd(s(t.body))
    if isinstance(t, PmPair):
        if name in (t.left, t.right):
            return PmPair(s(t.value), t.left, t.right, t.body)
        left, right, body = t.left, t.right, t.body
        if left in fv:
            new = fresh_name(left, set(fv) | set(free_vars(body)) | {name, right})
            body, left = substitute(body, left, Var(new)), new
        if right in fv:
            new = fresh_name(right, set(fv) | set(free_vars(body)) | {name, left})
            body, right = substitute(body, right, Var(new)), new
        return PmPair(s(t.value), left, right, s(body))
    if isinstance(t, Case):
        lx, lb = binder(t.lvar, t.lbody)
        rx, rb = binder(t.rvar, t.rbody)
        return Case(s(t.value), lx, lb, rx, rb)
    if isinstance(t, Case0):
        return Case0(s(t.value), t.ty)
    if isinstance(t, Let):
        x, body = binder(t.var, t.body)
        return Let(x, s(t.value), body)
    if isinstance(t, Op):
        param = None if t.param is None else s(t.param)
        return Op(t.name, param, tuple(s(a) for a in t.args), t.ty)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------- printing


def print_type(ty: Type) -> str:
    if isinstance(ty, ValueType):
        return _pv_sum(ty)
    return _pc_arrow(ty)


def _pv_sum(a: ValueType) -> str:
    if isinstance(a, SumT):
        return f"{_pv_prod(a.left)} + {_pv_sum(a.right)}"
    return _pv_prod(a)


def _pv_prod(a: ValueType) -> str:
    if isinstance(a, ProdT):
        return f"{_pv_atom(a.left)} * {_pv_prod(a.right)}"
    return _pv_atom(a)


def _pv_atom(a: ValueType) -> str:
    if isinstance(a, BaseT):
        return a.name
    if isinstance(a, UnitT):
        return "1"
    if isinstance(a, EmptyT):
        return "0"
    if isinstance(a, ThunkT):
        return f"U {_pc_atom(a.comp)}"
    if isinstance(a, (SumT, ProdT)):
        return f"({_pv_sum(a)})"
    raise TypeError(f"not a value type: {a!r}")


def _pc_arrow(b: CompType) -> str:
    if isinstance(b, ArrowT):
        return f"{_pv_sum(b.arg)} -> {_pc_arrow(b.result)}"
    return _pc_with(b)


def _pc_with(b: CompType) -> str:
    if isinstance(b, WithT):
        return f"{_pc_atom(b.left)} & {_pc_with(b.right)}"
    return _pc_atom(b)


def _pc_atom(b: CompType) -> str:
    if isinstance(b, CompBaseT):
        return b.name
    if isinstance(b, FreeT):
        return f"F {_pv_atom(b.value)}"
    if isinstance(b, TopT):
        return "Top"
    if isinstance(b, (WithT, ArrowT)):
        return f"({_pc_arrow(b)})"
    raise TypeError(f"not a computation type: {b!r}")


def print_term(t: Term) -> str:
    if isinstance(t, Value) and not isinstance(t, Const):
        return _p_value(t)
    return _p_comp(t)


def _p_value(v: Value) -> str:
    if isinstance(v, Inl):
        return f"inl {_p_avalue(v.value)}"
    if isinstance(v, Inr):
        return f"inr {_p_avalue(v.value)}"
    if isinstance(v, Thunk):
        return f"thunk {_p_catom(v.body)}"
    return _p_avalue(v)


def _p_avalue(v: Value) -> str:
    if isinstance(v, (Var, Const)):
        return v.name
    if isinstance(v, UnitVal):
        return "()"
    if isinstance(v, Pair):
        return f"({_p_value(v.left)}, {_p_value(v.right)})"
    if isinstance(v, (Inl, Inr, Thunk)):
        return f"({_p_value(v)})"
    raise TypeError(f"not a value: {v!r}")


def _p_comp(m: Comp) -> str:
    if isinstance(m, Lam):
        ann = "" if m.ty is None else f": {print_type(m.ty)}"
        return f"\\{m.var}{ann}. {_p_comp(m.body)}"
    if isinstance(m, To):
        return f"{_p_app(m.first)} to {m.var}. {_p_comp(m.then)}"
    if isinstance(m, Case):
        return (f"case {_p_value(m.value)} of {{ inl {m.lvar}. {_p_comp(m.lbody)} "
                f"| inr {m.rvar}. {_p_comp(m.rbody)} }}")
    if isinstance(m, Case0):
        return f"case0 {_p_value(m.value)} : {print_type(m.ty)}"
    if isinstance(m, PmPair):
        return f"pm {_p_value(m.value)} as ({m.left}, {m.right}). {_p_comp(m.body)}"
    if isinstance(m, Let):
        return f"let {m.var} = {_p_value(m.value)} in {_p_comp(m.body)}"
    return _p_app(m)


def _p_app(m: Comp) -> str:
    if isinstance(m, App):
        return f"{_p_app(m.fn)} {_p_avalue(m.arg)}"
    return _p_catom(m)


def _p_catom(m: Comp) -> str:
    if isinstance(m, Return):
        return f"return {_p_value(m.value)}"
    if isinstance(m, Force):
        return f"force {_p_value(m.value)}"
    if isinstance(m, Fst):
        return f"fst {_p_catom(m.body)}"
    if isinstance(m, Snd):
        return f"snd {_p_catom(m.body)}"
    if isinstance(m, CPair):
        return f"<{_p_comp(m.left)}, {_p_comp(m.right)}>"
    if isinstance(m, CUnit):
        return "<>"
    if isinstance(m, Const):
        return m.name
    if isinstance(m, Op):
        param = "" if m.param is None else f"[{_p_value(m.param)}]"
        return f"{m.name}{param}({'; '.join(_p_comp(a) for a in m.args)})"
    return f"({_p_comp(m)})"


# ---------------------------------------------------------------- lexing


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class LexError(ParseError):
    pass


class GrammarError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


KEYWORDS = frozenset({
    "return", "to", "force", "thunk", "inl", "inr", "case", "of", "case0",
    "pm", "as", "let", "in", "fst", "snd", "U", "F", "Top",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<cunit><>)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[01])
  | (?P<lam>[\\λ])
  | (?P<sym>[().,;:<>{}\[\]|=*+&])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "name" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, text: str, sig: Signature, consts: Optional[Iterable[str]] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.consts = None if consts is None else frozenset(consts)
        self.scope: list[str] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise GrammarError(message, tok.line, tok.col)

    def ident(self) -> str:
        if self.tok.kind != "name":
            self.fail(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r} after end of term")

    # types
    def vtype(self) -> ValueType:
        left = self.vprod()
        if self.at("+"):
            self.advance()
            return SumT(left, self.vtype())
        return left

    def vprod(self) -> ValueType:
        left = self.vatom()
        if self.at("*"):
            self.advance()
            return ProdT(left, self.vprod())
        return left

    def vatom(self) -> ValueType:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return UNIT if t.text == "1" else EMPTY
        if t.text == "U" and t.kind == "kw":
            self.advance()
            return ThunkT(self.catom_type())
        if t.text == "(":
            self.advance()
            a = self.vtype()
            self.expect(")")
            return a
        if t.kind == "name":
            if t.text not in self.sig.value_bases:
                raise UnknownIdentifier(f"unknown value base type {t.text!r}", t.line, t.col)
            self.advance()
            return BaseT(t.text)
        self.fail(f"expected a value type, found {t.text or 'end of input'!r}")

    def ctype(self) -> CompType:
        save = self.i
        try:
            a = self.vtype()
            if self.at("->"):
                self.advance()
                return ArrowT(a, self.ctype())
        except ParseError:
            pass
        self.i = save
        left = self.catom_type()
        if self.at("&"):
            self.advance()
            return WithT(left, self._with_rest())
        if self.at("->"):
            self.fail("the argument of '->' must be a value type")
        return left

    def _with_rest(self) -> CompType:
        left = self.catom_type()
        if self.at("&"):
            self.advance()
            return WithT(left, self._with_rest())
        return left

    def catom_type(self) -> CompType:
        t = self.tok
        if t.text == "F" and t.kind == "kw":
            self.advance()
            return FreeT(self.vatom())
        if t.text == "Top" and t.kind == "kw":
            self.advance()
            return TOP
        if t.text == "(":
            self.advance()
            b = self.ctype()
            self.expect(")")
            return b
        if t.kind == "name":
            if t.text not in self.sig.comp_bases:
                raise UnknownIdentifier(f"unknown computation base type {t.text!r}", t.line, t.col)
            self.advance()
            return CompBaseT(t.text)
        self.fail(f"expected a computation type, found {t.text or 'end of input'!r}")

    # binders
    def bind(self, *names: str):
        self.scope.extend(names)

    def unbind(self, n: int):
        del self.scope[len(self.scope) - n:]

    # values
    def value(self) -> Value:
        if self.at("inl"):
            self.advance()
            return Inl(self.avalue())
        if self.at("inr"):
            self.advance()
            return Inr(self.avalue())
        if self.at("thunk"):
            self.advance()
            return Thunk(self.catom())
        return self.avalue()

    def starts_avalue(self) -> bool:
        t = self.tok
        if t.text == "(":
            return True
        return t.kind == "name" and not self.sig.has_op(t.text)

    def avalue(self) -> Value:
        t = self.tok
        if t.text == "(":
            self.advance()
            if self.at(")"):
                self.advance()
                return UNIT_VAL
            v = self.value()
            if self.at(","):
                self.advance()
                w = self.value()
                self.expect(")")
                return Pair(v, w)
            self.expect(")")
            return v
        if t.kind == "name":
            self.advance()
            if t.text in self.scope:
                return Var(t.text)
            if self.sig.has_op(t.text):
                self.fail(f"operation {t.text!r} used as a value", t)
            self._check_const(t)
            return Const(t.text)
        self.fail(f"expected a value, found {t.text or 'end of input'!r}")

    def _check_const(self, t: Token):
        if self.consts is not None and t.text not in self.consts:
            raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.line, t.col)

    # computations
    def comp(self) -> Comp:
        t = self.tok
        if t.kind == "lam":
            self.advance()
            x = self.ident()
            ty = None
            if self.at(":"):
                self.advance()
                ty = self.vtype()
            self.expect(".")
            self.bind(x)
            body = self.comp()
            self.unbind(1)
            return Lam(x, body, ty)
        if self.at("case"):
            self.advance()
            v = self.value()
            self.expect("of")
            self.expect("{")
            self.expect("inl")
            lx = self.ident()
            self.expect(".")
            self.bind(lx)
            lb = self.comp()
            self.unbind(1)
            self.expect("|")
            self.expect("inr")
            rx = self.ident()
            self.expect(".")
            self.bind(rx)
            rb = self.comp()
            self.unbind(1)
            self.expect("}")
            return Case(v, lx, lb, rx, rb)
        if self.at("case0"):
            self.advance()
            v = self.value()
            self.expect(":")
            return Case0(v, self.ctype())
        if self.at("pm"):
            self.advance()
            v = self.value()
            self.expect("as")
            self.expect("(")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            self.expect(")")
            self.expect(".")
            self.bind(x, y)
            body = self.comp()
            self.unbind(2)
            return PmPair(v, x, y, body)
        if self.at("let"):
            self.advance()
            x = self.ident()
            self.expect("=")
            v = self.value()
            self.expect("in")
            self.bind(x)
            body = self.comp()
            self.unbind(1)
            return Let(x, v, body)
        m = self.app()
        if self.at("to"):
            self.advance()
            x = self.ident()
            self.expect(".")
            self.bind(x)
            n = self.comp()
            self.unbind(1)
            return To(m, x, n)
        return m

    def app(self) -> Comp:
        m = self.catom()
        while self.starts_avalue():
            m = App(m, self.avalue())
        return m

    def catom(self) -> Comp:
        t = self.tok
        if self.at("return"):
            self.advance()
            return Return(self.value())
        if self.at("force"):
            self.advance()
            return Force(self.value())
        if self.at("fst"):
            self.advance()
            return Fst(self.catom())
        if self.at("snd"):
            self.advance()
            return Snd(self.catom())
        if t.kind == "cunit":
            self.advance()
            return CUnit()
        if self.at("<"):
            self.advance()
            left = self.comp()
            self.expect(",")
            right = self.comp()
            self.expect(">")
            return CPair(left, right)
        if self.at("("):
            self.advance()
            m = self.comp()
            self.expect(")")
            return m
        if t.kind == "name":
            if self.sig.has_op(t.text):
                return self.op_call()
            if t.text in self.scope:
                self.fail(f"variable {t.text!r} is a value; use 'force {t.text}'")
            self.advance()
            self._check_const(t)
            return Const(t.text)
        self.fail(f"expected a computation, found {t.text or 'end of input'!r}")

    def op_call(self) -> Comp:
        t = self.advance()
        decl = self.sig.op(t.text)
        param = None
        if self.at("["):
            self.advance()
            param = self.value()
            self.expect("]")
        args: list[Comp] = []
        if self.at("("):
            self.advance()
            if not self.at(")"):
                args.append(self.comp())
                while self.at(";"):
                    self.advance()
                    args.append(self.comp())
            self.expect(")")
        if len(args) != decl.arity:
            self.fail(f"operation {t.text!r} expects {decl.arity} argument(s), got {len(args)}", t)
        return Op(t.text, param, tuple(args))


def parse_program(text: str, sig: Signature, consts: Optional[Iterable[str]] = None,
                  scope: Sequence[str] = ()) -> Term:
    """Parse a computation; ``consts`` (if given) restricts free identifiers.

    Names in ``scope`` parse as variables (for open programs).
    """
    p = _Parser(text, sig, consts)
    p.scope.extend(scope)
    m = p.comp()
    p.done()
    return m


def parse_value(text: str, sig: Signature, consts: Optional[Iterable[str]] = None,
                scope: Sequence[str] = ()) -> Value:
    p = _Parser(text, sig, consts)
    p.scope.extend(scope)
    v = p.value()
    p.done()
    return v


def parse_vtype(text: str, sig: Signature) -> ValueType:
    p = _Parser(text, sig)
    a = p.vtype()
    p.done()
    return a


def parse_ctype(text: str, sig: Signature) -> CompType:
    p = _Parser(text, sig)
    b = p.ctype()
    p.done()
    return b


def parse_type(text: str, sig: Signature) -> Type:
    """Parse either sort of type, preferring a computation type on ambiguity-free input."""
    try:
        return parse_ctype(text, sig)
    except ParseError:
        return parse_vtype(text, sig)
