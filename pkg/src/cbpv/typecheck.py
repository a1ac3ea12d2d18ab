"""Type inference and checking for values and computations.

Inference is syntax-directed.  The only unknowns are the missing summand of
an ``inl``/``inr``, the result type of an operation (which may be any
computation type), and the domain of an unannotated lambda; these are solved
by first-order unification with an occurs check.  If the type of the whole
term is still unknown after solving, inference fails as ambiguous.  Unknowns
that survive only inside the term (e.g. in a branch that is never taken)
default to ``1`` / ``Top``.

``elaborate`` returns a copy of the term in which every ``To`` and ``Op``
node carries its computation type and every lambda its domain; the
evaluator needs these to pick the right computation object.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .syntax import (
    TOP, UNIT, App, ArrowT, BaseT, Case, Case0, Comp, CompBaseT, CompType, Const,
    CPair, CUnit, EmptyT, Force, FreeT, Fst, Inl, Inr, Lam, Let, Op, Pair, PmPair,
    ProdT, Return, Signature, Snd, SumT, Term, Thunk, ThunkT, To, Type,
    UnitVal, Value, ValueType, Var, WithT, print_type,
)

Context = Sequence[tuple[str, ValueType]]
ConstEnv = Mapping[str, Type]


class CBPVTypeError(Exception):
    pass


class UnboundVariable(CBPVTypeError):
    pass


class TypeMismatch(CBPVTypeError):
    pass


class ArityMismatch(CBPVTypeError):
    pass


class AmbiguousType(CBPVTypeError):
    pass


# ---------------------------------------------------------------- unknowns


@dataclass(frozen=True)
class VMeta(ValueType):
    id: int


@dataclass(frozen=True)
class CMeta(CompType):
    id: int


def _show(t) -> str:
    try:
        return print_type(_ground_or_mark(t))
    except TypeError:
        return repr(t)


def _ground_or_mark(t):
    # print unknowns as base names ?n so messages stay readable
    if isinstance(t, VMeta):
        return BaseT(f"?{t.id}")
    if isinstance(t, CMeta):
        return CompBaseT(f"?{t.id}")
    if isinstance(t, ProdT):
        return ProdT(_ground_or_mark(t.left), _ground_or_mark(t.right))
    if isinstance(t, SumT):
        return SumT(_ground_or_mark(t.left), _ground_or_mark(t.right))
    if isinstance(t, ThunkT):
        return ThunkT(_ground_or_mark(t.comp))
    if isinstance(t, FreeT):
        return FreeT(_ground_or_mark(t.value))
    if isinstance(t, WithT):
        return WithT(_ground_or_mark(t.left), _ground_or_mark(t.right))
    if isinstance(t, ArrowT):
        return ArrowT(_ground_or_mark(t.arg), _ground_or_mark(t.result))
    return t


class _Solver:
    def __init__(self):
        self.sub: dict = {}
        self._ids = itertools.count()

    def vmeta(self) -> VMeta:
        return VMeta(next(self._ids))

    def cmeta(self) -> CMeta:
        return CMeta(next(self._ids))

    def walk(self, t):
        while isinstance(t, (VMeta, CMeta)) and t in self.sub:
            t = self.sub[t]
        return t

    def zonk(self, t):
        t = self.walk(t)
        if isinstance(t, ProdT):
            return ProdT(self.zonk(t.left), self.zonk(t.right))
        if isinstance(t, SumT):
            return SumT(self.zonk(t.left), self.zonk(t.right))
        if isinstance(t, ThunkT):
            return ThunkT(self.zonk(t.comp))
        if isinstance(t, FreeT):
            return FreeT(self.zonk(t.value))
        if isinstance(t, WithT):
            return WithT(self.zonk(t.left), self.zonk(t.right))
        if isinstance(t, ArrowT):
            return ArrowT(self.zonk(t.arg), self.zonk(t.result))
        return t

    def occurs(self, m, t) -> bool:
        t = self.walk(t)
        if t == m:
            return True
        if isinstance(t, (ProdT, SumT)):
            return self.occurs(m, t.left) or self.occurs(m, t.right)
        if isinstance(t, WithT):
            return self.occurs(m, t.left) or self.occurs(m, t.right)
        if isinstance(t, ThunkT):
            return self.occurs(m, t.comp)
        if isinstance(t, FreeT):
            return self.occurs(m, t.value)
        if isinstance(t, ArrowT):
            return self.occurs(m, t.arg) or self.occurs(m, t.result)
        return False

    def unify(self, a, b, what: str = "term"):
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, (VMeta, CMeta)) or isinstance(b, (VMeta, CMeta)):
            m, t = (a, b) if isinstance(a, (VMeta, CMeta)) else (b, a)
            if isinstance(m, VMeta) != isinstance(t, ValueType):
                raise TypeMismatch(f"{what}: sort mismatch between {_show(a)} and {_show(b)}")
            if self.occurs(m, t):
                raise TypeMismatch(f"{what}: cyclic type {_show(m)} ~ {_show(t)}")
            self.sub[m] = t
            return
        if type(a) is not type(b):
            raise TypeMismatch(f"{what}: expected {_show(self.zonk(b))}, found {_show(self.zonk(a))}")
        if isinstance(a, (BaseT, CompBaseT)):
            raise TypeMismatch(f"{what}: expected {b.name}, found {a.name}")
        if isinstance(a, (ProdT, SumT, WithT)):
            self.unify(a.left, b.left, what)
            self.unify(a.right, b.right, what)
        elif isinstance(a, ThunkT):
            self.unify(a.comp, b.comp, what)
        elif isinstance(a, FreeT):
            self.unify(a.value, b.value, what)
        elif isinstance(a, ArrowT):
            self.unify(a.arg, b.arg, what)
            self.unify(a.result, b.result, what)

    def default(self, t):
        t = self.zonk(t)
        if isinstance(t, VMeta):
            return UNIT
        if isinstance(t, CMeta):
            return TOP
        if isinstance(t, ProdT):
            return ProdT(self.default(t.left), self.default(t.right))
        if isinstance(t, SumT):
            return SumT(self.default(t.left), self.default(t.right))
        if isinstance(t, ThunkT):
            return ThunkT(self.default(t.comp))
        if isinstance(t, FreeT):
            return FreeT(self.default(t.value))
        if isinstance(t, WithT):
            return WithT(self.default(t.left), self.default(t.right))
        if isinstance(t, ArrowT):
            return ArrowT(self.default(t.arg), self.default(t.result))
        return t


def is_ground(t) -> bool:
    if isinstance(t, (VMeta, CMeta)):
        return False
    if isinstance(t, (ProdT, SumT, WithT)):
        return is_ground(t.left) and is_ground(t.right)
    if isinstance(t, ThunkT):
        return is_ground(t.comp)
    if isinstance(t, FreeT):
        return is_ground(t.value)
    if isinstance(t, ArrowT):
        return is_ground(t.arg) and is_ground(t.result)
    return True


def check_wf(t: Type, sig: Signature):
    """Raise unless every base name in ``t`` is declared in ``sig``."""
    if isinstance(t, BaseT):
        if t.name not in sig.value_bases:
            raise TypeMismatch(f"unknown value base type {t.name!r}")
    elif isinstance(t, CompBaseT):
        if t.name not in sig.comp_bases:
            raise TypeMismatch(f"unknown computation base type {t.name!r}")
    elif isinstance(t, (ProdT, SumT, WithT)):
        check_wf(t.left, sig)
        check_wf(t.right, sig)
    elif isinstance(t, ThunkT):
        check_wf(t.comp, sig)
    elif isinstance(t, FreeT):
        check_wf(t.value, sig)
    elif isinstance(t, ArrowT):
        check_wf(t.arg, sig)
        check_wf(t.result, sig)


# ---------------------------------------------------------------- inference


class _Infer:
    def __init__(self, env: ConstEnv, sig: Signature):
        self.env = env
        self.sig = sig
        self.s = _Solver()

    def lookup(self, ctx: tuple, name: str):
        for x, a in reversed(ctx):
            if x == name:
                return a
        raise UnboundVariable(f"unbound variable {name!r}")

    def value(self, ctx: tuple, v: Value) -> tuple[ValueType, Value]:
        s = self.s
        if isinstance(v, Var):
            return self.lookup(ctx, v.name), v
        if isinstance(v, Const):
            if v.name not in self.env:
                raise UnboundVariable(f"unknown constant {v.name!r}")
            ty = self.env[v.name]
            if not isinstance(ty, ValueType):
                raise TypeMismatch(f"constant {v.name!r} is a computation, used as a value")
            return ty, v
        if isinstance(v, UnitVal):
            return UNIT, v
        if isinstance(v, Pair):
            a, l = self.value(ctx, v.left)
            b, r = self.value(ctx, v.right)
            return ProdT(a, b), Pair(l, r)
        if isinstance(v, Inl):
            a, w = self.value(ctx, v.value)
            return SumT(a, s.vmeta()), Inl(w)
        if isinstance(v, Inr):
            a, w = self.value(ctx, v.value)
            return SumT(s.vmeta(), a), Inr(w)
        if isinstance(v, Thunk):
            b, m = self.comp(ctx, v.body)
            return ThunkT(b), Thunk(m)
        if isinstance(v, Comp):
            raise TypeMismatch(f"computation used where a value is expected: {type(v).__name__}")
        raise TypeError(f"not a term: {v!r}")

    def comp(self, ctx: tuple, m: Comp) -> tuple[CompType, Comp]:
        s = self.s
        if isinstance(m, Return):
            a, v = self.value(ctx, m.value)
            return FreeT(a), Return(v)
        if isinstance(m, To):
            b1, first = self.comp(ctx, m.first)
            a = s.vmeta()
            s.unify(b1, FreeT(a), "left of 'to'")
            b, then = self.comp(ctx + ((m.var, a),), m.then)
            return b, To(first, m.var, then, b)
        if isinstance(m, Force):
            a, v = self.value(ctx, m.value)
            b = s.cmeta()
            s.unify(a, ThunkT(b), "argument of 'force'")
            return b, Force(v)
        if isinstance(m, Lam):
            if m.ty is not None:
                check_wf(m.ty, self.sig)
            a = m.ty if m.ty is not None else s.vmeta()
            b, body = self.comp(ctx + ((m.var, a),), m.body)
            return ArrowT(a, b), Lam(m.var, body, a)
        if isinstance(m, App):
            bf, fn = self.comp(ctx, m.fn)
            a, arg = self.value(ctx, m.arg)
            b = s.cmeta()
            s.unify(bf, ArrowT(a, b), "application")
            return b, App(fn, arg)
        if isinstance(m, CPair):
            b1, l = self.comp(ctx, m.left)
            b2, r = self.comp(ctx, m.right)
            return WithT(b1, b2), CPair(l, r)
        if isinstance(m, CUnit):
            return TOP, m
        if isinstance(m, (Fst, Snd)):
            b, body = self.comp(ctx, m.body)
            b1, b2 = s.cmeta(), s.cmeta()
            s.unify(b, WithT(b1, b2), "projection")
            return (b1, Fst(body)) if isinstance(m, Fst) else (b2, Snd(body))
        if isinstance(m, PmPair):
            a, v = self.value(ctx, m.value)
            a1, a2 = s.vmeta(), s.vmeta()
            s.unify(a, ProdT(a1, a2), "pattern match")
            b, body = self.comp(ctx + ((m.left, a1), (m.right, a2)), m.body)
            return b, PmPair(v, m.left, m.right, body)
        if isinstance(m, Case):
            a, v = self.value(ctx, m.value)
            a1, a2 = s.vmeta(), s.vmeta()
            s.unify(a, SumT(a1, a2), "case scrutinee")
            b1, lb = self.comp(ctx + ((m.lvar, a1),), m.lbody)
            b2, rb = self.comp(ctx + ((m.rvar, a2),), m.rbody)
            s.unify(b2, b1, "case branches")
            return b1, Case(v, m.lvar, lb, m.rvar, rb)
        if isinstance(m, Case0):
            check_wf(m.ty, self.sig)
            a, v = self.value(ctx, m.value)
            s.unify(a, EmptyT(), "case0 scrutinee")
            return m.ty, Case0(v, m.ty)
        if isinstance(m, Let):
            a, v = self.value(ctx, m.value)
            b, body = self.comp(ctx + ((m.var, a),), m.body)
            return b, Let(m.var, v, body)
        if isinstance(m, Op):
            if not self.sig.has_op(m.name):
                raise UnboundVariable(f"unknown operation {m.name!r}")
            decl = self.sig.op(m.name)
            if len(m.args) != decl.arity:
                raise ArityMismatch(
                    f"operation {m.name!r} expects {decl.arity} argument(s), got {len(m.args)}")
            param = None
            if decl.param is None:
                if m.param is not None:
                    raise ArityMismatch(f"operation {m.name!r} takes no parameter")
            else:
                if m.param is None:
                    raise ArityMismatch(f"operation {m.name!r} requires a parameter")
                pa, param = self.value(ctx, m.param)
                s.unify(pa, decl.param, f"parameter of {m.name!r}")
            b = s.cmeta()
            args = []
            for arg in m.args:
                ba, elab = self.comp(ctx, arg)
                s.unify(ba, b, f"argument of {m.name!r}")
                args.append(elab)
            return b, Op(m.name, param, tuple(args), b)
        if isinstance(m, Const):
            if m.name not in self.env:
                raise UnboundVariable(f"unknown constant {m.name!r}")
            ty = self.env[m.name]
            if not isinstance(ty, CompType):
                raise TypeMismatch(f"constant {m.name!r} is a value, used as a computation")
            return ty, m
        if isinstance(m, Value):
            raise TypeMismatch(f"value used where a computation is expected: {type(m).__name__}")
        raise TypeError(f"not a term: {m!r}")

    # annotations carry unknowns until solving is finished
    def finish(self, t: Term) -> Term:
        f, d = self.finish, self.s.default
        if isinstance(t, (Var, Const, UnitVal, CUnit)):
            return t
        if isinstance(t, Pair):
            return Pair(f(t.left), f(t.right))
        if isinstance(t, Inl):
            return Inl(f(t.value))
        if isinstance(t, Inr):
            return Inr(f(t.value))
        if isinstance(t, Thunk):
            return Thunk(f(t.body))
        if isinstance(t, Return):
            return Return(f(t.value))
        if isinstance(t, To):
            return To(f(t.first), t.var, f(t.then), d(t.ty))
        if isinstance(t, Force):
            return Force(f(t.value))
        if isinstance(t, Lam):
            return Lam(t.var, f(t.body), d(t.ty))
        if isinstance(t, App):
            return App(f(t.fn), f(t.arg))
        if isinstance(t, CPair):
            return CPair(f(t.left), f(t.right))
        if isinstance(t, Fst):
            return Fst(f(t.body))
        if isinstance(t, Snd):
            return Snd(f(t.body))
        if isinstance(t, PmPair):
            return PmPair(f(t.value), t.left, t.right, f(t.body))
        if isinstance(t, Case):
            return Case(f(t.value), t.lvar, f(t.lbody), t.rvar, f(t.rbody))
        if isinstance(t, Case0):
            return Case0(f(t.value), t.ty)
        if isinstance(t, Let):
            return Let(t.var, f(t.value), f(t.body))
        if isinstance(t, Op):
            param = None if t.param is None else f(t.param)
            return Op(t.name, param, tuple(f(a) for a in t.args), d(t.ty))
        raise TypeError(f"not a term: {t!r}")


def _ctx(ctx: Union[Context, Mapping[str, ValueType], None]) -> tuple:
    if ctx is None:
        return ()
    if isinstance(ctx, Mapping):
        return tuple(ctx.items())
    return tuple(ctx)


def _run(ctx, t: Term, env: Optional[ConstEnv], sig: Signature, expected, value: bool):
    inf = _Infer(env or {}, sig)
    c = _ctx(ctx)
    for _, a in c:
        check_wf(a, sig)
    if expected is not None:
        check_wf(expected, sig)
    ty, elab = inf.value(c, t) if value else inf.comp(c, t)
    if expected is not None:
        inf.s.unify(ty, expected, "term")
    ty = inf.s.zonk(ty)
    if not is_ground(ty):
        raise AmbiguousType(f"type of term is not determined: {_show(ty)}; add annotations")
    return ty, inf.finish(elab)


def infer_value(ctx: Optional[Context], v: Value, env: Optional[ConstEnv] = None,
                sig: Signature = Signature()) -> ValueType:
    return _run(ctx, v, env, sig, None, value=True)[0]


def infer_comp(ctx: Optional[Context], m: Comp, env: Optional[ConstEnv] = None,
               sig: Signature = Signature()) -> CompType:
    return _run(ctx, m, env, sig, None, value=False)[0]


def check_value(ctx: Optional[Context], v: Value, ty: ValueType,
                env: Optional[ConstEnv] = None, sig: Signature = Signature()) -> None:
    _run(ctx, v, env, sig, ty, value=True)


def check_comp(ctx: Optional[Context], m: Comp, ty: CompType,
               env: Optional[ConstEnv] = None, sig: Signature = Signature()) -> None:
    _run(ctx, m, env, sig, ty, value=False)


def elaborate(m: Term, ctx: Optional[Context] = None, env: Optional[ConstEnv] = None,
              sig: Signature = Signature(), expected: Optional[Type] = None) -> tuple[Type, Term]:
    """Typecheck ``m`` and return ``(type, annotated copy)``."""
    value = isinstance(m, Value) and not (isinstance(m, Const) and isinstance((env or {}).get(m.name), CompType))
    return _run(ctx, m, env, sig, expected, value=value)


def typechecks(m: Comp, ty: CompType, ctx: Optional[Context] = None,
               env: Optional[ConstEnv] = None, sig: Signature = Signature()) -> bool:
    try:
        check_comp(ctx, m, ty, env, sig)
    except CBPVTypeError:
        return False
    return True


def const_types(items: Iterable[tuple[str, Type]]) -> dict[str, Type]:
    out: dict[str, Type] = {}
    for name, ty in items:
        if name in out:
            raise ValueError(f"constant {name!r} declared twice")
        out[name] = ty
    return out
