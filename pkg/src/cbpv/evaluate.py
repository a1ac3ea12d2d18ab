"""Denotational interpreter for elaborated CBPV terms.

``eval_comp`` expects the annotations that ``typecheck.elaborate`` fills in
(``To.ty``, ``Op.ty`` and lambda argument types); ``evaluate`` does the
elaboration itself.  Thunks and forces are identities on denotations.
"""
from __future__ import annotations

from typing import Any, Mapping, Optional

from .semantics import (EMPTY_SET, UNIT_SET, UNIT_V, CompObject, FunV, InlV, InrV, Model,
                        PairV, ProductModel, ProductObject, ProductSet, SemSet, SumSet)
from .syntax import (App, ArrowT, BaseT, Case, Case0, CompBaseT, CompType, Const, CPair, CUnit,
                     EmptyT, Force, FreeT, Fst, Inl, Inr, Lam, Let, Op, Pair, PmPair, ProdT,
                     Return, Snd, SumT, Term, Thunk, ThunkT, To, TopT, UnitT, UnitVal, ValueType,
                     Var, WithT)
from . import typecheck


class EvalError(Exception):
    pass


def _cache(model: Model, name: str) -> dict:
    c = model.__dict__.get(name)
    if c is None:
        c = {}
        model.__dict__[name] = c
    return c


def interp_vtype(model: Model, a: ValueType) -> SemSet:
    cache = _cache(model, "_vtype_cache")
    if a in cache:
        return cache[a]
    if isinstance(model, ProductModel):
        r = ProductSet(interp_vtype(model.left, a), interp_vtype(model.right, a))
    elif isinstance(a, BaseT):
        try:
            r = model.base_vtype[a.name]
        except KeyError:
            raise EvalError(f"model has no interpretation for base type {a.name!r}") from None
    elif isinstance(a, UnitT):
        r = UNIT_SET
    elif isinstance(a, EmptyT):
        r = EMPTY_SET
    elif isinstance(a, ProdT):
        r = ProductSet(interp_vtype(model, a.left), interp_vtype(model, a.right))
    elif isinstance(a, SumT):
        r = SumSet(interp_vtype(model, a.left), interp_vtype(model, a.right))
    elif isinstance(a, ThunkT):
        r = interp_ctype(model, a.comp).carrier
    else:
        raise EvalError(f"not a value type: {a!r}")
    cache[a] = r
    return r


def interp_ctype(model: Model, b: CompType) -> CompObject:
    cache = _cache(model, "_ctype_cache")
    if b in cache:
        return cache[b]
    if isinstance(model, ProductModel):
        r = ProductObject(interp_ctype(model.left, b), interp_ctype(model.right, b))
    elif isinstance(b, CompBaseT):
        try:
            r = model.base_ctype[b.name]
        except KeyError:
            raise EvalError(f"model has no interpretation for computation base type {b.name!r}") from None
    elif isinstance(b, FreeT):
        r = model.free_obj(interp_vtype(model, b.value))
    elif isinstance(b, TopT):
        r = model.top_obj
    elif isinstance(b, WithT):
        r = model.with_obj(interp_ctype(model, b.left), interp_ctype(model, b.right))
    elif isinstance(b, ArrowT):
        r = model.power_obj(interp_vtype(model, b.arg), interp_ctype(model, b.result))
    else:
        raise EvalError(f"not a computation type: {b!r}")
    cache[b] = r
    return r


def _split_env(env: Mapping[str, Any]):
    left, right = {}, {}
    for k, v in env.items():
        if not isinstance(v, PairV):
            raise EvalError(f"product-model environment entry {k!r} is not a pair")
        left[k], right[k] = v.fst, v.snd
    return left, right


def eval_value(model: Model, env: Mapping[str, Any], v: Term):
    if isinstance(model, ProductModel):
        l, r = _split_env(env)
        return PairV(eval_value(model.left, l, v), eval_value(model.right, r, v))
    return _Evaluator(model).value(dict(env), v)


def eval_comp(model: Model, env: Mapping[str, Any], m: Term):
    if isinstance(model, ProductModel):
        l, r = _split_env(env)
        return PairV(eval_comp(model.left, l, m), eval_comp(model.right, r, m))
    return _Evaluator(model).comp(dict(env), m)


class _Evaluator:
    def __init__(self, model: Model):
        self.model = model

    def const(self, name):
        try:
            return self.model.const_interp[name]
        except KeyError:
            raise EvalError(f"model has no interpretation for constant {name!r}") from None

    def value(self, env, v):
        if isinstance(v, Var):
            try:
                return env[v.name]
            except KeyError:
                raise EvalError(f"unbound variable {v.name!r}") from None
        if isinstance(v, UnitVal):
            return UNIT_V
        if isinstance(v, Pair):
            return PairV(self.value(env, v.left), self.value(env, v.right))
        if isinstance(v, Inl):
            return InlV(self.value(env, v.value))
        if isinstance(v, Inr):
            return InrV(self.value(env, v.value))
        if isinstance(v, Thunk):
            return self.comp(env, v.body)
        if isinstance(v, Const):
            return self.const(v.name)
        raise EvalError(f"not a value term: {v!r}")

    def comp(self, env, m):
        model = self.model
        if isinstance(m, Return):
            return model.monad.unit(self.value(env, m.value))
        if isinstance(m, To):
            if m.ty is None:
                raise EvalError("sequencing without a result type; elaborate the term first")
            first = self.comp(env, m.first)
            obj = interp_ctype(model, m.ty)
            return obj.extend(first, lambda x: self.comp({**env, m.var: x}, m.then))
        if isinstance(m, Force):
            return self.value(env, m.value)
        if isinstance(m, Lam):
            if m.ty is None:
                raise EvalError(f"lambda {m.var!r} has no argument type; elaborate the term first")
            dom = interp_vtype(model, m.ty)
            return FunV(dom, lambda x: self.comp({**env, m.var: x}, m.body))
        if isinstance(m, App):
            f = self.comp(env, m.fn)
            return f(self.value(env, m.arg))
        if isinstance(m, CPair):
            return PairV(self.comp(env, m.left), self.comp(env, m.right))
        if isinstance(m, CUnit):
            return UNIT_V
        if isinstance(m, Fst):
            return self.comp(env, m.body).fst
        if isinstance(m, Snd):
            return self.comp(env, m.body).snd
        if isinstance(m, PmPair):
            p = self.value(env, m.value)
            if not isinstance(p, PairV):
                raise EvalError("pattern match on a non-pair")
            return self.comp({**env, m.left: p.fst, m.right: p.snd}, m.body)
        if isinstance(m, Case):
            s = self.value(env, m.value)
            if isinstance(s, InlV):
                return self.comp({**env, m.lvar: s.value}, m.lbody)
            if isinstance(s, InrV):
                return self.comp({**env, m.rvar: s.value}, m.rbody)
            raise EvalError("case on a non-injection")
        if isinstance(m, Case0):
            raise EvalError("case0 reached: the empty type has no elements")
        if isinstance(m, Let):
            return self.comp({**env, m.var: self.value(env, m.value)}, m.body)
        if isinstance(m, Op):
            if m.ty is None:
                raise EvalError(f"operation {m.name!r} without a result type; elaborate the term first")
            param = None if m.param is None else self.value(env, m.param)
            args = [self.comp(env, a) for a in m.args]
            return interp_ctype(model, m.ty).op(m.name, param, args)
        if isinstance(m, Const):
            return self.const(m.name)
        raise EvalError(f"not a computation term: {m!r}")


def evaluate(model: Model, term: Term, env: Optional[Mapping[str, Any]] = None,
             ctx=None, consts=None, expected=None):
    """Elaborate ``term`` against the model's signature, then evaluate it.

    Returns ``(type, denotation)``.
    """
    ty, elab = typecheck.elaborate(term, ctx=ctx, env=consts, sig=model.sig, expected=expected)
    if isinstance(ty, CompType):
        return ty, eval_comp(model, env or {}, elab)
    return ty, eval_value(model, env or {}, elab)
