"""Seeded random generation of closed, well-typed CBPV terms.

``depth`` bounds the nesting of computation formers that do not follow the
shape of the target type (``to``, operations, application, case, ...).
Introduction forms dictated by the type itself (lambda at an arrow type,
pairing at a product, ``<>`` at Top) do not consume depth, so depth 1 yields
only leaf computations such as ``return V``, nullary operations and
constants.
"""
from __future__ import annotations

import random
from typing import Mapping, Optional, Sequence

from .syntax import (App, ArrowT, BaseT, Case, CompType, Const, CPair, CUnit, Force, FreeT, Fst,
                     Inl, Inr, Lam, Let, Op, Pair, PmPair, ProdT, Return, Signature, Snd, SumT,
                     Thunk, ThunkT, To, TopT, UnitT, UnitVal, ValueType, Var, WithT)


class UninhabitedError(Exception):
    """No term of the requested type exists within the generator's rules and depth."""


class _Fail(Exception):
    pass


class TermGenerator:
    def __init__(self, sig: Signature, consts: Optional[Mapping[str, object]] = None,
                 seed: int = 0, value_depth: int = 2, pool: Optional[Sequence[ValueType]] = None):
        self.sig = sig
        self.consts = dict(consts or {})
        self.rng = random.Random(seed)
        self.value_depth = value_depth
        if pool is None:
            pool = [UnitT(), SumT(UnitT(), UnitT())] + [BaseT(b) for b in sig.value_bases]
        self.pool = list(pool)
        self._counter = 0

    # -- helpers

    def _fresh(self) -> str:
        self._counter += 1
        return f"x{self._counter}"

    def _vars_of(self, ctx, ty):
        return [n for n, a in ctx if a == ty]

    def _shuffled(self, items):
        items = list(items)
        self.rng.shuffle(items)
        return items

    def _first(self, attempts):
        for attempt in self._shuffled(attempts):
            try:
                return attempt()
            except _Fail:
                continue
        raise _Fail

    # -- values

    def value(self, ctx, ty: ValueType, depth: Optional[int] = None):
        depth = self.value_depth if depth is None else depth
        attempts = []
        names = self._vars_of(ctx, ty)
        if names:
            attempts.append(lambda: Var(self.rng.choice(names)))
        consts = [c for c, t in self.consts.items() if t == ty]
        if consts:
            attempts.append(lambda: Const(self.rng.choice(consts)))
        if isinstance(ty, UnitT):
            attempts.append(lambda: UnitVal())
        elif isinstance(ty, ProdT) and depth > 0:
            attempts.append(lambda: Pair(self.value(ctx, ty.left, depth - 1),
                                         self.value(ctx, ty.right, depth - 1)))
        elif isinstance(ty, SumT) and depth > 0:
            attempts.append(lambda: Inl(self.value(ctx, ty.left, depth - 1)))
            attempts.append(lambda: Inr(self.value(ctx, ty.right, depth - 1)))
        elif isinstance(ty, ThunkT) and depth > 0:
            attempts.append(lambda: Thunk(self.comp(ctx, ty.comp, max(1, depth - 1))))
        return self._first(attempts)

    # -- computations

    def comp(self, ctx, ty: CompType, depth: int):
        if isinstance(ty, ArrowT):
            x = self._fresh()
            structural = lambda: Lam(x, self.comp(ctx + [(x, ty.arg)], ty.result, depth), ty.arg)  # noqa: E731
            return self._with_structural(ctx, ty, depth, structural)
        if isinstance(ty, WithT):
            structural = lambda: CPair(self.comp(ctx, ty.left, depth), self.comp(ctx, ty.right, depth))  # noqa: E731
            return self._with_structural(ctx, ty, depth, structural)
        if isinstance(ty, TopT):
            return self._with_structural(ctx, ty, depth, CUnit)
        return self._first(self._leaf_rules(ctx, ty) + self._inner_rules(ctx, ty, depth))

    def _with_structural(self, ctx, ty, depth, structural):
        # mostly take the type-directed form, occasionally an eliminator
        if depth <= 1 or self.rng.random() < 0.7:
            try:
                return structural()
            except _Fail:
                pass
        return self._first([structural] + self._leaf_rules(ctx, ty) + self._inner_rules(ctx, ty, depth))

    def _leaf_rules(self, ctx, ty):
        rules = []
        if isinstance(ty, FreeT):
            # listed twice so that nullary operations do not dominate the leaves
            rules += [lambda: Return(self.value(ctx, ty.value))] * 2
        for o in self.sig.operations:
            if o.arity == 0:
                rules.append(lambda o=o: Op(o.name, self._param(ctx, o), ()))
        consts = [c for c, t in self.consts.items() if t == ty]
        if consts:
            rules.append(lambda: Const(self.rng.choice(consts)))
        thunks = self._vars_of(ctx, ThunkT(ty))
        if thunks:
            rules.append(lambda: Force(Var(self.rng.choice(thunks))))
        return rules

    def _param(self, ctx, o):
        if o.param is None:
            return None
        return self.value(ctx, o.param, 1)

    def _inner_rules(self, ctx, ty, depth):
        if depth <= 1:
            return []
        d = depth - 1
        rng = self.rng
        rules = []
        for o in self.sig.operations:
            if o.arity > 0:
                rules += [lambda o=o: Op(o.name, self._param(ctx, o),
                                         tuple(self.comp(ctx, ty, d) for _ in range(o.arity)))] * 2

        def seq():
            a = rng.choice(self.pool)
            x = self._fresh()
            return To(self.comp(ctx, FreeT(a), d), x, self.comp(ctx + [(x, a)], ty, d))

        def beta():
            a = rng.choice(self.pool)
            x = self._fresh()
            arg = self.value(ctx, a)
            return App(Lam(x, self.comp(ctx + [(x, a)], ty, d), a), arg)

        def case():
            sums = [(n, a) for n, a in ctx if isinstance(a, SumT)]
            if sums and rng.random() < 0.6:
                n, a = rng.choice(sums)
                scrut = Var(n)
            else:
                a = rng.choice([p for p in self.pool if isinstance(p, SumT)] or [SumT(UnitT(), UnitT())])
                scrut = self.value(ctx, a)
            x, y = self._fresh(), self._fresh()
            return Case(scrut, x, self.comp(ctx + [(x, a.left)], ty, d),
                        y, self.comp(ctx + [(y, a.right)], ty, d))

        def pm():
            prods = [(n, a) for n, a in ctx if isinstance(a, ProdT)]
            if prods:
                n, a = rng.choice(prods)
                scrut = Var(n)
            else:
                a = ProdT(rng.choice(self.pool), rng.choice(self.pool))
                scrut = self.value(ctx, a)
            x, y = self._fresh(), self._fresh()
            return PmPair(scrut, x, y, self.comp(ctx + [(x, a.left), (y, a.right)], ty, d))

        def let():
            a = rng.choice(self.pool)
            x = self._fresh()
            return Let(x, self.value(ctx, a), self.comp(ctx + [(x, a)], ty, d))

        def force_thunk():
            return Force(Thunk(self.comp(ctx, ty, d)))

        def proj():
            other = FreeT(rng.choice(self.pool))
            if rng.random() < 0.5:
                return Fst(CPair(self.comp(ctx, ty, d), self.comp(ctx, other, d)))
            return Snd(CPair(self.comp(ctx, other, d), self.comp(ctx, ty, d)))

        rules += [seq, seq, beta, case, pm, let, force_thunk, proj]
        return rules

    def closed(self, ty: CompType, depth: int):
        try:
            return self.comp([], ty, depth)
        except _Fail:
            raise UninhabitedError(f"no closed term of the requested type at depth {depth}") from None

    def open(self, ctx, ty: CompType, depth: int):
        try:
            return self.comp(list(ctx), ty, depth)
        except _Fail:
            raise UninhabitedError(f"no term of the requested type at depth {depth}") from None

    def closed_value(self, ty: ValueType, depth: Optional[int] = None):
        try:
            return self.value([], ty, depth)
        except _Fail:
            raise UninhabitedError("no closed value of the requested type") from None


def generate_terms(sig: Signature, target: CompType, max_depth: int, seed: int, count: int,
                   consts: Optional[Mapping[str, object]] = None):
    """``count`` closed computations of type ``target``; deterministic in all arguments."""
    if max_depth < 1:
        raise UninhabitedError("depth must be at least 1")
    gen = TermGenerator(sig, consts, seed)
    out = []
    for _ in range(count):
        # vary depth so corpora mix shallow and deep terms
        d = gen.rng.randint(1, max_depth)
        try:
            out.append(gen.closed(target, d))
        except UninhabitedError:
            out.append(gen.closed(target, max_depth))
    return out
