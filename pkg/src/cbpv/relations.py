"""Predicates, binary relations and monad liftings on semantic carriers.

A unary lifting turns a ``Pred`` on ``X`` into a ``Pred`` on ``T X``; a
binary lifting turns a ``BinRel`` between ``X`` and ``Y`` into one between
``T1 X`` and ``T2 Y``.  ``check_lifting_laws`` enumerates unit, bind and
operation closure on small carriers and lists every counterexample.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .semantics import (Atom, BudgetExceeded, ExceptionMonad, FiniteSet, FreeMonad, InlV, InrV,
                        Leaf, ListMonad, Monad, Node, NonFiniteError, PowersetMonad, SemSet,
                        carrier_of_size, show)
from .syntax import OpDecl, Signature


# ---------------------------------------------------------------- relations


class Pred:
    """A decidable subset of ``carrier``."""

    def __init__(self, carrier: SemSet, test: Callable[[Any], bool], name: str = ""):
        self.carrier = carrier
        self._test = test
        self.name = name

    @classmethod
    def from_members(cls, carrier: SemSet, members: Iterable, name: str = "") -> "Pred":
        members = frozenset(members)
        stray = [m for m in members if m not in carrier]
        if stray:
            raise ValueError(f"members outside the carrier: {[show(m) for m in stray]}")
        return cls(carrier, members.__contains__, name)

    @classmethod
    def full(cls, carrier: SemSet) -> "Pred":
        return cls(carrier, lambda x: True, "full")

    @classmethod
    def empty(cls, carrier: SemSet) -> "Pred":
        return cls(carrier, lambda x: False, "empty")

    def __contains__(self, x) -> bool:
        return bool(self._test(x))

    def members(self) -> frozenset:
        return frozenset(x for x in self.carrier.elements() if x in self)

    def __repr__(self):
        if self.carrier.finite:
            return "{" + ", ".join(sorted(show(x) for x in self.members())) + "}"
        return f"<pred {self.name or '?'}>"


class BinRel:
    """A decidable relation between ``left`` and ``right``."""

    def __init__(self, left: SemSet, right: SemSet, test: Callable[[Any, Any], bool], name: str = ""):
        self.left, self.right = left, right
        self._test = test
        self.name = name

    @classmethod
    def from_pairs(cls, left: SemSet, right: SemSet, pairs: Iterable, name: str = "") -> "BinRel":
        pairs = frozenset(tuple(p) for p in pairs)
        for a, b in pairs:
            if a not in left or b not in right:
                raise ValueError(f"pair ({show(a)}, {show(b)}) outside the carriers")
        return cls(left, right, lambda a, b: (a, b) in pairs, name)

    @classmethod
    def identity(cls, carrier: SemSet) -> "BinRel":
        return cls(carrier, carrier, lambda a, b: a == b, "identity")

    def __call__(self, a, b) -> bool:
        return bool(self._test(a, b))

    def __contains__(self, pair) -> bool:
        a, b = pair
        return self(a, b)

    def pairs(self) -> frozenset:
        return frozenset((a, b) for a in self.left.elements() for b in self.right.elements() if self(a, b))

    def __repr__(self):
        if self.left.finite and self.right.finite:
            return "{" + ", ".join(sorted(f"({show(a)}, {show(b)})" for a, b in self.pairs())) + "}"
        return f"<rel {self.name or '?'}>"


def subsets(xs: Sequence) -> Iterable[frozenset]:
    xs = list(xs)
    for k in range(len(xs) + 1):
        for c in itertools.combinations(xs, k):
            yield frozenset(c)


def all_preds(X: SemSet) -> Iterable[Pred]:
    for s in subsets(X.elements()):
        yield Pred.from_members(X, s)


def all_rels(X: SemSet, Y: SemSet) -> Iterable[BinRel]:
    cells = [(a, b) for a in X.elements() for b in Y.elements()]
    for s in subsets(cells):
        yield BinRel.from_pairs(X, Y, s)


# ---------------------------------------------------------------- liftings


@dataclass
class MonadLifting:
    """A relation transformer for one monad (``arity`` 1) or a pair (``arity`` 2).

    ``ops`` are the operations the lifting is meant to be closed under;
    binary liftings interpret each operation componentwise.
    """

    name: str
    monads: tuple
    transform: Callable
    ops: tuple = ()
    arity: int = 1

    @property
    def monad(self) -> Monad:
        return self.monads[0]

    def lift(self, R):
        if self.arity == 1 and not isinstance(R, Pred):
            raise TypeError("unary lifting needs a Pred")
        if self.arity == 2 and not isinstance(R, BinRel):
            raise TypeError("binary lifting needs a BinRel")
        return self.transform(R)

    __call__ = lift


def exception_lifting(Ebar: Pred, monad: Optional[ExceptionMonad] = None) -> MonadLifting:
    """``inl x`` related iff ``x in R``; ``inr e`` related iff ``e in Ebar``."""
    m = monad or ExceptionMonad(Ebar.carrier)
    if monad is not None and monad.E != Ebar.carrier:
        raise ValueError("exception predicate carrier differs from the monad's exception set")

    def transform(R: Pred) -> Pred:
        def test(t):
            if isinstance(t, InlV):
                return t.value in R
            if isinstance(t, InrV):
                return t.value in Ebar
            return False
        return Pred(m.apply(R.carrier), test, "exc")

    ops = tuple(OpDecl(m.raise_op(e), 0) for e in Ebar.members())
    return MonadLifting("exception", (m,), transform, ops)


def free_membership(t, R: Pred) -> bool:
    if isinstance(t, Leaf):
        return t.value in R
    if isinstance(t, Node):
        return all(free_membership(c, R) for c in t.children)
    return False


def free_lifting(sig: Signature, monad: Optional[FreeMonad] = None) -> MonadLifting:
    """The least relation containing related returns and closed under every operation."""
    m = monad or FreeMonad(sig)

    def transform(R: Pred) -> Pred:
        return Pred(m.apply(R.carrier), lambda t: free_membership(t, R), "free")

    return MonadLifting("free", (m,), transform, tuple(sig.operations))


class AlgebraLawError(ValueError):
    pass


def check_algebra(m: Monad, carrier: SemSet, alg: Callable, depth: int = 2) -> list:
    """Eilenberg-Moore laws for ``alg : T carrier -> carrier`` on bounded elements.

    Returns the list of violations (empty when the laws hold at this bound).
    """
    bad = []
    for r in carrier:
        if alg(m.unit(r)) != r:
            bad.append(("unit", show(r)))
    TT = m.apply(m.apply(carrier))
    for tt in TT.bounded(depth):
        lhs = alg(m.map(alg, tt))
        rhs = alg(m.join(tt))
        if lhs != rhs:
            bad.append(("mult", show(tt)))
        if len(bad) > 20:
            break
    return bad


def tt_lifting(m: Monad, param_carrier: SemSet, param_algebra: Callable, param_pred: Pred,
               ops: Optional[Sequence[OpDecl]] = None, check_depth: int = 2) -> MonadLifting:
    """Lifting by tests into a parameter algebra.

    ``t`` is related over ``R`` iff for every total ``f : X -> param_carrier``
    sending ``R`` into ``param_pred`` we have ``param_algebra(map f t)`` in
    ``param_pred``.
    """
    if not param_carrier.finite:
        raise NonFiniteError("parameter carrier must be finite")
    bad = check_algebra(m, param_carrier, param_algebra, check_depth)
    if bad:
        raise AlgebraLawError(f"parameter is not an algebra for the {m.kind} monad: {bad[:3]}")
    params = param_carrier.elements()
    good = [r for r in params if r in param_pred]

    def tests(R: Pred):
        X = R.carrier
        if not X.finite:
            raise NonFiniteError("test space over an infinite carrier")
        xs = X.elements()
        choices = [good if x in R else params for x in xs]
        for ys in itertools.product(*choices):
            yield dict(zip(xs, ys))

    def transform(R: Pred) -> Pred:
        fs = list(tests(R))

        def test(t):
            return all(param_algebra(m.map(f.__getitem__, t)) in param_pred for f in fs)
        return Pred(m.apply(R.carrier), test, "tt")

    return MonadLifting("tt", (m,), transform, tuple(ops if ops is not None else m.operations()))


ZERO, ONE = Atom("0"), Atom("1")
BOOL_SET = FiniteSet([ZERO, ONE])


def erratic_choice_lifting() -> MonadLifting:
    """Powerset lifting with parameter ({0,1}, {1}) and the algebra '1 iff 1 in p'.

    Closed under binary choice only: the empty set fails every test.
    """
    return tt_lifting(PowersetMonad(), BOOL_SET, lambda p: ONE if ONE in p else ZERO,
                      Pred.from_members(BOOL_SET, [ONE]), ops=(OpDecl("or", 2),))


def _em_test(R: BinRel, p, l, strict_sizes=False, second_clause=True) -> bool:
    items = list(l)
    if not all(any(R(x, y) for y in items) for x in p):
        return False
    if second_clause and not all(any(R(x, y) for x in p) for y in items):
        return False
    if strict_sizes and len(p) != len(items):
        return False
    return True


def em_pair_lifting(R: BinRel) -> BinRel:
    """Relate a finite set to a list when every element of each is matched in the other."""
    return BinRel(PowersetMonad().apply(R.left), ListMonad().apply(R.right),
                  lambda p, l: _em_test(R, p, l), "em")


def pair_list_lifting(R: BinRel) -> BinRel:
    """Relate two lists of equal length that are related position by position."""
    m = ListMonad()
    return BinRel(m.apply(R.left), m.apply(R.right),
                  lambda l1, l2: len(l1) == len(l2) and all(R(a, b) for a, b in zip(l1, l2)), "lists")


CHOICE_OPS = (OpDecl("or", 2), OpDecl("fail", 0))


def em_lifting() -> MonadLifting:
    return MonadLifting("em", (PowersetMonad(), ListMonad()), em_pair_lifting, CHOICE_OPS, arity=2)


def list_pair_lifting() -> MonadLifting:
    return MonadLifting("list-pair", (ListMonad(), ListMonad()), pair_list_lifting, CHOICE_OPS, arity=2)


def em_without_second_clause() -> MonadLifting:
    """Only the set-to-list matching clause.  Still a lawful lifting."""
    def transform(R):
        return BinRel(PowersetMonad().apply(R.left), ListMonad().apply(R.right),
                      lambda p, l: _em_test(R, p, l, second_clause=False), "em-1")
    return MonadLifting("em-one-sided", (PowersetMonad(), ListMonad()), transform, CHOICE_OPS, arity=2)


def em_size_matched() -> MonadLifting:
    """Broken on purpose: additionally demands as many set elements as list entries."""
    def transform(R):
        return BinRel(PowersetMonad().apply(R.left), ListMonad().apply(R.right),
                      lambda p, l: _em_test(R, p, l, strict_sizes=True), "em-sized")
    return MonadLifting("em-size-matched", (PowersetMonad(), ListMonad()), transform, CHOICE_OPS, arity=2)


# ---------------------------------------------------------------- law checking


@dataclass
class LiftingReport:
    lifting: str
    domains: dict
    checked: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        counts = ", ".join(f"{k}={v}" for k, v in self.checked.items())
        verdict = "no counterexample found" if self.ok else f"{len(self.counterexamples)} counterexample(s)"
        return f"{self.lifting}: {verdict} ({counts})"


@dataclass(frozen=True)
class LawBounds:
    """Search domains for ``check_lifting_laws``.

    ``size_bound`` bounds the carriers for unit and operation closure.
    Operation arguments range over monadic elements of size at most
    ``depth - 1`` (so results have size at most ``depth``).  Bind closure
    takes ``|X| <= bind_size``, ``t`` of size at most ``bind_depth`` and
    continuations ``k`` whose values have size at most ``cont_depth``.
    """

    size_bound: int = 3
    depth: int = 3
    bind_size: int = 3
    bind_depth: int = 3
    cont_depth: int = 2
    budget: int = 5_000_000
    max_reports: int = 25


def _relations(arity, X, Y):
    return list(all_preds(X)) if arity == 1 else list(all_rels(X, Y))


def _lift_members(lifting, R, carriers, depth):
    """Related elements (pairs for binary) of size at most ``depth``, as a frozenset."""
    L = lifting.lift(R)
    if lifting.arity == 1:
        return frozenset(t for t in carriers[0].bounded(depth) if t in L)
    rights = list(carriers[1].bounded(depth))
    return frozenset((a, b) for a in carriers[0].bounded(depth) for b in rights if L(a, b))


def _support(m: Monad, t) -> frozenset:
    seen = set()
    m.bind(t, lambda x: (seen.add(x), m.unit(x))[1])
    return frozenset(seen)


def check_lifting_laws(lifting: MonadLifting, bounds: LawBounds = LawBounds(),
                       ops: Optional[Sequence[OpDecl]] = None) -> LiftingReport:
    """Exhaustive unit, bind and operation closure over the domains in ``bounds``.

    Bind closure uses that ``bind(t, k)`` only calls ``k`` on elements of
    ``t``: continuations are enumerated on the support of ``t``, and the
    remaining points are only required to admit some related value.
    """
    ops = tuple(ops if ops is not None else lifting.ops)
    b = bounds
    rep = LiftingReport(lifting.name, {
        "carrier sizes (unit, ops)": f"0..{b.size_bound}",
        "op argument size": f"<= {b.depth - 1}",
        "bind carrier sizes": f"0..{b.bind_size}",
        "bind t size": f"<= {b.bind_depth}",
        "bind continuation value size": f"<= {b.cont_depth}",
        "operations": [f"{o.name}/{o.arity}" for o in ops],
    }, {"unit": 0, "op": 0, "bind": 0})
    budget = [b.budget]

    def spend(n=1):
        budget[0] -= n
        if budget[0] < 0:
            raise BudgetExceeded(f"lifting law check for {lifting.name} exceeded its budget of {b.budget}")

    def report(**data):
        if len(rep.counterexamples) < b.max_reports:
            rep.counterexamples.append({k: (v if isinstance(v, str) else show(v)) for k, v in data.items()})

    ms = lifting.monads
    binary = lifting.arity == 2

    def carriers(nx, ny):
        X = carrier_of_size(nx, "a")
        Y = carrier_of_size(ny, "b") if binary else None
        return X, Y

    def apply(X, Y):
        return (ms[0].apply(X),) if not binary else (ms[0].apply(X), ms[1].apply(Y))

    pair_sizes = [(n, n2) for n in range(b.size_bound + 1)
                  for n2 in (range(b.size_bound + 1) if binary else [None])]

    # unit and operation closure
    for nx, ny in pair_sizes:
        X, Y = carriers(nx, ny)
        TX = apply(X, Y)
        for R in _relations(lifting.arity, X, Y):
            L = lifting.lift(R)
            if binary:
                for x, y in R.pairs():
                    spend()
                    rep.checked["unit"] += 1
                    if not L(ms[0].unit(x), ms[1].unit(y)):
                        report(law="unit", R=repr(R), x=x, y=y)
            else:
                for x in R.members():
                    spend()
                    rep.checked["unit"] += 1
                    if ms[0].unit(x) not in L:
                        report(law="unit", R=repr(R), x=x)
            if not ops:
                continue
            related = sorted(_lift_members(lifting, R, TX, max(b.depth - 1, 0)), key=show)
            for o in ops:
                if o.param is not None:
                    continue
                n = len(related) ** o.arity
                spend(n)
                for args in itertools.product(related, repeat=o.arity):
                    rep.checked["op"] += 1
                    if binary:
                        res = (ms[0].op(o.name, None, [a for a, _ in args]),
                               ms[1].op(o.name, None, [c for _, c in args]))
                        if not L(*res):
                            report(law="op", op=o.name, R=repr(R),
                                   args=", ".join(f"({show(a)}, {show(c)})" for a, c in args),
                                   result=f"({show(res[0])}, {show(res[1])})")
                    else:
                        res = ms[0].op(o.name, None, list(args))
                        if res not in L:
                            report(law="op", op=o.name, R=repr(R),
                                   args=", ".join(show(a) for a in args), result=res)

    # bind closure
    bind_sizes = [(n, n2) for n in range(b.bind_size + 1)
                  for n2 in (range(b.bind_size + 1) if binary else [None])]
    for nx, ny in bind_sizes:
        X, Y = carriers(nx, ny)
        TX = apply(X, Y)
        rels_x = _relations(lifting.arity, X, Y)
        for nz, nw in bind_sizes:
            Z = carrier_of_size(nz, "c")
            W = carrier_of_size(nw, "d") if binary else None
            TZ = apply(Z, W)
            for R2 in _relations(lifting.arity, Z, W):
                good2 = _lift_members(lifting, R2, TZ, b.cont_depth)
                L2 = lifting.lift(R2)
                if binary:
                    _bind_binary(lifting, X, Y, TX, rels_x, TZ, good2, L2, b, spend, report, rep, R2)
                else:
                    _bind_unary(lifting, X, TX, rels_x, TZ, good2, L2, b, spend, report, rep, R2)
    return rep


def _bind_unary(lifting, X, TX, rels_x, TZ, good2, L2, b, spend, report, rep, R2):
    m = lifting.monads[0]
    all2 = sorted(TZ[0].bounded(b.cont_depth), key=show)
    good2_list = sorted(good2, key=show)
    for R in rels_x:
        L = lifting.lift(R)
        # points of R outside supp(t) need some related value for the hypothesis to be satisfiable
        for t in TX[0].bounded(b.bind_depth):
            if t not in L:
                continue
            supp = sorted(_support(m, t), key=show)
            if not good2 and any(x in R for x in X.elements() if x not in supp):
                continue
            choices = [good2_list if x in R else all2 for x in supp]
            n = 1
            for c in choices:
                n *= len(c)
            spend(n)
            for vals in itertools.product(*choices):
                table = dict(zip(supp, vals))
                rep.checked["bind"] += 1
                res = m.bind(t, table.__getitem__)
                if res not in L2:
                    report(law="bind", R=repr(R), R2=repr(R2), t=t,
                           k=", ".join(f"{show(x)} -> {show(v)}" for x, v in table.items()), result=res)


def _bind_binary(lifting, X, Y, TX, rels_x, TZ, good2, L2, b, spend, report, rep, R2):
    m1, m2 = lifting.monads
    firsts = sorted(TZ[0].bounded(b.cont_depth), key=show)
    seconds = sorted(TZ[1].bounded(b.cont_depth), key=show)
    for R in rels_x:
        L = lifting.lift(R)
        rel_pairs = R.pairs()
        for t1 in TX[0].bounded(b.bind_depth):
            s1 = sorted(_support(m1, t1), key=show)
            for t2 in TX[1].bounded(b.bind_depth):
                if not L(t1, t2):
                    continue
                s2 = sorted(_support(m2, t2), key=show)
                outside = [(x, y) for x, y in rel_pairs if x not in s1 or y not in s2]
                if outside and not good2:
                    continue
                n = len(firsts) ** len(s1) * len(seconds) ** len(s2)
                spend(n)
                inner = [(x, y) for x, y in rel_pairs if x in s1 and y in s2]
                for v1 in itertools.product(firsts, repeat=len(s1)):
                    k1 = dict(zip(s1, v1))
                    for v2 in itertools.product(seconds, repeat=len(s2)):
                        k2 = dict(zip(s2, v2))
                        if not all((k1[x], k2[y]) in good2 for x, y in inner):
                            continue
                        if outside and not _extendable(outside, k1, k2, s1, s2, firsts, seconds, good2):
                            continue
                        rep.checked["bind"] += 1
                        r1 = m1.bind(t1, k1.__getitem__)
                        r2 = m2.bind(t2, k2.__getitem__)
                        if not L2(r1, r2):
                            report(law="bind", R=repr(R), R2=repr(R2), t=f"({show(t1)}, {show(t2)})",
                                   k1=", ".join(f"{show(x)} -> {show(v)}" for x, v in k1.items()),
                                   k2=", ".join(f"{show(y)} -> {show(v)}" for y, v in k2.items()),
                                   result=f"({show(r1)}, {show(r2)})")


def _extendable(outside, k1, k2, s1, s2, firsts, seconds, good2) -> bool:
    """Can ``k1``/``k2`` be extended off the supports, with bounded values,
    so that every remaining pair of R is sent to a related pair?"""
    free_x = sorted({x for x, _ in outside if x not in s1}, key=show)
    free_y = sorted({y for _, y in outside if y not in s2}, key=show)
    for ax in itertools.product(firsts, repeat=len(free_x)):
        e1 = {**k1, **dict(zip(free_x, ax))}
        for ay in itertools.product(seconds, repeat=len(free_y)):
            e2 = {**k2, **dict(zip(free_y, ay))}
            if all((e1[x], e2[y]) in good2 for x, y in outside):
                return True
    return False


# ---------------------------------------------------------------- tt cross-check


@dataclass
class CrossCheckRow:
    size: int
    R: frozenset
    computed: frozenset
    claimed: frozenset
    only_computed: frozenset
    only_claimed: frozenset
    empty_in_computed: bool
    empty_in_claimed: bool
    matches_meets_R: bool

    @property
    def agrees(self) -> bool:
        return not self.only_computed and not self.only_claimed

    def describe(self) -> str:
        def fam(s):
            return "{" + ", ".join(sorted((show(p) for p in s), key=lambda x: (len(x), x))) + "}"
        head = f"|X|={self.size} R={show(self.R)}: "
        if self.agrees:
            return head + "agree"
        return (head + f"disagree; only computed {fam(self.only_computed)}; "
                f"only claimed {fam(self.only_claimed)}; empty set: computed="
                f"{'in' if self.empty_in_computed else 'out'}, claimed={'in' if self.empty_in_claimed else 'out'}")


def tt_crosscheck(max_size: int = 4, lifting: Optional[MonadLifting] = None) -> list[CrossCheckRow]:
    """Compare the erratic-choice lifting with 'p related iff p is a subset of R'.

    Also records whether the computed family equals 'p meets R'.
    """
    lifting = lifting or erratic_choice_lifting()
    rows = []
    for n in range(max_size + 1):
        X = carrier_of_size(n, "x")
        PX = list(PowersetMonad().apply(X))
        for R in all_preds(X):
            Rs = R.members()
            L = lifting.lift(R)
            computed = frozenset(p for p in PX if p in L)
            claimed = frozenset(p for p in PX if p <= Rs)
            meets = frozenset(p for p in PX if p & Rs)
            rows.append(CrossCheckRow(n, Rs, computed, claimed, computed - claimed, claimed - computed,
                                      frozenset() in computed, frozenset() in claimed, computed == meets))
    return rows
