"""Glued models: relations at every CBPV type, the basic lemma, effect simulation.

A ``GluedModel`` sits over a base model and adds no denotations of its own.
Each type gets a relation on exactly the base interpretation of that type.
Unary mode uses ``Pred``; binary mode sits over a product model and uses
``BinRel`` between its two components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from .evaluate import eval_comp, eval_value, interp_ctype, interp_vtype
from .relations import BinRel, MonadLifting, Pred, em_pair_lifting
from .semantics import BudgetExceeded, InlV, InrV, Model, NonFiniteError, PairV, ProductModel, show
from .syntax import (ArrowT, BaseT, CompBaseT, CompType, EmptyT, FreeT, ProdT, SumT, Term, ThunkT,
                     TopT, Type, UnitT, ValueType, WithT, print_term, print_type)
from . import typecheck


@dataclass
class GluedModel:
    base: Model
    lifting: MonadLifting
    base_rel: Mapping[str, Any]
    comp_base_rel: Mapping[str, Any] = field(default_factory=dict)
    const_types: Mapping[str, Type] = field(default_factory=dict)
    arrow_budget: int = 100_000

    def __post_init__(self):
        self.mode = "binary" if self.lifting.arity == 2 else "unary"
        if self.mode == "binary" and not isinstance(self.base, ProductModel):
            raise ValueError("binary gluing needs a product base model")
        if self.mode == "unary" and isinstance(self.base, ProductModel):
            raise ValueError("unary gluing over a product model; use a binary lifting")
        kinds = tuple(m.kind for m in self.lifting.monads)
        base_kinds = ((self.base.left.monad.kind, self.base.right.monad.kind)
                      if self.mode == "binary" else (self.base.monad.kind,))
        if kinds != base_kinds:
            raise ValueError(f"lifting is for {kinds} but the base model uses {base_kinds}")
        for name, rel in self.base_rel.items():
            expected = self._base_carriers(name)
            got = (rel.carrier,) if self.mode == "unary" else (rel.left, rel.right)
            if got != expected:
                raise ValueError(f"relation for base type {name!r} is not on its interpretation")
        self._vcache: dict = {}
        self._ccache: dict = {}

    def _base_carriers(self, name):
        if self.mode == "unary":
            return (self.base.base_vtype[name],)
        return (self.base.left.base_vtype[name], self.base.right.base_vtype[name])

    def carriers_v(self, a: ValueType):
        if self.mode == "unary":
            return (interp_vtype(self.base, a),)
        return (interp_vtype(self.base.left, a), interp_vtype(self.base.right, a))

    def carriers_c(self, b: CompType):
        if self.mode == "unary":
            return (interp_ctype(self.base, b).carrier,)
        return (interp_ctype(self.base.left, b).carrier, interp_ctype(self.base.right, b).carrier)

    def unclosed_ops(self) -> list[str]:
        names = {o.name for o in self.lifting.ops}
        return [o.name for o in self.base.sig.operations if o.name not in names]

    def contains(self, rel, value) -> bool:
        """Membership of a base denotation (a pair in binary mode)."""
        if self.mode == "unary":
            return value in rel
        return rel(value.fst, value.snd)


def _make(g: GluedModel, carriers, test):
    if g.mode == "unary":
        return Pred(carriers[0], test)
    return BinRel(carriers[0], carriers[1], test)


def lift_vtype(g: GluedModel, a: ValueType):
    if a in g._vcache:
        return g._vcache[a]
    cs = g.carriers_v(a)
    if isinstance(a, BaseT):
        try:
            r = g.base_rel[a.name]
        except KeyError:
            raise ValueError(f"no relation given for base type {a.name!r}") from None
    elif isinstance(a, UnitT):
        r = _make(g, cs, lambda *xs: True)
    elif isinstance(a, EmptyT):
        r = _make(g, cs, lambda *xs: False)
    elif isinstance(a, ProdT):
        left, right = lift_vtype(g, a.left), lift_vtype(g, a.right)
        if g.mode == "unary":
            r = Pred(cs[0], lambda p: p.fst in left and p.snd in right)
        else:
            r = BinRel(cs[0], cs[1], lambda p, q: left(p.fst, q.fst) and right(p.snd, q.snd))
    elif isinstance(a, SumT):
        left, right = lift_vtype(g, a.left), lift_vtype(g, a.right)
        if g.mode == "unary":
            def test(s):
                if isinstance(s, InlV):
                    return s.value in left
                return isinstance(s, InrV) and s.value in right
            r = Pred(cs[0], test)
        else:
            def test2(s, t):
                if isinstance(s, InlV) and isinstance(t, InlV):
                    return left(s.value, t.value)
                if isinstance(s, InrV) and isinstance(t, InrV):
                    return right(s.value, t.value)
                return False
            r = BinRel(cs[0], cs[1], test2)
    elif isinstance(a, ThunkT):
        r = lift_ctype(g, a.comp)
    else:
        raise ValueError(f"not a value type: {a!r}")
    g._vcache[a] = r
    return r


def lift_ctype(g: GluedModel, b: CompType):
    if b in g._ccache:
        return g._ccache[b]
    cs = g.carriers_c(b)
    if isinstance(b, FreeT):
        r = g.lifting.lift(lift_vtype(g, b.value))
    elif isinstance(b, TopT):
        r = _make(g, cs, lambda *xs: True)
    elif isinstance(b, WithT):
        left, right = lift_ctype(g, b.left), lift_ctype(g, b.right)
        if g.mode == "unary":
            r = Pred(cs[0], lambda p: p.fst in left and p.snd in right)
        else:
            r = BinRel(cs[0], cs[1], lambda p, q: left(p.fst, q.fst) and right(p.snd, q.snd))
    elif isinstance(b, ArrowT):
        r = _arrow(g, b, cs)
    elif isinstance(b, CompBaseT):
        try:
            r = g.comp_base_rel[b.name]
        except KeyError:
            raise ValueError(f"no relation given for computation base type {b.name!r}") from None
    else:
        raise ValueError(f"not a computation type: {b!r}")
    g._ccache[b] = r
    return r


def _arrow(g: GluedModel, b: ArrowT, cs):
    arg = lift_vtype(g, b.arg)
    res = lift_ctype(g, b.result)
    dom = g.carriers_v(b.arg)
    for d in dom:
        if not d.finite:
            raise NonFiniteError(f"relation at {print_type(b)} quantifies over an infinite argument set")
    if g.mode == "unary":
        if len(dom[0]) > g.arrow_budget:
            raise BudgetExceeded(f"argument set of {print_type(b)} exceeds the budget")
        related_args = None

        def test(f):
            nonlocal related_args
            if related_args is None:
                related_args = [x for x in dom[0] if x in arg]
            return all(f(x) in res for x in related_args)
        return Pred(cs[0], test)
    if len(dom[0]) * len(dom[1]) > g.arrow_budget:
        raise BudgetExceeded(f"argument pairs of {print_type(b)} exceed the budget")
    related_pairs = None

    def test2(f, h):
        nonlocal related_pairs
        if related_pairs is None:
            related_pairs = [(x, y) for x in dom[0] for y in dom[1] if arg(x, y)]
        return all(res(f(x), h(y)) for x, y in related_pairs)
    return BinRel(cs[0], cs[1], test2)


def explain(g: GluedModel, ty: Type, value) -> str:
    """Locate the innermost clause a denotation violates (``value`` is a pair in binary mode)."""
    rel = lift_ctype(g, ty) if isinstance(ty, CompType) else lift_vtype(g, ty)
    if g.contains(rel, value):
        return "related"
    if isinstance(ty, ArrowT):
        arg = lift_vtype(g, ty.arg)
        if g.mode == "unary":
            for x in g.carriers_v(ty.arg)[0]:
                if x in arg and value(x) not in lift_ctype(g, ty.result):
                    return f"at argument {show(x)}: " + explain(g, ty.result, value(x))
        else:
            d0, d1 = g.carriers_v(ty.arg)
            for x in d0:
                for y in d1:
                    if arg(x, y):
                        out = PairV(value.fst(x), value.snd(y))
                        if not g.contains(lift_ctype(g, ty.result), out):
                            return f"at arguments ({show(x)}, {show(y)}): " + explain(g, ty.result, out)
    if isinstance(ty, (WithT, ProdT)):
        for label, sub, proj in (("first", ty.left, lambda p: p.fst), ("second", ty.right, lambda p: p.snd)):
            v = proj(value) if g.mode == "unary" else PairV(proj(value.fst), proj(value.snd))
            rel_sub = lift_ctype(g, sub) if isinstance(sub, CompType) else lift_vtype(g, sub)
            if not g.contains(rel_sub, v):
                return f"{label} component: " + explain(g, sub, v)
    if isinstance(ty, ThunkT):
        return explain(g, ty.comp, value)
    if isinstance(ty, FreeT):
        return f"{show(value)} is outside the lifted relation at {print_type(ty)}"
    return f"{show(value)} is outside the relation at {print_type(ty)}"


# ---------------------------------------------------------------- reports


@dataclass
class SimReport:
    name: str
    verdicts: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    @property
    def verdict(self) -> str:
        return "pass" if self.ok else "fail"

    def summary(self) -> str:
        n = len(self.verdicts)
        passed = sum(1 for v in self.verdicts if v["verdict"] == "pass")
        if self.ok:
            return f"{self.name}: no counterexample found ({passed}/{n} terms)"
        return f"{self.name}: {len(self.counterexamples)} counterexample(s) ({passed}/{n} terms passed)"

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "terms": self.verdicts,
                "counterexamples": self.counterexamples, "notes": self.notes}


def _show_denotation(g: GluedModel, v) -> str:
    if g.mode == "binary":
        return f"({show(v.fst)}, {show(v.snd)})"
    return show(v)


def check_constants(g: GluedModel) -> list[dict]:
    bad = []
    for name in sorted(g.const_types):
        ty = g.const_types[name]
        try:
            v = g.base.const_interp[name]
        except KeyError:
            raise ValueError(f"constant {name!r} has no interpretation in the base model") from None
        rel = lift_ctype(g, ty) if isinstance(ty, CompType) else lift_vtype(g, ty)
        if not g.contains(rel, v):
            bad.append({"kind": "unrelated constant", "constant": name, "type": print_type(ty),
                        "denotation": _show_denotation(g, v), "clause": explain(g, ty, v)})
    return bad


def check_basic_lemma(g: GluedModel, corpus: Sequence[Term], expected: Optional[CompType] = None) -> SimReport:
    """Evaluate every closed term in the base model and test its relation.

    Constants are checked first; unrelated ones are reported as
    counterexamples in their own right.  A pass means no counterexample was
    found on this corpus.
    """
    rep = SimReport("basic lemma")
    unclosed = g.unclosed_ops()
    if unclosed:
        rep.notes.append(f"lifting is not declared closed under: {', '.join(unclosed)}")
    rep.counterexamples.extend(check_constants(g))
    for i, t in enumerate(corpus):
        text = print_term(t)
        ty, elab = typecheck.elaborate(t, env=g.const_types, sig=g.base.sig, expected=expected)
        if isinstance(ty, CompType):
            v = eval_comp(g.base, {}, elab)
            rel = lift_ctype(g, ty)
        else:
            v = eval_value(g.base, {}, elab)
            rel = lift_vtype(g, ty)
        if g.contains(rel, v):
            rep.verdicts.append({"index": i, "term": text, "type": print_type(ty), "verdict": "pass"})
        else:
            rep.verdicts.append({"index": i, "term": text, "type": print_type(ty), "verdict": "fail"})
            rep.counterexamples.append({"kind": "unrelated term", "index": i, "term": text,
                                        "type": print_type(ty), "denotation": _show_denotation(g, v),
                                        "clause": explain(g, ty, v)})
    return rep


def gamma_flatten(l) -> frozenset:
    """The set of elements of a list."""
    return frozenset(l)


def check_effect_sim(m_set: Model, m_list: Model, corpus: Sequence[Term],
                     consts: Optional[Mapping[str, Type]] = None,
                     expected: Optional[CompType] = None) -> SimReport:
    """Compare powerset and list denotations of closed computations ``F A``.

    Each term is checked twice: by the equation ``p == gamma_flatten(l)`` and by
    membership of ``(p, l)`` in the set-to-list lifting of the identity on
    ``A``.  The two verdicts must coincide.
    """
    if m_set.monad.kind != "pfin" or m_list.monad.kind != "list":
        raise ValueError("effect simulation compares a pfin model with a list model")
    if m_set.sig != m_list.sig:
        raise ValueError("the two models must share a signature")
    for k in set(m_set.base_vtype) | set(m_list.base_vtype):
        if m_set.base_vtype.get(k) != m_list.base_vtype.get(k):
            raise ValueError(f"base type {k!r} is interpreted differently in the two models")
    rep = SimReport("effect simulation")
    ems: dict = {}
    for i, t in enumerate(corpus):
        text = print_term(t)
        ty, elab = typecheck.elaborate(t, env=consts, sig=m_set.sig, expected=expected)
        if not isinstance(ty, FreeT):
            raise ValueError(f"term {i} has type {print_type(ty)}; effect simulation needs F A")
        p = eval_comp(m_set, {}, elab)
        l = eval_comp(m_list, {}, elab)
        if ty not in ems:
            X = interp_vtype(m_set, ty.value)
            ems[ty] = em_pair_lifting(BinRel.identity(X))
        eq = p == gamma_flatten(l)
        em = ems[ty](p, l)
        row = {"index": i, "term": text, "set": show(p), "list": show(l),
               "equation": eq, "relation": em, "verdict": "pass" if eq and em else "fail"}
        rep.verdicts.append(row)
        if not (eq and em):
            clause = ("verdicts disagree" if eq != em else "set differs from the flattened list")
            rep.counterexamples.append({"kind": "simulation", "index": i, "term": text,
                                        "type": print_type(ty), "set": show(p), "list": show(l),
                                        "clause": clause})
    return rep
