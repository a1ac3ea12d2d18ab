"""Semantic universe: values, enumerable sets, strong monads and CBPV models.

A model assigns a ``SemSet`` to every value type and a ``CompObject`` to
every computation type.  The carrier of a computation object is the set that
computations of that type denote (the U-image), so ``force`` and ``thunk``
are identities on denotations.

Three model constructions are provided:

* ``algebra_model``: Eilenberg-Moore algebras of a monad on sets; ``F X`` is
  the free algebra, powers and products are pointwise.
* ``storage_model``: the adjunction ``(-) x S -| S => (-)``.  A computation
  type denotes a set ``D`` and its carrier is ``S => D``; sequencing and the
  read/write operations act uniformly by threading the state.  Powers and
  products are stored in the isomorphic forms ``X => (S => D)`` and
  ``(S => D1) x (S => D2)``, so function application and projection are
  the plain ones.
* ``product_model``: two models side by side, everything componentwise.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .syntax import OpDecl, Signature


class NonFiniteError(Exception):
    """An operation needed a finite set but got an infinite one."""


class BudgetExceeded(Exception):
    pass


class UnsupportedOperation(Exception):
    pass


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class UnitV:
    def __repr__(self):
        return "()"


@dataclass(frozen=True)
class PairV:
    fst: Any
    snd: Any

    def __repr__(self):
        return f"({self.fst!r}, {self.snd!r})"


@dataclass(frozen=True)
class InlV:
    value: Any

    def __repr__(self):
        return f"inl {self.value!r}"


@dataclass(frozen=True)
class InrV:
    value: Any

    def __repr__(self):
        return f"inr {self.value!r}"


@dataclass(frozen=True)
class Leaf:
    """``return x`` in a free monad."""
    value: Any


@dataclass(frozen=True)
class Node:
    """An operation node in a free monad; ``param`` is ``None`` when absent."""
    op: str
    param: Any
    children: tuple


UNIT_V = UnitV()


class FunV:
    """A total function on ``domain``.

    Built from a Python callable and compared extensionally.  Results are
    memoised, so a ``FunV`` behaves like a lazily filled table.
    """

    __slots__ = ("domain", "_fn", "_memo", "_table", "_hash")

    def __init__(self, domain: "SemSet", fn: Callable[[Any], Any]):
        self.domain = domain
        self._fn = fn
        self._memo: dict = {}
        self._table: Optional[tuple] = None
        self._hash: Optional[int] = None

    @classmethod
    def from_table(cls, domain: "SemSet", table: Mapping) -> "FunV":
        table = dict(table)
        return cls(domain, table.__getitem__)

    def __call__(self, x):
        try:
            return self._memo[x]
        except KeyError:
            y = self._fn(x)
            self._memo[x] = y
            return y

    def table(self) -> tuple:
        if self._table is None:
            if not self.domain.finite:
                raise NonFiniteError("cannot tabulate a function on an infinite domain")
            self._table = tuple((x, self(x)) for x in self.domain)
        return self._table

    def __eq__(self, other):
        if not isinstance(other, FunV):
            return NotImplemented
        if self is other:
            return True
        mine = self.table()
        if len(mine) != len(other.table()):
            return False
        return all(other(x) == y for x, y in mine)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.table()))
        return self._hash

    def __repr__(self):
        if not self.domain.finite:
            return "<fun on infinite domain>"
        return "{" + ", ".join(f"{show(x)} -> {show(y)}" for x, y in self.table()) + "}"


def show(v) -> str:
    """Canonical text form of a semantic value (deterministic across runs)."""
    if isinstance(v, Atom):
        return v.name
    if isinstance(v, UnitV):
        return "()"
    if isinstance(v, PairV):
        return f"({show(v.fst)}, {show(v.snd)})"
    if isinstance(v, InlV):
        return f"inl {_show_arg(v.value)}"
    if isinstance(v, InrV):
        return f"inr {_show_arg(v.value)}"
    if isinstance(v, frozenset):
        return "{" + ", ".join(sorted(show(x) for x in v)) + "}"
    if isinstance(v, tuple):
        return "[" + ", ".join(show(x) for x in v) + "]"
    if isinstance(v, Leaf):
        return f"return {_show_arg(v.value)}"
    if isinstance(v, Node):
        param = "" if v.param is None else f"[{show(v.param)}]"
        return f"{v.op}{param}(" + "; ".join(show(c) for c in v.children) + ")"
    if isinstance(v, FunV):
        if not v.domain.finite:
            return "<fun>"
        return "fun{" + ", ".join(f"{show(x)} -> {show(y)}" for x, y in v.table()) + "}"
    return repr(v)


def _show_arg(v) -> str:
    s = show(v)
    return f"({s})" if isinstance(v, (InlV, InrV, Leaf)) else s


def tree_depth(t) -> int:
    if isinstance(t, Node):
        return 1 + max((tree_depth(c) for c in t.children), default=0)
    return 0


# ---------------------------------------------------------------- sets


class SemSet:
    """An enumerable set with decidable membership.

    ``bounded(n)`` lists the elements of size at most ``n`` (list length,
    tree depth); for finite sets it lists everything.  Iterating an infinite
    set walks the size levels in order and never terminates.
    """

    finite: bool = True

    def bounded(self, n: int) -> Iterable:
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    def __iter__(self) -> Iterator:
        if self.finite:
            yield from self.bounded(0)
            return
        seen = set()
        for n in itertools.count():
            for x in self.bounded(n):
                if x not in seen:
                    seen.add(x)
                    yield x

    def elements(self) -> list:
        if not self.finite:
            raise NonFiniteError(f"{self!r} is infinite")
        return list(self)

    def __len__(self) -> int:
        if not self.finite:
            raise NonFiniteError(f"{self!r} is infinite")
        return sum(1 for _ in self)

    def size_bounded(self, n: int) -> int:
        return sum(1 for _ in self.bounded(n))


class FiniteSet(SemSet):
    def __init__(self, elements: Iterable):
        self._elems = tuple(elements)
        self._index = frozenset(self._elems)
        if len(self._index) != len(self._elems):
            raise ValueError("duplicate elements in finite set")

    def bounded(self, n):
        return self._elems

    def __iter__(self):
        return iter(self._elems)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def __len__(self):
        return len(self._elems)

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self._index == other._index

    def __hash__(self):
        return hash(self._index)

    def __repr__(self):
        return "{" + ", ".join(show(x) for x in self._elems) + "}"


def atoms(names: Iterable[str]) -> FiniteSet:
    return FiniteSet(Atom(n) for n in names)


def carrier_of_size(n: int, prefix: str = "x") -> FiniteSet:
    return atoms(f"{prefix}{i}" for i in range(n))


UNIT_SET = FiniteSet([UNIT_V])
EMPTY_SET = FiniteSet([])


class ProductSet(SemSet):
    def __init__(self, left: SemSet, right: SemSet):
        self.left, self.right = left, right
        self.finite = (left.finite and right.finite) or _empty(left) or _empty(right)

    def bounded(self, n):
        rs = list(self.right.bounded(n))
        return [PairV(a, b) for a in self.left.bounded(n) for b in rs]

    def __contains__(self, x):
        return isinstance(x, PairV) and x.fst in self.left and x.snd in self.right

    def __eq__(self, other):
        return isinstance(other, ProductSet) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash(("prod", self.left, self.right))

    def __repr__(self):
        return f"({self.left!r} x {self.right!r})"


class SumSet(SemSet):
    def __init__(self, left: SemSet, right: SemSet):
        self.left, self.right = left, right
        self.finite = left.finite and right.finite

    def bounded(self, n):
        return [InlV(a) for a in self.left.bounded(n)] + [InrV(b) for b in self.right.bounded(n)]

    def __contains__(self, x):
        if isinstance(x, InlV):
            return x.value in self.left
        if isinstance(x, InrV):
            return x.value in self.right
        return False

    def __eq__(self, other):
        return isinstance(other, SumSet) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash(("sum", self.left, self.right))

    def __repr__(self):
        return f"({self.left!r} + {self.right!r})"


def _empty(s: SemSet) -> bool:
    return s.finite and len(s) == 0


class FunctionSpace(SemSet):
    """All functions from a finite domain into ``cod``."""

    def __init__(self, dom: SemSet, cod: SemSet):
        if not dom.finite:
            raise NonFiniteError("function space over an infinite domain")
        self.dom, self.cod = dom, cod
        self.finite = cod.finite or len(dom) == 0

    def bounded(self, n):
        xs = list(self.dom)
        choices = list(self.cod.bounded(n))
        return [FunV.from_table(self.dom, dict(zip(xs, ys)))
                for ys in itertools.product(choices, repeat=len(xs))]

    def __contains__(self, f):
        return isinstance(f, FunV) and all(f(x) in self.cod for x in self.dom)

    def __eq__(self, other):
        return isinstance(other, FunctionSpace) and (self.dom, self.cod) == (other.dom, other.cod)

    def __hash__(self):
        return hash(("fun", self.dom, self.cod))

    def __repr__(self):
        return f"({self.dom!r} => {self.cod!r})"


class PowerSet(SemSet):
    """Finite subsets of ``base``."""

    def __init__(self, base: SemSet):
        self.base = base
        self.finite = base.finite

    def bounded(self, n):
        xs = list(self.base.bounded(n))
        return [frozenset(c) for k in range(len(xs) + 1) for c in itertools.combinations(xs, k)]

    def __contains__(self, p):
        return isinstance(p, frozenset) and all(x in self.base for x in p)

    def __eq__(self, other):
        return isinstance(other, PowerSet) and self.base == other.base

    def __hash__(self):
        return hash(("pfin", self.base))

    def __repr__(self):
        return f"Pfin({self.base!r})"


class ListSet(SemSet):
    """Finite lists over ``base``; ``bounded(n)`` gives lengths up to ``n``."""

    def __init__(self, base: SemSet):
        self.base = base
        self.finite = _empty(base)

    def bounded(self, n):
        xs = list(self.base.bounded(n))
        return [tuple(c) for k in range(n + 1) for c in itertools.product(xs, repeat=k)]

    def __iter__(self):
        if self.finite:
            yield ()
            return
        yield from super().__iter__()

    def __contains__(self, l):
        return isinstance(l, tuple) and all(x in self.base for x in l)

    def __eq__(self, other):
        return isinstance(other, ListSet) and self.base == other.base

    def __hash__(self):
        return hash(("list", self.base))

    def __repr__(self):
        return f"List({self.base!r})"


class TreeSet(SemSet):
    """Finite operation trees over ``base``; ``bounded(n)`` gives depth up to ``n``.

    Parameterised operations are enumerated with their parameter drawn from
    ``params[op]`` (a ``SemSet``).
    """

    def __init__(self, base: SemSet, ops: Sequence[OpDecl], params: Mapping[str, SemSet] = None):
        self.base = base
        self.ops = tuple(ops)
        self.params = dict(params or {})
        self.finite = not any(o.arity > 0 for o in self.ops) or (
            _empty(base) and not any(o.arity == 0 for o in self.ops))

    def _param_choices(self, op, n):
        if op.param is None:
            return [None]
        return list(self.params[op.name].bounded(n))

    def bounded(self, n):
        levels = [Leaf(x) for x in self.base.bounded(n)]
        for op in self.ops:
            if op.arity == 0:
                levels += [Node(op.name, p, ()) for p in self._param_choices(op, n)]
        current = list(levels)
        for _ in range(n):
            nxt = [Leaf(x) for x in self.base.bounded(n)]
            for op in self.ops:
                for p in self._param_choices(op, n):
                    for kids in itertools.product(current, repeat=op.arity):
                        nxt.append(Node(op.name, p, tuple(kids)))
            current = nxt
        return current

    def __iter__(self):
        if self.finite:
            yield from self.bounded(1)
            return
        yield from super().__iter__()

    def __contains__(self, t):
        if isinstance(t, Leaf):
            return t.value in self.base
        if isinstance(t, Node):
            for o in self.ops:
                if o.name == t.op:
                    if len(t.children) != o.arity:
                        return False
                    if (o.param is None) != (t.param is None):
                        return False
                    if o.param is not None and t.param not in self.params[o.name]:
                        return False
                    return all(c in self for c in t.children)
        return False

    def __eq__(self, other):
        return isinstance(other, TreeSet) and (self.base, self.ops) == (other.base, other.ops)

    def __hash__(self):
        return hash(("tree", self.base, self.ops))

    def __repr__(self):
        return f"Tree({self.base!r})"


# ---------------------------------------------------------------- monads


class Monad:
    """A monad on sets given by ``apply``/``unit``/``bind`` plus the operations
    interpreted on its free algebras.  Strength is not reified: continuations
    are Python closures and may capture the ambient environment."""

    kind: str = "?"

    def apply(self, X: SemSet) -> SemSet:
        raise NotImplementedError

    def unit(self, x):
        raise NotImplementedError

    def bind(self, t, k):
        raise NotImplementedError

    def map(self, f, t):
        return self.bind(t, lambda x: self.unit(f(x)))

    def join(self, tt):
        return self.bind(tt, lambda t: t)

    def operations(self) -> tuple[OpDecl, ...]:
        """The canonical operation signature this monad interprets."""
        return ()

    def supports(self, op: OpDecl) -> bool:
        return any(o.name == op.name and o.arity == op.arity and o.param == op.param
                   for o in self.operations())

    def op(self, name: str, param, args: Sequence):
        raise UnsupportedOperation(f"{self.kind} monad has no operation {name!r}")

    def __repr__(self):
        return f"<{self.kind} monad>"


OR = OpDecl("or", 2)
FAIL = OpDecl("fail", 0)


class PowersetMonad(Monad):
    kind = "pfin"

    def apply(self, X):
        return PowerSet(X)

    def unit(self, x):
        return frozenset([x])

    def bind(self, t, k):
        out = set()
        for x in t:
            out |= k(x)
        return frozenset(out)

    def operations(self):
        return (OR, FAIL)

    def op(self, name, param, args):
        if name == "or":
            return args[0] | args[1]
        if name == "fail":
            return frozenset()
        return super().op(name, param, args)


class ListMonad(Monad):
    kind = "list"

    def apply(self, X):
        return ListSet(X)

    def unit(self, x):
        return (x,)

    def bind(self, t, k):
        return tuple(y for x in t for y in k(x))

    def operations(self):
        return (OR, FAIL)

    def op(self, name, param, args):
        if name == "or":
            return args[0] + args[1]
        if name == "fail":
            return ()
        return super().op(name, param, args)


class ExceptionMonad(Monad):
    """``X + E``; raising ``e`` is the nullary operation ``raise_<e>``."""

    kind = "exception"

    def __init__(self, exceptions: SemSet):
        if not exceptions.finite:
            raise NonFiniteError("exception set must be finite")
        self.E = exceptions
        self._by_op = {f"raise_{e.name if isinstance(e, Atom) else show(e)}": e for e in exceptions}

    def apply(self, X):
        return SumSet(X, self.E)

    def unit(self, x):
        return InlV(x)

    def bind(self, t, k):
        if isinstance(t, InlV):
            return k(t.value)
        return t

    def operations(self):
        return tuple(OpDecl(name, 0) for name in self._by_op)

    def raise_op(self, e) -> str:
        for name, v in self._by_op.items():
            if v == e:
                return name
        raise KeyError(e)

    def op(self, name, param, args):
        if name in self._by_op:
            return InrV(self._by_op[name])
        return super().op(name, param, args)

    def __repr__(self):
        return f"<exception monad E={self.E!r}>"


class StateMonad(Monad):
    """``S => (X x S)``; ``read`` is |S|-ary (one branch per state, in the
    enumeration order of S) and ``write_<s>`` is unary."""

    kind = "state"

    def __init__(self, states: SemSet):
        if not states.finite:
            raise NonFiniteError("state set must be finite")
        if len(states) == 0:
            raise ValueError("state set must be nonempty")
        self.S = states
        self.states = list(states)
        self._writes = {f"write_{s.name if isinstance(s, Atom) else show(s)}": s for s in self.states}

    def apply(self, X):
        return FunctionSpace(self.S, ProductSet(X, self.S))

    def unit(self, x):
        return FunV(self.S, lambda s: PairV(x, s))

    def bind(self, t, k):
        def run(s):
            r = t(s)
            return k(r.fst)(r.snd)
        return FunV(self.S, run)

    def operations(self):
        return (OpDecl("read", len(self.states)),) + tuple(OpDecl(n, 1) for n in self._writes)

    def write_op(self, s) -> str:
        for name, v in self._writes.items():
            if v == s:
                return name
        raise KeyError(s)

    def op(self, name, param, args):
        if name == "read":
            return read_op(self.S, self.states, args)
        if name in self._writes:
            return write_op(self.S, self._writes[name], args[0])
        return super().op(name, param, args)

    def __repr__(self):
        return f"<state monad S={self.S!r}>"


def read_op(S: SemSet, states: list, branches: Sequence):
    index = {s: i for i, s in enumerate(states)}
    return FunV(S, lambda s: branches[index[s]](s))


def write_op(S: SemSet, new_state, body):
    return FunV(S, lambda s: body(new_state))


class FreeMonad(Monad):
    """Operation trees over a signature, compared structurally."""

    kind = "free"

    def __init__(self, sig: Signature, params: Mapping[str, SemSet] = None):
        self.sig = sig
        self.params = dict(params or {})
        for o in sig.operations:
            if o.param is not None and o.name not in self.params:
                raise ValueError(f"free monad needs a parameter set for {o.name!r}")

    def apply(self, X):
        return TreeSet(X, self.sig.operations, self.params)

    def unit(self, x):
        return Leaf(x)

    def bind(self, t, k):
        if isinstance(t, Leaf):
            return k(t.value)
        return Node(t.op, t.param, tuple(self.bind(c, k) for c in t.children))

    def operations(self):
        return self.sig.operations

    def op(self, name, param, args):
        if not self.sig.has_op(name):
            return super().op(name, param, args)
        return Node(name, param, tuple(args))

    def __repr__(self):
        return "<free monad>"


def make_monad(kind: str, **params) -> Monad:
    if kind == "pfin":
        return PowersetMonad()
    if kind == "list":
        return ListMonad()
    if kind == "exception":
        return ExceptionMonad(_as_set(params["exceptions"]))
    if kind == "state":
        S = _as_set(params["states"])
        if S.finite and len(S) == 0:
            raise ValueError("state monad needs a nonempty state set")
        return StateMonad(S)
    if kind == "free":
        return FreeMonad(params["signature"], params.get("params"))
    raise ValueError(f"unknown monad kind {kind!r}")


def _as_set(x) -> SemSet:
    if isinstance(x, SemSet):
        return x
    return atoms(x)


# ---------------------------------------------------------------- computation objects


class CompObject:
    """Interpretation of a computation type.

    ``extend(t, k)`` sequences a monadic value ``t`` over some set with a
    continuation into the carrier; ``op`` interprets signature operations
    on the carrier.
    """

    carrier: SemSet

    def extend(self, t, k):
        raise NotImplementedError

    def op(self, name: str, param, args: Sequence):
        raise NotImplementedError


class FreeAlgebra(CompObject):
    def __init__(self, monad: Monad, X: SemSet):
        self.monad, self.X = monad, X
        self.carrier = monad.apply(X)

    def extend(self, t, k):
        return self.monad.bind(t, k)

    def op(self, name, param, args):
        return self.monad.op(name, param, args)


class PowerAlgebra(CompObject):
    def __init__(self, X: SemSet, body: CompObject):
        self.X, self.body = X, body
        self.carrier = FunctionSpace(X, body.carrier)

    def extend(self, t, k):
        return FunV(self.X, lambda x: self.body.extend(t, lambda y: k(y)(x)))

    def op(self, name, param, args):
        return FunV(self.X, lambda x: self.body.op(name, param, [a(x) for a in args]))


class WithAlgebra(CompObject):
    def __init__(self, left: CompObject, right: CompObject):
        self.left, self.right = left, right
        self.carrier = ProductSet(left.carrier, right.carrier)

    def extend(self, t, k):
        return PairV(self.left.extend(t, lambda y: k(y).fst),
                     self.right.extend(t, lambda y: k(y).snd))

    def op(self, name, param, args):
        return PairV(self.left.op(name, param, [a.fst for a in args]),
                     self.right.op(name, param, [a.snd for a in args]))


class TopAlgebra(CompObject):
    carrier = UNIT_SET

    def extend(self, t, k):
        return UNIT_V

    def op(self, name, param, args):
        return UNIT_V


# ---------------------------------------------------------------- models


class Model:
    """A CBPV model over sets.

    Subclasses supply ``free_obj``, ``power_obj``, ``with_obj`` and
    ``top_obj``; base types and constants are plain dictionaries.
    """

    sig: Signature
    monad: Monad
    base_vtype: dict[str, SemSet]
    base_ctype: dict[str, CompObject]
    const_interp: dict[str, Any]

    def free_obj(self, X: SemSet) -> CompObject:
        raise NotImplementedError

    def power_obj(self, X: SemSet, body: CompObject) -> CompObject:
        raise NotImplementedError

    def with_obj(self, left: CompObject, right: CompObject) -> CompObject:
        raise NotImplementedError

    @property
    def top_obj(self) -> CompObject:
        raise NotImplementedError


class AlgebraModel(Model):
    kind = "algebra"

    def __init__(self, monad: Monad, sig: Signature, bases: Mapping[str, SemSet],
                 consts: Mapping[str, Any] = None, comp_bases: Mapping[str, SemSet] = None):
        for op in sig.operations:
            if not monad.supports(op):
                raise UnsupportedOperation(
                    f"operation {op.name}/{op.arity} is not interpreted by the {monad.kind} monad")
        missing = set(sig.value_bases) - set(bases)
        if missing:
            raise ValueError(f"no interpretation for value base types {sorted(missing)}")
        self.monad, self.sig = monad, sig
        self.base_vtype = {k: _as_set(v) for k, v in bases.items()}
        self.base_ctype = {k: FreeAlgebra(monad, _as_set(v)) for k, v in (comp_bases or {}).items()}
        self.const_interp = dict(consts or {})
        self._top = TopAlgebra()

    def free_obj(self, X):
        return FreeAlgebra(self.monad, X)

    def power_obj(self, X, body):
        return PowerAlgebra(X, body)

    def with_obj(self, left, right):
        return WithAlgebra(left, right)

    @property
    def top_obj(self):
        return self._top

    def __repr__(self):
        return f"<algebra model of {self.monad!r}>"


def algebra_model(m: Monad, sig: Signature, bases: Mapping[str, Any],
                  consts: Mapping[str, Any] = None, comp_bases: Mapping[str, Any] = None) -> AlgebraModel:
    return AlgebraModel(m, sig, bases, consts, comp_bases)


class StorageObject(CompObject):
    """A computation object of the storage model: a set ``D`` with carrier ``S => D``."""

    def __init__(self, model: "StorageModel", D: SemSet):
        self.model = model
        self.S = model.S
        self.D = D
        self.carrier = FunctionSpace(self.S, D)

    def extend(self, t, k):
        def run(s):
            r = t(s)
            return k(r.fst)(r.snd)
        return FunV(self.S, run)

    def op(self, name, param, args):
        return self.model.monad.op(name, param, args)


class StorageModel(Model):
    kind = "storage"

    def __init__(self, states: SemSet, bases: Mapping[str, SemSet], consts: Mapping[str, Any] = None,
                 sig: Optional[Signature] = None, comp_bases: Mapping[str, SemSet] = None):
        states = _as_set(states)
        if not states.finite or len(states) == 0:
            raise ValueError("storage model needs a finite nonempty state set")
        self.S = states
        self.monad = StateMonad(states)
        if sig is None:
            sig = Signature(tuple(bases), tuple(comp_bases or ()), self.monad.operations())
        for op in sig.operations:
            if not self.monad.supports(op):
                raise UnsupportedOperation(f"storage model has no operation {op.name}/{op.arity}")
        self.sig = sig
        self.base_vtype = {k: _as_set(v) for k, v in bases.items()}
        self.base_ctype = {k: StorageObject(self, _as_set(v)) for k, v in (comp_bases or {}).items()}
        self.const_interp = dict(consts or {})
        self._top = TopAlgebra()

    def free_obj(self, X):
        return StorageObject(self, ProductSet(X, self.S))

    def power_obj(self, X, body):
        return PowerAlgebra(X, body)

    def with_obj(self, left, right):
        return WithAlgebra(left, right)

    @property
    def top_obj(self):
        return self._top

    def __repr__(self):
        return f"<storage model S={self.S!r}>"


def storage_model(S, bases: Mapping[str, Any], consts: Mapping[str, Any] = None,
                  sig: Optional[Signature] = None, comp_bases: Mapping[str, Any] = None) -> StorageModel:
    return StorageModel(S, bases, consts, sig, comp_bases)


class ProductObject(CompObject):
    """Pair of computation objects; continuations are pairs ``(k1, k2)``."""

    def __init__(self, left: CompObject, right: CompObject):
        self.left, self.right = left, right
        self.carrier = ProductSet(left.carrier, right.carrier)

    def extend(self, t, k):
        k1, k2 = k
        return PairV(self.left.extend(t.fst, k1), self.right.extend(t.snd, k2))

    def op(self, name, param, args):
        p1 = p2 = None
        if param is not None:
            p1, p2 = param.fst, param.snd
        return PairV(self.left.op(name, p1, [a.fst for a in args]),
                     self.right.op(name, p2, [a.snd for a in args]))


class ProductMonad(Monad):
    """Componentwise monad on pairs of sets (acting on ``ProductSet``s)."""

    kind = "product"

    def __init__(self, left: Monad, right: Monad):
        self.left, self.right = left, right

    def apply(self, X):
        return ProductSet(self.left.apply(X.left), self.right.apply(X.right))

    def unit(self, x):
        return PairV(self.left.unit(x.fst), self.right.unit(x.snd))

    def bind(self, t, k):
        # k must act componentwise; it is probed one component at a time
        return PairV(self.left.bind(t.fst, lambda a: k[0](a)),
                     self.right.bind(t.snd, lambda b: k[1](b)))

    def operations(self):
        return tuple(o for o in self.left.operations() if self.right.supports(o))

    def op(self, name, param, args):
        p1 = p2 = None
        if param is not None:
            p1, p2 = param.fst, param.snd
        return PairV(self.left.op(name, p1, [a.fst for a in args]),
                     self.right.op(name, p2, [a.snd for a in args]))

    def __repr__(self):
        return f"<product of {self.left!r} and {self.right!r}>"


class ProductModel(Model):
    kind = "product"

    def __init__(self, left: Model, right: Model):
        if left.sig != right.sig:
            raise ValueError("product of models needs a shared signature")
        self.left, self.right = left, right
        self.sig = left.sig
        self.monad = ProductMonad(left.monad, right.monad)
        self.base_vtype = {k: ProductSet(left.base_vtype[k], right.base_vtype[k])
                           for k in left.base_vtype if k in right.base_vtype}
        self.base_ctype = {k: ProductObject(left.base_ctype[k], right.base_ctype[k])
                           for k in left.base_ctype if k in right.base_ctype}
        self.const_interp = {k: PairV(left.const_interp[k], right.const_interp[k])
                             for k in left.const_interp if k in right.const_interp}

    def free_obj(self, X):
        return ProductObject(self.left.free_obj(X.left), self.right.free_obj(X.right))

    def power_obj(self, X, body):
        return ProductObject(self.left.power_obj(X.left, body.left),
                             self.right.power_obj(X.right, body.right))

    def with_obj(self, left, right):
        return ProductObject(self.left.with_obj(left.left, right.left),
                             self.right.with_obj(left.right, right.right))

    @property
    def top_obj(self):
        return ProductObject(self.left.top_obj, self.right.top_obj)

    def __repr__(self):
        return f"<product of {self.left!r} and {self.right!r}>"


def product_model(m1: Model, m2: Model) -> ProductModel:
    return ProductModel(m1, m2)


# ---------------------------------------------------------------- law checks


@dataclass
class LawReport:
    name: str
    checked: dict
    counterexamples: list

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        counts = ", ".join(f"{k}={v}" for k, v in self.checked.items())
        verdict = "no counterexample found" if self.ok else f"{len(self.counterexamples)} counterexample(s)"
        return f"{self.name}: {verdict} ({counts})"


def functions(dom: SemSet, values: Sequence) -> Iterator[FunV]:
    xs = list(dom)
    for ys in itertools.product(values, repeat=len(xs)):
        yield FunV.from_table(dom, dict(zip(xs, ys)))


def _count_functions(dom_size: int, cod_size: int) -> int:
    return cod_size ** dom_size


def check_monad_laws(m: Monad, size_bound: int = 4, cont_bound: int = 2, depth: int = 2,
                     budget: int = 2_000_000, max_reports: int = 20) -> LawReport:
    """Exhaustively check the unit and associativity laws.

    Carriers ``X`` range over sizes ``0..size_bound``.  Continuations
    ``X -> T Y`` and ``Y -> T Z`` range over all functions into the elements
    of ``T Y`` / ``T Z`` of size at most ``depth`` with ``|Y|, |Z| <=
    cont_bound``.  Raises ``BudgetExceeded`` when a law's instance count
    exceeds ``budget``.
    """
    bad: list = []
    checked = {"left_unit": 0, "right_unit": 0, "assoc": 0}

    def note(law, **data):
        if len(bad) < max_reports:
            bad.append({"law": law, **{k: show(v) for k, v in data.items()}})

    def T(X):
        return list(m.apply(X).bounded(depth))

    sizes = range(size_bound + 1)
    cont_sizes = range(cont_bound + 1)
    for nx in sizes:
        X = carrier_of_size(nx, "x")
        TX = T(X)
        for t in TX:
            checked["right_unit"] += 1
            if m.bind(t, m.unit) != t:
                note("right_unit", t=t)
        for ny in cont_sizes:
            Y = carrier_of_size(ny, "y")
            TY = T(Y)
            n = len(X) * _count_functions(nx, len(TY))
            if n > budget:
                raise BudgetExceeded(f"left unit at |X|={nx}, |Y|={ny}: {n} instances")
            for k in functions(X, TY):
                for x in X:
                    checked["left_unit"] += 1
                    if m.bind(m.unit(x), k) != k(x):
                        note("left_unit", x=x, k=k)
            for nz in cont_sizes:
                Z = carrier_of_size(nz, "z")
                TZ = T(Z)
                n = len(TX) * _count_functions(nx, len(TY)) * _count_functions(ny, len(TZ))
                if n > budget:
                    raise BudgetExceeded(f"associativity at |X|={nx}, |Y|={ny}, |Z|={nz}: {n} instances")
                gs = list(functions(Y, TZ))
                for f in functions(X, TY):
                    for g in gs:
                        fg = lambda x: m.bind(f(x), g)  # noqa: E731
                        for t in TX:
                            checked["assoc"] += 1
                            if m.bind(m.bind(t, f), g) != m.bind(t, fg):
                                note("assoc", t=t, f=f, g=g)
    return LawReport(f"monad laws ({m.kind})", checked, bad)


def check_algebraicity(m: Monad, ops: Optional[Sequence[OpDecl]] = None, size_bound: int = 3,
                       depth: int = 1, budget: int = 2_000_000, max_reports: int = 20,
                       cont_bound: Optional[int] = None) -> LawReport:
    """``bind(op(t1..tn), k) == op(bind(t1, k) .. bind(tn, k))`` exhaustively.

    Arguments live over carriers of size ``0..size_bound``; continuations map
    into carriers of size ``0..cont_bound`` (default ``size_bound``).
    Parameterised operations are skipped unless the monad is free (where the
    parameter set is known).
    """
    cont_bound = size_bound if cont_bound is None else cont_bound
    ops = tuple(ops if ops is not None else m.operations())
    bad: list = []
    checked = {}
    for op in ops:
        checked[op.name] = 0
        if op.param is not None and not isinstance(m, FreeMonad):
            continue
        params = [None] if op.param is None else list(m.params[op.name].bounded(depth))
        for nx in range(size_bound + 1):
            X = carrier_of_size(nx, "x")
            TX = list(m.apply(X).bounded(depth))
            for ny in range(cont_bound + 1):
                Y = carrier_of_size(ny, "y")
                TY = list(m.apply(Y).bounded(depth))
                n = len(TX) ** op.arity * _count_functions(nx, len(TY)) * len(params)
                if n > budget:
                    raise BudgetExceeded(f"algebraicity of {op.name} at |X|={nx}, |Y|={ny}: {n}")
                for k in functions(X, TY):
                    for p in params:
                        for ts in itertools.product(TX, repeat=op.arity):
                            checked[op.name] += 1
                            lhs = m.bind(m.op(op.name, p, list(ts)), k)
                            rhs = m.op(op.name, p, [m.bind(t, k) for t in ts])
                            if lhs != rhs and len(bad) < max_reports:
                                bad.append({"op": op.name, "args": [show(t) for t in ts], "k": show(k)})
    return LawReport(f"algebraicity ({m.kind})", checked, bad)
