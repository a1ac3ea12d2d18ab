"""Reference implementations used only by the tests.

Each oracle is written directly against the definitions and shares no code
with the package beyond the value constructors.
"""
import itertools
import random

from cbpv.semantics import UNIT_V, InlV, InrV, Leaf, Node, PairV
from cbpv import syntax as S
from cbpv.generate import TermGenerator


def choice_eval(term, env, kind, consts=None):
    """Closed choice programs (or/fail) straight into sets or lists.

    Handles the computation formers the generator emits for ``F A`` targets;
    lambdas become Python closures.
    """
    consts = consts or {}
    unit = (lambda x: frozenset([x])) if kind == "set" else (lambda x: (x,))
    empty = frozenset() if kind == "set" else ()

    def join(parts):
        if kind == "set":
            out = frozenset()
            for p in parts:
                out |= p
            return out
        return tuple(y for p in parts for y in p)

    def val(v, env):
        if isinstance(v, S.Var):
            return env[v.name]
        if isinstance(v, S.UnitVal):
            return UNIT_V
        if isinstance(v, S.Pair):
            return PairV(val(v.left, env), val(v.right, env))
        if isinstance(v, S.Inl):
            return InlV(val(v.value, env))
        if isinstance(v, S.Inr):
            return InrV(val(v.value, env))
        if isinstance(v, S.Thunk):
            return ("thunk", v.body, env)
        if isinstance(v, S.Const):
            return consts[v.name]
        raise TypeError(v)

    def comp(m, env):
        if isinstance(m, S.Return):
            return unit(val(m.value, env))
        if isinstance(m, S.To):
            return join(comp(m.then, {**env, m.var: x}) for x in comp(m.first, env))
        if isinstance(m, S.Op):
            if m.name == "fail":
                return empty
            l, r = (comp(a, env) for a in m.args)
            if callable(l):
                return lambda x: join([l(x), r(x)])
            return join([l, r])
        if isinstance(m, S.Force):
            _, body, cenv = val(m.value, env)
            return comp(body, cenv)
        if isinstance(m, S.Lam):
            return lambda x: comp(m.body, {**env, m.var: x})
        if isinstance(m, S.App):
            return comp(m.fn, env)(val(m.arg, env))
        if isinstance(m, S.Let):
            return comp(m.body, {**env, m.var: val(m.value, env)})
        if isinstance(m, S.PmPair):
            p = val(m.value, env)
            return comp(m.body, {**env, m.left: p.fst, m.right: p.snd})
        if isinstance(m, S.Case):
            s = val(m.value, env)
            if isinstance(s, InlV):
                return comp(m.lbody, {**env, m.lvar: s.value})
            return comp(m.rbody, {**env, m.rvar: s.value})
        if isinstance(m, S.Fst):
            return comp(m.body, env)[0]
        if isinstance(m, S.Snd):
            return comp(m.body, env)[1]
        if isinstance(m, S.CPair):
            return (comp(m.left, env), comp(m.right, env))
        if isinstance(m, S.CUnit):
            return None
        if isinstance(m, S.Const):
            return consts[m.name]
        raise TypeError(m)

    return comp(term, env)


def tree_related(t, members):
    """Free-lifting membership by structural recursion on the tree."""
    if isinstance(t, Leaf):
        return t.value in members
    assert isinstance(t, Node)
    return all(tree_related(c, members) for c in t.children)


def state_bind(f, k, states):
    """``s -> let (x, s') = f(s) in k(x)(s')`` as an explicit table."""
    out = {}
    for s in states:
        r = f(s)
        out[s] = k(r.fst)(r.snd)
    return out


def erratic_family(X, R):
    """Subsets p of X passing every test f: X -> {0,1} with f(R) = {1}: '1 in f(p)'."""
    X = list(X)
    fam = set()
    subsets = [frozenset(c) for n in range(len(X) + 1) for c in itertools.combinations(X, n)]
    tests = []
    for bits in itertools.product((0, 1), repeat=len(X)):
        f = dict(zip(X, bits))
        if all(f[x] == 1 for x in R):
            tests.append(f)
    for p in subsets:
        if all(any(f[x] == 1 for x in p) for f in tests):
            fam.add(p)
    return fam


def pred_hom_count(nz, tz, na, ra, nb, rb):
    """Functions Z x A -> B sending T x R_A into R_B."""
    constrained = len(tz) * len(ra)
    return nb ** (nz * na - constrained) * len(rb) ** constrained


BETA_ARGS = [S.UNIT, S.BOOL, S.BaseT("b"), S.ProdT(S.BaseT("b"), S.BOOL), S.ThunkT(S.FreeT(S.BaseT("b")))]
BETA_BODIES = [S.FreeT(S.BaseT("b")), S.FreeT(S.BOOL), S.ArrowT(S.BOOL, S.FreeT(S.BaseT("b"))),
               S.WithT(S.FreeT(S.UNIT), S.FreeT(S.BaseT("b")))]


def beta_corpus(sig, consts, n, seed):
    """``(redex, reduct, type)`` triples; reducts come from syntactic substitution.

    Cycles through ``(return V) to v. M``, ``(\\v. M) V``, ``force (thunk M)``
    and ``let v = V in M``.
    """
    rng = random.Random(seed)
    gen = TermGenerator(sig, consts, seed)
    out = []
    for i in range(n):
        a_ty, b_ty = rng.choice(BETA_ARGS), rng.choice(BETA_BODIES)
        body = gen.open([("v", a_ty)], b_ty, rng.randint(1, 4))
        value = gen.closed_value(a_ty)
        reduct = S.substitute(body, "v", value)
        redex = [S.To(S.Return(value), "v", body), S.App(S.Lam("v", body, a_ty), value),
                 S.Force(S.Thunk(reduct)), S.Let("v", value, body)][i % 4]
        out.append((redex, reduct, b_ty))
    return out
