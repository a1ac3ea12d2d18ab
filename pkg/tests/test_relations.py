import itertools

import pytest

from cbpv.relations import (AlgebraLawError, BinRel, LawBounds, Pred, all_preds, check_lifting_laws,
                            em_lifting, em_pair_lifting, em_size_matched, em_without_second_clause,
                            erratic_choice_lifting, exception_lifting, free_lifting, free_membership,
                            list_pair_lifting, pair_list_lifting, tt_crosscheck, tt_lifting)
from cbpv.relations import BOOL_SET, ONE, ZERO
from cbpv.semantics import (Atom, InlV, InrV, Leaf, Node, PowersetMonad, atoms, carrier_of_size,
                            make_monad)
from cbpv.syntax import Signature

from oracles import erratic_family, tree_related

a, b = Atom("a"), Atom("b")
AB = atoms(["a", "b"])
SIG = Signature.build([], [], [("or", 2), ("fail", 0)])
FAST = LawBounds(3, 3, 3, 3, 2)


def OR(l, r):
    return Node("or", None, (l, r))


FAIL = Node("fail", None, ())


# -- exception


def test_exception_membership():
    E = atoms(["e1", "e2"])
    lift = exception_lifting(Pred.from_members(E, [Atom("e1")]))
    L = lift(Pred.from_members(AB, [a]))
    assert InlV(a) in L and InrV(Atom("e1")) in L
    assert InrV(Atom("e2")) not in L and InlV(b) not in L


def test_full_exception_lifting_is_full():
    E = atoms(["e1", "e2"])
    L = exception_lifting(Pred.full(E))(Pred.full(AB))
    assert all(t in L for t in make_monad("exception", exceptions=E).apply(AB))


def test_exception_lifting_declares_related_raises_only():
    E = atoms(["e1", "e2"])
    lift = exception_lifting(Pred.from_members(E, [Atom("e1")]))
    assert [o.name for o in lift.ops] == ["raise_e1"]


@pytest.mark.parametrize("nE", [0, 1, 2])
def test_exception_laws_every_related_set(nE):
    E = carrier_of_size(nE, "e")
    for Ebar in all_preds(E):
        rep = check_lifting_laws(exception_lifting(Ebar), FAST)
        assert rep.ok, rep.counterexamples


def test_unrelated_raise_breaks_op_closure():
    E = atoms(["e1", "e2"])
    lift = exception_lifting(Pred.from_members(E, [Atom("e1")]))
    rep = check_lifting_laws(lift, LawBounds(1, 1, 0, 0, 0), ops=lift.monad.operations())
    assert not rep.ok
    assert {c["op"] for c in rep.counterexamples} == {"raise_e2"}


# -- free


def test_free_membership_examples():
    R = Pred.from_members(AB, [a])
    L = free_lifting(SIG)(R)
    assert OR(Leaf(a), Leaf(a)) in L
    assert OR(Leaf(a), Leaf(b)) not in L


def test_fail_is_in_every_free_lift():
    for R in all_preds(AB):
        assert FAIL in free_lifting(SIG)(R)


def test_free_membership_matches_structural_oracle():
    trees = make_monad("free", signature=SIG).apply(AB).bounded(2)
    for R in all_preds(AB):
        for t in trees:
            assert free_membership(t, R) == tree_related(t, R.members())


def test_free_laws_small():
    rep = check_lifting_laws(free_lifting(SIG), LawBounds(2, 3, 2, 2, 1))
    assert rep.ok, rep.counterexamples


# -- tt


def test_erratic_family_two_atoms():
    L = erratic_choice_lifting()(Pred.from_members(AB, [a]))
    fam = {p for p in PowersetMonad().apply(AB) if p in L}
    assert fam == erratic_family([a, b], {a}) == {frozenset([a]), frozenset([a, b])}


def test_erratic_family_full_relation():
    L = erratic_choice_lifting()(Pred.full(AB))
    fam = {p for p in PowersetMonad().apply(AB) if p in L}
    assert fam == erratic_family([a, b], {a, b})
    assert fam == {frozenset([a]), frozenset([b]), frozenset([a, b])}


@pytest.mark.parametrize("n", range(5))
def test_erratic_lifting_against_brute_force(n):
    X = carrier_of_size(n)
    lift = erratic_choice_lifting()
    for R in all_preds(X):
        fam = {p for p in PowersetMonad().apply(X) if p in lift(R)}
        assert fam == erratic_family(list(X), R.members())


@pytest.mark.parametrize("n", range(5))
def test_tt_monotone(n):
    X = carrier_of_size(n)
    lift = erratic_choice_lifting()
    PX = list(PowersetMonad().apply(X))
    fams = {R.members(): {p for p in PX if p in lift(R)} for R in all_preds(X)}
    for R1, R2 in itertools.product(fams, repeat=2):
        if R1 <= R2:
            assert fams[R1] <= fams[R2]


def test_tt_laws():
    rep = check_lifting_laws(erratic_choice_lifting(), FAST)
    assert rep.ok, rep.counterexamples


def test_tt_not_closed_under_fail():
    lift = erratic_choice_lifting()
    rep = check_lifting_laws(lift, LawBounds(1, 1, 0, 0, 0), ops=[o for o in lift.monad.operations()])
    assert {c["op"] for c in rep.counterexamples} == {"fail"}


def test_invalid_parameter_algebra_rejected():
    with pytest.raises(AlgebraLawError):
        tt_lifting(PowersetMonad(), BOOL_SET, lambda p: ONE if ZERO in p else ONE,
                   Pred.from_members(BOOL_SET, [ONE]))


def test_crosscheck_rows():
    rows = tt_crosscheck(4)
    assert len(rows) == 1 + 2 + 4 + 8 + 16
    for r in rows:
        assert r.only_computed == r.computed - r.claimed
        assert r.only_claimed == r.claimed - r.computed
        assert r.empty_in_claimed and not r.empty_in_computed
        assert r.matches_meets_R
        assert frozenset() in r.only_claimed
        assert "empty set" in r.describe()
    assert not any(r.agrees for r in rows)


# -- em and lists


ID = BinRel.identity(AB)


def test_em_examples():
    L = em_pair_lifting(ID)
    assert L(frozenset(), ())
    assert L(frozenset([a]), (a, a))
    assert not L(frozenset([a]), (b,))


@pytest.mark.parametrize("n", range(4))
def test_em_identity_is_set_of_elements(n):
    X = carrier_of_size(n)
    L = em_pair_lifting(BinRel.identity(X))
    lists = [l for k in range(4) for l in itertools.product(list(X), repeat=k)]
    for p in PowersetMonad().apply(X):
        for l in lists:
            assert L(p, l) == (p == frozenset(l))


def test_pair_list_examples():
    L = pair_list_lifting(ID)
    assert L((), ())
    assert not L((a,), (a, a))
    R = BinRel.from_pairs(AB, AB, [(a, b), (b, b)])
    Lr = pair_list_lifting(R)
    for l1 in itertools.product([a, b], repeat=2):
        for l2 in itertools.product([a, b], repeat=2):
            assert Lr(l1, l2) == all((x, y) in {(a, b), (b, b)} for x, y in zip(l1, l2))


def test_em_laws_small():
    rep = check_lifting_laws(em_lifting(), LawBounds(2, 3, 1, 2, 2))
    assert rep.ok, rep.counterexamples


def test_list_pair_laws():
    rep = check_lifting_laws(list_pair_lifting(), LawBounds(2, 3, 1, 2, 2))
    assert rep.ok, rep.counterexamples


def test_clause_dropped_em_still_lawful():
    rep = check_lifting_laws(em_without_second_clause(), LawBounds(2, 3, 1, 2, 2))
    assert rep.ok


def test_size_matched_em_rejected():
    rep = check_lifting_laws(em_size_matched(), LawBounds(1, 2, 0, 0, 0))
    assert not rep.ok
    c = rep.counterexamples[0]
    assert c["law"] == "op" and c["op"] == "or"
