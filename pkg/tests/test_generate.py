import pytest
from hypothesis import given, strategies as st

from cbpv.generate import TermGenerator, UninhabitedError, generate_terms
from cbpv.syntax import (BOOL, EMPTY, UNIT, ArrowT, BaseT, Const, FreeT, Lam, Op, ProdT, Return,
                         Signature, ThunkT, TOP, WithT, free_vars, size)
from cbpv.typecheck import typechecks

SIG = Signature.build(["b"], [], [("or", 2), ("fail", 0)])
B = BaseT("b")


def test_depth_one_gives_leaves():
    for seed in range(20):
        (t,) = generate_terms(SIG, FreeT(BOOL), 1, seed, 1)
        assert isinstance(t, Return) or (isinstance(t, Op) and t.args == ())


def test_depth_one_fills_function_shape():
    for t in generate_terms(SIG, ArrowT(BOOL, WithT(FreeT(UNIT), TOP)), 1, 0, 10):
        assert isinstance(t, Lam)


def test_same_seed_same_terms():
    args = (SIG, FreeT(ProdT(BOOL, BOOL)), 5, 1234, 50)
    assert generate_terms(*args) == generate_terms(*args)
    assert generate_terms(*args) != generate_terms(SIG, FreeT(ProdT(BOOL, BOOL)), 5, 1235, 50)


def test_uninhabited_target():
    sig = Signature.build(["b"], [], [])
    with pytest.raises(UninhabitedError):
        generate_terms(sig, FreeT(B), 3, 0, 1)
    with pytest.raises(UninhabitedError):
        generate_terms(SIG, FreeT(BOOL), 0, 0, 1)


def test_constants_make_base_types_inhabited():
    sig = Signature.build(["b"], [], [])
    terms = generate_terms(sig, FreeT(B), 3, 0, 20, consts={"c": B})
    assert all(typechecks(t, FreeT(B), env={"c": B}, sig=sig) for t in terms)
    assert any(isinstance(t, Return) and t.value == Const("c") for t in terms)


def test_corpus_is_not_dominated_by_failure():
    terms = generate_terms(SIG, FreeT(B), 5, 7, 400, consts={"c": B})
    leaves = sum(1 for t in terms if isinstance(t, Op) and t.name == "fail")
    assert leaves < 100
    assert max(size(t) for t in terms) > 10


def test_open_terms_use_context():
    gen = TermGenerator(SIG, seed=3)
    bodies = [gen.open([("v", B)], FreeT(B), 3) for _ in range(30)]
    assert any("v" in free_vars(t) for t in bodies)
    assert all(free_vars(t) <= {"v"} for t in bodies)


@given(st.integers(min_value=0, max_value=2**63 - 1),
       st.sampled_from([FreeT(BOOL), FreeT(ThunkT(FreeT(UNIT))), ArrowT(BOOL, FreeT(BOOL)),
                        WithT(FreeT(UNIT), FreeT(ProdT(UNIT, BOOL))), ArrowT(EMPTY, FreeT(BOOL))]),
       st.integers(min_value=1, max_value=5))
def test_generated_terms_are_closed_and_typed(seed, ty, depth):
    for t in generate_terms(SIG, ty, depth, seed, 5):
        assert free_vars(t) == frozenset()
        assert typechecks(t, ty, sig=SIG)
