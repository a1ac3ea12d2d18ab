
import pytest

from cbpv.evaluate import EvalError, eval_comp, eval_value, evaluate
from cbpv.generate import generate_terms
from cbpv.semantics import (UNIT_V, Atom, FunV, InlV, InrV, PairV, algebra_model, atoms, make_monad,
                            product_model, storage_model)
from cbpv.syntax import (BOOL, UNIT_VAL, ArrowT, BaseT, FreeT, OpDecl, Pair,
                         ProdT, Return, Signature, Thunk, To, Var, WithT, parse_program)
from cbpv.typecheck import elaborate

from oracles import beta_corpus, choice_eval

B = BaseT("b")
a, b = Atom("a"), Atom("b")
AB = atoms(["a", "b"])
CONSTS = {"c": B, "d": B}
INTERP = {"c": a, "d": b}

CHOICE = Signature.build(["b"], [], [("or", 2), ("fail", 0)])
RAISE = Signature.build(["b"], [], [("raise_e1", 0), ("raise_e2", 0)])
STORE = Signature.build(["b"], [], [("read", 2), ("write_s0", 1), ("write_s1", 1)])


def build(kind):
    if kind == "pfin":
        return algebra_model(make_monad("pfin"), CHOICE, {"b": AB}, INTERP)
    if kind == "list":
        return algebra_model(make_monad("list"), CHOICE, {"b": AB}, INTERP)
    if kind == "free":
        return algebra_model(make_monad("free", signature=CHOICE), CHOICE, {"b": AB}, INTERP)
    if kind == "exception":
        return algebra_model(make_monad("exception", exceptions=["e1", "e2"]), RAISE, {"b": AB}, INTERP)
    if kind == "state":
        return algebra_model(make_monad("state", states=["s0", "s1"]), STORE, {"b": AB}, INTERP)
    if kind == "storage":
        return storage_model(["s0", "s1"], {"b": AB}, INTERP, sig=STORE)
    if kind == "product":
        return product_model(build("pfin"), build("list"))
    raise ValueError(kind)


def run(model, text, expected=None, consts=CONSTS):
    return evaluate(model, parse_program(text, model.sig, list(consts)), consts=consts, expected=expected)[1]


# -- examples


def test_or_in_pfin_and_list():
    text = "or(return inl (); return inr ())"
    assert run(build("pfin"), text) == frozenset([InlV(UNIT_V), InrV(UNIT_V)])
    assert run(build("list"), text) == (InlV(UNIT_V), InrV(UNIT_V))
    term = parse_program(text, CHOICE)
    assert choice_eval(term, {}, "set") == run(build("pfin"), text)
    assert choice_eval(term, {}, "list") == run(build("list"), text)


@pytest.mark.parametrize("kind", ["pfin", "list", "free", "exception", "state", "storage"])
def test_return_unit_is_monad_unit(kind):
    m = build(kind)
    assert run(m, "return ()") == m.monad.unit(UNIT_V)


def test_thunk_of_return_in_pfin():
    m = build("pfin")
    _, v = evaluate(m, Return(Thunk(Return(UNIT_VAL))))
    assert v == frozenset([frozenset([UNIT_V])])
    assert eval_value(m, {}, Thunk(Return(UNIT_VAL))) == frozenset([UNIT_V])


def test_variables_and_pairs():
    m = build("pfin")
    assert eval_value(m, {"x": a}, Var("x")) == a
    assert eval_value(m, {"x": a, "y": b}, Pair(Var("x"), Var("y"))) == PairV(a, b)


def test_storage_read_branches_on_state():
    m = build("storage")
    den = run(m, "read(return c; return d)")
    assert isinstance(den, FunV)
    assert [den(Atom(s)) for s in ("s0", "s1")] == [PairV(a, Atom("s0")), PairV(b, Atom("s1"))]


def test_storage_write_then_read():
    m = build("storage")
    den = run(m, "write_s1(read(return c; return d))")
    assert den(Atom("s0")) == PairV(b, Atom("s1"))


def test_unelaborated_sequencing_is_rejected():
    with pytest.raises(EvalError):
        eval_comp(build("pfin"), {}, To(Return(UNIT_VAL), "x", Return(Var("x"))))


def test_arrow_denotation_is_a_table():
    den = run(build("list"), "\\x: 1 + 1. case x of { inl u. return c | inr u. or(return c; return d) }")
    assert den(InlV(UNIT_V)) == (a,) and den(InrV(UNIT_V)) == (a, b)


# -- direct interpreter comparison


@pytest.mark.parametrize("target", [FreeT(BOOL), FreeT(B), FreeT(ProdT(B, BOOL))])
def test_choice_terms_match_direct_interpreter(target):
    m_set, m_list = build("pfin"), build("list")
    for t in generate_terms(CHOICE, target, 5, 3, 500, consts=CONSTS):
        _, elab = elaborate(t, env=CONSTS, sig=CHOICE, expected=target)
        assert eval_comp(m_set, {}, elab) == choice_eval(t, {}, "set", INTERP)
        assert eval_comp(m_list, {}, elab) == choice_eval(t, {}, "list", INTERP)


# -- beta corpora: the oracle is syntactic substitution

@pytest.mark.parametrize("kind", ["pfin", "list", "free", "exception", "state", "storage", "product"])
def test_beta_laws(kind):
    m = build(kind)
    for redex, reduct, ty in beta_corpus(m.sig, CONSTS, 500, seed=sum(map(ord, kind))):
        lhs = eval_comp(m, {}, elaborate(redex, env=CONSTS, sig=m.sig, expected=ty)[1])
        rhs = eval_comp(m, {}, elaborate(reduct, env=CONSTS, sig=m.sig, expected=ty)[1])
        assert lhs == rhs


def test_beta_corpus_covers_every_redex_shape():
    kinds = {type(r).__name__ for r, _, _ in beta_corpus(CHOICE, CONSTS, 8, 0)}
    assert kinds == {"To", "App", "Force", "Let"}


# -- environment and product invariants


@pytest.mark.parametrize("kind", ["pfin", "storage", "free"])
def test_irrelevant_environment_entries(kind):
    m = build(kind)
    for t in generate_terms(m.sig, FreeT(B), 4, 5, 100, consts=CONSTS):
        _, elab = elaborate(t, env=CONSTS, sig=m.sig, expected=FreeT(B))
        assert eval_comp(m, {}, elab) == eval_comp(m, {"zz": a, "x1": InlV(UNIT_V)}, elab)


@pytest.mark.parametrize("target", [FreeT(B), ArrowT(BOOL, FreeT(B)), WithT(FreeT(BOOL), FreeT(B))])
def test_product_projection(target):
    m = build("product")
    left, right = build("pfin"), build("list")
    for t in generate_terms(CHOICE, target, 4, 9, 200, consts=CONSTS):
        _, elab = elaborate(t, env=CONSTS, sig=CHOICE, expected=target)
        den = eval_comp(m, {}, elab)
        assert den.fst == eval_comp(left, {}, elab)
        assert den.snd == eval_comp(right, {}, elab)


def test_product_unit_pair():
    pm = product_model(algebra_model(make_monad("pfin"), CHOICE, {"b": atoms(["a"])}, {"c": a}),
                       algebra_model(make_monad("list"), CHOICE, {"b": atoms(["a"])}, {"c": a}))
    assert run(pm, "return c", consts={"c": B}) == PairV(frozenset([a]), (a,))


def test_parameterised_op_in_free_model():
    sig = Signature.build(["b"], [], [OpDecl("put", 1, B)])
    m = algebra_model(make_monad("free", signature=sig, params={"put": AB}), sig, {"b": AB}, INTERP)
    den = run(m, "put[d](return c)")
    assert den.op == "put" and den.param == b
