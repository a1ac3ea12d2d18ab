import pytest
from hypothesis import given, strategies as st

from cbpv.generate import generate_terms
from cbpv.syntax import (BOOL, UNIT, UNIT_VAL, ArrowT, BaseT, Const, FreeT, GrammarError, Inl, Inr,
                         Lam, LexError, OpDecl, ProdT, Return, Signature, SumT, Thunk, ThunkT, To, TOP,
                         UnknownIdentifier, Var, WithT, Op, alpha_eq, debruijn, free_vars,
                         parse_program, parse_type, print_term, print_type, substitute)

SIG = Signature.build(["b"], ["C"], [("or", 2), ("fail", 0), OpDecl("put", 1, BaseT("b")),
                                     OpDecl("tag", 0, BOOL)])
CONSTS = {"c": BaseT("b"), "k": FreeT(BaseT("b"))}

TARGETS = [
    FreeT(BOOL),
    FreeT(BaseT("b")),
    ArrowT(BaseT("b"), FreeT(ProdT(BaseT("b"), UNIT))),
    WithT(FreeT(UNIT), ArrowT(BOOL, FreeT(BOOL))),
    FreeT(ThunkT(FreeT(BaseT("b")))),
    ArrowT(SumT(UNIT, BaseT("b")), TOP),
]


def corpus(n, seed=0):
    per = n // len(TARGETS)
    out = []
    for i, ty in enumerate(TARGETS):
        out += generate_terms(SIG, ty, 4, seed + i, per + (n % len(TARGETS) if i == 0 else 0), consts=CONSTS)
    return out


def test_unit_literal():
    assert parse_program("return ()", SIG) == Return(UNIT_VAL)
    assert print_term(Return(UNIT_VAL)) == "return ()"


def test_or_of_booleans():
    t = parse_program("or(return inl (); return inr ())", SIG)
    assert t == Op("or", None, (Return(Inl(UNIT_VAL)), Return(Inr(UNIT_VAL))))
    assert parse_program(print_term(t), SIG) == t


def test_thunked_lambda():
    t = parse_program("return thunk (\\x. return x)", SIG)
    assert t == Return(Thunk(Lam("x", Return(Var("x")))))
    assert parse_program(print_term(t), SIG) == t


def test_nested_to_chain_prints_parenthesised():
    inner = To(Return(UNIT_VAL), "x", Return(Var("x")))
    t = To(inner, "y", To(Return(Var("y")), "z", Return(Var("z"))))
    text = print_term(t)
    assert text.startswith("(")
    assert alpha_eq(parse_program(text, SIG), t)


def test_annotated_lambda_keeps_type():
    t = parse_program("\\x: b + 1. return x", SIG)
    assert t.ty == SumT(BaseT("b"), UNIT)
    assert parse_program(print_term(t), SIG) == t


def test_parameterised_op_and_const():
    t = parse_program("put[c](k)", SIG, consts=CONSTS)
    assert t == Op("put", Const("c"), (Const("k"),))


def test_types_round_trip():
    for ty in TARGETS + [BaseT("b"), ProdT(SumT(UNIT, UNIT), ThunkT(TOP))]:
        assert parse_type(print_type(ty), SIG) == ty


def test_lex_error_position():
    with pytest.raises(LexError) as e:
        parse_program("return\n  ()$", SIG)
    assert (e.value.line, e.value.col) == (2, 5)


def test_grammar_error_position():
    with pytest.raises(GrammarError) as e:
        parse_program("return ) ", SIG)
    assert (e.value.line, e.value.col) == (1, 8)


def test_unknown_identifier_is_reported():
    with pytest.raises(UnknownIdentifier):
        parse_program("return zz", SIG, consts=CONSTS)


def test_wrong_arity_rejected_by_parser_or_checker():
    with pytest.raises(GrammarError):
        parse_program("or(return ())", SIG)


def test_round_trip_thousand_terms():
    terms = corpus(1000)
    assert len(terms) == 1000
    bad = [t for t in terms if not alpha_eq(parse_program(print_term(t), SIG, consts=CONSTS), t)]
    assert bad == []


def test_alpha_eq_ignores_binder_names():
    a = parse_program("return () to x. return x", SIG)
    b = parse_program("return () to y. return y", SIG)
    c = parse_program("return () to y. return ()", SIG)
    assert alpha_eq(a, b) and not alpha_eq(a, c)
    assert debruijn(a) == debruijn(b)


def test_substitution_avoids_capture():
    # substituting the free y under a binder named y must rename the binder
    t = parse_program("\\y: b. return x", SIG, scope=["x"])
    s = substitute(t, "x", Var("y"))
    assert free_vars(s) == {"y"}
    assert s.var != "y"


def test_substitution_respects_shadowing():
    t = parse_program("return () to x. return x", SIG)
    assert substitute(t, "x", Const("c")) == t


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(TARGETS))
def test_round_trip_property(seed, ty):
    for t in generate_terms(SIG, ty, 3, seed, 3, consts=CONSTS):
        assert alpha_eq(parse_program(print_term(t), SIG, consts=CONSTS), t)


@given(st.integers(min_value=0, max_value=2**32))
def test_printing_is_a_fixed_point_after_one_parse(seed):
    for t in generate_terms(SIG, FreeT(BOOL), 4, seed, 3, consts=CONSTS):
        once = print_term(parse_program(print_term(t), SIG, consts=CONSTS))
        assert once == print_term(t)
