import json
from pathlib import Path

import pytest

from cbpv.config import ConfigError, load_env, load_glue, load_model, load_signature, parse_semval
from cbpv.semantics import (UNIT_V, Atom, FunV, InlV, InrV, Leaf, Node, PairV, atoms, make_monad)
from cbpv.relations import Pred
from cbpv.syntax import BaseT, FreeT, Signature

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
a, b = Atom("a"), Atom("b")


@pytest.mark.parametrize("text,value", [
    ("a", a),
    ("()", UNIT_V),
    ("(a, b)", PairV(a, b)),
    ("inl a", InlV(a)),
    ("inr (inl ())", InrV(InlV(UNIT_V))),
    ("{a, b}", frozenset([a, b])),
    ("{}", frozenset()),
    ("[a, b, a]", (a, b, a)),
    ("[]", ()),
    ("return a", Leaf(a)),
    ("or(return a; fail())", Node("or", None, (Leaf(a), Node("fail", None, ())))),
])
def test_value_literals(text, value):
    assert parse_semval(text) == value


def test_function_literal_needs_carrier():
    with pytest.raises(ConfigError):
        parse_semval("fun{a -> b}")
    S = atoms(["s0", "s1"])
    car = make_monad("state", states=S).apply(atoms(["a", "b"]))
    f = parse_semval("fun{s0 -> (a, s1), s1 -> (b, s0)}", car)
    assert isinstance(f, FunV) and f(Atom("s1")) == PairV(b, Atom("s0"))
    with pytest.raises(ConfigError):
        parse_semval("fun{s0 -> (a, s1)}", car)


def test_literal_outside_carrier_rejected():
    with pytest.raises(ConfigError):
        parse_semval("c", atoms(["a", "b"]))
    with pytest.raises(ConfigError):
        parse_semval("(a, b", None)


def test_signature_file():
    sig = load_signature(f"{CONFIGS}/choice_sig.json")
    assert sig == Signature.build(["b"], [], [("or", 2), ("fail", 0)])
    assert Signature.from_json(sig.to_json()) == sig


def test_pfin_model_file():
    loaded = load_model(f"{CONFIGS}/pfin_model.json")
    assert loaded.model.monad.kind == "pfin"
    assert loaded.const_types == {"c": BaseT("b"), "d": BaseT("b")}
    assert loaded.model.const_interp == {"c": a, "d": b}


def test_storage_model_file():
    loaded = load_model(f"{CONFIGS}/storage_model.json")
    tick = loaded.model.const_interp["tick"]
    assert loaded.const_types["tick"] == FreeT(BaseT("b"))
    assert tick(Atom("s0")) == PairV(a, Atom("s1"))


def test_algebra_model_without_signature_uses_monad_operations():
    loaded = load_model({"kind": "algebra", "monad": {"kind": "exception", "exceptions": ["e1"]},
                         "bases": {"b": ["a"]}})
    assert [o.name for o in loaded.model.sig.operations] == ["raise_e1"]


def test_bad_models_rejected():
    with pytest.raises(ConfigError):
        load_model({"kind": "writer"})
    with pytest.raises(ConfigError):
        load_model({"kind": "algebra", "monad": {"kind": "free"}, "bases": {}})
    with pytest.raises(ConfigError):
        load_model({"kind": "algebra", "monad": {"kind": "pfin"}, "bases": {"b": ["a"]},
                    "consts": {"c": {"type": "b", "value": "z"}}})


def test_environment():
    loaded = load_model(f"{CONFIGS}/pfin_model.json")
    ctx, env = load_env({"x": {"type": "b + 1", "value": "inl b"}}, loaded)
    assert env == {"x": InlV(b)}
    with pytest.raises(ConfigError):
        load_env({"x": {"type": "F b", "value": "{}"}}, loaded)


@pytest.mark.parametrize("name,mode,lifting", [
    ("glue_exception.json", "unary", "exception"),
    ("glue_free.json", "unary", "free"),
    ("glue_tt.json", "unary", "tt"),
    ("glue_em.json", "binary", "em"),
])
def test_glue_files(name, mode, lifting):
    g = load_glue(f"{CONFIGS}/{name}")
    assert g.mode == mode and g.lifting.name == lifting


def test_glue_model_by_path(tmp_path):
    (tmp_path / "m.json").write_text(open(f"{CONFIGS}/pfin_model.json").read())
    doc = {"model": "m.json", "lifting": {"kind": "tt"}, "base_rels": {"b": {"base": "b", "members": ["a"]}}}
    (tmp_path / "g.json").write_text(json.dumps(doc))
    g = load_glue(str(tmp_path / "g.json"))
    assert isinstance(g.base_rel["b"], Pred)


def test_glue_needs_every_base_relation():
    doc = json.load(open(f"{CONFIGS}/glue_free.json"))
    doc["base_rels"] = {}
    with pytest.raises(ConfigError):
        load_glue(doc)


def test_glue_mode_must_match_lifting():
    doc = json.load(open(f"{CONFIGS}/glue_free.json"))
    doc["mode"] = "binary"
    with pytest.raises(ConfigError):
        load_glue(doc)
