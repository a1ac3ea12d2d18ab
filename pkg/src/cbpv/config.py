"""JSON configuration loaders: signatures, models, glued models, environments.

Semantic values in configuration files are written as literals::

    a            ()           (a, b)        inl a        inr (inl ())
    {a, b}       [a, b, a]    return a      or(return a; fail())
    raise[e](…)  fun{s0 -> (a, s0), s1 -> (b, s1)}

Identifiers not followed by ``(`` or ``[`` are atoms.  ``fun`` tables are
checked against the domain of the carrier they are read into.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .evaluate import interp_ctype, interp_vtype
from .relations import (BinRel, MonadLifting, Pred, em_lifting, erratic_choice_lifting, exception_lifting,
                        free_lifting)
from .semantics import (UNIT_V, Atom, FunctionSpace, FunV, InlV, InrV, Leaf, ListSet, Model, Node,
                        PairV, PowerSet, ProductSet, SumSet, TreeSet, algebra_model, atoms, make_monad,
                        product_model, storage_model)
from .logrel import GluedModel
from .syntax import CompType, Signature, parse_type


class ConfigError(ValueError):
    """A configuration file is malformed or inconsistent."""


# ---------------------------------------------------------------- value literals


_TOKEN = re.compile(r"\s*(->|[(){}\[\],;]|[A-Za-z0-9_'.]+)")


@dataclass(frozen=True)
class _FunLit:
    pairs: tuple


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigError(f"bad value literal {text!r} at offset {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _LitParser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise ConfigError(f"bad value literal {self.text!r}: expected {expect or 'more input'}, got {t!r}")
        self.i += 1
        return t

    def seq(self, close, sep=","):
        items = []
        if self.peek() == close:
            self.take()
            return items
        while True:
            items.append(self.value())
            t = self.take()
            if t == close:
                return items
            if t != sep:
                raise ConfigError(f"bad value literal {self.text!r}: expected {sep!r} or {close!r}")

    def value(self):
        t = self.take()
        if t == "(":
            if self.peek() == ")":
                self.take()
                return UNIT_V
            first = self.value()
            if self.peek() == ",":
                self.take()
                second = self.value()
                self.take(")")
                return PairV(first, second)
            self.take(")")
            return first
        if t == "{":
            return frozenset(self.seq("}"))
        if t == "[":
            return tuple(self.seq("]"))
        if t == "inl":
            return InlV(self.value())
        if t == "inr":
            return InrV(self.value())
        if t == "return":
            return Leaf(self.value())
        if t == "fun" and self.peek() == "{":
            self.take()
            pairs = []
            if self.peek() == "}":
                self.take()
                return _FunLit(())
            while True:
                k = self.value()
                self.take("->")
                pairs.append((k, self.value()))
                if self.take() == "}":
                    return _FunLit(tuple(pairs))
        if t in {")", "}", "]", ",", ";", "->"}:
            raise ConfigError(f"bad value literal {self.text!r}: unexpected {t!r}")
        if self.peek() in ("(", "["):
            param = None
            if self.peek() == "[":
                self.take()
                param = self.value()
                self.take("]")
            self.take("(")
            return Node(t, param, tuple(self.seq(")", ";")))
        return Atom(t)


def parse_semval(text: str, carrier=None):
    """Read a value literal; with ``carrier`` given, resolve ``fun`` tables and check membership."""
    p = _LitParser(text)
    v = p.value()
    if p.peek() is not None:
        raise ConfigError(f"trailing input in value literal {text!r}")
    if carrier is None:
        if _has_fun(v):
            raise ConfigError("function literals need a known carrier")
        return v
    v = _realize(v, carrier)
    if v not in carrier:
        raise ConfigError(f"value {text!r} is not an element of its carrier")
    return v


def _has_fun(v) -> bool:
    if isinstance(v, _FunLit):
        return True
    if isinstance(v, PairV):
        return _has_fun(v.fst) or _has_fun(v.snd)
    if isinstance(v, (InlV, InrV, Leaf)):
        return _has_fun(v.value)
    if isinstance(v, (frozenset, tuple)):
        return any(_has_fun(x) for x in v)
    if isinstance(v, Node):
        return any(_has_fun(x) for x in v.children) or (v.param is not None and _has_fun(v.param))
    return False


def _realize(v, carrier):
    if not _has_fun(v):
        return v
    if isinstance(v, _FunLit):
        if not isinstance(carrier, FunctionSpace):
            raise ConfigError("function literal where no function is expected")
        table = {_realize(k, carrier.dom): _realize(x, carrier.cod) for k, x in v.pairs}
        missing = [x for x in carrier.dom if x not in table]
        if missing:
            raise ConfigError(f"function literal misses {len(missing)} argument(s)")
        return FunV.from_table(carrier.dom, table)
    if isinstance(v, PairV) and isinstance(carrier, ProductSet):
        return PairV(_realize(v.fst, carrier.left), _realize(v.snd, carrier.right))
    if isinstance(v, InlV) and isinstance(carrier, SumSet):
        return InlV(_realize(v.value, carrier.left))
    if isinstance(v, InrV) and isinstance(carrier, SumSet):
        return InrV(_realize(v.value, carrier.right))
    if isinstance(v, frozenset) and isinstance(carrier, PowerSet):
        return frozenset(_realize(x, carrier.base) for x in v)
    if isinstance(v, tuple) and isinstance(carrier, ListSet):
        return tuple(_realize(x, carrier.base) for x in v)
    if isinstance(v, Leaf) and isinstance(carrier, TreeSet):
        return Leaf(_realize(v.value, carrier.base))
    if isinstance(v, Node) and isinstance(carrier, TreeSet):
        return Node(v.op, v.param, tuple(_realize(c, carrier) for c in v.children))
    raise ConfigError("value literal does not fit the shape of its type")


# ---------------------------------------------------------------- files


def read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON ({e.msg} at line {e.lineno})") from None


def load_signature(doc) -> Signature:
    if isinstance(doc, str):
        doc = read_json(doc)
    try:
        return Signature.from_json(doc)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad signature: {e}") from None


@dataclass
class LoadedModel:
    model: Model
    const_types: dict = field(default_factory=dict)


def _sets(d: Mapping) -> dict:
    return {k: atoms(v) for k, v in (d or {}).items()}


def load_model(doc, sig: Optional[Signature] = None) -> LoadedModel:
    """``{"kind": "algebra"|"storage"|"product", ...}``; see the README for fields."""
    if isinstance(doc, str):
        doc = read_json(doc)
    try:
        return _load_model(doc, sig)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad model configuration: {e}") from None


def _load_model(doc, sig):
    kind = doc.get("kind")
    if "signature" in doc:
        sig = load_signature(doc["signature"])
    if kind == "product":
        left = _load_model(doc["left"], sig)
        right = _load_model(doc["right"], sig)
        if left.const_types != right.const_types:
            raise ConfigError("the two sides of a product model declare different constants")
        return LoadedModel(product_model(left.model, right.model), left.const_types)
    bases = _sets(doc.get("bases", {}))
    comp_bases = _sets(doc.get("comp_bases", {}))
    if kind == "algebra":
        mdoc = dict(doc["monad"])
        mkind = mdoc.pop("kind")
        if mkind == "free":
            if sig is None:
                raise ConfigError("a free-monad model needs a signature")
            mdoc["signature"] = sig
        m = make_monad(mkind, **mdoc)
        if sig is None:
            sig = Signature(tuple(bases), tuple(comp_bases), m.operations())
        model = algebra_model(m, sig, bases, None, comp_bases)
    elif kind == "storage":
        model = storage_model(atoms(doc["states"]), bases, None, sig, comp_bases)
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    const_types = {}
    for name, entry in doc.get("consts", {}).items():
        ty = parse_type(entry["type"], model.sig)
        const_types[name] = ty
        carrier = interp_ctype(model, ty).carrier if isinstance(ty, CompType) else interp_vtype(model, ty)
        model.const_interp[name] = parse_semval(entry["value"], carrier)
    return LoadedModel(model, const_types)


def load_env(doc, loaded: LoadedModel) -> tuple[dict, dict]:
    """``{"x": {"type": "b", "value": "a"}}`` to ``(typing context, values)``."""
    if isinstance(doc, str):
        doc = read_json(doc)
    model = loaded.model
    ctx, env = {}, {}
    for name, entry in doc.items():
        try:
            ty = parse_type(entry["type"], model.sig)
        except (KeyError, TypeError) as e:
            raise ConfigError(f"bad environment entry {name!r}: {e}") from None
        if isinstance(ty, CompType):
            raise ConfigError(f"environment variable {name!r} needs a value type")
        ctx[name] = ty
        env[name] = parse_semval(entry["value"], interp_vtype(model, ty))
    return ctx, env


def _pred(carrier, members, what) -> Pred:
    vals = [parse_semval(m, carrier) if isinstance(m, str) else m for m in members]
    for v in vals:
        if v not in carrier:
            raise ConfigError(f"{what}: member outside the carrier")
    return Pred.from_members(carrier, vals)


def _binrel(left, right, pairs, what) -> BinRel:
    vals = [(parse_semval(a, left), parse_semval(b, right)) for a, b in pairs]
    return BinRel.from_pairs(left, right, vals)


def _lifting(doc, model) -> MonadLifting:
    kind = doc.get("kind")
    if kind == "free":
        return free_lifting(model.sig, model.monad)
    if kind == "exception":
        m = model.monad
        if m.kind != "exception":
            raise ConfigError("exception lifting over a non-exception model")
        return exception_lifting(_pred(m.E, doc.get("related", []), "related exceptions"), m)
    if kind == "tt":
        if doc.get("preset", "erratic") == "erratic":
            return erratic_choice_lifting()
        raise ConfigError(f"unknown tt preset {doc.get('preset')!r}")
    if kind == "em":
        return em_lifting()
    raise ConfigError(f"unknown lifting kind {kind!r}")


def load_glue(doc, sig: Optional[Signature] = None, base_dir: str = ".") -> GluedModel:
    """``{"mode", "lifting", "base_rels", "comp_base_rels", "model"}``."""
    if isinstance(doc, str):
        base_dir = os.path.dirname(os.path.abspath(doc))
        doc = read_json(doc)
    try:
        mdoc = doc["model"]
        if isinstance(mdoc, str):
            mdoc = read_json(os.path.join(base_dir, mdoc))
        loaded = load_model(mdoc, sig)
        model = loaded.model
        mode = doc.get("mode", "unary")
        binary = mode == "binary"
        if mode not in ("unary", "binary"):
            raise ConfigError(f"unknown mode {mode!r}")
        lifting = _lifting(doc["lifting"], model.left if binary and hasattr(model, "left") else model)
        if (lifting.arity == 2) != binary:
            raise ConfigError(f"{mode} mode does not match the {lifting.name} lifting")
        base_rels = {}
        for name, r in doc.get("base_rels", {}).items():
            if binary:
                base_rels[name] = _binrel(model.left.base_vtype[name], model.right.base_vtype[name],
                                          r["pairs"], f"relation on {name}")
            else:
                base_rels[name] = _pred(model.base_vtype[name], r["members"], f"relation on {name}")
        comp_rels = {}
        for name, r in doc.get("comp_base_rels", {}).items():
            if binary:
                comp_rels[name] = _binrel(model.left.base_ctype[name].carrier, model.right.base_ctype[name].carrier,
                                          r["pairs"], f"relation on {name}")
            else:
                comp_rels[name] = _pred(model.base_ctype[name].carrier, r["members"], f"relation on {name}")
        missing = set(model.sig.value_bases) - set(base_rels)
        if missing:
            raise ConfigError(f"no relation given for base types {sorted(missing)}")
        missing = set(model.sig.comp_bases) - set(comp_rels)
        if missing:
            raise ConfigError(f"no relation given for computation base types {sorted(missing)}")
        return GluedModel(model, lifting, base_rels, comp_rels, loaded.const_types)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad glue configuration: {e}") from None
