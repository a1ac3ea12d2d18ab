import itertools
import json

import numpy as np
import pytest

from cbpv import lind
from cbpv.lind import (FinCat, FinLInd, FinLIndFunctor, MalformedTable, check_fibration_property,
                       check_functor, check_lind_axioms, corrupt_reindex, drop_object, identity_functor,
                       idempotent_lind, pred_truncation, trivial_lind)

from oracles import pred_hom_count


@pytest.fixture(scope="module")
def pred():
    return pred_truncation((0, 1, 2))


def _parse(name):
    # "P2{0,1}" -> (2, {0, 1})
    n, rest = name[1:].split("{")
    body = rest.rstrip("}")
    return int(n), frozenset(int(x) for x in body.split(",") if x)


def test_trivial_instance_valid():
    L = trivial_lind()
    assert check_lind_axioms(L).ok
    assert check_functor(identity_functor(L)).ok
    assert check_fibration_property(identity_functor(L)).ok


def test_idempotent_instance_valid():
    assert check_lind_axioms(idempotent_lind()).ok


def test_corrupted_entry_is_the_only_violation():
    bad = corrupt_reindex(idempotent_lind(), "id1", "t", "id")
    rep = check_lind_axioms(bad)
    assert rep.violations == [{"axiom": "reindex along identity", "index": "1", "arrow": "t", "got": "id"}]


def test_broken_fibre_composition_detected():
    L = idempotent_lind()
    fb = L.fibres["1"]
    fb.comp[("*", "*", "*")] = np.array([[0, 1], [1, 0]], dtype=np.int64)   # t . t = id
    rep = check_lind_axioms(FinLInd(L.index, L.objects, {"1": fb}, L.reindex))
    assert rep.ok  # the involution is still a lawful category
    fb.comp[("*", "*", "*")] = np.array([[0, 0], [1, 1]], dtype=np.int64)   # id . t = id
    rep = check_lind_axioms(FinLInd(L.index, L.objects, {"1": fb}, L.reindex))
    assert {v["axiom"] for v in rep.violations} >= {"fibre left unit"}


def test_pred_index_is_a_category(pred):
    E, B, F = pred
    assert E.index.check() == [] and B.index.check() == []
    assert len(E.index.objects) == 7 and len(B.index.objects) == 3
    assert F.index_functor.check() == []


def test_pred_index_arrow_count(pred):
    E, _, _ = pred
    # functions n -> m preserving the predicate
    want = 0
    for a, b in itertools.product(E.index.objects, repeat=2):
        (na, ra), (nb, rb) = _parse(a), _parse(b)
        want += sum(1 for outs in itertools.product(range(nb), repeat=na) if all(outs[i] in rb for i in ra))
    assert len(E.index.arrows) == want == 65


def test_pred_fibre_sizes(pred):
    E, _, _ = pred
    for c, fb in E.fibres.items():
        nz, tz = _parse(c)
        want = 0
        for a, b in itertools.product(E.objects, repeat=2):
            (na, ra), (nb, rb) = _parse(a), _parse(b)
            want += pred_hom_count(nz, tz, na, ra, nb, rb)
        assert fb.size == want
    assert {c: fb.size for c, fb in E.fibres.items()} == {
        "P0{}": 49, "P1{}": 99, "P1{0}": 65, "P2{}": 307, "P2{0}": 191, "P2{1}": 191, "P2{0,1}": 167}


def test_pred_axioms_and_functor(pred):
    E, B, F = pred
    assert check_lind_axioms(E).ok
    assert check_lind_axioms(B).ok
    assert check_functor(F).ok


def test_pred_is_a_fibration(pred):
    _, _, F = pred
    rep = check_fibration_property(F)
    assert rep.ok, rep.failures[:3]
    assert len(rep.lifts) == 35
    assert rep.checked["triangles"] == 52673


def test_lifts_are_inverse_images(pred):
    # over the terminal index, k : n -> m lifts to (n, k^-1(R_Y)) with the same function
    _, _, F = pred
    for entry in check_fibration_property(F).lifts:
        digits = entry["k"].split(":")[1]
        outs = [int(d) for d in digits]
        _, ry = _parse(entry["to"])
        n, rh = _parse(entry["ahat"])
        assert n == len(outs)
        assert rh == {i for i, o in enumerate(outs) if o in ry}
        assert entry["khat"].split(":")[1] == digits


def test_lift_indices_include_triangle_index(pred):
    _, _, F = pred
    for entry in check_fibration_property(F).lifts:
        for e, homes in entry["lift_indices"].items():
            assert e in homes


def test_pred_corruption_located(pred):
    E, _, _ = pred
    rho = "P2{0}>P1{0}:00"
    d, c = E.index.arrows[rho]
    arrow = E.fibres[c].homs[("P1{}", "P2{}")][0]
    replacement = E.fibres[d].homs[("P1{}", "P2{}")][1]
    rep = check_lind_axioms(corrupt_reindex(E, rho, arrow, replacement))
    assert not rep.ok
    for v in rep.violations:
        involved = {v.get("rho"), v.get("rho2"), v.get("composite")}
        assert rho in involved, v


def test_dropped_object_names_missing_lift(pred):
    _, _, F = pred
    G = drop_object(F, "P1{}")
    assert check_lind_axioms(G.source).ok and check_functor(G).ok
    rep = check_fibration_property(G)
    assert not rep.ok
    missing = {(f["k"], f["to"]) for f in rep.failures}
    assert ("S1>S2:1", "P2{0}") in missing
    assert len(rep.failures) == 4


def test_identity_functor_is_fibration():
    small = pred_truncation((0, 1))[0]
    rep = check_fibration_property(identity_functor(small))
    assert rep.ok
    assert all(e["ahat"] == e["from"] for e in rep.lifts)


def test_functor_violation_reported(pred):
    E, B, F = pred
    maps = {e: a.copy() for e, a in F.on_arrows.items()}
    e = "P1{0}"
    maps[e][0], maps[e][1] = maps[e][1], maps[e][0]
    rep = check_functor(FinLIndFunctor(E, B, F.index_functor, F.on_objects, maps))
    assert not rep.ok


def test_json_round_trip(tmp_path, pred):
    _, _, F = pred
    path = tmp_path / "pred.json"
    path.write_text(json.dumps(F.to_json()))
    G = lind.load(str(path))
    assert isinstance(G, FinLIndFunctor)
    assert check_functor(G).ok
    L = idempotent_lind()
    q = tmp_path / "idem.json"
    q.write_text(json.dumps(L.to_json()))
    M = lind.load(str(q))
    assert check_lind_axioms(M).ok
    assert M.fibres["1"].names == L.fibres["1"].names


def test_malformed_tables_rejected():
    with pytest.raises(MalformedTable):
        FinCat(["1"], {"f": ("1", "2")}, {}, {"1": "f"})
    with pytest.raises(MalformedTable):
        FinCat.from_json({"objects": ["1"]})
