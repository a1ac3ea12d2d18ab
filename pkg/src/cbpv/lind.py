"""Finite locally indexed categories and functors between them.

A ``FinLInd`` is a finite index category together with, for each index
object ``c``, a category ``fibre(c)`` on a shared object list, and for each
index arrow ``rho : d -> c`` an identity-on-objects reindexing map from
``fibre(c)`` to ``fibre(d)``.  Fibre composition is stored as dense integer
tables so the exhaustive law checks vectorise.

``check_lind_axioms`` lists every violated instance of: fibre category
laws, functoriality of reindexing, reindexing along identities, and
reindexing along composites.  ``check_fibration_property`` decides the
lifting property of a functor of such categories over the terminal index.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .semantics import BudgetExceeded


class MalformedTable(ValueError):
    pass


# ---------------------------------------------------------------- finite categories


@dataclass
class FinCat:
    objects: list
    arrows: dict          # name -> (src, tgt)
    compose: dict         # (g, f) -> name of g . f
    identities: dict      # object -> name
    terminal: Optional[str] = None

    def __post_init__(self):
        self._hom: dict = {}
        for name, (a, b) in self.arrows.items():
            if a not in self.objects or b not in self.objects:
                raise MalformedTable(f"arrow {name!r} has an unknown endpoint")
            self._hom.setdefault((a, b), []).append(name)
        for obj in self.objects:
            if obj not in self.identities:
                raise MalformedTable(f"no identity on {obj!r}")

    def hom(self, a, b) -> list:
        return self._hom.get((a, b), [])

    def src(self, f):
        return self.arrows[f][0]

    def tgt(self, f):
        return self.arrows[f][1]

    def comp(self, g, f):
        try:
            return self.compose[(g, f)]
        except KeyError:
            raise MalformedTable(f"composite of {g!r} after {f!r} is missing") from None

    def bang(self, c):
        """The unique arrow into the terminal object."""
        hs = self.hom(c, self.terminal)
        if len(hs) != 1:
            raise MalformedTable(f"{self.terminal!r} is not terminal: {len(hs)} arrows from {c!r}")
        return hs[0]

    def check(self) -> list:
        bad = []
        for (g, f), h in self.compose.items():
            if self.tgt(f) != self.src(g) or self.arrows[h] != (self.src(f), self.tgt(g)):
                bad.append({"axiom": "index composite typing", "g": g, "f": f, "result": h})
        for f, (a, b) in self.arrows.items():
            if self.comp(self.identities[b], f) != f or self.comp(f, self.identities[a]) != f:
                bad.append({"axiom": "index unit", "arrow": f})
        for a, b, c, d in itertools.product(self.objects, repeat=4):
            for f in self.hom(a, b):
                for g in self.hom(b, c):
                    gf = self.comp(g, f)
                    for h in self.hom(c, d):
                        if self.comp(h, gf) != self.comp(self.comp(h, g), f):
                            bad.append({"axiom": "index associativity", "h": h, "g": g, "f": f})
        if self.terminal is not None:
            for c in self.objects:
                n = len(self.hom(c, self.terminal))
                if n != 1:
                    bad.append({"axiom": "terminal", "object": c, "arrows": n})
        return bad

    def to_json(self) -> dict:
        return {"objects": list(self.objects),
                "arrows": {k: list(v) for k, v in self.arrows.items()},
                "compose": [[g, f, h] for (g, f), h in self.compose.items()],
                "identities": dict(self.identities),
                "terminal": self.terminal}

    @classmethod
    def from_json(cls, d: dict) -> "FinCat":
        try:
            return cls(list(d["objects"]), {k: tuple(v) for k, v in d["arrows"].items()},
                       {(g, f): h for g, f, h in d["compose"]}, dict(d["identities"]), d.get("terminal"))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedTable(f"bad category table: {e}") from None


@dataclass
class FinFunctor:
    source: FinCat
    target: FinCat
    on_objects: dict
    on_arrows: dict

    def check(self) -> list:
        bad = []
        for f, (a, b) in self.source.arrows.items():
            if self.target.arrows.get(self.on_arrows.get(f)) != (self.on_objects[a], self.on_objects[b]):
                bad.append({"axiom": "index functor typing", "arrow": f})
        for a in self.source.objects:
            if self.on_arrows[self.source.identities[a]] != self.target.identities[self.on_objects[a]]:
                bad.append({"axiom": "index functor identity", "object": a})
        for (g, f), h in self.source.compose.items():
            if self.on_arrows[h] != self.target.comp(self.on_arrows[g], self.on_arrows[f]):
                bad.append({"axiom": "index functor composite", "g": g, "f": f})
        return bad


def is_fibration(p: FinFunctor) -> list:
    """Classical cartesian-lift search; returns the arrows lacking a cartesian lift."""
    E, B = p.source, p.target
    missing = []
    for e in E.objects:
        pe = p.on_objects[e]
        for b in B.objects:
            for f in B.hom(b, pe):
                if not any(_is_cartesian(p, phi) for e2 in E.objects if p.on_objects[e2] == b
                           for phi in E.hom(e2, e) if p.on_arrows[phi] == f):
                    missing.append({"arrow": f, "over": e})
    return missing


def _is_cartesian(p: FinFunctor, phi) -> bool:
    E, B = p.source, p.target
    e1, e = E.arrows[phi]
    for e2 in E.objects:
        for psi in E.hom(e2, e):
            for g in B.hom(p.on_objects[e2], p.on_objects[e1]):
                if B.comp(p.on_arrows[phi], g) != p.on_arrows[psi]:
                    continue
                n = sum(1 for chi in E.hom(e2, e1)
                        if p.on_arrows[chi] == g and E.comp(phi, chi) == psi)
                if n != 1:
                    return False
    return True


# ---------------------------------------------------------------- fibres


class Fibre:
    """A finite category on a fixed object list with integer-coded arrows.

    Arrows of ``hom(A, B)`` have local indices ``0..n-1`` and global ids
    ``offset[(A, B)] + local``.  ``comp[(A, B, C)][j, i]`` is the local index
    in ``hom(A, C)`` of ``g_j . f_i``.
    """

    def __init__(self, objects: list, homs: dict, comp: dict, ident: dict):
        self.objects = objects
        self.homs = homs                  # (A, B) -> list of names
        self.comp = comp                  # (A, B, C) -> int array
        self.ident = ident                # A -> local index in hom(A, A)
        self.offset = {}
        self.names = []
        self.src, self.tgt = [], []
        n = 0
        for a in objects:
            for b in objects:
                names = homs.get((a, b), [])
                homs[(a, b)] = names
                self.offset[(a, b)] = n
                n += len(names)
                self.names.extend(names)
                self.src.extend([a] * len(names))
                self.tgt.extend([b] * len(names))
        self.size = n
        self.ids = {}
        for (a, b), names in homs.items():
            for i, nm in enumerate(names):
                if (a, b, nm) in self.ids:
                    raise MalformedTable(f"duplicate arrow name {nm!r}")
                self.ids[(a, b, nm)] = self.offset[(a, b)] + i
        self._by_name = {}
        for (a, b, nm), gid in self.ids.items():
            self._by_name.setdefault(nm, []).append(gid)

    def gid(self, name) -> int:
        ids = self._by_name.get(name, [])
        if len(ids) != 1:
            raise MalformedTable(f"arrow name {name!r} is {'ambiguous' if ids else 'unknown'}")
        return ids[0]

    def block(self, a, b) -> slice:
        o = self.offset[(a, b)]
        return slice(o, o + len(self.homs[(a, b)]))

    def ident_gid(self, a) -> int:
        return self.offset[(a, a)] + self.ident[a]

    def compose_gid(self, g: int, f: int) -> int:
        a, b, c = self.src[f], self.tgt[f], self.tgt[g]
        if self.src[g] != b:
            raise ValueError("arrows are not composable")
        local = self.comp[(a, b, c)][g - self.offset[(b, c)], f - self.offset[(a, b)]]
        return self.offset[(a, c)] + int(local)

    def to_json(self) -> dict:
        return {"homs": [[a, b, list(ns)] for (a, b), ns in self.homs.items() if ns],
                "compose": [[a, b, c, t.tolist()] for (a, b, c), t in self.comp.items() if t.size],
                "identities": {a: self.homs[(a, a)][i] for a, i in self.ident.items()}}

    @classmethod
    def from_json(cls, objects, d) -> "Fibre":
        homs = {(a, b): list(ns) for a, b, ns in d["homs"]}
        comp = {}
        for a, b in itertools.product(objects, repeat=2):
            homs.setdefault((a, b), [])
        for a, b, c, t in d.get("compose", []):
            comp[(a, b, c)] = np.asarray(t, dtype=np.int64).reshape(len(homs[(b, c)]), len(homs[(a, b)]))
        for a, b, c in itertools.product(objects, repeat=3):
            shape = (len(homs[(b, c)]), len(homs[(a, b)]))
            if (a, b, c) not in comp:
                if shape[0] * shape[1]:
                    raise MalformedTable(f"composition table for {a}, {b}, {c} is missing")
                comp[(a, b, c)] = np.zeros(shape, dtype=np.int64)
        ident = {}
        for a, nm in d["identities"].items():
            try:
                ident[a] = homs[(a, a)].index(nm)
            except ValueError:
                raise MalformedTable(f"identity {nm!r} on {a!r} is not an endomorphism") from None
        return cls(list(objects), homs, comp, ident)


@dataclass
class FinLInd:
    index: FinCat
    objects: list
    fibres: dict                # index object -> Fibre
    reindex: dict               # index arrow rho: d -> c -> int array, fibre(c) gids -> fibre(d) gids
    name: str = ""

    def fibre(self, c) -> Fibre:
        return self.fibres[c]

    def reindex_arrow(self, f_gid: int, rho) -> int:
        return int(self.reindex[rho][f_gid])

    def to_json(self) -> dict:
        return {"name": self.name, "index": self.index.to_json(), "objects": list(self.objects),
                "fibres": {c: fb.to_json() for c, fb in self.fibres.items()},
                "reindex": {rho: {self.fibres[self.index.tgt(rho)].names[i]: self.fibres[self.index.src(rho)].names[j]
                                  for i, j in enumerate(arr.tolist())}
                            for rho, arr in self.reindex.items()}}

    @classmethod
    def from_json(cls, d: dict) -> "FinLInd":
        try:
            index = FinCat.from_json(d["index"])
            objects = list(d["objects"])
            fibres = {c: Fibre.from_json(objects, d["fibres"][c]) for c in index.objects}
            reindex = {}
            for rho, (dd, c) in index.arrows.items():
                table = d["reindex"].get(rho)
                if table is None:
                    raise MalformedTable(f"no reindexing table for {rho!r}")
                fc, fd = fibres[c], fibres[dd]
                arr = np.full(fc.size, -1, dtype=np.int64)
                for gid, nm in enumerate(fc.names):
                    if nm not in table:
                        raise MalformedTable(f"reindexing along {rho!r} misses {nm!r}")
                    arr[gid] = fd.gid(table[nm])
                reindex[rho] = arr
            return cls(index, objects, fibres, reindex, d.get("name", ""))
        except KeyError as e:
            raise MalformedTable(f"missing field {e}") from None


# ---------------------------------------------------------------- axioms


@dataclass
class LIndReport:
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        counts = ", ".join(f"{k}={v}" for k, v in self.checked.items())
        if self.ok:
            return f"all axioms hold ({counts})"
        return f"{len(self.violations)} violation(s) ({counts})"


def _add(report, key, n):
    report.checked[key] = report.checked.get(key, 0) + int(n)


def check_lind_axioms(l: FinLInd, max_reports: int = 100) -> LIndReport:
    rep = LIndReport()

    def note(v):
        if len(rep.violations) < max_reports:
            rep.violations.append(v)

    for v in l.index.check():
        note(v)
    objs = l.objects
    for c, fb in l.fibres.items():
        # typing of composites and identities
        for (a, b, cc), t in fb.comp.items():
            n_ac = len(fb.homs[(a, cc)])
            if t.size and (t.min() < 0 or t.max() >= n_ac):
                note({"axiom": "fibre composite typing", "index": c, "objects": [a, b, cc]})
        for a in objs:
            for b in objs:
                nab = len(fb.homs[(a, b)])
                if not nab:
                    continue
                ar = np.arange(nab)
                left = fb.comp[(a, b, b)][fb.ident[b], :]
                right = fb.comp[(a, a, b)][:, fb.ident[a]]
                _add(rep, "fibre unit", 2 * nab)
                for i in np.nonzero(left != ar)[0]:
                    note({"axiom": "fibre left unit", "index": c, "arrow": fb.homs[(a, b)][i]})
                for i in np.nonzero(right != ar)[0]:
                    note({"axiom": "fibre right unit", "index": c, "arrow": fb.homs[(a, b)][i]})
        for a, b, cc, d in itertools.product(objs, repeat=4):
            cabc, cacd, cbcd, cabd = fb.comp[(a, b, cc)], fb.comp[(a, cc, d)], fb.comp[(b, cc, d)], fb.comp[(a, b, d)]
            if not (cabc.size and cbcd.size):
                continue
            lhs = cacd[:, cabc]                        # h . (g . f)
            rhs = cabd[cbcd[:, :, None], np.arange(cabc.shape[1])[None, None, :]]
            _add(rep, "fibre associativity", lhs.size)
            for h, g, f in np.argwhere(lhs != rhs)[:max_reports]:
                note({"axiom": "fibre associativity", "index": c,
                      "h": fb.homs[(cc, d)][h], "g": fb.homs[(b, cc)][g], "f": fb.homs[(a, b)][f]})
    idx = l.index
    for rho, (d, c) in idx.arrows.items():
        fc, fd = l.fibres[c], l.fibres[d]
        R = l.reindex[rho]
        # identity on objects: blocks map into the same blocks
        for a in objs:
            for b in objs:
                blk = R[fc.block(a, b)]
                lo, n = fd.offset[(a, b)], len(fd.homs[(a, b)])
                _add(rep, "reindex typing", blk.size)
                for i in np.nonzero((blk < lo) | (blk >= lo + n))[0]:
                    note({"axiom": "reindex typing", "rho": rho, "arrow": fc.homs[(a, b)][i]})
        for a in objs:
            _add(rep, "reindex identity arrows", 1)
            if R[fc.ident_gid(a)] != fd.ident_gid(a):
                note({"axiom": "reindex preserves identities", "rho": rho, "object": a})
        for a, b, cc in itertools.product(objs, repeat=3):
            tc = fc.comp[(a, b, cc)]
            if not tc.size:
                continue
            rab = R[fc.block(a, b)] - fd.offset[(a, b)]
            rbc = R[fc.block(b, cc)] - fd.offset[(b, cc)]
            rac = R[fc.block(a, cc)] - fd.offset[(a, cc)]
            if (rab < 0).any() or (rbc < 0).any() or (rac < 0).any():
                continue
            lhs = rac[tc]
            rhs = fd.comp[(a, b, cc)][rbc[:, None], rab[None, :]]
            _add(rep, "reindex functoriality", lhs.size)
            for g, f in np.argwhere(lhs != rhs)[:max_reports]:
                note({"axiom": "reindex preserves composition", "rho": rho,
                      "g": fc.homs[(b, cc)][g], "f": fc.homs[(a, b)][f]})
        if rho == idx.identities[c]:
            _add(rep, "reindex along identity", R.size)
            for i in np.nonzero(R != np.arange(fc.size))[0]:
                note({"axiom": "reindex along identity", "index": c, "arrow": fc.names[i],
                      "got": fd.names[R[i]]})
    for (rho, rho2), comp in idx.compose.items():
        # rho2 : e -> d, rho : d -> c, comp = rho . rho2
        lhs = l.reindex[comp]
        rhs = l.reindex[rho2][l.reindex[rho]]
        _add(rep, "reindex along composite", lhs.size)
        c = idx.tgt(rho)
        fe = l.fibres[idx.src(rho2)]
        for i in np.nonzero(lhs != rhs)[0]:
            note({"axiom": "reindex along composite", "rho": rho, "rho2": rho2, "composite": comp,
                  "arrow": l.fibres[c].names[i], "direct": fe.names[lhs[i]], "stepwise": fe.names[rhs[i]]})
    return rep


# ---------------------------------------------------------------- functors


@dataclass
class FinLIndFunctor:
    source: FinLInd
    target: FinLInd
    index_functor: FinFunctor
    on_objects: dict              # source object -> target object
    on_arrows: dict               # index object e -> int array, fibre(e) gids -> fibre(p e) gids

    def to_json(self) -> dict:
        p = self.index_functor
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "index_map": {"objects": dict(p.on_objects), "arrows": dict(p.on_arrows)},
                "object_map": dict(self.on_objects),
                "arrow_maps": {e: {self.source.fibres[e].names[i]:
                                   self.target.fibres[p.on_objects[e]].names[j]
                                   for i, j in enumerate(arr.tolist())}
                               for e, arr in self.on_arrows.items()}}

    @classmethod
    def from_json(cls, d: dict) -> "FinLIndFunctor":
        try:
            src = FinLInd.from_json(d["source"])
            tgt = FinLInd.from_json(d["target"])
            p = FinFunctor(src.index, tgt.index, dict(d["index_map"]["objects"]), dict(d["index_map"]["arrows"]))
            maps = {}
            for e in src.index.objects:
                fe, fpe = src.fibres[e], tgt.fibres[p.on_objects[e]]
                table = d["arrow_maps"][e]
                arr = np.full(fe.size, -1, dtype=np.int64)
                for gid, nm in enumerate(fe.names):
                    if nm not in table:
                        raise MalformedTable(f"arrow map over {e!r} misses {nm!r}")
                    arr[gid] = fpe.gid(table[nm])
                maps[e] = arr
            return cls(src, tgt, p, dict(d["object_map"]), maps)
        except KeyError as e:
            raise MalformedTable(f"missing field {e}") from None


def check_functor(F: FinLIndFunctor, max_reports: int = 100) -> LIndReport:
    rep = LIndReport()

    def note(v):
        if len(rep.violations) < max_reports:
            rep.violations.append(v)

    p = F.index_functor
    for v in p.check():
        note(v)
    src, tgt = F.source, F.target
    for e, fb in src.fibres.items():
        tb = tgt.fibres[p.on_objects[e]]
        P = F.on_arrows[e]
        for a in src.objects:
            for b in src.objects:
                blk = P[fb.block(a, b)]
                pa, pb = F.on_objects[a], F.on_objects[b]
                lo, n = tb.offset[(pa, pb)], len(tb.homs[(pa, pb)])
                for i in np.nonzero((blk < lo) | (blk >= lo + n))[0]:
                    note({"axiom": "functor typing", "index": e, "arrow": fb.homs[(a, b)][i]})
            _add(rep, "functor identities", 1)
            if P[fb.ident_gid(a)] != tb.ident_gid(F.on_objects[a]):
                note({"axiom": "functor preserves identities", "index": e, "object": a})
        if rep.violations:
            continue
        for a, b, c in itertools.product(src.objects, repeat=3):
            t = fb.comp[(a, b, c)]
            if not t.size:
                continue
            pa, pb, pc = F.on_objects[a], F.on_objects[b], F.on_objects[c]
            pab = P[fb.block(a, b)] - tb.offset[(pa, pb)]
            pbc = P[fb.block(b, c)] - tb.offset[(pb, pc)]
            pac = P[fb.block(a, c)] - tb.offset[(pa, pc)]
            lhs = pac[t]
            rhs = tb.comp[(pa, pb, pc)][pbc[:, None], pab[None, :]]
            _add(rep, "functor composition", lhs.size)
            for g, f in np.argwhere(lhs != rhs)[:max_reports]:
                note({"axiom": "functor preserves composition", "index": e,
                      "g": fb.homs[(b, c)][g], "f": fb.homs[(a, b)][f]})
    if rep.violations:
        return rep
    for rho, (d, c) in src.index.arrows.items():
        lhs = F.on_arrows[d][src.reindex[rho]]
        rhs = tgt.reindex[p.on_arrows[rho]][F.on_arrows[c]]
        _add(rep, "functor respects reindexing", lhs.size)
        for i in np.nonzero(lhs != rhs)[0]:
            note({"axiom": "functor respects reindexing", "rho": rho, "arrow": src.fibres[c].names[i]})
    return rep


@dataclass
class FibrationReport:
    index_fibration: list = field(default_factory=list)
    lifts: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.index_fibration

    def summary(self) -> str:
        if self.ok:
            return f"fibration: every k has a lift ({len(self.lifts)} k checked, {self.checked.get('triangles', 0)} triangles)"
        return (f"not a fibration: {len(self.failures)} k without a lift, "
                f"{len(self.index_fibration)} index arrows without cartesian lift")


def check_fibration_property(F: FinLIndFunctor, budget: int = 50_000_000) -> FibrationReport:
    """Search, for each ``k : A -> P(Y)`` over the terminal index, a lift
    ``(Ahat, khat)`` such that every triangle has exactly one lift.

    A triangle over index ``e`` is ``u : P(X) -> A`` over ``p(e)`` and
    ``v : X -> Y`` over ``e`` with ``P(v) = (k reindexed to p(e)) . u``; its
    lift is an arrow ``uhat : X -> Ahat`` over ``e`` with ``P(uhat) = u`` and
    ``(khat reindexed to e) . uhat = v``.  Uniqueness is decided in the fibre
    over ``e``; for every found lift the report also lists each index ``e'``
    holding an arrow whose reindexing along some ``e -> e'`` is that lift
    (``lift_indices`` maps triangle index to those ``e'``).
    """
    rep = FibrationReport()
    p = F.index_functor
    E, B = F.source, F.target
    rep.index_fibration = is_fibration(p)
    one_e, one_b = E.index.terminal, B.index.terminal
    if one_e is None or one_b is None:
        raise MalformedTable("both index categories need a designated terminal object")
    if p.on_objects[one_e] != one_b:
        raise MalformedTable("the index functor does not preserve the terminal object")
    spent = 0
    fb1, fe1 = B.fibres[one_b], E.fibres[one_e]
    P1 = F.on_arrows[one_e]
    for a in B.objects:
        for y in E.objects:
            py = F.on_objects[y]
            for k_local, k_name in enumerate(fb1.homs[(a, py)]):
                k = fb1.offset[(a, py)] + k_local
                found = None
                tried = []
                for ahat in E.objects:
                    if F.on_objects[ahat] != a:
                        continue
                    for kh_local in range(len(fe1.homs[(ahat, y)])):
                        khat = fe1.offset[(ahat, y)] + kh_local
                        if P1[khat] != k:
                            continue
                        ok, n, witness, where = _all_triangles_lift(F, k, khat, ahat, a, y)
                        spent += n
                        if spent > budget:
                            raise BudgetExceeded("fibration search exceeded its budget")
                        if ok:
                            found = (ahat, fe1.names[khat], where)
                            break
                        tried.append({"ahat": ahat, "khat": fe1.names[khat], "triangle": witness})
                    if found:
                        break
                rep.checked["triangles"] = spent
                entry = {"k": k_name, "from": a, "to": y}
                if found:
                    entry.update({"ahat": found[0], "khat": found[1], "lift_indices": found[2]})
                    rep.lifts.append(entry)
                else:
                    entry["candidates"] = tried[:5]
                    rep.failures.append(entry)
    return rep


def _all_triangles_lift(F, k, khat, ahat, a, y):
    p = F.index_functor
    E, B = F.source, F.target
    count = 0
    where = {}
    for e in E.index.objects:
        pe = p.on_objects[e]
        fe, fb = E.fibres[e], B.fibres[pe]
        Pe = F.on_arrows[e]
        k_e = int(B.reindex[B.index.bang(pe)][k])
        khat_e = int(E.reindex[E.index.bang(e)][khat])
        py = F.on_objects[y]
        for x in E.objects:
            px = F.on_objects[x]
            nu = len(fb.homs[(px, a)])
            nv = len(fe.homs[(x, y)])
            if nu == 0 or nv == 0:
                continue
            count += nu * nv
            # v is a triangle with u iff P(v) == k_e . u
            ku = fb.comp[(px, a, py)][k_e - fb.offset[(a, py)], :]           # local in hom(px, py)
            pv = Pe[fe.block(x, y)] - fb.offset[(px, py)]
            triangle = pv[None, :] == ku[:, None]                              # [u, v]
            # candidate lifts uhat : x -> ahat over e
            nw = len(fe.homs[(x, ahat)])
            counts = np.zeros((nu, nv), dtype=np.int64)
            if nw:
                pw = Pe[fe.block(x, ahat)] - fb.offset[(px, a)]
                vw = fe.comp[(x, ahat, y)][khat_e - fe.offset[(ahat, y)], :]
                np.add.at(counts, (pw, vw), 1)
            bad = triangle & (counts != 1)
            if bad.any():
                u, v = np.argwhere(bad)[0]
                return False, count, {"index": e, "X": x, "u": fb.homs[(px, a)][u],
                                      "v": fe.homs[(x, y)][v], "lifts": int(counts[u, v])}, None
            if nw and triangle.any():
                lift_of = np.full((nu, nv), -1, dtype=np.int64)
                lift_of[pw, vw] = np.arange(nw)
                used = np.unique(lift_of[triangle])
                homes = where.setdefault(e, set())
                for e2 in E.index.objects:
                    if e2 in homes:
                        continue
                    for sigma in E.index.hom(e, e2):
                        img = E.reindex[sigma][E.fibres[e2].block(x, ahat)] - fe.offset[(x, ahat)]
                        if np.isin(used, img).any():
                            homes.add(e2)
                            break
    return True, count, None, {e: sorted(v) for e, v in where.items()}


# ---------------------------------------------------------------- builders


def _fn_name(outs) -> str:
    return "".join(str(o) for o in outs)


def concrete_index(objects: dict, terminal: Optional[str] = None) -> FinCat:
    """Category of finite sets with predicates; ``objects`` maps a name to ``(size, pred)``.

    Arrows are predicate-preserving functions, named ``dom>cod:table``.
    """
    arrows, fns = {}, {}
    names = list(objects)
    for a in names:
        na, ra = objects[a]
        for b in names:
            nb, rb = objects[b]
            for outs in itertools.product(range(nb), repeat=na):
                if all(outs[i] in rb for i in ra):
                    nm = f"{a}>{b}:{_fn_name(outs)}"
                    arrows[nm] = (a, b)
                    fns[nm] = outs
    by_table = {(arrows[n][0], arrows[n][1], fns[n]): n for n in arrows}
    compose = {}
    for g, (b, c) in arrows.items():
        for f, (a, b2) in arrows.items():
            if b2 != b:
                continue
            outs = tuple(fns[g][fns[f][i]] for i in range(objects[a][0]))
            compose[(g, f)] = by_table[(a, c, outs)]
    identities = {a: by_table[(a, a, tuple(range(objects[a][0])))] for a in names}
    cat = FinCat(names, arrows, compose, identities, terminal)
    cat.functions = fns
    cat.sizes = {a: objects[a][0] for a in names}
    return cat


def self_lind(index: FinCat, objects: dict, name: str = "") -> FinLInd:
    """The self-indexing: over ``(Z, T)`` an arrow ``A -> B`` is a function
    ``Z x A -> B`` sending ``T x R_A`` into ``R_B``."""
    objs = list(objects)
    fibres, tables = {}, {}
    for c in index.objects:
        nz = index.sizes[c]
        tz = _pred_of(index, c)
        homs, fn = {}, {}
        for a in objs:
            na, ra = objects[a]
            for b in objs:
                nb, rb = objects[b]
                names = []
                for outs in itertools.product(range(nb), repeat=nz * na):
                    if all(outs[z * na + x] in rb for z in tz for x in ra):
                        nm = f"{a}>{b}:{_fn_name(outs)}"
                        names.append(nm)
                        fn[(a, b, nm)] = outs
                homs[(a, b)] = names
        lookup = {(a, b, fn[(a, b, nm)]): i for (a, b), ns in homs.items() for i, nm in enumerate(ns)}
        comp = {}
        for a, b, cc in itertools.product(objs, repeat=3):
            na = objects[a][0]
            nb = objects[b][0]
            t = np.zeros((len(homs[(b, cc)]), len(homs[(a, b)])), dtype=np.int64)
            for j, g in enumerate(homs[(b, cc)]):
                go = fn[(b, cc, g)]
                for i, f in enumerate(homs[(a, b)]):
                    fo = fn[(a, b, f)]
                    outs = tuple(go[z * nb + fo[z * na + x]] for z in range(nz) for x in range(na))
                    t[j, i] = lookup[(a, cc, outs)]
            comp[(a, b, cc)] = t
        ident = {a: lookup[(a, a, tuple(x for _ in range(nz) for x in range(objects[a][0])))] for a in objs}
        fibres[c] = Fibre(objs, homs, comp, ident)
        tables[c] = (fn, lookup)
    reindex = {}
    for rho, (d, c) in index.arrows.items():
        rf = index.functions[rho]
        nd = index.sizes[d]
        fc, fd = fibres[c], fibres[d]
        fn_c = tables[c][0]
        lookup_d = tables[d][1]
        arr = np.zeros(fc.size, dtype=np.int64)
        for gid, nm in enumerate(fc.names):
            a, b = fc.src[gid], fc.tgt[gid]
            na = objects[a][0]
            outs = fn_c[(a, b, nm)]
            new = tuple(outs[rf[z] * na + x] for z in range(nd) for x in range(na))
            arr[gid] = fd.offset[(a, b)] + lookup_d[(a, b, new)]
        reindex[rho] = arr
    return FinLInd(index, objs, fibres, reindex, name)


def _pred_of(index: FinCat, c) -> Iterable[int]:
    return index.preds[c] if hasattr(index, "preds") else range(index.sizes[c])


def _pred_objects(sizes: Iterable[int]) -> dict:
    out = {}
    for n in sizes:
        for k in range(n + 1):
            for sub in itertools.combinations(range(n), k):
                out[f"P{n}{{{','.join(map(str, sub))}}}"] = (n, frozenset(sub))
    return out


def _set_objects(sizes: Iterable[int]) -> dict:
    return {f"S{n}": (n, frozenset(range(n))) for n in sizes}


def pred_truncation(sizes=(0, 1, 2)):
    """Predicates over the sets of the given sizes, over the bare sets.

    Returns ``(E, B, F)``: the self-indexed truncated predicate category, the
    self-indexed truncated set category, and the forgetful functor.
    """
    pobjs = _pred_objects(sizes)
    sobjs = _set_objects(sizes)
    pidx = concrete_index(pobjs, terminal="P1{0}")
    pidx.preds = {a: sorted(r) for a, (_, r) in pobjs.items()}
    sidx = concrete_index(sobjs, terminal="S1")
    E = self_lind(pidx, pobjs, "pred")
    B = self_lind(sidx, sobjs, "set")
    on_obj = {a: f"S{n}" for a, (n, _) in pobjs.items()}
    on_idx_arr = {f: f"{on_obj[a]}>{on_obj[b]}:{f.split(':', 1)[1]}" for f, (a, b) in pidx.arrows.items()}
    p = FinFunctor(pidx, sidx, dict(on_obj), on_idx_arr)
    maps = {}
    for e in pidx.objects:
        fe, fb = E.fibres[e], B.fibres[on_obj[e]]
        arr = np.zeros(fe.size, dtype=np.int64)
        for gid, nm in enumerate(fe.names):
            a, b = fe.src[gid], fe.tgt[gid]
            arr[gid] = fb.ids[(on_obj[a], on_obj[b], f"{on_obj[a]}>{on_obj[b]}:{nm.split(':', 1)[1]}")]
        maps[e] = arr
    return E, B, FinLIndFunctor(E, B, p, dict(on_obj), maps)


def identity_functor(L: FinLInd) -> FinLIndFunctor:
    p = FinFunctor(L.index, L.index, {c: c for c in L.index.objects}, {f: f for f in L.index.arrows})
    return FinLIndFunctor(L, L, p, {a: a for a in L.objects},
                          {c: np.arange(fb.size) for c, fb in L.fibres.items()})


def trivial_lind() -> FinLInd:
    idx = FinCat(["1"], {"id1": ("1", "1")}, {("id1", "id1"): "id1"}, {"1": "id1"}, "1")
    fb = Fibre(["*"], {("*", "*"): ["id"]}, {("*", "*", "*"): np.zeros((1, 1), dtype=np.int64)}, {"*": 0})
    return FinLInd(idx, ["*"], {"1": fb}, {"id1": np.zeros(1, dtype=np.int64)}, "trivial")


def idempotent_lind() -> FinLInd:
    """One index object, one fibre object, arrows ``id`` and an idempotent ``t``."""
    idx = FinCat(["1"], {"id1": ("1", "1")}, {("id1", "id1"): "id1"}, {"1": "id1"}, "1")
    comp = np.array([[0, 1], [1, 1]], dtype=np.int64)      # rows g, cols f; t . t = t
    fb = Fibre(["*"], {("*", "*"): ["id", "t"]}, {("*", "*", "*"): comp}, {"*": 0})
    return FinLInd(idx, ["*"], {"1": fb}, {"id1": np.arange(2, dtype=np.int64)}, "idempotent")


def corrupt_reindex(L: FinLInd, rho, arrow: str, replacement: str) -> FinLInd:
    """A copy of ``L`` whose reindexing along ``rho`` sends ``arrow`` to ``replacement``."""
    d, c = L.index.arrows[rho]
    reindex = {r: arr.copy() for r, arr in L.reindex.items()}
    reindex[rho][L.fibres[c].gid(arrow)] = L.fibres[d].gid(replacement)
    return FinLInd(L.index, L.objects, L.fibres, reindex, L.name + "-corrupted")


def drop_object(F: FinLIndFunctor, obj) -> FinLIndFunctor:
    """Remove one object from the source of ``F`` (index category untouched)."""
    src = F.source
    objs = [o for o in src.objects if o != obj]
    fibres, keep = {}, {}
    for c, fb in src.fibres.items():
        homs = {(a, b): list(fb.homs[(a, b)]) for a in objs for b in objs}
        comp = {(a, b, cc): fb.comp[(a, b, cc)] for a in objs for b in objs for cc in objs}
        new = Fibre(objs, homs, comp, {a: fb.ident[a] for a in objs})
        fibres[c] = new
        keep[c] = np.array([fb.offset[(new.src[i], new.tgt[i])] + fb.homs[(new.src[i], new.tgt[i])].index(nm)
                            for i, nm in enumerate(new.names)], dtype=np.int64)
    reindex = {}
    for rho, (d, c) in src.index.arrows.items():
        old_to_new = {int(o): i for i, o in enumerate(keep[d])}
        reindex[rho] = np.array([old_to_new[int(src.reindex[rho][o])] for o in keep[c]], dtype=np.int64)
    L = FinLInd(src.index, objs, fibres, reindex, src.name + f"-without-{obj}")
    maps = {e: F.on_arrows[e][keep[e]] for e in src.index.objects}
    return FinLIndFunctor(L, F.target, F.index_functor, {o: F.on_objects[o] for o in objs}, maps)


def load(path: str):
    with open(path) as fh:
        d = json.load(fh)
    if "source" in d:
        return FinLIndFunctor.from_json(d)
    return FinLInd.from_json(d)
