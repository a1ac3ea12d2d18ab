"""Run the lifting-law checker on every shipped lifting."""
import argparse
import time

from cbpv.relations import (LawBounds, Pred, check_lifting_laws, em_lifting, em_size_matched,
                            em_without_second_clause, erratic_choice_lifting, exception_lifting,
                            free_lifting)
from cbpv.semantics import atoms
from cbpv.syntax import Signature

CHOICE = Signature.build(["b"], [], [("or", 2), ("fail", 0)])


def liftings(quick):
    E = atoms(["e1", "e2"])
    yield exception_lifting(Pred.from_members(E, [E.elements()[0]])), LawBounds(3, 3, 3, 3, 2)
    yield erratic_choice_lifting(), LawBounds(3, 3, 3, 3, 2)
    yield free_lifting(CHOICE), LawBounds(3, 3, 2, 2, 1) if quick else LawBounds(3, 3, 3, 2, 1)
    yield em_lifting(), LawBounds(2, 2, 2, 2, 2) if quick else LawBounds(3, 3, 2, 2, 2)
    yield em_without_second_clause(), LawBounds(2, 2, 2, 2, 2)
    yield em_size_matched(), LawBounds(2, 2, 1, 1, 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller bind domains")
    args = ap.parse_args()
    for lift, bounds in liftings(args.quick):
        t0 = time.perf_counter()
        rep = check_lifting_laws(lift, bounds)
        print(f"{rep.summary()}  [{time.perf_counter() - t0:.1f}s]")
        for c in rep.counterexamples[:3]:
            print(f"    {c}")


if __name__ == "__main__":
    main()
