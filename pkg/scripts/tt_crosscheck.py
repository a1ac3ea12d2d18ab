"""Print the tt cross-check table: computed lift family vs 'p subset of R'."""
import argparse
import json

from cbpv.relations import tt_crosscheck
from cbpv.semantics import show


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-size", type=int, default=4)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rows = tt_crosscheck(args.max_size)
    if args.json:
        print(json.dumps([{"size": r.size, "R": show(r.R), "agrees": r.agrees,
                           "only_computed": sorted(show(p) for p in r.only_computed),
                           "only_claimed": sorted(show(p) for p in r.only_claimed),
                           "empty_in_computed": r.empty_in_computed,
                           "empty_in_claimed": r.empty_in_claimed,
                           "computed_is_meets_R": r.matches_meets_R} for r in rows], indent=2))
        return
    for r in rows:
        print(r.describe())
    bad = sum(not r.agrees for r in rows)
    meets = sum(r.matches_meets_R for r in rows)
    print(f"\n{len(rows)} pairs, {bad} disagree, computed family equals 'p meets R' in {meets}")


if __name__ == "__main__":
    main()
