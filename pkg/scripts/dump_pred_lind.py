"""Write the Pred truncation functor as JSON, readable by `cbpv lind check`."""
import argparse
import json

from cbpv import lind


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--sizes", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--drop", help="remove this source object first (breaks the fibration property)")
    args = ap.parse_args()

    E, B, F = lind.pred_truncation(tuple(args.sizes))
    if args.drop:
        F = lind.drop_object(F, args.drop)
    with open(args.out, "w") as fh:
        json.dump(F.to_json(), fh)
    sizes = {c: fb.size for c, fb in F.source.fibres.items()}
    print(f"wrote {args.out}: {len(F.source.index.arrows)} index arrows, fibre sizes {sizes}")


if __name__ == "__main__":
    main()
