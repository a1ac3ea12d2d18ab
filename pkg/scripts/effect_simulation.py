"""Set vs list semantics of erratic choice over several seeds."""
import argparse
import time
from pathlib import Path

from cbpv.cli import run

SIG = Path(__file__).resolve().parents[1] / "configs" / "choice_sig.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seeds", type=int, nargs="+", default=[7, 8, 9])
    ap.add_argument("--depth", type=int, default=5)
    args = ap.parse_args()

    worst = 0
    for seed in args.seeds:
        t0 = time.perf_counter()
        code = run(["simulate", "--sig", str(SIG), "--count", str(args.count), "--seed", str(seed),
                    "--depth", str(args.depth)])
        print(f"# seed {seed}: exit {code} in {time.perf_counter() - t0:.2f}s\n")
        worst = max(worst, code)
    raise SystemExit(worst)


if __name__ == "__main__":
    main()
