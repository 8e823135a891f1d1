"""Regenerate every reference target and diff it against the stored goldens.

    python scripts/reproduce_all.py --out results/
"""

import argparse
import sys

from darkbright.reproduce import TARGETS, reproduce_many


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="reproduce_out")
    ap.add_argument("targets", nargs="*", default=list(TARGETS))
    args = ap.parse_args()
    bad = 0
    for res in reproduce_many(args.targets, args.out):
        status = "ok" if res["ok"] else "MISMATCH"
        print(f"{res['target']:<10}{status}")
        for m in res["mismatches"]:
            print(f"    {m['key']}: expected {m['expected']}, got {m['got']}")
        bad += not res["ok"]
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
