#!/usr/bin/env python3
"""Run one partition under both scalar backends and show the structural
certificate delta (expected: backend tags and residual fields only)."""

import argparse
import sys

from qautcert.cli import SuiteConfig, diff, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--partition", default="2,1")
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    partition = tuple(int(x) for x in args.partition.split(","))
    exact = run(SuiteConfig(partition=partition, backend="exact", seed=args.seed))
    floated = run(SuiteConfig(partition=partition, backend="float",
                              tol=args.tol, seed=args.seed))
    print("worst residuals on the float backend:")
    for name, frag in sorted(floated["suites"].items()):
        print(f"  {name:8s} passed={frag.get('passed')} "
              f"residual={frag.get('worst_residual')}")
    delta = diff(exact, floated)
    print("\nstructural deltas (exact vs float):")
    print(delta or "  none")
    both = exact["summary"]["passed"] and floated["summary"]["passed"]
    return 0 if both else 1


if __name__ == "__main__":
    sys.exit(main())
