#!/usr/bin/env python3
"""Regenerate the solvmanifold classification table and write both renditions.

Usage: python scripts/run_classification.py [--samples N] [--seed S] [--out DIR]
"""

import argparse
import pathlib
import sys

from hermflow.catalog import (compare_with_fixture, regenerate_table3,
                              render_json, render_markdown)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    result = regenerate_table3(samples_per_family=args.samples, seed=args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "classification.md").write_text(render_markdown(result), encoding="utf-8")
    (out / "classification.json").write_text(render_json(result), encoding="utf-8")
    ok, diffs = compare_with_fixture(result)
    print(f"wrote {out}/classification.{{md,json}}; fixture match: {ok}")
    for diff in diffs:
        print("  mismatch:", diff)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
