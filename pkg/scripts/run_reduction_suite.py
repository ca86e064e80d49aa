#!/usr/bin/env python3
"""Run the reduction identity across the shipped families and write a CSV
summary plus one JSON report per case.

Example:
    python3 scripts/run_reduction_suite.py --samples 1000000 --out results/
"""

import argparse
import csv
import json
import pathlib

from polygas import braid, check_dr, coxeter_b, coxeter_d

CASES = [
    ("braid2", lambda: braid(2), (0, 1)),
    ("braid3", lambda: braid(3), (0, 1)),
    ("braid4", lambda: braid(4), (0,)),
    ("coxeterD2", lambda: coxeter_d(2), (0,)),
    ("coxeterD3", lambda: coxeter_d(3), (0,)),
    ("coxeterB2", lambda: coxeter_b(2), (0,)),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default="reduction_results")
    args = ap.parse_args()

    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, maker, dims in CASES:
        for d in dims:
            rep = check_dr(maker(), d, args.samples, args.seed, args.workers)
            rows.append({
                "case": name, "d": d,
                "lhs_mean": rep.lhs.mean, "lhs_stderr": rep.lhs.stderr,
                "rhs_mean": rep.rhs.mean, "rhs_stderr": rep.rhs.stderr,
                "z": rep.z, "pass": rep.passed,
            })
            with open(outdir / f"{name}_d{d}.json", "w") as fh:
                json.dump(rep.to_json_dict(), fh, indent=2, sort_keys=True)
            print(f"{name} d={d}: lhs={rep.lhs.mean:10.3f} "
                  f"rhs={rep.rhs.mean:10.3f} z={rep.z:7.2f} "
                  f"{'ok' if rep.passed else 'MISMATCH'}")

    with open(outdir / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {outdir}/summary.csv")


if __name__ == "__main__":
    main()
