"""Closed-form oracle checks, channel capacity and the local-filtering lemmas in one go."""
import argparse
import sys

from qloss.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/checks")
    a = ap.parse_args()
    codes = [main([cmd, "--out", f"{a.out}/{cmd}"]) for cmd in ("oracle-check", "capacity", "lemma-check")]
    sys.exit(max(codes))
