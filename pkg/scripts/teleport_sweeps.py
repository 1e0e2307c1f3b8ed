"""Average teleportation fidelity versus transmissivity in the three loss regimes."""
import argparse
import sys

from qloss.cli import main

REGIMES = ("symmetric", "alice-lossless", "bob-lossless")

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/teleport")
    ap.add_argument("--family", default="psi-plus")
    ap.add_argument("--grid", default="0.05:1:0.05")
    ap.add_argument("--jobs", default="1")
    a = ap.parse_args()
    code = 0
    for regime in REGIMES:
        argv = ["teleport-sweep", "--family", a.family, "--regime", regime, "--grid", a.grid, "--jobs", a.jobs]
        code = max(code, main([*argv, "--out", f"{a.out}/{regime}"]))
    sys.exit(code)
