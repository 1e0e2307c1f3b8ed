"""Per-state teleportation fidelities at T_A = T_B = 0.05 for all three schemes."""
import argparse
import sys

from qloss.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/box")
    ap.add_argument("--family", default="psi-plus")
    ap.add_argument("--seed", default="0")
    a = ap.parse_args()
    sys.exit(main(["teleport-box", "--family", a.family, "--seed", a.seed, "--out", a.out]))
