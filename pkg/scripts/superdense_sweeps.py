"""Quantum advantage of superdense coding versus transmissivity for several forward losses."""
import argparse
import sys

from qloss.cli import main

REGIMES = ("symmetric", "alice-lossless", "bob-lossless")

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/superdense")
    ap.add_argument("--t-f", default="0.1,0.5,0.9")
    ap.add_argument("--grid", default="0:1:0.05")
    ap.add_argument("--schemes", default="baseline,nla,povm")
    ap.add_argument("--jobs", default="1")
    a = ap.parse_args()
    code = 0
    for t_f in a.t_f.split(","):
        for regime in REGIMES:
            argv = ["superdense-sweep", "--t-f", t_f, "--regime", regime, "--grid", a.grid]
            argv += ["--schemes", a.schemes, "--jobs", a.jobs, "--out", f"{a.out}/tf{t_f}/{regime}"]
            code = max(code, main(argv))
    sys.exit(code)
