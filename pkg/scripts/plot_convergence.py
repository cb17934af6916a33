"""Plot error versus layers from a layer_sweep.py CSV (needs matplotlib)."""

import argparse
import csv
from collections import defaultdict

from qeevqe.units import CHEMICAL_ACCURACY_HARTREE


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("--out", default="convergence.png")
    args = ap.parse_args(argv)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = defaultdict(list)
    with open(args.csv) as fh:
        for row in csv.DictReader(fh):
            key = (row["problem"], row["ansatz"], row["init"])
            series[key].append((int(row["layers"]), max(float(row["error_hartree"]), 1e-12)))
    fig, ax = plt.subplots(figsize=(6, 4))
    for (problem, ansatz, init), pts in sorted(series.items()):
        pts.sort()
        ax.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{problem} {ansatz} {init}")
    ax.axhline(CHEMICAL_ACCURACY_HARTREE, color="k", ls="--", lw=0.8, label="chemical accuracy")
    ax.set_xlabel("layers")
    ax.set_ylabel("|E_VQE - E_exact| (Ha)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
