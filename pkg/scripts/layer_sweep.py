"""Noiseless VQE error versus layer count on synthetic (12, 2, 2) Hamiltonians.

Writes one CSV row per (seed, ansatz, init, layers) with the best-of-restarts
energy error. Real tautomer integrals are not bundled; pass an encoded
directory from ``qeevqe encode`` with ``--hamiltonian`` to sweep those instead.

    python scripts/layer_sweep.py --seeds 0 1 --layers 2 4 8 --out sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from qeevqe.cli import load_encoded
from qeevqe.synthetic import synthetic_problem
from qeevqe.units import HARTREE_TO_KCAL
from qeevqe.vqe import InitStrategy, best_of_restarts, hf_reference_state


@dataclass
class SweepConfig:
    seeds: list[int] = field(default_factory=lambda: [0])
    layers: list[int] = field(default_factory=lambda: list(range(2, 21, 2)))
    ansatze: list[str] = field(default_factory=lambda: ["staggered", "chain"])
    inits: list[str] = field(default_factory=lambda: ["hf", "gaussian"])
    restarts: int = 5
    variance: float = 0.3
    hamiltonian: Path | None = None
    out: Path = Path("layer_sweep.csv")


def problems(cfg: SweepConfig):
    if cfg.hamiltonian is not None:
        H, summary = load_encoded(cfg.hamiltonian)
        yield summary.get("label", "encoded"), H, summary["hf_prep_index"], summary["exact_energy_hartree"]
        return
    for seed in cfg.seeds:
        p = synthetic_problem(seed)
        yield f"synthetic-{seed}", p.hamiltonian, hf_reference_state(p.config_set), p.exact_energy


def run(cfg: SweepConfig) -> list[dict]:
    rows = []
    for name, H, prep, exact in problems(cfg):
        for ansatz in cfg.ansatze:
            if ansatz == "chain":
                layers = [L for L in cfg.layers if L >= 1]
            else:
                layers = cfg.layers
            for init_kind in cfg.inits:
                for L in layers:
                    t0 = time.perf_counter()
                    init = InitStrategy(init_kind, 0, cfg.variance)
                    res = best_of_restarts(H, ansatz, L, init, cfg.restarts, prep=prep, reference_energy=exact)
                    err = res.energy - exact
                    rows.append({
                        "problem": name, "ansatz": ansatz, "init": init_kind, "layers": L,
                        "energy_hartree": res.energy, "error_hartree": err,
                        "error_kcal": err * HARTREE_TO_KCAL, "evaluations": res.evaluations,
                        "seconds": round(time.perf_counter() - t0, 2),
                    })
                    print(f"{name} {ansatz:<9} {init_kind:<8} L={L:>2}  error {err:.3e} Ha")
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+")
    ap.add_argument("--layers", type=int, nargs="+")
    ap.add_argument("--ansatze", nargs="+", choices=["staggered", "chain"])
    ap.add_argument("--inits", nargs="+", choices=["hf", "gaussian"])
    ap.add_argument("--restarts", type=int)
    ap.add_argument("--hamiltonian", type=Path)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)
    cfg = SweepConfig(**{k: v for k, v in vars(args).items() if v is not None})
    rows = run(cfg)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {cfg.out}; config {asdict(cfg)}")


if __name__ == "__main__":
    main()
