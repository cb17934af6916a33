"""Command-line workflow: encode, vqe, compare, rank-active, sweep.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuit import build_ansatz
from .configspace import ConfigurationSet
from .encode import QubitOperator, jw_encode, qee_hamiltonian, read_triplets, write_triplets
from .errors import ConfigurationError, NumericalError, ValidationError
from .fermion import (
    ActiveSpaceSpec,
    freeze_reduce,
    parse_orbital_range,
    rank_candidate_sets,
    read_fcidump,
    read_occupancy_csv,
    select_active_by_occupancy,
)
from .noise import NoiseModel, simulate_density, noisy_expectation
from .oracle import exact_ground, jw_sector_matrix, relative_energies
from .units import HARTREE_TO_KCAL
from .vqe import InitStrategy, VqeConfig, best_of_restarts, hf_reference_state

SCHEMA = 1
log = logging.getLogger("qeevqe")


@dataclass
class TautomerInput:
    fcidump: Path
    occupancy: Path | None = None
    active: str | None = None
    noise: Path | None = None


@dataclass
class WorkflowConfig:
    tautomers: dict[str, TautomerInput] = field(default_factory=dict)
    anchor: str | None = None
    max_active_mos: int | None = None
    n_active_electrons: int | None = None
    max_qee_qubits: int | None = None
    encoding: str = "qee"
    ansatz: str = "staggered"
    layers: list[int] = field(default_factory=lambda: [2])
    init: str = "gaussian"
    seed: int = 0
    restarts: int = 5
    variance: float = 0.3
    noise: Path | None = None
    out: Path = Path("out")
    reference_kcal: dict[str, float] | None = None

    @classmethod
    def load(cls, path) -> WorkflowConfig:
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigurationError(f"config file {path} not found") from None
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: invalid JSON ({e})") from None
        base = path.parent
        taut = {}
        for label, d in raw.pop("tautomers", {}).items():
            if "fcidump" not in d:
                raise ConfigurationError(f"tautomer {label!r} lacks an fcidump path")
            taut[label] = TautomerInput(
                base / d["fcidump"],
                base / d["occupancy"] if d.get("occupancy") else None,
                d.get("active"),
                base / d["noise"] if d.get("noise") else None,
            )
        cfg = cls(tautomers=taut)
        known = set(cls.__dataclass_fields__) - {"tautomers"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
        for key, val in raw.items():
            if key in ("noise", "out") and val is not None:
                val = base / val
            setattr(cfg, key, val)
        return cfg

    def validate(self) -> None:
        for label, t in self.tautomers.items():
            for p in (t.fcidump, t.occupancy, t.noise):
                if p is not None and not Path(p).exists():
                    raise ConfigurationError(f"tautomer {label!r}: {p} does not exist")
        if self.noise is not None and not Path(self.noise).exists():
            raise ConfigurationError(f"noise config {self.noise} does not exist")
        if self.tautomers and self.anchor is None:
            self.anchor = next(iter(self.tautomers))
        if self.anchor is not None and self.tautomers and self.anchor not in self.tautomers:
            raise ConfigurationError(f"anchor {self.anchor!r} is not a tautomer label")
        if self.encoding not in ("qee", "jw"):
            raise ConfigurationError(f"encoding must be qee or jw, got {self.encoding!r}")
        if not self.layers:
            raise ConfigurationError("layer list is empty")


def _metadata() -> dict:
    return {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# encode ------------------------------------------------------------------------------

def _active_spec(table, t: TautomerInput, cfg: WorkflowConfig) -> ActiveSpaceSpec:
    if t.active:
        return ActiveSpaceSpec.from_active(table.n_orbitals, parse_orbital_range(t.active), table.n_electrons)
    if t.occupancy is not None and cfg.max_active_mos:
        occ = read_occupancy_csv(t.occupancy)
        if len(occ) != table.n_orbitals:
            raise ValidationError(f"{t.occupancy}: {len(occ)} orbitals, FCIDUMP has {table.n_orbitals}")
        return select_active_by_occupancy(
            occ,
            table.n_electrons,
            cfg.max_active_mos,
            n_active_electrons=cfg.n_active_electrons,
            max_qee_qubits=cfg.max_qee_qubits,
        )
    return ActiveSpaceSpec.from_active(table.n_orbitals, range(table.n_orbitals), table.n_electrons)


def encode_tautomer(label: str, t: TautomerInput, cfg: WorkflowConfig, out: Path) -> dict:
    table = read_fcidump(t.fcidump)
    spec = _active_spec(table, t, cfg)
    reduced = freeze_reduce(table, spec)
    cs = ConfigurationSet(reduced.n_spin_orbitals, reduced.n_alpha, reduced.n_beta)
    jw_q = reduced.n_spin_orbitals
    qee_q = cs.qubit_count
    if cfg.encoding == "qee":
        H = qee_hamiltonian(reduced, cs)
        exact = exact_ground(H, True, cs).ground_energy
        prep = hf_reference_state(cs)
        floor = exact
    else:
        H = jw_encode(reduced)
        sector = jw_sector_matrix(H.pauli(), cs)
        exact = float(np.linalg.eigvalsh(sector)[0])
        aufbau = cs.decode_index(hf_reference_state(cs)).bits
        prep = aufbau
        # the ansatz does not conserve particle number; bound against the full space
        floor = exact_ground(H).ground_energy
    out.mkdir(parents=True, exist_ok=True)
    (out / "hamiltonian.pauli.txt").write_text(H.pauli().to_text())
    (out / "hamiltonian.sparse.txt").write_text(write_triplets(H.matrix()))
    summary = {
        "schema": SCHEMA,
        "label": label,
        "active": spec.label,
        "active_orbitals": list(spec.active),
        "frozen_orbitals": list(spec.frozen),
        "active_electrons": reduced.n_electrons,
        "n_spin_orbitals": reduced.n_spin_orbitals,
        "n_alpha": cs.n_alpha,
        "n_beta": cs.n_beta,
        "sector_size": len(cs),
        "jw_qubits": jw_q,
        "qee_qubits": qee_q,
        "encoding": cfg.encoding,
        "n_qubits": H.n_qubits,
        "encoded_dim": H.encoded_dim,
        "hf_prep_index": prep,
        "exact_energy_hartree": exact,
        "variational_floor_hartree": floor,
        "metadata": _metadata(),
    }
    _dump(out / "summary.json", summary)
    return summary


def load_encoded(directory: Path) -> tuple[QubitOperator, dict]:
    directory = Path(directory)
    try:
        summary = json.loads((directory / "summary.json").read_text())
        text = (directory / "hamiltonian.sparse.txt").read_text()
    except FileNotFoundError as e:
        raise ConfigurationError(f"encoded artifact missing: {e.filename}") from None
    m = read_triplets(text)
    H = QubitOperator.from_matrix(m, summary["n_qubits"], encoded_dim=summary.get("encoded_dim"))
    return H, summary


# vqe ---------------------------------------------------------------------------------

CSV_COLUMNS = ["layers", "energy_hartree", "error_hartree", "error_kcal", "evaluations", "converged"]
NOISY_COLUMNS = ["noisy_energy_raw", "noisy_energy_renorm"]


def run_vqe_artifact(directory: Path, cfg: WorkflowConfig, noise: NoiseModel | None, out: Path) -> dict:
    H, summary = load_encoded(directory)
    exact = summary["exact_energy_hartree"]
    init = InitStrategy(cfg.init, cfg.seed, cfg.variance)
    rows, results = [], []
    for L in cfg.layers:
        res = best_of_restarts(
            H,
            cfg.ansatz,
            L,
            init,
            cfg.restarts,
            prep=summary["hf_prep_index"],
            config=VqeConfig(),
            reference_energy=summary["variational_floor_hartree"],
            n_qubits=H.n_qubits,
        )
        row = {
            "layers": L,
            "energy_hartree": res.energy,
            "error_hartree": res.energy - exact,
            "error_kcal": (res.energy - exact) * HARTREE_TO_KCAL,
            "evaluations": res.evaluations,
            "converged": res.converged,
        }
        if noise is not None:
            circ = build_ansatz(cfg.ansatz, H.n_qubits, L).with_prep(summary["hf_prep_index"])
            rho = simulate_density(circ, res.params, noise, 0)
            raw, renorm = noisy_expectation(rho, H)
            row["noisy_energy_raw"] = raw
            row["noisy_energy_renorm"] = renorm
        rows.append(row)
        results.append(res.to_dict())
        log.info("L=%d energy %.10f error %.3e Ha", L, res.energy, res.energy - exact)
    payload = {
        "schema": SCHEMA,
        "label": summary.get("label"),
        "active": summary.get("active"),
        "jw_qubits": summary.get("jw_qubits"),
        "qee_qubits": summary.get("qee_qubits"),
        "encoding": summary.get("encoding"),
        "exact_energy_hartree": exact,
        "vqe_energy_hartree": min(r["energy_hartree"] for r in rows),
        "rows": rows,
        "results": results,
        "metadata": _metadata(),
    }
    out.mkdir(parents=True, exist_ok=True)
    _dump(out / "vqe_results.json", payload)
    cols = CSV_COLUMNS + (NOISY_COLUMNS if noise is not None else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    (out / "convergence.csv").write_text(buf.getvalue())
    return payload


# compare -----------------------------------------------------------------------------

def compare_results(results: dict[str, dict], anchor: str, reference: dict[str, float] | None = None) -> dict:
    if len(results) < 2:
        raise ConfigurationError("comparison needs at least two tautomers")
    if anchor not in results:
        raise ConfigurationError(f"anchor {anchor!r} not among {sorted(results)}")
    exact = {k: r["exact_energy_hartree"] for k, r in results.items()}
    vqe = {k: r["vqe_energy_hartree"] for k, r in results.items()}
    rel_exact = relative_energies(exact, anchor)
    rel_vqe = relative_energies(vqe, anchor)
    pref_exact = min(exact, key=lambda k: (exact[k], k))
    pref_vqe = min(vqe, key=lambda k: (vqe[k], k))
    report = {
        "schema": SCHEMA,
        "anchor": anchor,
        "tautomers": {
            k: {
                "active": r.get("active"),
                "jw_qubits": r.get("jw_qubits"),
                "qee_qubits": r.get("qee_qubits"),
                "exact_energy_hartree": exact[k],
                "vqe_energy_hartree": vqe[k],
                "error_hartree": vqe[k] - exact[k],
                "error_kcal": (vqe[k] - exact[k]) * HARTREE_TO_KCAL,
            }
            for k, r in results.items()
        },
        "relative_exact_kcal": rel_exact,
        "relative_vqe_kcal": rel_vqe,
        "preferred_exact": pref_exact,
        "preferred_vqe": pref_vqe,
        "exact_vqe_agree": pref_exact == pref_vqe,
    }
    if reference:
        missing = set(results) - set(reference)
        if missing:
            raise ValidationError(f"reference lacks tautomers {sorted(missing)}")
        pref_ref = min(reference, key=lambda k: (reference[k], k))
        report["reference_kcal"] = dict(reference)
        report["preferred_reference"] = pref_ref
        report["reference_agreement"] = pref_ref == pref_vqe
    report["metadata"] = _metadata()
    return report


def format_report(report: dict) -> str:
    lines = [f"{'tautomer':<12}{'exact (kcal/mol)':>18}{'VQE (kcal/mol)':>18}{'VQE error (kcal/mol)':>22}"]
    for k, t in report["tautomers"].items():
        lines.append(
            f"{k:<12}{report['relative_exact_kcal'][k]:>18.3f}{report['relative_vqe_kcal'][k]:>18.3f}"
            f"{t['error_kcal']:>22.3f}"
        )
    lines.append(f"preferred (exact): {report['preferred_exact']}")
    lines.append(f"preferred (VQE):   {report['preferred_vqe']}")
    if not report["exact_vqe_agree"]:
        lines.append("WARNING: exact and VQE predictions disagree")
    if "preferred_reference" in report:
        lines.append(
            f"preferred (reference): {report['preferred_reference']}  agreement={report['reference_agreement']}"
        )
    return "\n".join(lines) + "\n"


# rank-active -------------------------------------------------------------------------

def read_candidates(path) -> tuple[list[str], list[tuple[str, dict[str, float]]]]:
    text = Path(path).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or reader.fieldnames[0] != "set":
        raise ValidationError(f"{path}: first column must be 'set'")
    labels = reader.fieldnames[1:]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        try:
            rows.append((row["set"].strip(), {k: float(row[k]) for k in labels}))
        except (TypeError, ValueError):
            raise ValidationError(f"{path}:{lineno}: malformed candidate row") from None
    return labels, rows


def parse_pairs(text: str) -> dict[str, float]:
    out = {}
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise ValidationError(f"expected label=value, got {chunk!r}")
        k, v = chunk.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ValidationError(f"bad number in {chunk!r}") from None
    return out


def rank_active(candidates_csv, reference: dict[str, float] | None, reference_set: str | None) -> list[dict]:
    labels, rows = read_candidates(candidates_csv)
    if reference_set is not None:
        match = [r for name, r in rows if name == reference_set]
        if not match:
            raise ValidationError(f"reference set {reference_set!r} not in {candidates_csv}")
        reference = match[0]
        rows = [(n, r) for n, r in rows if n != reference_set]
    if reference is None:
        raise ValidationError("need --reference or --reference-set")
    if set(reference) != set(labels):
        raise ValidationError(f"reference labels {sorted(reference)} differ from candidate columns {labels}")
    ranked = rank_candidate_sets(rows, reference)
    energies = dict(rows)
    return [{"rank": i + 1, "set": name, "deviation_kcal": dev, **energies[name]} for i, (name, dev) in enumerate(ranked)]


# entry point -------------------------------------------------------------------------

def _layers(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"layers must be comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON workflow config")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def _vqe_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ansatz", choices=["staggered", "chain"])
    p.add_argument("--layers", type=_layers, help="comma-separated layer counts")
    p.add_argument("--init", choices=["hf", "gaussian"])
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--noise", type=Path, help="noise model JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qeevqe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="reduce integrals to an active space and encode them")
    _common(p)
    p.add_argument("--fcidump", type=Path)
    p.add_argument("--occupancy", type=Path)
    p.add_argument("--active", help="explicit active orbitals, e.g. 14-19")
    p.add_argument("--label", default="system")
    p.add_argument("--max-active-mos", type=int)
    p.add_argument("--encoding", choices=["qee", "jw"])

    p = sub.add_parser("vqe", help="run VQE on an encoded Hamiltonian")
    _common(p)
    p.add_argument("--hamiltonian", type=Path, required=True, help="directory written by encode")
    _vqe_flags(p)

    p = sub.add_parser("compare", help="relative tautomer energies from VQE result files")
    _common(p)
    p.add_argument("--results", nargs="+", required=True, metavar="LABEL=PATH")
    p.add_argument("--anchor")
    p.add_argument("--reference", help="reference relative energies, e.g. keto=0,enol=24.070")

    p = sub.add_parser("rank-active", help="rank candidate active sets against a reference")
    _common(p)
    p.add_argument("--candidates", type=Path, required=True, help="CSV: set,<tautomer>,...")
    p.add_argument("--reference", help="label=value pairs in kcal/mol")
    p.add_argument("--reference-set", help="row of the candidate CSV that serves as reference")
    p.add_argument("--occupancy", type=Path, help="also report the occupancy-rule choice")
    p.add_argument("--n-electrons", type=int)
    p.add_argument("--max-active-mos", type=int, default=6)

    p = sub.add_parser("sweep", help="encode, VQE and compare every tautomer of a config")
    _common(p)
    p.add_argument("--encoding", choices=["qee", "jw"])
    _vqe_flags(p)
    return parser


def _config_from(args) -> WorkflowConfig:
    cfg = WorkflowConfig.load(args.config) if getattr(args, "config", None) else WorkflowConfig()
    for key in ("encoding", "ansatz", "layers", "init", "seed", "restarts", "noise", "out", "max_active_mos"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


def _noise_model(cfg: WorkflowConfig, t: TautomerInput | None = None) -> NoiseModel | None:
    path = (t.noise if t is not None and t.noise is not None else None) or cfg.noise
    return NoiseModel.load(path) if path is not None else None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _dispatch(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    cfg = _config_from(args)
    out = Path(cfg.out)
    if args.command == "encode":
        if args.fcidump is not None:
            cfg.tautomers = {args.label: TautomerInput(args.fcidump, args.occupancy, args.active)}
            cfg.validate()
        if not cfg.tautomers:
            raise ConfigurationError("nothing to encode: pass --fcidump or a config with tautomers")
        for label, t in cfg.tautomers.items():
            s = encode_tautomer(label, t, cfg, out / label)
            print(f"{label}: active {s['active']} ({s['active_electrons']}e, {len(s['active_orbitals'])}o) "
                  f"sector {s['sector_size']} JW {s['jw_qubits']} / QEE {s['qee_qubits']} qubits "
                  f"exact {s['exact_energy_hartree']:.10f} Ha")
        return 0
    if args.command == "vqe":
        payload = run_vqe_artifact(args.hamiltonian, cfg, _noise_model(cfg), out)
        sys.stdout.write((out / "convergence.csv").read_text())
        return 0
    if args.command == "compare":
        results = {}
        for item in args.results:
            if "=" not in item:
                raise ValidationError(f"expected LABEL=PATH, got {item!r}")
            label, path = item.split("=", 1)
            try:
                results[label] = json.loads(Path(path).read_text())
            except FileNotFoundError:
                raise ConfigurationError(f"result file {path} not found") from None
        anchor = args.anchor or cfg.anchor or next(iter(results))
        ref = parse_pairs(args.reference) if args.reference else cfg.reference_kcal
        report = compare_results(results, anchor, ref)
        _dump(out / "report.json", report)
        text = format_report(report)
        (out / "report.txt").write_text(text)
        sys.stdout.write(text)
        return 0
    if args.command == "rank-active":
        ref = parse_pairs(args.reference) if args.reference else None
        table = rank_active(args.candidates, ref, args.reference_set)
        for row in table:
            print(f"{row['rank']:>3}  {row['set']:<8} deviation {row['deviation_kcal']:.3f} kcal/mol")
        payload = {"schema": SCHEMA, "ranking": table}
        if args.occupancy is not None:
            if args.n_electrons is None:
                raise ValidationError("--occupancy needs --n-electrons")
            spec = select_active_by_occupancy(read_occupancy_csv(args.occupancy), args.n_electrons, args.max_active_mos)
            payload["occupancy_choice"] = spec.label
            print(f"occupancy rule suggests {spec.label}")
        if args.out is not None:
            _dump(out / "ranking.json", payload)
        return 0
    if args.command == "sweep":
        if len(cfg.tautomers) < 1:
            raise ConfigurationError("sweep needs tautomers in the config")
        results = {}
        for label, t in cfg.tautomers.items():
            encode_tautomer(label, t, cfg, out / label)
            results[label] = run_vqe_artifact(out / label, cfg, _noise_model(cfg, t), out / label)
        if len(results) >= 2:
            report = compare_results(results, cfg.anchor, cfg.reference_kcal)
            _dump(out / "report.json", report)
            text = format_report(report)
            (out / "report.txt").write_text(text)
            sys.stdout.write(text)
        return 0
    raise ConfigurationError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
