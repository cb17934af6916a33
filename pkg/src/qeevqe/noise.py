"""Thermal-relaxation noise and density-matrix simulation of ansatz circuits.

Relaxation is zero temperature: excited population decays to ``|0>``.
Times follow the hardware tables: T1/T2 in milliseconds, gate durations in
nanoseconds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import Circuit, CompiledCircuit, _cnot_perm, _x_perm, basis_state
from .encode import QubitOperator
from .errors import ConfigurationError, DegenerateProjectionError, DimensionError, PhysicalityError, ValidationError

NS_PER_MS = 1e6

DEFAULT_DURATIONS_NS = {"u1": 0.0, "u2": 50.0, "u3": 100.0, "cnot": 200.0, "reset": 1000.0, "measure": 1000.0}

# Ry and X are both general single-qubit rotations on hardware.
GATE_DURATION_KEY = {"RY": "u3", "X": "u3", "CNOT": "cnot"}

KETO_T1_MS = (194.24, 230.20, 218.81, 212.36, 189.67, 198.52, 230.69, 153.56)
KETO_T2_MS = (188.28, 219.84, 226.43, 165.82, 236.03, 204.83, 196.17, 166.16)
ENOL_T1_MS = (134.45, 147.61, 208.15, 211.67, 170.22, 208.24, 200.66, 242.95)
ENOL_T2_MS = (60.85, 234.66, 178.45, 210.15, 224.01, 178.00, 105.58, 136.21)


def thermal_kraus(t1_ms: float | None, t2_ms: float | None, t_ns: float) -> list[np.ndarray]:
    """Kraus operators of amplitude damping followed by pure dephasing.

    The relaxation probability is ``1 - exp(-t/T1)`` and the total coherence
    factor is ``exp(-t/T2)``. ``None`` or ``inf`` for a time constant means
    that decay channel is absent.
    """
    if t_ns < 0:
        raise ValidationError(f"duration must be nonnegative, got {t_ns}")
    t1 = math.inf if t1_ms is None else float(t1_ms)
    t2 = math.inf if t2_ms is None else float(t2_ms)
    if t1 <= 0 or t2 <= 0:
        raise PhysicalityError(f"time constants must be positive (T1={t1}, T2={t2})")
    if t2 > 2 * t1:
        raise PhysicalityError(f"T2={t2} ms exceeds 2*T1={2 * t1} ms")
    t = t_ns / NS_PER_MS
    gamma = -math.expm1(-t / t1) if math.isfinite(t1) else 0.0
    # coherence left for dephasing after damping already took exp(-t/2T1)
    rate = (1 / t2 if math.isfinite(t2) else 0.0) - (0.5 / t1 if math.isfinite(t1) else 0.0)
    lam = math.exp(-t * max(rate, 0.0))
    damp = [np.array([[1.0, 0.0], [0.0, math.sqrt(1 - gamma)]]), np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]])]
    phase = [math.sqrt((1 + lam) / 2) * np.eye(2), math.sqrt((1 - lam) / 2) * np.diag([1.0, -1.0])]
    ops = [p @ k for p in phase for k in damp]
    return [k for k in ops if np.any(k)]


def kraus_completeness_error(kraus: Sequence[np.ndarray]) -> float:
    total = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def apply_channel_1q(kraus: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Apply a single-qubit channel (Kraus list) to a one-qubit density matrix."""
    return sum(k @ rho @ k.conj().T for k in kraus)


@dataclass
class NoiseModel:
    t1_ms: list[float | None]
    t2_ms: list[float | None]
    durations_ns: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_DURATIONS_NS))
    idle_noise: bool = False
    measure_relaxation: bool = True

    def __post_init__(self):
        self.t1_ms = list(self.t1_ms)
        self.t2_ms = list(self.t2_ms)
        if len(self.t1_ms) != len(self.t2_ms):
            raise ConfigurationError(f"{len(self.t1_ms)} T1 entries but {len(self.t2_ms)} T2 entries")
        for key, val in self.durations_ns.items():
            if val < 0:
                raise ValidationError(f"duration {key}={val} ns is negative")
        for q, (a, b) in enumerate(zip(self.t1_ms, self.t2_ms)):
            t1 = math.inf if a is None else a
            t2 = math.inf if b is None else b
            if t1 <= 0 or t2 <= 0 or t2 > 2 * t1:
                raise PhysicalityError(f"qubit {q}: T1={a} ms, T2={b} ms violates 0 < T2 <= 2 T1")

    @property
    def n_qubits(self) -> int:
        return len(self.t1_ms)

    def duration(self, key: str) -> float:
        return float(self.durations_ns.get(key, 0.0))

    def kraus(self, qubit: int, t_ns: float) -> list[np.ndarray]:
        if qubit >= self.n_qubits:
            raise ConfigurationError(f"no T1/T2 entry for qubit {qubit}")
        return thermal_kraus(self.t1_ms[qubit], self.t2_ms[qubit], t_ns)

    @classmethod
    def noiseless(cls, n_qubits: int) -> NoiseModel:
        return cls([None] * n_qubits, [None] * n_qubits, {}, measure_relaxation=False)

    @classmethod
    def keto(cls) -> NoiseModel:
        return cls(list(KETO_T1_MS), list(KETO_T2_MS))

    @classmethod
    def enol(cls) -> NoiseModel:
        return cls(list(ENOL_T1_MS), list(ENOL_T2_MS))

    def to_json(self) -> str:
        return json.dumps(
            {
                "t1_ms": self.t1_ms,
                "t2_ms": self.t2_ms,
                "durations_ns": self.durations_ns,
                "idle_noise": self.idle_noise,
                "measure_relaxation": self.measure_relaxation,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_dict(cls, d: dict) -> NoiseModel:
        try:
            t1, t2 = d["t1_ms"], d["t2_ms"]
        except KeyError as e:
            raise ConfigurationError(f"noise config lacks {e.args[0]!r}") from None
        durations = dict(DEFAULT_DURATIONS_NS)
        durations.update({k.lower(): float(v) for k, v in d.get("durations_ns", {}).items()})
        return cls(t1, t2, durations, bool(d.get("idle_noise", False)), bool(d.get("measure_relaxation", True)))

    @classmethod
    def from_json(cls, text: str) -> NoiseModel:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"noise config is not valid JSON: {e}") from None

    @classmethod
    def load(cls, path) -> NoiseModel:
        return cls.from_json(Path(path).read_text())


class DensitySimulator:
    """Density-matrix evolution, ``rho`` stored as a dense ``2^Q x 2^Q`` array."""

    def __init__(self, circuit: Circuit, model: NoiseModel):
        if model.n_qubits < circuit.n_qubits:
            raise ConfigurationError(
                f"noise model covers {model.n_qubits} qubits, circuit needs {circuit.n_qubits}"
            )
        self.circuit = circuit
        self.model = model
        self._cache: dict[tuple[int, float], list[np.ndarray]] = {}

    def _kraus(self, q, t):
        key = (q, t)
        if key not in self._cache:
            self._cache[key] = self.model.kraus(q, t)
        return self._cache[key]

    def _apply_1q(self, rho, q, ops):
        """``sum_k K rho K^dagger`` with ``K`` acting on qubit ``q``."""
        dim = rho.shape[0]
        lo = 1 << q
        rows = (dim // (2 * lo), 2, lo * dim)
        cols = (dim * dim // (2 * lo), 2, lo)
        out = 0
        for k in ops:
            r = (k @ rho.reshape(rows)).reshape(dim, dim)
            out = out + (k.conj() @ r.reshape(cols)).reshape(dim, dim)
        return out

    def _relax(self, rho, qubits, t):
        if t <= 0:
            return rho
        for q in qubits:
            ops = self._kraus(q, t)
            if len(ops) == 1 and np.allclose(ops[0], np.eye(2)):
                continue
            rho = self._apply_1q(rho, q, ops)
        return rho

    def run(self, params, initial: int = 0, trace_purity: bool = False):
        n = self.circuit.n_qubits
        params = np.asarray(params, dtype=float)
        if params.shape != (self.circuit.n_params,):
            raise ValidationError(f"expected {self.circuit.n_params} parameters, got {params.shape}")
        psi = basis_state(n, initial)
        rho = np.outer(psi, psi)
        purities = []
        for g in self.circuit.gates:
            if g.kind == "RY":
                c, s = math.cos(params[g.param] / 2), math.sin(params[g.param] / 2)
                rho = self._apply_1q(rho, g.qubits[0], [np.array([[c, -s], [s, c]])])
            else:
                perm = _cnot_perm(n, *g.qubits) if g.kind == "CNOT" else _x_perm(n, g.qubits[0])
                rho = rho[perm][:, perm]
            t = self.model.duration(GATE_DURATION_KEY[g.kind])
            before = _purity(rho) if trace_purity else None
            active = range(n) if self.model.idle_noise else g.qubits
            rho = self._relax(rho, active, t)
            if trace_purity:
                purities.append((before, _purity(rho)))
        if self.model.measure_relaxation:
            before = _purity(rho) if trace_purity else None
            rho = self._relax(rho, range(n), self.model.duration("measure"))
            if trace_purity:
                purities.append((before, _purity(rho)))
        rho = 0.5 * (rho + rho.conj().T)
        return (rho, purities) if trace_purity else rho


def _purity(rho):
    return float(np.real(np.vdot(rho, rho)))


def simulate_density(circuit: Circuit, params, model: NoiseModel, initial: int = 0) -> np.ndarray:
    """Noisy evolution of ``|initial><initial|``: each gate, then relaxation on its qubits
    for the gate duration, then measurement-duration relaxation on every qubit."""
    return DensitySimulator(circuit, model).run(params, initial)


def check_density(rho: np.ndarray, tol: float = 1e-10) -> None:
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise PhysicalityError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise PhysicalityError(f"density matrix trace {tr} != 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -1e-9:
        raise PhysicalityError(f"density matrix has eigenvalue {lo:.3g}")


def noisy_expectation(rho: np.ndarray, H: QubitOperator) -> tuple[float, float]:
    """Raw ``Tr(rho H)`` and the value renormalized over the encoded subspace."""
    if rho.shape != (H.dim, H.dim):
        raise DimensionError(f"density matrix {rho.shape} vs operator dimension {H.dim}")
    M = H.matrix()
    raw = float(np.real(np.sum(M.multiply(rho.T))))
    k = H.dim if H.encoded_dim is None else H.encoded_dim
    block = rho[:k, :k]
    weight = float(np.real(np.trace(block)))
    if weight < 1e-12:
        raise DegenerateProjectionError(f"encoded-subspace population {weight:.3g} is too small")
    sub = M[:k, :k]
    renorm = float(np.real(np.sum(sub.multiply(block.T)))) / weight
    return raw, renorm


def noiseless_density(circuit: Circuit, params, initial: int = 0) -> np.ndarray:
    psi = CompiledCircuit(circuit).run(params, basis_state(circuit.n_qubits, initial))
    return np.outer(psi, psi.conj())
