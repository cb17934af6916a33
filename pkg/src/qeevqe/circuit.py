"""Hardware-efficient Ry/CNOT ansatz circuits and statevector simulation.

Basis index bit ``q`` is the state of qubit ``q``. ``Ry(t)`` is
``[[cos t/2, -sin t/2], [sin t/2, cos t/2]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, ParseError, ValidationError


@dataclass(frozen=True)
class Gate:
    kind: str  # "RY", "CNOT" or "X"
    qubits: tuple[int, ...]
    param: int | None = None

    def __post_init__(self):
        if self.kind not in ("RY", "CNOT", "X"):
            raise ValidationError(f"unsupported gate {self.kind}")
        expected = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != expected or len(set(self.qubits)) != expected:
            raise ValidationError(f"{self.kind} needs {expected} distinct qubits, got {self.qubits}")
        if (self.kind == "RY") != (self.param is not None):
            raise ValidationError("only RY gates carry a parameter index")


def ry(qubit: int, param: int) -> Gate:
    return Gate("RY", (qubit,), param)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def xgate(qubit: int) -> Gate:
    return Gate("X", (qubit,))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits or min(g.qubits) < 0:
                raise ValidationError(f"gate {g} acts outside {self.n_qubits} qubits")
        params = sorted({g.param for g in self.gates if g.param is not None})
        if params != list(range(len(params))):
            raise ValidationError("parameter indices must be exactly 0..n_params-1")

    @property
    def n_params(self) -> int:
        return len({g.param for g in self.gates if g.param is not None})

    @property
    def n_cnots(self) -> int:
        return sum(g.kind == "CNOT" for g in self.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def with_prep(self, basis_index: int) -> Circuit:
        """Prepend X gates that turn ``|0...0>`` into ``|basis_index>``."""
        if not 0 <= basis_index < (1 << self.n_qubits):
            raise ValidationError(f"basis index {basis_index} outside {self.n_qubits} qubits")
        prep = tuple(xgate(q) for q in range(self.n_qubits) if (basis_index >> q) & 1)
        return Circuit(self.n_qubits, prep + self.gates, self.name)

    def to_text(self) -> str:
        lines = [f"QUBITS {self.n_qubits} PARAMS {self.n_params}"]
        for g in self.gates:
            if g.kind == "RY":
                lines.append(f"RY {g.qubits[0]} {g.param}")
            elif g.kind == "CNOT":
                lines.append(f"CNOT {g.qubits[0]} {g.qubits[1]}")
            else:
                lines.append(f"X {g.qubits[0]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        lines = [l.strip() for l in text.splitlines() if l.strip() and not l.startswith("#")]
        if not lines:
            raise ParseError("empty circuit", line=1)
        head = lines[0].split()
        if len(head) != 4 or head[0] != "QUBITS" or head[2] != "PARAMS":
            raise ParseError("header must be 'QUBITS <Q> PARAMS <P>'", line=1)
        n, n_params = int(head[1]), int(head[3])
        gates = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split()
            try:
                if parts[0] == "RY" and len(parts) == 3:
                    gates.append(ry(int(parts[1]), int(parts[2])))
                elif parts[0] == "CNOT" and len(parts) == 3:
                    gates.append(cnot(int(parts[1]), int(parts[2])))
                elif parts[0] == "X" and len(parts) == 2:
                    gates.append(xgate(int(parts[1])))
                else:
                    raise ParseError(f"unknown gate line {line!r}", line=lineno)
            except ValueError:
                raise ParseError(f"bad integer in {line!r}", line=lineno) from None
        circ = cls(n, tuple(gates))
        if circ.n_params != n_params:
            raise ParseError(f"header declares {n_params} params, body uses {circ.n_params}", line=1)
        return circ


def build_staggered_ansatz(n_qubits: int = 8, layers: int = 1) -> Circuit:
    """Alternating-brick ansatz: per layer one Ry rank then CNOT pairs.

    Odd layers entangle (0,1), (2,3), ...; even layers (1,2), (3,4), ...,
    (n-1, 0). Even layers number their Ry parameters starting from qubit 1
    and wrapping to qubit 0. A final Ry rank closes the circuit, giving
    ``n/2 * L`` CNOTs and ``n * (L + 1)`` parameters.
    """
    if n_qubits < 2 or n_qubits % 2:
        raise ValidationError(f"staggered ansatz needs an even qubit count >= 2, got {n_qubits}")
    if layers < 0:
        raise ValidationError("layer count must be nonnegative")
    gates = []
    k = 0
    for layer in range(1, layers + 1):
        odd = layer % 2 == 1
        order = range(n_qubits) if odd else [(q + 1) % n_qubits for q in range(n_qubits)]
        for q in order:
            gates.append(ry(q, k))
            k += 1
        start = 0 if odd else 1
        for c in range(start, n_qubits, 2):
            gates.append(cnot(c, (c + 1) % n_qubits))
    for q in range(n_qubits):
        gates.append(ry(q, k))
        k += 1
    return Circuit(n_qubits, tuple(gates), f"staggered-{layers}")


def build_chain_ansatz(n_qubits: int = 8, layers: int = 1) -> Circuit:
    """Per layer one Ry rank then a CNOT ladder (0,1), (1,2), ..., (n-2, n-1)."""
    if n_qubits < 1:
        raise ValidationError("chain ansatz needs at least one qubit")
    if layers < 1:
        raise ValidationError("chain ansatz needs at least one layer")
    gates = []
    k = 0
    for _ in range(layers):
        for q in range(n_qubits):
            gates.append(ry(q, k))
            k += 1
        for q in range(n_qubits - 1):
            gates.append(cnot(q, q + 1))
    return Circuit(n_qubits, tuple(gates), f"chain-{layers}")


ANSATZ_BUILDERS = {"staggered": build_staggered_ansatz, "chain": build_chain_ansatz}


def build_ansatz(kind: str, n_qubits: int, layers: int) -> Circuit:
    try:
        return ANSATZ_BUILDERS[kind](n_qubits, layers)
    except KeyError:
        raise ValidationError(f"unknown ansatz {kind!r}; choose from {sorted(ANSATZ_BUILDERS)}") from None


# simulation ---------------------------------------------------------------------

def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def _cnot_perm(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


def _x_perm(n: int, qubit: int) -> np.ndarray:
    return np.arange(1 << n) ^ (1 << qubit)


class CompiledCircuit:
    """Circuit with consecutive fixed gates fused into single permutations."""

    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        n = circuit.n_qubits
        self.n_qubits = n
        ops: list[tuple] = []
        for g in circuit.gates:
            if g.kind == "RY":
                q = g.qubits[0]
                ops.append(("RY", (1 << (n - 1 - q), 2, 1 << q), g.param))
                continue
            perm = _cnot_perm(n, *g.qubits) if g.kind == "CNOT" else _x_perm(n, g.qubits[0])
            if ops and ops[-1][0] == "P":
                # new[i] = old[perm[i]] composed with the previous gather
                ops[-1] = ("P", ops[-1][1][perm], None)
            else:
                ops.append(("P", perm, None))
        self.ops = [
            (kind, a, k, None if kind == "RY" else np.argsort(a)) for kind, a, k in ops
        ]

    @staticmethod
    def _mats(params):
        half = 0.5 * np.asarray(params, dtype=float)
        c, s = np.cos(half), np.sin(half)
        R = np.empty((len(half), 2, 2))
        R[:, 0, 0] = c
        R[:, 0, 1] = -s
        R[:, 1, 0] = s
        R[:, 1, 1] = c
        return R

    def run(self, params, psi: np.ndarray) -> np.ndarray:
        R = self._mats(params)
        for kind, a, k, _ in self.ops:
            if kind == "RY":
                psi = (R[k] @ psi.reshape(a)).reshape(-1)
            else:
                psi = psi[a]
        return psi

    def energy_and_gradient(self, params, psi0: np.ndarray, H) -> tuple[float, np.ndarray]:
        """Adjoint-mode gradient; ``H`` is any object supporting ``H @ vector``."""
        params = np.asarray(params, dtype=float)
        R = self._mats(params)
        # dE/dt = 2 Re <H psi| dRy psi> and dRy/dt = Ry(t + pi) / 2
        D = self._mats(params + np.pi)
        psi = self.run(params, psi0)
        lam = H @ psi
        energy = float(np.real(np.vdot(psi, lam)))
        grad = np.zeros(len(params))
        for kind, a, k, inv in reversed(self.ops):
            if kind == "RY":
                Rt = R[k].T
                v = Rt @ psi.reshape(a)
                w = lam.reshape(a)
                grad[k] += np.real(np.vdot(w, D[k] @ v))
                psi = v.reshape(-1)
                lam = (Rt @ w).reshape(-1)
            else:
                psi = psi[inv]
                lam = lam[inv]
        return energy, grad


def basis_state(n_qubits: int, index: int, dtype=float) -> np.ndarray:
    if not 0 <= index < (1 << n_qubits):
        raise ValidationError(f"basis index {index} outside {n_qubits} qubits")
    psi = np.zeros(1 << n_qubits, dtype=dtype)
    psi[index] = 1.0
    return psi


def _initial_vector(n_qubits, initial):
    if isinstance(initial, (int, np.integer)):
        return basis_state(n_qubits, int(initial))
    psi = np.asarray(initial)
    if psi.shape != (1 << n_qubits,):
        raise DimensionError(f"initial state has shape {psi.shape}, expected ({1 << n_qubits},)")
    return psi.astype(np.complex128 if np.iscomplexobj(psi) else float)


def simulate_statevector(circuit: Circuit, params: Sequence[float], initial=0) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValidationError(f"expected {circuit.n_params} parameters, got {params.shape}")
    psi = _initial_vector(circuit.n_qubits, initial)
    return CompiledCircuit(circuit).run(params, psi)


def expectation(state: np.ndarray, H, tol: float = 1e-10) -> float:
    """``<s|H|s>`` for a QubitOperator, dense array or sparse matrix ``H``."""
    mat = H.matrix() if hasattr(H, "matrix") and callable(H.matrix) else H
    if mat.shape[0] != state.shape[0]:
        raise DimensionError(f"operator dimension {mat.shape[0]} vs state {state.shape[0]}")
    val = np.vdot(state, mat @ state)
    if abs(val.imag) > tol:
        raise ValidationError(f"expectation has imaginary part {val.imag:.3g}; operator not Hermitian?")
    return float(val.real)


def sampled_expectation(state: np.ndarray, H, shots: int, seed: int | None = None) -> float:
    """Shot-noise estimate of ``<s|H|s>`` from independent per-term measurements.

    Each non-identity Pauli term ``c P`` is measured ``shots`` times: the
    count of +1 outcomes is Binomial(shots, (1 + <P>)/2). Not used by the
    optimizer, which always works with exact expectations.
    """
    from .pauli import PauliSum

    if shots < 1:
        raise ValidationError("shots must be positive")
    ps = H if isinstance(H, PauliSum) else H.pauli()
    if (1 << ps.n_qubits) != state.shape[0]:
        raise DimensionError(f"operator on {ps.n_qubits} qubits vs state of length {state.shape[0]}")
    rng = np.random.default_rng(seed)
    total = 0.0
    for p, c in ps.items():
        if abs(c.imag) > 1e-10:
            raise ValidationError(f"term {p.label} has a complex coefficient; operator not Hermitian?")
        if p.is_identity():
            total += c.real
            continue
        mean = expectation(state, PauliSum(ps.n_qubits, {p: 1.0}).to_sparse())
        prob = min(max((1.0 + mean) / 2, 0.0), 1.0)
        total += c.real * (2.0 * rng.binomial(shots, prob) / shots - 1.0)
    return float(total)


def parameter_shift_gradient(energy_fn: Callable[[np.ndarray], float], params) -> np.ndarray:
    """``dE/dt_i = [E(t + pi/2 e_i) - E(t - pi/2 e_i)] / 2``, exact for Ry generators."""
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for i in range(params.size):
        shifted = params.copy()
        shifted[i] += np.pi / 2
        plus = energy_fn(shifted)
        shifted[i] -= np.pi
        minus = energy_fn(shifted)
        grad[i] = 0.5 * (plus - minus)
    return grad


def finite_difference_gradient(energy_fn, params, step: float = 1e-5) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for i in range(params.size):
        shifted = params.copy()
        shifted[i] += step
        plus = energy_fn(shifted)
        shifted[i] -= 2 * step
        minus = energy_fn(shifted)
        grad[i] = (plus - minus) / (2 * step)
    return grad


def circuit_unitary(circuit: Circuit, params) -> np.ndarray:
    """Dense unitary, column by column; for testing small circuits."""
    dim = 1 << circuit.n_qubits
    comp = CompiledCircuit(circuit)
    params = np.asarray(params, dtype=float)
    return np.stack([comp.run(params, basis_state(circuit.n_qubits, b)) for b in range(dim)], axis=1)
