"""Exact reference energies by dense diagonalization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .configspace import ConfigurationSet
from .encode import QubitOperator
from .errors import DimensionError, NumericalError, ResourceError, ValidationError
from .pauli import MAX_MATRIX_QUBITS, PauliSum
from .units import HARTREE_TO_KCAL


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    ground_vector: np.ndarray
    subspace: bool

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def _eigh(m: np.ndarray, tol: float = 1e-10):
    if m.size and np.max(np.abs(m - m.conj().T)) > tol:
        raise NumericalError("matrix is not Hermitian; refusing to diagonalize")
    if np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0.0) <= 1e-15:
        m = m.real
    return np.linalg.eigh(m)


def exact_ground(
    H: QubitOperator | PauliSum | np.ndarray,
    restrict_to_encoded: bool = False,
    config_set: ConfigurationSet | None = None,
) -> SpectrumResult:
    """Full spectrum of ``H`` or of its encoded block.

    With ``restrict_to_encoded`` the block over the first ``|F|`` basis states
    is diagonalized; ``config_set`` supplies ``|F|`` and must agree with the
    operator's own record when it has one.
    """
    if isinstance(H, PauliSum):
        H = QubitOperator.from_pauli(H)
    if isinstance(H, np.ndarray):
        n = int(round(np.log2(H.shape[0]))) if H.shape[0] else 0
        if H.shape != (1 << n, 1 << n):
            raise DimensionError(f"matrix shape {H.shape} is not 2^Q square")
        if n > MAX_MATRIX_QUBITS:
            raise ResourceError(f"{n} qubits exceeds the {MAX_MATRIX_QUBITS}-qubit cap")
        H = QubitOperator.from_matrix(H, n)
    if H.n_qubits > MAX_MATRIX_QUBITS:
        raise ResourceError(f"{H.n_qubits} qubits exceeds the {MAX_MATRIX_QUBITS}-qubit cap")
    m = H.dense()
    if restrict_to_encoded:
        if config_set is None:
            raise ValidationError("restricting to the encoded subspace needs the configuration set")
        k = len(config_set)
        if H.encoded_dim is not None and H.encoded_dim != k:
            raise ValidationError(f"operator encodes {H.encoded_dim} states, set has {k}")
        if k > m.shape[0]:
            raise DimensionError(f"set of {k} states does not fit in {H.n_qubits} qubits")
        m = m[:k, :k]
    w, v = _eigh(m)
    return SpectrumResult(w, v[:, 0], restrict_to_encoded)


def _pauli_on_bits(pauli: PauliSum, bits: int) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for s, c in pauli.items():
        y = (s.x & s.z).bit_count()
        phase = (1j) ** y * (-1) ** ((bits & s.z).bit_count() & 1)
        tgt = bits ^ s.x
        out[tgt] = out.get(tgt, 0) + c * phase
    return out


def jw_sector_matrix(H_jw: PauliSum, config_set: ConfigurationSet) -> np.ndarray:
    """``<f'|H|f>`` over sector members, evaluated string by string on bitstrings."""
    if H_jw.n_qubits != config_set.n_spin_orbitals:
        raise ValidationError(
            f"operator on {H_jw.n_qubits} qubits, sector on {config_set.n_spin_orbitals} spin-orbitals"
        )
    dim = len(config_set)
    M = np.zeros((dim, dim), dtype=complex)
    for k, f in enumerate(config_set.bits):
        for tgt, amp in _pauli_on_bits(H_jw, f).items():
            j = config_set.index_of_bits(tgt)
            if j is not None:
                M[j, k] += amp
    return M


def relative_energies(energies: Mapping[str, float], anchor: str) -> dict[str, float]:
    """Energies in kcal/mol relative to ``anchor``."""
    if anchor not in energies:
        raise ValidationError(f"anchor {anchor!r} not among {sorted(energies)}")
    ref = energies[anchor]
    return {k: (e - ref) * HARTREE_TO_KCAL for k, e in energies.items()}
