"""Synthetic molecule-like Hamiltonians for convergence studies.

Real active-space integrals for the tautomers are not published, so the VQE
experiments run on generated integrals instead. Two generators exist:
``fermion.random_table`` (dense, often strongly correlated) and
``molecular_like_table`` below, which mimics a closed-shell molecule with a
HOMO-LUMO gap and Coulomb-dominated two-electron integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .configspace import ConfigurationSet
from .encode import QubitOperator, qee_hamiltonian
from .errors import ValidationError
from .fermion import IntegralTable, spin_expand


def molecular_like_table(
    n_orbitals: int,
    n_electrons: int,
    seed: int | None = None,
    *,
    off_diagonal: float = 0.06,
    core_energy: float = 0.0,
) -> IntegralTable:
    """Random closed-shell integrals: occupied levels in [-1.2, -0.4] Ha,
    virtual levels in [0.1, 1.2] Ha, and ``(ij|kl) = sum_L B^L_ij B^L_kl`` with
    ``B^L`` peaked on its ``(L, L)`` element."""
    if n_electrons % 2 or not 0 <= n_electrons <= 2 * n_orbitals:
        raise ValidationError(f"need an even electron count within {2 * n_orbitals}, got {n_electrons}")
    rng = np.random.default_rng(seed)
    n, nocc = n_orbitals, n_electrons // 2
    eps = np.concatenate(
        [np.sort(rng.uniform(-1.2, -0.4, nocc)), np.sort(rng.uniform(0.1, 1.2, n - nocc))]
    )
    off = rng.normal(scale=0.02, size=(n, n))
    h1 = np.diag(eps) + (off + off.T) / 2
    B = rng.normal(scale=off_diagonal, size=(n, n, n))
    B = (B + B.transpose(0, 2, 1)) / 2
    B[np.arange(n), np.arange(n), np.arange(n)] += rng.uniform(0.5, 0.8, n)
    eri = np.einsum("Lij,Lkl->ijkl", B, B)
    return spin_expand(h1, eri, core_energy, n_electrons)


def rescale_table(table: IntegralTable, scale: float, core_energy: float) -> IntegralTable:
    return IntegralTable(table.h1 * scale, table.h2 * scale, core_energy, table.n_electrons, table.ms2)


def normalize_sector_spectrum(
    table: IntegralTable, cs: ConfigurationSet, width: float = 1.0, top: float = -0.5
) -> IntegralTable:
    """Rescale so the sector spectrum spans ``width`` Ha and ends at ``top``.

    A negative ``top`` keeps every physical level below the zero energy of
    the padding states of the qubit-efficient encoding.
    """
    block = qee_hamiltonian(table, cs).encoded_block().real
    w = np.linalg.eigvalsh(block)
    spread = w[-1] - w[0]
    if spread <= 0:
        raise ValidationError("sector spectrum is degenerate; cannot rescale")
    s = width / spread
    # eigenvalues scale with s apart from the core term, which only shifts them
    return rescale_table(table, s, top - s * (w[-1] - table.core_energy))


@dataclass
class SyntheticProblem:
    table: IntegralTable
    config_set: ConfigurationSet
    hamiltonian: QubitOperator
    exact_energy: float
    seed: int

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits


def synthetic_problem(
    seed: int,
    n_orbitals: int = 6,
    n_electrons: int = 4,
    *,
    generator: str = "molecular",
    width: float = 1.0,
) -> SyntheticProblem:
    """A scaled QEE Hamiltonian for the closed-shell sector with its exact ground energy."""
    if generator == "molecular":
        raw = molecular_like_table(n_orbitals, n_electrons, seed)
    elif generator == "random":
        from .fermion import random_table

        raw = random_table(n_orbitals, n_electrons, seed)
    else:
        raise ValidationError(f"unknown generator {generator!r}")
    cs = ConfigurationSet(2 * n_orbitals, n_electrons // 2, n_electrons // 2)
    table = normalize_sector_spectrum(raw, cs, width)
    H = qee_hamiltonian(table, cs)
    e0 = float(np.linalg.eigvalsh(H.encoded_block().real)[0])
    return SyntheticProblem(table, cs, H, e0, seed)


def decouple_reference(H: QubitOperator, index: int = 0, offset: float | None = None) -> QubitOperator:
    """Zero every coupling of basis state ``index`` to the rest.

    The reference then becomes an eigenstate of ``H``, and any circuit that
    maps it to basis states at zero parameters has an exactly vanishing
    energy gradient there. With ``offset`` the reference energy is moved to
    ``offset`` Ha above the lowest level of the remaining encoded block, so
    it is a stationary point but not the ground state.
    """
    m = H.matrix().tolil(copy=True)
    diag = m[index, index]
    m[index, :] = 0
    m[:, index] = 0
    if offset is not None:
        k = H.dim if H.encoded_dim is None else H.encoded_dim
        rest = [i for i in range(k) if i != index]
        block = m.toarray()[np.ix_(rest, rest)]
        diag = float(np.linalg.eigvalsh(block)[0]) + offset
    m[index, index] = diag
    return QubitOperator.from_matrix(m.tocsr(), H.n_qubits, encoded_dim=H.encoded_dim, meta=dict(H.meta))
