"""Fermion-to-qubit encodings.

``jw_encode`` maps every spin-orbital to a qubit. ``qee_hamiltonian`` maps
only the configurations of one (n_alpha, n_beta) sector, assigning sector
member ``k`` (ascending bitstring order) to qubit basis state ``|k>``; the
``2^Q - |F|`` unused basis states span a padding block on which the encoded
Hamiltonian is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .configspace import ConfigurationSet, apply_excitation_bits, qubits_for
from .errors import DimensionError, ParseError, ResourceError, ValidationError
from .fermion import IntegralTable, to_excitation_form
from .pauli import MAX_MATRIX_QUBITS, PauliString, PauliSum, pauli_mul

DECOMPOSE_TOL = 1e-14


@dataclass(eq=False)
class QubitOperator:
    """A qubit operator held as a sparse matrix, a Pauli sum, or both.

    ``encoded_dim`` is the size of the physical subspace (basis states
    ``0..encoded_dim-1``) for qubit-efficient encodings, ``None`` otherwise.
    """

    n_qubits: int
    _matrix: sp.csr_matrix | None = None
    _pauli: PauliSum | None = None
    encoded_dim: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self._matrix is None and self._pauli is None:
            raise ValidationError("QubitOperator needs a matrix or a Pauli sum")
        if self._matrix is not None:
            dim = 1 << self.n_qubits
            if self._matrix.shape != (dim, dim):
                raise DimensionError(f"matrix shape {self._matrix.shape} != ({dim}, {dim})")
            self._matrix = sp.csr_matrix(self._matrix)
        if self._pauli is not None and self._pauli.n_qubits != self.n_qubits:
            raise DimensionError("Pauli sum qubit count mismatch")

    @classmethod
    def from_pauli(cls, pauli: PauliSum, **kw) -> QubitOperator:
        return cls(pauli.n_qubits, None, pauli, **kw)

    @classmethod
    def from_matrix(cls, matrix, n_qubits: int | None = None, **kw) -> QubitOperator:
        matrix = sp.csr_matrix(matrix)
        if n_qubits is None:
            n_qubits = int(round(math.log2(matrix.shape[0])))
        return cls(n_qubits, matrix, None, **kw)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def matrix(self) -> sp.csr_matrix:
        if self._matrix is None:
            self._matrix = self._pauli.to_sparse()
        return self._matrix

    def dense(self) -> np.ndarray:
        if self.n_qubits > MAX_MATRIX_QUBITS:
            raise ResourceError(f"{self.n_qubits} qubits exceeds the matrix cap")
        return self.matrix().toarray()

    def pauli(self) -> PauliSum:
        if self._pauli is None:
            self._pauli = qee_pauli_decompose(self)
        return self._pauli

    def is_real(self, tol: float = 1e-12) -> bool:
        m = self.matrix()
        return m.nnz == 0 or float(np.max(np.abs(m.data.imag))) <= tol

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        m = self.matrix()
        diff = m - m.conj().T
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol

    def projector_diagonal(self) -> np.ndarray:
        d = np.zeros(self.dim)
        d[: self.dim if self.encoded_dim is None else self.encoded_dim] = 1.0
        return d

    def encoded_block(self) -> np.ndarray:
        m = self.dense()
        k = self.dim if self.encoded_dim is None else self.encoded_dim
        return m[:k, :k]

    def to_triplets(self) -> str:
        return write_triplets(self.matrix())


# Jordan-Wigner ------------------------------------------------------------------

def jw_ladder(n_qubits: int, p: int, dagger: bool) -> PauliSum:
    """``a+_p = (X_p - iY_p)/2 Z_{p-1}...Z_0`` and ``a_p = (X_p + iY_p)/2 Z...``."""
    if not 0 <= p < n_qubits:
        raise DimensionError(f"mode {p} outside [0, {n_qubits})")
    below = (1 << p) - 1
    xs = PauliString(n_qubits, 1 << p, below)
    ys = PauliString(n_qubits, 1 << p, below | (1 << p))
    return PauliSum(n_qubits, {xs: 0.5, ys: 0.5j if not dagger else -0.5j})


def jw_encode(table: IntegralTable, tol: float = 1e-12) -> QubitOperator:
    """Jordan-Wigner image of the second-quantized Hamiltonian (core included)."""
    n = table.n_spin_orbitals
    cre = [list(jw_ladder(n, p, True).items()) for p in range(n)]
    ann = [list(jw_ladder(n, p, False).items()) for p in range(n)]
    acc: dict[PauliString, complex] = {PauliString(n): complex(table.core_energy)}

    def add(p, c):
        acc[p] = acc.get(p, 0j) + c

    for p, q in zip(*np.nonzero(table.h1)):
        h = table.h1[p, q]
        for sa, ca in cre[p]:
            for sb, cb in ann[q]:
                ph, prod = pauli_mul(sa, sb)
                add(prod, h * ph * ca * cb)

    pair_c = {}
    pair_a = {}
    h2 = table.h2
    for p, q, r, s in zip(*np.nonzero(h2)):
        if p == q or r == s:
            continue
        if (p, q) not in pair_c:
            pair_c[p, q] = _product(cre[p], cre[q])
        if (r, s) not in pair_a:
            pair_a[r, s] = _product(ann[r], ann[s])
        h = 0.5 * h2[p, q, r, s]
        for sa, ca in pair_c[p, q]:
            for sb, cb in pair_a[r, s]:
                ph, prod = pauli_mul(sa, sb)
                add(prod, h * ph * ca * cb)
    out = PauliSum(n, {p: c for p, c in acc.items() if abs(c) > tol})
    return QubitOperator.from_pauli(out, meta={"encoding": "jw"})


def _product(left, right):
    acc = {}
    for sa, ca in left:
        for sb, cb in right:
            ph, prod = pauli_mul(sa, sb)
            acc[prod] = acc.get(prod, 0j) + ph * ca * cb
    return [(p, c) for p, c in acc.items() if c != 0]


# qubit-efficient encoding ---------------------------------------------------------

def qubit_counts(n_spin_orbitals: int, n_alpha: int, n_beta: int) -> tuple[int, int]:
    half = n_spin_orbitals // 2
    if n_spin_orbitals % 2 or not (0 <= n_alpha <= half and 0 <= n_beta <= half):
        raise ValidationError(f"invalid sector ({n_spin_orbitals}, {n_alpha}, {n_beta})")
    return n_spin_orbitals, qubits_for(math.comb(half, n_alpha) * math.comb(half, n_beta))


def _embed(block: np.ndarray | sp.spmatrix, n_qubits: int) -> sp.csr_matrix:
    dim = 1 << n_qubits
    block = sp.coo_matrix(block)
    return sp.csr_matrix((block.data, (block.row, block.col)), shape=(dim, dim))


def qee_excitation(cs: ConfigurationSet, p: int, q: int) -> QubitOperator:
    """Encoded ``E_pq`` restricted to the sector.

    Transitions that leave the sector (spin-flipping ``p, q``) have no image
    and are dropped, so products of these operators are not in general the
    encoding of the fermionic product.
    """
    n = cs.n_spin_orbitals
    if not (0 <= p < n and 0 <= q < n):
        raise ValidationError(f"orbital index out of range: p={p}, q={q}")
    rows, cols, vals = [], [], []
    for k, bits in enumerate(cs.bits):
        res = apply_excitation_bits(bits, p, q)
        if res is None:
            continue
        k2 = cs.index_of_bits(res[1])
        if k2 is None:
            continue
        rows.append(k2)
        cols.append(k)
        vals.append(float(res[0]))
    Q = cs.qubit_count
    dim = 1 << Q
    m = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    return QubitOperator(Q, m, encoded_dim=len(cs))


class _SingleCache:
    """Memoized list of allowed single excitations ``E_pq`` of a bitstring."""

    def __init__(self, n):
        self.n = n
        self._cache = {}

    def __call__(self, bits):
        hit = self._cache.get(bits)
        if hit is not None:
            return hit
        ps, qs, signs, targets = [], [], [], []
        for q in range(self.n):
            if not (bits >> q) & 1:
                continue
            for p in range(self.n):
                res = apply_excitation_bits(bits, p, q)
                if res is None:
                    continue
                ps.append(p)
                qs.append(q)
                signs.append(res[0])
                targets.append(res[1])
        hit = (
            np.array(ps, dtype=np.intp),
            np.array(qs, dtype=np.intp),
            np.array(signs, dtype=float),
            np.array(targets, dtype=np.int64),
        )
        self._cache[bits] = hit
        return hit


def qee_block(table: IntegralTable, cs: ConfigurationSet) -> np.ndarray:
    """Dense ``|F| x |F|`` Hamiltonian over the sector, core energy included.

    Built from the excitation form ``sum L_pq E_pq + sum Q_prqs E_pr E_qs``.
    Each product is applied to occupation bitstrings before projecting onto
    the sector: an individual ``E_pr`` may flip a spin and briefly leave an
    S_z sector even though the full product does not.
    """
    poly = to_excitation_form(table)
    L = poly.linear_array()
    Qd = poly.quadratic_array()
    dim = len(cs)
    H = np.zeros((dim, dim))
    singles = _SingleCache(cs.n_spin_orbitals)
    lookup = {b: k for k, b in enumerate(cs.bits)}

    def index_all(targets):
        return np.array([lookup.get(int(t), -1) for t in targets], dtype=np.intp)

    for k, bits in enumerate(cs.bits):
        P, Qi, S, T = singles(bits)
        coef = L[P, Qi] * S
        nz = coef != 0
        if nz.any():
            rows = index_all(T[nz])
            ok = rows >= 0
            np.add.at(H[:, k], rows[ok], coef[nz][ok])
        for q, s, sign1, mid in zip(P.tolist(), Qi.tolist(), S.tolist(), T.tolist()):
            # first factor applied is E_qs (q = creator, s = annihilator)
            P2, R2, S2, T2 = singles(mid)
            c2 = Qd[P2, R2, q, s] * S2 * sign1
            nz2 = c2 != 0
            if not nz2.any():
                continue
            rows = index_all(T2[nz2])
            ok = rows >= 0
            np.add.at(H[:, k], rows[ok], c2[nz2][ok])
    H[np.diag_indices(dim)] += poly.constant
    return H


def qee_hamiltonian(table: IntegralTable, cs: ConfigurationSet) -> QubitOperator:
    """Encoded Hamiltonian on ``ceil(log2 |F|)`` qubits.

    The core energy multiplies the projector onto the encoded subspace, so
    padding basis states carry energy exactly zero.
    """
    if table.n_spin_orbitals != cs.n_spin_orbitals:
        raise ValidationError(
            f"table has {table.n_spin_orbitals} spin-orbitals, sector has {cs.n_spin_orbitals}"
        )
    if table.n_electrons != cs.n_electrons:
        raise ValidationError(
            f"table has {table.n_electrons} electrons, sector holds {cs.n_electrons}"
        )
    if table.n_alpha != cs.n_alpha or table.n_beta != cs.n_beta:
        raise ValidationError(
            f"table spin sector ({table.n_alpha}, {table.n_beta}) differs from ({cs.n_alpha}, {cs.n_beta})"
        )
    block = qee_block(table, cs)
    block = 0.5 * (block + block.T)
    Q = cs.qubit_count
    return QubitOperator(
        Q,
        _embed(block, Q),
        encoded_dim=len(cs),
        meta={
            "encoding": "qee",
            "n_spin_orbitals": cs.n_spin_orbitals,
            "n_alpha": cs.n_alpha,
            "n_beta": cs.n_beta,
        },
    )


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < n:
        v = a.reshape(*lead, n // (2 * h), 2, h)
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] = x + y
        v[..., 1, :] = x - y
        h *= 2
    return a


def qee_pauli_decompose(op: QubitOperator, tol: float = DECOMPOSE_TOL, cap: int = MAX_MATRIX_QUBITS) -> PauliSum:
    """Pauli expansion ``c_P = Tr(P^dagger M) / 2^Q`` of a qubit operator.

    For each X-mask ``x`` the diagonal ``M[b ^ x, b]`` is Walsh-Hadamard
    transformed over ``b`` to give all Z-masks at once.
    """
    Q = op.n_qubits
    if Q > cap:
        raise ResourceError(f"{Q} qubits exceeds the decomposition cap of {cap}")
    dim = 1 << Q
    m = op.matrix().tocoo()
    basis = np.arange(dim)
    xs = np.unique(m.row ^ m.col)
    if xs.size == 0:
        return PauliSum(Q)
    dense = op.matrix().toarray()
    V = np.stack([dense[basis ^ x, basis] for x in xs])
    W = _fwht(V) / dim
    terms = {}
    zs = np.arange(dim)
    for row, x in enumerate(xs.tolist()):
        # c = (-i)^{|x&z|} / 2^Q * sum_b (-1)^{|b&z|} M[b^x, b]
        coeffs = W[row] * (-1j) ** (np.bitwise_count(x & zs) % 4)
        for z in np.nonzero(np.abs(coeffs) > tol)[0].tolist():
            terms[PauliString(Q, x, z)] = complex(coeffs[z])
    return PauliSum(Q, terms)


# coordinate text format ------------------------------------------------------------

def write_triplets(m: sp.spmatrix) -> str:
    coo = sp.coo_matrix(m)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"# shape {coo.shape[0]} {coo.shape[1]}"]
    for i in order:
        v = complex(coo.data[i])
        lines.append(f"{int(coo.row[i])} {int(coo.col[i])} {v.real!r} {v.imag!r}")
    return "\n".join(lines) + "\n"


def read_triplets(text: str, shape: tuple[int, int] | None = None) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[:1] == ["shape"] and shape is None:
                shape = (int(parts[1]), int(parts[2]))
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 'row col re im', got {line!r}", line=lineno)
        try:
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
            vals.append(complex(float(parts[2]), float(parts[3])))
        except ValueError:
            raise ParseError(f"malformed triplet {line!r}", line=lineno) from None
    if shape is None:
        n = max(rows + cols, default=-1) + 1
        shape = (n, n)
    return sp.csr_matrix((np.array(vals, dtype=np.complex128), (rows, cols)), shape=shape)
