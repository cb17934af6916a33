"""Pauli strings and weighted Pauli sums.

A Pauli string on ``n`` qubits is stored in symplectic form as two integer
bit masks ``x`` and ``z``; qubit ``q`` carries

    I if x_q = z_q = 0,  X if x_q = 1, z_q = 0,
    Z if x_q = 0, z_q = 1,  Y if x_q = z_q = 1.

Qubit 0 is the least significant tensor factor, so bit ``q`` of a basis
index is the state of qubit ``q``. Labels are written with qubit ``n-1``
first, e.g. ``"IXZI"`` has Z on qubit 1 and X on qubit 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ParseError, ResourceError

DEFAULT_TOL = 1e-12
MAX_MATRIX_QUBITS = 14

_PHASES = (1, 1j, -1, -1j)


@dataclass(frozen=True, order=True)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise DimensionError("n_qubits must be nonnegative")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise DimensionError("Pauli mask has bits beyond n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        n = len(label)
        x = z = 0
        for pos, ch in enumerate(label.upper()):
            q = n - 1 - pos
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
            elif ch != "I":
                raise ParseError(f"invalid Pauli letter {ch!r} in {label!r}")
        return cls(n, x, z)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str]) -> PauliString:
        """Build from ``{qubit: letter}``; unspecified qubits are identity."""
        letters = ["I"] * n_qubits
        for q, ch in ops.items():
            if not 0 <= q < n_qubits:
                raise DimensionError(f"qubit {q} outside [0, {n_qubits})")
            letters[n_qubits - 1 - q] = ch
        return cls.from_label("".join(letters))

    @property
    def label(self) -> str:
        out = []
        for q in range(self.n_qubits - 1, -1, -1):
            xb = (self.x >> q) & 1
            zb = (self.z >> q) & 1
            out.append("IZXY"[xb * 2 + zb])
        return "".join(out)

    def letter(self, qubit: int) -> str:
        return self.label[self.n_qubits - 1 - qubit]

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self):
        return self.label


def pauli_mul(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return ``(phase, P)`` with ``a @ b == phase * P`` as matrices."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"cannot multiply Pauli strings on {a.n_qubits} and {b.n_qubits} qubits"
        )
    ax, az, bx, bz = a.x, a.z, b.x, b.z
    a_x = ax & ~az
    a_y = ax & az
    a_z = az & ~ax
    b_x = bx & ~bz
    b_y = bx & bz
    b_z = bz & ~bx
    # cyclic pairs XY, YZ, ZX give +i; anticyclic give -i
    plus = (a_x & b_y).bit_count() + (a_y & b_z).bit_count() + (a_z & b_x).bit_count()
    minus = (a_y & b_x).bit_count() + (a_z & b_y).bit_count() + (a_x & b_z).bit_count()
    phase = _PHASES[(plus - minus) % 4]
    return phase, PauliString(a.n_qubits, ax ^ bx, az ^ bz)


class PauliSum:
    """Weighted sum of Pauli strings sharing one qubit count.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString, complex] | None = None):
        self.n_qubits = n_qubits
        acc: dict[PauliString, complex] = {}
        for p, c in (terms or {}).items():
            if p.n_qubits != n_qubits:
                raise DimensionError(
                    f"term on {p.n_qubits} qubits in a {n_qubits}-qubit sum"
                )
            acc[p] = acc.get(p, 0j) + complex(c)
        self._terms = acc

    @classmethod
    def from_terms(cls, n_qubits: int, pairs: Iterable[tuple[PauliString | str, complex]]) -> PauliSum:
        """Accumulate possibly repeated ``(string, coeff)`` pairs."""
        acc: dict[PauliString, complex] = {}
        for p, c in pairs:
            if isinstance(p, str):
                p = PauliString.from_label(p)
            if p.n_qubits != n_qubits:
                raise DimensionError(
                    f"term on {p.n_qubits} qubits in a {n_qubits}-qubit sum"
                )
            acc[p] = acc.get(p, 0j) + complex(c)
        out = cls.__new__(cls)
        out.n_qubits = n_qubits
        out._terms = acc
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {PauliString(n_qubits): coeff})

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> PauliSum:
        p = PauliString.from_label(label)
        return cls(p.n_qubits, {p: coeff})

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coeff(self, p: PauliString | str) -> complex:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p, 0j)

    # arithmetic ----------------------------------------------------------

    def _check(self, other: PauliSum):
        if other.n_qubits != self.n_qubits:
            raise DimensionError(
                f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return self + PauliSum.identity(self.n_qubits, other)
        self._check(other)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0j) + c
        return _raw(self.n_qubits, acc)

    __radd__ = __add__

    def __neg__(self):
        return _raw(self.n_qubits, {p: -c for p, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return self @ other
        other = complex(other)
        return _raw(self.n_qubits, {p: c * other for p, c in self._terms.items()})

    def __rmul__(self, other):
        other = complex(other)
        return _raw(self.n_qubits, {p: other * c for p, c in self._terms.items()})

    def __truediv__(self, other):
        return self * (1.0 / complex(other))

    def __matmul__(self, other: PauliSum) -> PauliSum:
        self._check(other)
        acc: dict[PauliString, complex] = {}
        for pa, ca in self._terms.items():
            for pb, cb in other._terms.items():
                ph, prod = pauli_mul(pa, pb)
                acc[prod] = acc.get(prod, 0j) + ph * ca * cb
        return _raw(self.n_qubits, acc)

    def adjoint(self) -> PauliSum:
        return _raw(self.n_qubits, {p: c.conjugate() for p, c in self._terms.items()})

    def simplify(self, tol: float = DEFAULT_TOL) -> PauliSum:
        return simplify(self, tol)

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return is_hermitian(self, tol)

    def to_matrix(self, cap: int = MAX_MATRIX_QUBITS) -> np.ndarray:
        return to_matrix(self, cap)

    def to_sparse(self, cap: int = MAX_MATRIX_QUBITS) -> sp.csr_matrix:
        return to_sparse(self, cap)

    def to_text(self) -> str:
        return to_text(self)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{p.label}: {c:.6g}" for p, c in sorted(self._terms.items())[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"PauliSum({self.n_qubits}, {{{body}{more}}})"


def _raw(n_qubits, terms):
    out = PauliSum.__new__(PauliSum)
    out.n_qubits = n_qubits
    out._terms = terms
    return out


def simplify(s: PauliSum, tol: float = DEFAULT_TOL) -> PauliSum:
    """Drop terms with ``|c| <= tol``. Like terms are merged on construction."""
    return _raw(s.n_qubits, {p: c for p, c in s.items() if abs(c) > tol})


def is_hermitian(s: PauliSum, tol: float = DEFAULT_TOL) -> bool:
    return all(abs(c.imag) <= tol for _, c in s.items())


def _check_cap(n_qubits, cap):
    if n_qubits > cap:
        raise ResourceError(f"{n_qubits} qubits exceeds the matrix cap of {cap}")


def _grouped_columns(s: PauliSum):
    """Yield ``(x, values)`` where ``values[b] = <b ^ x| S |b>``."""
    n = s.n_qubits
    dim = 1 << n
    basis = np.arange(dim, dtype=np.int64)
    by_x: dict[int, np.ndarray] = {}
    for p, c in s.items():
        # P|b> = i^{|x&z|} (-1)^{|b&z|} |b ^ x>
        parity = np.bitwise_count(basis & p.z) & 1
        vals = (c * _PHASES[(p.x & p.z).bit_count() % 4]) * (1 - 2 * parity.astype(np.float64))
        if p.x in by_x:
            by_x[p.x] += vals
        else:
            by_x[p.x] = vals.astype(np.complex128)
    return basis, by_x


def to_matrix(s: PauliSum, cap: int = MAX_MATRIX_QUBITS) -> np.ndarray:
    """Dense ``2^n x 2^n`` realization."""
    _check_cap(s.n_qubits, cap)
    dim = 1 << s.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    basis, by_x = _grouped_columns(s)
    for x, vals in by_x.items():
        out[basis ^ x, basis] += vals
    return out


def to_sparse(s: PauliSum, cap: int = MAX_MATRIX_QUBITS) -> sp.csr_matrix:
    _check_cap(s.n_qubits, cap)
    dim = 1 << s.n_qubits
    basis, by_x = _grouped_columns(s)
    if not by_x:
        return sp.csr_matrix((dim, dim), dtype=np.complex128)
    rows, cols, data = [], [], []
    for x, vals in by_x.items():
        keep = vals != 0
        rows.append((basis ^ x)[keep])
        cols.append(basis[keep])
        data.append(vals[keep])
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def to_text(s: PauliSum) -> str:
    """One ``<re> <im> <label>`` line per term, sorted by label."""
    lines = []
    for p, c in sorted(s.items(), key=lambda t: t[0].label):
        lines.append(f"{c.real!r} {c.imag!r} {p.label}")
    return "\n".join(lines) + ("\n" if lines else "")


def from_text(text: str, n_qubits: int | None = None) -> PauliSum:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected '<re> <im> <label>', got {line!r}", line=lineno)
        try:
            c = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        p = PauliString.from_label(parts[2])
        if n_qubits is None:
            n_qubits = p.n_qubits
        elif p.n_qubits != n_qubits:
            raise ParseError(f"label {parts[2]!r} has {p.n_qubits} qubits, expected {n_qubits}", line=lineno)
        pairs.append((p, c))
    if n_qubits is None:
        raise ParseError("empty Pauli sum without an explicit qubit count")
    return PauliSum.from_terms(n_qubits, pairs)


def single(n_qubits: int, qubit: int, letter: str, coeff: complex = 1.0) -> PauliSum:
    return PauliSum(n_qubits, {PauliString.from_ops(n_qubits, {qubit: letter}): coeff})
