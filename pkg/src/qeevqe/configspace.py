"""Occupation-number configurations of a fixed (n_alpha, n_beta) sector.

A configuration is an integer whose bit ``i`` is the occupation of
spin-orbital ``i`` (even bits alpha, odd bits beta). Sector members are kept
in ascending integer order, and position in that order is the qubit basis
index assigned by the encoding map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import LookupFailure, ValidationError


@dataclass(frozen=True, order=True)
class Configuration:
    bits: int
    n_spin_orbitals: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n_spin_orbitals:
            raise ValidationError(f"bitstring {self.bits:b} longer than {self.n_spin_orbitals}")

    @classmethod
    def from_string(cls, s: str) -> Configuration:
        """Parse a bitstring written with orbital 0 rightmost."""
        return cls(int(s, 2), len(s))

    def occupied(self, i: int) -> bool:
        return bool((self.bits >> i) & 1)

    @property
    def n_electrons(self) -> int:
        return self.bits.bit_count()

    def __str__(self):
        return format(self.bits, f"0{self.n_spin_orbitals}b") if self.n_spin_orbitals else ""


def apply_excitation_bits(bits: int, p: int, q: int) -> tuple[int, int] | None:
    """``E_pq = a+_p a_q`` on a bitstring: ``(sign, new_bits)`` or ``None``.

    The sign is the parity of occupied orbitals strictly between ``p`` and ``q``.
    """
    if not (bits >> q) & 1:
        return None
    if p == q:
        return 1, bits
    if (bits >> p) & 1:
        return None
    lo, hi = (p, q) if p < q else (q, p)
    between = (bits >> (lo + 1)) & ((1 << (hi - lo - 1)) - 1)
    sign = -1 if between.bit_count() & 1 else 1
    return sign, (bits ^ (1 << q)) | (1 << p)


def excitation_apply(c: Configuration, p: int, q: int) -> tuple[int, Configuration] | None:
    n = c.n_spin_orbitals
    if not (0 <= p < n and 0 <= q < n):
        raise ValidationError(f"orbital index out of range [0, {n}): p={p}, q={q}")
    res = apply_excitation_bits(c.bits, p, q)
    if res is None:
        return None
    return res[0], Configuration(res[1], n)


def _spin_combinations(n_spatial, k, spin):
    for orbs in itertools.combinations(range(n_spatial), k):
        yield sum(1 << (2 * i + spin) for i in orbs)


def sector_members(n_spin_orbitals: int, n_alpha: int, n_beta: int) -> list[int]:
    half = n_spin_orbitals // 2
    alphas = list(_spin_combinations(half, n_alpha, 0))
    betas = list(_spin_combinations(half, n_beta, 1))
    return sorted(a | b for a in alphas for b in betas)


class ConfigurationSet:
    """All configurations with ``n_alpha`` even-bit and ``n_beta`` odd-bit electrons."""

    def __init__(self, n_spin_orbitals: int, n_alpha: int, n_beta: int):
        if n_spin_orbitals <= 0 or n_spin_orbitals % 2:
            raise ValidationError(f"need a positive even spin-orbital count, got {n_spin_orbitals}")
        half = n_spin_orbitals // 2
        if not (0 <= n_alpha <= half and 0 <= n_beta <= half):
            raise ValidationError(
                f"sector ({n_alpha} alpha, {n_beta} beta) does not fit in {half} spatial orbitals"
            )
        self.n_spin_orbitals = n_spin_orbitals
        self.n_alpha = n_alpha
        self.n_beta = n_beta
        self._members = sector_members(n_spin_orbitals, n_alpha, n_beta)
        self._index = {b: k for k, b in enumerate(self._members)}

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    @property
    def members(self) -> list[Configuration]:
        return [Configuration(b, self.n_spin_orbitals) for b in self._members]

    @property
    def bits(self) -> list[int]:
        return list(self._members)

    @cached_property
    def bits_array(self) -> np.ndarray:
        return np.array(self._members, dtype=np.int64)

    def __len__(self):
        return len(self._members)

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self.members)

    def __contains__(self, c) -> bool:
        bits = c.bits if isinstance(c, Configuration) else c
        return bits in self._index

    @property
    def qubit_count(self) -> int:
        return qubits_for(len(self._members))

    def encode_index(self, c: Configuration | int) -> int:
        bits = c.bits if isinstance(c, Configuration) else c
        try:
            return self._index[bits]
        except KeyError:
            raise LookupFailure(f"configuration {bits:0{self.n_spin_orbitals}b} is not in the sector") from None

    def index_of_bits(self, bits: int) -> int | None:
        return self._index.get(bits)

    def decode_index(self, k: int) -> Configuration:
        if not 0 <= k < len(self._members):
            raise LookupFailure(f"basis index {k} outside [0, {len(self._members)})")
        return Configuration(self._members[k], self.n_spin_orbitals)

    def __repr__(self):
        return (
            f"ConfigurationSet(N={self.n_spin_orbitals}, n_alpha={self.n_alpha}, "
            f"n_beta={self.n_beta}, size={len(self)}, qubits={self.qubit_count})"
        )


def qubits_for(n_states: int) -> int:
    if n_states < 1:
        raise ValidationError("empty configuration set")
    return math.ceil(math.log2(n_states)) if n_states > 1 else 0


def enumerate_sector(n_spin_orbitals: int, n_alpha: int, n_beta: int) -> ConfigurationSet:
    return ConfigurationSet(n_spin_orbitals, n_alpha, n_beta)
