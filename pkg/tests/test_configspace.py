import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qeevqe.configspace import (
    Configuration,
    ConfigurationSet,
    apply_excitation_bits,
    excitation_apply,
    qubits_for,
)
from qeevqe.errors import LookupFailure, ValidationError

from oracles import annihilator, sector_bits


def test_sector_size_and_qubits():
    cs = ConfigurationSet(12, 2, 2)
    assert len(cs) == math.comb(6, 2) ** 2 == 225
    assert cs.qubit_count == 8
    assert ConfigurationSet(4, 1, 1).qubit_count == 2
    assert ConfigurationSet(2, 1, 1).qubit_count == 0


def test_members_match_brute_force_and_are_sorted():
    for n, a, b in [(4, 1, 1), (6, 2, 1), (8, 2, 2), (8, 0, 3)]:
        cs = ConfigurationSet(n, a, b)
        assert cs.bits == sector_bits(n, a, b)
        assert cs.bits == sorted(cs.bits)


def test_encode_decode_roundtrip():
    cs = ConfigurationSet(8, 2, 1)
    for k in range(len(cs)):
        assert cs.encode_index(cs.decode_index(k)) == k


def test_lookup_failures():
    cs = ConfigurationSet(4, 1, 1)
    with pytest.raises(LookupFailure):
        cs.encode_index(0b0101)  # two alpha electrons
    with pytest.raises(LookupFailure):
        cs.decode_index(len(cs))
    with pytest.raises(ValidationError):
        ConfigurationSet(5, 1, 1)
    with pytest.raises(ValidationError):
        ConfigurationSet(4, 3, 0)


def test_string_form_puts_orbital_zero_last():
    c = Configuration.from_string("0011")
    assert c.bits == 3 and c.occupied(0) and not c.occupied(2)
    assert str(c) == "0011"
    assert c.n_electrons == 2


@pytest.mark.parametrize("n", [2, 4, 6])
def test_sign_rule_against_dense_operators(n):
    """Every matrix element <f'|a+_p a_q|f> over the full Fock space."""
    a = [annihilator(n, p) for p in range(n)]
    for p in range(n):
        for q in range(n):
            E = a[p].T @ a[q]
            for f in range(1 << n):
                res = apply_excitation_bits(f, p, q)
                column = E[:, f]
                if res is None:
                    assert not np.any(column)
                else:
                    sign, g = res
                    expected = np.zeros(1 << n)
                    expected[g] = sign
                    np.testing.assert_array_equal(column, expected)


@given(st.integers(0, (1 << 8) - 1), st.integers(0, 7), st.integers(0, 7))
def test_excitation_preserves_particle_number(bits, p, q):
    res = excitation_apply(Configuration(bits, 8), p, q)
    if res is not None:
        assert res[1].n_electrons == bin(bits).count("1")


def test_excitation_range_check():
    with pytest.raises(ValidationError):
        excitation_apply(Configuration(1, 4), 4, 0)


def test_qubits_for():
    assert [qubits_for(k) for k in (1, 2, 3, 4, 5, 225, 256, 257)] == [0, 1, 2, 2, 3, 8, 8, 9]
    with pytest.raises(ValidationError):
        qubits_for(0)
