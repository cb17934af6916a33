"""Qubit-efficient encoding and hardware-efficient VQE for tautomer energetics."""

from .circuit import Circuit, Gate, build_chain_ansatz, build_staggered_ansatz, expectation, simulate_statevector
from .configspace import Configuration, ConfigurationSet, excitation_apply
from .encode import QubitOperator, jw_encode, qee_hamiltonian, qubit_counts
from .errors import NumericalError, ValidationError
from .fermion import (
    ActiveSpaceSpec,
    IntegralTable,
    freeze_reduce,
    parse_fcidump,
    rank_candidate_sets,
    read_fcidump,
    select_active_by_occupancy,
    to_excitation_form,
)
from .noise import NoiseModel, noisy_expectation, simulate_density, thermal_kraus
from .oracle import exact_ground, jw_sector_matrix, relative_energies
from .pauli import PauliString, PauliSum
from .units import CHEMICAL_ACCURACY_HARTREE, HARTREE_TO_KCAL
from .vqe import InitStrategy, hf_reference_state, initialize_params, layer_sweep, minimize, run_vqe

__version__ = "0.1.0"
