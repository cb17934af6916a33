"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion.

Each line is also collected by ``conftest.py`` and repeated in the terminal
summary, so ``pytest tests/test_acceptance.py`` ends with the whole table.
Runtime budgets are part of each criterion.
"""

import itertools
import time

import numpy as np
import pytest

from qeevqe.circuit import (
    build_chain_ansatz,
    build_staggered_ansatz,
    expectation,
    finite_difference_gradient,
    parameter_shift_gradient,
    simulate_statevector,
)
from qeevqe.cli import compare_results, format_report
from qeevqe.configspace import Configuration, ConfigurationSet, excitation_apply
from qeevqe.encode import jw_encode, qee_hamiltonian, qubit_counts
from qeevqe.fermion import IntegralTable, random_table, rank_candidate_sets
from qeevqe.noise import (
    DEFAULT_DURATIONS_NS,
    ENOL_T1_MS,
    ENOL_T2_MS,
    KETO_T1_MS,
    KETO_T2_MS,
    NoiseModel,
    apply_channel_1q,
    kraus_completeness_error,
    noisy_expectation,
    simulate_density,
    thermal_kraus,
)
from qeevqe.oracle import jw_sector_matrix
from qeevqe.synthetic import decouple_reference, synthetic_problem
from qeevqe.units import CHEMICAL_ACCURACY_HARTREE, HARTREE_TO_KCAL
from qeevqe.vqe import InitStrategy, best_of_restarts, hf_reference_state, run_vqe

from conftest import ACCEPTANCE_LINES, VQE_LEDGER, record_vqe
from oracles import annihilator, fock_hamiltonian_fast, random_hermitian, random_spin_integrals, sector_bits


def _report(n, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"[criterion {n:>2}] {'PASS' if ok else 'FAIL'}  {detail}  ({elapsed:.2f} s, budget {budget} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_qubit_counts():
    t0 = time.perf_counter()
    jw, qee = qubit_counts(12, 2, 2)
    cs = ConfigurationSet(12, 2, 2)
    elapsed = time.perf_counter() - t0
    # the encoders themselves must agree with the reported counts
    table = random_table(6, 4, 0)
    built = (jw_encode(table).n_qubits, qee_hamiltonian(table, cs).n_qubits)
    ok = (jw, qee) == (12, 8) and cs.qubit_count == 8 and len(cs) == 225 and built == (12, 8)
    _report(1, ok, f"(4e,6o): JW {jw}, QEE {qee} qubits, sector size {len(cs)}", elapsed, 1)


def test_criterion_02_encoding_equivalence():
    t0 = time.perf_counter()
    worst_jw = worst_fock = 0.0
    n_checks = 0
    for i in range(200):
        n = (4, 6, 8)[i % 3]
        rng = np.random.default_rng(1000 + i)
        h1, h2 = random_spin_integrals(n // 2, rng)
        core = float(rng.normal())
        fock = fock_hamiltonian_fast(h1, h2, core)
        # the JW operator does not depend on the electron count
        jw_op = jw_encode(IntegralTable(h1, h2, core, 0, 0)).pauli()
        for k in range(n // 2 + 1):
            table = IntegralTable(h1, h2, core, 2 * k, 0)
            cs = ConfigurationSet(n, k, k)
            qee = np.linalg.eigvalsh(qee_hamiltonian(table, cs).encoded_block())
            jw = np.linalg.eigvalsh(jw_sector_matrix(jw_op, cs))
            bits = sector_bits(n, k, k)
            ref = np.linalg.eigvalsh(fock[np.ix_(bits, bits)])
            worst_jw = max(worst_jw, float(np.max(np.abs(qee - jw))))
            worst_fock = max(worst_fock, float(np.max(np.abs(qee - ref))))
            n_checks += 1
    elapsed = time.perf_counter() - t0
    ok = worst_jw <= 1e-10 and worst_fock <= 1e-10
    _report(
        2,
        ok,
        f"200 tables, {n_checks} S_z=0 sectors: max |QEE-JW| {worst_jw:.1e}, max |QEE-Fock oracle| {worst_fock:.1e} Ha",
        elapsed,
        60,
    )


def test_criterion_03_sign_rule():
    t0 = time.perf_counter()
    mismatches = checked = 0
    for n in range(1, 7):
        a = [annihilator(n, p) for p in range(n)]
        for p, q in itertools.product(range(n), repeat=2):
            E = a[p].T @ a[q]
            for f in range(1 << n):
                res = excitation_apply(Configuration(f, n), p, q)
                expected = np.zeros(1 << n)
                if res is not None:
                    expected[res[1].bits] = res[0]
                mismatches += int(not np.array_equal(E[:, f], expected))
                checked += 1
    elapsed = time.perf_counter() - t0
    _report(3, mismatches == 0, f"{checked} (config, p, q) cases for N<=6 against dense JW, {mismatches} mismatches", elapsed, 30)


def test_criterion_04_ansatz_bookkeeping():
    t0 = time.perf_counter()
    s20 = build_staggered_ansatz(8, 20)
    c10 = build_chain_ansatz(8, 10)
    c4 = build_chain_ansatz(8, 4)
    elapsed = time.perf_counter() - t0
    got = [(s20.n_cnots, s20.n_params), (c10.n_cnots, c10.n_params), (c4.n_cnots, c4.n_params)]
    ok = got == [(80, 168), (70, 80), (28, 32)]
    _report(4, ok, f"staggered L=20 {got[0]}, chain L=10 {got[1]}, chain L=4 {got[2]} (CNOTs, params)", elapsed, 1)


@pytest.mark.slow
def test_criterion_05_noiseless_convergence():
    t0 = time.perf_counter()
    errors = []
    for seed in range(5):
        prob = synthetic_problem(seed)
        res = best_of_restarts(
            prob.hamiltonian,
            "staggered",
            20,
            InitStrategy("gaussian", 0, variance=0.3),
            5,
            prep=hf_reference_state(prob.config_set),
            reference_energy=prob.exact_energy,
        )
        for e in res.restart_energies:
            record_vqe(f"c5-{seed}", e, prob.exact_energy)
        errors.append(res.energy - prob.exact_energy)
    elapsed = time.perf_counter() - t0
    hits = sum(e <= CHEMICAL_ACCURACY_HARTREE for e in errors)
    detail = f"{hits}/5 synthetic (12,2,2) instances within 1.6e-3 Ha; errors " + ", ".join(f"{e:.1e}" for e in errors)
    _report(5, hits >= 4, detail, elapsed, 20 * 60)


def test_criterion_06_hf_stagnation():
    t0 = time.perf_counter()
    prob = synthetic_problem(0)
    prep = hf_reference_state(prob.config_set)
    details, ok = [], True
    for L in (4, 10):
        circ = build_staggered_ansatz(8, L)
        # decouple the basis state the circuit produces from HF at zero angles
        image = int(np.argmax(np.abs(simulate_statevector(circ.with_prep(prep), np.zeros(circ.n_params)))))
        H = decouple_reference(prob.hamiltonian, image, offset=0.05)
        e0 = float(np.linalg.eigvalsh(H.encoded_block().real)[0])
        hf = run_vqe(H, circ, prep, InitStrategy("hf"), reference_energy=e0)
        gauss = best_of_restarts(H, "staggered", L, InitStrategy("gaussian", 0), 5, prep=prep, reference_energy=e0)
        record_vqe(f"c6-hf-{L}", hf.energy, e0)
        for e in gauss.restart_energies:
            record_vqe(f"c6-gauss-{L}", e, e0)
        drift = abs(hf.energy - hf.initial_energy)
        escape = hf.energy - gauss.energy
        ok &= drift < 1e-6 and escape > 1e-3
        details.append(f"L={L}: HF |dE| {drift:.1e}, Gaussian lower by {escape:.4f} Ha")
    elapsed = time.perf_counter() - t0
    _report(6, ok, "; ".join(details), elapsed, 300)


def test_criterion_07_noise_channels():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst, purity_up, n_channels = 0.0, 0, 0
    for t1, t2 in list(zip(KETO_T1_MS, KETO_T2_MS)) + list(zip(ENOL_T1_MS, ENOL_T2_MS)):
        for dur in DEFAULT_DURATIONS_NS.values():
            ops = thermal_kraus(t1, t2, dur)
            worst = max(worst, kraus_completeness_error(ops))
            n_channels += 1
            for _ in range(20):
                v = rng.normal(size=2) + 1j * rng.normal(size=2)
                v /= np.linalg.norm(v)
                rho = np.outer(v, v.conj())
                out = apply_channel_1q(ops, rho)
                purity_up += int(np.trace(out @ out).real > 1 + 1e-15)
    identity_ok = all(
        np.allclose(thermal_kraus(t1, t2, 0.0)[0], np.eye(2), atol=0) and len(thermal_kraus(t1, t2, 0.0)) == 1
        for t1, t2 in zip(KETO_T1_MS + ENOL_T1_MS, KETO_T2_MS + ENOL_T2_MS)
    )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and purity_up == 0 and identity_ok
    detail = (
        f"{n_channels} channels: max |sum K^dag K - I| {worst:.1e}, purity increases on pure inputs {purity_up}, "
        f"zero duration identity {identity_ok}"
    )
    _report(7, ok, detail, elapsed, 10)


def test_criterion_08_noisy_pipeline():
    t0 = time.perf_counter()
    prob = synthetic_problem(0)
    prep = hf_reference_state(prob.config_set)
    res = best_of_restarts(prob.hamiltonian, "chain", 4, InitStrategy("gaussian", 0), 5, prep=prep,
                           reference_energy=prob.exact_energy)
    for e in res.restart_energies:
        record_vqe("c8", e, prob.exact_energy)
    circ = build_chain_ansatz(8, 4).with_prep(prep)
    rows = {}
    for name, model in (("keto", NoiseModel.keto()), ("enol", NoiseModel.enol())):
        rho = simulate_density(circ, res.params, model)
        rows[name] = noisy_expectation(rho, prob.hamiltonian)
    elapsed = time.perf_counter() - t0
    clean_kcal = (res.energy - prob.exact_energy) * HARTREE_TO_KCAL
    ok = True
    parts = [f"noiseless error {clean_kcal:.4f} kcal/mol"]
    for name, (raw, renorm) in rows.items():
        raw_kcal = (raw - prob.exact_energy) * HARTREE_TO_KCAL
        renorm_kcal = (renorm - prob.exact_energy) * HARTREE_TO_KCAL
        ok &= clean_kcal < raw_kcal < 10.0 and np.isfinite(renorm_kcal)
        parts.append(f"{name} noise raw {raw_kcal:.4f} / renormalized {renorm_kcal:.4f} kcal/mol")
    _report(8, ok, "; ".join(parts), elapsed, 600)


def test_criterion_09_variational_bound():
    t0 = time.perf_counter()
    violations = [t for t in VQE_LEDGER if t[1] < t[2] - 1e-9]
    elapsed = time.perf_counter() - t0
    # run_vqe also raises on any violation, so the rest of the suite is covered too
    detail = f"{len(VQE_LEDGER)} VQE energies recorded so far, {len(violations)} below the exact ground energy - 1e-9 Ha"
    _report(9, len(VQE_LEDGER) > 0 and not violations, detail, elapsed, 1)


def test_criterion_10_gradient_check():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(500 + i)
        n = int(rng.integers(1, 7))
        if i % 2 and n % 2 == 0:
            circ = build_staggered_ansatz(n, int(rng.integers(1, 4)))
        else:
            circ = build_chain_ansatz(n, int(rng.integers(1, 4)))
        circ = circ.with_prep(int(rng.integers(1 << n)))
        H = random_hermitian(1 << n, rng)

        def energy(x):
            return expectation(simulate_statevector(circ, x), H)

        x = rng.uniform(-np.pi, np.pi, circ.n_params)
        diff = parameter_shift_gradient(energy, x) - finite_difference_gradient(energy, x)
        worst = max(worst, float(np.max(np.abs(diff))))
    elapsed = time.perf_counter() - t0
    _report(10, worst <= 1e-6, f"20 random instances (Q<=6): max |shift - FD| {worst:.1e}", elapsed, 60)


ACETONE_CANDIDATES = {
    "10-19": 18.716, "11-20": 22.478, "11-19": 21.260, "12-20": 21.374,
    "12-19": 19.888, "13-19": 20.325, "13-18": 20.565, "14-19": 23.766,
}
EDARAVONE_CANDIDATES = {
    "41-50": (-12.793, 4.904), "41-49": (-12.959, 6.556), "42-50": (-12.650, 23.293),
    "42-49": (-12.874, 22.420), "43-49": (8.583, 23.892), "43-48": (5.667, 18.618),
    "44-49": (9.197, 25.398),
}


def test_criterion_11_active_set_ranking():
    t0 = time.perf_counter()
    ac = rank_candidate_sets(
        [(k, {"keto": 0.0, "enol": v}) for k, v in ACETONE_CANDIDATES.items()],
        {"keto": 0.0, "enol": 24.070},
    )
    ed = rank_candidate_sets(
        [(k, {"keto": 0.0, "enol": e, "amine": a}) for k, (e, a) in EDARAVONE_CANDIDATES.items()],
        {"keto": 0.0, "enol": 13.726, "amine": 25.947},
    )
    elapsed = time.perf_counter() - t0
    ok = ac[0][0] == "14-19" and abs(ac[0][1] - 0.304) < 1e-9 and ed[0][0] == "44-49"
    detail = f"acetone first {ac[0][0]} ({ac[0][1]:.3f} kcal/mol), Edaravone first {ed[0][0]} ({ed[0][1]:.3f} kcal/mol)"
    _report(11, ok, detail, elapsed, 1)


def test_criterion_12_nonreproducible_gaps_are_format_checks_only():
    # The absolute energies below are placeholders chosen to produce the
    # published gaps; the real active-space integrals are not available, so
    # these gaps are never computed, only rendered.
    t0 = time.perf_counter()
    k = 1 / HARTREE_TO_KCAL
    acetone = {"keto": -190.0, "enol": -190.0 + 24.070 * k}
    edaravone = {"keto": -600.0, "enol": -600.0 + 13.726 * k, "amine": -600.0 + 25.947 * k}
    texts = []
    for energies in (acetone, edaravone):
        results = {t: {"exact_energy_hartree": e, "vqe_energy_hartree": e} for t, e in energies.items()}
        texts.append(format_report(compare_results(results, "keto")))
    elapsed = time.perf_counter() - t0
    ok = "24.070" in texts[0] and "13.726" in texts[1] and "25.947" in texts[1]
    detail = (
        "24.070 / 13.726 / 25.947 kcal/mol gaps need unpublished integrals: not reproduced, "
        "report format verified on user-supplied energies only"
    )
    _report(12, ok, detail, elapsed, 1)
