"""Brute-force reference implementations used only by the tests.

Nothing here imports the package's Pauli or encoding code: operators are
built from explicit Kronecker products so the checks are independent.
"""

import itertools
from functools import reduce

import numpy as np

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
PAULI = {"I": I2.astype(complex), "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    """Kronecker product with the first matrix acting on the highest qubit."""
    return reduce(np.kron, mats, np.eye(1))


def pauli_label_matrix(label):
    """Dense matrix of a label whose leftmost letter is the highest qubit."""
    return kron_all([PAULI[c] for c in label])


def annihilator(n, p):
    """Dense ``a_p`` on ``n`` modes, bit ``p`` of the basis index = mode ``p``.

    Sign convention: ``a_p |..1_p..> = (-1)^{sum_{q<p} n_q} |..0_p..>``.
    """
    dim = 1 << n
    a = np.zeros((dim, dim))
    for b in range(dim):
        if (b >> p) & 1:
            sign = -1 if bin(b & ((1 << p) - 1)).count("1") % 2 else 1
            a[b ^ (1 << p), b] = sign
    return a


def fock_hamiltonian(h1, h2, core=0.0):
    """``core + sum h1 a+a + 1/2 sum h2[p,q,r,s] a+p a+q ar as`` on the full Fock space."""
    n = h1.shape[0]
    a = [annihilator(n, p) for p in range(n)]
    ad = [m.T for m in a]
    H = core * np.eye(1 << n)
    for p, q in zip(*np.nonzero(h1)):
        H += h1[p, q] * ad[p] @ a[q]
    for p, q, r, s in zip(*np.nonzero(h2)):
        H += 0.5 * h2[p, q, r, s] * ad[p] @ ad[q] @ a[r] @ a[s]
    return H


def _ladder_on_bits(bits, sign, p, dagger, parity):
    """Vectorized a_p / a+_p on basis indices; ``sign`` 0 marks annihilated columns."""
    alive = ((bits >> p) & 1) == (0 if dagger else 1)
    below = parity[bits & ((1 << p) - 1)]
    return bits ^ (1 << p), np.where(alive, sign * (1 - 2 * below), 0)


def fock_hamiltonian_fast(h1, h2, core=0.0):
    """Same operator as :func:`fock_hamiltonian`, built by acting on all columns at once."""
    n = h1.shape[0]
    dim = 1 << n
    cols = np.arange(dim)
    parity = np.array([bin(b).count("1") & 1 for b in range(dim)])
    H = core * np.eye(dim)

    def act(ops):
        bits, sign = cols.copy(), np.ones(dim, dtype=int)
        for p, dagger in reversed(ops):
            bits, sign = _ladder_on_bits(bits, sign, p, dagger, parity)
        return bits, sign

    for p, q in zip(*np.nonzero(h1)):
        rows, sign = act([(p, True), (q, False)])
        np.add.at(H, (rows, cols), h1[p, q] * sign)
    for p, q, r, s in zip(*np.nonzero(h2)):
        rows, sign = act([(p, True), (q, True), (r, False), (s, False)])
        np.add.at(H, (rows, cols), 0.5 * h2[p, q, r, s] * sign)
    return H


def sector_bits(n, n_alpha, n_beta):
    out = []
    for b in range(1 << n):
        na = sum((b >> i) & 1 for i in range(0, n, 2))
        nb = sum((b >> i) & 1 for i in range(1, n, 2))
        if na == n_alpha and nb == n_beta:
            out.append(b)
    return out


def sector_block(H, bits):
    return H[np.ix_(bits, bits)]


def ry_dense(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def single_qubit_op(n, q, m):
    mats = [I2] * n
    mats[n - 1 - q] = m
    return kron_all(mats)


def cnot_dense(n, c, t):
    dim = 1 << n
    U = np.zeros((dim, dim))
    for b in range(dim):
        U[b ^ (1 << t) if (b >> c) & 1 else b, b] = 1
    return U


def circuit_dense(circuit, params):
    """Matrix-chain unitary of a circuit from the package's gate list."""
    n = circuit.n_qubits
    U = np.eye(1 << n)
    for g in circuit.gates:
        if g.kind == "RY":
            G = single_qubit_op(n, g.qubits[0], ry_dense(params[g.param]))
        elif g.kind == "CNOT":
            G = cnot_dense(n, *g.qubits)
        else:
            G = single_qubit_op(n, g.qubits[0], X.real)
        U = G @ U
    return U


def random_hermitian(dim, rng, real=False):
    A = rng.normal(size=(dim, dim))
    if not real:
        A = A + 1j * rng.normal(size=(dim, dim))
    return (A + A.conj().T) / 2


def random_spin_integrals(n_orb, rng, scale=1.0):
    """Random real spin-orbital integrals with the physical symmetries."""
    h = rng.normal(size=(n_orb, n_orb))
    h = (h + h.T) / 2
    g = rng.normal(size=(n_orb,) * 4)
    # chemist (ij|kl) with 8-fold symmetry
    for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
        g = (g + g.transpose(perm)) / 2
    n = 2 * n_orb
    h1 = np.zeros((n, n))
    h1[0::2, 0::2] = h
    h1[1::2, 1::2] = h
    h2 = np.zeros((n,) * 4)
    for s, t in itertools.product((0, 1), repeat=2):
        h2[s::2, t::2, t::2, s::2] = g.transpose(0, 2, 3, 1)
    return scale * h1, scale * h2
