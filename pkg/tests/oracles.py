"""Independent reference implementations used by the tests.

Nothing here imports the package.  Every operator is built term by term from
explicit 2x2 matrices and Kronecker products, and every exponential goes
through ``scipy.linalg.expm``.
"""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    return reduce(np.kron, mats, np.array([[1.0 + 0j]]))


def embed(op, q, n):
    return kron_all([op if k == q else I2 for k in range(n)])


def pauli_matrix(ops: str, coeff: complex = 1.0):
    return coeff * kron_all([SINGLE[c] for c in ops])


def cnot(c, t, n):
    a = kron_all([P0 if k == c else I2 for k in range(n)])
    b = kron_all([P1 if k == c else (X if k == t else I2) for k in range(n)])
    return a + b


def hadamard(q, n):
    return embed(H, q, n)


def hamiltonian(delta, bias, edges):
    n = len(delta)
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for q in range(n):
        h += delta[q] * embed(X, q, n) + bias[q] * embed(Z, q, n)
    for (a, b), xi in edges.items():
        h += xi * embed(Z, a, n) @ embed(Z, b, n)
    return h


def evolve(delta, base_bias, edges, steps):
    """``steps`` is a list of ({site: bias}, duration)."""
    n = len(delta)
    u = np.eye(2 ** n, dtype=complex)
    for override, t in steps:
        bias = list(base_bias)
        for s, v in override.items():
            bias[s] = v
        u = expm(-2j * np.pi * t * hamiltonian(delta, bias, edges)) @ u
    return u


def lie_evolve(delta, base_bias, edges, steps, dt):
    """First-order split: tunneling part, then Z/ZZ part, per slice."""
    n = len(delta)
    u = np.eye(2 ** n, dtype=complex)
    hx = sum(delta[q] * embed(X, q, n) for q in range(n))
    for override, t in steps:
        bias = list(base_bias)
        for s, v in override.items():
            bias[s] = v
        hz = hamiltonian([0.0] * n, bias, edges)
        step = expm(-2j * np.pi * dt * hz) @ expm(-2j * np.pi * dt * hx)
        u = np.linalg.matrix_power(step, int(round(t / dt))) @ u
    return u


def parity_gate(n, controls, target, phase=-1j):
    """Product of CNOTs from each control onto target, times ``phase`` on odd parity."""
    u = np.eye(2 ** n, dtype=complex)
    for c in controls:
        u = cnot(c, target, n) @ u
    parity_phase = np.ones(2 ** n, dtype=complex)
    for idx in range(2 ** n):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        if sum(bits[c] for c in controls) % 2:
            parity_phase[idx] = phase
    return u @ np.diag(parity_phase)


def testbed_edges(xi_a, xi_b, xi_c, xi_d):
    """3x3 grid, row-major; horizontal edges from even columns carry xi_C, from
    odd columns xi_D; vertical edges from even rows xi_A, odd rows xi_B."""
    edges = {}
    for r, c in itertools.product(range(3), range(3)):
        s = 3 * r + c
        if c < 2:
            edges[(s, s + 1)] = xi_c if c % 2 == 0 else xi_d
        if r < 2:
            edges[(s, s + 3)] = xi_a if r % 2 == 0 else xi_b
    return edges


def trace_fidelities(u_ideal, u):
    d = u.shape[0]
    tr = np.trace(u_ideal.conj().T @ u)
    return abs(tr) / d, (np.trace(u.conj().T @ u).real + abs(tr) ** 2) / (d * (d + 1))
