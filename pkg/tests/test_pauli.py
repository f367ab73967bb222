import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as o
from isingparity.fidelity import ideal_parity_unitary
from isingparity.pauli import (PauliString, commutes, conjugate_by_cnot, conjugate_by_hadamard,
                               conjugate_by_parity_gate, multiply, symplectic_rank)
from isingparity.synthesis import SubspaceGateSpec

P = PauliString.from_label
N_CASES = 1000


def paulis(n=None, min_n=1, max_n=6):
    size = st.just(n) if n is not None else st.integers(min_n, max_n)
    return size.flatmap(lambda k: st.builds(PauliString, st.text("IXYZ", min_size=k, max_size=k),
                                            st.integers(0, 3)))


def pairs(min_n=1, max_n=6):
    return st.integers(min_n, max_n).flatmap(lambda k: st.tuples(paulis(k), paulis(k)))


class TestExamples:
    def test_disjoint_product(self):
        assert multiply(P("X I"), P("I X")) == P("+X X")

    def test_xz_is_minus_i_y(self):
        assert multiply(P("X"), P("Z")) == P("-i Y")

    def test_involution_example(self):
        assert multiply(P("X Z"), P("X Z")) == P("+I I")

    def test_weight4_pairs_commute(self):
        assert commutes(P("XXXX"), P("ZZZZ"))
        assert commutes(P("XXXI"), P("IZZZ"))

    def test_single_overlap_anticommutes(self):
        assert not commutes(P("XI"), P("ZI"))

    def test_cnot_examples(self):
        assert conjugate_by_cnot(P("XI"), 0, 1) == P("XX")
        assert conjugate_by_cnot(P("IZ"), 0, 1) == P("ZZ")
        assert conjugate_by_cnot(P("II"), 0, 1) == P("II")

    def test_hadamard_examples(self):
        assert conjugate_by_hadamard(P("X"), 0) == P("Z")
        assert conjugate_by_hadamard(P("Z"), 0) == P("X")
        assert conjugate_by_hadamard(P("Y"), 0) == P("-Y")

    def test_parity_gate_examples(self):
        # register: target 0, controls 1..4
        got = conjugate_by_parity_gate(P("IXIII"), [1, 2], 0)
        want = conjugate_by_cnot(conjugate_by_cnot(P("IXIII"), 1, 0), 2, 0)
        assert got == want == P("XXIII")
        assert conjugate_by_parity_gate(P("ZIIII"), [1, 2, 3, 4], 0) == P("ZZZZZ")

    def test_text_round_trip(self):
        p = P("-i X I Z Y")
        assert str(p) == "-iX I Z Y"
        assert P(str(p)) == p
        assert str(P("XIZY")) == "+X I Z Y"


class TestErrors:
    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            multiply(P("X"), P("XX"))
        with pytest.raises(ValueError):
            commutes(P("X"), P("XX"))

    def test_bad_letters(self):
        with pytest.raises(ValueError):
            PauliString("XQ")

    def test_cnot_indices(self):
        with pytest.raises(ValueError):
            conjugate_by_cnot(P("XX"), 1, 1)
        with pytest.raises(IndexError):
            conjugate_by_cnot(P("XX"), 0, 2)
        with pytest.raises(IndexError):
            conjugate_by_hadamard(P("X"), 3)

    def test_parity_gate_overlap(self):
        with pytest.raises(ValueError):
            conjugate_by_parity_gate(P("XXX"), [0, 1], 1)
        with pytest.raises(ValueError):
            conjugate_by_parity_gate(P("XXX"), [], 0)
        with pytest.raises(ValueError):
            conjugate_by_parity_gate(P("XXX"), [1, 1], 0)


@settings(max_examples=N_CASES, deadline=None)
@given(paulis())
def test_square_is_signed_identity(p):
    sq = multiply(p, p)
    assert sq.is_identity()
    assert sq.phase in (0, 2)


@settings(max_examples=N_CASES, deadline=None)
@given(pairs())
def test_commutation_symmetric(ab):
    a, b = ab
    assert commutes(a, b) == commutes(b, a)


@settings(max_examples=N_CASES, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(paulis(n), st.integers(0, n - 1), st.integers(0, n - 1))))
def test_cnot_conjugation_is_involution(case):
    p, c, t = case
    if c == t:
        return
    assert conjugate_by_cnot(conjugate_by_cnot(p, c, t), c, t) == p


@settings(max_examples=N_CASES, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n), paulis(n))))
def test_multiplication_associative_and_matches_matrices(abc):
    a, b, c = abc
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    ma = o.pauli_matrix(a.ops, 1j ** a.phase)
    mb = o.pauli_matrix(b.ops, 1j ** b.phase)
    ab = multiply(a, b)
    np.testing.assert_allclose(o.pauli_matrix(ab.ops, 1j ** ab.phase), ma @ mb, atol=1e-12)
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@settings(max_examples=N_CASES, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(paulis(n), st.integers(0, n - 1), st.integers(0, n - 1))))
def test_cnot_matches_matrix_conjugation(case):
    p, c, t = case
    if c == t:
        return
    u = o.cnot(c, t, p.num_qubits)
    got = conjugate_by_cnot(p, c, t)
    want = u @ o.pauli_matrix(p.ops, 1j ** p.phase) @ u.conj().T
    np.testing.assert_allclose(o.pauli_matrix(got.ops, 1j ** got.phase), want, atol=1e-12)


_CONTROL_SETS = [tuple(s) for k in range(1, 5) for s in __import__("itertools").combinations(range(1, 5), k)]
_TRACKED = {cs: ideal_parity_unitary(SubspaceGateSpec.parity(0, (1, 2, 3, 4), cs), 5, phase=1).matrix
            for cs in _CONTROL_SETS}


@settings(max_examples=N_CASES, deadline=None)
@given(paulis(5), st.sampled_from(_CONTROL_SETS))
def test_parity_gate_matches_brute_force(p, controls):
    u = _TRACKED[controls]
    got = conjugate_by_parity_gate(p, controls, 0)
    want = u @ o.pauli_matrix(p.ops, 1j ** p.phase) @ u.conj().T
    np.testing.assert_allclose(o.pauli_matrix(got.ops, 1j ** got.phase), want, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(paulis(5), st.permutations([1, 2, 3, 4]))
def test_parity_gate_order_independent(p, order):
    assert conjugate_by_parity_gate(p, order, 0) == conjugate_by_parity_gate(p, [1, 2, 3, 4], 0)


@settings(max_examples=N_CASES, deadline=None)
@given(paulis(), st.data())
def test_hadamard_twice_is_identity(p, data):
    q = data.draw(st.integers(0, p.num_qubits - 1))
    assert conjugate_by_hadamard(conjugate_by_hadamard(p, q), q) == p


def test_register_length_preserved():
    p = P("XYZI")
    for out in (conjugate_by_cnot(p, 0, 3), conjugate_by_hadamard(p, 2),
                conjugate_by_parity_gate(p, [1, 2], 0), multiply(p, p)):
        assert out.num_qubits == 4


def test_symplectic_rank():
    assert symplectic_rank([P("XX"), P("ZZ"), P("YY")]) == 2
    assert symplectic_rank([P("XI"), P("IX"), P("ZI"), P("IZ")]) == 4
    assert symplectic_rank([]) == 0


def test_parity_gate_does_not_carry_physical_phase():
    # With the -i attached, conjugation maps Paulis outside the Pauli group
    # image of the CNOT product; the tracked form must be used.
    phys = ideal_parity_unitary(SubspaceGateSpec.parity(0, (1, 2, 3, 4), (1, 2, 3, 4)), 5).matrix
    p = P("IXIII")
    tracked = conjugate_by_parity_gate(p, [1, 2, 3, 4], 0)
    conj = phys @ o.pauli_matrix(p.ops) @ phys.conj().T
    assert not np.allclose(conj, o.pauli_matrix(tracked.ops, 1j ** tracked.phase))
