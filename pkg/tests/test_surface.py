import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as o
from isingparity.fidelity import GateExperiment
from isingparity.lattice import SiteRole, build_surface_layout, build_testbed_9q
from isingparity.pauli import PauliString, multiply
from isingparity.propagator import basis_state
from isingparity.surface import (CycleSchedule, build_three_step_schedule, build_two_step_schedule,
                                 check_fig9_equivalence, conventional_depth_units, depth_report,
                                 SyndromeExtractor, extract_syndrome, fig9_circuits, fig9_report,
                                 tracked_phase_correction, validate_ordering, windows,
                                 z_basis_prediction)

SPEC = build_surface_layout(5, 5)
ABC = build_three_step_schedule(SPEC, "ABC")
TWO = build_two_step_schedule(SPEC)
DATA = SPEC.sites_with_role(SiteRole.DATA)


def interior_strings(order):
    report = validate_ordering(build_three_step_schedule(SPEC, order), SPEC)
    return {k: v for k, v in report.window_strings.items()
            if next(w for w in windows(SPEC) if w.sites == k).interior}


class TestSchedules:
    def test_every_data_qubit_targeted_once_in_a_or_b(self):
        a, b = ABC.parity_layers[0], ABC.parity_layers[1]
        targets = [g.target for g in a.gates + b.gates]
        assert len(targets) == len(set(targets))
        covered = {frozenset((g.target, c)) for g in a.gates + b.gates for c in g.active}
        for m in SPEC.sites_with_role(SiteRole.MEASURE_X):
            for d in SPEC.neighbor_sites(m):
                assert frozenset((m, d)) in covered

    def test_no_warnings(self):
        assert ABC.warnings == ()
        assert TWO.warnings == ()

    def test_layer_structure(self):
        kinds = [type(l).__name__ for l in ABC.layers]
        assert kinds == ["HadamardLayer", "ParityGateLayer", "ParityGateLayer", "ParityGateLayer",
                         "HadamardLayer", "MeasureLayer"]

    def test_bad_order(self):
        with pytest.raises(ValueError):
            build_three_step_schedule(SPEC, "ABB")

    def test_rejects_testbed(self):
        with pytest.raises(ValueError):
            build_three_step_schedule(build_testbed_9q())


class TestOrdering:
    def test_abc_passes(self):
        r = validate_ordering(ABC, SPEC)
        assert r.passed and r.commuting and r.independent

    def test_acb_fails_sharing_rule(self):
        r = validate_ordering(build_three_step_schedule(SPEC, "ACB"), SPEC)
        assert not r.passed
        assert not r.sharing_rule

    def test_abc_window_strings(self):
        for xs, zs in interior_strings("ABC").values():
            assert (xs, zs) == ("+X X X I", "+I Z Z Z")

    def test_acb_window_strings(self):
        for xs, zs in interior_strings("ACB").values():
            assert (xs, zs) == ("+X X X X", "+Z Z Z Z")

    @pytest.mark.parametrize("z_first", [False, True])
    def test_two_step_either_order(self, z_first):
        assert validate_ordering(build_two_step_schedule(SPEC, z_first), SPEC).passed

    def test_empty_schedule(self):
        r = validate_ordering(CycleSchedule("empty", ()), SPEC)
        assert r.commuting and r.independent
        assert all(str(p).count("Z") == 1 for p in r.final.values())

    def test_render(self):
        text = validate_ordering(ABC, SPEC).render()
        assert "passed: True" in text


class TestDepth:
    def test_values(self):
        assert depth_report(SPEC) == {"two_step": 4, "three_step": 8, "conventional": 24}

    def test_conventional(self):
        assert conventional_depth_units() == 24


class TestFig9:
    def test_report(self):
        r = fig9_report()
        assert r == {"a_equals_b": True, "b_equals_c_tracked": True, "a_equals_c_tracked": True,
                     "c_raw_differs": True, "mutation_detected": True}
        assert check_fig9_equivalence()

    def test_a_against_oracle(self):
        n = 5
        h = o.hadamard(0, n)
        ref = h @ o.cnot(0, 4, n) @ o.cnot(0, 3, n) @ o.cnot(0, 2, n) @ o.cnot(0, 1, n) @ h
        np.testing.assert_allclose(fig9_circuits()["a"], ref, atol=1e-12)

    def test_c_against_oracle(self):
        n = 5
        hd = o.kron_all([o.I2] + [o.H] * 4)
        ref = hd @ o.parity_gate(n, [1, 2, 3, 4], 0) @ hd
        np.testing.assert_allclose(fig9_circuits()["c"], ref, atol=1e-12)

    def test_correction_is_unitary_and_diagonal_in_x_frame(self):
        u = tracked_phase_correction()
        np.testing.assert_allclose(u @ u.conj().T, np.eye(32), atol=1e-12)


class TestSyndrome:
    def test_x_error_flags_z_neighbours(self):
        d = SPEC.site("D6")
        syn = extract_syndrome(SPEC, PauliString.single(SPEC.num_sites, d, "X"), ABC)
        flagged = {SPEC.labels[m] for m, b in syn.items() if b}
        want = {SPEC.labels[m] for m in SPEC.neighbor_sites(d) if SPEC.roles[m] is SiteRole.MEASURE_Z}
        assert flagged == want == {"Z2", "Z3"}

    def test_z_error_flags_x_neighbours(self):
        d = SPEC.site("D3")
        syn = extract_syndrome(SPEC, PauliString.single(SPEC.num_sites, d, "Z"), TWO)
        flagged = {SPEC.labels[m] for m, b in syn.items() if b}
        assert flagged == {"X0", "X1"}

    def test_no_error(self):
        syn = extract_syndrome(SPEC, PauliString("I" * SPEC.num_sites), ABC)
        assert not any(syn.values())

    def test_rejects_measure_site_error(self):
        with pytest.raises(ValueError):
            extract_syndrome(SPEC, PauliString.single(SPEC.num_sites, SPEC.site("X0"), "X"), ABC)

    def test_rejects_failing_schedule(self):
        with pytest.raises(ValueError, match="fails ordering"):
            extract_syndrome(SPEC, PauliString("I" * SPEC.num_sites),
                             build_three_step_schedule(SPEC, "ACB"))


def data_errors():
    n = SPEC.num_sites
    return st.lists(st.sampled_from("IXYZ"), min_size=len(DATA), max_size=len(DATA)).map(
        lambda ops: PauliString("".join(
            ops[DATA.index(i)] if i in DATA else "I" for i in range(n))))


EXTRACTORS = [SyndromeExtractor(SPEC, ABC), SyndromeExtractor(SPEC, TWO)]


def test_extractor_matches_function():
    e = PauliString.single(SPEC.num_sites, SPEC.site("D6"), "Y")
    assert EXTRACTORS[0](e) == extract_syndrome(SPEC, e, ABC)


@settings(max_examples=1000, deadline=None)
@given(data_errors(), data_errors(), st.sampled_from(EXTRACTORS))
def test_syndrome_linearity(e1, e2, extract):
    s1, s2 = extract(e1), extract(e2)
    s12 = extract(multiply(e1, e2))
    assert s12 == {m: s1[m] ^ s2[m] for m in s1}


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=5, max_size=5),
       st.lists(st.tuples(st.lists(st.integers(1, 4), min_size=1, max_size=4, unique=True)), max_size=3))
def test_clifford_prediction_matches_matrices(bits, gates):
    gates = [(tuple(c), 0) for (c,) in gates]
    u = np.eye(32, dtype=complex)
    for controls, target in gates:
        u = o.parity_gate(5, controls, target, phase=1) @ u
    out = u @ basis_state(5, bits)
    assert np.argmax(np.abs(out)) == int("".join(map(str, z_basis_prediction(bits, gates))), 2)


def _pulse_vs_clifford(control_bias):
    # worst basis-state fidelity of the four-active pulse schedule against the
    # Clifford prediction of the ideal parity gate on the testbed
    u = GateExperiment(control_bias=control_bias).unitary()
    controls, target = (1, 7, 3, 5), 4
    worst = 1.0
    for bits in itertools.product((0, 1), repeat=9):
        predicted = z_basis_prediction(list(bits), [(controls, target)])
        idx_in = int("".join(map(str, bits)), 2)
        idx_out = int("".join(map(str, predicted)), 2)
        worst = min(worst, abs(u[idx_out, idx_in]) ** 2)
    return worst


def test_pulse_level_matches_clifford_at_2ghz():
    worst = _pulse_vs_clifford(2.0)
    assert worst >= 0.999, f"worst basis-state fidelity {worst:.6f}"


def test_pulse_level_matches_clifford_at_3ghz():
    assert _pulse_vs_clifford(3.0) >= 0.999
