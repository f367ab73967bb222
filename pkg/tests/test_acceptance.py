"""Exit criteria, one test each.

Every test carries ``@pytest.mark.acceptance(number, title)``; conftest.py
collects them and prints one PASS/FAIL line per criterion at the end of the
run.  Run just this file with ``pytest tests/test_acceptance.py -v``.
"""
import time

import numpy as np
import pytest

from isingparity.fidelity import (GateExperiment, five_qubit_system, permutation_spread,
                                  subspace_fidelities, sweep)
from isingparity.lattice import build_surface_layout
from isingparity.propagator import evolve_exact, evolve_trotter
from isingparity.surface import (build_three_step_schedule, build_two_step_schedule,
                                 conventional_depth_units, fig9_report, validate_ordering, windows)
from isingparity.synthesis import (SubspaceGateSpec, synthesize_two_active_horizontal,
                                   synthesize_two_active_vertical)

acceptance = pytest.mark.acceptance
XI = (0.6, 0.6, 0.4, 0.4)


@acceptance(1, "four-active fidelity at 2 GHz control bias")
def test_published_fidelity():
    start = time.perf_counter()
    r = GateExperiment(kind="four-active", tunneling=0.025, couplings=(0.4,) * 4,
                       control_bias=2.0, tau=10.0, dt=0.1).run()
    elapsed = time.perf_counter() - start
    print(f"fid={r.fid:.6f} fid_unit={r.fid_unit:.6f} wall={elapsed:.2f}s")
    assert r.fid == pytest.approx(0.9972, abs=0.002)
    assert r.fid_unit == pytest.approx(0.9944, abs=0.002)
    assert elapsed < 30


@acceptance(2, "four-active fidelity at 3 GHz control bias")
def test_bias_raise():
    r = GateExperiment(control_bias=3.0).run()
    print(f"fid={r.fid:.6f} fid_unit={r.fid_unit:.6f}")
    assert r.fid == pytest.approx(0.999, abs=0.001)
    assert r.fid_unit == pytest.approx(0.998, abs=0.001)


@acceptance(3, "tunneling mismatch of 2 MHz costs under 1% fidelity")
def test_tunneling_sensitivity():
    values = [0.023, 0.024, 0.025, 0.026, 0.027]
    table = sweep(GateExperiment(), "tunneling", values, workers=2)
    fids = table.column("fid")
    drop = (fids[2] - fids.min()) / fids[2]
    print(table.to_csv())
    assert drop < 0.01


@acceptance(4, "stale pulses lose fidelity, rescaled pulses recover it")
def test_coupling_sensitivity():
    xis = [0.3, 0.35, 0.4, 0.45, 0.5]
    stale = [GateExperiment(couplings=(x,) * 4, pulses=(0.8, -0.8)).run() for x in xis]
    rescaled = [GateExperiment(couplings=(x,) * 4, pulses="rescaled").run() for x in xis]
    for x, s, r in zip(xis, stale, rescaled):
        print(f"xi={x} stale={s.fid:.4f} rescaled={r.fid:.4f} conditions={r.conditions_hold}")
    assert all(s.fid < 0.9 for x, s in zip(xis, stale) if x != 0.4)
    assert stale[2].fid >= 0.99
    held = [r for r in rescaled if r.conditions_hold]
    assert len(held) == len(xis)
    assert all(r.fid >= 0.99 for r in held)


@acceptance(5, "two-active schedules: subspace fidelity and order independence")
def test_two_active_gates():
    failures = []
    for synth, active in ((synthesize_two_active_vertical, (1, 2)),
                          (synthesize_two_active_horizontal, (3, 4))):
        sched = synth(XI)
        gate = SubspaceGateSpec.parity(0, (1, 2, 3, 4), active, "ABCD")
        params = five_qubit_system(XI)
        fids = subspace_fidelities(sched, gate, params)
        worst = min(fids.values())
        spread = permutation_spread(sched, gate, params)
        print(f"{sched.name}: steps={sched.biases} min_subspace={worst:.6f} spread={spread:.2e}")
        if worst < 0.999:
            failures.append(f"{sched.name} min subspace fidelity {worst:.6f} < 0.999")
        if spread > 1e-6:
            failures.append(f"{sched.name} permutation spread {spread:.2e} > 1e-6")
    assert not failures, "; ".join(failures)


def _testbed_runs():
    return [GateExperiment(kind="four-active"),
            GateExperiment(kind="two-active-vertical"),
            GateExperiment(kind="two-active-horizontal"),
            GateExperiment(kind="cnot", bias_mode="freeze", control_bias=5.0)]


@acceptance(6, "split-operator propagator agrees with exact exponentials")
def test_oracle_equivalence():
    failures = []
    for exp in _testbed_runs():
        spec = exp.lattice()
        params = exp.params(spec)
        segs = exp.schedule().to_segments(spec.site("T"))
        exact = evolve_exact(spec, params, segs)
        e1, e2 = (np.linalg.norm(evolve_trotter(spec, params, segs, dt, split=True) - exact, 2)
                  for dt in (0.1, 0.01))
        print(f"{exp.kind}: err(0.1)={e1:.3e} err(0.01)={e2:.3e} ratio={e1 / e2:.1f}")
        if e1 > 1e-3:
            failures.append(f"{exp.kind} err(0.1 ns)={e1:.3e} > 1e-3")
        if not 5 <= e1 / e2 <= 20:
            failures.append(f"{exp.kind} ratio {e1 / e2:.1f} not ~10")
    assert not failures, "; ".join(failures)


@acceptance(7, "corner spectators keep their basis states")
def test_spectator_preservation():
    for exp in _testbed_runs():
        r = exp.run()
        print(f"{exp.kind}: {r.spectators}")
        assert min(r.spectators.values()) >= 0.999, exp.kind


@acceptance(8, "stabilizer ordering: ABC passes, ACB fails, window strings")
def test_stabilizer_ordering():
    spec = build_surface_layout(5, 5)
    interior = [w.sites for w in windows(spec) if w.interior]
    good = validate_ordering(build_three_step_schedule(spec, "ABC"), spec)
    bad = validate_ordering(build_three_step_schedule(spec, "ACB"), spec)
    assert good.passed and not bad.passed
    assert interior
    for key in interior:
        assert good.window_strings[key] == ("+X X X I", "+I Z Z Z")
        assert bad.window_strings[key] == ("+X X X X", "+Z Z Z Z")


@acceptance(9, "phase-syndrome circuits agree; mutation detected")
def test_fig9_equivalence():
    r = fig9_report(tol=1e-9)
    print(r)
    assert r["a_equals_b"] and r["b_equals_c_tracked"] and r["mutation_detected"]


@acceptance(10, "multi-qubit depth 4, 8 and 24 tau")
def test_depth_accounting():
    spec = build_surface_layout(5, 5)
    two = build_two_step_schedule(spec).depth_units
    three = build_three_step_schedule(spec).depth_units
    conv = conventional_depth_units()
    assert (two, three, conv) == (4, 8, 24)


@acceptance(11, "property suites: 1000+ cases each, under 2 minutes")
def test_property_suites():
    import test_pauli
    import test_propagator
    import test_surface
    import test_synthesis
    suites = [test_pauli.test_square_is_signed_identity,
              test_pauli.test_commutation_symmetric,
              test_pauli.test_cnot_conjugation_is_involution,
              test_propagator.test_unitarity_budget,
              test_surface.test_syndrome_linearity,
              test_synthesis.test_solver_soundness]
    start = time.perf_counter()
    for fn in suites:
        assert fn._hypothesis_internal_use_settings.max_examples >= 1000, fn.__name__
        fn()
    elapsed = time.perf_counter() - start
    print(f"property suites: {elapsed:.1f}s")
    assert elapsed < 120
