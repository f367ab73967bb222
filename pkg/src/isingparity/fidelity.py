"""Ideal gates, trace fidelities and parameter sweeps on the nine-qubit testbed."""
from __future__ import annotations

import dataclasses
import io
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hamiltonian import SystemParams, z_signs
from .lattice import LatticeSpec, build_testbed_9q
from .propagator import evolve_exact, evolve_trotter
from .synthesis import (GateOp, PulseSchedule, SubspaceGateSpec, audit_schedule, freeze_bias,
                        parity_spec, synthesize_cnot, synthesize_four_active, synthesize_general,
                        synthesize_two_active_horizontal, synthesize_two_active_vertical)


@dataclass(frozen=True)
class IdealGate:
    matrix: np.ndarray
    gate: SubspaceGateSpec
    phase: complex

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def ideal_parity_unitary(gate: SubspaceGateSpec, register_size: int,
                         phase: complex = -1j) -> IdealGate:
    """Permutation matrix flipping the target on FlipX configurations.

    Flipped columns carry ``phase``: ``-1j`` matches what the pulse schedules
    produce, ``1`` gives the bare product of CNOTs.
    """
    sites = (gate.target,) + gate.controls
    if any(not 0 <= s < register_size for s in sites):
        raise ValueError(f"gate sites {sites} outside {register_size}-qubit register")
    n = register_size
    dim = 2 ** n
    bits = (1 - z_signs(n)) // 2
    cfgs = bits[:, list(gate.controls)]
    flip = np.array([gate.assignment[tuple(c)] is GateOp.FLIP_X for c in cfgs])
    cols = np.arange(dim)
    rows = np.where(flip, cols ^ (1 << (n - 1 - gate.target)), cols)
    u = np.zeros((dim, dim), dtype=complex)
    u[rows, cols] = np.where(flip, phase, 1.0)
    return IdealGate(u, gate, phase)


def _check_pair(u_ideal: np.ndarray, u: np.ndarray) -> int:
    if u_ideal.shape != u.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u_ideal.shape} vs {u.shape}")
    return u.shape[0]


def fid(u_ideal, u) -> float:
    """``|Tr(U_ideal^dag U)| / d``."""
    u_ideal = getattr(u_ideal, "matrix", u_ideal)
    d = _check_pair(u_ideal, u)
    return float(abs(np.vdot(u_ideal, u)) / d)


def fid_unit(u_ideal, u) -> float:
    """``(Tr(U^dag U) + |Tr(U_ideal^dag U)|^2) / (d (d+1))``; also drops if U leaks norm."""
    u_ideal = getattr(u_ideal, "matrix", u_ideal)
    d = _check_pair(u_ideal, u)
    overlap = abs(np.vdot(u_ideal, u)) ** 2
    return float((np.vdot(u, u).real + overlap) / (d * (d + 1)))


def spectator_fidelities(u: np.ndarray, n: int, sites: Sequence[int]) -> dict[int, float]:
    """Worst-case probability, over all basis inputs, that each site keeps its bit."""
    probs = np.abs(u) ** 2
    bits = (1 - z_signs(n)) // 2
    out = {}
    for s in sites:
        same = bits[:, s][:, None] == bits[:, s][None, :]
        out[s] = float(np.min(np.sum(probs * same, axis=0)))
    return out


GATE_KINDS = ("four-active", "two-active-vertical", "two-active-horizontal", "cnot", "general")
_ACTIVE = {"four-active": "ABCD", "two-active-vertical": "AB",
           "two-active-horizontal": "CD", "cnot": "A"}
_DEFAULT_XI = {"four-active": (0.4,) * 4, "two-active-vertical": (0.6, 0.6, 0.4, 0.4),
               "two-active-horizontal": (0.6, 0.6, 0.4, 0.4), "cnot": (1.6, 0.2, 0.4, 0.8),
               "general": (0.6, 0.6, 0.4, 0.4)}


def synthesize_kind(kind: str, xi: Sequence[float], delta_t: float, tau: float) -> PulseSchedule:
    if kind == "four-active":
        return synthesize_four_active(xi, delta_t, tau)
    if kind == "two-active-vertical":
        return synthesize_two_active_vertical(xi, delta_t, tau)
    if kind == "two-active-horizontal":
        return synthesize_two_active_horizontal(xi, delta_t, tau)
    if kind == "cnot":
        return synthesize_cnot(xi, 0, delta_t, tau)
    raise ValueError(f"unknown gate kind {kind!r}; expected one of {GATE_KINDS}")


@dataclass(frozen=True)
class GateExperiment:
    """One pulse-level run of a five-qubit gate on the 3x3 testbed.

    ``pulses`` is either ``None`` (synthesise and audit), ``"rescaled"``
    (four-active closed form ``+-2 xi`` without the integer audit) or an
    explicit tuple of target biases in GHz.  With ``bias_mode="uniform"``
    every non-target site sits at ``control_bias``; ``"freeze"`` gives each
    one its own freeze bias near ``control_bias``.  ``design_tunneling`` is
    the tunneling the schedule is synthesised for, so a mismatch against the
    simulated ``tunneling`` can be studied.
    """

    kind: str = "four-active"
    tunneling: float = 0.025
    couplings: tuple[float, ...] | None = None
    control_bias: float = 2.0
    tau: float = 10.0
    dt: float = 0.1
    pulses: tuple[float, ...] | str | None = None
    split: bool = False
    bias_mode: str = "uniform"
    design_tunneling: float | None = None
    active: str | None = None
    flip_configs: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.bias_mode not in ("uniform", "freeze"):
            raise ValueError(f"bias_mode must be 'uniform' or 'freeze', got {self.bias_mode!r}")
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}")
        if self.couplings is None:
            object.__setattr__(self, "couplings", _DEFAULT_XI[self.kind])
        object.__setattr__(self, "couplings", tuple(float(x) for x in self.couplings))
        if isinstance(self.pulses, (list, tuple)):
            object.__setattr__(self, "pulses", tuple(float(p) for p in self.pulses))

    def lattice(self) -> LatticeSpec:
        return build_testbed_9q(self.couplings)

    def gate(self, spec: LatticeSpec | None = None) -> SubspaceGateSpec:
        spec = spec or self.lattice()
        target = spec.site("T")
        if self.kind != "general":
            return parity_spec(spec, target, _ACTIVE[self.kind])
        if self.active is not None:
            return parity_spec(spec, target, self.active)
        if self.flip_configs is None:
            raise ValueError("general gate needs 'active' or 'flip_configs'")
        controls = tuple(spec.neighbor_sites(target))
        flips = {tuple(int(b) for b in c) for c in self.flip_configs}
        assignment = {c: GateOp.FLIP_X if c in flips else GateOp.IDENTITY
                      for c in itertools.product((0, 1), repeat=len(controls))}
        return SubspaceGateSpec(target, controls, assignment, ("A", "B", "C", "D"))

    def schedule(self) -> PulseSchedule:
        if self.pulses is None:
            design = self.tunneling if self.design_tunneling is None else self.design_tunneling
            if self.kind == "general":
                return synthesize_general(self.gate(), self.couplings, design, self.tau)
            return synthesize_kind(self.kind, self.couplings, design, self.tau)
        if self.pulses == "rescaled":
            if self.kind != "four-active":
                raise ValueError("'rescaled' pulses only apply to the four-active gate")
            x = self.couplings[0]
            return PulseSchedule(((2 * x, self.tau), (-2 * x, self.tau)), name="four-active")
        return PulseSchedule(tuple((p, self.tau) for p in self.pulses), name=self.kind)

    def params(self, spec: LatticeSpec | None = None) -> SystemParams:
        spec = spec or self.lattice()
        params = SystemParams.for_lattice(spec, self.tunneling, self.control_bias)
        if self.bias_mode == "freeze":
            target = spec.site("T")
            params = params.with_bias({
                s: freeze_bias(spec, params, s, self.tau, preferred=self.control_bias)
                for s in range(spec.num_sites) if s != target})
        return params

    def unitary(self) -> np.ndarray:
        spec = self.lattice()
        segments = self.schedule().to_segments(spec.site("T"))
        return evolve_trotter(spec, self.params(spec), segments, self.dt, split=self.split)

    def run(self) -> "GateResult":
        start = time.perf_counter()
        spec = self.lattice()
        schedule = self.schedule()
        gate = self.gate(spec)
        u = evolve_trotter(spec, self.params(spec), schedule.to_segments(spec.site("T")),
                           self.dt, split=self.split)
        ideal = ideal_parity_unitary(gate, spec.num_sites, schedule.tracked_phase)
        corners = [spec.site(s) for s in "EFGH"]
        spect = {spec.labels[s]: v for s, v in spectator_fidelities(u, spec.num_sites, corners).items()}
        audit = audit_schedule(gate, [spec.coupling(gate.target, c) for c in gate.controls],
                               self.tunneling, schedule)
        return GateResult(fid(ideal, u), fid_unit(ideal, u), spect, audit.passed,
                          schedule, time.perf_counter() - start)


@dataclass(frozen=True)
class GateResult:
    fid: float
    fid_unit: float
    spectators: dict[str, float]
    conditions_hold: bool
    schedule: PulseSchedule
    wall_time: float

    def render(self) -> str:
        lines = [f"fid: {self.fid:.6f}", f"fid_unit: {self.fid_unit:.6f}",
                 f"conditions_hold: {self.conditions_hold}",
                 f"pulses_GHz: {', '.join(f'{b:+.6g}' for b in self.schedule.biases)}"]
        lines += [f"spectator_{k}: {v:.6f}" for k, v in self.spectators.items()]
        lines.append(f"wall_time_s: {self.wall_time:.3f}")
        return "\n".join(lines)


def five_qubit_system(xi: Sequence[float], tunneling: float = 0.025, control_bias: float = 2.0,
                      control_tunneling: float | None = None) -> SystemParams:
    """Target (site 0) with A, B, C, D on sites 1-4 and only the four target edges."""
    ct = tunneling if control_tunneling is None else control_tunneling
    return SystemParams((tunneling,) + (ct,) * 4, (0.0,) + (control_bias,) * 4,
                        {(0, k + 1): x for k, x in enumerate(xi)})


def subspace_fidelities(schedule: PulseSchedule, gate: SubspaceGateSpec, params: SystemParams,
                        exact: bool = True, dt: float = 0.1) -> dict[tuple[int, ...], float]:
    """``|Tr(ideal_block^dag block)| / 2`` for every control configuration.

    ``params`` describes a register holding the target and its controls and
    nothing else; blocks are the 2x2 target propagators with controls fixed.
    """
    n = params.num_sites
    segments = schedule.to_segments(gate.target)
    u = evolve_exact(None, params, segments) if exact else evolve_trotter(None, params, segments, dt)
    bits = (1 - z_signs(n)) // 2
    out = {}
    for cfg, op in gate.assignment.items():
        idx = np.where(np.all(bits[:, list(gate.controls)] == cfg, axis=1))[0]
        idx = idx[np.argsort(bits[idx, gate.target])]
        block = u[np.ix_(idx, idx)]
        ideal = (schedule.tracked_phase * np.array([[0, 1], [1, 0]])
                 if op is GateOp.FLIP_X else np.eye(2))
        out[cfg] = float(abs(np.vdot(ideal, block)) / 2)
    return out


def permutation_spread(schedule: PulseSchedule, gate: SubspaceGateSpec,
                       params: SystemParams) -> float:
    """Largest change in any subspace fidelity over all reorderings of the steps."""
    base = subspace_fidelities(schedule, gate, params)
    worst = 0.0
    for order in itertools.permutations(range(len(schedule))):
        other = subspace_fidelities(schedule.permuted(order), gate, params)
        worst = max(worst, max(abs(other[c] - base[c]) for c in base))
    return worst


SWEEP_PARAMETERS = {
    "tunneling": ("tunneling", "GHz"),
    "coupling_all": ("couplings", "GHz"),
    "control_bias": ("control_bias", "GHz"),
    "pulse_magnitudes": ("pulses", "GHz"),
    "tau": ("tau", "ns"),
    "dt": ("dt", "ns"),
}


def vary(base: GateExperiment, parameter: str, value: float) -> GateExperiment:
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {sorted(SWEEP_PARAMETERS)}")
    attr, _ = SWEEP_PARAMETERS[parameter]
    if parameter == "tunneling" and base.design_tunneling is None:
        return dataclasses.replace(base, tunneling=value, design_tunneling=base.tunneling)
    if parameter == "coupling_all":
        value = (value,) * 4
    elif parameter == "pulse_magnitudes":
        value = (value, -value)
    return dataclasses.replace(base, **{attr: value})


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    unit: str
    rows: tuple[tuple[float, float, float], ...]
    base: GateExperiment = field(default_factory=GateExperiment)

    def column(self, name: str) -> np.ndarray:
        i = ("value", "fid", "fid_unit").index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self, header: Sequence[str] = ()) -> str:
        """Comment header lines, then ``parameter_value,fid,fid_unit`` with 6 significant digits."""
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        buf.write(f"{self.parameter}_{self.unit},fid,fid_unit\n")
        for v, f, fu in self.rows:
            buf.write(f"{v:.6g},{f:.6g},{fu:.6g}\n")
        return buf.getvalue()


def sweep(base: GateExperiment, parameter: str, values: Sequence[float],
          workers: int | None = None) -> SweepTable:
    """Run ``base`` once per value; rows keep input order whatever ``workers`` is."""
    experiments = [vary(base, parameter, v) for v in values]

    def point(exp: GateExperiment) -> tuple[float, float]:
        r = exp.run()
        return r.fid, r.fid_unit

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, experiments))
    else:
        results = [point(e) for e in experiments]
    rows = tuple((float(v), f, fu) for v, (f, fu) in zip(values, results))
    return SweepTable(parameter, SWEEP_PARAMETERS[parameter][1], rows, base)
