"""Bias-pulse schedules for controlled gates on a target with always-on couplings.

A target with neighbours in basis state ``c`` sees an effective bias
``E_c = eps_T + sum_i s_i xi_i``.  A pulse step of length ``tau`` realises X
(up to ``-i``) on configuration ``c`` when ``E_c = 0`` and
``delta_T * tau = n + 1/4``, and identity when ``E_c * tau`` is a nonzero
integer.  Every schedule below is a list of target biases built from those
two conditions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .hamiltonian import SystemParams, control_configurations, effective_bias
from .lattice import DIRECTION_LABELS, LatticeSpec
from .propagator import UnitarySegment

INT_TOL = 1e-6
DEFAULT_SEARCH_BOUND = 64


class GateOp(Enum):
    FLIP_X = "X"
    IDENTITY = "I"


class InfeasibleScheduleError(ValueError):
    """No schedule satisfies the integer conditions; ``report`` lists why."""

    def __init__(self, message: str, report: Sequence = ()):
        super().__init__(message)
        self.report = list(report)


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceGateSpec:
    """Target operation for each basis configuration of the target's neighbours.

    Configurations are bit tuples ordered like ``controls`` (first is most
    significant).
    """

    target: int
    controls: tuple[int, ...]
    assignment: Mapping[tuple[int, ...], GateOp]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        if self.target in self.controls or len(set(self.controls)) != len(self.controls):
            raise ValueError("controls must be distinct and exclude the target")
        configs = set(control_configurations(len(self.controls)))
        if set(self.assignment) != configs:
            raise ValueError("assignment must cover every control configuration exactly")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(c) for c in self.controls))

    @classmethod
    def parity(cls, target: int, controls: Sequence[int], active: Sequence[int],
               labels: Sequence[str] = ()) -> "SubspaceGateSpec":
        """Flip the target iff the XOR of the ``active`` sites is 1; other controls are dummies."""
        controls = tuple(controls)
        if not set(active) <= set(controls):
            raise ValueError("active sites must be among the controls")
        pos = [controls.index(a) for a in active]
        assignment = {cfg: GateOp.FLIP_X if sum(cfg[p] for p in pos) % 2 else GateOp.IDENTITY
                      for cfg in control_configurations(len(controls))}
        return cls(target, controls, assignment, tuple(labels))

    @property
    def active(self) -> tuple[int, ...]:
        """Controls whose state changes the assignment somewhere."""
        out = []
        for i, site in enumerate(self.controls):
            for cfg, op in self.assignment.items():
                flipped = cfg[:i] + (1 - cfg[i],) + cfg[i + 1:]
                if self.assignment[flipped] is not op:
                    out.append(site)
                    break
        return tuple(out)

    @property
    def flip_configs(self) -> list[tuple[int, ...]]:
        return sorted(c for c, op in self.assignment.items() if op is GateOp.FLIP_X)

    def label_of(self, cfg: tuple[int, ...]) -> str:
        return " ".join(f"{l}={b}" for l, b in zip(self.labels, cfg))


def parity_spec(spec: LatticeSpec, target: int, active: str | Sequence[str]) -> SubspaceGateSpec:
    """Parity gate on a lattice site; ``active`` names neighbours by A/B/C/D."""
    nbrs = spec.neighbors(target)
    labels = [DIRECTION_LABELS[d] for d, _ in nbrs]
    by_label = dict(zip(labels, (s for _, s in nbrs)))
    missing = [a for a in active if a not in by_label]
    if missing:
        raise ValueError(f"site {target} has no neighbour {missing}")
    return SubspaceGateSpec.parity(target, [s for _, s in nbrs], [by_label[a] for a in active], labels)


@dataclass(frozen=True)
class PulseSchedule:
    """Target-bias steps ``(eps_T GHz, tau ns)`` plus the phase left on flipped subspaces."""

    steps: tuple[tuple[float, float], ...]
    tracked_phase: complex = -1j
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((float(e), float(t)) for e, t in self.steps))
        taus = {t for _, t in self.steps}
        if len(taus) > 1:
            raise ValueError("every step must have the same duration")

    @property
    def biases(self) -> tuple[float, ...]:
        return tuple(e for e, _ in self.steps)

    @property
    def tau(self) -> float:
        return self.steps[0][1] if self.steps else 0.0

    @property
    def duration(self) -> float:
        return sum(t for _, t in self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def permuted(self, order: Sequence[int]) -> "PulseSchedule":
        return PulseSchedule(tuple(self.steps[i] for i in order), self.tracked_phase, self.name)

    def to_segments(self, target: int, extra: Mapping[int, float] | None = None) -> list[UnitarySegment]:
        base = dict(extra or {})
        return [UnitarySegment(t, {**base, target: e}) for e, t in self.steps]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "tracked_phase": _phase_text(self.tracked_phase),
            "steps": [{"bias": f"{_fmt(e)} GHz", "duration": f"{_fmt(t)} ns"} for e, t in self.steps],
        }


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _phase_text(z: complex) -> str:
    return {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}.get(complex(np.round(z, 12)), repr(z))


def is_integer(x: float, tol: float = INT_TOL) -> bool:
    return abs(x - round(x)) <= tol


def x_condition(delta_t: float, tau: float, tol: float = INT_TOL) -> bool:
    """``2*pi*delta_t*tau = (4n+1)*pi/2``, i.e. ``delta_t*tau`` is ``n + 1/4``."""
    v = delta_t * tau - 0.25
    return v >= -tol and is_integer(v, tol)


@dataclass(frozen=True)
class AuditEntry:
    config: tuple[int, ...]
    wanted: GateOp
    step: int
    bias: float
    effective_bias: float
    e_tau: float
    realizes: str
    ok: bool


@dataclass(frozen=True)
class ScheduleAudit:
    entries: tuple[AuditEntry, ...]
    x_condition_ok: bool
    flip_counts: Mapping[tuple[int, ...], int] = field(default_factory=dict)
    wanted: Mapping[tuple[int, ...], GateOp] = field(default_factory=dict)

    @property
    def violations(self) -> list[AuditEntry]:
        return [e for e in self.entries if not e.ok]

    @property
    def passed(self) -> bool:
        counts_ok = all(
            (n == 1) if self._wanted[c] is GateOp.FLIP_X else (n == 0)
            for c, n in self.flip_counts.items())
        return self.x_condition_ok and counts_ok and not self.violations

    @property
    def _wanted(self):
        return self.wanted or {e.config: e.wanted for e in self.entries}

    def render(self, labels: Sequence[str] = ()) -> str:
        lines = [f"x_condition: {'ok' if self.x_condition_ok else 'FAIL'}"]
        for e in self.entries:
            cfg = "".join(map(str, e.config))
            lines.append(f"config={cfg} want={e.wanted.value} step={e.step} bias={e.bias:+.6g}"
                         f" E={e.effective_bias:+.6g} E*tau={e.e_tau:+.6g}"
                         f" realizes={e.realizes} {'ok' if e.ok else 'VIOLATION'}")
        lines.append(f"passed: {self.passed}")
        return "\n".join(lines)


def audit_schedule(gate: SubspaceGateSpec, xi: Sequence[float], delta_t: float,
                   schedule: PulseSchedule | Sequence[float], tau: float | None = None,
                   search_bound: int = DEFAULT_SEARCH_BOUND) -> ScheduleAudit:
    """Check each (configuration, step) pair against the X / identity conditions.

    A FlipX configuration must hit ``E = 0`` on exactly one step and a nonzero
    integer ``E*tau`` on every other step.  An identity configuration needs a
    nonzero integer ``E*tau`` on every step.  ``|E*tau|`` above
    ``search_bound`` counts as a violation.
    """
    if isinstance(schedule, PulseSchedule):
        biases, tau = schedule.biases, schedule.tau if tau is None else tau
    else:
        biases = tuple(schedule)
    if tau is None:
        raise ValueError("tau required when passing raw biases")
    if len(xi) != len(gate.controls):
        raise ValueError(f"need {len(gate.controls)} couplings, got {len(xi)}")
    entries, counts = [], {}
    for cfg in control_configurations(len(gate.controls)):
        wanted = gate.assignment[cfg]
        counts[cfg] = 0
        for k, eps in enumerate(biases):
            e = float(np.round(effective_bias(eps, xi, cfg), 12)) + 0.0
            et = float(np.round(e * tau, 9)) + 0.0
            if abs(et) <= INT_TOL:
                realizes, ok = "X", wanted is GateOp.FLIP_X
                counts[cfg] += 1
            elif is_integer(et) and abs(et) <= search_bound + INT_TOL:
                realizes, ok = "I", True
            else:
                realizes, ok = "?", False
            entries.append(AuditEntry(cfg, wanted, k, eps, e, et, realizes, ok))
    has_flip = any(op is GateOp.FLIP_X for op in gate.assignment.values())
    return ScheduleAudit(tuple(entries), x_condition(delta_t, tau) or not has_flip, counts,
                         dict(gate.assignment))


def _raise_from_audit(audit: ScheduleAudit, what: str, extra: Sequence[str] = ()) -> None:
    report = list(extra)
    if not audit.x_condition_ok:
        report.append("x_condition: delta_T*tau is not n + 1/4")
    for c, n in audit.flip_counts.items():
        want = audit._wanted[c]
        if want is GateOp.FLIP_X and n != 1:
            report.append(f"config {''.join(map(str, c))}: E=0 on {n} steps, need exactly 1")
        if want is GateOp.IDENTITY and n:
            report.append(f"config {''.join(map(str, c))}: identity wanted but E=0 on {n} steps")
    for e in audit.violations:
        if e.realizes == "?":
            report.append(f"config {''.join(map(str, e.config))} step {e.step}: "
                          f"E*tau={e.e_tau:.6g} is not a nonzero integer")
    raise InfeasibleScheduleError(f"{what}: integer conditions not satisfied", report)


def synthesize_general(gate: SubspaceGateSpec, xi: Sequence[float], delta_t: float, tau: float,
                       search_bound: int = DEFAULT_SEARCH_BOUND) -> PulseSchedule:
    """Smallest schedule realising ``gate`` with the given couplings.

    Each FlipX configuration ``c`` needs a step with ``eps_T = -sum_i s_i xi_i``
    so the minimal schedule uses exactly the distinct values of those sums.
    Any extra step would only add constraints.  Steps come out in ascending
    bias order.
    """
    if len(xi) != len(gate.controls):
        raise ValueError(f"need {len(gate.controls)} couplings, got {len(xi)}")
    needed = sorted({-effective_bias(0.0, xi, c) for c in gate.flip_configs})
    biases: list[float] = []
    for b in needed:
        if not biases or abs(b - biases[-1]) > INT_TOL / tau:
            biases.append(float(np.round(b, 12)) + 0.0)
    schedule = PulseSchedule(tuple((b, tau) for b in biases), name="general")
    audit = audit_schedule(gate, xi, delta_t, schedule, search_bound=search_bound)
    if not audit.passed:
        _raise_from_audit(audit, "general synthesis")
    return schedule


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12


def two_active_residuals(xi_keep: float, xi_cancel: float) -> dict[str, float]:
    """The seven effective biases left on identity subspaces once xi_A=xi_B and
    xi_C=xi_D, keyed by name.  ``xi_keep`` belongs to the active pair and
    ``xi_cancel`` to the dummy pair."""
    b, d = xi_keep, xi_cancel
    return {
        "2xi_keep": 2 * b,
        "2xi_cancel": 2 * d,
        "4xi_cancel": 4 * d,
        "2xi_keep+2xi_cancel": 2 * b + 2 * d,
        "2xi_keep-2xi_cancel": 2 * b - 2 * d,
        "2xi_keep+4xi_cancel": 2 * b + 4 * d,
        "2xi_keep-4xi_cancel": 2 * b - 4 * d,
    }


def _two_active(xi: Sequence[float], delta_t: float, tau: float, vertical: bool) -> PulseSchedule:
    xa, xb, xc, xd = (float(x) for x in xi)
    if not (_same(xa, xb) and _same(xc, xd)):
        raise PreconditionError(f"two-active gates need xi_A=xi_B and xi_C=xi_D, got {tuple(xi)}")
    keep, cancel = (xb, xd) if vertical else (xd, xb)
    failing = [f"{name}: E*tau={v * tau:.6g}" for name, v in two_active_residuals(keep, cancel).items()
               if not is_integer(v * tau) or abs(v * tau) <= INT_TOL]
    if not x_condition(delta_t, tau):
        failing.append("x_condition: delta_T*tau is not n + 1/4")
    name = "two-active-vertical" if vertical else "two-active-horizontal"
    if failing:
        raise InfeasibleScheduleError(f"{name}: residual equations fail", failing)
    m = cancel * 2
    schedule = PulseSchedule(((-m, tau), (0.0, tau), (m, tau)), name=name)
    gate = SubspaceGateSpec.parity(0, (1, 2, 3, 4), (1, 2) if vertical else (3, 4), "ABCD")
    audit = audit_schedule(gate, (xa, xb, xc, xd), delta_t, schedule)
    if not audit.passed:
        _raise_from_audit(audit, name)
    return schedule


def synthesize_two_active_vertical(xi: Sequence[float], delta_t: float = 0.025,
                                   tau: float = 10.0) -> PulseSchedule:
    """Flip on odd A,B parity, ignore C,D: steps ``(-xi_C-xi_D, 0, xi_C+xi_D)``."""
    return _two_active(xi, delta_t, tau, vertical=True)


def synthesize_two_active_horizontal(xi: Sequence[float], delta_t: float = 0.025,
                                     tau: float = 10.0) -> PulseSchedule:
    """Flip on odd C,D parity, ignore A,B: steps ``(-xi_A-xi_B, 0, xi_A+xi_B)``."""
    return _two_active(xi, delta_t, tau, vertical=False)


def synthesize_four_active(xi_common: float | Sequence[float], delta_t: float = 0.025,
                           tau: float = 10.0) -> PulseSchedule:
    """Flip on odd parity of all four neighbours: steps ``(+2xi, -2xi)``."""
    if np.isscalar(xi_common):
        xi = (float(xi_common),) * 4
    else:
        xi = tuple(float(x) for x in xi_common)
        if len(xi) != 4 or not all(_same(x, xi[0]) for x in xi):
            raise PreconditionError(f"four-active gate needs four equal couplings, got {xi}")
    x = xi[0]
    schedule = PulseSchedule(((2 * x, tau), (-2 * x, tau)), name="four-active")
    gate = SubspaceGateSpec.parity(0, (1, 2, 3, 4), (1, 2, 3, 4), "ABCD")
    audit = audit_schedule(gate, xi, delta_t, schedule)
    if not audit.passed:
        _raise_from_audit(audit, "four-active")
    return schedule


def synthesize_cnot(xi: Sequence[float], control: int = 0, delta_t: float = 0.025,
                    tau: float = 10.0) -> PulseSchedule:
    """CNOT from one neighbour (index ``control`` in A/B/C/D order) with the other three as dummies.

    Needs couplings whose signed dummy sums are all distinct, e.g. powers of two.
    """
    gate = SubspaceGateSpec.parity(0, (1, 2, 3, 4), (1 + control,), "ABCD")
    schedule = synthesize_general(gate, xi, delta_t, tau)
    return PulseSchedule(schedule.steps, schedule.tracked_phase, "cnot")


def repetition_step_counts(xi_parity: Sequence[float] = (0.6, 0.6, 0.4, 0.4),
                           xi_cnot: Sequence[float] = (1.6, 0.2, 0.4, 0.8),
                           delta_t: float = 0.025, tau: float = 10.0) -> dict[str, int]:
    """Pulse steps needed to copy the parity of two data qubits onto an ancilla:
    two CNOTs in sequence versus one two-active parity gate."""
    cnot_a = synthesize_cnot(xi_cnot, 0, delta_t, tau)
    cnot_b = synthesize_cnot((xi_cnot[1], xi_cnot[0], xi_cnot[2], xi_cnot[3]), 1, delta_t, tau)
    parity = synthesize_two_active_vertical(xi_parity, delta_t, tau)
    return {"cnot_pair": len(cnot_a) + len(cnot_b), "parity_gate": len(parity)}


def freeze_bias(spec: LatticeSpec, params: SystemParams, qubit: int, tau: float,
                preferred: float = 2.0, min_detuning: float | None = None,
                search_bound: int = DEFAULT_SEARCH_BOUND) -> float:
    """Bias that leaves ``qubit`` idle for every neighbour configuration.

    Candidates are ``m/tau - sum_i xi_i`` so that every configuration gets an
    integer ``E*tau``.  Every ``|E|`` must also exceed ``min_detuning``
    (default ``max(10*delta, 1/tau)``) so that tunneling stays negligible.  The
    candidate closest to ``preferred`` wins; ties go to the smaller magnitude.
    """
    xi = [spec.coupling(qubit, s) for s in spec.neighbor_sites(qubit)]
    bad = [x for x in xi if not is_integer(2 * x * tau)]
    if bad:
        raise InfeasibleScheduleError(
            f"site {qubit}: 2*xi*tau must be integer for a freeze bias", [f"xi={x}" for x in bad])
    if min_detuning is None:
        min_detuning = max(10 * abs(params.delta[qubit]), 1.0 / tau)
    sums = np.array([effective_bias(0.0, xi, c) for c in control_configurations(len(xi))])
    top = sum(xi)
    m0 = int(round((preferred + top) * tau))
    best = None
    for m in range(m0 - search_bound, m0 + search_bound + 1):
        eps = m / tau - top
        if np.min(np.abs(eps + sums)) < min_detuning - 1e-12:
            continue
        key = (round(abs(eps - preferred), 12), round(abs(eps), 12), eps)
        if best is None or key < best[0]:
            best = (key, eps)
    if best is None:
        raise InfeasibleScheduleError(f"site {qubit}: no freeze bias within search bound")
    return float(np.round(best[1], 12)) + 0.0


def two_active_xi_options(tau: float, lo: float = 0.1, hi: float = 1.0,
                          step: float | None = None) -> list[tuple[float, float]]:
    """Coupling pairs (xi_keep, xi_cancel) on a ``1/(2 tau)`` grid that satisfy all
    seven residual conditions."""
    step = step or 1 / (2 * tau)
    grid = np.round(np.arange(lo, hi + 1e-9, step), 12)
    out = []
    for keep, cancel in itertools.product(grid, grid):
        vals = two_active_residuals(keep, cancel).values()
        if all(is_integer(v * tau) and abs(v * tau) > INT_TOL for v in vals):
            out.append((float(keep), float(cancel)))
    return out
