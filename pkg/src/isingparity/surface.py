"""Surface-code syndrome cycles built from multi-qubit parity gates.

Every ancilla starts in ``|0>`` and is read out in the Z basis.  Parity
layers are propagated at the Clifford level as products of CNOTs from the
active controls onto the target.  The ``-i`` that the pulse-level gate leaves
on flipped subspaces is kept out of this bookkeeping.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .lattice import LatticeSpec, SiteRole
from .pauli import (PauliString, commutes, conjugate_by_hadamard, conjugate_by_parity_gate,
                    symplectic_rank)
from .synthesis import (InfeasibleScheduleError, SubspaceGateSpec, synthesize_cnot,
                        synthesize_general)


@dataclass(frozen=True)
class HadamardLayer:
    sites: tuple[int, ...]
    name: str = "H"


@dataclass(frozen=True)
class ParityGate:
    target: int
    active: tuple[int, ...]
    dummies: tuple[int, ...]
    steps: int


@dataclass(frozen=True)
class ParityGateLayer:
    gates: tuple[ParityGate, ...]
    name: str = "parity"

    @property
    def depth(self) -> int:
        return max((g.steps for g in self.gates), default=0)


@dataclass(frozen=True)
class MeasureLayer:
    sites: tuple[int, ...]
    name: str = "measure"


Layer = Union[HadamardLayer, ParityGateLayer, MeasureLayer]

CONVENTIONAL_CNOT_SEQUENCES = 3


@dataclass(frozen=True)
class CycleSchedule:
    name: str
    layers: tuple[Layer, ...]
    warnings: tuple[str, ...] = ()

    @property
    def parity_layers(self) -> list[ParityGateLayer]:
        return [l for l in self.layers if isinstance(l, ParityGateLayer)]

    @property
    def depth_units(self) -> int:
        """Multi-qubit time in units of tau: the slowest gate of each parity layer, summed."""
        return sum(l.depth for l in self.parity_layers)

    def render(self, spec: LatticeSpec) -> str:
        lab = spec.labels
        lines = [f"schedule: {self.name}", f"depth_units_tau: {self.depth_units}"]
        for i, layer in enumerate(self.layers):
            if isinstance(layer, ParityGateLayer):
                lines.append(f"layer_{i}: parity {layer.name} gates={len(layer.gates)} depth={layer.depth}")
                for g in layer.gates:
                    lines.append(f"  target={lab[g.target]} active={','.join(lab[s] for s in g.active)}"
                                 f" dummies={','.join(lab[s] for s in g.dummies) or '-'} steps={g.steps}")
            else:
                kind = "hadamard" if isinstance(layer, HadamardLayer) else "measure"
                lines.append(f"layer_{i}: {kind} {layer.name} sites={','.join(lab[s] for s in layer.sites)}")
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _require_surface(spec: LatticeSpec) -> None:
    if not spec.sites_with_role(SiteRole.MEASURE_X) or not spec.sites_with_role(SiteRole.MEASURE_Z):
        raise ValueError("lattice has no measure-X / measure-Z sites; build it with build_surface_layout")
    for a, b in spec.edges():
        if spec.roles[a].is_measure == spec.roles[b].is_measure:
            raise ValueError(f"sites {a} and {b} break the data/measure checkerboard")


def _gate(spec: LatticeSpec, target: int, active: Iterable[int], tau: float,
          delta_t: float) -> ParityGate:
    active = tuple(active)
    controls = tuple(spec.neighbor_sites(target))
    gate = SubspaceGateSpec.parity(target, controls, active)
    xi = [spec.coupling(target, c) for c in controls]
    schedule = synthesize_general(gate, xi, delta_t, tau)
    return ParityGate(target, active, tuple(c for c in controls if c not in active), len(schedule))


def _layer(spec: LatticeSpec, name: str, targets: Iterable[int], active_role: SiteRole,
           directions: Sequence[str], tau: float, delta_t: float) -> ParityGateLayer:
    gates = []
    for t in targets:
        active = [s for d, s in spec.neighbors(t) if d in directions and spec.roles[s] is active_role]
        if active:
            gates.append(_gate(spec, t, active, tau, delta_t))
    layer = ParityGateLayer(tuple(gates), name)
    check_layer(spec, layer)
    return layer


def check_layer(spec: LatticeSpec, layer: ParityGateLayer) -> None:
    """Targets must be distinct and pairwise non-adjacent and never act as a control
    elsewhere in the layer.  Controls may be shared between gates."""
    targets = [g.target for g in layer.gates]
    if len(set(targets)) != len(targets):
        raise ValueError(f"layer {layer.name}: repeated target")
    tset = set(targets)
    for g in layer.gates:
        if tset & set(spec.neighbor_sites(g.target)):
            raise ValueError(f"layer {layer.name}: adjacent targets at site {g.target}")


def _uncovered(spec: LatticeSpec, layers: Sequence[ParityGateLayer], role: SiteRole) -> list[str]:
    covered = {frozenset((g.target, c)) for layer in layers for g in layer.gates for c in g.active}
    out = []
    for m in spec.sites_with_role(role):
        missing = [d for d in spec.neighbor_sites(m) if frozenset((m, d)) not in covered]
        if missing:
            out.append(f"{spec.labels[m]} misses data {','.join(spec.labels[d] for d in missing)}")
    return out


def build_three_step_schedule(spec: LatticeSpec, order: str = "ABC", tau: float = 10.0,
                              delta_t: float = 0.025) -> CycleSchedule:
    """H(measure-X), three parity layers in ``order``, H(measure-X), readout.

    A: even-row data targets, their vertical measure-X neighbours active.
    B: odd-row data targets, their horizontal measure-X neighbours active.
    C: measure-Z targets, all data neighbours active.
    """
    _require_surface(spec)
    if sorted(order) != ["A", "B", "C"]:
        raise ValueError(f"order must be a permutation of 'ABC', got {order!r}")
    data = spec.sites_with_role(SiteRole.DATA)
    mx = tuple(spec.sites_with_role(SiteRole.MEASURE_X))
    mz = spec.sites_with_role(SiteRole.MEASURE_Z)
    built = {
        "A": _layer(spec, "A", [d for d in data if spec.coords(d)[0] % 2 == 0],
                    SiteRole.MEASURE_X, ("up", "down"), tau, delta_t),
        "B": _layer(spec, "B", [d for d in data if spec.coords(d)[0] % 2 == 1],
                    SiteRole.MEASURE_X, ("left", "right"), tau, delta_t),
        "C": _layer(spec, "C", mz, SiteRole.DATA, ("up", "down", "left", "right"), tau, delta_t),
    }
    parity = [built[k] for k in order]
    warnings = _uncovered(spec, parity, SiteRole.MEASURE_X) + _uncovered(spec, parity, SiteRole.MEASURE_Z)
    layers = (HadamardLayer(mx, "H_measure_x"), *parity, HadamardLayer(mx, "H_measure_x"),
              MeasureLayer(mx + tuple(mz)))
    return CycleSchedule(f"three-step-{order}", layers, tuple(warnings))


def build_two_step_schedule(spec: LatticeSpec, z_first: bool = False, tau: float = 10.0,
                            delta_t: float = 0.025) -> CycleSchedule:
    """Two parity layers with every ancilla as a target.

    The X layer is sandwiched by Hadamards on all data so that measure-X
    ancillas pick up the X parity; the Z layer runs outside the sandwich.
    """
    _require_surface(spec)
    data = tuple(spec.sites_with_role(SiteRole.DATA))
    mx = spec.sites_with_role(SiteRole.MEASURE_X)
    mz = spec.sites_with_role(SiteRole.MEASURE_Z)
    every = ("up", "down", "left", "right")
    x_part = (HadamardLayer(data, "H_data"),
              _layer(spec, "X", mx, SiteRole.DATA, every, tau, delta_t),
              HadamardLayer(data, "H_data"))
    z_part = (_layer(spec, "Z", mz, SiteRole.DATA, every, tau, delta_t),)
    body = z_part + x_part if z_first else x_part + z_part
    parity = [l for l in body if isinstance(l, ParityGateLayer)]
    warnings = _uncovered(spec, parity, SiteRole.MEASURE_X) + _uncovered(spec, parity, SiteRole.MEASURE_Z)
    return CycleSchedule("two-step-" + ("ZX" if z_first else "XZ"),
                         (*body, MeasureLayer(tuple(mx) + tuple(mz))), tuple(warnings))


def conventional_depth_units(xi_cnot: Sequence[float] = (1.6, 0.2, 0.4, 0.8), tau: float = 10.0,
                             delta_t: float = 0.025) -> int:
    """CNOT-based cycle: three CNOT sequences, each as long as one synthesised CNOT."""
    return CONVENTIONAL_CNOT_SEQUENCES * len(synthesize_cnot(xi_cnot, 0, delta_t, tau))


def depth_report(spec: LatticeSpec, tau: float = 10.0) -> dict[str, int]:
    return {
        "two_step": build_two_step_schedule(spec, tau=tau).depth_units,
        "three_step": build_three_step_schedule(spec, tau=tau).depth_units,
        "conventional": conventional_depth_units(tau=tau),
    }


def apply_layer(p: PauliString, layer: Layer) -> PauliString:
    if isinstance(layer, HadamardLayer):
        for s in layer.sites:
            p = conjugate_by_hadamard(p, s)
    elif isinstance(layer, ParityGateLayer):
        for g in layer.gates:
            p = conjugate_by_parity_gate(p, g.active, g.target)
    return p


def propagate(generators: dict[int, PauliString], layers: Iterable[Layer]) -> list[dict[int, PauliString]]:
    """Snapshots of every generator after each layer (index 0 is the input)."""
    snaps = [dict(generators)]
    for layer in layers:
        snaps.append({k: apply_layer(p, layer) for k, p in snaps[-1].items()})
    return snaps


def stabilizer(spec: LatticeSpec, ancilla: int) -> PauliString:
    """Data-qubit operator measured by ``ancilla``."""
    op = "X" if spec.roles[ancilla] is SiteRole.MEASURE_X else "Z"
    return PauliString.from_sites(spec.num_sites, spec.neighbor_sites(ancilla), op)


def ancilla_sites(spec: LatticeSpec) -> list[int]:
    return sorted(spec.sites_with_role(SiteRole.MEASURE_X) + spec.sites_with_role(SiteRole.MEASURE_Z))


@dataclass(frozen=True)
class Window:
    """A 2x2 block with one measure-X site, one measure-Z site and the two data
    sites they share (``a`` vertical to X, ``b`` horizontal to X)."""

    x: int
    a: int
    b: int
    z: int
    interior: bool

    @property
    def sites(self) -> tuple[int, int, int, int]:
        return (self.x, self.a, self.b, self.z)


def windows(spec: LatticeSpec) -> list[Window]:
    out = []
    for r, c in itertools.product(range(spec.rows - 1), range(spec.cols - 1)):
        block = [spec.index(r + dr, c + dc) for dr in (0, 1) for dc in (0, 1)]
        roles = [spec.roles[s] for s in block]
        x = block[roles.index(SiteRole.MEASURE_X)]
        z = block[roles.index(SiteRole.MEASURE_Z)]
        xr, xc = spec.coords(x)
        data = [s for s in block if spec.roles[s] is SiteRole.DATA]
        a = next(s for s in data if spec.coords(s)[1] == xc)
        b = next(s for s in data if spec.coords(s)[0] == xr)
        interior = len(spec.neighbor_sites(x)) == 4 and len(spec.neighbor_sites(z)) == 4
        out.append(Window(x, a, b, z, interior))
    return out


@dataclass
class OrderingReport:
    schedule: str
    commuting: bool
    independent: bool
    isolated: dict[int, bool]
    stabilizer_match: dict[int, bool]
    window_strings: dict[tuple[int, int, int, int], tuple[str, str]]
    final: dict[int, PauliString]
    labels: tuple[str, ...] = ()

    @property
    def sharing_rule(self) -> bool:
        return all(self.isolated.values())

    @property
    def passed(self) -> bool:
        return self.commuting and self.sharing_rule and all(self.stabilizer_match.values())

    def render(self) -> str:
        lab = self.labels
        lines = [f"schedule: {self.schedule}", f"commuting: {self.commuting}",
                 f"independent: {self.independent}", f"sharing_rule: {self.sharing_rule}",
                 f"stabilizers_match: {all(self.stabilizer_match.values())}"]
        for key, (xs, zs) in self.window_strings.items():
            name = ",".join(lab[s] for s in key) if lab else ",".join(map(str, key))
            lines.append(f"window[{name}]: X_gen={xs} Z_gen={zs}")
        lines.append(f"passed: {self.passed}")
        return "\n".join(lines)


def validate_ordering(schedule: CycleSchedule, spec: LatticeSpec) -> OrderingReport:
    """Propagate ``Z`` on every ancilla through the cycle and check the result.

    The cycle is good when the final generators commute, each touches no
    ancilla except its own (so no ancilla disturbs another), and the data
    part of each is that ancilla's stabilizer.  Window strings are read just
    after the last parity layer, in (X, a, b, Z) order.
    """
    n = spec.num_sites
    anc = ancilla_sites(spec)
    init = {m: PauliString.single(n, m, "Z") for m in anc}
    snaps = propagate(init, schedule.layers)
    final = snaps[-1]
    parity_idx = [i for i, l in enumerate(schedule.layers) if isinstance(l, ParityGateLayer)]
    boxed = snaps[parity_idx[-1] + 1] if parity_idx else snaps[0]

    gens = list(final.values())
    commuting = all(commutes(p, q) for p, q in itertools.combinations(gens, 2))
    independent = symplectic_rank(gens) == len(gens)
    anc_set = set(anc)
    isolated, match = {}, {}
    for m, p in final.items():
        touched = anc_set & set(p.support)
        isolated[m] = touched == {m} and p.ops[m] == "Z"
        data_part = PauliString("".join("I" if i in anc_set else c for i, c in enumerate(p.ops)), p.phase)
        match[m] = data_part == stabilizer(spec, m)
    strings = {w.sites: (str(boxed[w.x].restrict(w.sites)), str(boxed[w.z].restrict(w.sites)))
               for w in windows(spec)}
    return OrderingReport(schedule.name, commuting, independent, isolated, match, strings,
                          final, spec.labels)


def measured_observables(spec: LatticeSpec, schedule: CycleSchedule) -> dict[int, PauliString]:
    """Pull ``Z_m`` on each ancilla back through the cycle to the input."""
    n = spec.num_sites
    out = {}
    for m in ancilla_sites(spec):
        p = PauliString.single(n, m, "Z")
        for layer in reversed(schedule.layers):
            p = apply_layer(p, layer)
        out[m] = p
    return out


class SyndromeExtractor:
    """Validated cycle with its measured observables precomputed, for repeated syndrome queries."""

    def __init__(self, spec: LatticeSpec, schedule: CycleSchedule):
        if not validate_ordering(schedule, spec).passed:
            raise ValueError(f"schedule {schedule.name} fails ordering validation")
        self.spec = spec
        self.schedule = schedule
        self.ancillas = set(ancilla_sites(spec))
        self.observables = measured_observables(spec, schedule)
        for m, obs in self.observables.items():
            if any(obs.ops[s] in "XY" for s in self.ancillas):
                raise ValueError(f"outcome of {spec.labels[m]} is not deterministic")

    def __call__(self, error: PauliString) -> dict[int, int]:
        if error.num_qubits != self.spec.num_sites:
            raise ValueError(f"error acts on {error.num_qubits} qubits, lattice has {self.spec.num_sites}")
        bad = sorted(self.ancillas & set(error.support))
        if bad:
            raise ValueError(f"error touches measure sites {[self.spec.labels[s] for s in bad]}")
        return {m: 0 if commutes(obs, error) else 1 for m, obs in self.observables.items()}


def extract_syndrome(spec: LatticeSpec, error: PauliString, schedule: CycleSchedule) -> dict[int, int]:
    """Syndrome bit per ancilla for a data-qubit Pauli error applied before the cycle."""
    return SyndromeExtractor(spec, schedule)(error)


def render_syndrome(spec: LatticeSpec, syndrome: dict[int, int]) -> str:
    return "\n".join(f"{spec.labels[m]}: {b}" for m, b in sorted(syndrome.items()))


# Phase-flip syndrome circuits on one measure-X ancilla (site 0) and four data (sites 1-4).

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
FIG9_QUBITS = 5


def _single(op: np.ndarray, q: int, n: int = FIG9_QUBITS) -> np.ndarray:
    mats = [op if k == q else np.eye(2) for k in range(n)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _cnot(c: int, t: int, n: int = FIG9_QUBITS) -> np.ndarray:
    dim = 2 ** n
    idx = np.arange(dim)
    src = np.where((idx >> (n - 1 - c)) & 1, idx ^ (1 << (n - 1 - t)), idx)
    u = np.zeros((dim, dim), dtype=complex)
    u[src, idx] = 1
    return u


def _chain(gates: Sequence[np.ndarray]) -> np.ndarray:
    u = np.eye(gates[0].shape[0], dtype=complex)
    for g in gates:
        u = g @ u
    return u


def fig9_circuits(drop_hadamard: bool = False) -> dict[str, np.ndarray]:
    """(a) H on ancilla, CNOT ancilla->data x4, H on ancilla.
    (b) each CNOT reversed and wrapped in Hadamards on its data qubit.
    (c) H on data, one four-active parity gate onto the ancilla, H on data.
    ``drop_hadamard`` removes the closing ancilla Hadamard from (a)."""
    data = range(1, FIG9_QUBITS)
    h_anc = _single(_H, 0)
    h_data = _chain([_single(_H, d) for d in data])
    a_gates = [h_anc] + [_cnot(0, d) for d in data] + ([] if drop_hadamard else [h_anc])
    # Reversing each CNOT inside Hadamards on both qubits leaves adjacent
    # ancilla Hadamard pairs, which cancel.
    b_gates = []
    for d in data:
        b_gates += [_single(_H, d), _cnot(d, 0), _single(_H, d)]
    from .fidelity import ideal_parity_unitary
    gate = SubspaceGateSpec.parity(0, tuple(data), tuple(data))
    parity = ideal_parity_unitary(gate, FIG9_QUBITS, -1j).matrix
    return {"a": _chain(a_gates), "b": _chain(b_gates), "c": h_data @ parity @ h_data}


def tracked_phase_correction() -> np.ndarray:
    """Undo the ``-i`` on odd data parity, expressed in the Hadamard frame of (c)."""
    n = FIG9_QUBITS
    idx = np.arange(2 ** n)
    parity = np.zeros_like(idx)
    for d in range(1, n):
        parity ^= (idx >> (n - 1 - d)) & 1
    undo = np.diag(np.where(parity, 1j, 1.0))
    h_data = _chain([_single(_H, d) for d in range(1, n)])
    return h_data @ undo @ h_data


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    k = np.argmax(np.abs(v))
    k = np.unravel_index(k, v.shape)
    if abs(u[k]) < tol:
        return False
    phase = u[k] / v[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(u - phase * v)) <= tol)


def fig9_report(tol: float = 1e-9) -> dict[str, bool]:
    circ = fig9_circuits()
    corrected_c = tracked_phase_correction() @ circ["c"]
    mutated = fig9_circuits(drop_hadamard=True)["a"]
    return {
        "a_equals_b": equal_up_to_phase(circ["a"], circ["b"], tol),
        "b_equals_c_tracked": equal_up_to_phase(circ["b"], corrected_c, tol),
        "a_equals_c_tracked": equal_up_to_phase(circ["a"], corrected_c, tol),
        "c_raw_differs": not equal_up_to_phase(circ["a"], circ["c"], tol),
        "mutation_detected": not equal_up_to_phase(mutated, corrected_c, tol),
    }


def check_fig9_equivalence(tol: float = 1e-9) -> bool:
    r = fig9_report(tol)
    return r["a_equals_b"] and r["b_equals_c_tracked"] and r["mutation_detected"]


def z_basis_prediction(bits: Sequence[int], gates: Sequence[tuple[Sequence[int], int]]) -> list[int]:
    """Output bits of a CNOT-product circuit on a basis input, from stabilizer propagation.

    ``gates`` are (active controls, target) pairs.  The input is stabilised by
    ``(-1)^b_q Z_q``; after propagation every generator is a signed Z string,
    and the sign of each single ``Z_q`` is recovered by GF(2) elimination.
    """
    n = len(bits)
    gens = [PauliString.single(n, q, "Z") if not b else -PauliString.single(n, q, "Z")
            for q, b in enumerate(bits)]
    for controls, target in gates:
        gens = [conjugate_by_parity_gate(g, controls, target) for g in gens]
    z = np.array([[c == "Z" for c in g.ops] for g in gens], dtype=np.uint8)
    sign = np.array([g.phase // 2 for g in gens], dtype=np.uint8)
    # Row-reduce [z | I] to [I | M]; row q of M picks the generators whose product is Z_q.
    m = np.concatenate([z, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i, col])
        m[[col, piv]] = m[[piv, col]]
        for i in range(n):
            if i != col and m[i, col]:
                m[i] ^= m[col]
    return [int(m[q, n:] @ sign % 2) for q in range(n)]
