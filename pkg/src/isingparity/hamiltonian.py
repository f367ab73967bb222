"""Always-on Ising Hamiltonian of a qubit array and its reduced target-qubit form.

    H = sum_j (delta_j X_j + eps_j Z_j) + sum_<j,k> xi_jk Z_j Z_k

Energies are in GHz.  The 2*pi factor lives in the propagator.  Basis
ordering is big-endian: site 0 is the most significant bit (the first
Kronecker factor) and ``|0>`` has ``Z = +1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .lattice import DIRECTION_LABELS, LatticeSpec

DENSE_CAP = 10
MAX_QUBITS = 17


class DimensionCapError(ValueError):
    """Requested register is larger than the configured cap."""


@dataclass(frozen=True)
class SystemParams:
    """Per-site tunneling and bias (GHz) plus per-edge couplings (GHz)."""

    delta: tuple[float, ...]
    bias: tuple[float, ...]
    couplings: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(float(x) for x in self.delta))
        object.__setattr__(self, "bias", tuple(float(x) for x in self.bias))
        object.__setattr__(self, "couplings", {
            (min(a, b), max(a, b)): float(v) for (a, b), v in self.couplings.items()})
        if len(self.delta) != len(self.bias):
            raise ValueError("delta and bias must cover the same sites")
        values = self.delta + self.bias + tuple(self.couplings.values())
        if not all(np.isfinite(values)):
            raise ValueError("all frequencies must be finite")
        if any(v <= 0 for v in self.couplings.values()):
            raise ValueError("couplings must be strictly positive on existing edges")
        n = len(self.delta)
        for a, b in self.couplings:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"edge ({a}, {b}) invalid for {n} sites")

    @classmethod
    def for_lattice(cls, spec: LatticeSpec, delta: float | Sequence[float] = 0.025,
                    bias: float | Sequence[float] = 0.0) -> "SystemParams":
        n = spec.num_sites
        d = [delta] * n if np.isscalar(delta) else list(delta)
        b = [bias] * n if np.isscalar(bias) else list(bias)
        return cls(tuple(d), tuple(b), dict(spec.couplings))

    @property
    def num_sites(self) -> int:
        return len(self.delta)

    def coupling(self, a: int, b: int) -> float:
        return self.couplings.get((min(a, b), max(a, b)), 0.0)

    def with_bias(self, overrides: Mapping[int, float]) -> "SystemParams":
        bias = list(self.bias)
        for site, value in overrides.items():
            bias[site] = value
        return SystemParams(self.delta, tuple(bias), self.couplings)

    def with_delta(self, overrides: Mapping[int, float]) -> "SystemParams":
        delta = list(self.delta)
        for site, value in overrides.items():
            delta[site] = value
        return SystemParams(tuple(delta), self.bias, self.couplings)

    def subsystem(self, sites: Sequence[int]) -> "SystemParams":
        """Keep only ``sites`` (renumbered in the given order) and the edges among them."""
        index = {s: i for i, s in enumerate(sites)}
        edges = {(index[a], index[b]): v for (a, b), v in self.couplings.items()
                 if a in index and b in index}
        return SystemParams(tuple(self.delta[s] for s in sites),
                            tuple(self.bias[s] for s in sites), edges)


def z_signs(n: int) -> np.ndarray:
    """``(2**n, n)`` array of Z eigenvalues (+1 for bit 0, -1 for bit 1)."""
    idx = np.arange(2 ** n)[:, None]
    bits = (idx >> (n - 1 - np.arange(n))[None, :]) & 1
    return 1 - 2 * bits


def diagonal_energies(params: SystemParams) -> np.ndarray:
    """The Z and ZZ part of H as a length-2**n real vector."""
    n = params.num_sites
    z = z_signs(n).astype(float)
    diag = z @ np.asarray(params.bias)
    for (a, b), xi in params.couplings.items():
        diag += xi * z[:, a] * z[:, b]
    return diag


def _check_size(n: int, cap: int) -> None:
    if n > cap:
        raise DimensionCapError(f"{n} qubits exceeds cap of {cap}")


def full_hamiltonian(spec: LatticeSpec | None, params: SystemParams, *,
                     sparse: bool | None = None, cap: int = MAX_QUBITS):
    """Hamiltonian of the whole register, dense up to ``DENSE_CAP`` qubits.

    ``spec`` is only used to check that ``params`` matches the lattice; pass
    ``None`` for ad hoc registers.
    """
    n = params.num_sites
    _check_size(n, cap)
    if spec is not None:
        if spec.num_sites != n:
            raise ValueError(f"params cover {n} sites, lattice has {spec.num_sites}")
        if set(params.couplings) != set(spec.couplings):
            raise ValueError("params couplings do not match lattice edges")
    if sparse is None:
        sparse = n > DENSE_CAP
    dim = 2 ** n
    diag = diagonal_energies(params)
    idx = np.arange(dim)
    if not sparse:
        h = np.diag(diag.astype(complex))
        for q, d in enumerate(params.delta):
            if d:
                h[idx ^ (1 << (n - 1 - q)), idx] += d
        return h
    rows, cols, vals = [idx], [idx], [diag]
    for q, d in enumerate(params.delta):
        if d:
            rows.append(idx ^ (1 << (n - 1 - q)))
            cols.append(idx)
            vals.append(np.full(dim, d))
    return sp.csr_matrix((np.concatenate(vals).astype(complex),
                          (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))


def effective_bias(eps_t: float, couplings: Sequence[float], states: Sequence[int]) -> float:
    """``eps_t + sum_i s_i xi_i`` with ``s_i = +1`` for ``|0>`` and ``-1`` for ``|1>``."""
    if len(couplings) != len(states):
        raise ValueError("one state per coupling required")
    return float(eps_t + sum((1 - 2 * s) * xi for s, xi in zip(states, couplings)))


def reduced_hamiltonian(params: SystemParams, target: int, control_states: Mapping[int, int],
                        spec: LatticeSpec | None = None) -> np.ndarray:
    """2x2 ``delta_T X + E Z`` seen by ``target`` with its neighbours frozen.

    ``control_states`` maps every neighbouring site to 0 or 1.  Neighbours are
    read from ``spec`` if given, otherwise from the coupling map.
    """
    nbrs = set(_neighbor_sites(params, target, spec))
    if set(control_states) != nbrs:
        missing = sorted(nbrs - set(control_states))
        extra = sorted(set(control_states) - nbrs)
        raise ValueError(f"control assignment incomplete: missing {missing}, unexpected {extra}")
    sites = sorted(nbrs)
    e = effective_bias(params.bias[target], [params.coupling(target, s) for s in sites],
                       [control_states[s] for s in sites])
    d = params.delta[target]
    return np.array([[e, d], [d, -e]], dtype=complex)


def _neighbor_sites(params: SystemParams, target: int, spec: LatticeSpec | None) -> list[int]:
    if spec is not None:
        return spec.neighbor_sites(target)
    out = []
    for a, b in params.couplings:
        if a == target:
            out.append(b)
        elif b == target:
            out.append(a)
    return sorted(out)


@dataclass(frozen=True)
class EffectiveBiasRow:
    control_config: tuple[int, ...]
    labels: tuple[str, ...]
    effective_bias: float

    @property
    def ket(self) -> str:
        return "|" + "".join(map(str, self.control_config)) + ">"


def control_configurations(k: int) -> list[tuple[int, ...]]:
    """All ``2**k`` basis assignments, first control most significant."""
    return list(itertools.product((0, 1), repeat=k))


def target_couplings(spec: LatticeSpec, target: int) -> tuple[list[str], list[int], list[float]]:
    """Labels (A/B/C/D), sites and couplings of ``target``'s neighbours in direction order."""
    nbrs = spec.neighbors(target)
    labels = [DIRECTION_LABELS[d] for d, _ in nbrs]
    sites = [s for _, s in nbrs]
    return labels, sites, [spec.coupling(target, s) for s in sites]


def effective_bias_table(spec: LatticeSpec, params: SystemParams, target: int,
                         eps_t: float | None = None) -> list[EffectiveBiasRow]:
    """One row per neighbour configuration, ordered with A most significant."""
    labels, _, xi = target_couplings(spec, target)
    eps = params.bias[target] if eps_t is None else eps_t
    return [EffectiveBiasRow(cfg, tuple(labels), effective_bias(eps, xi, cfg))
            for cfg in control_configurations(len(xi))]


def pulse_bias_table(spec: LatticeSpec, params: SystemParams, target: int,
                     pulse_biases: Sequence[float]) -> np.ndarray:
    """Effective bias for each configuration (rows) under each pulse bias (columns)."""
    _, _, xi = target_couplings(spec, target)
    s = 1 - 2 * np.array(control_configurations(len(xi)), dtype=float).reshape(-1, len(xi))
    base = s @ np.asarray(xi, dtype=float)
    return base[:, None] + np.asarray(pulse_biases, dtype=float)[None, :]
