"""Time evolution under piecewise-constant bias schedules.

All propagators use ``exp(-2j*pi*H*t)`` with H in GHz and t in ns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import expm_multiply

from .hamiltonian import (DENSE_CAP, MAX_QUBITS, DimensionCapError, SystemParams,
                          diagonal_energies, full_hamiltonian)
from .lattice import LatticeSpec

TWO_PI = 2 * np.pi
_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)


class ScheduleError(ValueError):
    """Segment list incompatible with the requested time step."""


@dataclass(frozen=True)
class UnitarySegment:
    duration: float
    bias_override: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")


def analytic_2x2(delta_t: float, e: float, t: float) -> np.ndarray:
    """Closed-form ``exp(-2j*pi*(delta_t X + e Z)*t)``, no global phase applied."""
    if t < 0:
        raise ValueError("t must be non-negative")
    r = np.hypot(delta_t, e)
    if r == 0:
        return np.eye(2, dtype=complex)
    wt = TWO_PI * r * t
    c, s = np.cos(wt), np.sin(wt)
    return np.array([[c - 1j * s * e / r, -1j * s * delta_t / r],
                     [-1j * s * delta_t / r, c + 1j * s * e / r]])


def exact_2x2(delta_t: float, e: float, t: float) -> np.ndarray:
    return sla.expm(-1j * TWO_PI * t * (delta_t * _PX + e * _PZ))


def steps_per_segment(duration: float, dt: float, tol: float = 1e-9) -> int:
    if dt <= 0:
        raise ScheduleError("dt must be positive")
    k = int(round(duration / dt))
    if k < 1 or abs(k * dt - duration) > tol:
        raise ScheduleError(f"dt={dt} ns does not divide segment duration {duration} ns")
    return k


def _segment_params(params: SystemParams, seg: UnitarySegment) -> SystemParams:
    return params.with_bias(seg.bias_override) if seg.bias_override else params


def _dense_check(spec: LatticeSpec | None, params: SystemParams, cap: int) -> None:
    n = params.num_sites
    if n > cap:
        raise DimensionCapError(f"dense propagation of {n} qubits exceeds cap of {cap}")
    if spec is not None and spec.num_sites != n:
        raise ValueError(f"params cover {n} sites, lattice has {spec.num_sites}")


def evolve_exact(spec: LatticeSpec | None, params: SystemParams,
                 segments: Sequence[UnitarySegment], cap: int = DENSE_CAP) -> np.ndarray:
    """Product of exact (Pade) matrix exponentials, one per segment."""
    _dense_check(spec, params, cap)
    u = np.eye(2 ** params.num_sites, dtype=complex)
    for seg in segments:
        h = full_hamiltonian(spec, _segment_params(params, seg), sparse=False)
        u = sla.expm(-1j * TWO_PI * seg.duration * h) @ u
    return u


def _x_layer(params: SystemParams, dt: float) -> np.ndarray:
    u = np.array([[1.0 + 0j]])
    for d in params.delta:
        u = np.kron(u, analytic_2x2(d, 0.0, dt))
    return u


def lie_step(params: SystemParams, dt: float) -> np.ndarray:
    """One first-order step: tunneling layer, then the diagonal Z/ZZ layer."""
    phases = np.exp(-1j * TWO_PI * dt * diagonal_energies(params))
    return phases[:, None] * _x_layer(params, dt)


def evolve_trotter(spec: LatticeSpec | None, params: SystemParams,
                   segments: Sequence[UnitarySegment], dt: float = 0.1,
                   split: bool = False, cap: int = DENSE_CAP) -> np.ndarray:
    """Time-sliced evolution with step ``dt`` (ns).

    By default each slice is the exact exponential of the slice Hamiltonian,
    taken from its eigendecomposition.  With ``split=True`` each slice is the
    first-order product of the tunneling layer and the diagonal layer, whose
    error is set by the commutator of those two groups.
    """
    _dense_check(spec, params, cap)
    u = np.eye(2 ** params.num_sites, dtype=complex)
    for seg in segments:
        k = steps_per_segment(seg.duration, dt)
        p = _segment_params(params, seg)
        if split:
            u = np.linalg.matrix_power(lie_step(p, dt), k) @ u
        else:
            w, v = np.linalg.eigh(full_hamiltonian(spec, p, sparse=False))
            u = (v * np.exp(-1j * TWO_PI * dt * w) ** k) @ v.conj().T @ u
    return u


def _apply_x_layer(psi: np.ndarray, params: SystemParams, dt: float) -> np.ndarray:
    n = params.num_sites
    t = psi.reshape((2,) * n)
    for q, d in enumerate(params.delta):
        if d:
            t = np.moveaxis(np.tensordot(analytic_2x2(d, 0.0, dt), t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


@dataclass(frozen=True)
class MatrixFreeEvolution:
    """Schedule applied directly to state vectors, for registers too large for dense unitaries."""

    spec: LatticeSpec | None
    params: SystemParams
    segments: tuple[UnitarySegment, ...]
    dt: float = 0.1
    split: bool = False
    cap: int = MAX_QUBITS

    def __post_init__(self):
        if self.params.num_sites > self.cap:
            raise DimensionCapError(f"{self.params.num_sites} qubits exceeds cap of {self.cap}")
        object.__setattr__(self, "segments", tuple(self.segments))
        for seg in self.segments:
            steps_per_segment(seg.duration, self.dt)

    @property
    def dim(self) -> int:
        return 2 ** self.params.num_sites

    def apply(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        for seg in self.segments:
            p = _segment_params(self.params, seg)
            if self.split:
                phases = np.exp(-1j * TWO_PI * self.dt * diagonal_energies(p))
                for _ in range(steps_per_segment(seg.duration, self.dt)):
                    psi = phases * _apply_x_layer(psi, p, self.dt)
            else:
                h = full_hamiltonian(self.spec, p, sparse=True)
                psi = expm_multiply(-1j * TWO_PI * seg.duration * h, psi)
        return psi


def apply_to_state(op: np.ndarray | MatrixFreeEvolution, psi: np.ndarray,
                   norm_tol: float = 1e-8) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dim = op.dim if isinstance(op, MatrixFreeEvolution) else op.shape[0]
    if psi.size != dim:
        raise ValueError(f"state of length {psi.size} does not match operator dimension {dim}")
    if abs(np.linalg.norm(psi) - 1) > norm_tol:
        raise ValueError("input state must be normalised")
    if isinstance(op, MatrixFreeEvolution):
        return op.apply(psi)
    return op @ psi


def basis_state(n: int, bits: Sequence[int] | str) -> np.ndarray:
    """Computational basis vector with site 0 as the most significant bit."""
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    if len(bits) != n:
        raise ValueError(f"need {n} bits, got {len(bits)}")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[int("".join(map(str, bits)), 2) if n else 0] = 1
    return psi


def reduced_basis_fidelity(psi: np.ndarray, n: int, site: int, bit: int) -> float:
    """Probability that ``site`` is found in ``|bit>``; equals the fidelity of the
    single-qubit reduced state with that basis state."""
    probs = np.abs(psi.reshape((2,) * n)) ** 2
    return float(np.moveaxis(probs, site, 0)[bit].sum())


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
