"""Signed Pauli strings and the Clifford conjugations used for stabilizer tracking.

A :class:`PauliString` is ``i**k * P_0 (x) P_1 (x) ... (x) P_{n-1}`` with each
``P_j`` one of ``I, X, Y, Z``.  Register positions follow the lattice's
row-major site numbering.

>>> a = PauliString.from_label("X I")
>>> b = PauliString.from_label("I X")
>>> str(multiply(a, b))
'+X X'
>>> str(conjugate_by_cnot(PauliString.from_label("X I"), 0, 1))
'+X X'
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PAULIS = "IXYZ"

# (a, b) -> (power of i, a*b)
_PRODUCT = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TEXT_PHASE = {v: k for k, v in _PHASE_TEXT.items()}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """Immutable signed Pauli operator on a fixed-size register.

    ``ops`` is a string over ``"IXYZ"``; ``phase`` is the exponent ``k`` of the
    prefactor ``i**k`` (kept modulo 4).
    """

    ops: str
    phase: int = 0

    def __post_init__(self):
        if any(c not in PAULIS for c in self.ops):
            raise ValueError(f"invalid Pauli letters in {self.ops!r}")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, site: int, op: str) -> "PauliString":
        _check_index(site, n)
        ops = ["I"] * n
        ops[site] = op
        return cls("".join(ops))

    @classmethod
    def from_sites(cls, n: int, sites: Iterable[int], op: str) -> "PauliString":
        ops = ["I"] * n
        for s in sites:
            _check_index(s, n)
            ops[s] = op
        return cls("".join(ops))

    @classmethod
    def from_label(cls, text: str) -> "PauliString":
        """Parse ``"+X I Z Y"``, ``"-i Z Z"`` or the compact ``"XIZY"``."""
        text = text.strip()
        phase = 0
        for prefix in ("+i", "-i", "+", "-"):
            if text.startswith(prefix):
                phase = _TEXT_PHASE[prefix]
                text = text[len(prefix):]
                break
        ops = "".join(text.split())
        return cls(ops, phase)

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    @property
    def coefficient(self) -> complex:
        return 1j ** self.phase

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.ops) if c != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_identity(self) -> bool:
        return self.weight == 0

    def restrict(self, sites: Sequence[int]) -> "PauliString":
        """Return the operators at ``sites`` (in that order), phase kept."""
        return PauliString("".join(self.ops[s] for s in sites), self.phase)

    def to_matrix(self) -> np.ndarray:
        m = np.array([[1.0 + 0j]])
        for c in self.ops:
            m = np.kron(m, _MATRICES[c])
        return self.coefficient * m

    def to_symplectic(self) -> np.ndarray:
        """Binary ``[x | z]`` vector of length ``2n`` (phase dropped)."""
        x = np.array([c in "XY" for c in self.ops], dtype=np.uint8)
        z = np.array([c in "ZY" for c in self.ops], dtype=np.uint8)
        return np.concatenate([x, z])

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.ops, self.phase + 2)

    def __str__(self) -> str:
        return f"{_PHASE_TEXT[self.phase]}{' '.join(self.ops)}"


def _check_index(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexError(f"site {i} out of range for {n}-qubit register")


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"register size mismatch: {a.num_qubits} vs {b.num_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a * b`` with the phase accumulated exactly."""
    _check_sizes(a, b)
    phase = a.phase + b.phase
    out = []
    for p, q in zip(a.ops, b.ops):
        k, r = _PRODUCT[p, q]
        phase += k
        out.append(r)
    return PauliString("".join(out), phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    anti = sum(1 for p, q in zip(a.ops, b.ops) if p != "I" and q != "I" and p != q)
    return anti % 2 == 0


def _conjugate(p: PauliString, sites: Sequence[int], x_images, z_images) -> PauliString:
    # Decompose each touched factor into X/Z generators (Y = i X Z) and
    # multiply the generator images back together.
    n = p.num_qubits
    untouched = ["I" if i in sites else c for i, c in enumerate(p.ops)]
    result = PauliString("".join(untouched), p.phase)
    for s in sites:
        c = p.ops[s]
        if c == "X":
            result = multiply(result, x_images[s])
        elif c == "Z":
            result = multiply(result, z_images[s])
        elif c == "Y":
            img = multiply(x_images[s], z_images[s])
            result = multiply(result, PauliString(img.ops, img.phase + 1))
    assert result.num_qubits == n
    return result


def conjugate_by_cnot(p: PauliString, control: int, target: int) -> PauliString:
    """Return ``CNOT p CNOT`` for a CNOT from ``control`` onto ``target``."""
    n = p.num_qubits
    _check_index(control, n)
    _check_index(target, n)
    if control == target:
        raise ValueError("control and target must differ")
    x_images = {
        control: PauliString.from_sites(n, (control, target), "X"),
        target: PauliString.single(n, target, "X"),
    }
    z_images = {
        control: PauliString.single(n, control, "Z"),
        target: PauliString.from_sites(n, (control, target), "Z"),
    }
    return _conjugate(p, (control, target), x_images, z_images)


def conjugate_by_hadamard(p: PauliString, q: int) -> PauliString:
    n = p.num_qubits
    _check_index(q, n)
    return _conjugate(p, (q,), {q: PauliString.single(n, q, "Z")},
                      {q: PauliString.single(n, q, "X")})


def conjugate_by_parity_gate(p: PauliString, controls: Sequence[int], target: int) -> PauliString:
    """Conjugate by a parity gate: one CNOT from every active control onto ``target``.

    The physical gate also carries a ``-i`` on flipped subspaces.  That factor
    is tracked separately during computation, so it is not applied here.
    """
    controls = tuple(controls)
    if not 1 <= len(controls) <= 4:
        raise ValueError(f"parity gate takes 1-4 controls, got {len(controls)}")
    if target in controls or len(set(controls)) != len(controls):
        raise ValueError("controls must be distinct and exclude the target")
    for c in controls:
        p = conjugate_by_cnot(p, c, target)
    return p


def symplectic_rank(strings: Sequence[PauliString]) -> int:
    """GF(2) rank of the strings' symplectic vectors."""
    if not strings:
        return 0
    m = np.array([s.to_symplectic() for s in strings], dtype=np.uint8)
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank
