"""Qubit-array geometry: site roles, nearest-neighbour edges and coupling maps.

Sites are numbered row-major with row 0 at the top.  Directions are named so
that the control labels of a five-qubit gate stay explicit: A is the site
above the target, B below, C to the left and D to the right.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

DIRECTIONS = ("up", "down", "left", "right")
DIRECTION_LABELS = {"up": "A", "down": "B", "left": "C", "right": "D"}


class SiteRole(Enum):
    DATA = "data"
    MEASURE_X = "measure-x"
    MEASURE_Z = "measure-z"
    PLAIN = "plain"

    @property
    def is_measure(self) -> bool:
        return self in (SiteRole.MEASURE_X, SiteRole.MEASURE_Z)

    @property
    def symbol(self) -> str:
        return {"data": "D", "measure-x": "X", "measure-z": "Z", "plain": "."}[self.value]


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class LatticeSpec:
    """Immutable rows x cols grid with per-site roles and per-edge couplings (GHz)."""

    rows: int
    cols: int
    roles: tuple[SiteRole, ...]
    couplings: Mapping[tuple[int, int], float]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = self.rows * self.cols
        if len(self.roles) != n:
            raise ValueError(f"expected {n} roles, got {len(self.roles)}")
        expected = set(self._grid_edges())
        given = {_edge(*e) for e in self.couplings}
        if given != expected:
            raise ValueError("couplings must cover exactly the nearest-neighbour edges")
        object.__setattr__(self, "couplings",
                           {_edge(*e): float(v) for e, v in self.couplings.items()})
        if not self.labels:
            object.__setattr__(self, "labels", tuple(
                f"{self.roles[i].symbol}{self.coords(i)}".replace(" ", "") for i in range(n)))

    def _grid_edges(self):
        for r in range(self.rows):
            for c in range(self.cols):
                s = r * self.cols + c
                if c + 1 < self.cols:
                    yield (s, s + 1)
                if r + 1 < self.rows:
                    yield (s, s + self.cols)

    @property
    def num_sites(self) -> int:
        return self.rows * self.cols

    def index(self, row: int, col: int) -> int:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"({row}, {col}) outside {self.rows}x{self.cols} lattice")
        return row * self.cols + col

    def coords(self, site: int) -> tuple[int, int]:
        self._check(site)
        return divmod(site, self.cols)

    def site(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no site labelled {label!r}") from None

    def _check(self, site: int) -> None:
        if not 0 <= site < self.num_sites:
            raise IndexError(f"site {site} out of range for {self.num_sites}-site lattice")

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.couplings)

    def coupling(self, a: int, b: int) -> float:
        try:
            return self.couplings[_edge(a, b)]
        except KeyError:
            raise KeyError(f"sites {a} and {b} are not nearest neighbours") from None

    def neighbors(self, site: int) -> list[tuple[str, int]]:
        """Neighbours in up/down/left/right order; boundary sites get fewer."""
        r, c = self.coords(site)
        out = []
        for name, (dr, dc) in zip(DIRECTIONS, ((-1, 0), (1, 0), (0, -1), (0, 1))):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append((name, rr * self.cols + cc))
        return out

    def neighbor_sites(self, site: int) -> list[int]:
        return [s for _, s in self.neighbors(site)]

    def sites_with_role(self, role: SiteRole) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is role]

    def with_couplings(self, couplings: Mapping[tuple[int, int], float]) -> "LatticeSpec":
        return LatticeSpec(self.rows, self.cols, self.roles, couplings, self.labels)

    def scaled_couplings(self, value: float) -> "LatticeSpec":
        """Same geometry with every edge set to ``value``."""
        return self.with_couplings({e: value for e in self.couplings})

    def render(self) -> str:
        """ASCII grid; edges shown with their coupling in GHz."""
        width = max(4, max(len(lbl) for lbl in self.labels))
        lines = []
        for r in range(self.rows):
            row, vert = [], []
            for c in range(self.cols):
                s = self.index(r, c)
                row.append(self.labels[s].center(width))
                if c + 1 < self.cols:
                    row.append(f"-{self.coupling(s, s + 1):.2f}-")
                if r + 1 < self.rows:
                    vert.append(f"{self.coupling(s, s + self.cols):.2f}".center(width))
                    if c + 1 < self.cols:
                        vert.append(" " * 6)
            lines.append("".join(row))
            if vert:
                lines.append("".join(vert))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "roles": [r.value for r in self.roles],
            "labels": list(self.labels),
            "couplings": [[a, b, v] for (a, b), v in sorted(self.couplings.items())],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LatticeSpec":
        return cls(
            int(data["rows"]), int(data["cols"]),
            tuple(SiteRole(r) for r in data["roles"]),
            {(int(a), int(b)): float(v) for a, b, v in data["couplings"]},
            tuple(data.get("labels", ())),
        )


TESTBED_LABELS = ("E", "A", "F", "C", "T", "D", "G", "B", "H")


def build_testbed_9q(couplings: Sequence[float] = (0.6, 0.6, 0.4, 0.4)) -> LatticeSpec:
    """The 3x3 testbed: target T in the centre, controls A/B/C/D, corners E-H.

    ``couplings`` are (xi_A, xi_B, xi_C, xi_D) in GHz.  Outer edges repeat the
    alternation: horizontal edges leaving an even column carry xi_C and those
    leaving an odd column carry xi_D; vertical edges leaving an even row carry
    xi_A and those leaving an odd row carry xi_B.
    """
    xa, xb, xc, xd = (float(x) for x in couplings)
    edges = {}
    for r in range(3):
        for c in range(3):
            s = 3 * r + c
            if c < 2:
                edges[(s, s + 1)] = xc if c % 2 == 0 else xd
            if r < 2:
                edges[(s, s + 3)] = xa if r % 2 == 0 else xb
    return LatticeSpec(3, 3, (SiteRole.PLAIN,) * 9, edges, TESTBED_LABELS)


def satisfies_alternation(spec: LatticeSpec) -> bool:
    """True if horizontal couplings depend only on column parity and vertical
    ones only on row parity, so the pattern tiles across the array."""
    horiz: dict[int, float] = {}
    vert: dict[int, float] = {}
    for (a, b), v in spec.couplings.items():
        (ra, ca), (rb, cb) = spec.coords(a), spec.coords(b)
        table, key = (horiz, ca % 2) if ra == rb else (vert, ra % 2)
        if table.setdefault(key, v) != v:
            return False
    return True


def surface_role(row: int, col: int) -> SiteRole:
    """Planar-code colouring: data where row+col is even, measure-Z on even
    rows, measure-X on odd rows."""
    if (row + col) % 2 == 0:
        return SiteRole.DATA
    return SiteRole.MEASURE_Z if row % 2 == 0 else SiteRole.MEASURE_X


def build_surface_layout(rows: int, cols: int, xi_z: float = 0.4, xi_x: float = 0.6) -> LatticeSpec:
    """Planar surface-code layout on a full rows x cols checkerboard.

    Every edge joins one data site to one measure site; the edge takes the
    coupling of its measure endpoint (``xi_z`` or ``xi_x``).
    """
    if rows < 3 or cols < 3 or rows % 2 == 0 or cols % 2 == 0:
        raise ValueError(f"surface layout needs odd dimensions >= 3, got {rows}x{cols}")
    roles = tuple(surface_role(r, c) for r in range(rows) for c in range(cols))
    edges = {}
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            for t in ((s + 1) if c + 1 < cols else None, (s + cols) if r + 1 < rows else None):
                if t is None:
                    continue
                measure = roles[s] if roles[s].is_measure else roles[t]
                edges[(s, t)] = xi_z if measure is SiteRole.MEASURE_Z else xi_x
    labels = []
    counters = {"D": 0, "X": 0, "Z": 0}
    for role in roles:
        sym = role.symbol
        labels.append(f"{sym}{counters[sym]}")
        counters[sym] += 1
    return LatticeSpec(rows, cols, roles, edges, tuple(labels))
