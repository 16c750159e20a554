"""Sensor-network connectivity graphs.

A topology is an undirected simple graph whose edges mark the qubit pairs
entangled by each circuit layer.  Hardware-motivated builds keep every node
at degree <= 4; fully connected graphs exceed that and must be constructed
with ``allow_overdegree=True``.

Edge-list file format (whitespace-delimited, ``#`` starts a comment)::

    # header: <n_qubits> <n_edges>
    4 3
    0 1
    1 2
    2 3
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .errors import ConfigurationError
from .tolerances import MAX_QUBITS

MAX_DEGREE = 4


@dataclass(frozen=True)
class Topology:
    """Named undirected graph over ``n_qubits`` nodes.

    Edges are canonicalized on construction: each pair sorted ascending and
    the list sorted lexicographically, so two topologies with the same edge
    set compare equal.  Structural validity (no self-loops, no duplicates,
    indices in range) is enforced here; the degree policy is not, because
    over-degree graphs are legal when explicitly requested.
    """

    name: str
    n_qubits: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, (int,)) or not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigurationError(
                f"qubit count must be in [1, {MAX_QUBITS}], got {self.n_qubits!r}"
            )
        canonical = []
        for edge in self.edges:
            if len(edge) != 2:
                raise ConfigurationError(f"edge {edge!r} is not a pair")
            i, j = int(edge[0]), int(edge[1])
            if i == j:
                raise ConfigurationError(f"self-loop on node {i}")
            if not (0 <= i < self.n_qubits and 0 <= j < self.n_qubits):
                raise ConfigurationError(
                    f"edge ({i}, {j}) out of range for {self.n_qubits} qubits"
                )
            canonical.append((min(i, j), max(i, j)))
        canonical.sort()
        for a, b in zip(canonical, canonical[1:]):
            if a == b:
                raise ConfigurationError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(canonical))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_qubits
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def validate(topology: Topology, allow_overdegree: bool = False) -> list[tuple[int, int]]:
    """Return the (node, degree) pairs violating the degree cap.

    An empty list means the topology satisfies the hardware constraint.
    With ``allow_overdegree=True`` the check is waived and the list is
    always empty.
    """
    if allow_overdegree:
        return []
    return [
        (node, degree)
        for node, degree in enumerate(topology.degrees())
        if degree > MAX_DEGREE
    ]


def make_topology(
    name: str,
    n_qubits: int,
    edges: list[tuple[int, int]] | tuple[tuple[int, int], ...],
    allow_overdegree: bool = False,
) -> Topology:
    """Construct and fully validate a topology, degree policy included."""
    topo = Topology(name, n_qubits, tuple(edges))
    violations = validate(topo, allow_overdegree)
    if violations:
        report = ", ".join(f"node {n} has degree {d}" for n, d in violations)
        raise ConfigurationError(
            f"topology {name!r} exceeds degree {MAX_DEGREE}: {report} "
            "(pass allow_overdegree=True to accept)"
        )
    return topo


def _ring(n: int) -> list[tuple[int, int]]:
    return [(k, (k + 1) % n) for k in range(n)]


def _builtin_edges() -> dict[str, tuple[int, list[tuple[int, int]], bool]]:
    chain4 = [(0, 1), (1, 2), (2, 3)]
    # S9: center of a 3x3 grid (node 4) linked to its four lattice
    # neighbors, plus one link from each corner to an edge node.
    star9 = [(1, 4), (3, 4), (4, 5), (4, 7), (0, 1), (2, 5), (8, 7), (6, 3)]
    # RS9: ring over nodes 0..7 with node 8 spoked to alternating sites.
    ringstar9 = _ring(8) + [(0, 8), (2, 8), (4, 8), (6, 8)]
    return {
        "L4": (4, chain4, False),
        "R4": (4, chain4 + [(0, 3)], False),
        "S4": (4, [(0, 1), (0, 2), (0, 3)], False),
        "F4": (4, list(combinations(range(4), 2)), False),
        "L9": (9, [(k, k + 1) for k in range(8)], False),
        "S9": (9, star9, False),
        "RS9": (9, ringstar9, False),
        "F9": (9, list(combinations(range(9), 2)), True),
        # Baseline tags: the GHZ probe is prepared directly as a state, so
        # its "topology" carries no entangling edges.
        "GHZ4": (4, [], False),
        "GHZ9": (9, [], False),
    }


BUILTIN_NAMES = tuple(_builtin_edges())


def builtin(name: str) -> Topology:
    """Look up one of the built-in sensor-network layouts by name."""
    table = _builtin_edges()
    if name not in table:
        raise ConfigurationError(
            f"unknown topology {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}"
        )
    n_qubits, edges, overdegree = table[name]
    return make_topology(name, n_qubits, edges, allow_overdegree=overdegree)


def load_topology(path: str | Path, allow_overdegree: bool = False) -> Topology:
    """Read a topology from an edge-list file (see module docstring)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read topology file {path}: {exc}") from exc

    rows: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append(line.split())

    if not rows:
        raise ConfigurationError(f"{path}: no data lines")
    header = rows[0]
    if len(header) != 2:
        raise ConfigurationError(f"{path}: header must be '<n_qubits> <n_edges>'")
    try:
        n_qubits, n_edges = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ConfigurationError(f"{path}: non-integer header {header!r}") from exc

    if len(rows) - 1 != n_edges:
        raise ConfigurationError(
            f"{path}: header promises {n_edges} edges, file has {len(rows) - 1}"
        )
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise ConfigurationError(f"{path}: malformed edge line {row!r}")
        try:
            edges.append((int(row[0]), int(row[1])))
        except ValueError as exc:
            raise ConfigurationError(f"{path}: non-integer edge {row!r}") from exc

    return make_topology(path.stem, n_qubits, edges, allow_overdegree=allow_overdegree)
