"""Graphs, tight-binding Hamiltonians and state vectors.

Nodes are 0-indexed internally. Each named family carries its own display
labels: the finite line is labelled ``1..L`` while the ring and the dangling
bond graph are labelled ``0..N-1``. :func:`node_index` translates a label
back into an index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ValidationError

HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph. Edges are stored as sorted pairs ``(i, j)``, ``i < j``."""

    node_count: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[str, ...] | None = None
    family: str = "custom"

    def __post_init__(self):
        if self.node_count < 1:
            raise ValidationError(f"node_count must be positive, got {self.node_count}")
        for i, j in self.edges:
            if i == j:
                raise ValidationError(f"self-loop at node {i}")
            if not (0 <= i < j < self.node_count):
                raise ValidationError(f"edge {(i, j)} not a sorted in-range pair")
        if self.labels is not None and len(self.labels) != self.node_count:
            raise DimensionError("labels length differs from node_count")
        if self.labels is not None and len(set(self.labels)) != self.node_count:
            raise ValidationError("node labels must be unique")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Sequence[int]],
                   labels: Sequence[str] | None = None, family: str = "custom") -> "Graph":
        """Build a graph from an edge list, rejecting self-loops and duplicates."""
        seen: set[tuple[int, int]] = set()
        for e in edges:
            i, j = (int(x) for x in e)
            if i == j:
                raise ValidationError(f"self-loop at node {i}")
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise ValidationError(f"edge {(i, j)} out of range for {node_count} nodes")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
        return cls(node_count, frozenset(seen),
                   tuple(str(x) for x in labels) if labels is not None else None, family)

    @property
    def node_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(str(i) for i in range(self.node_count))

    def adjacency(self) -> np.ndarray:
        """Integer (int64) adjacency matrix."""
        a = np.zeros((self.node_count, self.node_count), dtype=np.int64)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def neighbors(self, i: int) -> list[int]:
        return sorted([b for a, b in self.edges if a == i] + [a for a, b in self.edges if b == i])

    def remove_node(self, k: int) -> "Graph":
        """Graph with node ``k`` deleted and the remaining nodes renumbered."""
        keep = [i for i in range(self.node_count) if i != k]
        new = {old: n for n, old in enumerate(keep)}
        edges = [(new[i], new[j]) for i, j in self.edges if k not in (i, j)]
        labels = [self.node_labels[i] for i in keep] if self.labels is not None else None
        return Graph.from_edges(len(keep), edges, labels)


@dataclass(frozen=True)
class Hamiltonian:
    """Dense Hermitian matrix with the hopping scale and on-site energies it was built from."""

    matrix: np.ndarray
    gamma: float = 1.0
    onsite: np.ndarray | None = None
    graph: Graph | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"Hamiltonian must be square and non-empty, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0, atol=HERMITIAN_ATOL):
            raise ValidationError("Hamiltonian is not Hermitian")
        onsite = np.zeros(m.shape[0]) if self.onsite is None else np.asarray(self.onsite, float)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "onsite", _frozen(onsite))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def scaled(self, c: float) -> "Hamiltonian":
        return Hamiltonian(c * self.matrix, c * self.gamma, c * self.onsite, self.graph)

    def shifted(self, c: float) -> "Hamiltonian":
        """``H + c*1`` (a global energy shift)."""
        return Hamiltonian(self.matrix + c * np.eye(self.dim), self.gamma, self.onsite + c, self.graph)


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitude vector. Use :meth:`from_raw` to normalize."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if a.size == 0:
            raise DimensionError("empty state vector")
        if abs(np.linalg.norm(a) - 1.0) > NORM_ATOL:
            raise ValidationError(f"state vector not normalized (norm={np.linalg.norm(a)!r})")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @classmethod
    def from_raw(cls, v) -> "StateVector":
        v = np.asarray(v, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


def as_matrix(h) -> np.ndarray:
    """Complex matrix view of a :class:`Hamiltonian` or array-like."""
    if isinstance(h, Hamiltonian):
        return h.matrix
    m = np.asarray(h, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def as_vector(v, dim: int | None = None, normalized: bool = True, atol: float = 1e-10) -> np.ndarray:
    """Complex 1-D view of a :class:`StateVector` or array-like, with optional checks."""
    a = v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=complex).ravel()
    if dim is not None and a.size != dim:
        raise DimensionError(f"vector of length {a.size} does not match dimension {dim}")
    if normalized and abs(np.linalg.norm(a) - 1.0) > atol:
        raise ValidationError(f"state vector not normalized (norm={np.linalg.norm(a)!r})")
    return a


# -- named families ---------------------------------------------------------

def build_line(L: int) -> Graph:
    """Path graph with ``L`` nodes, labelled ``1..L``."""
    if L < 1:
        raise ValidationError(f"line needs L >= 1, got {L}")
    return Graph.from_edges(L, [(i, i + 1) for i in range(L - 1)],
                            labels=[str(i + 1) for i in range(L)], family=f"line:{L}")


def build_ring(L: int) -> Graph:
    """Cycle graph with ``L >= 3`` nodes, labelled ``0..L-1``."""
    if L < 3:
        raise ValidationError(f"ring needs L >= 3, got {L}")
    return Graph.from_edges(L, [(i, (i + 1) % L) for i in range(L)], family=f"ring:{L}")


def build_dangling_bond() -> Graph:
    """Six-node backbone ``0-1-2-3-4-5`` with one extra node ``6`` hanging off node 2."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)]
    return Graph.from_edges(7, edges, family="dangling")


def hamiltonian_from_graph(g: Graph, gamma: float = 1.0, onsite=None) -> Hamiltonian:
    """``H = gamma * A + diag(onsite)``."""
    if onsite is None:
        onsite = np.zeros(g.node_count)
    onsite = np.asarray(onsite, dtype=float).ravel()
    if onsite.size != g.node_count:
        raise DimensionError(f"onsite has {onsite.size} entries, graph has {g.node_count} nodes")
    m = gamma * g.adjacency().astype(complex) + np.diag(onsite).astype(complex)
    return Hamiltonian(m, float(gamma), onsite, g)


def basis_state(dim: int, index: int) -> StateVector:
    if not 0 <= index < dim:
        raise ValidationError(f"index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return StateVector(v)


def uniform_state(dim: int) -> StateVector:
    if dim < 1:
        raise ValidationError("dimension must be positive")
    return StateVector(np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


def node_index(g: Graph, label) -> int:
    """Internal index of the node with display label ``label``."""
    key = str(label).strip()
    try:
        return g.node_labels.index(key)
    except ValueError:
        raise ValidationError(f"unknown node label {label!r} for {g.family} "
                              f"(valid: {', '.join(g.node_labels)})") from None


# -- JSON graph files -------------------------------------------------------

def graph_from_dict(data: dict) -> tuple[Graph, float, np.ndarray]:
    """Parse ``{"nodes", "edges", "gamma", "onsite", "labels"}``; returns graph, gamma, onsite."""
    try:
        n = int(data["nodes"])
        edges = data.get("edges", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed graph description: {exc}") from None
    if any(len(e) != 2 for e in edges):
        raise ValidationError("every edge must be a pair [i, j]")
    g = Graph.from_edges(n, edges, labels=data.get("labels"), family="file")
    gamma = float(data.get("gamma", 1.0))
    onsite = np.asarray(data.get("onsite", [0.0] * n), dtype=float)
    if onsite.size != n:
        raise DimensionError(f"onsite has {onsite.size} entries, graph has {n} nodes")
    return g, gamma, onsite


def load_graph(path: str | PathLike) -> tuple[Graph, float, np.ndarray]:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def graph_to_dict(g: Graph, gamma: float = 1.0, onsite=None) -> dict:
    out = {
        "nodes": g.node_count,
        "edges": [list(e) for e in sorted(g.edges)],
        "gamma": gamma,
        "onsite": [float(x) for x in (onsite if onsite is not None else np.zeros(g.node_count))],
    }
    if g.labels is not None:
        out["labels"] = list(g.labels)
    return out
