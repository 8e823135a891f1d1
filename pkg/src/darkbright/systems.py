"""Named systems, scenarios and the small set of "desk" systems used for
regression checks."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graphs import (Graph, Hamiltonian, StateVector, basis_state, build_dangling_bond, build_line,
                     build_ring, hamiltonian_from_graph, load_graph, node_index, uniform_state)


def build_system(name: str, gamma: float = 1.0) -> tuple[Graph, Hamiltonian]:
    """Resolve ``line:L``, ``ring:L``, ``dangling`` or a JSON graph file path."""
    name = name.strip()
    kind, _, arg = name.partition(":")
    try:
        if kind == "line":
            g = build_line(int(arg))
        elif kind == "ring":
            g = build_ring(int(arg))
        elif kind == "dangling":
            g = build_dangling_bond()
        elif os.path.exists(name):
            g, file_gamma, onsite = load_graph(name)
            return g, hamiltonian_from_graph(g, file_gamma * gamma, onsite)
        else:
            raise ValidationError(f"unknown system {name!r} (use line:L, ring:L, dangling or a JSON file)")
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad system size in {name!r}") from None
    return g, hamiltonian_from_graph(g, gamma)


def parse_state(g: Graph, text: str) -> StateVector:
    """A node label, ``uniform``, or ``vec:a,b,...`` (Python complex literals, normalized on load)."""
    text = str(text).strip()
    if text == "uniform":
        return uniform_state(g.node_count)
    if text.startswith("vec:"):
        try:
            amps = [complex(x.replace(" ", "")) for x in text[4:].split(",")]
        except ValueError:
            raise ValidationError(f"cannot parse amplitudes in {text!r}") from None
        if len(amps) != g.node_count:
            raise ValidationError(f"{len(amps)} amplitudes for {g.node_count} nodes")
        return StateVector.from_raw(amps)
    return basis_state(g.node_count, node_index(g, text))


@dataclass(frozen=True)
class Scenario:
    system: str
    detector: str
    initial: str = "uniform"
    tau: float = 1.0
    s_max: int | None = None
    gamma: float = 1.0
    tolerances: dict = field(default_factory=dict)

    def resolve(self) -> tuple[Graph, Hamiltonian, StateVector, StateVector]:
        g, h = build_system(self.system, self.gamma)
        return g, h, parse_state(g, self.detector), parse_state(g, self.initial)


@dataclass(frozen=True)
class DeskSystem:
    name: str
    graph: Graph
    hamiltonian: Hamiltonian
    detector: int  # internal index

    @property
    def dim(self) -> int:
        return self.graph.node_count

    @property
    def d(self) -> StateVector:
        return basis_state(self.dim, self.detector)

    def initial_states(self) -> list[tuple[str, StateVector]]:
        """Every localized state plus the uniform one, keyed by display label."""
        out = [(lab, basis_state(self.dim, i)) for i, lab in enumerate(self.graph.node_labels)]
        out.append(("uniform", uniform_state(self.dim)))
        return out


def desk_systems() -> list[DeskSystem]:
    """Line of five measured at nodes 1, 2, 3; hexagonal ring at 0; dangling bond at 0."""
    out = []
    line = build_line(5)
    for lab in ("1", "2", "3"):
        out.append(DeskSystem(f"line:5@{lab}", line, hamiltonian_from_graph(line), node_index(line, lab)))
    ring = build_ring(6)
    out.append(DeskSystem("ring:6@0", ring, hamiltonian_from_graph(ring), 0))
    dang = build_dangling_bond()
    out.append(DeskSystem("dangling@0", dang, hamiltonian_from_graph(dang), 0))
    return out


def random_graph(rng: np.random.Generator, n_min: int = 2, n_max: int = 12, p: float | None = None
                 ) -> Graph:
    """Erdos-Renyi style graph; symmetric leaf attachments are common enough to create dark states."""
    n = int(rng.integers(n_min, n_max + 1))
    if p is None:
        p = float(rng.uniform(0.15, 0.6))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)
