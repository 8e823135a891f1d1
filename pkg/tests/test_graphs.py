import json

import numpy as np
import pytest

from darkbright.errors import DimensionError, ValidationError
from darkbright.graphs import (Graph, Hamiltonian, StateVector, basis_state, build_dangling_bond,
                               build_line, build_ring, graph_from_dict, graph_to_dict,
                               hamiltonian_from_graph, load_graph, node_index, uniform_state)

LINE5_MATRIX = np.array([
    [0, 1, 0, 0, 0],
    [1, 0, 1, 0, 0],
    [0, 1, 0, 1, 0],
    [0, 0, 1, 0, 1],
    [0, 0, 0, 1, 0],
])

DANGLING_MATRIX = np.array([
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 1],
    [0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
])


def test_line5_matches_printed_matrix():
    h = hamiltonian_from_graph(build_line(5), gamma=1.0)
    np.testing.assert_array_equal(h.matrix, LINE5_MATRIX)


def test_line_small_cases():
    h1 = hamiltonian_from_graph(build_line(1))
    assert h1.matrix.shape == (1, 1) and h1.matrix[0, 0] == 0
    assert list(build_line(3).degrees()) == [1, 2, 1]
    with pytest.raises(ValidationError):
        build_line(0)


@pytest.mark.parametrize("L", [1, 2, 5, 9])
def test_line_nonzero_count(L):
    m = hamiltonian_from_graph(build_line(L)).matrix
    assert np.all(np.diag(m) == 0)
    assert np.count_nonzero(m) == 2 * (L - 1)


def test_ring():
    g = build_ring(6)
    ring_matrix = np.zeros((6, 6))
    for i in range(6):
        ring_matrix[i, (i + 1) % 6] = ring_matrix[i, (i - 1) % 6] = 1
    np.testing.assert_array_equal(hamiltonian_from_graph(g).matrix, ring_matrix)
    assert set(g.degrees()) == {2}
    g3 = build_ring(3)
    assert len(g3.edges) == 3 and set(g3.degrees()) == {2}
    with pytest.raises(ValidationError):
        build_ring(2)


def test_dangling_bond():
    g = build_dangling_bond()
    np.testing.assert_array_equal(hamiltonian_from_graph(g).matrix, DANGLING_MATRIX)
    deg = g.degrees()
    assert deg[6] == 1 and deg[2] == 3
    assert g.remove_node(6).edges == build_line(6).edges


def test_gamma_and_onsite():
    g = build_ring(6)
    onsite = np.arange(6.0)
    h0 = hamiltonian_from_graph(g, gamma=0.0, onsite=onsite)
    np.testing.assert_array_equal(h0.matrix, np.diag(onsite))
    h1 = hamiltonian_from_graph(g, 1.0)
    h2 = hamiltonian_from_graph(g, 2.0)
    np.testing.assert_array_equal(h2.matrix, 2 * h1.matrix)
    with pytest.raises(DimensionError):
        hamiltonian_from_graph(g, 1.0, onsite=[0.0] * 5)


def test_hamiltonian_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        Hamiltonian(np.array([[0, 1], [0, 0]]))


def test_states():
    u = uniform_state(5)
    b = basis_state(5, 1)
    assert abs(np.vdot(b.amplitudes, u.amplitudes)) ** 2 == pytest.approx(1 / 5, abs=1e-15)
    assert np.linalg.norm(basis_state(5, 0).amplitudes) == 1
    np.testing.assert_allclose(uniform_state(7).amplitudes, np.ones(7) / np.sqrt(7))
    with pytest.raises(ValidationError):
        basis_state(5, 5)
    with pytest.raises(ValidationError):
        StateVector(np.array([1.0, 1.0]))
    assert StateVector.from_raw([3, 4]).amplitudes[1] == pytest.approx(0.8)


def test_states_are_immutable():
    u = uniform_state(3)
    with pytest.raises(ValueError):
        u.amplitudes[0] = 0


def test_labels():
    assert node_index(build_line(5), "1") == 0
    assert node_index(build_line(5), 5) == 4
    assert node_index(build_ring(6), "0") == 0
    with pytest.raises(ValidationError):
        node_index(build_line(5), "0")


def test_graph_validation():
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 3)])


def test_json_roundtrip(tmp_path):
    g = build_dangling_bond()
    data = graph_to_dict(g, gamma=0.5, onsite=[0.1] * 7)
    p = tmp_path / "g.json"
    p.write_text(json.dumps(data))
    g2, gamma, onsite = load_graph(p)
    assert g2.edges == g.edges and gamma == 0.5
    np.testing.assert_allclose(onsite, 0.1)


@pytest.mark.parametrize("bad", [
    {"nodes": 3, "edges": [[0, 0]]},
    {"nodes": 3, "edges": [[0, 1], [1, 0]]},
    {"nodes": 3, "edges": [[0, 1]], "onsite": [0, 0]},
    {"edges": [[0, 1]]},
])
def test_json_loader_rejects(bad):
    with pytest.raises(ValidationError):
        graph_from_dict(bad)
