import numpy as np
import pytest

import oracles
from darkbright.errors import ValidationError
from darkbright.graphs import basis_state
from darkbright.spectral import check_resonant_tau, eigendecompose, group_levels, stationary_subspaces
from darkbright.subspaces import krylov_bright_basis
from darkbright.systems import desk_systems

RING6_SPECTRUM = [float(x) for x in oracles.eigenvalues(oracles.RING6)]  # [-2, -1, -1, 1, 1, 2]


def test_ring_spectrum(ring6):
    spec = eigendecompose(ring6)
    np.testing.assert_allclose(spec.eigenvalues, RING6_SPECTRUM, atol=1e-12)
    assert [len(g) for g in spec.levels] == [1, 2, 2, 1]


def test_line_levels_simple(line5):
    spec = eigendecompose(line5)
    exact = [float(x) for x in oracles.eigenvalues(oracles.LINE5)]
    np.testing.assert_allclose(spec.eigenvalues, exact, atol=1e-12)
    assert len(spec.levels) == 5


def test_diagonal_and_degenerate():
    onsite = np.array([3.0, -1.0, 2.0])
    spec = eigendecompose(np.diag(onsite))
    np.testing.assert_allclose(spec.eigenvalues, np.sort(onsite))
    spec = eigendecompose(np.diag([0.5, 0.5, 0.5, 0.5]))
    assert spec.levels == ((0, 1, 2, 3),)


def test_reconstruction(dangling):
    spec = eigendecompose(dangling)
    err = np.max(np.abs(spec.reconstruct() - dangling.matrix))
    assert err <= 1e-10 * max(1, np.max(np.abs(dangling.matrix)))


def test_dangling_zero_mode(dangling):
    v = np.array([0, 0, 0, -1, 0, 1, 1]) / np.sqrt(3)
    np.testing.assert_allclose(dangling.matrix @ v, 0, atol=1e-14)
    spec = eigendecompose(dangling)
    assert np.min(np.abs(spec.eigenvalues)) < 1e-12


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError):
        eigendecompose(np.array([[0, 1], [2, 0]]))


def test_group_levels_tolerance():
    vals = np.array([0.0, 1e-9, 1.0, 1.0 + 5e-9, 2.0])
    assert group_levels(vals, 1e-8) == ((0, 1), (2, 3), (4,))
    assert group_levels(vals, 1e-10) == ((0,), (1,), (2,), (3,), (4,))
    with pytest.raises(ValidationError):
        group_levels(vals, 0)


def test_resonance(ring6):
    spec = eigendecompose(ring6)
    rep = check_resonant_tau(spec, 2 * np.pi)
    # every gap in {1, 2, 3, 4} is an integer, so all 6 level pairs resonate
    assert rep.resonant and len(rep.resonant_pairs) == 6
    assert not check_resonant_tau(spec, 1.0).resonant
    with pytest.raises(ValidationError):
        check_resonant_tau(spec, 0.0)


def test_resonance_doubling(ring6):
    spec = eigendecompose(ring6)
    tau = np.pi  # gaps 2 and 4 resonate with k = 1, 2
    r1 = check_resonant_tau(spec, tau)
    r2 = check_resonant_tau(spec, 2 * tau)
    pairs2 = {(p.level_a, p.level_b): p.k for p in r2.resonant_pairs}
    assert r1.resonant
    for p in r1.resonant_pairs:
        assert pairs2[(p.level_a, p.level_b)] == 2 * p.k


def test_stationary_line5_detector2(line5):
    bright, dark = stationary_subspaces(eigendecompose(line5), basis_state(5, 1))
    assert dark.rank == 1
    np.testing.assert_allclose(dark.vectors[:, 0], np.array([1, 0, -1, 0, 1]) / np.sqrt(3), atol=1e-12)


def test_stationary_line5_detector1(line5):
    _, dark = stationary_subspaces(eigendecompose(line5), basis_state(5, 0))
    assert dark.rank == 0


def test_stationary_ring(ring6):
    bright, dark = stationary_subspaces(eigendecompose(ring6), basis_state(6, 0))
    assert dark.rank == 2
    expected = np.zeros((6, 2))
    expected[[1, 5], 0] = [1, -1]
    expected[[2, 4], 1] = [1, -1]
    expected /= np.sqrt(2)
    pe = expected @ expected.T
    np.testing.assert_allclose(dark.projector, pe, atol=1e-12)


@pytest.mark.parametrize("system", desk_systems(), ids=lambda s: s.name)
def test_stationary_invariants(system):
    h = system.hamiltonian.matrix
    spec = eigendecompose(h)
    bright, dark = stationary_subspaces(spec, system.d)
    assert bright.rank + dark.rank == system.dim
    assert np.max(np.abs(dark.vectors.conj().T @ bright.vectors), initial=0) <= 1e-10
    pd, pb = dark.projector, bright.projector
    eye = np.eye(system.dim)
    assert np.linalg.norm((eye - pd) @ h @ pd) <= 1e-10
    assert np.linalg.norm((eye - pb) @ h @ pb) <= 1e-10
    krylov = krylov_bright_basis(h, system.d)
    assert np.max(np.abs(pb - krylov.projector)) <= 1e-9
    # dark vectors never reach the detector
    dv = system.d.amplitudes
    for tau in (0.37, 0.81, 1.13, 1.71, 2.39):
        u = (spec.eigenvectors * np.exp(-1j * spec.eigenvalues * tau)) @ spec.eigenvectors.conj().T
        for delta in dark:
            x = delta.copy()
            for _ in range(3 * system.dim + 1):
                assert abs(dv.conj() @ x) <= 1e-10
                x = u @ x


def test_stationary_degenerate_level_fully_dark():
    # detector on node 0 of a star with two leaves attached to node 1: leaves' antisymmetric mode is dark
    h = np.zeros((4, 4))
    for i, j in [(0, 1), (1, 2), (1, 3)]:
        h[i, j] = h[j, i] = 1
    _, dark = stationary_subspaces(eigendecompose(h), basis_state(4, 0))
    assert dark.rank == 1
    np.testing.assert_allclose(np.abs(dark.vectors[:, 0]), [0, 0, 1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)
