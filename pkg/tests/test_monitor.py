import numpy as np
import pytest

from darkbright.errors import ValidationError
from darkbright.graphs import basis_state, uniform_state
from darkbright.monitor import (first_detection_amplitudes, generic_tau, propagator, reference_pdet,
                                run_to_convergence, sample_trajectories, trajectory_sample)
from darkbright.subspaces import exact_pdet


def test_propagator_unitary_and_matches_expm(dangling):
    from scipy.linalg import expm

    u = propagator(dangling, 0.9)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(7), atol=1e-12)
    np.testing.assert_allclose(u, expm(-0.9j * dangling.matrix), atol=1e-12)


def test_first_amplitude_is_direct_overlap(ring6):
    run = first_detection_amplitudes(ring6, 1.0, basis_state(6, 0), basis_state(6, 1), 5)
    u = propagator(ring6, 1.0)
    assert run.amplitudes[0] == pytest.approx(u[0, 1], abs=1e-14)
    assert run.n_max == 5 and run.cumulative.shape == (5,)


def test_amplitudes_against_direct_products(ring6):
    # phi_n = <d| U [(1 - D) U]^{n-1} |psi>
    u = propagator(ring6, 0.7)
    q = np.eye(6)
    q[0, 0] = 0
    psi = basis_state(6, 2).amplitudes
    run = first_detection_amplitudes(ring6, 0.7, basis_state(6, 0), psi, 8)
    for n in range(1, 9):
        expected = (u @ np.linalg.matrix_power(q @ u, n - 1) @ psi)[0]
        assert run.amplitudes[n - 1] == pytest.approx(expected, abs=1e-12)


def test_bookkeeping(dangling):
    run = first_detection_amplitudes(dangling, 1.3, basis_state(7, 0), uniform_state(7), 300)
    assert run.bookkeeping_error() <= 1e-12
    assert np.all(np.diff(run.cumulative) >= 0)


def test_convergence_dark_state_stays_undetected(line5):
    dark = np.array([1, 0, -1, 0, 1]) / np.sqrt(3)
    run = run_to_convergence(line5, 1.0, basis_state(5, 1), dark)
    assert run.converged and run.p_det < 1e-20


def test_convergence_matches_exact(dangling):
    run = run_to_convergence(dangling, 1.0, basis_state(7, 0), uniform_state(7))
    assert run.converged
    assert abs(run.p_det - 20 / 21) <= max(1e-3, run.tail_estimate)
    assert run.survival_state is not None
    # the surviving state is dark
    assert abs(run.survival_state[0]) < 1e-6


def test_resonant_tau_uses_u_krylov(ring6):
    d, psi = basis_state(6, 0), basis_state(6, 1)
    run = run_to_convergence(ring6, 2 * np.pi, d, psi)
    assert run.resonance.resonant and run.notes
    ref, which = reference_pdet(ring6, 2 * np.pi, d, psi)
    assert which == "krylov-U" and ref == pytest.approx(run.p_det, abs=1e-9)
    ref, which = reference_pdet(ring6, 1.0, d, psi)
    assert which == "krylov-H" and ref == pytest.approx(0.5)


def test_generic_tau(ring6):
    assert generic_tau(ring6, 1.0) == (1.0, False)
    tau, changed = generic_tau(ring6, 2 * np.pi)
    assert changed and tau != 2 * np.pi


def test_csv_and_summary(ring6):
    run = first_detection_amplitudes(ring6, 1.0, basis_state(6, 0), basis_state(6, 3), 4)
    lines = run.to_csv().splitlines()
    assert lines[0] == "n,prob,cumulative" and len(lines) == 5
    assert run.summary()["steps"] == 4


def test_validation(ring6):
    with pytest.raises(ValidationError):
        first_detection_amplitudes(ring6, 1.0, basis_state(6, 0), basis_state(6, 1), 0)
    with pytest.raises(ValidationError):
        run_to_convergence(ring6, 1.0, basis_state(6, 0), basis_state(6, 1), tol=0)


def test_trajectory_reproducible(ring6):
    d, psi = basis_state(6, 0), basis_state(6, 1)
    a = [trajectory_sample(ring6, 1.0, d, psi, (7, i)) for i in range(40)]
    b = [trajectory_sample(ring6, 1.0, d, psi, (7, i)) for i in range(40)]
    assert a == b
    batch = sample_trajectories(ring6, 1.0, d, psi, 40, seed=7)
    assert [x or 0 for x in a] == batch.tolist()


def test_trajectory_first_attempt_distribution(ring6):
    d, psi = basis_state(6, 0), basis_state(6, 1)
    counts = sample_trajectories(ring6, 1.0, d, psi, 20000, seed=3, n_cap=200)
    run = first_detection_amplitudes(ring6, 1.0, d, psi, 3)
    for n in (1, 2, 3):
        freq = np.mean(counts == n)
        p = run.increments[n - 1]
        assert abs(freq - p) <= 5 * np.sqrt(p * (1 - p) / counts.size) + 1e-3


def test_seed_validation(ring6):
    with pytest.raises(ValidationError):
        trajectory_sample(ring6, 1.0, basis_state(6, 0), basis_state(6, 1), -1)


def test_exact_pdet_tau_independent_off_resonance(dangling):
    d, psi = basis_state(7, 0), uniform_state(7)
    for tau in (0.7, 1.0, 1.3):
        assert exact_pdet(dangling, d, psi, tau=tau) == pytest.approx(exact_pdet(dangling, d, psi), abs=1e-9)
