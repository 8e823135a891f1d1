"""Monte Carlo detection records versus the deterministic first-detection statistics."""

import argparse

import numpy as np

from darkbright.graphs import basis_state, build_ring, hamiltonian_from_graph
from darkbright.monitor import run_to_convergence, sample_trajectories


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--tau", type=float, default=1.0)
    args = ap.parse_args()

    h = hamiltonian_from_graph(build_ring(6))
    d, psi = basis_state(6, 0), basis_state(6, 1)
    run = run_to_convergence(h, args.tau, d, psi)
    times = sample_trajectories(h, args.tau, d, psi, args.n, args.seed, n_cap=run.n_max)
    print(f"detected fraction {np.mean(times > 0):.5f}   exact {run.p_det:.5f}")
    print("n,empirical,predicted")
    for n in range(1, 11):
        print(f"{n},{np.mean(times == n):.5f},{run.increments[n - 1]:.5f}")


if __name__ == "__main__":
    main()
