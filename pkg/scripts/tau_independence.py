"""Simulated P_det across a tau grid for the desk systems.

Away from resonances the converged value should not depend on tau. At a
resonant tau the measured value drops to the U-Krylov prediction instead.
"""

import argparse
import logging

import numpy as np

from darkbright.monitor import reference_pdet, run_to_convergence
from darkbright.subspaces import exact_pdet
from darkbright.systems import desk_systems


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--taus", type=float, nargs="+",
                    default=[0.3, 0.7, 1.0, 1.3, 2.0, np.pi, 2 * np.pi])
    args = ap.parse_args()
    # resonances show up in the reference_kind column
    logging.getLogger("darkbright").setLevel(logging.ERROR)

    print("system,initial,tau,simulated,reference,reference_kind,tau_free_exact,steps")
    for sys_ in desk_systems():
        for label, psi in sys_.initial_states():
            tau_free = exact_pdet(sys_.hamiltonian, sys_.d, psi)
            for tau in args.taus:
                run = run_to_convergence(sys_.hamiltonian, tau, sys_.d, psi)
                ref, kind = reference_pdet(sys_.hamiltonian, tau, sys_.d, psi)
                print(f"{sys_.name},{label},{tau:.6g},{run.p_det:.9f},{ref:.9f},{kind},"
                      f"{tau_free:.9f},{run.n_max}")


if __name__ == "__main__":
    main()
