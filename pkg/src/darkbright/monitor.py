"""Stroboscopic monitoring: unitary steps of length tau interleaved with
projective detection attempts on ``d``.

The primary recursion tracks the unnormalized survival vector

    v_0 = psi_in,  w_n = U v_{n-1},  phi_n = <d|w_n>,  v_n = (1 - D) w_n,

so ``|v_n|^2 = 1 - sum_{m<=n} |phi_m|^2`` and ``phi_n`` is the first-detection
amplitude of attempt ``n``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ValidationError
from .graphs import as_matrix, as_vector
from .spectral import ResonanceReport, Spectrum, check_resonant_tau, eigendecompose, unitary_from_spectrum
from .subspaces import exact_pdet

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_N_CAP = 10**6
GENERIC_TAU_PERTURBATION = 1.0 / 997


def propagator(h, tau: float, spec: Spectrum | None = None) -> np.ndarray:
    """``U = exp(-i H tau)`` via the eigendecomposition of ``H``."""
    if spec is None:
        spec = eigendecompose(h)
    return unitary_from_spectrum(spec, tau)


@dataclass
class MonitoringRun:
    tau: float
    n_max: int
    amplitudes: np.ndarray  # phi_1 .. phi_n
    cumulative: np.ndarray  # P(1) .. P(n)
    survival_norms: np.ndarray  # |v_1|^2 .. |v_n|^2
    raw_survival: np.ndarray  # v_n
    converged: bool = False
    tail_estimate: float = float("nan")
    resonance: ResonanceReport | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def increments(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def p_det(self) -> float:
        return float(self.cumulative[-1]) if self.cumulative.size else 0.0

    @property
    def survival_state(self) -> np.ndarray | None:
        """Normalized post-measurement state ``N (1 - D) |psi>`` after the last attempt."""
        n = np.linalg.norm(self.raw_survival)
        return None if n == 0 else self.raw_survival / n

    def bookkeeping_error(self) -> float:
        """``max_n | |v_n|^2 + P(n) - 1 |``."""
        if not self.cumulative.size:
            return 0.0
        return float(np.max(np.abs(self.survival_norms + self.cumulative - 1.0)))

    def to_csv(self) -> str:
        lines = ["n,prob,cumulative"]
        for n, (p, c) in enumerate(zip(self.increments, self.cumulative), start=1):
            lines.append(f"{n},{p:.12g},{c:.12g}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "tau": self.tau,
            "steps": self.n_max,
            "p_det_estimate": self.p_det,
            "converged": self.converged,
            "tail_estimate": self.tail_estimate,
            "bookkeeping_error": self.bookkeeping_error(),
            "resonance": None if self.resonance is None else self.resonance.to_dict(),
            "notes": list(self.notes),
        }


def _iterate(u: np.ndarray, d: np.ndarray, psi: np.ndarray) -> Iterator[tuple[complex, np.ndarray]]:
    dc = d.conj()
    v = psi.astype(complex, copy=True)
    while True:
        w = u @ v
        phi = dc @ w
        v = w - phi * d
        yield phi, v


def _setup(h, tau, d, psi_in):
    m = as_matrix(h)
    dv = as_vector(d, m.shape[0])
    psi = as_vector(psi_in, m.shape[0])
    spec = eigendecompose(m)
    return m, spec, propagator(m, tau, spec), dv, psi


def first_detection_amplitudes(h, tau: float, d, psi_in, n_max: int) -> MonitoringRun:
    """Run exactly ``n_max`` detection attempts."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    _, spec, u, dv, psi = _setup(h, tau, d, psi_in)
    phis = np.empty(n_max, dtype=complex)
    norms = np.empty(n_max)
    it = _iterate(u, dv, psi)
    v = psi
    for n in range(n_max):
        phis[n], v = next(it)
        norms[n] = np.real(v.conj() @ v)
    cum = np.cumsum(np.abs(phis) ** 2)
    res = check_resonant_tau(spec, tau) if tau > 0 else None
    return MonitoringRun(float(tau), n_max, phis, cum, norms, v, resonance=res)


def run_to_convergence(h, tau: float, d, psi_in, tol: float = DEFAULT_TOL,
                       n_cap: int = DEFAULT_N_CAP, window: int | None = None) -> MonitoringRun:
    """Extend the run until ``|phi_n|^2 < tol`` for ``window`` consecutive attempts.

    ``window`` defaults to ``4 * dim``. Hitting ``n_cap`` first returns the
    run with ``converged=False``. The tail estimate is ``window`` times the
    largest increment inside the final window.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    _, spec, u, dv, psi = _setup(h, tau, d, psi_in)
    if window is None:
        window = 4 * dv.size
    phis: list[complex] = []
    norms: list[float] = []
    quiet = 0
    converged = False
    v = psi
    for phi, v in _iterate(u, dv, psi):
        phis.append(phi)
        norms.append(float(np.real(v.conj() @ v)))
        quiet = quiet + 1 if abs(phi) ** 2 < tol else 0
        if quiet >= window:
            converged = True
            break
        if len(phis) >= n_cap:
            break
    phis_a = np.asarray(phis)
    inc = np.abs(phis_a) ** 2
    tail = float(window * inc[-window:].max(initial=0.0))
    res = check_resonant_tau(spec, tau)
    run = MonitoringRun(float(tau), len(phis), phis_a, np.cumsum(inc), np.asarray(norms), v,
                        converged, tail, res)
    if res.resonant:
        msg = (f"tau={tau:g} is resonant ({len(res.resonant_pairs)} level pairs): compare with "
               "the U-Krylov exact value, not the H-Krylov one")
        run.notes.append(msg)
        log.warning(msg)
    if not converged:
        run.notes.append(f"not converged after {n_cap} attempts")
    return run


def reference_pdet(h, tau: float, d, psi_in) -> tuple[float, str]:
    """Exact value the simulator should approach at this tau, and which construction gave it."""
    if check_resonant_tau(eigendecompose(h), tau).resonant:
        return exact_pdet(h, d, psi_in, tau=tau), "krylov-U"
    return exact_pdet(h, d, psi_in), "krylov-H"


def generic_tau(h, tau: float = 1.0) -> tuple[float, bool]:
    """``tau`` itself if non-resonant, else ``tau * (1 + 1/997)``; second item flags the change."""
    spec = eigendecompose(h)
    if not check_resonant_tau(spec, tau).resonant:
        return tau, False
    return tau * (1 + GENERIC_TAU_PERTURBATION), True


# -- trajectories -------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    """Counter-based stream for ``seed`` (an int or ``(seed, index)`` pair)."""
    if isinstance(seed, tuple):
        base, index = (int(x) for x in seed)
    else:
        base, index = int(seed), 0
    if base < 0 or index < 0 or base >= 2**64 or index >= 2**64:
        raise ValidationError(f"invalid seed {seed!r}")
    return np.random.Generator(np.random.Philox(key=(base << 64) | index))


def _yes_probabilities(u, dv, psi) -> Iterator[float]:
    """Conditional detection probability at each attempt given earlier failures."""
    surv = float(np.real(psi.conj() @ psi))
    for phi, v in _iterate(u, dv, psi):
        yield 0.0 if surv <= 0 else min(1.0, abs(phi) ** 2 / surv)
        surv = float(np.real(v.conj() @ v))


def trajectory_sample(h, tau: float, d, psi_in, rng_seed, n_cap: int = 10_000) -> int | None:
    """One measurement record: the attempt index of the first "yes", or ``None``."""
    _, _, u, dv, psi = _setup(h, tau, d, psi_in)
    rng = _rng(rng_seed)
    for n, p in enumerate(_yes_probabilities(u, dv, psi), start=1):
        if rng.random() < p:
            return n
        if n >= n_cap:
            return None


def sample_trajectories(h, tau: float, d, psi_in, n_trajectories: int, seed: int,
                        n_cap: int = 10_000, chunk: int = 64) -> np.ndarray:
    """Detection attempt for each of ``n_trajectories`` records (0 = never detected).

    Trajectory ``i`` uses stream ``(seed, i)`` and reproduces
    ``trajectory_sample(..., rng_seed=(seed, i))`` exactly.
    """
    _, _, u, dv, psi = _setup(h, tau, d, psi_in)
    probs = np.fromiter(_yes_probabilities(u, dv, psi), dtype=float, count=n_cap)
    out = np.zeros(n_trajectories, dtype=np.int64)
    for i in range(n_trajectories):
        rng = _rng((seed, i))
        for start in range(0, n_cap, chunk):
            p = probs[start:start + chunk]
            hits = np.flatnonzero(rng.random(p.size) < p)
            if hits.size:
                out[i] = start + hits[0] + 1
                break
    return out
