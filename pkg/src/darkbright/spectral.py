"""Eigendecomposition, degenerate levels, resonant sampling times and the
stationary (level-projector) construction of dark and bright subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import SubspaceBasis, canonical_phase
from .errors import ValidationError
from .graphs import as_matrix, as_vector

DEGENERACY_REL_TOL = 1e-8
RESONANCE_TOL = 1e-8
PROJECTION_CUTOFF = 1e-10


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns
    levels: tuple[tuple[int, ...], ...]
    tol: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def level_energies(self) -> np.ndarray:
        return np.array([self.eigenvalues[list(g)].mean() for g in self.levels])

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def level_vectors(self, j: int) -> np.ndarray:
        return self.eigenvectors[:, list(self.levels[j])]

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "levels": [{"energy": float(e), "multiplicity": len(g)}
                       for e, g in zip(self.level_energies, self.levels)],
            "degeneracy_tol": self.tol,
        }


def default_degeneracy_tol(eigenvalues) -> float:
    return DEGENERACY_REL_TOL * max(1.0, float(np.max(np.abs(eigenvalues), initial=0.0)))


def group_levels(spec_or_values, tol: float | None = None) -> tuple[tuple[int, ...], ...]:
    """Partition ascending eigenvalue indices into degenerate groups.

    Consecutive eigenvalues closer than ``tol`` share a level (single-linkage
    on the sorted list), so the grouping is deterministic.
    """
    values = spec_or_values.eigenvalues if isinstance(spec_or_values, Spectrum) else np.asarray(spec_or_values)
    if tol is None:
        tol = default_degeneracy_tol(values)
    if tol <= 0:
        raise ValidationError("degeneracy tolerance must be positive")
    if values.size == 0:
        return ()
    groups: list[list[int]] = [[0]]
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    return tuple(tuple(g) for g in groups)


def eigendecompose(h, tol: float | None = None) -> Spectrum:
    m = as_matrix(h)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if not np.allclose(m, m.conj().T, rtol=0, atol=1e-12 * scale):
        raise ValidationError("cannot diagonalize a non-Hermitian matrix")
    w, v = np.linalg.eigh(m)
    if tol is None:
        tol = default_degeneracy_tol(w)
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(w, v, group_levels(w, tol), tol)


def unitary_from_spectrum(spec: Spectrum, tau: float) -> np.ndarray:
    """``exp(-i H tau)`` assembled from the eigendecomposition."""
    v = spec.eigenvectors
    return (v * np.exp(-1j * spec.eigenvalues * tau)) @ v.conj().T


@dataclass(frozen=True)
class ResonantPair:
    level_a: int
    level_b: int
    energy_gap: float
    k: int
    residual: float  # (gap * tau - 2 pi k), folded into [-pi, pi]


@dataclass(frozen=True)
class ResonanceReport:
    tau: float
    tol: float
    resonant_pairs: tuple[ResonantPair, ...] = field(default_factory=tuple)

    @property
    def resonant(self) -> bool:
        return bool(self.resonant_pairs)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "tol": self.tol,
            "resonant": self.resonant,
            "pairs": [{"levels": [p.level_a, p.level_b], "gap": p.energy_gap, "k": p.k,
                       "residual": p.residual} for p in self.resonant_pairs],
        }


def check_resonant_tau(spec: Spectrum, tau: float, tol: float = RESONANCE_TOL) -> ResonanceReport:
    """List distinct-level pairs whose phase difference ``gap * tau`` is a multiple of 2 pi."""
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    energies = spec.level_energies
    pairs = []
    for a in range(energies.size):
        for b in range(a + 1, energies.size):
            gap = float(energies[b] - energies[a])
            x = gap * tau
            k = int(np.round(x / (2 * np.pi)))
            resid = x - 2 * np.pi * k
            if abs(resid) <= tol:
                pairs.append(ResonantPair(a, b, gap, k, float(resid)))
    return ResonanceReport(float(tau), tol, tuple(pairs))


def stationary_subspaces(spec: Spectrum, d, cutoff: float = PROJECTION_CUTOFF
                         ) -> tuple[SubspaceBasis, SubspaceBasis]:
    """Split every energy level into at most one bright direction and a dark rest.

    For level projector ``P_j``: if ``P_j d`` is non-negligible its normalized
    form is bright and the rest of the level is dark; otherwise the whole
    level is dark.
    """
    dv = as_vector(d, spec.dim)
    bright, dark = [], []
    for j in range(len(spec.levels)):
        vj = spec.level_vectors(j)
        coeff = vj.conj().T @ dv
        norm = np.linalg.norm(coeff)
        if norm > cutoff:
            bright.append(canonical_phase(vj @ (coeff / norm)))
            if vj.shape[1] > 1:
                comp = scipy.linalg.null_space(coeff.conj()[None, :])
                dark.extend(canonical_phase(x) for x in (vj @ comp).T)
        else:
            dark.extend(canonical_phase(x) for x in vj.T)

    def stack(cols):
        return np.column_stack(cols) if cols else np.zeros((spec.dim, 0), dtype=complex)

    return (SubspaceBasis("bright", stack(bright), "spectral"),
            SubspaceBasis("dark", stack(dark), "spectral"))
