"""Krylov construction of the bright subspace, its dark complement and the
exact total detection probability."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np
import scipy.linalg

from .basis import SubspaceBasis, canonical_phase
from .errors import DimensionError, PreconditionError, ValidationError
from .graphs import as_matrix, as_vector
from .spectral import eigendecompose, unitary_from_spectrum

RANK_TOL = 1e-10
CONSISTENCY_MARGIN = 1e-10


def gram_schmidt(vectors: Iterable, rank_tol: float = RANK_TOL, against: np.ndarray | None = None
                 ) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A candidate is dropped when its residual norm is at most ``rank_tol``
    times its original norm. Returns the accepted vectors as the columns of a
    ``(dim, rank)`` array; vectors in ``against`` (columns, orthonormal) are
    projected out but not returned.
    """
    if rank_tol <= 0:
        raise ValidationError("rank_tol must be positive")
    vectors = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vectors:
        dim = against.shape[0] if against is not None else 0
        return np.zeros((dim, 0), dtype=complex)
    dim = vectors[0].size
    basis = [] if against is None else list(np.asarray(against).T)
    n_fixed = len(basis)
    for v in vectors:
        if v.size != dim:
            raise DimensionError("vectors of unequal length")
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            continue
        r = v.copy()
        for _ in range(2):
            for q in basis:
                r -= (q.conj() @ r) * q
        nr = np.linalg.norm(r)
        if nr <= rank_tol * norm0:
            continue
        basis.append(r / nr)
    out = basis[n_fixed:]
    return np.column_stack(out) if out else np.zeros((dim, 0), dtype=complex)


def krylov_bright_basis(h, d, mode: Literal["H", "U"] = "H", tau: float | None = None,
                        rank_tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of ``Span{d, M d, M^2 d, ...}`` with ``M = H`` or ``M = exp(-i H tau)``.

    Built Arnoldi-style (each new candidate is ``M`` applied to the latest
    basis vector), which spans the same space as the raw powers but stays
    well conditioned. Stops at the first candidate that adds no new direction.
    """
    m = as_matrix(h)
    dim = m.shape[0]
    dv = as_vector(d, dim)
    if mode == "U":
        if tau is None or tau <= 0:
            raise ValidationError("U-mode Krylov construction needs tau > 0")
        m = unitary_from_spectrum(eigendecompose(m), tau)
        construction = "krylov-U"
    elif mode == "H":
        construction = "krylov-H"
    else:
        raise ValidationError(f"unknown Krylov mode {mode!r}")

    q = [dv / np.linalg.norm(dv)]
    for _ in range(dim - 1):
        w = m @ q[-1]
        norm0 = np.linalg.norm(w)
        if norm0 == 0:
            break
        r = w.copy()
        for _ in range(2):
            for b in q:
                r -= (b.conj() @ r) * b
        nr = np.linalg.norm(r)
        if nr <= rank_tol * norm0:
            break
        q.append(r / nr)
    vecs = np.column_stack([canonical_phase(x) for x in q])
    return SubspaceBasis("bright", vecs, construction, tau if mode == "U" else None)


def dark_complement(bright: SubspaceBasis, rank_tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement of ``bright``."""
    b = bright.vectors
    if b.shape[1] == 0:
        vecs = np.eye(b.shape[0], dtype=complex)
    else:
        vecs = scipy.linalg.null_space(b.conj().T, rcond=rank_tol)
        vecs = np.column_stack([canonical_phase(x) for x in vecs.T]) if vecs.shape[1] else vecs
    kind = "dark" if bright.kind == "bright" else "bright"
    return SubspaceBasis(kind, vecs.astype(complex), bright.construction, bright.tau)


@dataclass(frozen=True)
class DetectionResult:
    p_det: float
    method: Literal["bright-sum", "dark-complement"]
    basis_used: SubspaceBasis
    raw: float

    def to_dict(self) -> dict:
        return {"p_det": self.p_det, "method": self.method, "raw": self.raw,
                "construction": self.basis_used.construction, "basis_rank": self.basis_used.rank}


def detection_probability_exact(basis: SubspaceBasis, psi_in) -> DetectionResult:
    """Total detection probability from a complete bright or dark basis.

    Bright basis: sum of squared overlaps. Dark basis: one minus that sum.
    """
    psi = as_vector(psi_in)
    if psi.size != basis.dim:
        raise DimensionError(f"state of length {psi.size} vs basis dimension {basis.dim}")
    w = basis.weight(psi)
    if basis.kind == "bright":
        raw, method = w, "bright-sum"
    else:
        raw, method = 1.0 - w, "dark-complement"
    if raw < -CONSISTENCY_MARGIN or raw > 1 + CONSISTENCY_MARGIN:
        raise PreconditionError(f"detection probability {raw!r} outside [0, 1]; basis incomplete?")
    return DetectionResult(min(1.0, max(0.0, raw)), method, basis, raw)


def exact_pdet(h, d, psi_in, tau: float | None = None, rank_tol: float = RANK_TOL) -> float:
    """Exact ``P_det``: H-Krylov by default, U(tau)-Krylov when ``tau`` is given.

    The U-based value is the correct one at every tau, including resonant
    ones; the H-based value is tau independent and agrees away from resonances.
    """
    mode = "U" if tau is not None else "H"
    basis = krylov_bright_basis(h, d, mode=mode, tau=tau, rank_tol=rank_tol)
    return detection_probability_exact(basis, psi_in).p_det


def segment_formula(k: int, r: int) -> Fraction:
    """Closed form for the line of length ``2k+1`` measured at (1-based) node 2.

    Odd starting nodes are detected with probability ``k/(k+1)``, even ones
    with probability one.
    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if not 1 <= r <= 2 * k + 1:
        raise ValidationError(f"node {r} not on a line of length {2 * k + 1}")
    return Fraction(k, k + 1) if r % 2 else Fraction(1)
