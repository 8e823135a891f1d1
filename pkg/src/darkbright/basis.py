"""Orthonormal subspace bases (dark or bright) and their projectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ValidationError

Kind = Literal["bright", "dark"]
Construction = Literal["krylov-H", "krylov-U", "spectral", "complement"]

ORTHO_ATOL = 1e-10


def canonical_phase(v: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """Rotate ``v`` so its first significant component is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    if mags.max(initial=0.0) == 0.0:
        return v.copy()
    first = int(np.argmax(mags > rel_tol * mags.max()))
    return v * (np.conj(v[first]) / mags[first])


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal vectors (stored as matrix columns) tagged dark or bright.

    ``vectors`` has shape ``(dim, k)``; ``k`` may be zero.
    """

    kind: Kind
    vectors: np.ndarray
    construction: Construction
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in ("bright", "dark"):
            raise ValidationError(f"unknown subspace kind {self.kind!r}")
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2:
            raise ValidationError("basis vectors must be given as a 2-D column array")
        gram = v.conj().T @ v
        if v.shape[1] and not np.allclose(gram, np.eye(v.shape[1]), rtol=0, atol=ORTHO_ATOL):
            raise ValidationError("basis vectors are not orthonormal")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        """Dimension of the ambient Hilbert space."""
        return self.vectors.shape[0]

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return self.rank

    def __iter__(self):
        return iter(self.vectors.T)

    @property
    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T

    def weight(self, psi: np.ndarray) -> float:
        """``sum_k |<b_k|psi>|^2``."""
        return float(np.sum(np.abs(self.vectors.conj().T @ psi) ** 2))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "construction": self.construction,
            "tau": self.tau,
            "rank": self.rank,
            "vectors": [[[float(z.real), float(z.imag)] for z in col] for col in self.vectors.T],
        }
