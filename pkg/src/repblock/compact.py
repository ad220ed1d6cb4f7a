"""Haar-measure sampling for the unitary and orthogonal groups.

Samples are produced by QR-factoring a Ginibre matrix and rescaling the
columns by the phases (signs, in the real case) of the R diagonal.  The
rescaling matters: the raw QR of a Gaussian matrix is *not* Haar
distributed, because LAPACK's sign conventions bias the factor Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-random d x d unitary matrix."""
    if d <= 0:
        raise ValueError(f"dimension must be positive, got {d}")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag))


def haar_orthogonal(d: int, rng) -> np.ndarray:
    """Haar-random d x d real orthogonal matrix."""
    if d <= 0:
        raise ValueError(f"dimension must be positive, got {d}")
    a = rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r).copy()
    signs = np.where(diag >= 0, 1.0, -1.0)
    return q * signs


@dataclass(frozen=True)
class CompactGroupHandle:
    """Handle for U(d) or O(d); elements are the matrices themselves."""

    kind: str  # "unitary" | "orthogonal"
    dim: int

    def __post_init__(self):
        if self.kind not in ("unitary", "orthogonal"):
            raise ValueError(f"unknown compact group kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def sample(self, rng) -> np.ndarray:
        if self.kind == "unitary":
            return haar_unitary(self.dim, rng)
        return haar_orthogonal(self.dim, rng)

    def __repr__(self):
        return f"CompactGroupHandle({self.kind!r}, dim={self.dim})"


def unitary_group(d: int) -> CompactGroupHandle:
    return CompactGroupHandle("unitary", d)


def orthogonal_group(d: int) -> CompactGroupHandle:
    return CompactGroupHandle("orthogonal", d)
