"""Dense complex-matrix kernel: Hermitian eigensystems and what hangs off them.

All heavy lifting is delegated to LAPACK through numpy; this module adds the
tolerance policy (Hermiticity, PSD clamping) that the physics layers rely on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianInput, NotPositiveSemidefinite

HERMITICITY_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
PSD_CLAMP = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def hermitian_defect(m: np.ndarray) -> float:
    """Largest entry of |M - M^dagger|."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return the symmetrized matrix (M + M^dagger)/2, or raise.

    Symmetrizing absorbs round-off from tensor-product construction; anything
    beyond `tol` is treated as a caller bug.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"matrix is not square: {a.shape}")
    defect = hermitian_defect(a)
    if defect > tol:
        raise NonHermitianInput(f"Hermiticity defect {defect:.3e} exceeds {tol:.0e}")
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and the matching orthonormal column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        v = as_complex_matrix(self.eigenvectors)
        gram_defect = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1])))
        if gram_defect > ORTHONORMALITY_TOL:
            raise ValueError(f"eigenvector columns not orthonormal: defect {gram_defect:.3e}")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)

    def reconstruct(self) -> np.ndarray:
        """V diag(w) V^dagger."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = require_hermitian(h)
    w, v = np.linalg.eigh(m)
    return EigenDecomposition(w, v)


def expm_i_hermitian(h, s: float) -> np.ndarray:
    """exp(-i H s) for Hermitian H, computed through the eigensystem."""
    dec = eigh(h)
    phases = np.exp(-1j * dec.eigenvalues * float(s))
    v = dec.eigenvectors
    return (v * phases) @ v.conj().T


def sqrtm_psd(rho) -> np.ndarray:
    """Positive square root of a PSD Hermitian matrix.

    Eigenvalues within round-off of zero are treated as exact zeros: negatives
    down to -PSD_CLAMP, and positives below dim * eps * max eigenvalue.  The
    sqrt would otherwise turn eps-sized eigenvalue noise into sqrt(eps)-sized
    junk directions in the root, which matters for rank-deficient inputs such
    as pure-state density matrices.  Anything below -PSD_CLAMP raises.
    """
    dec = eigh(rho)
    w = dec.eigenvalues
    if w[0] < -PSD_CLAMP:
        raise NotPositiveSemidefinite(f"min eigenvalue {w[0]:.3e} below -{PSD_CLAMP:.0e}")
    w = np.maximum(w, 0.0)
    w[w < len(w) * np.finfo(float).eps * w[-1]] = 0.0
    v = dec.eigenvectors
    return (v * np.sqrt(w)) @ v.conj().T


def kron(a, b) -> np.ndarray:
    """Tensor product of two matrices."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))
