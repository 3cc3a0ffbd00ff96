"""Tolerance-aware dense Hermitian numerics.

Matrices are plain 2d complex numpy arrays. Functions that expect a
Hermitian input pass it through :func:`hermitian` first, so real or
slightly asymmetric input is accepted and promoted.

Rank decisions are always relative to the largest eigenvalue of the matrix
at hand (``rank_rtol * lambda_max``), never to a global constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotOrthonormal, NotPsd

ORTHONORMAL_ATOL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    rank_rtol: float = 1e-10
    residual_atol: float = 1e-9

    def __post_init__(self):
        if not (self.rank_rtol > 0 and self.residual_atol > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def hermitian(M) -> np.ndarray:
    """Return ``(M + M^*) / 2`` as a complex array after checking that M is
    Hermitian within ``1e-12 * (1 + max|M_ij|)``."""
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if M.size and np.max(np.abs(M - M.conj().T)) > 1e-12 * (1.0 + scale):
        raise NotHermitian("input not Hermitian")
    return 0.5 * (M + M.conj().T)


def symmetrize(M) -> np.ndarray:
    """``(M + M^*) / 2`` without validation, for computed results."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def frob(M) -> float:
    return float(np.linalg.norm(M)) if np.size(M) else 0.0


def eigh_psd(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None):
    """Eigendecomposition of a PSD matrix with rounding noise removed.

    Eigenvalues with ``|lam| <= rank_rtol * scale`` are set to exactly zero
    and anything more negative raises :class:`NotPsd`. ``scale`` defaults to
    the largest eigenvalue of M; callers cleaning up a computed difference
    pass the scale of the parent matrix instead.
    """
    M = hermitian(M)
    if M.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, V = np.linalg.eigh(M)
    if scale is None:
        scale = max(float(w[-1]), 0.0)
    cut = tol.rank_rtol * scale
    if w[0] < -cut:
        raise NotPsd(f"matrix is not positive semidefinite (eigenvalue {w[0]:.3e}, "
                     f"allowed down to {-cut:.3e})")
    w = np.where(w <= cut, 0.0, w)
    return w, V


def clip_psd(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Rebuild M from :func:`eigh_psd`, i.e. with noise eigenvalues zeroed.

    Meant for computed results: M is symmetrized without the Hermitian check.
    """
    w, V = eigh_psd(symmetrize(M), tol, scale)
    return symmetrize((V * w) @ V.conj().T)


def psd_factor(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """n x r matrix J with ``J J^* = M`` built from the positive eigenpairs."""
    w, V = eigh_psd(M, tol)
    keep = w > 0
    return V[:, keep] * np.sqrt(w[keep])


def pinv(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian PSD matrix.

    ``scale`` as in :func:`eigh_psd`; pass the parent's largest eigenvalue when
    M is a compression that may be pure rounding noise.
    """
    w, V = eigh_psd(M, tol, scale)
    inv = np.zeros_like(w)
    nz = w > 0
    inv[nz] = 1.0 / w[nz]
    return symmetrize((V * inv) @ V.conj().T)


def factor_cut(lam_max: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Singular value cut for vectors ``T^{1/2} y`` (or ``J^* y``) with |y| = 1.

    ``sigma^2 = t[y]``, so ``sigma <= sqrt(rank_rtol * lam_max)`` says that y is
    a null direction of t by the same rule as the eigenvalue cut.
    """
    return float(np.sqrt(tol.rank_rtol * max(lam_max, 0.0)))


def psd_sqrt(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    w, V = eigh_psd(A, tol)
    return symmetrize((V * np.sqrt(w)) @ V.conj().T)


def _normalize_phase(V: np.ndarray) -> np.ndarray:
    # first coordinate with non-negligible modulus made real positive
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-12 * max(np.max(np.abs(col)), 1e-300))
        if idx.size:
            c = col[idx[0]]
            V[:, j] = col * (abs(c) / c)
    return V


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of C^n given by an orthonormal column basis."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=complex)
        if B.ndim != 2 or B.shape[1] > B.shape[0] or B.shape[0] == 0:
            raise DimensionMismatch(f"basis must be n x k with 0 <= k <= n, got {B.shape}")
        gap = np.max(np.abs(B.conj().T @ B - np.eye(B.shape[1]))) if B.shape[1] else 0.0
        if gap > ORTHONORMAL_ATOL:
            raise NotOrthonormal(f"basis columns are not orthonormal (gap {gap:.3e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def span(cls, vectors, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        """Orthonormalize the columns of ``vectors`` (n x m, any rank)."""
        X = np.array(vectors, dtype=complex)
        if X.ndim == 1:
            X = X[:, None]
        n = X.shape[0]
        if X.shape[1] == 0 or not np.any(X):
            return cls.zero(n)
        U, s, _ = np.linalg.svd(X, full_matrices=False)
        r = int(np.sum(s > tol.rank_rtol * s[0]))
        return cls(U[:, :r])

    def complement(self) -> "Subspace":
        n, k = self.basis.shape
        if k == 0:
            return Subspace.full(n)
        if k == n:
            return Subspace.zero(n)
        U, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(U[:, k:])

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, k={self.k})"


def null_basis(A, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> Subspace:
    """Kernel of a PSD matrix: eigenvectors with eigenvalue at most
    ``rank_rtol * scale`` (default scale ``lambda_max``), ascending,
    phase-normalized."""
    w, V = eigh_psd(A, tol, scale)
    return Subspace(_normalize_phase(V[:, w == 0]))


def orth_project(S: Subspace) -> np.ndarray:
    B = S.basis
    return symmetrize(B @ B.conj().T)


def range_angle(A, B, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Sine of the smallest principal angle between ran A and ran B, and the
    size of the rounding noise in it.

    The sine is 1 when either range is zero and 0 when the dimensions force
    an intersection. The noise estimate is the first-order perturbation bound
    for the eigen-subspaces, ``64 eps (|A| / lam_min+(A) + |B| / lam_min+(B))``.
    """
    A = hermitian(A)
    B = hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    noise = 0.0
    bases = []
    for M in (A, B):
        w, V = eigh_psd(M, tol)
        keep = w > 0
        if keep.any():
            noise += 64 * np.finfo(float).eps * w[-1] / w[keep][0]
        bases.append(V[:, keep])
    VA, VB = bases
    if VA.shape[1] == 0 or VB.shape[1] == 0:
        return 1.0, noise
    if VA.shape[1] + VB.shape[1] > A.shape[0]:
        return 0.0, noise
    # sigma_min [V_A | V_B] = sqrt(2) sin(theta / 2)
    s_min = np.linalg.svd(np.hstack([VA, VB]), compute_uv=False)[-1]
    theta = 2.0 * np.arcsin(min(s_min / np.sqrt(2.0), 1.0))
    return float(np.sin(theta)), float(noise)


def range_intersection_trivial(A, B, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ran A^{1/2} and ran B^{1/2} meet only in zero, i.e. the
    smallest principal angle has sine above ``rank_rtol``."""
    return range_angle(A, B, tol)[0] > tol.rank_rtol
