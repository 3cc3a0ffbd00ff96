"""Seeded random instances for property checks and the ``verify`` command."""

from __future__ import annotations

import numpy as np

from .linalg import Subspace, psd_sqrt, symmetrize

MAX_DIM = 12
MAX_LOG10_COND = 8.0


def complex_normal(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_normal(rng, n, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_psd(rng, n: int, rank: int | None = None, log10_cond: float | None = None,
               basis: np.ndarray | None = None) -> np.ndarray:
    """PSD matrix with largest eigenvalue 1, the given rank, and nonzero
    eigenvalues log-uniform over ``[10^-log10_cond, 1]``."""
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    if log10_cond is None:
        log10_cond = float(rng.uniform(0.0, MAX_LOG10_COND))
    if rank == 0:
        return np.zeros((n, n), dtype=complex)
    lam = 10.0 ** rng.uniform(-log10_cond, 0.0, size=rank)
    lam[0] = 1.0
    if rank > 1:
        lam[1] = 10.0 ** -log10_cond
    U = random_unitary(rng, n) if basis is None else basis
    U = U[:, :rank]
    return symmetrize((U * lam) @ U.conj().T)


def random_pair(rng, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """A pair (A, B) drawn from a mix of generic and structured families."""
    if n is None:
        n = int(rng.integers(1, MAX_DIM + 1))
    mode = rng.choice(["generic", "generic", "generic", "dominated", "singular",
                       "shared_basis", "b_invertible", "degenerate"])
    if mode == "dominated":
        # ker B inside ker A
        U = random_unitary(rng, n)
        rb = int(rng.integers(0, n + 1))
        B = random_psd(rng, n, rank=rb, basis=U)
        A = random_psd(rng, n, rank=int(rng.integers(0, rb + 1)), basis=U[:, rng.permutation(rb)])
    elif mode == "singular":
        U = random_unitary(rng, n)
        ra = int(rng.integers(0, n + 1))
        A = random_psd(rng, n, rank=ra, basis=U)
        B = random_psd(rng, n, rank=n - ra, basis=U[:, ra:]) if ra < n else np.zeros((n, n), complex)
    elif mode == "shared_basis":
        U = random_unitary(rng, n)
        A = random_psd(rng, n, basis=U[:, rng.permutation(n)])
        B = random_psd(rng, n, basis=U[:, rng.permutation(n)])
    elif mode == "b_invertible":
        A = random_psd(rng, n)
        B = random_psd(rng, n, rank=n)
    elif mode == "degenerate":
        which = rng.integers(0, 3)
        A = random_psd(rng, n)
        B = random_psd(rng, n)
        if which == 0:
            A = np.zeros((n, n), complex)
        elif which == 1:
            B = np.zeros((n, n), complex)
        else:
            B = A.copy()
    else:
        A = random_psd(rng, n)
        B = random_psd(rng, n)
    return A, B


def random_subspace(rng, n: int, k: int | None = None) -> Subspace:
    if k is None:
        k = int(rng.integers(0, n + 1))
    return Subspace(random_unitary(rng, n)[:, :k])


def random_contraction(rng, A: np.ndarray) -> np.ndarray:
    """``A^{1/2} R A^{1/2}`` with R Hermitian, ``0 <= R <= I``."""
    n = A.shape[0]
    U = random_unitary(rng, n)
    R = (U * rng.uniform(0.0, 1.0, size=n)) @ U.conj().T
    S = psd_sqrt(A)
    return symmetrize(S @ R @ S)


def random_vectors(rng, n: int, count: int) -> np.ndarray:
    """``count`` unit vectors as rows."""
    X = complex_normal(rng, count, n)
    return X / np.linalg.norm(X, axis=1, keepdims=True)
