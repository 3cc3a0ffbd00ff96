"""Operator picture: the induced space H_A, the factorized short and the
decomposition of a positive matrix A with respect to another one, B.

H_A is realized as C^r with r = rank A, through a factor j with
``j j^* = A``; the canonical embedding J_A is j itself and ``J_A^* x``
has coordinates ``j^* x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch
from .forms import is_dominated, lambda_max
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    clip_psd,
    factor_cut,
    hermitian,
    null_basis,
    psd_factor,
    psd_sqrt,
)


@dataclass(frozen=True, eq=False)
class InducedSpaceFactor:
    a: np.ndarray
    j: np.ndarray

    @property
    def rank(self) -> int:
        return self.j.shape[1]


class OperatorDecomposition(NamedTuple):
    a_ll: np.ndarray
    a_perp: np.ndarray
    unique: bool


def build_factor(A, tol: Tolerance = DEFAULT_TOL) -> InducedSpaceFactor:
    A = hermitian(A)
    return InducedSpaceFactor(A, psd_factor(A, tol))


def _check_subspace(A, M: Subspace):
    if M.ambient_dim != A.shape[0]:
        raise DimensionMismatch(f"subspace lives in C^{M.ambient_dim}, operator on C^{A.shape[0]}")


def krein_short(A, M: Subspace, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Short of A to M (the part vanishing on M): ``J_A (I - P) J_A^*`` with P
    the projection of H_A onto the image of M under ``x -> J_A^* x``.

    Unit vectors m of M with ``(Am|m) <= rank_rtol * lambda_max(A)`` count
    as null vectors of A, so their images ``J_A^* m`` are dropped.
    The short with range inside M is ``krein_short(A, M.complement())``.
    """
    F = build_factor(A, tol)
    _check_subspace(F.a, M)
    if M.k == 0:
        return F.a
    r = F.rank
    if r == 0:
        return np.zeros_like(F.a)
    X = F.j.conj().T @ M.basis
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    Q = U[:, s > factor_cut(lambda_max(F.a), tol)]
    S = F.j @ (np.eye(r) - Q @ Q.conj().T) @ F.j.conj().T
    return clip_psd(S, tol, scale=lambda_max(F.a))


def short_quadratic_sup(A, M: Subspace, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """``(Ax|x) - sup{|(Ax|y)|^2 : y in M, (Ay|y) <= 1}``.

    The supremum equals ``(Y^* A x)^* (Y^* A Y)^+ (Y^* A x) = |Q^* A^{1/2} x|^2``
    with Q an orthonormal basis of ``ran A^{1/2} Y``; the second form is used,
    with the same singular value cut as :func:`krein_short`.
    """
    A = hermitian(A)
    _check_subspace(A, M)
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"vector of length {x.shape[0]} for an operator on C^{A.shape[0]}")
    total = float(np.vdot(x, A @ x).real)
    if M.k == 0:
        return max(total, 0.0)
    R = psd_sqrt(A, tol)
    U, s, _ = np.linalg.svd(R @ M.basis, full_matrices=False)
    Q = U[:, s > factor_cut(lambda_max(A), tol)]
    sup = float(np.linalg.norm(Q.conj().T @ (R @ x)) ** 2)
    return max(total - sup, 0.0)


def operator_decompose(A, B, tol: Tolerance = DEFAULT_TOL) -> OperatorDecomposition:
    """``A = A_ll + A_perp`` with A_ll the short of A to ker B."""
    A = hermitian(A)
    B = hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    a_ll = krein_short(A, null_basis(B, tol), tol)
    a_perp = clip_psd(A - a_ll, tol, scale=lambda_max(A))
    unique = is_dominated(a_ll, B, tol) is not None
    return OperatorDecomposition(a_ll, a_perp, unique)
