import numpy as np
import pytest

from shortdecomp.errors import DimensionMismatch, NotHermitian, NotPsd
from shortdecomp.generators import random_psd
from shortdecomp.linalg import (
    Subspace,
    Tolerance,
    clip_psd,
    hermitian,
    null_basis,
    orth_project,
    pinv,
    psd_sqrt,
    range_intersection_trivial,
)


def test_pinv_examples():
    np.testing.assert_allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-15)
    np.testing.assert_array_equal(pinv(np.zeros((3, 3))), np.zeros((3, 3)))
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    P = pinv(M)
    np.testing.assert_allclose(P, [[1, -1], [-1, 2]], atol=1e-14)
    np.testing.assert_allclose(M @ P, np.eye(2), atol=1e-14)


def test_pinv_penrose_conditions(rng):
    for n in range(1, 8):
        A = random_psd(rng, n, rank=int(rng.integers(0, n + 1)), log10_cond=4)
        P = pinv(A)
        scale = 1 + np.linalg.norm(A) * np.linalg.norm(P)
        for lhs, rhs in [(A @ P @ A, A), (P @ A @ P, P)]:
            assert np.linalg.norm(lhs - rhs) <= 1e-9 * scale * max(1, np.linalg.norm(rhs))
        assert np.linalg.norm(A @ P - (A @ P).conj().T) <= 1e-9 * scale


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15)
    np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    R = psd_sqrt(M)
    np.testing.assert_allclose(R @ R, M, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(R) > 0)


def test_null_basis_examples():
    K = null_basis(np.diag([1.0, 0.0]))
    assert K.k == 1
    assert abs(abs(K.basis[1, 0]) - 1) < 1e-15
    assert null_basis(np.eye(4)).k == 0
    K = null_basis(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert K.k == 1
    v = K.basis[:, 0]
    assert abs(abs(np.vdot(v, np.array([1, -1]) / np.sqrt(2))) - 1) < 1e-14


def test_null_basis_respects_tolerance():
    M = np.diag([1.0, 1e-12])
    assert null_basis(M).k == 1
    assert null_basis(M, Tolerance(rank_rtol=1e-14)).k == 0


def test_orth_project_examples():
    np.testing.assert_allclose(orth_project(Subspace(np.array([[1.0], [0.0]]))), np.diag([1, 0]), atol=0)
    np.testing.assert_array_equal(orth_project(Subspace.zero(3)), np.zeros((3, 3)))
    v = np.array([[1.0], [1.0]]) / np.sqrt(2)
    np.testing.assert_allclose(orth_project(Subspace(v)), [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_subspace_span_and_complement(rng):
    S = Subspace.span(np.array([[1, 0, 0], [2, 0, 0], [0, 1, 0]], dtype=complex).T)
    assert S.k == 2
    C = S.complement()
    assert C.k == 1
    np.testing.assert_allclose(orth_project(S) + orth_project(C), np.eye(3), atol=1e-14)
    assert Subspace.full(3).complement().k == 0


def test_range_intersection_examples():
    assert range_intersection_trivial(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    for n in (1, 2, 5):
        assert not range_intersection_trivial(np.eye(n), np.eye(n))
    assert range_intersection_trivial(np.array([[1.0, 1.0], [1.0, 1.0]]), np.diag([1.0, 0.0]))
    assert range_intersection_trivial(np.zeros((2, 2)), np.eye(2))


def test_hermitian_validation():
    with pytest.raises(NotHermitian, match="not Hermitian"):
        hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionMismatch):
        hermitian(np.ones((2, 3)))
    H = hermitian(np.array([[1.0, 1e-14], [0.0, 1.0]]))
    np.testing.assert_allclose(H, H.conj().T, atol=0)


def test_clip_psd_rejects_real_negatives():
    with pytest.raises(NotPsd):
        clip_psd(np.diag([1.0, -0.1]))
    out = clip_psd(np.diag([1.0, -1e-13]))
    assert np.all(np.linalg.eigvalsh(out) >= 0)
