"""Positive functionals on finite-dimensional *-algebras: the GNS construction
and the short-type decomposition of one functional with respect to another.

An algebra of dimension d is given by structure constants ``c`` with
``b_i b_j = sum_k c[i, j, k] b_k`` and involution coefficients ``s`` with
``b_i^* = sum_k s[i, k] b_k``. Elements are coefficient vectors; for
``a = sum a_i b_i`` the adjoint has coefficients ``s^T conj(a)``.

The induced form ``t_f(a, b) = f(b^* a)`` uses the package convention
``t(x, y) = y^* T x``, so its Gram matrix is ``T[i, j] = f(b_i^* b_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    AlgebraMismatch,
    DimensionMismatch,
    InternalInconsistency,
    NotAStarAlgebra,
    NotPsd,
    NotRepresentable,
)
from .forms import PsdForm, lambda_max, short_form
from .linalg import DEFAULT_TOL, Tolerance, eigh_psd, factor_cut, null_basis, symmetrize

MAX_ALGEBRA_DIM = 16
STRUCTURE_ATOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    structure: np.ndarray
    involution: np.ndarray
    name: Optional[tuple] = None  # (fixture, param) for the built-in algebras

    def __post_init__(self):
        c = np.array(self.structure, dtype=complex)
        s = np.array(self.involution, dtype=complex)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise NotAStarAlgebra(f"structure tensor must be d x d x d, got shape {c.shape}")
        d = c.shape[0]
        if not 1 <= d <= MAX_ALGEBRA_DIM:
            raise NotAStarAlgebra(f"dimension must be in 1..{MAX_ALGEBRA_DIM}, got {d}")
        if s.shape != (d, d):
            raise NotAStarAlgebra(f"involution must be {d} x {d}, got {s.shape}")
        # (b_i b_j) b_k = b_i (b_j b_k)
        left = np.einsum("ijl,lkm->ijkm", c, c)
        right = np.einsum("jkl,ilm->ijkm", c, c)
        if np.max(np.abs(left - right)) > STRUCTURE_ATOL:
            raise NotAStarAlgebra("product is not associative")
        if np.max(np.abs(s.conj() @ s - np.eye(d))) > STRUCTURE_ATOL:
            raise NotAStarAlgebra("involution is not an involution (conj(s) s != I)")
        # (b_i b_j)^* = b_j^* b_i^*
        star_prod = np.einsum("ijl,lm->ijm", c.conj(), s)
        prod_star = np.einsum("jp,iq,pqm->ijm", s, s, c)
        if np.max(np.abs(star_prod - prod_star)) > STRUCTURE_ATOL:
            raise NotAStarAlgebra("involution does not reverse products")
        object.__setattr__(self, "structure", _frozen(c))
        object.__setattr__(self, "involution", _frozen(s))

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def mul(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(a, complex), np.asarray(b, complex), self.structure)

    def star(self, a) -> np.ndarray:
        return self.involution.T @ np.conj(np.asarray(a, complex))

    def left_mult(self, i: int) -> np.ndarray:
        """Matrix of ``x -> b_i x`` on coefficient vectors."""
        return self.structure[i].T

    def basis_element(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[i] = 1.0
        return e

    def same_as(self, other: "StarAlgebra") -> bool:
        return self is other or (
            self.dim == other.dim
            and np.array_equal(self.structure, other.structure)
            and np.array_equal(self.involution, other.involution))

    # Built-in algebras.

    @classmethod
    def diagonal(cls, d: int) -> "StarAlgebra":
        """C^d with coordinatewise product."""
        c = np.zeros((d, d, d))
        c[np.arange(d), np.arange(d), np.arange(d)] = 1.0
        return cls(c, np.eye(d), ("diagonal", d))

    @classmethod
    def matrix_units(cls, k: int) -> "StarAlgebra":
        """M_k(C) in the basis e_pq, indexed p * k + q."""
        d = k * k
        c = np.zeros((d, d, d))
        s = np.zeros((d, d))
        for p in range(k):
            for q in range(k):
                s[p * k + q, q * k + p] = 1.0
                for r in range(k):
                    c[p * k + q, q * k + r, p * k + r] = 1.0
        return cls(c, s, ("matrix", k))

    @classmethod
    def cyclic_group(cls, n: int) -> "StarAlgebra":
        """Group algebra of Z/nZ in the basis of point masses."""
        c = np.zeros((n, n, n))
        s = np.zeros((n, n))
        for g in range(n):
            s[g, (-g) % n] = 1.0
            for h in range(n):
                c[g, h, (g + h) % n] = 1.0
        return cls(c, s, ("cyclic_group", n))

    @classmethod
    def fixture(cls, name: str, param: int) -> "StarAlgebra":
        makers = {"diagonal": cls.diagonal, "matrix": cls.matrix_units, "cyclic_group": cls.cyclic_group}
        if name not in makers:
            raise NotAStarAlgebra(f"unknown fixture {name!r}; expected one of {sorted(makers)}")
        if not isinstance(param, (int, np.integer)) or param < 1:
            raise NotAStarAlgebra(f"fixture parameter must be a positive integer, got {param!r}")
        return makers[name](int(param))

    def __repr__(self):
        return f"StarAlgebra(dim={self.dim}, name={self.name})"


def _gram_of(alg: StarAlgebra, coeffs: np.ndarray) -> np.ndarray:
    # T[i, j] = f(b_i^* b_j) = sum_{k,l} s[i, k] c[k, j, l] f_l
    return np.einsum("ik,kjl,l->ij", alg.involution, alg.structure, coeffs)


@dataclass(frozen=True, eq=False)
class Functional:
    """Positive linear functional, ``f(b_i) = coeffs[i]``."""

    algebra: StarAlgebra
    coeffs: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        f = np.array(self.coeffs, dtype=complex).reshape(-1)
        if f.size != self.algebra.dim:
            raise DimensionMismatch(f"{f.size} coefficients for an algebra of dimension {self.algebra.dim}")
        T = _gram_of(self.algebra, f)
        scale = float(np.max(np.abs(T), initial=0.0))
        if np.max(np.abs(T - T.conj().T), initial=0.0) > 1e-12 * (1.0 + scale):
            raise NotPsd("functional is not positive: f(b_i^* b_j) is not Hermitian")
        try:
            eigh_psd(T, self.tol)
        except NotPsd as exc:
            raise NotPsd(f"functional is not positive: {exc}") from None
        object.__setattr__(self, "coeffs", _frozen(f))

    def __call__(self, a) -> complex:
        return complex(np.dot(self.coeffs, np.asarray(a, complex)))

    def __add__(self, other: "Functional") -> "Functional":
        _same_algebra(self, other)
        return Functional(self.algebra, self.coeffs + other.coeffs, self.tol)


def _same_algebra(f: Functional, g: Functional):
    if not f.algebra.same_as(g.algebra):
        raise AlgebraMismatch("functionals are defined on different algebras")


def induced_gram(f: Functional) -> PsdForm:
    """The form ``t_f(a, b) = f(b^* a)``."""
    return PsdForm(symmetrize(_gram_of(f.algebra, f.coeffs)), f.tol)


class GnsData(NamedTuple):
    """GNS triple in orthonormal coordinates of ``A / N_f``.

    ``quotient_map`` (r x d) sends a coefficient vector to the coordinates of
    ``a + N_f``, so ``f(b^* a) = <Q a, Q b>``. ``xi_preimage`` is the
    minimal-norm coefficient vector representing the cyclic vector.
    """

    quotient_dim: int
    quotient_map: np.ndarray
    pi: np.ndarray
    xi: np.ndarray
    xi_preimage: np.ndarray
    riesz_residual: float

    def represent(self, a) -> np.ndarray:
        return np.tensordot(np.asarray(a, complex), self.pi, axes=1)


def gns(f: Functional, tol: Optional[Tolerance] = None) -> GnsData:
    """GNS construction for a positive functional.

    Raises NotRepresentable when ``N_f`` is not a left ideal (so pi is not
    well defined on the quotient) or when the Riesz system
    ``<a + N_f, xi> = f(a)`` is inconsistent beyond ``residual_atol``.
    """
    tol = tol or f.tol
    alg = f.algebra
    d = alg.dim
    T = induced_gram(f).gram
    w, V = eigh_psd(T, tol)
    keep = w > 0
    r = int(keep.sum())
    if r == 0:
        if np.max(np.abs(f.coeffs), initial=0.0) > tol.residual_atol:
            raise NotRepresentable("f vanishes on every a^* a but not identically")
        return GnsData(0, np.zeros((0, d), complex), np.zeros((d, 0, 0), complex),
                       np.zeros(0, complex), np.zeros(d, complex), 0.0)
    root = np.sqrt(w[keep])
    Q = root[:, None] * V[:, keep].conj().T
    Qplus = V[:, keep] / root
    N = V[:, ~keep]
    size = np.sqrt(lambda_max(T))
    leak, lnorm = 0.0, 0.0
    pis = np.empty((d, r, r), dtype=complex)
    for i in range(d):
        L = alg.left_mult(i)
        lnorm = max(lnorm, float(np.linalg.norm(L, 2)))
        if N.shape[1]:
            leak = max(leak, float(np.linalg.norm(Q @ L @ N, 2)))
        pis[i] = Q @ L @ Qplus
    if leak > tol.residual_atol * (1.0 + size * lnorm):
        raise NotRepresentable(f"N_f is not a left ideal (leak {leak:.3e}); pi_f is not well defined")
    # <Q a, xi> = f(a) for every basis a:  Q^T conj(xi) = f
    sol, *_ = np.linalg.lstsq(Q.T, f.coeffs, rcond=None)
    residual = float(np.linalg.norm(Q.T @ sol - f.coeffs))
    if residual > tol.residual_atol * (1.0 + float(np.linalg.norm(f.coeffs))):
        raise NotRepresentable(f"no Riesz vector: the cyclic-vector system has residual {residual:.3e}")
    xi = sol.conj()
    return GnsData(r, Q, pis, xi, Qplus @ xi, residual)


def _projector_onto(vectors: np.ndarray, cut: float) -> np.ndarray:
    r = vectors.shape[0]
    if vectors.shape[1] == 0:
        return np.zeros((r, r), dtype=complex)
    U, s, _ = np.linalg.svd(vectors, full_matrices=False)
    Uk = U[:, s > cut]
    return Uk @ Uk.conj().T


class FunctionalDecomposition(NamedTuple):
    ll: Functional
    perp: Functional
    sum_residual: float
    invariance_residual: float
    projection: np.ndarray
    gns: GnsData


def functional_decompose(f: Functional, g: Functional, tol: Optional[Tolerance] = None) -> FunctionalDecomposition:
    """``f = f_ll + f_perp`` with ``f_ll << g`` the largest such part.

    M is the closure in the GNS space of f of ``{a + N_f : a in ker t_g}``
    and P its orthogonal projection; ``f_ll(a) = <pi(a)(I-P)xi, (I-P)xi>``
    and ``f_perp(a) = <pi(a)P xi, P xi>``. Only the Gram matrix of g is used.
    Vectors of ``Q ker t_g`` are cut with the null direction rule of the
    short of a form.
    """
    _same_algebra(f, g)
    tol = tol or f.tol
    data = gns(f, tol)
    d = f.algebra.dim
    if data.quotient_dim == 0:
        zero = Functional(f.algebra, np.zeros(d), tol)
        return FunctionalDecomposition(zero, zero, 0.0, 0.0, np.zeros((0, 0), complex), data)
    Ng = null_basis(induced_gram(g).gram, tol).basis
    P = _projector_onto(data.quotient_map @ Ng, factor_cut(lambda_max(induced_gram(f).gram), tol))
    I = np.eye(data.quotient_dim)
    invariance = max(float(np.linalg.norm((I - P) @ p @ P, 2)) for p in data.pi)
    u = (I - P) @ data.xi
    v = P @ data.xi
    cut = np.sqrt(tol.rank_rtol) * float(np.linalg.norm(data.xi))
    u = u if np.linalg.norm(u) > cut else np.zeros_like(u)
    v = v if np.linalg.norm(v) > cut else np.zeros_like(v)
    ll = np.array([np.vdot(u, p @ u) for p in data.pi])
    perp = np.array([np.vdot(v, p @ v) for p in data.pi])
    sum_residual = float(np.max(np.abs(ll + perp - f.coeffs)))
    bound = tol.residual_atol * (1.0 + float(np.linalg.norm(f.coeffs)))
    if sum_residual > bound:
        raise InternalInconsistency(f"f_ll + f_perp differs from f by {sum_residual:.3e}")
    return FunctionalDecomposition(Functional(f.algebra, ll, tol), Functional(f.algebra, perp, tol),
                                   sum_residual, invariance, P, data)


def short_of_induced(f: Functional, g: Functional, tol: Optional[Tolerance] = None) -> PsdForm:
    """The form-level counterpart: ``t_f`` shorted to ``ker t_g``."""
    tol = tol or f.tol
    return short_form(induced_gram(f), null_basis(induced_gram(g).gram, tol), tol)


def commutant_basis(pis: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as r x r matrices) of ``{X : X pi_i = pi_i X}``."""
    r = pis.shape[1]
    eye = np.eye(r)
    # vec(X p - p X) = (p^T kron I - I kron p) vec(X), column-major vec
    rows = [np.kron(p.T, eye) - np.kron(eye, p) for p in pis]
    K = np.vstack(rows) if rows else np.zeros((0, r * r))
    _, s, Vh = np.linalg.svd(K, full_matrices=True)
    rank = int(np.sum(s > tol.rank_rtol * s[0])) if s.size and s[0] > 0 else 0
    null = Vh[rank:].conj()
    return np.array([x.reshape(r, r, order="F") for x in null])


def random_positive_functional(alg: StarAlgebra, rng, rank: Optional[int] = None,
                               log10_cond: float = 3.0) -> Functional:
    """Random positive functional on a built-in algebra with a kernel of
    random size; any other algebra gets ``a -> sum_k <L(a) v_k, v_k>``
    (positive when left multiplication is a *-representation)."""
    kind, param = alg.name or ("custom", alg.dim)

    def weights(m):
        k = int(rng.integers(0, m + 1)) if rank is None else min(rank, m)
        w = np.zeros(m)
        idx = rng.permutation(m)[:k]
        w[idx] = 10.0 ** rng.uniform(-log10_cond, 0.0, size=k)
        return w

    if kind == "diagonal":
        coeffs = weights(param)
    elif kind == "matrix":
        k = param
        U, _ = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
        rho = (U * weights(k)) @ U.conj().T
        coeffs = np.array([rho[q, p] for p in range(k) for q in range(k)])  # tr(rho e_pq)
    elif kind == "cyclic_group":
        n = param
        g = np.arange(n)
        coeffs = weights(n) @ np.exp(2j * np.pi * np.outer(np.arange(n), g) / n)
    else:
        d = alg.dim
        count = int(rng.integers(0, d + 1)) if rank is None else rank
        vs = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
        coeffs = np.array([sum(np.vdot(v, alg.left_mult(i) @ v) for v in vs) for i in range(d)])
    return Functional(alg, coeffs)
