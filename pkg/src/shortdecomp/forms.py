"""Nonnegative sesquilinear forms on C^n and their short-type decomposition.

A form t is stored through its Gram matrix T, with ``t(x, y) = y^* T x``
(linear in the first slot) and ``t[x] = x^* T x``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InternalInconsistency,
    NoConvergence,
    PreconditionViolated,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    clip_psd,
    eigh_psd,
    factor_cut,
    frob,
    hermitian,
    null_basis,
    psd_sqrt,
    psd_factor,
    range_angle,
    symmetrize,
)

log = logging.getLogger(__name__)

LEBESGUE_MAX_K = 60
LEBESGUE_AGREEMENT_RTOL = 1e-6
QUASI_UNIT_SCALARS = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True, eq=False)
class PsdForm:
    """A nonnegative form given by a Hermitian PSD Gram matrix.

    The constructor Hermitizes and validates; it raises NotHermitian or
    NotPsd for bad input.
    """

    gram: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        G = hermitian(self.gram)
        eigh_psd(G, self.tol)
        G.setflags(write=False)
        object.__setattr__(self, "gram", G)

    @classmethod
    def _trusted(cls, G: np.ndarray) -> "PsdForm":
        # for results already cleaned by clip_psd
        obj = object.__new__(cls)
        G = np.array(G, dtype=complex)
        G.setflags(write=False)
        object.__setattr__(obj, "gram", G)
        object.__setattr__(obj, "tol", DEFAULT_TOL)
        return obj

    @classmethod
    def zero(cls, n: int) -> "PsdForm":
        return cls._trusted(np.zeros((n, n), dtype=complex))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y) -> complex:
        """The sesquilinear value t(x, y)."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return complex(np.vdot(y, self.gram @ x))

    def __getitem__(self, x) -> float:
        return quadratic(self, x)

    def __repr__(self):
        return f"PsdForm(dim={self.dim})"


class Decomposition(NamedTuple):
    ac: PsdForm
    sing: PsdForm
    unique: bool


class LebesgueResult(NamedTuple):
    form: PsdForm
    iterations: int
    discrepancy: float


def as_form(t, tol: Tolerance = DEFAULT_TOL) -> PsdForm:
    if isinstance(t, PsdForm):
        return t
    return PsdForm(t, tol)


def _pair(t, w, tol):
    t, w = as_form(t, tol), as_form(w, tol)
    if t.dim != w.dim:
        raise DimensionMismatch(f"form dimensions differ: {t.dim} vs {w.dim}")
    return t, w


def lambda_max(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return max(float(np.linalg.eigvalsh(M)[-1]), 0.0)


def _bound(tol, *mats) -> float:
    return tol.residual_atol * (1.0 + sum(frob(M) for M in mats))


def quadratic(t, x) -> float:
    t = as_form(t)
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != t.dim:
        raise DimensionMismatch(f"vector of length {x.shape[0]} for a form of dim {t.dim}")
    val = np.vdot(x, t.gram @ x)
    if abs(val.imag) > 1e-10 * (1.0 + abs(val.real)):
        raise InternalInconsistency(f"quadratic form has imaginary part {val.imag:.3e}")
    return max(float(val.real), 0.0)


def polarize(t, x, y) -> complex:
    """Recover t(x, y) from the quadratic form alone."""
    t = as_form(t)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return sum(1j ** k * quadratic(t, x + 1j ** k * y) for k in range(4)) / 4.0


def form_leq(s, t, tol: Tolerance = DEFAULT_TOL) -> bool:
    """s <= t as quadratic forms, up to ``rank_rtol * lambda_max(t)``."""
    s, t = _pair(s, t, tol)
    D = t.gram - s.gram
    return float(np.linalg.eigvalsh(D)[0]) >= -tol.rank_rtol * max(lambda_max(t.gram), lambda_max(s.gram))


def _schur_short(T: np.ndarray, Y: np.ndarray, tol: Tolerance) -> np.ndarray:
    # Generalized Schur complement, computed through R = T^{1/2}:
    #   T - T Y (Y^* T Y)^+ Y^* T = R (I - Q Q^*) R,  Q an orthonormal basis of ran(R Y).
    # Directions y of Y with t[y] <= rank_rtol * |T| are null for t and are dropped;
    # the rest, Y1, is eliminated blockwise in a basis [Y1 | Z] so the result
    # vanishes on Y1 exactly:  S = Z (R Z)^* (I - Q Q^*) (R Z) Z^*.
    n, k = Y.shape
    if k == 0:
        return T.copy()
    R = psd_sqrt(T, tol)
    U, s, Vh = np.linalg.svd(R @ Y, full_matrices=False)
    keep = s > factor_cut(lambda_max(T), tol)
    if not keep.any():
        return T.copy()
    Y1 = Y @ Vh[keep].conj().T
    if Y1.shape[1] == n:
        return np.zeros_like(T)
    Z = Subspace(Y1).complement().basis
    Q = U[:, keep]
    RZ = R @ Z
    RZ = RZ - Q @ (Q.conj().T @ RZ)
    return Z @ (RZ.conj().T @ RZ) @ Z.conj().T


def short_form(t, Y: Subspace, tol: Tolerance = DEFAULT_TOL) -> PsdForm:
    """The short of t to Y: ``t_Y[x] = inf_{y in Y} t[x - y]``.

    Gram ``T - T Y (Y^* T Y)^+ Y^* T``, evaluated through ``T^{1/2}`` and
    blockwise in an orthonormal basis adapted to Y. A unit vector y of Y with
    ``t[y] <= rank_rtol * lambda_max(T)`` counts as a null vector of t, the
    same rule :func:`is_absolutely_continuous` applies, so ``t_Y = t`` exactly
    when t is null on Y in that sense.
    """
    t = as_form(t, tol)
    if Y.ambient_dim != t.dim:
        raise DimensionMismatch(f"subspace lives in C^{Y.ambient_dim}, form in C^{t.dim}")
    if Y.k == 0:
        return t
    G = _schur_short(t.gram, Y.basis, tol)
    return PsdForm._trusted(clip_psd(G, tol, scale=lambda_max(t.gram)))


def _parallel_gram(T: np.ndarray, W: np.ndarray, tol: Tolerance, scale: float = 1.0) -> np.ndarray:
    """Gram matrix of ``t : (scale * w)``.

    The infimum of ``|J_T^*(x - y)|^2 + scale |J_W^* y|^2`` over y is the
    squared distance of ``[J_T^* x; 0]`` from the range of
    ``K = [J_T^*; -sqrt(scale) J_W^*]``, formed in the eigenbasis of W.

    The ker W columns ``[J_T^* V_0; 0]`` are handled first with the null
    direction rule of :func:`short_form`, so that the limit of ``t : n w``
    matches the short of t to ker w. The remaining columns are rescaled to
    the size of J_T (ran K is unchanged), which keeps the SVD well
    conditioned for very large ``scale``.
    """
    JT = psd_factor(T, tol)
    rT = JT.shape[1]
    if rT == 0:
        return np.zeros_like(T)
    w, U = eigh_psd(W, tol)
    pos = w > 0
    top = JT.conj().T @ U
    P = np.zeros((rT, rT), dtype=complex)
    if not pos.all():
        U0, s0, _ = np.linalg.svd(top[:, ~pos], full_matrices=False)
        Q0 = U0[:, s0 > factor_cut(lambda_max(T), tol)]
        P = Q0 @ Q0.conj().T
    if pos.any():
        # deflate, then drop what is left only by rounding (t-null by the same rule)
        top_pos = top[:, pos] - P @ top[:, pos]
        Ut, st, Vt = np.linalg.svd(top_pos, full_matrices=False)
        big = st > factor_cut(lambda_max(T), tol)
        top_pos = (Ut[:, big] * st[big]) @ Vt[big]
        K = np.vstack([top_pos, np.diag(-np.sqrt(scale * w[pos])).astype(complex)])
        K *= np.sqrt(lambda_max(T)) / np.linalg.norm(K, axis=0)
        Uk, s, _ = np.linalg.svd(K, full_matrices=False)
        Q1 = Uk[:rT, s > tol.rank_rtol * s[0]]
        P = P + Q1 @ Q1.conj().T
    return JT @ (np.eye(rT) - P) @ JT.conj().T


def parallel_sum(t, w, tol: Tolerance = DEFAULT_TOL) -> PsdForm:
    """``(t:w)[x] = inf_y t[x - y] + w[y]``; Gram ``T (T + W)^+ W``."""
    t, w = _pair(t, w, tol)
    G = _parallel_gram(t.gram, w.gram, tol)
    return PsdForm._trusted(clip_psd(G, tol, scale=lambda_max(t.gram)))


def lebesgue_ac_details(t, w, tol: Tolerance = DEFAULT_TOL) -> LebesgueResult:
    """Iterate ``t : 2^k w`` towards ``D_w t = sup_n (t : n w)``.

    Stops once the increment is below ``residual_atol * (1 + |T|)`` and no
    longer growing, or at k = 60. The returned limit is the Richardson
    extrapolation ``2 X_k - X_{k-1}`` (the tail decays like 1/n). The limit
    must match ``short_form(t, ker w)`` within ``1e-6 * (1 + |T|)``.
    """
    t, w = _pair(t, w, tol)
    T, W = t.gram, w.gram
    bound = _bound(tol, T)
    prev = _parallel_gram(T, W, tol, 1.0)
    prev_delta = np.inf
    k = 0
    cur = prev
    for k in range(1, LEBESGUE_MAX_K + 1):
        cur = _parallel_gram(T, W, tol, 2.0 ** k)
        delta = frob(cur - prev)
        if delta <= bound and delta <= prev_delta:
            break
        prev, prev_delta = cur, delta
    limit = clip_psd(2.0 * cur - prev, tol, scale=lambda_max(T))
    target = short_form(t, null_basis(W, tol), tol).gram
    gap = frob(limit - target)
    log.debug("D_w t: k=%d, gap to short=%.3e", k, gap)
    if gap > LEBESGUE_AGREEMENT_RTOL * (1.0 + frob(T)):
        raise NoConvergence(f"t:(2^k w) stopped at k={k} with distance {gap:.3e} "
                            f"from the short of t to ker w")
    return LebesgueResult(PsdForm._trusted(limit), k, gap)


def lebesgue_ac_part(t, w, tol: Tolerance = DEFAULT_TOL) -> PsdForm:
    return lebesgue_ac_details(t, w, tol).form


def subtract(t, s, tol: Tolerance = DEFAULT_TOL) -> PsdForm:
    """t - s for s <= t; eigenvalues within ``rank_rtol * lambda_max(t)`` of zero
    are cleared, anything more negative raises NotPsd."""
    t, s = _pair(t, s, tol)
    return PsdForm._trusted(clip_psd(t.gram - s.gram, tol, scale=lambda_max(t.gram)))


def is_absolutely_continuous(t, w, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``ker w`` inside ``ker t``: every unit null vector v of w has
    ``t[v] <= rank_rtol * lambda_max(T)`` (checked on the worst v)."""
    t, w = _pair(t, w, tol)
    V = null_basis(w.gram, tol).basis
    if V.shape[1] == 0:
        return True
    worst = lambda_max(symmetrize(V.conj().T @ t.gram @ V))
    return bool(worst <= tol.rank_rtol * lambda_max(t.gram))


def is_dominated(t, w, tol: Tolerance = DEFAULT_TOL) -> Optional[float]:
    """Least c with t <= c w, or None when ran T is not inside ran W."""
    t, w = _pair(t, w, tol)
    if not is_absolutely_continuous(t, w, tol):
        return None
    lam, V = eigh_psd(w.gram, tol)
    inv_sqrt = np.zeros_like(lam)
    inv_sqrt[lam > 0] = 1.0 / np.sqrt(lam[lam > 0])
    R = (V * inv_sqrt) @ V.conj().T
    return lambda_max(symmetrize(R @ t.gram @ R))


def _condition(M, tol: Tolerance) -> float:
    w, _ = eigh_psd(M, tol)
    pos = w[w > 0]
    return float(pos[-1] / pos[0]) if pos.size else 1.0


def is_singular(t, w, tol: Tolerance = DEFAULT_TOL) -> bool:
    """t and w are singular, i.e. ``t : w = 0``.

    Decided by the parallel sum and cross-checked against the principal angle
    between the ranges, whose sine is cut at ``rank_rtol``. The parallel sum
    treats a unit vector y as null for t when ``t[y] <= rank_rtol * |T|``,
    which for a shared direction of relative weight ``1 / kappa`` amounts to a
    sine cut of ``sqrt(rank_rtol * kappa)``. Between the two cuts (widened by
    the rounding noise of the angle) the rank decision is not determined by
    the data; a disagreement there is logged, anywhere else it raises
    InternalInconsistency.
    """
    t, w = _pair(t, w, tol)
    ps = _parallel_gram(t.gram, w.gram, tol)
    by_parallel_sum = frob(ps) <= _bound(tol, t.gram, w.gram)
    sine, noise = range_angle(t.gram, w.gram, tol)
    by_ranges = sine > tol.rank_rtol
    if by_parallel_sum != by_ranges:
        kappa = max(_condition(t.gram, tol), _condition(w.gram, tol))
        low, high = tol.rank_rtol - noise, np.sqrt(tol.rank_rtol * kappa) + noise
        if not low <= sine <= high:
            raise InternalInconsistency(
                f"singularity tests disagree: |t:w|_F = {frob(ps):.3e}, "
                f"smallest principal angle sine = {sine:.3e}")
        log.debug("ambiguous singularity: |t:w|_F=%.3e, sine=%.3e in [%.3e, %.3e]",
                  frob(ps), sine, low, high)
    return by_parallel_sum


def short_type_decompose(t, w, tol: Tolerance = DEFAULT_TOL) -> Decomposition:
    """``t = t_{ker w} + (t - t_{ker w})``: w-absolutely continuous plus w-singular.

    ``unique`` reports whether the first part is dominated by w.
    """
    t, w = _pair(t, w, tol)
    ac = short_form(t, null_basis(w.gram, tol), tol)
    sing = subtract(t, ac, tol)
    unique = is_dominated(ac, w, tol) is not None
    return Decomposition(ac, sing, unique)


def _check_below(u, t, tol):
    if not form_leq(u, t, tol):
        raise PreconditionViolated("expected u <= t")


def is_quasi_unit(u, t, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``D_u t = u``. The equivalent conditions
    ``(lam u):(mu t) = lam mu / (lam + mu) u`` and ``(lam u):t = u:(lam t)``
    are evaluated too and must agree with it."""
    u, t = _pair(u, t, tol)
    _check_below(u, t, tol)
    U, T = u.gram, t.gram
    bound = _bound(tol, T)
    by_d = frob(lebesgue_ac_part(t, u, tol).gram - U) <= bound
    by_v = all(
        frob(_parallel_gram(lam * U, mu * T, tol) - lam * mu / (lam + mu) * U) <= bound
        for lam in QUASI_UNIT_SCALARS for mu in QUASI_UNIT_SCALARS)
    by_vi = all(
        frob(_parallel_gram(lam * U, T, tol) - _parallel_gram(U, lam * T, tol)) <= bound
        for lam in QUASI_UNIT_SCALARS)
    if not (by_d == by_v == by_vi):
        raise InternalInconsistency(
            f"quasi-unit characterizations disagree: D_u t = u: {by_d}, "
            f"scaled parallel sums: {by_v}, exchange identity: {by_vi}")
    return by_d


def is_disjoint_part(u, t, tol: Tolerance = DEFAULT_TOL) -> bool:
    """u and t - u are singular. u is first cleaned at the scale of t, so
    that a u made of rounding noise counts as zero."""
    u, t = _pair(u, t, tol)
    _check_below(u, t, tol)
    u = PsdForm._trusted(clip_psd(u.gram, tol, scale=lambda_max(t.gram)))
    return is_singular(u, subtract(t, u, tol), tol)
