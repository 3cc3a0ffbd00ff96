"""Invariant suites run by ``verify``.

Every check records a residual normalized so that its bound is a fixed
number; a property passes when its worst residual is within the bound.
Boolean checks record the count of failing cases against a bound of 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import charges as ch
from . import functionals as fn
from .forms import (
    LEBESGUE_AGREEMENT_RTOL,
    PsdForm,
    is_absolutely_continuous,
    is_disjoint_part,
    is_quasi_unit,
    is_singular,
    lambda_max,
    lebesgue_ac_details,
    parallel_sum,
    polarize,
    quadratic,
    short_form,
    short_type_decompose,
)
from .generators import random_contraction, random_pair, random_psd, random_subspace, random_vectors
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    frob,
    null_basis,
    orth_project,
    pinv,
    psd_sqrt,
    range_intersection_trivial,
)
from .operators import krein_short, operator_decompose, short_quadratic_sup

PENROSE_LOG10_COND = 6.0
POINTS = 100


@dataclass
class PropertyResult:
    module: str
    name: str
    bound: float
    worst: float = 0.0
    cases: int = 0

    @property
    def passed(self) -> bool:
        return self.worst <= self.bound

    def as_dict(self) -> dict:
        return {"module": self.module, "worst_residual": self.worst, "bound": self.bound,
                "cases": self.cases, "pass": self.passed}


@dataclass
class Recorder:
    results: dict = field(default_factory=dict)

    def record(self, module: str, name: str, residual: float, bound: float):
        key = f"{module}.{name}"
        r = self.results.setdefault(key, PropertyResult(module, name, bound))
        r.worst = max(r.worst, float(residual))
        r.cases += 1

    def flag(self, module: str, name: str, ok: bool):
        self.record(module, name, 0.0 if ok else 1.0, 0.0)


def _min_eig(M) -> float:
    return float(np.linalg.eigvalsh(M)[0]) if np.size(M) else 0.0


# linalg_kernel

def linalg_suite(rec: Recorder, rng, trials: int, tol: Tolerance, pairs):
    mod = "linalg_kernel"
    for _ in range(trials):
        n = int(rng.integers(1, 13))
        M = random_psd(rng, n, log10_cond=float(rng.uniform(0, PENROSE_LOG10_COND)))
        P = pinv(M, tol)
        nM, nP = frob(M), frob(P)
        rec.record(mod, "pinv_penrose_1", frob(M @ P @ M - M) / (1 + nM), tol.residual_atol)
        rec.record(mod, "pinv_penrose_2", frob(P @ M @ P - P) / (1 + nP), tol.residual_atol)
        rec.record(mod, "pinv_penrose_3", frob(M @ P - (M @ P).conj().T), tol.residual_atol)
        rec.record(mod, "pinv_penrose_4", frob(P @ M - (P @ M).conj().T), tol.residual_atol)
    for A, B in pairs:
        nA = frob(A)
        R = psd_sqrt(A, tol)
        rec.record(mod, "psd_sqrt_commutes", frob(R @ A - A @ R) / (1 + nA), tol.residual_atol)
        rec.record(mod, "psd_sqrt_squares", frob(R @ R - A) / (1 + nA), tol.residual_atol)
        rec.record(mod, "psd_sqrt_psd", max(0.0, -_min_eig(R)) / max(lambda_max(R), 1e-300), tol.rank_rtol)
        V = null_basis(A, tol).basis
        if V.shape[1]:
            vals = np.real(np.einsum("ij,ik,kj->j", V.conj(), A, V))
            rec.record(mod, "null_basis_annihilates", float(vals.max()) / max(lambda_max(A), 1e-300), tol.rank_rtol)
        S = random_subspace(rng, A.shape[0])
        Pr = orth_project(S)
        rec.record(mod, "orth_project_idempotent", float(np.max(np.abs(Pr @ Pr - Pr), initial=0.0)), 1e-12)
        rec.flag(mod, "range_intersection_symmetric",
                 range_intersection_trivial(A, B, tol) == range_intersection_trivial(B, A, tol))


# forms_core

def forms_suite(rec: Recorder, rng, tol: Tolerance, pairs):
    mod = "forms_core"
    atol = tol.residual_atol
    for A, B in pairs:
        n = A.shape[0]
        t = PsdForm(A, tol)
        nA, nB = frob(A), frob(B)
        X = random_vectors(rng, n, 10)
        Yv = random_vectors(rng, n, 10)
        for x, y in zip(X, Yv):
            tx, ty = quadratic(t, x), quadratic(t, y)
            par = quadratic(t, x + y) + quadratic(t, x - y) - 2 * (tx + ty)
            rec.record(mod, "parallelogram_law", abs(par) / (tx + ty + 1), 1e-9)
            rec.record(mod, "polarization", abs(polarize(t, x, y) - t(x, y)), 1e-9)

        Y = random_subspace(rng, n)
        tY = short_form(t, Y, tol)
        rec.record(mod, "short_idempotent", frob(short_form(tY, Y, tol).gram - tY.gram) / (1 + nA), atol)

        W = A + random_psd(rng, n)
        Zsub = Subspace(Y.basis[:, : int(rng.integers(0, Y.k + 1))])
        wZ = short_form(W, Zsub, tol)
        worst = max((quadratic(tY, x) - quadratic(wZ, x) for x in random_vectors(rng, n, 20)), default=0.0)
        rec.record(mod, "short_monotone", max(worst, 0.0) / (1 + nA + frob(W)), atol)

        C = random_contraction(rng, A)
        gap = -_min_eig(tY.gram - short_form(C, Y, tol).gram)
        rec.record(mod, "short_maximal", max(gap, 0.0) / (1 + nA), atol)

        d = short_type_decompose(A, B, tol)
        fixed = frob(d.ac.gram - A) <= atol * (1 + nA)
        rec.flag(mod, "fixed_point_iff_ac", fixed == is_absolutely_continuous(A, B, tol))

        L = lebesgue_ac_details(A, B, tol)
        rec.record(mod, "lebesgue_equals_short", L.discrepancy / (1 + nA), LEBESGUE_AGREEMENT_RTOL)
        chain = 0.0
        for x in random_vectors(rng, n, 20):
            d_x, s_x, t_x = quadratic(L.form, x), quadratic(d.ac, x), quadratic(t, x)
            chain = max(chain, d_x - s_x - LEBESGUE_AGREEMENT_RTOL * (1 + nA), s_x - t_x)
        rec.record(mod, "ordering_chain", max(chain, 0.0) / (1 + nA), atol)

        rec.flag(mod, "quasi_unit_equivalence",
                 is_quasi_unit(tY, t, tol) and is_disjoint_part(tY, t, tol))

        ps = parallel_sum(A, B, tol)
        ps2 = parallel_sum(B, A, tol)
        rec.record(mod, "parallel_sum_commutative", frob(ps.gram - ps2.gram) / (1 + nA + nB), atol)
        below = max(-_min_eig(A - ps.gram), -_min_eig(B - ps.gram), 0.0)
        rec.record(mod, "parallel_sum_below_both", below / (1 + nA + nB), atol)
        S = A + B
        Spinv = pinv(S, tol)
        worst = 0.0
        for x in random_vectors(rng, n, POINTS):
            y = Spinv @ (A @ x)
            inf_val = quadratic(t, x - y) + float(np.vdot(y, B @ y).real)
            worst = max(worst, abs(quadratic(ps, x) - inf_val))
        rec.record(mod, "parallel_sum_infimum", worst / (1 + nA + nB), atol)


# operator_short

def operator_suite(rec: Recorder, rng, tol: Tolerance, pairs):
    mod = "operator_short"
    atol = tol.residual_atol
    for A, B in pairs:
        n = A.shape[0]
        nA = frob(A)
        for k in range(n + 1):
            M = random_subspace(rng, n, k)
            K = krein_short(A, M, tol)
            rec.record(mod, "factorization_equivalence",
                       frob(K - short_form(A, M, tol).gram) / (1 + nA), atol)
            rec.record(mod, "short_vanishes_on_subspace", frob(orth_project(M) @ K) / (1 + nA), atol)
        M = random_subspace(rng, n)
        K = krein_short(A, M, tol)
        worst = 0.0
        for x in random_vectors(rng, n, POINTS):
            q = float(np.vdot(x, K @ x).real)
            worst = max(worst, abs(short_quadratic_sup(A, M, x, tol) - q) / (1 + float(np.vdot(x, A @ x).real)))
        rec.record(mod, "sup_formula_matches_short", worst, atol)

        od = operator_decompose(A, B, tol)
        fd = short_type_decompose(A, B, tol)
        rec.record(mod, "agrees_with_forms",
                   max(frob(od.a_ll - fd.ac.gram), frob(od.a_perp - fd.sing.gram)) / (1 + nA), atol)
        rec.flag(mod, "unique_in_finite_dimension", od.unique)
        rec.flag(mod, "a_ll_disjoint_part", is_disjoint_part(od.a_ll, A, tol))
        rec.flag(mod, "a_perp_singular", is_singular(od.a_perp, B, tol))


# charges

def charges_suite(rec: Recorder, rng, trials: int, tol: Tolerance):
    mod = "charges"
    for _ in range(trials):
        ring = ch.random_ring(rng)
        space = ch.atoms(ring)
        nu, mu = ch.random_charge(rng, ring), ch.random_charge(rng, ring)
        d = ch.charge_decompose(nu, mu, tol)  # outputs are validated Charges
        scale = max(1.0, float(sum(nu.atom_values())))
        rec.record(mod, "form_charge_consistency", d.form_gap / scale, 1e-10)
        rec.flag(mod, "ll_absolutely_continuous", ch.is_charge_absolutely_continuous(d.ll, mu, tol))
        if space.dim == 0:
            continue
        t_nu, t_mu, t_ll = ch.induced_form(nu), ch.induced_form(mu), ch.induced_form(d.ll)
        rec.flag(mod, "perp_singular", is_singular(ch.induced_form(d.perp), t_mu, tol))
        rec.flag(mod, "ll_extremal", is_disjoint_part(t_ll, t_nu, tol))
        L = lebesgue_ac_details(t_nu, t_mu, tol)
        rec.record(mod, "sigma_additive_coincidence", frob(L.form.gram - t_ll.gram) / (1 + frob(t_nu.gram)), 1e-8)
        short = short_form(t_nu, null_basis(t_mu.gram, tol), tol)
        for _ in range(10):
            z = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
            sz = quadratic(short, z)
            rec.record(mod, "short_modulus_invariant", abs(sz - quadratic(short, np.abs(z))) / (1 + sz), 1e-9)
        ll_a = d.ll.atom_values()
        for _ in range(5):
            theta = np.where(mu.atom_values() > 0, rng.uniform(0, 1, space.dim) * nu.atom_values(), 0.0)
            over = np.max(space.incidence() @ (theta - ll_a), initial=0.0)
            rec.record(mod, "ll_maximal", max(over, 0.0) / scale, 1e-12)
        diag = np.diag(rng.uniform(0, 5, space.dim))
        rec.flag(mod, "diagonal_forms_additive", ch.is_induced_additive(diag, ring, 20, rng, tol))
        if space.dim >= 2:
            off = random_psd(rng, space.dim, rank=space.dim).real
            off = off + off.T
            np.fill_diagonal(off, 0.0)
            G = np.diag(np.abs(off).sum(axis=1) + 1.0) + off
            rec.flag(mod, "nondiagonal_real_forms_not_additive", not ch.is_induced_additive(G, ring, 20, rng, tol))


# functionals

FIXTURES = [("diagonal", p) for p in (1, 2, 3, 5, 8)] + \
           [("matrix", p) for p in (1, 2, 3, 4)] + \
           [("cyclic_group", p) for p in (1, 2, 3, 6, 12)]


def functionals_suite(rec: Recorder, rng, trials: int, tol: Tolerance):
    mod = "functionals"
    atol = tol.residual_atol
    for trial in range(trials):
        name, param = FIXTURES[trial % len(FIXTURES)]
        alg = fn.StarAlgebra.fixture(name, param)
        f = fn.random_positive_functional(alg, rng)
        g = fn.random_positive_functional(alg, rng)
        data = fn.gns(f, tol)
        fnorm = 1 + float(np.linalg.norm(f.coeffs))
        if data.quotient_dim:
            rec_err = max(abs(np.vdot(data.xi, p @ data.xi) - c) for p, c in zip(data.pi, f.coeffs))
            rec.record(mod, "gns_reconstruction", rec_err / fnorm, atol)
            mult = star = 0.0
            for i in range(alg.dim):
                for j in range(alg.dim):
                    prod = data.represent(alg.mul(alg.basis_element(i), alg.basis_element(j)))
                    mult = max(mult, frob(prod - data.pi[i] @ data.pi[j]))
                star = max(star, frob(data.represent(alg.star(alg.basis_element(i))) - data.pi[i].conj().T))
            rec.record(mod, "gns_multiplicative", mult, atol)
            rec.record(mod, "gns_star_preserving", star, atol)

        d = fn.functional_decompose(f, g, tol)
        rec.record(mod, "decomposition_sums", d.sum_residual / fnorm, atol)
        rec.record(mod, "pi_invariance", d.invariance_residual, atol)
        T_f = fn.induced_gram(f).gram
        T_ll = fn.induced_gram(d.ll).gram
        nT = frob(T_f)
        rec.record(mod, "bridge_to_forms", frob(T_ll - fn.short_of_induced(f, g, tol).gram) / (1 + nT), atol)
        rec.flag(mod, "ll_absolutely_continuous", is_absolutely_continuous(T_ll, fn.induced_gram(g).gram, tol))
        rec.flag(mod, "perp_singular", is_singular(fn.induced_gram(d.perp), fn.induced_gram(g), tol))
        rec.flag(mod, "ll_extremal", is_disjoint_part(T_ll, T_f, tol))
        fn.gns(d.ll, tol)
        fn.gns(d.perp, tol)
        rec.flag(mod, "outputs_representable", True)
        if data.quotient_dim == 0:
            continue
        # representable h <= f with h << g, from commutant contractions vanishing on M
        I = np.eye(data.quotient_dim)
        comm = fn.commutant_basis(data.pi, tol)
        for _ in range(3):
            X = np.tensordot(rng.standard_normal(len(comm)) + 1j * rng.standard_normal(len(comm)), comm, axes=1)
            Hm = (X + X.conj().T) / 2
            Hm = Hm / max(np.linalg.norm(Hm, 2), 1e-300)
            C = (I - d.projection) @ Hm @ (I - d.projection)
            eta = C @ data.xi
            h_coeffs = np.array([np.vdot(eta, p @ eta) for p in data.pi])
            T_h = fn.induced_gram(fn.Functional(alg, h_coeffs, tol)).gram
            rec.record(mod, "ll_maximal", max(-_min_eig(T_ll - T_h), 0.0) / (1 + nT), atol)
        t_ll = PsdForm(T_ll, tol)
        for i in range(alg.dim):
            lam = float(np.linalg.norm(data.pi[i], 2)) ** 2
            for b in random_vectors(rng, alg.dim, 5):
                ab = alg.mul(alg.basis_element(i), b)
                excess = quadratic(t_ll, ab) - lam * quadratic(t_ll, b)
                rec.record(mod, "representable_form_bound", max(excess, 0.0) / (1 + nT * (1 + lam)), atol)


SUITES = ("linalg_kernel", "forms_core", "operator_short", "charges", "functionals")


def run_all(seed: int = 42, trials: int = 20, tol: Tolerance = DEFAULT_TOL,
            extra_pairs=()) -> dict:
    """Run every suite; ``trials`` random instances per suite plus any
    ``extra_pairs`` of PSD matrices. Returns results keyed by property."""
    rec = Recorder()
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(SUITES) + 1)]
    pairs = [random_pair(rngs[-1]) for _ in range(trials)] + list(extra_pairs)
    linalg_suite(rec, rngs[0], trials, tol, pairs)
    forms_suite(rec, rngs[1], tol, pairs)
    operator_suite(rec, rngs[2], tol, pairs)
    charges_suite(rec, rngs[3], trials, tol)
    functionals_suite(rec, rngs[4], trials, tol)
    return rec.results
