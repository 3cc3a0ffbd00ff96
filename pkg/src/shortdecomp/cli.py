"""Command-line front end.

Exit status: 0 success, 1 a verified property failed, 2 invalid input,
3 internal inconsistency (two independent computations disagree, or a
result certificate check failed).
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from . import charges as ch
from . import functionals as fn
from . import io
from .errors import InternalInconsistency, NoConvergence, SchemaError, ValidationError
from .forms import (
    LEBESGUE_AGREEMENT_RTOL,
    PsdForm,
    is_singular,
    lambda_max,
    lebesgue_ac_details,
    parallel_sum,
    short_form,
    short_type_decompose,
)
from .generators import random_psd
from .linalg import Tolerance, frob, hermitian, null_basis, orth_project, pinv
from .operators import krein_short, short_quadratic_sup
from .properties import run_all

log = logging.getLogger("shortdecomp")

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2, 3
SAMPLE_SEED = 0
SAMPLE_POINTS = 100


class Certificate:
    def __init__(self):
        self.residuals: dict[str, float] = {}
        self.bounds: dict[str, float] = {}

    def add(self, name: str, residual: float, bound: float):
        self.residuals[name] = float(residual)
        self.bounds[name] = float(bound)

    @property
    def passed(self) -> dict[str, bool]:
        return {k: self.residuals[k] <= self.bounds[k] for k in self.residuals}

    def ok(self) -> bool:
        return all(self.passed.values())

    def as_dict(self) -> dict:
        return {"residuals": self.residuals, "bounds": self.bounds, "pass": self.passed}


def _tol(args) -> Tolerance:
    try:
        return Tolerance(args.tol_rank, args.tol_residual)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _matrix(path, what):
    return hermitian(io.parse_matrix(io.load_json(path), what))


def _psd(path, what, tol):
    return PsdForm(_matrix(path, what), tol)


def _sample_points(n):
    rng = np.random.default_rng(SAMPLE_SEED)
    X = rng.standard_normal((SAMPLE_POINTS, n)) + 1j * rng.standard_normal((SAMPLE_POINTS, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _min_eig(M):
    return float(np.linalg.eigvalsh(M)[0])


def cmd_short(args, tol):
    t = _psd(args.a, "A", tol)
    Y = io.parse_subspace(io.load_json(args.subspace), "subspace")
    s = short_form(t, Y, tol)
    nA = frob(t.gram)
    cert = Certificate()
    cert.add("vanishes_on_subspace", frob(Y.basis.conj().T @ s.gram @ Y.basis), tol.residual_atol * (1 + nA))
    cert.add("below_t", max(0.0, -_min_eig(t.gram - s.gram)), tol.residual_atol * (1 + nA))
    cert.add("factorization_gap", frob(krein_short(t.gram, Y, tol) - s.gram), tol.residual_atol * (1 + nA))
    return {"short": io.matrix_doc(s.gram)}, cert


def cmd_parsum(args, tol):
    t, w = _psd(args.a, "A", tol), _psd(args.b, "B", tol)
    ps = parallel_sum(t, w, tol)
    T, W = t.gram, w.gram
    scale = 1 + frob(T) + frob(W)
    S = pinv(T + W, tol)
    inf_gap = 0.0
    for x in _sample_points(T.shape[0]):
        y = S @ (T @ x)
        val = float(np.vdot(x - y, T @ (x - y)).real + np.vdot(y, W @ y).real)
        inf_gap = max(inf_gap, abs(float(np.vdot(x, ps.gram @ x).real) - val))
    cert = Certificate()
    cert.add("commutativity", frob(ps.gram - parallel_sum(w, t, tol).gram), tol.residual_atol * scale)
    cert.add("below_a", max(0.0, -_min_eig(T - ps.gram)), tol.residual_atol * scale)
    cert.add("below_b", max(0.0, -_min_eig(W - ps.gram)), tol.residual_atol * scale)
    cert.add("infimum_gap", inf_gap, tol.residual_atol * scale)
    return {"parallel_sum": io.matrix_doc(ps.gram)}, cert


def cmd_lebesgue(args, tol):
    t, w = _psd(args.a, "A", tol), _psd(args.b, "B", tol)
    res = lebesgue_ac_details(t, w, tol)
    cert = Certificate()
    cert.add("short_discrepancy", res.discrepancy, LEBESGUE_AGREEMENT_RTOL * (1 + frob(t.gram)))
    return {"ac": io.matrix_doc(res.form.gram), "iterations": res.iterations}, cert


def _decomposition_certificate(A, B, ac, sing, tol):
    nA, nB = frob(A), frob(B)
    cert = Certificate()
    cert.add("sum_residual", frob(A - ac - sing), tol.residual_atol * (1 + nA))
    V = null_basis(B, tol).basis
    kern = float(np.max(np.real(np.einsum("ij,ik,kj->j", V.conj(), ac, V)), initial=0.0))
    cert.add("kernel_inclusion_max", kern, tol.rank_rtol * max(lambda_max(A), 0.0))
    ps = parallel_sum(sing, B, tol).gram
    cert.add("singularity_parallel_sum_norm", frob(ps), tol.residual_atol * (1 + nA + nB))
    # parallel sum cross-checked against the range angle; raises on a real conflict
    cert.add("singularity_not_confirmed", 0.0 if is_singular(sing, B, tol) else 1.0, 0.0)
    Y = null_basis(B, tol)
    sup_gap = 0.0
    for x in _sample_points(A.shape[0]):
        q = float(np.vdot(x, ac @ x).real)
        sup_gap = max(sup_gap, abs(short_quadratic_sup(A, Y, x, tol) - q) / (1 + float(np.vdot(x, A @ x).real)))
    cert.add("sup_formula_residual", sup_gap, tol.residual_atol)
    cert.add("factorization_gap", frob(krein_short(A, Y, tol) - ac), tol.residual_atol * (1 + nA))
    return cert


def cmd_decompose(args, tol):
    t, w = _psd(args.a, "A", tol), _psd(args.b, "B", tol)
    d = short_type_decompose(t, w, tol)
    cert = _decomposition_certificate(t.gram, w.gram, d.ac.gram, d.sing.gram, tol)
    return {"ac": io.matrix_doc(d.ac.gram), "sing": io.matrix_doc(d.sing.gram), "unique": d.unique}, cert


def cmd_krein_short(args, tol):
    A = _psd(args.a, "A", tol).gram
    M = io.parse_subspace(io.load_json(args.subspace), "subspace")
    target = M.complement() if args.range_in else M
    K = krein_short(A, target, tol)
    nA = frob(A)
    cert = Certificate()
    P = orth_project(target)
    cert.add("vanishes_on_subspace", frob(P @ K @ P), tol.residual_atol * (1 + nA))
    cert.add("factorization_gap", frob(K - short_form(A, target, tol).gram), tol.residual_atol * (1 + nA))
    cert.add("below_a", max(0.0, -_min_eig(A - K)), tol.residual_atol * (1 + nA))
    return {"short": io.matrix_doc(K), "range_in": bool(args.range_in)}, cert


def cmd_charge_decompose(args, tol):
    nu = io.parse_charge(io.load_json(args.nu), "nu")
    mu = io.parse_charge(io.load_json(args.mu), "mu")
    d = ch.charge_decompose(nu, mu, tol)
    scale = max(1.0, float(sum(nu.atom_values())))
    cert = Certificate()
    cert.add("sum_residual", float(np.max(np.abs(np.array(nu.values) - d.ll.values - np.array(d.perp.values)))),
             1e-12 * scale)
    cert.add("form_gap", d.form_gap, ch.FORM_AGREEMENT_ATOL * scale)
    cert.add("ll_not_absolutely_continuous", 0.0 if ch.is_charge_absolutely_continuous(d.ll, mu, tol) else 1.0, 0.0)
    cert.add("perp_not_singular", 0.0 if ch.are_charges_singular(d.perp, mu, tol) else 1.0, 0.0)
    space = ch.atoms(nu.ring)
    return {"atoms": list(space.atoms), "ll": io.charge_doc(d.ll), "perp": io.charge_doc(d.perp),
            "ll_atoms": list(d.ll.atom_values()), "perp_atoms": list(d.perp.atom_values())}, cert


def cmd_gns_decompose(args, tol):
    alg = io.parse_algebra(io.load_json(args.algebra), "algebra") if args.algebra else None
    f = io.parse_functional(io.load_json(args.f), alg, "f")
    g = io.parse_functional(io.load_json(args.g), alg if alg is not None else f.algebra, "g")
    d = fn.functional_decompose(f, g, tol)
    T_ll = fn.induced_gram(d.ll).gram
    fnorm = 1 + float(np.linalg.norm(f.coeffs))
    cert = Certificate()
    cert.add("sum_residual", d.sum_residual, tol.residual_atol * fnorm)
    cert.add("pi_invariance", d.invariance_residual, tol.residual_atol)
    cert.add("bridge_to_forms", frob(T_ll - fn.short_of_induced(f, g, tol).gram),
             tol.residual_atol * (1 + frob(fn.induced_gram(f).gram)))
    cert.add("riesz_residual", d.gns.riesz_residual, tol.residual_atol * fnorm)
    return {"ll": io.functional_doc(d.ll), "perp": io.functional_doc(d.perp),
            "quotient_dim": d.gns.quotient_dim}, cert


def _instance_pairs(paths, seed, tol):
    rng = np.random.default_rng(seed)
    pairs = []
    for p in paths:
        doc = io.load_json(p)
        if isinstance(doc, dict) and "a" in doc:
            A = PsdForm(hermitian(io.parse_matrix(doc["a"], f"{p}: a")), tol).gram
            B = PsdForm(hermitian(io.parse_matrix(doc.get("b", doc["a"]), f"{p}: b")), tol).gram
        else:
            A = PsdForm(hermitian(io.parse_matrix(doc, str(p))), tol).gram
            B = random_psd(rng, A.shape[0])
        if A.shape != B.shape:
            raise SchemaError(f"{p}: a and b have different sizes")
        pairs.append((A, B))
    return pairs


def cmd_verify(args, tol):
    if args.trials < 0:
        raise ValidationError("--trials must be nonnegative")
    pairs = _instance_pairs(args.instance or [], args.seed, tol)
    if args.trials == 0 and not pairs:
        log.warning("no trials and no instances: every property passes vacuously")
    results = run_all(args.seed, args.trials, tol, pairs)
    props = {k: v.as_dict() for k, v in sorted(results.items())}
    failed = sorted(k for k, v in results.items() if not v.passed)
    for k in failed:
        log.error("property %s failed: worst residual %.3e (bound %.3e)", k, results[k].worst, results[k].bound)
    out = {"seed": args.seed, "trials": args.trials, "instances": len(pairs),
           "properties": props, "failed": failed, "pass": not failed}
    return out, None


COMMANDS = {
    "short": cmd_short,
    "parsum": cmd_parsum,
    "lebesgue": cmd_lebesgue,
    "decompose": cmd_decompose,
    "krein-short": cmd_krein_short,
    "charge-decompose": cmd_charge_decompose,
    "gns-decompose": cmd_gns_decompose,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=argparse.SUPPRESS,
                        help="relative eigenvalue cutoff (default 1e-10)")
    common.add_argument("--tol-residual", type=float, default=argparse.SUPPRESS,
                        help="absolute residual bound (default 1e-9)")
    common.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="shortdecomp", parents=[common],
                                     description="Shorts of PSD forms and short-type decompositions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    p = verb("short", "short of the form A to the subspace Y (vanishes on Y)")
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--subspace", required=True, metavar="Y.json")

    p = verb("parsum", "parallel sum A : B")
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--b", required=True, metavar="B.json")

    p = verb("lebesgue", "closable part D_B A by iterated parallel sums")
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--b", required=True, metavar="B.json")

    p = verb("decompose", "A = ac + sing with ac << B and sing singular to B")
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--b", required=True, metavar="B.json")

    p = verb("krein-short", "factorized short J_A (I - P) J_A^*; vanishes on M, "
                            "or has range in M with --range-in")
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--subspace", required=True, metavar="M.json")
    p.add_argument("--range-in", action="store_true",
                   help="return the short with range inside M (the short to the complement of M)")

    p = verb("charge-decompose", "nu = nu_ll + nu_perp relative to mu")
    p.add_argument("--nu", required=True, metavar="NU.json")
    p.add_argument("--mu", required=True, metavar="MU.json")

    p = verb("gns-decompose", "f = f_ll + f_perp relative to g via the GNS construction")
    p.add_argument("--f", required=True, metavar="F.json")
    p.add_argument("--g", required=True, metavar="G.json")
    p.add_argument("--algebra", metavar="ALG.json", help="algebra, unless embedded in the functional files")

    p = verb("verify", "run the invariant suites of all modules")
    p.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    p.add_argument("--trials", type=int, default=20, help="random instances per suite (default 20)")
    p.add_argument("--instance", action="append", metavar="FILE",
                   help="extra instance: a matrix, or {\"a\": matrix, \"b\": matrix}; repeatable")
    return parser


# Applied after parsing: set_defaults would also rewrite the action objects
# shared with the subparsers, letting them clobber options given before the verb.
GLOBAL_DEFAULTS = {"tol_rank": 1e-10, "tol_residual": 1e-9, "output": "json", "verbose": False}


def _parse(parser, argv):
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    return args


def _emit(doc, mode):
    sys.stdout.write(io.canonical_json(doc) if mode == "json" else io.text_report(doc))


def main(argv=None) -> int:
    parser = build_parser()
    args = _parse(parser, argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        tol = _tol(args)
        result, cert = COMMANDS[args.verb](args, tol)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InternalInconsistency, NoConvergence) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    if args.verb == "verify":
        _emit(result, args.output)
        return EXIT_OK if result["pass"] else EXIT_VERIFY_FAILED
    result["certificate"] = cert.as_dict()
    _emit(result, args.output)
    if not cert.ok():
        bad = [k for k, v in cert.passed.items() if not v]
        print(f"error: certificate check(s) failed: {', '.join(bad)}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
