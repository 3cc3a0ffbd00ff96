import numpy as np
import pytest

from shortdecomp.errors import AlgebraMismatch, NotAStarAlgebra, NotPsd, NotRepresentable
from shortdecomp.functionals import (
    Functional,
    StarAlgebra,
    commutant_basis,
    functional_decompose,
    gns,
    induced_gram,
    random_positive_functional,
    short_of_induced,
)

C2 = StarAlgebra.diagonal(2)
FIXTURES = [StarAlgebra.fixture(name, p) for name, ps in
            (("diagonal", (1, 3, 5)), ("matrix", (1, 2, 3)), ("cyclic_group", (2, 3, 4)))
            for p in ps]


def test_fixture_algebras_match_matrix_models():
    # M_2 products against explicit matrices
    alg = StarAlgebra.matrix_units(2)
    def as_matrix(a):
        return np.asarray(a).reshape(2, 2)
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    np.testing.assert_allclose(as_matrix(alg.mul(a, b)), as_matrix(a) @ as_matrix(b), atol=1e-14)
    np.testing.assert_allclose(as_matrix(alg.star(a)), as_matrix(a).conj().T, atol=1e-14)
    # group algebra of Z/3: point masses convolve
    g = StarAlgebra.cyclic_group(3)
    np.testing.assert_allclose(g.mul(g.basis_element(2), g.basis_element(2)), g.basis_element(1))
    np.testing.assert_allclose(g.star(g.basis_element(1)), g.basis_element(2))


def test_algebra_validation():
    c = np.zeros((2, 2, 2))
    c[0, 0, 1] = 1.0
    c[1, 0, 0] = 1.0  # b0 b0 = b1, b1 b0 = b0: (b0 b0) b0 = b0 but b0 (b0 b0) = 0
    with pytest.raises(NotAStarAlgebra, match="associative"):
        StarAlgebra(c, np.eye(2))
    with pytest.raises(NotAStarAlgebra, match="involution"):
        StarAlgebra(StarAlgebra.diagonal(2).structure, 2 * np.eye(2))
    with pytest.raises(NotAStarAlgebra):
        StarAlgebra.fixture("quaternion", 1)


def test_induced_gram_examples():
    np.testing.assert_allclose(induced_gram(Functional(C2, [1, 2])).gram, np.diag([1, 2]))
    np.testing.assert_array_equal(induced_gram(Functional(C2, [0, 0])).gram, np.zeros((2, 2)))
    trace = Functional(StarAlgebra.matrix_units(2), [1, 0, 0, 1])
    np.testing.assert_allclose(induced_gram(trace).gram, np.eye(4), atol=0)


def test_induced_gram_convention(rng):
    # T[i, j] = f(b_i^* b_j), so that t(a, b) = b^* T a = f(b^* a)
    alg = StarAlgebra.matrix_units(2)
    f = random_positive_functional(alg, rng, rank=2)
    T = induced_gram(f).gram
    a, b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    assert abs(np.vdot(b, T @ a) - f(alg.mul(alg.star(b), a))) < 1e-12


def test_positivity_is_validated():
    with pytest.raises(NotPsd, match="not positive"):
        Functional(C2, [1, -1])


def test_gns_examples():
    data = gns(Functional(C2, [1, 2]))
    assert data.quotient_dim == 2
    np.testing.assert_allclose(data.xi_preimage, [1, 1], atol=1e-12)
    zero = gns(Functional(C2, [0, 0]))
    assert zero.quotient_dim == 0 and zero.xi.size == 0 and zero.pi.shape == (2, 0, 0)
    assert gns(Functional(C2, [1, 0])).quotient_dim == 1


def test_non_unital_functional_is_not_representable():
    # one-dimensional algebra with zero product: f(a^* a) = 0 for all a, f != 0
    null_alg = StarAlgebra(np.zeros((1, 1, 1)), np.eye(1))
    with pytest.raises(NotRepresentable):
        gns(Functional(null_alg, [1.0]))


@pytest.mark.parametrize("alg", FIXTURES, ids=repr)
def test_gns_is_a_star_representation(alg):
    rng = np.random.default_rng(alg.dim)
    for _ in range(5):
        f = random_positive_functional(alg, rng)
        data = gns(f)
        a, b = rng.standard_normal((2, alg.dim)) + 1j * rng.standard_normal((2, alg.dim))
        pa, pb = data.represent(a), data.represent(b)
        scale = 1 + np.linalg.norm(a) * np.linalg.norm(b)
        assert np.linalg.norm(data.represent(alg.mul(a, b)) - pa @ pb) <= 1e-9 * scale
        assert np.linalg.norm(data.represent(alg.star(a)) - pa.conj().T) <= 1e-9 * (1 + np.linalg.norm(a))
        # f(a) = <pi(a) xi, xi>
        rec = np.vdot(data.xi, pa @ data.xi)
        assert abs(rec - f(a)) <= 1e-9 * (1 + np.linalg.norm(f.coeffs) * np.linalg.norm(a))


def test_functional_decompose_examples(rng):
    d = functional_decompose(Functional(C2, [1, 2]), Functional(C2, [0, 1]))
    np.testing.assert_allclose(d.ll.coeffs, [0, 2], atol=1e-12)
    np.testing.assert_allclose(d.perp.coeffs, [1, 0], atol=1e-12)
    f = random_positive_functional(StarAlgebra.matrix_units(2), rng)
    g = random_positive_functional(StarAlgebra.matrix_units(2), rng, rank=2)
    d = functional_decompose(f, g)
    np.testing.assert_allclose(d.ll.coeffs, f.coeffs, atol=1e-9)
    np.testing.assert_allclose(d.perp.coeffs, 0, atol=1e-9)
    d = functional_decompose(f, Functional(f.algebra, np.zeros(4)))
    np.testing.assert_allclose(d.ll.coeffs, 0, atol=1e-12)
    np.testing.assert_allclose(d.perp.coeffs, f.coeffs, atol=1e-12)


def test_algebra_mismatch():
    with pytest.raises(AlgebraMismatch):
        functional_decompose(Functional(C2, [1, 1]), Functional(StarAlgebra.cyclic_group(2), [1, 0]))


@pytest.mark.parametrize("alg", FIXTURES, ids=repr)
def test_decomposition_matches_form_short(alg):
    rng = np.random.default_rng(10 + alg.dim)
    for _ in range(8):
        f = random_positive_functional(alg, rng)
        g = random_positive_functional(alg, rng)
        d = functional_decompose(f, g)
        assert np.max(np.abs(d.ll.coeffs + d.perp.coeffs - f.coeffs)) <= 1e-9
        assert d.invariance_residual <= 1e-9
        T = induced_gram(d.ll).gram
        S = short_of_induced(f, g).gram
        assert np.linalg.norm(T - S) <= 1e-9 * (1 + np.linalg.norm(induced_gram(f).gram))


@pytest.mark.parametrize("alg", FIXTURES[3:6], ids=repr)
def test_projection_commutes_with_representation(alg):
    rng = np.random.default_rng(3)
    f = random_positive_functional(alg, rng, rank=alg.dim)
    g = random_positive_functional(alg, rng)
    d = functional_decompose(f, g)
    P = d.projection
    for p in d.gns.pi:
        assert np.linalg.norm(P @ p - p @ P) <= 1e-9
    # P lies in the commutant
    basis = commutant_basis(d.gns.pi)
    coords = np.array([np.vdot(X, P) for X in basis])
    assert np.linalg.norm(np.tensordot(coords, basis, axes=1) - P) <= 1e-9
