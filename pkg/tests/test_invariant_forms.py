from fractions import Fraction

import pytest

from diffcoh import invariant_forms as inv
from diffcoh.gca import FiniteDGA


@pytest.fixture(scope="module")
def P():
    return inv.polynomial_dga(5)


def test_determinant_and_pfaffian_small():
    assert inv.determinant([[1, 2], [3, 4]]) == -2
    assert inv.pfaffian([[0, 1], [-1, 0]]) == 1
    X = [[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]]
    # af - be + cd with a..f the upper-triangular entries
    assert inv.pfaffian(X) == 1 * 6 - 2 * 5 + 3 * 4
    assert inv.pfaffian(X) ** 2 == inv.determinant(X)


def test_bianchi_and_dP(P, rng):
    for _ in range(15):
        A = inv.random_matrix_form(P, rng.choice([1, 2, 3]), 1, rng)
        assert inv.bianchi_check(A)
        assert inv.dP_check(inv.curvature(A))


def test_bianchi_negative_control():
    # d(dx) = z ≠ 0, so the identity must break
    alg = FiniteDGA(["x", "y", "z"], [1, 2, 3], {"x": "y", "y": "z"})
    assert alg.check_d_squared() is not None
    assert not inv.bianchi_check(inv.MatrixForm(alg, [["x"]]))


def test_curvature_needs_one_forms(P, rng):
    with pytest.raises(inv.ShapeError):
        inv.curvature(inv.random_matrix_form(P, 2, 2, rng))


def test_orthogonal_tag_enforced(P):
    with pytest.raises(inv.ShapeError):
        inv.MatrixForm(P, [["dx1", "dx2"], ["dx2", "0"]], "orthogonal")


@pytest.mark.parametrize("n", [2, 4])
def test_pf_squared(P, rng, n):
    for _ in range(10):
        assert inv.pf_squared_check(inv.random_matrix_form(P, n, 2, rng, "orthogonal", terms=1))


@pytest.mark.parametrize("family,tag", [("chern", "general"), ("pontryagin", "orthogonal"), ("euler", "orthogonal")])
def test_whitney(P, rng, family, tag):
    for _ in range(10):
        F1 = inv.random_matrix_form(P, 2, 2, rng, tag, terms=1)
        F2 = inv.random_matrix_form(P, 2, 2, rng, tag, terms=1)
        assert inv.whitney_check(F1, F2, family)


def test_inverse_classes_symbolic():
    alg, c, ci = inv.symbolic_inverse_classes(3, 8)
    C1, C2, C3 = (alg.gen(f"C{j}") for j in (1, 2, 3))
    assert ci[2] == -C1
    assert ci[4] == -C2 - C1 * ci[2]
    assert ci[6] == -C3 - C2 * ci[2] - C1 * ci[4]
    assert (c * ci).is_one(top=8)


def test_inverse_requires_unit_leading_term():
    alg, c, _ = inv.symbolic_inverse_classes(1, 4)
    bad = inv.CharacteristicSeries(alg, {0: alg.one() * 2, 2: alg.gen("C1")})
    with pytest.raises(ValueError):
        inv.inverse_classes(bad, 4)


def test_cs_transgression_differential(P, rng):
    for f in (inv.chern_polynomial(1), inv.chern_polynomial(2), inv.trace_polynomial(2)):
        A0 = inv.random_matrix_form(P, 2, 1, rng)
        A1 = inv.random_matrix_form(P, 2, 1, rng)
        cs = inv.cs_transgression(A0, A1, f)
        assert cs.d() == f(inv.curvature(A1)) - f(inv.curvature(A0))


def test_cs_matches_classical_formula():
    alg = inv.so3_dga()
    A = inv.so3_connection(alg)
    cs = inv.cs_transgression(inv.MatrixForm.zero(alg, 3), A, inv.trace_polynomial(2))
    ref = (A * A.d()).trace() + (A * A * A).trace() * Fraction(2, 3)
    assert alg.is_exact(cs.raw - ref)


def test_variation_on_so3(rng):
    alg = inv.so3_dga()
    A = inv.so3_connection(alg)
    for _ in range(3):
        B = inv.random_matrix_form(alg, 3, 1, rng, "orthogonal")
        assert inv.variation_check([A, B], inv.pontryagin_polynomial(1))


def test_rp3():
    r = inv.rp3_phi()
    assert r.phi == Fraction(1, 2)
    assert r.coefficient == inv.FormalScalar(Fraction(-1, 2), -2)
    assert str(r) == "Phi(RP3) = 1/2"
    # a volume of 2π² would make the coefficient an integer
    assert inv.rp3_phi(volume=inv.FormalScalar(2, 2)).phi == 0


def test_formal_scalar_arithmetic():
    s = inv.FormalScalar.two_pi_i()
    assert (s * s) == inv.FormalScalar(-4, 2)
    assert (s / s).is_rational and (s / s).rational() == 1
    with pytest.raises(ValueError):
        s.rational()


def test_koszul_abelian_and_so3():
    ab = inv.koszul_suite(2, [[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)])
    assert ab.passed
    so = inv.koszul_suite(3, inv.SO3_STRUCTURE)
    assert so.passed
    assert so.basic_dims[4] == 1
    assert so.basic_dims[2] == 0


def test_invalid_structure_constants():
    bad = [[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)]
    bad[0][1][0] = Fraction(1)  # not antisymmetric
    with pytest.raises(ValueError):
        inv.check_lie(bad)
