import random
from fractions import Fraction

import pytest

from diffcoh import sugawara as sg


@pytest.mark.parametrize("name", ["heisenberg", "sl2", "so3"])
def test_builtin_algebras_are_lie(name):
    assert sg.builtin_algebra(name).check() == []


def test_casimir_sl2():
    A = sg.sl2()
    assert sg.casimir_is_central(A)
    cas = sg.casimir(A)
    e, h, f = (A.index(x) for x in "ehf")
    assert cas[(e, f)] == 1 and cas[(f, e)] == 1 and cas[(h, h)] == Fraction(1, 2)


def test_casimir_basis_independent():
    A = sg.sl2()
    P = sg.random_invertible(3, random.Random(1))
    assert sg.casimir_in_basis(A, P) == sg.casimir(A)


@pytest.mark.parametrize(
    "alg,expected",
    [(sg.sl2(), 2), (sg.heisenberg_algebra(), 0), (sg.sl2(2), 1), (sg.so3(), -1)],
)
def test_lambda_B(alg, expected):
    assert sg.lambda_B(alg) == expected


def test_kac_moody_jacobi_and_cocycle():
    A = sg.sl2()
    assert sg.km_jacobi_check(A)
    e, f = A.index("e"), A.index("f")
    z = sg.km_bracket(sg.LoopGenerator(e, 2), sg.LoopGenerator(f, -2), A)
    assert z.central == 2  # m · B(e, f)


def test_fock_basis_size():
    assert len(sg.fock_basis(10)) == 139
    assert [sum(1 for m in sg.fock_basis(6) if sg.mono_energy(m) == n) for n in range(7)] == [1, 1, 2, 3, 5, 7, 11]


def test_heisenberg_modes_on_vacuum():
    vac = {(): Fraction(1)}
    for m in (1, 2, 3):
        assert not sg.fock_mode(m, vac)
        # u_m kills the vacuum, so [u_m, u_-m] = m reduces to u_m u_-m
        lhs = {}
        for mono, c in sg.fock_mode(-m, vac).items():
            for k, v in sg.fock_mode(m, {mono: c}).items():
                lhs[k] = lhs.get(k, 0) + v
        assert lhs == {(): Fraction(m)}


@pytest.mark.parametrize("m,n", [(1, -1), (2, -2), (3, -3), (2, 1), (0, 3), (-1, -2)])
def test_virasoro_single(m, n):
    assert sg.virasoro_check(m, n, 8)


def test_virasoro_with_shift_and_hbar():
    assert sg.virasoro_check(2, -2, 8, mu=Fraction(1, 3), hbar=Fraction(5))
    assert sg.l0_spectrum_check(6, Fraction(2), Fraction(3))


def test_hbar_zero_rejected():
    with pytest.raises(sg.LieError):
        sg.sugawara_heisenberg(1, 4, hbar=0)


def test_window_too_small_rejected():
    with pytest.raises(sg.WindowError):
        sg.virasoro_check(-3, -3, 4)


def test_central_value_half():
    N = 10
    L2, Lm2, L0 = (sg.sugawara_heisenberg(k, N) for k in (2, -2, 0))
    assert sg.central_value(L2, Lm2, L0, 2, sg.safe_window(N, 2, -2)) == Fraction(1, 2)
    assert sg.central_charge_from(Fraction(1, 2), 2) == 1


def test_virasoro_jacobi():
    assert sg.virasoro_jacobi_check(lambda k: sg.sugawara_heisenberg(k, 8), 1, -2, 1, 8)


@pytest.fixture(scope="module")
def vacuum():
    return sg.verma_truncation(sg.sl2(), 1, None, 4)


def test_graded_dims_match_oracle(vacuum):
    assert vacuum.graded_dims() == sg.graded_dims_oracle(3, 1, 4) == [1, 3, 9, 22, 51]


def test_central_element_acts_as_level(vacuum):
    assert vacuum.central_is_scalar()


@pytest.mark.parametrize("m,n", [(1, -1), (2, -2), (1, 0)])
def test_t_commutator(vacuum, m, n):
    assert sg.t_commutator_check(vacuum, m, n)


def test_sugawara_central_charge(vacuum):
    assert sg.extract_central_charge(vacuum) == 1
    assert sg.central_charge_formula(sg.sl2(), 1) == 1
    assert sg.central_charge_formula(sg.sl2(), 2) == Fraction(3, 2)


def test_critical_level_rejected():
    V = sg.verma_truncation(sg.sl2(), -2, None, 1)
    with pytest.raises(sg.CriticalLevel):
        sg.sugawara_general(V, 0)


def test_weyl_module_and_basis_independence():
    A = sg.sl2()
    V = sg.verma_truncation(A, 1, 1, 3)
    assert sg.t_commutator_check(V, 1, -1)
    P = sg.random_invertible(3, random.Random(3))
    assert sg.sugawara_general(V, 1, P).cols == sg.sugawara_general(V, 1).cols


def test_bad_representation_rejected():
    A = sg.sl2()
    assert not sg.check_rep(A, sg.scalar_rep(A, [1, 1, 1]))


def test_heisenberg_reduction():
    assert sg.heisenberg_reduction_check(5, Fraction(1, 2))
