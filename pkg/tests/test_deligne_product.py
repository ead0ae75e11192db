import random
from fractions import Fraction

import pytest

from diffcoh import cech_deligne as cd
from diffcoh import deligne_product as dp


@pytest.mark.parametrize("k,l", [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1)])
def test_leibniz(k, l, rng):
    m = cd.circle_model()
    cx = cd.DeligneComplex(m, 1, 3)
    X, Y = cd.DeligneComplex(m, k, 2), cd.DeligneComplex(m, l, 2)
    Z = cd.DeligneComplex(m, k + l, 6)
    for n in range(3):
        for q in range(3):
            x, y = X.random_cochain(n, rng), Y.random_cochain(q, rng)
            lhs = Z.D(dp.cup(cx, x, y))
            rhs = dp.cup(cx, X.D(x), y) + dp.cup(cx, x, Y.D(y)).scale(-1 if n % 2 else 1)
            assert lhs == rhs


def test_integer_times_form_on_right_vanishes_for_positive_weight():
    m = cd.circle_model()
    cx = cd.DeligneComplex(m, 1, 3)
    f = {V: cx.alg.parse("t") for V in m.nerve.of_dim(0)}
    x = cd.DeligneCochain(1, 1, {}, {0: f})
    y = cd.DeligneCochain(1, 1, {(0, 1): 1}, {})
    assert dp.cup(cx, x, y).is_zero()


@pytest.fixture(scope="module")
def circle_B():
    cx = cd.DeligneComplex(cd.circle_model(), 2, 2)
    return cx, dp.solve_homotopy_B(cx)


def test_homotopy_residuals_vanish(circle_B):
    _, B = circle_B
    for key in B.values:
        assert not B.residual(*key)


def test_triple_product_is_cocycle(circle_B, rng):
    cx, B = circle_B
    for _ in range(25):
        n1 = rng.randint(0, 1)
        n2 = rng.randint(0, 1 - n1)
        t1 = dp.random_triple(cx, n1, rng, B.basis)
        t2 = dp.random_triple(cx, n2, rng, B.basis)
        assert dp.triple_is_cocycle(cx, dp.cup_triples(cx, t1, t2, B))


def test_non_cocycle_triple_rejected(circle_B):
    cx, B = circle_B
    bad = dp.Triple(1, {(0, 1): 1}, {}, {})
    good = dp.random_triple(cx, 0, random.Random(0), B.basis)
    assert not dp.triple_is_cocycle(cx, bad)
    with pytest.raises(cd.ModelError):
        dp.cup_triples(cx, bad, good, B)


def test_triple_to_deligne_is_cocycle(circle_B, rng):
    cx, B = circle_B
    for n in (0, 1):
        t = dp.random_triple(cx, n, rng, B.basis)
        x = dp.triple_to_deligne(cx, t)
        assert cd.DeligneComplex(cx.model, n, 3).is_cocycle(x)


@pytest.mark.slow
def test_calibrated_products_agree_on_torus(rng):
    cx = cd.DeligneComplex(cd.torus_model(), 2, 2)
    B = dp.calibrate_homotopy(dp.solve_homotopy_B(cx))
    for _ in range(4):
        n1 = rng.choice([0, 1, 2])
        n2 = rng.choice([d for d in range(4) if d + n1 <= 2])
        t1 = dp.random_triple(cx, n1, rng, B.basis)
        t2 = dp.random_triple(cx, n2, rng, B.basis)
        assert dp.compatibility_report(cx, t1, t2, B).agree


def test_commutativity_defect_is_coboundary():
    m = cd.circle_model()
    C1 = cd.DeligneComplex(m, 1, 2)
    G = C1.group(1)
    reps = [C1.cochain(1, gx, gy) for gx, gy in G.gen_reps]
    for x in reps:
        for y in reps:
            assert dp.commutativity_defect(C1, x, y).is_coboundary


def test_flat_with_flat_product_on_point():
    # ℝ/ℤ ⌣ ℝ/ℤ lands in Ĥ²(pt) = 0
    m = cd.point_model()
    C1 = cd.DeligneComplex(m, 1)
    x = cd.DeligneCochain(1, 1, {}, {0: {(0,): C1.alg.const(Fraction(1, 3))}})
    z = dp.cup(C1, x, x)
    assert cd.DeligneComplex(m, 2, 2).is_cocycle(z)
