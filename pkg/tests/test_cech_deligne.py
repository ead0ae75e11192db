from fractions import Fraction

import pytest

from diffcoh import cech_deligne as cd


@pytest.mark.parametrize("name", ["point", "circle", "torus"])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_D_squared_vanishes(name, k, rng):
    cx = cd.DeligneComplex(cd.MODELS[name](), k, 2)
    for n in range(0, cx.top_degree):
        for _ in range(4):
            x = cx.random_cochain(n, rng)
            assert cx.D(cx.D(x)).is_zero()


def test_circle_identity_map_is_a_cocycle():
    # the coordinate t on every chart; the jump on U0∩U2 is absorbed by n
    cx = cd.DeligneComplex(cd.circle_model(), 1, 2)
    f = {V: cx.alg.parse("t") for V in cx.nerve.of_dim(0)}
    x = cd.DeligneCochain(1, 1, {(0, 2): 1}, {0: f})
    assert cx.is_cocycle(x)
    assert not cx.is_cocycle(cd.DeligneCochain(1, 1, {(0, 2): -1}, {0: f}))
    e = cx.element(x)
    assert abs(e.free[0]) == 1 and e.torus == (0,)


@pytest.mark.parametrize(
    "name,k,expected",
    [
        ("point", 0, "ℤ"),
        ("point", 1, "ℝ/ℤ"),
        ("point", 2, "0"),
        ("circle", 1, "ℤ ⊕ ℝ/ℤ"),
        ("circle", 2, "ℝ/ℤ"),
        ("torus", 1, "ℤ^2 ⊕ ℝ/ℤ"),
        ("torus", 2, "ℤ ⊕ (ℝ/ℤ)^2"),
    ],
)
def test_cohomology_strings(name, k, expected):
    assert str(cd.deligne_cohomology(cd.MODELS[name](), k)) == expected


@pytest.mark.parametrize("name", ["point", "circle", "torus"])
@pytest.mark.parametrize("k", [1, 2])
def test_hexagon(name, k):
    rep = cd.verify_hexagon(cd.MODELS[name](), k)
    assert rep.passed, str(rep)
    names = {c.name for c in rep.checks}
    assert {"curv∘ι = d", "cc∘flat = −Bock", "ker curv = im flat", "ker cc = im ι"} <= names
    assert str(rep).endswith("exactness: PASS")


def test_sphere_is_refused():
    m = cd.sphere2_model()
    assert not m.good
    with pytest.raises(cd.ModelError):
        cd.verify_hexagon(m, 1)


def test_transitions_must_satisfy_cocycle_condition():
    nerve = cd.Nerve.from_maximal(3, [(0, 1, 2)])
    tr = {(0, 1): ([[1]], [0]), (1, 2): ([[1]], [0]), (0, 2): ([[1]], [1])}
    with pytest.raises(cd.ModelError):
        cd.ChartModel("bad", nerve, ("t",), tr)


def test_iota_rejects_non_global_form():
    cx = cd.DeligneComplex(cd.circle_model(), 2)
    with pytest.raises(cd.ModelError):
        cx.uniform_form("t*dt")


@pytest.mark.parametrize("a", [Fraction(1, 3), Fraction(7, 5), Fraction(-2, 9), Fraction(4)])
def test_fiber_integration(a):
    cx = cd.DeligneComplex(cd.circle_model(), 2)
    y = cd.fiber_integrate_circle(cx, cx.iota(cx.uniform_form(f"{a}*dt")))
    v = y.forms.get(0, {}).get((0,))
    got = v.constant_term() if v is not None else Fraction(0)
    assert got % 1 == a % 1


def test_fiber_integration_needs_product_model():
    cx = cd.DeligneComplex(cd.torus_model(), 2)
    with pytest.raises(cd.ModelError):
        cd.fiber_integrate_circle(cx, cx.zero(2))


def test_curvature_of_iota_is_d():
    cx = cd.DeligneComplex(cd.torus_model(), 2)
    names = cx.model.coords
    form = cx.uniform_form(f"3*d{names[0]} + 1/2*d{names[1]}")
    assert cx.curv(cx.iota(form)) == cx.d_form(form)
