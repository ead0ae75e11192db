from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffcoh import linalg as la
from diffcoh.abelian_core import (
    FgAbelianGroup,
    MixedComplex,
    SquareZeroError,
    homology_Z,
    mixed_homology,
    smith_normal_form,
)


def test_snf_coprime_diagonal():
    assert smith_normal_form([[2, 0], [0, 3]]).diagonal == (1, 6)


def test_snf_small_example():
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == (2, 4)


def test_snf_zero_matrix():
    s = smith_normal_form([[0, 0, 0], [0, 0, 0]])
    assert s.diagonal == (0, 0)
    assert s.rank == 0


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_snf_factorization(m):
    s = smith_normal_form(m)
    rows, cols = len(m), len(m[0])
    U, D, V = ([list(r) for r in M.entries] for M in (s.U, s.D, s.V))
    assert la.matmul(la.matmul(U, m, rows), V, cols) == D
    assert abs(la.det(U)) == 1 and abs(la.det(V)) == 1
    d = [x for x in s.diagonal if x]
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


def test_homology_circle_and_cokernel():
    # simplicial circle: 3 vertices, 3 edges
    d0 = [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]]
    H0 = homology_Z([], d0, 3)
    H1 = homology_Z(d0, [], 3)
    assert (H0.rank, H0.torsion) == (1, ())
    assert (H1.rank, H1.torsion) == (1, ())
    # Z --2--> Z has cokernel Z/2
    H = homology_Z([[2]], [], 1)
    assert str(H) == "ℤ/2"


def test_torsion_chain_enforced():
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (4, 6))
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (1,))


def test_coordinates_modulo_torsion():
    H = homology_Z([[3]], [], 1)
    assert H.coordinates((4,)) == (1,)
    assert H.is_zero((6,))


def test_square_zero_rejected():
    cx = MixedComplex([1, 1, 1], [0, 0, 0], zz={0: [[1]], 1: [[1]]})
    with pytest.raises(SquareZeroError):
        cx.check_square_zero()


def test_mixed_circle_group():
    # Z --incl--> Q : cokernel is the torus R/Z in degree 1
    cx = MixedComplex([1, 0], [0, 1], zq={0: [[Fraction(1)]]})
    G = mixed_homology(cx, 1)
    assert G.torus_dim == 1 and G.rank == 0 and G.vector_dim == 0
