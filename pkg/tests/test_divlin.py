from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from stronghom.divlin import (DivComplex, DivGroup, IncompatibleMorphism, LatticeSubgroup, NonFinitelyGenerated,
                              check_compatible, map_is_injective, map_is_surjective, maps_agree)
from stronghom.linalg import Mat

Q, QZ = False, True


def test_lattice_normal_form_is_canonical():
    a = LatticeSubgroup.from_gens(2, [], [(2, 0), (0, 3)])
    b = LatticeSubgroup.from_gens(2, [], [(2, 3), (0, 3), (4, 0)])
    assert a == b
    c = LatticeSubgroup.from_gens(2, [(1, 1)], [(F(1, 2), 0)])
    d = LatticeSubgroup.from_gens(2, [(2, 2)], [(F(1, 2), 0), (0, F(1, 2))])
    assert c == d  # (0, 1/2) = (1/2, 0) - (1/2, 1/2) + (0, 1)... modulo W
    assert c.contains((F(7, 2), 3))
    assert not c.contains((F(1, 4), 0))


vec = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(st.lists(vec, max_size=2), st.lists(vec, max_size=3), st.lists(vec, max_size=3))
def test_intersection_and_sum_laws(W, L1, L2):
    A = LatticeSubgroup.from_gens(3, W, L1)
    B = LatticeSubgroup.from_gens(3, [], L2)
    I = A.intersection(B)
    assert A.contains_subgroup(I) and B.contains_subgroup(I)
    S = A + B
    assert S.contains_subgroup(A) and S.contains_subgroup(B)
    assert (A + A) == A


@settings(max_examples=60, deadline=None)
@given(st.lists(vec, max_size=3),
       st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=2, max_size=2))
def test_preimage_is_largest_mapping_in(L, rows):
    A = LatticeSubgroup.from_gens(2, [], [v[:2] for v in L])
    M = Mat(rows, 2, 3)
    P = A.preimage(M)
    assert A.contains_subgroup(P.image(M))
    for v in P.lam:
        assert A.contains(M.apply(v))


def test_compatibility_of_rational_maps():
    qz = DivGroup((QZ,))
    q = DivGroup((Q,))
    check_compatible(Mat([[2]]), qz, qz)
    check_compatible(Mat([[F(1, 2)]]), q, qz)
    with pytest.raises(IncompatibleMorphism):
        check_compatible(Mat([[F(1, 2)]]), qz, qz)


def _q_to_qz():
    """0 -> Q -> Q/Z -> 0 placed in degrees 1, 0."""
    return DivComplex({1: DivGroup((Q,)), 0: DivGroup((QZ,))}, {1: Mat([[1]])})


def test_homology_of_q_to_qz():
    X = _q_to_qz()
    H1 = X.homology(1)
    H0 = X.homology(0)
    assert str(H1.group) == "Z"  # the kernel Z of Q -> Q/Z
    assert H0.is_trivial()


def test_divisible_homology_structure():
    X = DivComplex({0: DivGroup((QZ, Q))}, {})
    H = X.homology(0)
    assert not H.finitely_generated
    assert str(H.structure()) == "Q+Q/Z"
    with pytest.raises(NonFinitelyGenerated):
        H.group


def test_map_level_checks():
    X = DivComplex({0: DivGroup((QZ,))}, {})
    H = X.homology(0)
    assert map_is_injective(Mat([[1]]), H, H) and map_is_surjective(Mat([[1]]), H, H)
    assert not map_is_injective(Mat([[2]]), H, H)  # x2 kills 1/2 in Q/Z
    assert map_is_surjective(Mat([[2]]), H, H)
    assert maps_agree(Mat([[3]]), Mat([[1]]), DivComplex({0: DivGroup((Q,))}, {}).homology(0),
                      DivComplex({0: DivGroup((Q,))}, {}).homology(0)) is False
