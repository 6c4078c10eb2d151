import pytest

from stronghom.fgab import FgMorphism, cyclic, free
from stronghom.instances import pseudo_circle_poset
from stronghom.limits import GroupSystem, PeriodicTower, finite_tower_limits, lim_i, ml_analyze, order_complex
from stronghom.linalg import Mat
from stronghom.prosys import FinitePoset


def test_pseudo_circle_has_lim1():
    P = pseudo_circle_poset()
    S = GroupSystem.constant(P, free(1))
    assert str(lim_i(S, 0)) == "Z"
    assert str(lim_i(S, 1)) == "Z"
    assert str(lim_i(S, 2)) == "0"
    assert len(order_complex(P).faces) == 8


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_higher_limits_vanish_on_directed_posets(k):
    P = FinitePoset(list(range(k)), [(i, k - 1) for i in range(k - 1)])
    S = GroupSystem.constant(P, cyclic(6))
    assert str(lim_i(S, 0)) == "Z/6"
    for i in (1, 2):
        assert lim_i(S, i).is_trivial()


def test_nonconstant_system():
    P = FinitePoset([0, 1], [(0, 1)])
    Z = free(1)
    S = GroupSystem(P, {0: cyclic(2), 1: Z}, {(0, 1): FgMorphism(Z, cyclic(2), Mat([[1]]))})
    assert S.check().passed
    assert str(lim_i(S, 0)) == "Z"


def _tower(rows, factors=None):
    from stronghom.fgab import FgAbGroup
    A = FgAbGroup.from_factors(factors or [0] * len(rows))
    return PeriodicTower(FgMorphism(A, A, Mat(rows)))


@pytest.mark.parametrize("rows,factors,expected", [
    ([[1]], None, "ML; lim = Z; lim1 = 0"),
    ([[2]], None, "not-ML; lim = 0; lim1 = nonzero-unrepresentable"),
    ([[2]], [4], "ML; lim = 0; lim1 = 0"),
    ([[3]], [4], "ML; lim = Z/4; lim1 = 0"),
    ([[2, 1], [1, 1]], None, "ML; lim = Z+Z; lim1 = 0"),
    ([[2, 0], [0, 1]], None, "not-ML; lim = Z; lim1 = nonzero-unrepresentable"),
    ([[0]], None, "ML; lim = 0; lim1 = 0"),
])
def test_ml_analyzer_golden(rows, factors, expected):
    assert str(ml_analyze(_tower(rows, factors))) == expected


def test_ml_stable_index():
    res = ml_analyze(_tower([[2]], [8]))
    assert res.mittag_leffler and res.stable_from == 3


def test_finite_tower_limits():
    Z = free(1)
    lim, lim1, _, _ = finite_tower_limits([Z, Z, Z], [FgMorphism(Z, Z, Mat([[2]]))] * 2)
    assert str(lim.group.canonical_form()) == "Z"
    assert lim1.group.is_trivial()
