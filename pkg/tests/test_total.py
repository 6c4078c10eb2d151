import random

import pytest

from stronghom.fgab import cyclic, free
from stronghom.instances import (chain_point_system, collapse_morphism, constant_system, one_element_system,
                                 point_complex, pseudo_circle_poset, rp2_complex, system_suite)
from stronghom.prosys import FinitePoset, chains, is_degenerate, validate_system
from stronghom.total import (TotalFamily, TruncatedTotal, build_total, h_map, height_tower, induced_system_map,
                             projection_matrix)


def test_poset_basics():
    P = FinitePoset([0, 1, 2], [(0, 1), (1, 2)])
    assert P.le(0, 2) and P.height == 2 and P.maximum == 2
    assert chains(P, 2) == [(0, 1, 2)]
    assert len(chains(P, 1, strict=False)) == 6
    assert is_degenerate((0, 0, 1)) and not is_degenerate((0, 1))
    with pytest.raises(ValueError):
        FinitePoset([0, 1], [(0, 1), (1, 0)])
    Q = pseudo_circle_poset()
    assert not Q.directed and Q.height == 1


def test_validate_system_flags_noncommuting_bondings():
    assert validate_system(chain_point_system()).passed
    assert all(validate_system(S).passed for S in system_suite(5, seed=3))


def test_total_is_a_complex():
    for S in system_suite(6, seed=11):
        for G in (free(1), cyclic(2)):
            T = build_total(S, G, None)
            for n in range(T.lo + 1, T.hi + 1):
                assert (T.boundary(n) @ T.boundary(n + 1)).is_zero()


def test_chain_point_golden_tower():
    fam = TotalFamily(chain_point_system(), free(1))
    tower = height_tower(fam.system, free(1), 0, 3, fam)
    assert tower.labels() == ["Z"] * 4
    assert tower.stable_from == 1
    full = fam.full
    assert [str(full.homology(n)) for n in range(full.lo, full.hi + 1)] == ["0", "0", "Z"]


def test_h_map_is_a_chain_map():
    for S in system_suite(5, seed=7):
        T = TotalFamily(S, cyclic(2)).full
        h = h_map(T)
        L = T.cones.cones[S.poset.maximum]
        for n in range(T.lo + 1, T.hi + 1):
            assert T.boundary(n) @ h.at(n) == h.at(n - 1) @ L.boundary(n)


def test_projections_commute_with_boundaries():
    fam = TotalFamily(system_suite(1, seed=2)[0], free(1))
    hi, lo = fam.T(1), fam.T(0)
    for n in range(hi.lo + 1, hi.hi + 1):
        P0, P1 = projection_matrix(hi, lo, n - 1), projection_matrix(hi, lo, n)
        assert P0 @ hi.boundary(n) == lo.boundary(n) @ P1


def test_unnormalized_truncation_differs_from_normalized():
    """A one-element system: the unnormalized T(1) carries an extra copy of the cone in degree -1."""
    S = one_element_system(point_complex())
    norm = TotalFamily(S, free(1), True).T(1)
    raw = TotalFamily(S, free(1), False).T(1)
    assert str(norm.homology(-1)) == "0"
    assert str(raw.homology(-1)) == "Z"
    # the height images still agree
    for r in range(3):
        assert str(TotalFamily(S, free(1), True).height_homology(r, 0)) == \
            str(TotalFamily(S, free(1), False).height_homology(r, 0))


def test_full_unnormalized_total_refused():
    with pytest.raises(ValueError):
        TruncatedTotal(TotalFamily(chain_point_system(), free(1)).cones, None, normalized=False)


def test_induced_map_of_collapse():
    F = collapse_morphism()
    assert not F.check()
    m = induced_system_map(F, cyclic(2), 0)
    assert m.is_injective()
