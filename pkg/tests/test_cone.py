import random

import pytest

from stronghom.cone import (CochainComplex, CochainMap, DimensionMismatch, build_cone, cone_homology,
                            induced_cone_map, ucf_oracle)
from stronghom.fgab import FgAbGroup, cyclic, free
from stronghom.instances import point_complex, random_complex, rp2_complex
from stronghom.linalg import Mat
from stronghom.resolution import injective_coefficients
from stronghom.simplicial import (NonSimplicialMap, SimplicialComplex, circle, cochain_complex, cochain_map,
                                  point, rp2, simplex, wedge_of_rp2)


def _groups(C, G):
    return [str(cone_homology(C, G, n)) for n in range(C.top + 1)]


def test_rp2_golden_values():
    assert _groups(rp2_complex(), cyclic(2)) == ["Z/2", "Z/2", "Z/2"]
    assert _groups(rp2_complex(), free(1)) == ["Z", "Z/2", "0"]
    assert _groups(point_complex(), free(1)) == ["Z"]


def test_divisible_coefficients():
    X = build_cone(rp2_complex(), injective_coefficients(0, 1))
    assert [str(X.homology(n)) for n in range(3)] == ["Q/Z", "0", "Z/2"]


def test_cone_squares_to_zero_on_random_complexes():
    rng = random.Random(5)
    for _ in range(20):
        C = random_complex(rng)
        for G in (free(1), cyclic(6)):
            assert not build_cone(C, G).check_square_zero()


def test_dimension_mismatch_names_degree():
    with pytest.raises(DimensionMismatch, match="degree 1"):
        CochainComplex((1, 1, 1), (Mat([[0]]), Mat([[1, 1]])))


def test_ucf_oracle_agrees_on_rp2():
    ext, hom = ucf_oracle(rp2_complex(), free(1), 1)
    assert str(ext) == "Z/2" and str(hom) == "0"


def test_simplicial_frontend():
    assert [str(cochain_complex(rp2()).cohomology(n)) for n in range(3)] == ["Z", "0", "Z/2"]
    assert [str(cochain_complex(circle()).cohomology(n)) for n in range(2)] == ["Z", "Z"]
    pair = cochain_complex(simplex(2), SimplicialComplex([(0, 1), (0, 2), (1, 2)]))
    assert str(cone_homology(pair, free(1), 2)) == "Z"
    for k in (1, 2, 3):
        assert str(cone_homology(cochain_complex(wedge_of_rp2(k)), cyclic(2), 2)) == "+".join(["Z/2"] * k)


def test_cochain_maps_from_vertex_maps():
    K, P = rp2(), point()
    f = cochain_map({v: 0 for v in K.vertices}, K, P)
    assert not f.commutation_defects()
    with pytest.raises(NonSimplicialMap):
        cochain_map({0: 0}, SimplicialComplex([(0, 1)]), SimplicialComplex([(0,), (1,)]))


def test_induced_cone_map_is_chain_map():
    K, P = rp2(), point()
    f = cochain_map({v: 0 for v in K.vertices}, K, P)
    m = induced_cone_map(f, cyclic(2))
    assert not m.commutation_defects()
