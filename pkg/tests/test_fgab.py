import pytest
from hypothesis import given, settings, strategies as st

from stronghom.fgab import (FgAbGroup, FgMorphism, IllDefinedMorphism, check_exactness, cyclic, ext_group,
                            format_factors, free, hom_group, parse_factors, trivial)
from stronghom.linalg import Mat


def test_invariant_factors_are_canonical():
    g = FgAbGroup(2, Mat([[2, 0], [0, 3]]))
    assert g.invariant_factors == (6,)
    assert str(FgAbGroup(3, Mat([[4], [0], [0]]))) == "Z/4+Z+Z"
    assert str(trivial()) == "0"


def test_format_and_parse_roundtrip():
    for text in ("0", "Z", "Z/2+Z/4+Z", "Z/6"):
        assert format_factors(parse_factors(text)) == text
    with pytest.raises(ValueError):
        parse_factors("Q")


@given(st.lists(st.sampled_from([0, 2, 3, 4, 6]), max_size=4))
def test_from_factors_reproduces_factors(fs):
    g = FgAbGroup.from_factors(fs)
    tors = sorted(d for d in fs if d > 1)
    assert g.rank == fs.count(0)
    order = 1
    for d in tors:
        order *= d
    assert g.torsion_order == order


def test_hom_and_ext_golden():
    assert str(hom_group(cyclic(4), cyclic(6))) == "Z/2"
    assert str(hom_group(free(1), cyclic(6))) == "Z/6"
    assert str(hom_group(cyclic(2), free(1))) == "0"
    assert str(ext_group(cyclic(4), free(1))) == "Z/4"
    assert str(ext_group(cyclic(4), cyclic(6))) == "Z/2"
    assert str(ext_group(free(1), cyclic(2))) == "0"


def test_morphisms_kernel_cokernel():
    Z = free(1)
    f = FgMorphism(Z, Z, Mat([[2]]))
    assert f.is_injective() and not f.is_surjective()
    assert str(f.cokernel().group.canonical_form()) == "Z/2"
    g = FgMorphism(cyclic(4), cyclic(2), Mat([[1]]))
    assert str(g.kernel().group.canonical_form()) == "Z/2"


def test_ill_defined_morphism_rejected():
    with pytest.raises(IllDefinedMorphism):
        FgMorphism(cyclic(2), free(1), Mat([[1]]))


def test_check_exactness_detects_defects():
    Z, Z2 = free(1), cyclic(2)
    good = [FgMorphism(Z, Z, Mat([[2]])), FgMorphism(Z, Z2, Mat([[1]]))]
    assert check_exactness(good).exact
    bad = [FgMorphism(Z, Z, Mat([[4]])), FgMorphism(Z, Z2, Mat([[1]]))]
    rep = check_exactness(bad)
    assert not rep.exact
    assert any(kind == "homology" for _, _, kind in rep.failures())
    not_complex = [FgMorphism(Z, Z, Mat([[1]])), FgMorphism(Z, Z, Mat([[1]]))]
    assert any(kind == "composite" for _, _, kind in check_exactness(not_complex).failures())
