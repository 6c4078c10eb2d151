import pytest

from stronghom.cone import cone_div_homology
from stronghom.fgab import FgMorphism, cyclic, free
from stronghom.instances import (chain_point_system, constant_system, one_element_system, point_complex,
                                 pseudo_circle_poset, rp2_complex, system_suite, wedge_system)
from stronghom.linalg import Mat
from stronghom.report import Report
from stronghom.resolution import parse_coefficients
from stronghom.verify import (THEOREMS, OutOfScope, iso_check, verify_corollary1, verify_lemma1,
                              verify_lemma2_3, verify_lemma4, verify_mardesic, verify_milnor, verify_theorem1,
                              verify_theorem2, verify_ucf)

RP2 = one_element_system(rp2_complex())


@pytest.mark.parametrize("check", [verify_lemma1, verify_corollary1, verify_lemma2_3, verify_theorem1,
                                   verify_theorem2, verify_milnor, verify_mardesic])
def test_checks_pass_on_small_systems(check):
    for S in (chain_point_system(), RP2, system_suite(1, seed=4)[0]):
        rep = check(S, cyclic(2))
        assert rep.passed, str(rep)


def test_report_metadata():
    rep = verify_theorem1(RP2, cyclic(2), seed=9)
    assert rep.meta["seed"] == 9 and rep.meta["theorem"] == "theorem1"
    assert len(rep.meta["instance_digest"]) == 16
    assert rep.meta["infinity_homology"][2] == "Z/2"
    assert verify_theorem1(RP2, cyclic(2)).meta["instance_digest"] == rep.meta["instance_digest"]


def test_divisible_coefficients_accepted():
    QZ = parse_coefficients("Q/Z")
    assert verify_lemma1(wedge_system(2), QZ).passed
    assert verify_corollary1(wedge_system(2), QZ).passed


def test_nondirected_poset_is_out_of_scope():
    S = constant_system(pseudo_circle_poset(), point_complex())
    for check in (verify_lemma1, verify_theorem1, verify_milnor):
        with pytest.raises(OutOfScope):
            check(S, free(1))


def test_failing_iso_reports_a_witness():
    H = cone_div_homology(rp2_complex(), cyclic(2), 0)
    rep = Report("zero map")
    assert not iso_check(rep, "zero", Mat.zeros(H.cycles.n, H.cycles.n), H, H)
    bad = rep.failures()
    assert bad and all(c.witness is not None for c in bad)


def test_lemma4_connecting_map_on_rp2():
    Z, Z2 = free(1), cyclic(2)
    rep = verify_lemma4(RP2, FgMorphism(Z, Z, Mat([[2]])), FgMorphism(Z, Z2, Mat([[1]])))
    assert rep.passed, str(rep)
    assert any(not v["zero"] for v in rep.meta["connecting"].values())


def test_ucf_and_registry():
    for G in (free(1), cyclic(2), cyclic(4)):
        assert verify_ucf(rp2_complex(), G).passed
    with pytest.raises(OutOfScope):
        verify_ucf(rp2_complex(), parse_coefficients("Q/Z"))
    assert {"theorem1", "lemma4", "milnor", "ucf"} <= set(THEOREMS)
