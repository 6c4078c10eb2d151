import pytest

from stronghom.fgab import FgAbGroup, FgMorphism, cyclic, free
from stronghom.linalg import Mat
from stronghom.resolution import (InexactSequence, InjectiveResolution, build_resolution, horseshoe,
                                  injective_coefficients, parse_coefficients, resolution_horseshoe,
                                  verify_resolution)


@pytest.mark.parametrize("factors", [[0], [2], [0, 4], [6], [0, 0, 3], []])
def test_canonical_resolutions_verify(factors):
    R = build_resolution(FgAbGroup.from_factors(factors))
    assert verify_resolution(R).passed


def test_noncanonical_presentation():
    # Z^2 / <(2, 2)> = Z + Z/2
    G = FgAbGroup(2, Mat([[2], [2]]))
    R = build_resolution(G)
    assert verify_resolution(R).passed
    assert R.I0.q_rank == 1 and R.I0.qz_rank == 1


def test_z_plus_z4_shapes():
    R = parse_coefficients("Z+Z/4")
    assert (R.I0.q_rank, R.I0.qz_rank, R.I1.q_rank, R.I1.qz_rank) == (1, 1, 0, 2)


def test_tampered_beta_fails_with_witness():
    R = build_resolution(free(1))
    bad = InjectiveResolution(R.G, R.I0, R.I1, R.alpha, Mat([[0]]))
    rep = verify_resolution(bad)
    assert not rep.passed
    assert all(c.witness is not None for c in rep.failures())


def test_injective_coefficients():
    R = injective_coefficients(1, 1)
    assert R.injective_type and R.I1.dim == 0
    assert verify_resolution(R).passed
    assert parse_coefficients("Q/Z").I0.qz_rank == 1


@pytest.mark.parametrize("seq", [
    ((0,), (0,), (2,), [[2]], [[1]]),            # 0 -> Z -> Z -> Z/2 -> 0
    ((2,), (4,), (2,), [[2]], [[1]]),            # 0 -> Z/2 -> Z/4 -> Z/2 -> 0
    ((0,), (0, 2), (2,), [[1], [0]], [[0, 1]]),  # split
    ((), (3,), (3,), Mat.zeros(1, 0), [[1]]),     # 0 -> 0 -> G -> G -> 0
])
def test_horseshoe_diagram_commutes(seq):
    a, b, c, phi, psi = seq
    A, B, C = (FgAbGroup.from_factors(x) for x in (a, b, c))
    phi = phi if isinstance(phi, Mat) else Mat(phi)
    hs = horseshoe(FgMorphism(A, B, phi), FgMorphism(B, C, Mat(psi)))
    rep = hs.check()
    assert rep.passed, str(rep)


def test_horseshoe_middle_for_times_two():
    Z = free(1)
    hs = horseshoe(FgMorphism(Z, Z, Mat([[2]])), FgMorphism(Z, cyclic(2), Mat([[1]])))
    assert hs.middle.beta.nrows == 2 and hs.middle.beta[1, 0] == 0  # upper triangular


def test_inexact_sequence_rejected():
    Z = free(1)
    with pytest.raises(InexactSequence):
        horseshoe(FgMorphism(Z, Z, Mat([[4]])), FgMorphism(Z, cyclic(2), Mat([[1]])))


def test_resolution_horseshoe_checks():
    for f in ([0], [2], [0, 4]):
        assert resolution_horseshoe(build_resolution(FgAbGroup.from_factors(f))).check().passed
