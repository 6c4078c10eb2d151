"""Checkers that run each comparison result on a concrete finite instance.

Every checker returns a :class:`~stronghom.report.Report` whose ``meta``
carries the theorem id, an instance digest, the seed (if any) and the
engine version.  Isomorphisms are checked on explicit maps: kernel and
cokernel of an FgMorphism when the groups are finitely generated, and
subgroup comparisons in the divisible setting otherwise.  Instances outside
a theorem's hypotheses raise :class:`OutOfScope` instead of being reported.
"""

from __future__ import annotations

from typing import Union

from . import __version__
from .cone import (CochainComplex, build_cone, coefficient_cone_matrix, cone_div_homology, resolve,
                   ucf_oracle)
from .divlin import (DivHomology, LatticeSubgroup, map_is_injective, map_is_surjective,
                     map_is_well_defined, maps_agree)
from .fgab import FgAbGroup, FgMorphism, check_exactness, format_factors
from .linalg import Mat
from .prosys import DirectSystem, validate_system
from .report import Report
from .resolution import (InexactSequence, InjectiveResolution, horseshoe, resolution_horseshoe)
from .total import (TotalFamily, cone_lim_subquotient, fg_map, h_map, height0_matrix,
                    total_coefficient_matrix)

__all__ = [
    "OutOfScope", "THEOREMS", "verify_lemma1", "verify_corollary1", "verify_lemma2_3", "verify_theorem1",
    "verify_lemma4", "verify_theorem2", "verify_ucf", "verify_milnor", "verify_mardesic", "iso_check",
    "instance_digest",
]


class OutOfScope(ValueError):
    """The instance does not meet the hypotheses of the requested check."""


Coefficients = Union[FgAbGroup, InjectiveResolution]


def instance_digest(S: DirectSystem | None, R: InjectiveResolution | None = None, extra=None) -> str:
    from .instance_io import digest, system_to_dict
    payload = {"system": system_to_dict(S) if S is not None else None,
               "coefficients": _coeff_label(R) if R is not None else None,
               "extra": extra}
    return digest(payload)


def _coeff_label(R: InjectiveResolution) -> str:
    return f"{R.label()} | I0={R.I0} I1={R.I1} beta={R.beta.tolist()}"


def _new_report(theorem: str, S: DirectSystem | None, R: InjectiveResolution | None,
                seed: int | None, extra=None) -> Report:
    rep = Report(theorem)
    rep.meta.update({
        "theorem": theorem,
        "engine_version": __version__,
        "instance_digest": instance_digest(S, R, extra),
        "seed": seed,
    })
    if R is not None:
        rep.meta["coefficients"] = R.label()
    return rep


def _require_directed(S: DirectSystem, what: str) -> None:
    if not S.poset.directed:
        raise OutOfScope(f"{what} needs a directed poset (one with a maximum element)")


def _degrees(T) -> range:
    return range(T.lo, T.hi + 1)


# ---------------------------------------------------------------------------
# map-level isomorphism checks


def _outside(big: LatticeSubgroup, small: LatticeSubgroup):
    """Some generator of ``big`` that ``small`` misses (None if ``big ⊆ small``)."""
    for v in big.W:
        if not small.in_subspace(v):
            return {"subspace_direction": v}
    for v in big.lam:
        if not small.contains(v):
            return {"element": v}
    return None


def iso_check(rep: Report, name: str, matrix: Mat, source: DivHomology, target: DivHomology) -> bool:
    """Record whether ``matrix`` induces an isomorphism ``source -> target``."""
    if source.finitely_generated and target.finitely_generated:
        try:
            f = fg_map(matrix, source, target)
        except ValueError as e:
            return rep.add(f"{name}: well defined", False, str(e), witness=matrix)
        ker, cok = f.kernel(), f.cokernel()
        ok_k = ker.group.is_trivial()
        ok_c = cok.group.is_trivial()
        detail = f"{source.group.canonical_form()} -> {target.group.canonical_form()}"
        kw = ker.lifts.columns()[0] if not ok_k else None
        cw = cok.lifts.columns()[0] if not ok_c else None
        rep.add(f"{name}: injective", ok_k, detail, witness=kw)
        return rep.add(f"{name}: surjective", ok_c, detail, witness=cw) and ok_k
    if not map_is_well_defined(matrix, source, target):
        return rep.add(f"{name}: well defined", False, witness=_outside(source.cycles.image(matrix),
                                                                       target.cycles))
    detail = f"{source.structure()} -> {target.structure()}"
    inj = map_is_injective(matrix, source, target)
    kw = None
    if not inj:
        kw = _outside(target.bounds.preimage(matrix).intersection(source.cycles), source.bounds)
    surj = map_is_surjective(matrix, source, target)
    sw = None if surj else _outside(target.cycles, source.cycles.image(matrix) + target.bounds)
    rep.add(f"{name}: injective", inj, detail, witness=kw)
    rep.add(f"{name}: surjective", surj, detail, witness=sw)
    return inj and surj


# ---------------------------------------------------------------------------
# projections from the infinite stage


def verify_lemma1(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                  family: TotalFamily | None = None) -> Report:
    """Every projection ``H̄∞_n -> H̄(r)_n`` is bijective, ``r = 0..height+1``."""
    _require_directed(S, "the height-projection check")
    R = resolve(G)
    rep = _new_report("lemma1", S, R, seed)
    rep.meta["injective_coefficients"] = R.injective_type
    fam = family or TotalFamily(S, R)
    full = fam.full
    for r in range(S.poset.height + 2):
        for n in _degrees(full):
            iso_check(rep, f"r={r} n={n}", fam.infinity_matrix(r, n), full.homology(n),
                      fam.height_homology(r, n))
    return rep


def verify_corollary1(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                      family: TotalFamily | None = None) -> Report:
    """``H̄∞_n -> lim H_n(cone_λ)`` factors through height 0 and is bijective."""
    _require_directed(S, "the projection to the limit")
    R = resolve(G)
    rep = _new_report("corollary1", S, R, seed)
    fam = family or TotalFamily(S, R)
    full, T0 = fam.full, fam.T(0)
    for n in _degrees(full):
        lim, blocks = cone_lim_subquotient(fam.cones, n)
        Hinf, H0 = full.homology(n), fam.height_homology(0, n)
        direct = height0_matrix(full, blocks, n)
        via = height0_matrix(T0, blocks, n) @ fam.infinity_matrix(0, n)
        rep.add(f"n={n}: height-0 map lands in lim", map_is_well_defined(height0_matrix(T0, blocks, n), H0, lim))
        rep.add(f"n={n}: factorization", maps_agree(direct, via, Hinf, lim), witness=direct - via)
        iso_check(rep, f"n={n}: to lim", direct, Hinf, lim)
    return rep


# ---------------------------------------------------------------------------
# the map from the limit cone


def _h_defects(T, L, h) -> list[tuple[int, Mat]]:
    out = []
    for n in range(T.lo, T.hi + 1):
        D = T.complex.boundary(n) @ h.at(n) - h.at(n - 1) @ L.boundary(n)
        if not D.is_zero():
            out.append((n, D))
    return out


def verify_lemma2_3(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                    family: TotalFamily | None = None) -> Report:
    """``d h = h ∂`` exactly; ``h_*`` bijective (asserted for injective-type coefficients)."""
    _require_directed(S, "the map from the limit cone")
    R = resolve(G)
    rep = _new_report("lemma2_3", S, R, seed)
    fam = family or TotalFamily(S, R)
    T = fam.full
    L = fam.cones.cones[S.poset.maximum]
    try:
        h = h_map(T)
    except AssertionError as e:
        rep.add("h is a chain map", False, str(e))
        return rep
    bad = _h_defects(T, L, h)
    rep.add("d h - h ∂ = 0 in every degree", not bad,
            witness={"degree": bad[0][0], "matrix": bad[0][1].tolist()} if bad else None)
    rep.meta["injective_coefficients"] = R.injective_type
    if R.injective_type:
        for n in _degrees(T):
            iso_check(rep, f"h_* n={n}", h.at(n), L.homology(n), T.homology(n))
    return rep


def _ladder(S: DirectSystem, R: InjectiveResolution, rep: Report) -> None:
    """Compare the two long exact sequences coming from ``0 -> G -> I0 -> I1 -> 0``."""
    hs = resolution_horseshoe(R)
    rs = (hs.left, hs.middle, hs.right)
    fams = [TotalFamily(S, x) for x in rs]
    Ts = [f.full for f in fams]
    m = S.poset.maximum
    Ls = [f.cones.cones[m] for f in fams]
    hs_maps = [h_map(T) for T in Ts]
    C = S.complexes[m]
    col = {"inc": (hs.inc0, hs.inc1, 0, 1), "proj": (hs.proj0, hs.proj1, 1, 2)}
    for name, (a0, a1, i, j) in col.items():
        for n in _degrees(Ts[0]):
            lhs = hs_maps[j].at(n) @ coefficient_cone_matrix(C, a0, a1, n)
            rhs = total_coefficient_matrix(Ts[i], Ts[j], a0, a1, n) @ hs_maps[i].at(n)
            rep.add(f"ladder {name} square n={n}", lhs == rhs, witness=(lhs - rhs) if lhs != rhs else None)
    for n in _degrees(Ts[0]):
        # connecting maps: ret ∘ d_middle ∘ sec
        c_tot = (total_coefficient_matrix(Ts[1], Ts[0], hs.ret0, hs.ret1, n - 1) @ Ts[1].complex.boundary(n)
                 @ total_coefficient_matrix(Ts[2], Ts[1], hs.sec0, hs.sec1, n))
        c_lim = (coefficient_cone_matrix(C, hs.ret0, hs.ret1, n - 1) @ Ls[1].boundary(n)
                 @ coefficient_cone_matrix(C, hs.sec0, hs.sec1, n))
        src, tgt = Ls[2].homology(n), Ts[0].homology(n - 1)
        ok = maps_agree(hs_maps[0].at(n - 1) @ c_lim, c_tot @ hs_maps[2].at(n), src, tgt)
        rep.add(f"ladder connecting square n={n}", ok)
    for k, label in ((1, "middle"), (2, "right")):
        for n in _degrees(Ts[k]):
            iso_check(rep, f"ladder h_* ({label}) n={n}", hs_maps[k].at(n), Ls[k].homology(n), Ts[k].homology(n))


def verify_theorem1(S: DirectSystem, G: Coefficients, *, seed: int | None = None, ladder: bool = True,
                    family: TotalFamily | None = None) -> Report:
    """``h_*: H(limit cone) -> H̄∞`` is bijective; optionally the comparison ladder too."""
    _require_directed(S, "the comparison with the limit cone")
    R = resolve(G)
    rep = _new_report("theorem1", S, R, seed)
    fam = family or TotalFamily(S, R)
    T = fam.full
    L = fam.cones.cones[S.poset.maximum]
    h = h_map(T)
    groups = []
    for n in _degrees(T):
        src, tgt = L.homology(n), T.homology(n)
        iso_check(rep, f"h_* n={n}", h.at(n), src, tgt)
        groups.append(str(tgt))
    rep.meta["infinity_homology"] = dict(zip(_degrees(T), groups))
    if ladder:
        _ladder(S, R, rep)
    return rep


# ---------------------------------------------------------------------------
# coefficient sequences


def _commutes(maps: dict, d_src: Mat, d_tgt: Mat, n: int) -> bool:
    lhs = d_tgt @ maps[n]
    if n - 1 not in maps:
        return lhs.is_zero()
    return lhs == maps[n - 1] @ d_src


def verify_lemma4(S: DirectSystem, phi: FgMorphism, psi: FgMorphism, *, seed: int | None = None) -> Report:
    """Long exact sequence of ``H̄∞`` for ``0 -> G -> G1 -> G2 -> 0``."""
    _require_directed(S, "the coefficient long exact sequence")
    extra = {"phi": phi.matrix.tolist(), "psi": psi.matrix.tolist(),
             "groups": [list(g.invariant_factors) for g in (phi.source, phi.target, psi.target)]}
    rep = _new_report("lemma4", S, None, seed, extra)
    try:
        hs = horseshoe(phi, psi)
    except InexactSequence as e:
        raise OutOfScope(str(e)) from None
    rep.extend(hs.check(), "horseshoe: ")
    Ts = [TotalFamily(S, x).full for x in (hs.left, hs.middle, hs.right)]
    degs = list(_degrees(Ts[0]))
    inc = {n: total_coefficient_matrix(Ts[0], Ts[1], hs.inc0, hs.inc1, n) for n in degs}
    proj = {n: total_coefficient_matrix(Ts[1], Ts[2], hs.proj0, hs.proj1, n) for n in degs}
    sec = {n: total_coefficient_matrix(Ts[2], Ts[1], hs.sec0, hs.sec1, n) for n in degs}
    ret = {n: total_coefficient_matrix(Ts[1], Ts[0], hs.ret0, hs.ret1, n) for n in degs}
    for n in degs:
        d = [T.complex.boundary(n) for T in Ts]
        rep.add(f"inclusion is a chain map n={n}", _commutes(inc, d[0], d[1], n))
        rep.add(f"projection is a chain map n={n}", _commutes(proj, d[1], d[2], n))
        I1 = Mat.identity(inc[n].nrows)
        split = ((proj[n] @ inc[n]).is_zero() and ret[n] @ inc[n] == Mat.identity(inc[n].ncols)
                 and proj[n] @ sec[n] == Mat.identity(proj[n].nrows)
                 and inc[n] @ ret[n] + sec[n] @ proj[n] == I1)
        rep.add(f"degree {n} split short exact", split)
    H = [{n: T.homology(n) for n in degs} for T in Ts]
    seq, labels, conns = [], [], {}
    for n in reversed(degs):
        seq.append(fg_map(inc[n], H[0][n], H[1][n]))
        seq.append(fg_map(proj[n], H[1][n], H[2][n]))
        labels += [f"H_{n}(G) -> H_{n}(G1)", f"H_{n}(G1) -> H_{n}(G2)"]
        if n - 1 in inc:
            c = ret[n - 1] @ Ts[1].complex.boundary(n) @ sec[n]
            f = fg_map(c, H[2][n], H[0][n - 1])
            seq.append(f)
            labels.append(f"H_{n}(G2) -> H_{n - 1}(G)")
            conns[n] = f
    ex = check_exactness(seq)
    fail = ex.failures()
    rep.add("long exact sequence exact at every node", ex.exact, str(ex),
            witness={"node": fail[0][0], "defect": format_factors(fail[0][1])} if fail else None)
    rep.meta["connecting"] = {n: {"source": str(f.source.canonical_form()),
                                  "target": str(f.target.canonical_form()),
                                  "zero": f.is_zero()} for n, f in conns.items()}
    rep.meta["terms"] = {n: [str(H[k][n].group.canonical_form()) for k in range(3)] for n in degs}
    rep.meta["labels"] = labels
    return rep


# ---------------------------------------------------------------------------
# finite models


def verify_theorem2(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                    family: TotalFamily | None = None) -> Report:
    """Cone homology of the colimit agrees with ``H̄∞`` of the system, link by link."""
    _require_directed(S, "the comparison of the two homologies")
    R = resolve(G)
    rep = _new_report("theorem2", S, R, seed)
    val = validate_system(S)
    rep.add("colimit: bondings compose", val.passed, str(val.failures()[0].name) if not val.passed else "")
    fam = family or TotalFamily(S, R)
    T = fam.full
    m = S.poset.maximum
    Cmax = S.complexes[m]
    L = build_cone(Cmax, R)
    Lsys = fam.cones.cones[m]
    rep.add("limit cone is the cone of the colimit",
            all(L.boundary(n) == Lsys.boundary(n) for n in range(-1, Cmax.top + 1)))
    h = h_map(T)
    sides = {}
    for n in _degrees(T):
        colim_side = cone_div_homology(Cmax, R, n)
        inf_side = T.homology(n)
        iso_check(rep, f"h_* n={n}", h.at(n), Lsys.homology(n), inf_side)
        a, b = colim_side.structure(), inf_side.structure()
        rep.add(f"n={n}: both sides agree", a == b, f"{a} vs {b}")
        sides[n] = (str(a), str(b))
    rep.meta["sides"] = sides
    return rep


def verify_ucf(C: CochainComplex, G: FgAbGroup, *, seed: int | None = None) -> Report:
    """Cone homology against ``Ext(H^(n+1), G) ⊕ Hom(H^n, G)`` in every degree."""
    if not isinstance(G, FgAbGroup):
        raise OutOfScope("the Ext/Hom comparison needs a finitely generated coefficient group")
    from .instances import one_element_system
    S = one_element_system(C)
    rep = _new_report("ucf", S, resolve(G), seed)
    for n in range(-1, C.top + 2):
        direct = cone_div_homology(C, G, n).group.canonical_form()
        ext, hom = ucf_oracle(C, G, n)
        rank_ok = direct.rank == ext.rank + hom.rank
        tors_ok = direct.torsion_order == ext.torsion_order * hom.torsion_order
        detail = f"{direct} vs Ext={ext.canonical_form()} Hom={hom.canonical_form()}"
        rep.add(f"n={n}: rank", rank_ok, detail, witness=direct.invariant_factors)
        rep.add(f"n={n}: torsion order", tors_ok, detail, witness=direct.invariant_factors)
        if ext.is_trivial():
            rep.add(f"n={n}: iso to Hom", direct.isomorphic(hom), detail, witness=direct.invariant_factors)
    return rep


def verify_milnor(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                  family: TotalFamily | None = None) -> Report:
    """``0 -> lim^1 H̄(r)_(n+1) -> H̄∞_n -> lim H̄(r)_n -> 0`` in every degree."""
    from .limits import milnor_assemble
    _require_directed(S, "the Milnor sequence check")
    R = resolve(G)
    rep = _new_report("milnor", S, R, seed)
    fam = family or TotalFamily(S, R)
    full = fam.full
    top = S.poset.height + 1
    for n in _degrees(full):
        fg = all(fam.height_homology(r, k).finitely_generated
                 for r in range(top + 1) for k in (n, n + 1))
        if fg:
            sub = milnor_assemble(S, R, n, fam)
            rep.extend(sub, f"n={n}: ")
        else:
            # divisible towers: the tower is finite, so lim^1 = 0 and lim is the last stage
            rep.add(f"n={n}: lim1 of a finite tower vanishes", True, "finite tower")
            iso_check(rep, f"n={n}: H̄∞ -> last stage", fam.infinity_matrix(top, n), full.homology(n),
                      fam.height_homology(top, n))
    return rep


def verify_mardesic(S: DirectSystem, G: Coefficients, *, seed: int | None = None,
                    family: TotalFamily | None = None) -> Report:
    """Vanishing of the nerve-derived limits around each height and the height maps."""
    from .limits import mardesic_terms
    _require_directed(S, "the Mardešić fragment check")
    R = resolve(G)
    rep = _new_report("mardesic", S, R, seed)
    fam = family or TotalFamily(S, R)
    for n in _degrees(fam.full):
        for r in range(1, S.poset.height + 2):
            rep.extend(mardesic_terms(S, R, n, r, fam), f"n={n} r={r}: ")
    return rep


THEOREMS = {
    "lemma1": verify_lemma1,
    "corollary1": verify_corollary1,
    "lemma2": verify_lemma2_3,
    "lemma3": verify_lemma2_3,
    "theorem1": verify_theorem1,
    "lemma4": verify_lemma4,
    "theorem2": verify_theorem2,
    "ucf": verify_ucf,
    "milnor": verify_milnor,
    "mardesic": verify_mardesic,
}
