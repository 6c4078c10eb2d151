"""Length-one injective resolutions ``0 -> G -> I0 -> I1 -> 0``.

Finitely generated groups get the canonical resolution built from their
invariant factors: ``Z`` goes to ``Q -> Q/Z`` and ``Z/q`` to
``Q/Z -(×q)-> Q/Z`` with ``1 |-> 1/q``.  Divisible coefficient groups
``Q^a ⊕ (Q/Z)^b`` are their own resolution (``I1 = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .divlin import (DivGroup, DivMorphism, LatticeSubgroup, check_compatible, div_image,
                     div_kernel, _mixed_kernel, _unit)
from .fgab import FgAbGroup, FgMorphism, check_exactness, cyclic, free
from .linalg import Mat, block_diag, hstack, solve_integer, vstack
from .report import Report

__all__ = [
    "InjectiveResolution", "build_resolution", "injective_coefficients", "verify_resolution",
    "Horseshoe", "horseshoe", "resolution_horseshoe", "InexactSequence",
    "parse_coefficients",
]


class InexactSequence(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class InjectiveResolution:
    """``0 -> G -(alpha)-> I0 -(beta)-> I1 -> 0``.

    ``alpha`` holds the images of G's generators as columns (rational
    vectors in I0's ambient space).  For divisible coefficients ``G`` is the
    DivGroup itself and ``alpha`` the identity.
    """

    G: Union[FgAbGroup, DivGroup]
    I0: DivGroup
    I1: DivGroup
    alpha: Mat
    beta: Mat

    def __post_init__(self):
        check_compatible(self.beta, self.I0, self.I1)

    @property
    def injective_type(self) -> bool:
        return isinstance(self.G, DivGroup)

    @property
    def beta_morphism(self) -> DivMorphism:
        return DivMorphism(self.I0, self.I1, self.beta)

    def label(self) -> str:
        return str(self.G)


def build_resolution(G: FgAbGroup) -> InjectiveResolution:
    """Canonical resolution; one ``I0`` and one ``I1`` coordinate per invariant factor."""
    diag, U = G._snf
    kinds0, arows, bdiag = [], [], []
    for i, d in enumerate(diag):
        if d == 1:
            continue
        urow = U.rows[i]
        if d == 0:
            kinds0.append(False)
            arows.append(list(urow))
            bdiag.append(1)
        else:
            kinds0.append(True)
            arows.append([Fraction(x, d) for x in urow])
            bdiag.append(d)
    k = len(kinds0)
    I0 = DivGroup(tuple(kinds0))
    I1 = DivGroup((True,) * k)
    alpha = Mat(arows, k, G.ngens).normalized()
    return InjectiveResolution(G, I0, I1, alpha, Mat.diag(bdiag))


def injective_coefficients(q_rank: int, qz_rank: int) -> InjectiveResolution:
    """The divisible group ``Q^a ⊕ (Q/Z)^b`` resolved by itself."""
    I = DivGroup.make(q_rank, qz_rank)
    return InjectiveResolution(I, I, DivGroup(()), Mat.identity(I.dim), Mat.zeros(0, I.dim))


def parse_coefficients(text: str) -> InjectiveResolution:
    """``"Z+Z/4"``, ``"Z/2"``, ``"Q/Z"``, ``"Q"`` or ``"Q+Q/Z"``."""
    parts = [p.strip() for p in text.replace("⊕", "+").split("+") if p.strip()]
    if any(p.startswith("Q") for p in parts):
        a = b = 0
        for p in parts:
            if p == "Q":
                a += 1
            elif p == "Q/Z":
                b += 1
            else:
                raise ValueError(f"cannot mix divisible and finitely generated coefficients: {text!r}")
        return injective_coefficients(a, b)
    from .fgab import parse_factors
    return build_resolution(FgAbGroup.from_factors(parse_factors(text)))


# ---------------------------------------------------------------------------
# verification


def _alpha_kernel(R: InjectiveResolution) -> list[tuple]:
    """Integer vectors ``c`` with ``alpha c`` in the lattice of I0."""
    n = R.I0.dim
    k = R.alpha.ncols
    L = Mat.from_columns([_unit(n, i) for i in R.I0.lattice_coords], n)
    a_int = hstack([R.alpha, L.scale(-1)]) if L.ncols else R.alpha
    W, lam = _mixed_kernel(Mat.zeros(n, 0), a_int)
    return [tuple(int(x) for x in v[:k]) for v in lam]


def _not_in(sub: LatticeSubgroup) -> tuple | None:
    """Some vector outside ``sub`` (None when sub is everything)."""
    n = sub.n
    for i in range(n):
        e = _unit(n, i)
        if not sub.in_subspace(e):
            line = sub.preimage(Mat.from_columns([e], n))
            t = line.lam[0][0] if line.lam else 1
            return tuple(Fraction(t) / 2 * x for x in e)
    return None


def verify_resolution(R: InjectiveResolution) -> Report:
    rep = Report(f"resolution of {R.label()}")
    n0 = R.I0.dim
    L0 = R.I0.lattice()
    if R.injective_type:
        try:
            check_compatible(R.alpha, R.G, R.I0)
            ok = True
        except ValueError:
            ok = False
        rep.add("alpha well defined", ok)
        pre = L0.preimage(R.alpha)
        wit = next((v for v in pre.W + pre.lam if not R.G.lattice().contains(v)), None)
        rep.add("alpha injective", pre == R.G.lattice(), witness=wit)
        im_alpha = LatticeSubgroup.from_gens(n0, R.alpha.columns(),
                                             [_unit(n0, i) for i in R.I0.lattice_coords])
    else:
        G = R.G
        bad = next((j for j, r in enumerate(G.relations.columns())
                    if not L0.contains(R.alpha.apply(r))), None)
        rep.add("alpha well defined", bad is None, witness=None if bad is None else G.relations.col(bad))
        wit = next((c for c in _alpha_kernel(R) if not G.is_zero(c)), None)
        rep.add("alpha injective", wit is None, witness=wit)
        im_alpha = LatticeSubgroup.from_gens(n0, [], R.alpha.columns()
                                             + [_unit(n0, i) for i in R.I0.lattice_coords])
    ker_beta = div_kernel(R.beta_morphism)
    wit = None
    if ker_beta != im_alpha:
        wit = next((v for v in ker_beta.W if not im_alpha.in_subspace(v)), None)
        if wit is None:
            wit = next((v for v in ker_beta.lam if not im_alpha.contains(v)), None)
        if wit is None:
            wit = next((v for v in im_alpha.lam if not ker_beta.contains(v)), None)
    rep.add("ker beta = im alpha", ker_beta == im_alpha, witness=wit)
    img = div_image(R.beta_morphism)
    wit = _not_in(img)
    rep.add("beta surjective", wit is None, witness=wit)
    return rep


# ---------------------------------------------------------------------------
# mixed affine solving


def _solve_mixed_affine(a_rat: Mat, a_int: Mat, b: list) -> tuple[list, list] | None:
    """One solution ``(q, c)`` of ``a_rat q + a_int c = b`` with c integral."""
    m = len(b)
    bcol = Mat.from_columns([[-x for x in b]], m)
    W, lam = _mixed_kernel(a_rat, hstack([a_int, bcol]) if a_int.ncols else bcol)
    na, nb = a_rat.ncols, a_int.ncols
    tpos = na + nb
    ts = [v[tpos] for v in lam]
    if not ts:
        return None
    sol = solve_integer(Mat([ts], 1, len(ts)), [1])
    if sol is None:
        return None
    x = [0] * (tpos + 1)
    for coef, v in zip(sol, lam):
        if coef:
            for j in range(tpos + 1):
                x[j] += coef * v[j]
    return x[:na], [int(v) for v in x[na:tpos]]


def _extend_into(target: DivGroup, gen_images_src: Mat, relations: Mat | None,
                 values: Mat) -> Mat:
    """Rational matrix X (target rows) with ``X gen_images_src ≡ values`` and
    ``X relations ≡ 0`` modulo the target lattice.

    Rows are solved independently; X is unconstrained rationally (used for
    maps out of a free presentation).
    """
    k = gen_images_src.nrows
    cons = hstack([relations, gen_images_src]) if relations is not None and relations.ncols else gen_images_src
    ncon = cons.ncols
    nrel = ncon - gen_images_src.ncols
    rows = []
    for i, qz in enumerate(target.kinds):
        rhs = [0] * nrel + list(values.rows[i])
        a_rat = cons.T
        a_int = Mat.identity(ncon).scale(-1) if qz else Mat.zeros(ncon, 0)
        sol = _solve_mixed_affine(a_rat, a_int, rhs)
        if sol is None:
            raise ArithmeticError(f"no extension exists for target coordinate {i}")
        rows.append(sol[0])
    return Mat(rows, target.dim, k).normalized()


def _extend_morphism(source: DivGroup, target: DivGroup, along: Mat, values: Mat) -> Mat:
    """Lattice-compatible rational matrix Y: source -> target with
    ``Y along ≡ values`` modulo the target lattice (injectivity of target)."""
    n = source.dim
    ng = along.ncols
    rows = []
    for i, qz in enumerate(target.kinds):
        qcols = [j for j in range(n) if not source.kinds[j]]
        zcols = [j for j in range(n) if source.kinds[j]] if qz else []
        a_rat = Mat([[along[j, g] for j in qcols] for g in range(ng)], ng, len(qcols))
        int_cols = [[along[j, g] for j in zcols] for g in range(ng)]
        a_int = Mat(int_cols, ng, len(zcols))
        if qz:
            a_int = hstack([a_int, Mat.identity(ng).scale(-1)])
        sol = _solve_mixed_affine(a_rat, a_int, list(values.rows[i]))
        if sol is None:
            raise ArithmeticError(f"no extension exists for target coordinate {i}")
        q, c = sol
        row = [0] * n
        for j, v in zip(qcols, q):
            row[j] = v
        for j, v in zip(zcols, c):
            row[j] = v
        rows.append(row)
    return Mat(rows, target.dim, n).normalized()


# ---------------------------------------------------------------------------
# horseshoe


@dataclass(frozen=True, eq=False)
class Horseshoe:
    """Resolutions of ``0 -> G -> G1 -> G2 -> 0`` fitting in a split-column diagram.

    ``inc0``/``proj0`` are the column maps ``I0 -> I0_1 -> I0_2`` and
    ``sec0``/``ret0`` the splittings (``proj0 sec0 = id``,
    ``ret0 inc0 = id``, ``inc0 ret0 + sec0 proj0 = id``); same in degree 1.
    """

    left: InjectiveResolution
    middle: InjectiveResolution
    right: InjectiveResolution
    inc0: Mat
    proj0: Mat
    inc1: Mat
    proj1: Mat

    @property
    def sec0(self) -> Mat:
        return self.proj0.T

    @property
    def ret0(self) -> Mat:
        return self.inc0.T

    @property
    def sec1(self) -> Mat:
        return self.proj1.T

    @property
    def ret1(self) -> Mat:
        return self.inc1.T

    def check(self) -> Report:
        rep = Report("horseshoe")
        for name, R in (("left", self.left), ("middle", self.middle), ("right", self.right)):
            rep.extend(verify_resolution(R), f"{name}: ")
        M, A, B = self.middle, self.left, self.right
        rep.add("beta square (inc)", M.beta @ self.inc0 == self.inc1 @ A.beta)
        rep.add("beta square (proj)", B.beta @ self.proj0 == self.proj1 @ M.beta)
        for k, (inc, proj) in enumerate(((self.inc0, self.proj0), (self.inc1, self.proj1))):
            sec, ret = proj.T, inc.T
            n = inc.nrows
            rep.add(f"column {k} split exact",
                    proj @ inc == Mat.zeros(proj.nrows, inc.ncols)
                    and proj @ sec == Mat.identity(proj.nrows)
                    and ret @ inc == Mat.identity(inc.ncols)
                    and inc @ ret + sec @ proj == Mat.identity(n))
        return rep


def _column_maps(a: DivGroup, b: DivGroup) -> tuple[Mat, Mat]:
    n, m = a.dim, b.dim
    inc = Mat.from_columns([_unit(n + m, i) for i in range(n)], n + m)
    proj = Mat([_unit(n + m, n + j) for j in range(m)], m, n + m)
    return inc, proj


def horseshoe(phi: FgMorphism, psi: FgMorphism, left: InjectiveResolution | None = None,
              right: InjectiveResolution | None = None) -> Horseshoe:
    """Compatible resolutions for an exact ``0 -> G -(phi)-> G1 -(psi)-> G2 -> 0``."""
    rep = check_exactness([phi, psi])
    if not rep.exact:
        node, factors, kind = rep.failures()[0]
        raise InexactSequence(f"sequence is not exact: {rep}")
    G, G1, G2 = phi.source, phi.target, psi.target
    R = left or build_resolution(G)
    R2 = right or build_resolution(G2)
    # alpha'': G1 -> I0 extending alpha along phi
    a2 = _extend_into(R.I0, phi.matrix, G1.relations, R.alpha)
    alpha1 = vstack([a2, R2.alpha @ psi.matrix])
    # theta: G2 -> I1 with theta psi = beta alpha''
    k1 = G1.ngens
    big = hstack([psi.matrix, G2.relations]) if G2.relations.ncols else psi.matrix
    theta_cols = []
    for g in range(G2.ngens):
        x = solve_integer(big, _unit(G2.ngens, g))
        if x is None:
            raise InexactSequence("second map is not surjective")
        theta_cols.append((R.beta @ a2).apply(x[:k1]))
    theta = Mat.from_columns(theta_cols, R.I1.dim)
    tau = _extend_morphism(R2.I0, R.I1, R2.alpha, theta.scale(-1))
    beta1 = vstack([hstack([R.beta, tau]),
                    hstack([Mat.zeros(R2.I1.dim, R.I0.dim), R2.beta])])
    M = InjectiveResolution(G1, R.I0 + R2.I0, R.I1 + R2.I1, alpha1, beta1)
    inc0, proj0 = _column_maps(R.I0, R2.I0)
    inc1, proj1 = _column_maps(R.I1, R2.I1)
    return Horseshoe(R, M, R2, inc0, proj0, inc1, proj1)


def resolution_horseshoe(R: InjectiveResolution) -> Horseshoe:
    """Horseshoe for the sequence ``0 -> G -> I0 -> I1 -> 0`` of R itself.

    The outer columns are R and the self-resolution of I1; the middle
    resolves I0 by ``I0 ⊕ I1 -> I1`` with ``alpha = (id, beta)`` and
    ``beta = (beta, -id)``.
    """
    right = injective_coefficients(0, 0) if R.I1.dim == 0 else InjectiveResolution(
        R.I1, R.I1, DivGroup(()), Mat.identity(R.I1.dim), Mat.zeros(0, R.I1.dim))
    n0, n1 = R.I0.dim, R.I1.dim
    alpha1 = vstack([Mat.identity(n0), R.beta])
    beta1 = hstack([R.beta, Mat.identity(n1).scale(-1)])
    mid = InjectiveResolution(R.I0, R.I0 + R.I1, R.I1, alpha1, beta1)
    inc0, proj0 = _column_maps(R.I0, R.I1)
    inc1, proj1 = _column_maps(R.I1, DivGroup(()))
    return Horseshoe(R, mid, right, inc0, proj0, inc1, proj1)
