"""Derived limits over finite posets, tower analysis, and the Milnor and
Mardešić sequences for total complexes.

``lim^i`` is the cohomology of the normalized nerve complex: degree s is
the product over strict chains ``λ0 < ... < λs`` of the group at ``λ0``,
with ``(Dx)(μ) = p x(d^0 μ) + Σ_{j>=1} (-1)^j x(d^j μ)``.  Systems are
handled as subquotients ``num/den`` of rational ambient spaces, so the same
code serves finitely generated groups and divisible cone homology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .divlin import (DivHomology, LatticeSubgroup, MixedStructure, map_is_injective,
                     map_is_surjective, _unit)
from .fgab import (ExactnessReport, FgAbGroup, FgMorphism, check_exactness, cokernel,
                   direct_sum, kernel, trivial)
from .linalg import Mat, block_diag, determinant, hstack
from .prosys import DirectSystem, FinitePoset, NotDirected, chains
from .report import Report
from .total import (HeightTower, TotalFamily, fg_map, height_tower, projection_matrix)

__all__ = [
    "GroupSystem", "SubquotientSystem", "lim_i", "lim_subquotient", "nerve_cohomology",
    "order_complex", "PeriodicTower", "MLResult", "ml_analyze", "finite_tower_limits",
    "milnor_assemble", "mardesic_terms", "cone_homology_system",
]


# ---------------------------------------------------------------------------
# systems


@dataclass(eq=False)
class SubquotientSystem:
    """Groups ``num_λ / den_λ`` with matrices ``matrix(a, b)``: ambient_b -> ambient_a for a <= b."""

    poset: FinitePoset
    groups: Mapping[Hashable, DivHomology]
    matrix: Callable[[Hashable, Hashable], Mat]

    def dim(self, x) -> int:
        return self.groups[x].cycles.n


@dataclass(eq=False)
class GroupSystem:
    """Inverse system of FgAbGroups: ``maps[(a, b)]: groups[b] -> groups[a]`` for a <= b.

    Only a generating set of pairs is needed; other bondings are composites.
    """

    poset: FinitePoset
    groups: Mapping[Hashable, FgAbGroup]
    maps: Mapping[tuple, FgMorphism] = field(default_factory=dict)

    def __post_init__(self):
        self._cache: dict = {}

    def bonding(self, a, b) -> FgMorphism:
        if (a, b) in self.maps:
            return self.maps[(a, b)]
        if a == b:
            return self.groups[a].identity()
        if (a, b) in self._cache:
            return self._cache[(a, b)]
        P = self.poset
        for (x, c) in self.maps:
            if x == a and c != a and P.le(c, b):
                m = self.maps[(a, c)].compose(self.bonding(c, b))
                self._cache[(a, b)] = m
                return m
        raise ValueError(f"no bonding path from {b!r} down to {a!r}")

    @classmethod
    def constant(cls, P: FinitePoset, G: FgAbGroup) -> "GroupSystem":
        return cls(P, {x: G for x in P.elements}, {(a, b): G.identity() for a, b in P.covers()})

    def check(self) -> Report:
        rep = Report("group system")
        bad = []
        P = self.poset
        for a in P.elements:
            for b in P.elements:
                for c in P.elements:
                    if P.lt(a, b) and P.lt(b, c):
                        if not self.bonding(a, b).compose(self.bonding(b, c)).equals(self.bonding(a, c)):
                            bad.append((a, b, c))
        rep.add("composition law", not bad, witness=bad[0] if bad else None)
        return rep

    def as_subquotients(self) -> SubquotientSystem:
        groups = {}
        for x, G in self.groups.items():
            n = G.ngens
            num = LatticeSubgroup.from_gens(n, [], [_unit(n, i) for i in range(n)])
            den = LatticeSubgroup.from_gens(n, [], G.relations.columns())
            groups[x] = DivHomology(num, den)
        return SubquotientSystem(self.poset, groups, lambda a, b: self.bonding(a, b).matrix)


def _padded(vectors, offset: int, total: int, width: int):
    return [(0,) * offset + tuple(v) + (0,) * (total - offset - width) for v in vectors]


def _nerve_level(S: SubquotientSystem, s: int):
    """Blocks ``(chain, offset, dim)``, total dim, and the product num/den at height s."""
    blocks, off = [], 0
    for ch in chains(S.poset, s):
        d = S.dim(ch[0])
        blocks.append((ch, off, d))
        off += d
    W_n, L_n, W_d, L_d = [], [], [], []
    for ch, o, d in blocks:
        g = S.groups[ch[0]]
        W_n += _padded(g.cycles.W, o, off, d)
        L_n += _padded(g.cycles.lam, o, off, d)
        W_d += _padded(g.bounds.W, o, off, d)
        L_d += _padded(g.bounds.lam, o, off, d)
    return (blocks, off, LatticeSubgroup.from_gens(off, W_n, L_n),
            LatticeSubgroup.from_gens(off, W_d, L_d))


def _nerve_differential(S: SubquotientSystem, lo, hi) -> Mat:
    blocks_lo, n_lo = lo[0], lo[1]
    blocks_hi, n_hi = hi[0], hi[1]
    index = {ch: (o, d) for ch, o, d in blocks_lo}
    rows = [[0] * n_lo for _ in range(n_hi)]
    for mu, ro, d in blocks_hi:
        faces = [(0, mu[1:])] + [(j, mu[:j] + mu[j + 1:]) for j in range(1, len(mu))]
        for j, face in faces:
            co, dc = index[face]
            if j == 0:
                M = S.matrix(mu[0], mu[1])
                for i in range(d):
                    for k in range(dc):
                        x = M[i, k]
                        if x:
                            rows[ro + i][co + k] += x
            else:
                sign = -1 if j % 2 else 1
                for i in range(d):
                    rows[ro + i][co + i] += sign
    return Mat(rows, n_hi, n_lo)


def nerve_cohomology(S: SubquotientSystem, i: int) -> DivHomology:
    """``lim^i`` as a subquotient of the degree-i nerve ambient space."""
    cur = _nerve_level(S, i)
    _, n_cur, Z, B = cur
    if not n_cur:
        return DivHomology(Z, B)
    nxt = _nerve_level(S, i + 1)
    if nxt[1]:
        D = _nerve_differential(S, cur, nxt)
        num = nxt[3].preimage(D).intersection(Z)
    else:
        num = Z
    den = B
    if i > 0:
        prev = _nerve_level(S, i - 1)
        if prev[1]:
            Dp = _nerve_differential(S, prev, cur)
            den = prev[2].image(Dp) + B
    return DivHomology(num, den)


def lim_subquotient(S: SubquotientSystem | GroupSystem, i: int = 0) -> DivHomology:
    if isinstance(S, GroupSystem):
        S = S.as_subquotients()
    return nerve_cohomology(S, i)


def lim_i(S: GroupSystem, i: int) -> FgAbGroup:
    """``lim^i S`` as a canonical FgAbGroup."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    return lim_subquotient(S, i).group.canonical_form()


def order_complex(P: FinitePoset):
    """Simplicial complex whose simplices are the strict chains of P."""
    from .simplicial import SimplicialComplex
    maximal = []
    for s in range(P.height, -1, -1):
        for ch in chains(P, s):
            if not any(set(ch) <= set(m) for m in maximal):
                maximal.append(ch)
    idx = P.index
    return SimplicialComplex([tuple(idx[x] for x in ch) for ch in maximal])


def cone_homology_system(cones, n: int) -> SubquotientSystem:
    """``λ |-> H_n(cone_λ)`` with the cone bonding matrices."""
    P = cones.system.poset
    groups = {x: cones.cones[x].homology(n) for x in P.elements}
    return SubquotientSystem(P, groups, lambda a, b: cones.matrix(a, b, n))


# ---------------------------------------------------------------------------
# periodic towers


@dataclass(eq=False)
class PeriodicTower:
    """``prefix[0] <- prefix[1] <- ... <- A <- A <- ...`` with the repeating map ``f: A -> A``.

    ``prefix_maps[i]`` maps the next group (``prefix[i+1]``, or A after the
    last prefix group) into ``prefix[i]``.
    """

    f: FgMorphism
    prefix: Sequence[FgAbGroup] = ()
    prefix_maps: Sequence[FgMorphism] = ()

    def __post_init__(self):
        if self.f.source is not self.f.target and self.f.source.relations != self.f.target.relations:
            raise ValueError("repeating map must be an endomorphism")
        if len(self.prefix_maps) != len(self.prefix):
            raise ValueError("need one map into each prefix group")
        nxt = list(self.prefix[1:]) + [self.f.source]
        for i, (g, m) in enumerate(zip(self.prefix, self.prefix_maps)):
            if m.target.ngens != g.ngens or m.source.ngens != nxt[i].ngens:
                raise ValueError(f"prefix map {i} is not composable")

    @property
    def A(self) -> FgAbGroup:
        return self.f.source


@dataclass
class MLResult:
    mittag_leffler: bool
    lim: FgAbGroup | None
    lim1: str  # "0" or "nonzero-unrepresentable"
    stable_from: int | None
    image_indices: list
    note: str = ""

    def __str__(self) -> str:
        lim = str(self.lim) if self.lim is not None else "unrepresentable"
        ml = "ML" if self.mittag_leffler else "not-ML"
        return f"{ml}; lim = {lim}; lim1 = {self.lim1}"


def _image_sub(A: FgAbGroup, M: Mat) -> DivHomology:
    """``im(M) + relations`` over ``relations``, as lattices in Z^n."""
    n = A.ngens
    rel = A.relations.columns()
    num = LatticeSubgroup.from_gens(n, [], M.columns() + rel)
    den = LatticeSubgroup.from_gens(n, [], rel)
    return DivHomology(num, den)


def _unimodular_inverse(U: Mat) -> Mat:
    from .linalg import solve_rational
    n = U.nrows
    return Mat.from_columns([solve_rational(U, _unit(n, i)) for i in range(n)], n).to_int()


def _free_quotient_map(A: FgAbGroup, f: FgMorphism) -> Mat:
    """Matrix of the map induced by f on ``A / torsion`` in canonical free coordinates."""
    diag, U = A._snf
    free_rows = [i for i, d in enumerate(diag) if d == 0]
    Uinv = _unimodular_inverse(U)
    cols = []
    for i in free_rows:
        y = U.apply(f.matrix.apply(Uinv.col(i)))
        cols.append([y[j] for j in free_rows])
    return Mat.from_columns(cols, len(free_rows))


def _lattice_det(F: Mat, gens: list) -> int:
    """Determinant of F restricted to the lattice spanned by ``gens`` (F-invariant, F injective on it)."""
    from .linalg import hermite_rows, solve_rational
    basis = hermite_rows([[int(x) for x in g] for g in gens], F.nrows)
    if not basis:
        return 1
    Bm = Mat.from_columns(basis, F.nrows)
    cols = [solve_rational(Bm, F.apply(b)) for b in basis]
    return determinant(Mat.from_columns(cols, len(basis)).to_int())


def ml_analyze(T: PeriodicTower, max_steps: int = 256) -> MLResult:
    """Mittag-Leffler test via the descending images ``f^k(A)``.

    Once the rank of the images stops dropping, f acts injectively on the
    free quotient of the image; a determinant other than ±1 there makes the
    images shrink forever.  With determinant ±1 only torsion can still
    shrink, which ends after finitely many steps.
    """
    A, f = T.A, T.f
    n = A.ngens
    Fbar = _free_quotient_map(A, f)
    Fk = Mat.identity(n)
    Fbar_k = Mat.identity(Fbar.nrows)
    prev = _image_sub(A, Fk)
    indices = []
    for k in range(1, max_steps + 1):
        Fk = f.matrix @ Fk
        Fbar_k = Fbar @ Fbar_k
        sub = _image_sub(A, Fk)
        if sub.cycles == prev.cycles:
            return MLResult(True, sub.group.canonical_form(), "0", k - 1, indices)
        step = DivHomology(prev.cycles, sub.cycles).group
        indices.append(step.order())
        if step.order() is not None:
            det = _lattice_det(Fbar, Fbar_k.columns())
            if abs(det) != 1:
                return _not_ml(A, f, indices, det)
        prev = sub
    raise RuntimeError("image chain did not settle within the step bound")


def _not_ml(A: FgAbGroup, f: FgMorphism, indices, det) -> MLResult:
    """lim of a non-ML tower: computed for injective maps on free groups only."""
    note = f"free-part determinant {det}"
    if A.is_free() and A.relations.ncols == 0 and f.is_injective():
        import sympy
        x = sympy.Symbol("x")
        M = sympy.Matrix(f.matrix.tolist())
        _, factors = sympy.factor_list(M.charpoly(x).as_expr(), x)
        rank = sum(sympy.degree(p, x) * e for p, e in factors
                   if abs(sympy.Poly(p, x).eval(0)) == 1)
        return MLResult(False, FgAbGroup.from_factors([0] * int(rank)), "nonzero-unrepresentable",
                        None, indices, note)
    return MLResult(False, None, "nonzero-unrepresentable", None, indices,
                    note + "; limit not representable for this map")


# ---------------------------------------------------------------------------
# finite towers


def finite_tower_limits(groups: Sequence[FgAbGroup], maps: Sequence[FgMorphism]):
    """``(lim, lim1, Π)`` of ``G0 <- G1 <- ... <- GR`` (``maps[r-1]: G_r -> G_(r-1)``).

    ``lim`` is a Subquotient of the product (coordinates via ``coords``).
    """
    prod = direct_sum(groups)
    head = direct_sum(groups[:-1]) if len(groups) > 1 else trivial()
    offs = [0]
    for g in groups:
        offs.append(offs[-1] + g.ngens)
    rows = [[0] * prod.ngens for _ in range(head.ngens)]
    for r in range(len(groups) - 1):
        g, m = groups[r], maps[r]
        for i in range(g.ngens):
            rows[offs[r] + i][offs[r] + i] += 1
            for j in range(groups[r + 1].ngens):
                rows[offs[r] + i][offs[r + 1] + j] -= m.matrix[i, j]
    D = FgMorphism(prod, head, Mat(rows, head.ngens, prod.ngens))
    return kernel(D), cokernel(D), prod, offs


def milnor_assemble(S: DirectSystem, G, n: int, family: TotalFamily | None = None) -> Report:
    """``0 -> lim^1 H̄(r)_(n+1) -> H̄∞_n -> lim H̄(r)_n -> 0`` checked exact."""
    rep = Report(f"Milnor sequence, degree {n}")
    if not S.poset.directed:
        raise NotDirected("the Milnor check requires a directed poset")
    fam = family or TotalFamily(S, G)
    R = S.poset.height + 1
    tow_n = height_tower(S, G, n, R, fam)
    tow_n1 = height_tower(S, G, n + 1, R, fam)
    if any(m is None for m in tow_n.maps + tow_n1.maps):
        rep.add("towers finitely generated", False, "divisible height homology; use the map-level checks")
        return rep
    grp = [h.group for h in tow_n.groups]
    lim_n, _, prod, offs = finite_tower_limits(grp, tow_n.maps)
    _, lim1_n1, _, _ = finite_tower_limits([h.group for h in tow_n1.groups], tow_n1.maps)
    lim1 = lim1_n1.group
    rep.add("lim1 of the height tower vanishes", lim1.is_trivial(), str(lim1.canonical_form()))
    Hinf = fam.full.homology(n)
    cols = []
    for z in Hinf.lifts:
        x = []
        for r, h in enumerate(tow_n.groups):
            x.extend(h.coords(fam.infinity_matrix(r, n).apply(z)))
        c = lim_n.coords(x)
        if c is None:
            rep.add("H̄∞ lands in the limit", False, witness=z)
            return rep
        cols.append(c)
    to_lim = FgMorphism(Hinf.group, lim_n.group, Mat.from_columns(cols, lim_n.group.ngens))
    from_lim1 = FgMorphism(lim1, Hinf.group, Mat.zeros(Hinf.group.ngens, lim1.ngens)) \
        if lim1.is_trivial() else None
    if from_lim1 is None:
        rep.add("sequence assembled", False, "nonzero lim1 on a finite tower")
        return rep
    ex = check_exactness([from_lim1, to_lim])
    rep.add("exact", ex.exact, str(ex), witness=ex.failures()[0] if not ex.exact else None)
    rep.meta["terms"] = [str(lim1.canonical_form()), str(Hinf.group.canonical_form()),
                         str(lim_n.group.canonical_form())]
    return rep


def _cached_lim(fam: TotalFamily, k: int, i: int) -> DivHomology:
    """``lim^i`` of ``λ |-> H_k(cone_λ)``, memoized on the family."""
    cache = fam.__dict__.setdefault("_lims", {})
    if (k, i) not in cache:
        cache[(k, i)] = nerve_cohomology(cone_homology_system(fam.cones, k), i)
    return cache[(k, i)]


def mardesic_terms(S: DirectSystem, G, n: int, r: int, family: TotalFamily | None = None) -> Report:
    """``lim^r H_(n+r) -> H̄(r)_n -> H̄(r-1)_n -> lim^(r+1) H_(n+r)`` around height r."""
    if r < 1:
        raise ValueError("r must be at least 1")
    rep = Report(f"Mardešić fragment, degree {n}, height {r}")
    fam = family or TotalFamily(S, G)
    lr = _cached_lim(fam, n + r, r)
    lr1 = _cached_lim(fam, n + r, r + 1)
    s_r, s_r1 = lr.structure(), lr1.structure()
    rep.meta["terms"] = [str(s_r), str(s_r1)]
    directed = S.poset.directed
    rep.meta["in_scope"] = directed
    if directed:
        rep.add(f"lim^{r} vanishes", s_r.is_trivial(), str(s_r))
        rep.add(f"lim^{r + 1} vanishes", s_r1.is_trivial(), str(s_r1))
    hi, lo = fam.height_homology(r, n), fam.height_homology(r - 1, n)
    M = projection_matrix(fam.T(r), fam.T(r - 1), n)
    inj = map_is_injective(M, hi, lo)
    surj = map_is_surjective(M, hi, lo)
    if s_r.is_trivial() and s_r1.is_trivial():
        rep.add("height map injective", inj)
        rep.add("height map surjective", surj)
    else:
        rep.add("fragment outside directed scope", not directed,
                f"injective={inj}, surjective={surj}")
    return rep
