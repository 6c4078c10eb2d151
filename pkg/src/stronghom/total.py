"""Total complexes of a cone system, height truncations and their homology.

A degree-n element assigns to every chain ``λ = (λ0 <= ... <= λs)`` of
height ``s`` a component in degree ``n + s`` of the cone at ``λ0``.  The
boundary is ``d = ∂ + (-1)^n δ`` with

    δ(c)(μ) = p^(μ0 μ1) c(d^0 μ) + Σ_{j>=1} (-1)^j c(d^j μ).

The normalized variant only uses strictly increasing chains, so over a
finite poset it is a finite complex even without truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .divlin import (DivChainMap, DivComplex, DivGroup, DivHomology, LatticeSubgroup,
                     map_is_injective, map_is_surjective, maps_agree)
from .fgab import FgAbGroup, FgMorphism, kernel as fg_kernel
from .linalg import Mat
from .prosys import (ConeSystem, DirectSystem, NotDirected, chains, colimit_complex,
                     inverse_cone_system, is_degenerate)
from .cone import CochainMap, build_cone, cone_map_matrix, resolve
from .resolution import InjectiveResolution

__all__ = [
    "TruncatedTotal", "HeightTower", "SystemMorphism", "build_total", "total_homology",
    "truncation_map", "projection_matrix", "height_homology", "height_tower", "infinity_homology",
    "projection_to_lim", "induced_system_map", "h_map", "cone_lim_subquotient", "fg_map",
    "TotalFamily", "height0_matrix", "induced_total_map", "total_coefficient_matrix",
]


class TruncatedTotal:
    """Heights ``0..r`` of the total complex (all heights when ``r`` is None, normalized only)."""

    def __init__(self, cones: ConeSystem, r: int | None, normalized: bool = True):
        P = cones.system.poset
        if r is None:
            if not normalized:
                raise ValueError("the unnormalized total complex needs a finite height bound")
            r = P.height
        if r < 0:
            raise ValueError("height bound must be nonnegative")
        self.cones = cones
        self.system = cones.system
        self.resolution = cones.resolution
        self.normalized = normalized
        self.r = r
        self.effective_r = min(r, P.height) if normalized else r
        self.chains = {s: chains(P, s, strict=normalized) for s in range(self.effective_r + 1)}
        top = self.system.top_degree
        self.lo = -1 - self.effective_r
        self.hi = top
        self._hom: dict = {}
        self._block_index: dict = {}

    @property
    def full(self) -> bool:
        return self.normalized and self.effective_r >= self.system.poset.height

    def blocks(self, n: int) -> list[tuple[int, tuple, int, int]]:
        """``(s, chain, offset, size)`` for each nonzero block of degree n."""
        out = []
        off = 0
        for s in range(self.effective_r + 1):
            for ch in self.chains[s]:
                g = self.cones.cones[ch[0]].group(n + s)
                if g.dim:
                    out.append((s, ch, off, g.dim))
                    off += g.dim
        return out

    def block_map(self, n: int) -> dict:
        if n not in self._block_index:
            self._block_index[n] = {(s, ch): (off, size) for s, ch, off, size in self.blocks(n)}
        return self._block_index[n]

    def group(self, n: int) -> DivGroup:
        kinds = []
        for s, ch, _, _ in self.blocks(n):
            kinds.extend(self.cones.cones[ch[0]].group(n + s).kinds)
        return DivGroup(tuple(kinds))

    def boundary(self, n: int) -> Mat:
        """``d_n``: degree n -> degree n-1."""
        src = self.blocks(n)
        tgt = self.block_map(n - 1)
        nr = sum(size for _, _, _, size in self.blocks(n - 1))
        nc = sum(size for _, _, _, size in src)
        rows = [[0] * nc for _ in range(nr)]
        sign = -1 if n % 2 else 1

        def put(ro, co, M, coef):
            for i, row in enumerate(M.rows):
                tr = rows[ro + i]
                for j, x in enumerate(row):
                    if x:
                        tr[co + j] += coef * x

        for s, ch, co, size in src:
            cone = self.cones.cones[ch[0]]
            if (s, ch) in tgt:
                ro, _ = tgt[(s, ch)]
                put(ro, co, cone.boundary(n + s), 1)
            if s + 1 > self.effective_r:
                continue
            # chains μ of height s+1 with a face equal to ch
            for mu in self.chains[s + 1]:
                if (s + 1, mu) not in tgt:
                    continue
                ro, _ = tgt[(s + 1, mu)]
                if mu[1:] == ch:
                    put(ro, co, self.cones.matrix(mu[0], mu[1], n + s), sign)
                for j in range(1, s + 2):
                    if mu[:j] + mu[j + 1:] == ch:
                        put(ro, co, Mat.identity(size), sign * (-1 if j % 2 else 1))
        return Mat(rows, nr, nc)

    @cached_property
    def complex(self) -> DivComplex:
        groups = {n: self.group(n) for n in range(self.lo, self.hi + 1)}
        bds = {n: self.boundary(n) for n in range(self.lo + 1, self.hi + 1)}
        X = DivComplex(groups, bds)
        bad = X.check_square_zero()
        if bad:
            raise AssertionError(f"total boundary does not square to zero in degree {bad[0]}")
        return X

    def homology(self, n: int) -> DivHomology:
        if n not in self._hom:
            self._hom[n] = self.complex.homology(n)
        return self._hom[n]

    def __repr__(self) -> str:
        kind = "normalized" if self.normalized else "unnormalized"
        return f"TruncatedTotal({kind}, r={self.r}, degrees {self.lo}..{self.hi})"


def build_total(S: DirectSystem, G: Union[FgAbGroup, InjectiveResolution, ConeSystem],
                r: int | None, normalized: bool = True) -> TruncatedTotal:
    cs = G if isinstance(G, ConeSystem) else inverse_cone_system(S, G)
    return TruncatedTotal(cs, r, normalized)


def total_homology(T: TruncatedTotal, n: int) -> DivHomology:
    return T.homology(n)


def projection_matrix(T_hi: TruncatedTotal, T_lo: TruncatedTotal, n: int) -> Mat:
    """Block projection from degree n of ``T_hi`` onto degree n of ``T_lo``."""
    if T_hi.cones is not T_lo.cones or T_hi.normalized != T_lo.normalized or T_lo.r > T_hi.r:
        raise ValueError("truncations come from different builds")
    src = T_hi.blocks(n)
    tgt = T_lo.block_map(n)
    nr = sum(size for _, _, _, size in T_lo.blocks(n))
    nc = sum(size for _, _, _, size in src)
    rows = [[0] * nc for _ in range(nr)]
    for s, ch, co, size in src:
        if (s, ch) in tgt:
            ro, _ = tgt[(s, ch)]
            for i in range(size):
                rows[ro + i][co + i] = 1
    return Mat(rows, nr, nc)


def truncation_map(T_hi: TruncatedTotal, T_lo: TruncatedTotal) -> DivChainMap:
    m = DivChainMap(T_hi.complex, T_lo.complex,
                    {n: projection_matrix(T_hi, T_lo, n) for n in range(T_hi.lo, T_hi.hi + 1)})
    bad = m.commutation_defects()
    if bad:
        raise AssertionError(f"truncation is not a chain map in degree {bad[0]}")
    return m


def fg_map(matrix: Mat, source: DivHomology, target: DivHomology) -> FgMorphism:
    """FgMorphism induced by ``matrix`` between finitely generated subquotients."""
    cols = [target.coords(matrix.apply(z)) for z in source.lifts]
    return FgMorphism(source.group, target.group, Mat.from_columns(cols, target.group.ngens))


# ---------------------------------------------------------------------------
# heights


class TotalFamily:
    """Shared builds ``T(0), T(1), ...`` and the full complex for one (S, G)."""

    def __init__(self, S: DirectSystem, G, normalized: bool = True):
        self.system = S
        self.cones = G if isinstance(G, ConeSystem) else inverse_cone_system(S, G)
        self.normalized = normalized
        self._t: dict = {}
        self._heights: dict = {}

    def T(self, r: int | None) -> TruncatedTotal:
        P = self.system.poset
        if self.normalized and (r is None or r >= P.height):
            r = P.height
        if r not in self._t:
            self._t[r] = TruncatedTotal(self.cones, r, self.normalized)
        return self._t[r]

    @property
    def full(self) -> TruncatedTotal:
        return self.T(None)

    def height_homology(self, r: int, n: int) -> DivHomology:
        """Image of ``H(T(r+1)) -> H(T(r))`` as a subquotient of degree n of T(r)."""
        if (r, n) not in self._heights:
            self._heights[(r, n)] = self._height_homology(r, n)
        return self._heights[(r, n)]

    def _height_homology(self, r: int, n: int) -> DivHomology:
        lo, hi = self.T(r), self.T(r + 1)
        Hr = lo.homology(n)
        if hi is lo:
            return Hr
        P = projection_matrix(hi, lo, n)
        num = hi.homology(n).cycles.image(P) + Hr.bounds
        return DivHomology(num, Hr.bounds)

    def infinity_matrix(self, r: int, n: int) -> Mat:
        """Projection from the full complex onto T(r) in degree n."""
        return projection_matrix(self.full, self.T(r), n)


def height_homology(S: DirectSystem, G, r: int, n: int, normalized: bool = True) -> DivHomology:
    return TotalFamily(S, G, normalized).height_homology(r, n)


def infinity_homology(S: DirectSystem, G, n: int) -> DivHomology:
    """Homology of the full normalized total complex."""
    return TotalFamily(S, G).full.homology(n)


@dataclass
class HeightTower:
    groups: list[DivHomology]
    maps: list[FgMorphism | None]  # maps[r-1]: H(r) -> H(r-1)
    matrices: list[Mat]
    stable_from: int
    in_scope: bool = True

    def labels(self) -> list[str]:
        return [str(h) for h in self.groups]

    def __str__(self) -> str:
        return " <- ".join(self.labels())


def height_tower(S: DirectSystem, G, n: int, R: int, family: TotalFamily | None = None) -> HeightTower:
    fam = family or TotalFamily(S, G)
    groups = [fam.height_homology(r, n) for r in range(R + 1)]
    mats, maps = [], []
    for r in range(1, R + 1):
        m = projection_matrix(fam.T(r), fam.T(r - 1), n)
        mats.append(m)
        src, tgt = groups[r], groups[r - 1]
        maps.append(fg_map(m, src, tgt) if src.finitely_generated and tgt.finitely_generated else None)
    stable = 0
    for r in range(R, 0, -1):
        same_build = fam.T(r) is fam.T(r - 1)
        if not same_build:
            stable = r
            break
    return HeightTower(groups, maps, mats, stable, S.poset.directed)


# ---------------------------------------------------------------------------
# comparison with the limit of the cone homologies


def cone_lim_subquotient(cones: ConeSystem, n: int) -> tuple[DivHomology, list[tuple]]:
    """``lim_λ H_n(cone_λ)`` as a subquotient of ``⊕_λ cone_λ(n)``.

    Numerator: families of cycles compatible up to boundaries; denominator:
    families of boundaries.  Also returns ``(λ, offset, size)`` blocks.
    """
    P = cones.system.poset
    blocks = []
    off = 0
    for x in P.elements:
        d = cones.cones[x].group(n).dim
        blocks.append((x, off, d))
        off += d
    total = off
    Z_gens_W, Z_gens_L, B_gens_W, B_gens_L = [], [], [], []
    for x, o, d in blocks:
        h = cones.cones[x].homology(n)
        pad = lambda v, o=o, d=d: (0,) * o + tuple(v) + (0,) * (total - o - d)
        Z_gens_W += [pad(v) for v in h.cycles.W]
        Z_gens_L += [pad(v) for v in h.cycles.lam]
        B_gens_W += [pad(v) for v in h.bounds.W]
        B_gens_L += [pad(v) for v in h.bounds.lam]
    Z = LatticeSubgroup.from_gens(total, Z_gens_W, Z_gens_L)
    B = LatticeSubgroup.from_gens(total, B_gens_W, B_gens_L)
    pairs = P.pairs()
    if pairs:
        index = {x: (o, d) for x, o, d in blocks}
        # D x = (p x_b - x_a) over a < b, inside ⊕_{a<b} cone_a(n)
        rows = []
        Bt_W, Bt_L = [], []
        tot2 = sum(index[a][1] for a, _ in pairs)
        o2 = 0
        for a, b in pairs:
            oa, da = index[a]
            ob, db = index[b]
            M = cones.matrix(a, b, n)
            for i in range(da):
                row = [0] * total
                for j in range(db):
                    row[ob + j] = M[i, j]
                row[oa + i] -= 1
                rows.append(row)
            h = cones.cones[a].homology(n)
            pad = lambda v, o=o2, d=da: (0,) * o + tuple(v) + (0,) * (tot2 - o - d)
            Bt_W += [pad(v) for v in h.bounds.W]
            Bt_L += [pad(v) for v in h.bounds.lam]
            o2 += da
        D = Mat(rows, tot2, total)
        Bt = LatticeSubgroup.from_gens(tot2, Bt_W, Bt_L)
        num = Bt.preimage(D).intersection(Z)
    else:
        num = Z
    return DivHomology(num, B), blocks


def height0_matrix(T: TruncatedTotal, blocks: list[tuple], n: int) -> Mat:
    """Extract height-0 components of degree-n elements of T into ``⊕_λ cone_λ(n)``."""
    src = T.block_map(n)
    nr = sum(d for _, _, d in blocks)
    nc = sum(size for _, _, _, size in T.blocks(n))
    rows = [[0] * nc for _ in range(nr)]
    for x, o, d in blocks:
        key = (0, (x,))
        if key in src:
            co, _ = src[key]
            for i in range(d):
                rows[o + i][co + i] = 1
    return Mat(rows, nr, nc)


def projection_to_lim(S: DirectSystem, G, n: int, family: TotalFamily | None = None):
    """``(matrix, H̄∞_n, lim H_n(cone_λ))``; FgMorphism available via :func:`fg_map`."""
    fam = family or TotalFamily(S, G)
    if not S.poset.directed:
        raise NotDirected("projection to the limit is only checked on directed posets")
    lim, blocks = cone_lim_subquotient(fam.cones, n)
    T = fam.full
    return height0_matrix(T, blocks, n), T.homology(n), lim


# ---------------------------------------------------------------------------
# the map from the limit cone


def h_map(T: TruncatedTotal) -> DivChainMap:
    """``c |-> (p^(λ, max) c at height 0; 0 above)`` from the cone at the maximum."""
    S = T.system
    m = S.poset.maximum
    if m is None:
        raise NotDirected("the limit cone needs a maximum element")
    L = T.cones.cones[m]
    maps = {}
    for n in range(T.lo, T.hi + 1):
        blocks = T.blocks(n)
        nr = sum(size for _, _, _, size in blocks)
        nc = L.group(n).dim
        rows = [[0] * nc for _ in range(nr)]
        for s, ch, ro, size in blocks:
            if s == 0:
                M = T.cones.matrix(ch[0], m, n)
                for i in range(size):
                    rows[ro + i] = list(M.rows[i])
        maps[n] = Mat(rows, nr, nc)
    h = DivChainMap(L, T.complex, maps)
    bad = h.commutation_defects()
    if bad:
        raise AssertionError(f"h is not a chain map in degree {bad[0]}")
    return h


# ---------------------------------------------------------------------------
# morphisms of systems


@dataclass(eq=False)
class SystemMorphism:
    """``f_λ: C_λ -> D_(φ λ)`` for ``C = source`` over Λ and ``D = target`` over M."""

    source: DirectSystem
    target: DirectSystem
    index_map: dict
    maps: dict

    def check(self) -> list[tuple]:
        """Failing squares ``(λ, λ')`` of the naturality condition."""
        bad = []
        P = self.source.poset
        Q = self.target.poset
        for a, b in P.pairs(strict=False):
            fa, fb = self.index_map[a], self.index_map[b]
            if not Q.le(fa, fb):
                bad.append((a, b))
                continue
            lhs = self.target.bonding(fa, fb).compose(self.maps[a])
            rhs = self.maps[b].compose(self.source.bonding(a, b))
            if not lhs.equals(rhs):
                bad.append((a, b))
        return bad


def induced_total_map(F: SystemMorphism, T_D: TruncatedTotal, T_C: TruncatedTotal) -> DivChainMap:
    """``T(D) -> T(C)``: ``(f c)(λ) = f_λ^# c(φ λ)``, zero where ``φ λ`` degenerates."""
    R = T_C.resolution
    maps = {}
    for n in range(min(T_C.lo, T_D.lo), max(T_C.hi, T_D.hi) + 1):
        tgt = T_C.blocks(n)
        src = T_D.block_map(n)
        nr = sum(size for _, _, _, size in tgt)
        nc = sum(size for _, _, _, size in T_D.blocks(n))
        rows = [[0] * nc for _ in range(nr)]
        for s, ch, ro, size in tgt:
            image = tuple(F.index_map[x] for x in ch)
            if T_C.normalized and is_degenerate(image):
                continue
            if (s, image) not in src:
                continue
            co, _ = src[(s, image)]
            M = cone_map_matrix(F.maps[ch[0]], R, n + s)
            for i in range(size):
                for j, x in enumerate(M.rows[i]):
                    if x:
                        rows[ro + i][co + j] = x
        maps[n] = Mat(rows, nr, nc)
    return DivChainMap(T_D.complex, T_C.complex, maps)


def induced_system_map(F: SystemMorphism, G, n: int) -> FgMorphism:
    """``f_*: H̄∞_n(target) -> H̄∞_n(source)``."""
    bad = F.check()
    if bad:
        raise ValueError(f"level maps do not commute with bondings at {bad[0]}")
    R = resolve(G)
    T_D = build_total(F.target, R, None)
    T_C = build_total(F.source, R, None)
    f = induced_total_map(F, T_D, T_C)
    badc = f.commutation_defects()
    if badc:
        raise AssertionError(f"induced total map is not a chain map in degree {badc[0]}")
    return fg_map(f.at(n), T_D.homology(n), T_C.homology(n))


def total_coefficient_matrix(T_src: TruncatedTotal, T_tgt: TruncatedTotal, a0: Mat, a1: Mat, n: int) -> Mat:
    """Blockwise change of coefficients ``(a0, a1)`` between total complexes of one system."""
    from .cone import coefficient_cone_matrix
    tgt = T_tgt.block_map(n)
    nr = sum(size for _, _, _, size in T_tgt.blocks(n))
    src = T_src.blocks(n)
    nc = sum(size for _, _, _, size in src)
    rows = [[0] * nc for _ in range(nr)]
    for s, ch, co, size in src:
        M = coefficient_cone_matrix(T_src.system.complexes[ch[0]], a0, a1, n + s)
        if (s, ch) not in tgt:
            continue
        ro, _ = tgt[(s, ch)]
        for i, row in enumerate(M.rows):
            for j, x in enumerate(row):
                if x:
                    rows[ro + i][co + j] = x
    return Mat(rows, nr, nc)
