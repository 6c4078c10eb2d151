"""Cochain complexes of free groups and the cone of ``Hom(C, I0) -> Hom(C, I1)``.

In degree n the cone is ``Hom(C^n, I0) ⊕ Hom(C^(n+1), I1)`` with boundary
``(a, b) |-> (a∘δ, β∘a - b∘δ)``.  A homomorphism ``Z^r -> I`` is stored as
r consecutive blocks of I-coordinates, so precomposition with ``δ`` is the
Kronecker product ``δ^T ⊗ id`` and postcomposition with ``β`` is
``id ⊗ β``.  Its homology is the homology of C with coefficients in G.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .divlin import (DivComplex, DivChainMap, DivGroup, DivHomology, direct_sum)
from .fgab import FgAbGroup, FgMorphism, complex_homology, ext_group, free, hom_group
from .linalg import Mat, block_diag, identity_kron, kron_identity
from .resolution import InjectiveResolution, build_resolution

__all__ = [
    "CochainComplex", "CochainMap", "DimensionMismatch", "build_cone", "induced_cone_map",
    "coefficient_cone_map", "cone_homology", "cone_div_homology", "ucf_oracle", "resolve",
]


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """Free groups ``Z^ranks[n]`` in degrees ``0..N`` with ``diffs[n]: C^n -> C^(n+1)``."""

    ranks: tuple[int, ...]
    diffs: tuple[Mat, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        diffs = tuple(d.to_int() for d in self.diffs)
        object.__setattr__(self, "diffs", diffs)
        if len(diffs) != max(len(ranks) - 1, 0):
            raise DimensionMismatch(f"expected {max(len(ranks) - 1, 0)} differentials, got {len(diffs)}")
        for n, d in enumerate(diffs):
            if d.shape != (ranks[n + 1], ranks[n]):
                raise DimensionMismatch(
                    f"differential in degree {n} has shape {d.shape}, expected {(ranks[n + 1], ranks[n])}")
        for n in range(len(diffs) - 1):
            if not (diffs[n + 1] @ diffs[n]).is_zero():
                raise ValueError(f"differentials in degrees {n}, {n + 1} do not compose to zero")

    @classmethod
    def zero(cls) -> "CochainComplex":
        return cls((), ())

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def d(self, n: int) -> Mat:
        """``δ^n: C^n -> C^(n+1)`` (zero matrix outside the stored range)."""
        if 0 <= n < len(self.diffs):
            return self.diffs[n]
        return Mat.zeros(self.rank(n + 1), self.rank(n))

    def cohomology(self, n: int) -> FgAbGroup:
        g = free(self.rank(n))
        out = FgMorphism(g, free(self.rank(n + 1)), self.d(n))
        inc = FgMorphism(free(self.rank(n - 1)), g, self.d(n - 1))
        return complex_homology(inc, out, g).group.canonical_form()

    def direct_sum(self, other: "CochainComplex") -> "CochainComplex":
        N = max(len(self.ranks), len(other.ranks))
        ranks = tuple(self.rank(n) + other.rank(n) for n in range(N))
        return CochainComplex(ranks, tuple(block_diag([self.d(n), other.d(n)]) for n in range(N - 1)))


@dataclass(frozen=True, eq=False)
class CochainMap:
    """Degreewise integer matrices ``maps[n]: source^n -> target^n``."""

    source: CochainComplex
    target: CochainComplex
    maps: tuple[Mat, ...]

    def __post_init__(self):
        N = max(len(self.source.ranks), len(self.target.ranks))
        maps = [m.to_int() for m in self.maps]
        for n in range(len(maps), N):
            maps.append(Mat.zeros(self.target.rank(n), self.source.rank(n)))
        object.__setattr__(self, "maps", tuple(maps))
        for n, m in enumerate(maps):
            if m.shape != (self.target.rank(n), self.source.rank(n)):
                raise DimensionMismatch(f"map in degree {n} has shape {m.shape}, "
                                        f"expected {(self.target.rank(n), self.source.rank(n))}")
        bad = self.commutation_defects()
        if bad:
            raise ValueError(f"not a cochain map: square fails in degree {bad[0]}")

    def at(self, n: int) -> Mat:
        if 0 <= n < len(self.maps):
            return self.maps[n]
        return Mat.zeros(self.target.rank(n), self.source.rank(n))

    def commutation_defects(self) -> list[int]:
        bad = []
        for n in range(len(self.maps)):
            if self.target.d(n) @ self.at(n) != self.at(n + 1) @ self.source.d(n):
                bad.append(n)
        return bad

    def compose(self, first: "CochainMap") -> "CochainMap":
        """``self ∘ first``."""
        N = max(len(self.maps), len(first.maps))
        return CochainMap(first.source, self.target, tuple(self.at(n) @ first.at(n) for n in range(N)))

    def equals(self, other: "CochainMap") -> bool:
        N = max(len(self.maps), len(other.maps))
        return all(self.at(n) == other.at(n) for n in range(N))

    @classmethod
    def identity(cls, C: CochainComplex) -> "CochainMap":
        return cls(C, C, tuple(Mat.identity(r) for r in C.ranks))


def resolve(G: Union[FgAbGroup, InjectiveResolution]) -> InjectiveResolution:
    return G if isinstance(G, InjectiveResolution) else build_resolution(G)


def cone_group(C: CochainComplex, R: InjectiveResolution, n: int) -> DivGroup:
    return DivGroup(R.I0.kinds * C.rank(n) + R.I1.kinds * C.rank(n + 1))


def cone_boundary(C: CochainComplex, R: InjectiveResolution, n: int) -> Mat:
    """``∂_n``: degree n -> degree n-1 of the cone."""
    a0, a1 = R.I0.dim, R.I1.dim
    top_left = kron_identity(C.d(n - 1).T, a0)
    bottom_left = identity_kron(C.rank(n), R.beta)
    bottom_right = kron_identity(C.d(n).T, a1).scale(-1)
    rows0 = C.rank(n - 1) * a0
    cols1 = C.rank(n + 1) * a1
    top = [list(r) + [0] * cols1 for r in top_left.rows]
    bottom = [list(r) + list(s) for r, s in zip(bottom_left.rows, bottom_right.rows)]
    return Mat(top + bottom, rows0 + C.rank(n) * a1, C.rank(n) * a0 + cols1)


def build_cone(C: CochainComplex, R: Union[FgAbGroup, InjectiveResolution]) -> DivComplex:
    """Cone complex in degrees ``-1..N``."""
    R = resolve(R)
    lo, hi = -1, C.top
    groups = {n: cone_group(C, R, n) for n in range(lo, hi + 1)}
    bds = {n: cone_boundary(C, R, n) for n in range(lo + 1, hi + 1)}
    X = DivComplex(groups, bds)
    bad = X.check_square_zero()
    if bad:
        raise AssertionError(f"cone boundary does not square to zero in degree {bad[0]}")
    return X


def cone_map_matrix(f: CochainMap, R: InjectiveResolution, n: int) -> Mat:
    """Degree-n matrix of the contravariant map cone(target) -> cone(source)."""
    return block_diag([kron_identity(f.at(n).T, R.I0.dim), kron_identity(f.at(n + 1).T, R.I1.dim)])


def induced_cone_map(f: CochainMap, R: Union[FgAbGroup, InjectiveResolution],
                     source: DivComplex | None = None, target: DivComplex | None = None) -> DivChainMap:
    """``(a, b) |-> (a∘f^n, b∘f^(n+1))``: cone(f.target) -> cone(f.source)."""
    R = resolve(R)
    src = source or build_cone(f.target, R)
    tgt = target or build_cone(f.source, R)
    N = max(f.source.top, f.target.top)
    return DivChainMap(src, tgt, {n: cone_map_matrix(f, R, n) for n in range(-1, N + 1)})


def coefficient_cone_matrix(C: CochainComplex, a0: Mat, a1: Mat, n: int) -> Mat:
    return block_diag([identity_kron(C.rank(n), a0), identity_kron(C.rank(n + 1), a1)])


def coefficient_cone_map(C: CochainComplex, R: InjectiveResolution, R2: InjectiveResolution,
                         a0: Mat, a1: Mat) -> DivChainMap:
    """Chain map induced by a map of resolutions ``(a0: I0 -> I0', a1: I1 -> I1')``."""
    src, tgt = build_cone(C, R), build_cone(C, R2)
    return DivChainMap(src, tgt, {n: coefficient_cone_matrix(C, a0, a1, n)
                                  for n in range(-1, C.top + 1)})


def cone_div_homology(C: CochainComplex, G: Union[FgAbGroup, InjectiveResolution], n: int) -> DivHomology:
    return build_cone(C, G).homology(n)


def cone_homology(C: CochainComplex, G: Union[FgAbGroup, InjectiveResolution], n: int) -> FgAbGroup:
    """Homology of C with coefficients G in degree n (finitely generated G)."""
    return cone_div_homology(C, G, n).group.canonical_form()


def ucf_oracle(C: CochainComplex, G: FgAbGroup, n: int) -> tuple[FgAbGroup, FgAbGroup]:
    """``(Ext(H^(n+1)(C), G), Hom(H^n(C), G))``."""
    return ext_group(C.cohomology(n + 1), G), hom_group(C.cohomology(n), G)
