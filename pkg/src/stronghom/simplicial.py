"""Ordered simplicial cochains of finite pairs (K, L) and induced cochain maps.

Simplices are sorted vertex tuples; n-simplices are listed in
lexicographic order and form the cochain basis in degree n (simplices of
L are dropped, so cochains vanish on L).
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .cone import CochainComplex, CochainMap
from .linalg import Mat

__all__ = ["SimplicialComplex", "NonSimplicialMap", "cochain_complex", "cochain_map",
           "rp2", "circle", "point", "wedge_of_rp2", "collapse_last_summand", "simplex"]


class NonSimplicialMap(ValueError):
    pass


def _key(v):
    return (type(v).__name__, v)


class SimplicialComplex:
    """Downward closure of a list of facets."""

    def __init__(self, facets: Iterable[Sequence[Hashable]]):
        faces = set()
        for f in facets:
            f = tuple(sorted(set(f), key=_key))
            if not f:
                continue
            for k in range(1, len(f) + 1):
                faces.update(combinations(f, k))
        self.faces = frozenset(faces)

    @cached_property
    def dim(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def simplices(self, n: int) -> list[tuple]:
        return sorted((f for f in self.faces if len(f) == n + 1), key=lambda f: [_key(v) for v in f])

    @property
    def vertices(self) -> list:
        return [f[0] for f in self.simplices(0)]

    def __contains__(self, simplex) -> bool:
        return tuple(sorted(set(simplex), key=_key)) in self.faces

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.faces <= other.faces

    def facets(self) -> list[tuple]:
        fs = sorted(self.faces, key=lambda f: (-len(f), [_key(v) for v in f]))
        out = []
        for f in fs:
            if not any(set(f) < set(g) for g in out):
                out.append(f)
        return sorted(out, key=lambda f: [_key(v) for v in f])


def _basis(K: SimplicialComplex, L: SimplicialComplex | None, n: int) -> list[tuple]:
    s = K.simplices(n)
    if L is not None:
        s = [x for x in s if x not in L.faces]
    return s


def cochain_complex(K: SimplicialComplex, L: SimplicialComplex | None = None) -> CochainComplex:
    """Cochains of (K, L); ``(δφ)(σ) = Σ (-1)^i φ(d_i σ)``."""
    if L is not None and not L.is_subcomplex_of(K):
        raise ValueError("L is not a subcomplex of K")
    top = K.dim
    bases = [_basis(K, L, n) for n in range(top + 1)]
    while bases and not bases[-1]:
        bases.pop()
    if not bases:
        return CochainComplex.zero()
    diffs = []
    for n in range(len(bases) - 1):
        index = {s: j for j, s in enumerate(bases[n])}
        rows = []
        for sigma in bases[n + 1]:
            row = [0] * len(bases[n])
            for i in range(len(sigma)):
                j = index.get(sigma[:i] + sigma[i + 1:])
                if j is not None:
                    row[j] += -1 if i % 2 else 1
            rows.append(row)
        diffs.append(Mat(rows, len(bases[n + 1]), len(bases[n])))
    return CochainComplex(tuple(len(b) for b in bases), tuple(diffs))


def _perm_sign(seq: Sequence) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if _key(seq[i]) > _key(seq[j]):
                sign = -sign
    return sign


def cochain_map(vertex_map: Mapping, K: SimplicialComplex, K2: SimplicialComplex,
                L: SimplicialComplex | None = None, L2: SimplicialComplex | None = None) -> CochainMap:
    """Cochain map ``C(K2, L2) -> C(K, L)`` induced by a simplicial map ``(K, L) -> (K2, L2)``."""
    for v in K.vertices:
        if v not in vertex_map:
            raise NonSimplicialMap(f"vertex {v!r} has no image")
    for f in K.faces:
        img = {vertex_map[v] for v in f}
        if tuple(sorted(img, key=_key)) not in K2.faces:
            raise NonSimplicialMap(f"image of simplex {f} is not a simplex")
        if L is not None and f in L.faces:
            if L2 is None or tuple(sorted(img, key=_key)) not in L2.faces:
                raise NonSimplicialMap(f"simplex {f} of L does not map into L2")
    src = cochain_complex(K2, L2)
    tgt = cochain_complex(K, L)
    top = max(len(src.ranks), len(tgt.ranks))
    maps = []
    for n in range(top):
        rows_b = _basis(K, L, n) if n <= K.dim else []
        cols_b = _basis(K2, L2, n) if n <= K2.dim else []
        index = {s: j for j, s in enumerate(cols_b)}
        rows = []
        for sigma in rows_b:
            row = [0] * len(cols_b)
            img = [vertex_map[v] for v in sigma]
            if len(set(img)) == len(img):
                j = index.get(tuple(sorted(img, key=_key)))
                if j is not None:
                    row[j] = _perm_sign(img)
            rows.append(row)
        maps.append(Mat(rows, tgt.rank(n), src.rank(n)))
    return CochainMap(src, tgt, tuple(maps[:max(len(src.ranks), len(tgt.ranks))]))


# ---------------------------------------------------------------------------
# standard models

_RP2_FACETS = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
               (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]


def rp2() -> SimplicialComplex:
    """Six-vertex projective plane."""
    return SimplicialComplex(_RP2_FACETS)


def circle() -> SimplicialComplex:
    return SimplicialComplex([(0, 1), (1, 2), (0, 2)])


def point() -> SimplicialComplex:
    return SimplicialComplex([(0,)])


def simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex([tuple(range(n + 1))])


def _wedge_vertex(copy: int, v: int) -> int:
    return 0 if v == 0 else 5 * copy + v


def wedge_of_rp2(k: int) -> SimplicialComplex:
    """``k`` copies of the projective plane glued at vertex 0."""
    return SimplicialComplex([tuple(_wedge_vertex(c, v) for v in f)
                              for c in range(k) for f in _RP2_FACETS] or [(0,)])


def collapse_last_summand(k: int) -> dict:
    """Vertex map ``∨^k -> ∨^(k-1)`` sending the k-th copy to the wedge point."""
    m = {0: 0}
    for c in range(k):
        for v in range(1, 6):
            m[_wedge_vertex(c, v)] = 0 if c == k - 1 else _wedge_vertex(c, v)
    return m
