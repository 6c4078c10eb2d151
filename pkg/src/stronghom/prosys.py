"""Finite posets, direct systems of cochain complexes and their cone systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .cone import (CochainComplex, CochainMap, build_cone, cone_map_matrix, resolve)
from .divlin import DivChainMap, DivComplex
from .fgab import FgAbGroup
from .report import Report
from .resolution import InjectiveResolution

__all__ = [
    "FinitePoset", "DirectSystem", "NotDirected", "chains", "validate_system", "colimit_complex",
    "inverse_cone_system", "limit_cone_complex", "h_chain_map", "is_degenerate",
]


class NotDirected(ValueError):
    """The poset has no maximum, so the colimit/limit identity is unavailable."""


class FinitePoset:
    """A finite partial order given by generating pairs ``(a, b)`` meaning ``a <= b``.

    The order is the reflexive-transitive closure; antisymmetry is checked.
    Element order is kept as given and drives every enumeration.
    """

    def __init__(self, elements: Sequence[Hashable], relations: Iterable[tuple] = ()):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self.index = {x: i for i, x in enumerate(self.elements)}
        n = len(self.elements)
        le = [[i == j for j in range(n)] for i in range(n)]
        for a, b in relations:
            if a not in self.index or b not in self.index:
                raise ValueError(f"relation ({a!r}, {b!r}) uses an unknown element")
            le[self.index[a]][self.index[b]] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    row_k = le[k]
                    row_i = le[i]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        for i in range(n):
            for j in range(i + 1, n):
                if le[i][j] and le[j][i]:
                    raise ValueError(f"order relation is not antisymmetric: "
                                     f"{self.elements[i]!r} and {self.elements[j]!r}")
        self._le = le

    def le(self, a, b) -> bool:
        return self._le[self.index[a]][self.index[b]]

    def lt(self, a, b) -> bool:
        return a != b and self.le(a, b)

    def pairs(self, strict: bool = True) -> list[tuple]:
        return [(a, b) for a in self.elements for b in self.elements
                if (self.lt(a, b) if strict else self.le(a, b))]

    def covers(self) -> list[tuple]:
        """Covering pairs ``a < b`` with nothing strictly between."""
        out = []
        for a, b in self.pairs():
            if not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                out.append((a, b))
        return out

    @cached_property
    def maximum(self):
        for m in self.elements:
            if all(self.le(x, m) for x in self.elements):
                return m
        return None

    @property
    def directed(self) -> bool:
        """Finite posets are directed iff they have a maximum."""
        return self.maximum is not None and bool(self.elements)

    @cached_property
    def height(self) -> int:
        """Length of the longest strict chain (number of steps)."""
        best = {}
        for x in self._topological():
            best[x] = max((best[y] + 1 for y in self.elements if y in best and self.lt(y, x)), default=0)
        return max(best.values(), default=0)

    def _topological(self) -> list:
        return sorted(self.elements, key=lambda x: sum(self.le(y, x) for y in self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.elements)!r}, covers={self.covers()!r})"


def chains(P: FinitePoset, s: int, strict: bool = True) -> list[tuple]:
    """Chains ``λ0 <= ... <= λs`` (strictly increasing when ``strict``), lexicographic in element order."""
    if s < 0:
        return []
    out = [(x,) for x in P.elements]
    for _ in range(s):
        nxt = []
        for c in out:
            for y in P.elements:
                if (P.lt(c[-1], y) if strict else P.le(c[-1], y)):
                    nxt.append(c + (y,))
        out = nxt
    return out


def is_degenerate(chain: Sequence) -> bool:
    return any(a == b for a, b in zip(chain, chain[1:]))


@dataclass(eq=False)
class DirectSystem:
    """Cochain complexes ``complexes[λ]`` with bondings ``C_λ -> C_λ'`` for ``λ <= λ'``.

    ``bondings`` may list any generating set of pairs (typically covers);
    missing pairs are filled by composing along a path, and identities are
    implicit.  :func:`validate_system` checks the composition law.
    """

    poset: FinitePoset
    complexes: Mapping[Hashable, CochainComplex]
    bondings: Mapping[tuple, CochainMap] = field(default_factory=dict)

    def __post_init__(self):
        for x in self.poset.elements:
            if x not in self.complexes:
                raise ValueError(f"no complex for element {x!r}")
        for (a, b) in self.bondings:
            if not self.poset.le(a, b):
                raise ValueError(f"bonding ({a!r}, {b!r}) does not follow the order")
        self._cache: dict = {}

    def bonding(self, a, b) -> CochainMap:
        if (a, b) in self.bondings:
            return self.bondings[(a, b)]
        if a == b:
            return CochainMap.identity(self.complexes[a])
        if (a, b) in self._cache:
            return self._cache[(a, b)]
        if not self.poset.lt(a, b):
            raise ValueError(f"{a!r} is not below {b!r}")
        P = self.poset
        # a stored step a -> c with c <= b, then recurse
        for (x, c) in self.bondings:
            if x == a and c != a and P.le(c, b):
                m = self.bonding(c, b).compose(self.bondings[(a, c)])
                self._cache[(a, b)] = m
                return m
        raise ValueError(f"no bonding path from {a!r} to {b!r}")

    @property
    def elements(self):
        return self.poset.elements

    @property
    def top_degree(self) -> int:
        return max((C.top for C in self.complexes.values()), default=-1)


def validate_system(S: DirectSystem) -> Report:
    rep = Report("direct system")
    P = S.poset
    for x in P.elements:
        if (x, x) in S.bondings:
            ok = S.bondings[(x, x)].equals(CochainMap.identity(S.complexes[x]))
            rep.add(f"identity at {x!r}", ok)
    for (a, b), m in S.bondings.items():
        ok = m.source is S.complexes[a] or m.source.ranks == S.complexes[a].ranks
        ok = ok and (m.target is S.complexes[b] or m.target.ranks == S.complexes[b].ranks)
        rep.add(f"bonding ({a!r}, {b!r}) matches its complexes", ok)
    bad = []
    for a, b in P.pairs():
        try:
            S.bonding(a, b)
        except ValueError as e:
            rep.add(f"bonding ({a!r}, {b!r}) defined", False, str(e))
    for a, b, c in product(P.elements, repeat=3):
        if P.lt(a, b) and P.lt(b, c):
            try:
                ok = S.bonding(b, c).compose(S.bonding(a, b)).equals(S.bonding(a, c))
            except ValueError:
                ok = False
            if not ok:
                bad.append((a, b, c))
    rep.add("composition law", not bad, f"{len(bad)} failing triples" if bad else "",
            witness=bad[0] if bad else None)
    return rep


def colimit_complex(S: DirectSystem) -> tuple[CochainComplex, dict]:
    """``C`` at the maximum and the injections ``p_(λ, max)``."""
    m = S.poset.maximum
    if m is None:
        raise NotDirected("colimit undefined in scope: the poset has no maximum")
    return S.complexes[m], {x: S.bonding(x, m) for x in S.poset.elements}


@dataclass(eq=False)
class ConeSystem:
    """Cones per element and contravariant bonding chain maps ``cone_λ' -> cone_λ``."""

    system: DirectSystem
    resolution: InjectiveResolution
    cones: dict
    _maps: dict = field(default_factory=dict)

    def bonding(self, a, b) -> DivChainMap:
        """Chain map cone(b) -> cone(a) for ``a <= b``."""
        key = (a, b)
        if key not in self._maps:
            f = self.system.bonding(a, b)
            N = max(f.source.top, f.target.top)
            self._maps[key] = DivChainMap(self.cones[b], self.cones[a],
                                          {n: cone_map_matrix(f, self.resolution, n)
                                           for n in range(-1, N + 1)})
        return self._maps[key]

    def matrix(self, a, b, n: int):
        return self.bonding(a, b).at(n)


def inverse_cone_system(S: DirectSystem, G: Union[FgAbGroup, InjectiveResolution],
                        check: bool = True) -> ConeSystem:
    R = resolve(G)
    cones = {x: build_cone(S.complexes[x], R) for x in S.poset.elements}
    cs = ConeSystem(S, R, cones)
    if check:
        for a, b in S.poset.pairs():
            bad = cs.bonding(a, b).commutation_defects()
            if bad:
                raise AssertionError(f"cone bonding ({a!r}, {b!r}) is not a chain map in degree {bad[0]}")
    return cs


def limit_cone_complex(S: DirectSystem, G: Union[FgAbGroup, InjectiveResolution]) -> DivComplex:
    """Limit of the cone system, realized as the cone of the colimit complex."""
    C, _ = colimit_complex(S)
    return build_cone(C, resolve(G))


def h_chain_map(S: DirectSystem, G, total=None):
    """Chain map from the limit cone into the normalized total complex (heights 0 only)."""
    from .total import build_total, h_map
    T = total or build_total(S, G, None, normalized=True)
    return h_map(T)
