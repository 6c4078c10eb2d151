"""Standard direct systems and seeded random generators."""

from __future__ import annotations

import os
import random
from itertools import combinations

from .cone import CochainComplex, CochainMap
from .fgab import FgAbGroup, cyclic, free
from .linalg import Mat, hermite_rows, solve_rational
from .prosys import DirectSystem, FinitePoset
from .simplicial import (SimplicialComplex, circle, cochain_complex, cochain_map, collapse_last_summand,
                         point, rp2, wedge_of_rp2)

__all__ = [
    "DEFAULT_SEED", "resolve_seed", "one_element_system", "chain_point_system", "wedge_system",
    "constant_system", "collapse_morphism", "random_complex", "random_poset", "random_sublattice_system",
    "random_restriction_system", "random_system", "system_suite", "pseudo_circle_poset", "rp2_complex",
    "point_complex", "simplicial_system",
]

DEFAULT_SEED = 20240517


def resolve_seed(seed: int | None = None) -> int:
    """Explicit seed, else the STRONGHOM_SEED environment variable, else the default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("STRONGHOM_SEED")
    return int(env) if env else DEFAULT_SEED


def rp2_complex() -> CochainComplex:
    """Minimal cochain model of the projective plane: ranks 1,1,1 with δ = 0, 2."""
    return CochainComplex((1, 1, 1), (Mat([[0]]), Mat([[2]])))


def point_complex() -> CochainComplex:
    return CochainComplex((1,), ())


def one_element_system(C: CochainComplex) -> DirectSystem:
    return DirectSystem(FinitePoset([0]), {0: C})


def constant_system(P: FinitePoset, C: CochainComplex) -> DirectSystem:
    idm = CochainMap.identity(C)
    return DirectSystem(P, {x: C for x in P.elements}, {c: idm for c in P.covers()})


def chain_point_system() -> DirectSystem:
    """Point complexes over ``0 < 1`` with the identity bonding."""
    return constant_system(FinitePoset([0, 1], [(0, 1)]), point_complex())


def pseudo_circle_poset() -> FinitePoset:
    return FinitePoset(["a", "b", "c", "d"], [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def simplicial_system(P: FinitePoset, spaces: dict, maps: dict) -> DirectSystem:
    """System of cochain complexes from spaces ``X_λ`` and maps ``X_λ' -> X_λ`` (``λ <= λ'``)."""
    complexes = {x: cochain_complex(K) for x, K in spaces.items()}
    bond = {}
    for (a, b), vmap in maps.items():
        f = cochain_map(vmap, spaces[b], spaces[a])
        bond[(a, b)] = CochainMap(complexes[a], complexes[b], f.maps)
    return DirectSystem(P, complexes, bond)


def wedge_system(k: int) -> DirectSystem:
    """``∨^1 RP² <- ∨^2 RP² <- ... <- ∨^k RP²`` by collapsing the last summand."""
    P = FinitePoset(list(range(1, k + 1)), [(j, j + 1) for j in range(1, k)])
    spaces = {j: wedge_of_rp2(j) for j in range(1, k + 1)}
    maps = {(j, j + 1): collapse_last_summand(j + 1) for j in range(1, k)}
    return simplicial_system(P, spaces, maps)


def collapse_morphism():
    """``RP² -> point`` as a morphism of one-element systems (point cochains -> RP² cochains)."""
    from .total import SystemMorphism
    K = rp2()
    pt = point()
    f = cochain_map({v: 0 for v in K.vertices}, K, pt)
    src = one_element_system(f.source)
    tgt = one_element_system(f.target)
    return SystemMorphism(src, tgt, {0: 0}, {0: f})


# ---------------------------------------------------------------------------
# random instances


def _random_unimodular(rng: random.Random, n: int, steps: int = 3) -> Mat:
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if n and rng.random() < 0.3:
        i = rng.randrange(n)
        rows[i] = [-a for a in rows[i]]
    return Mat(rows, n, n)


def _unimodular_inverse(U: Mat) -> Mat:
    n = U.nrows
    cols = [solve_rational(U, tuple(1 if k == i else 0 for k in range(n))) for i in range(n)]
    return Mat.from_columns(cols, n).to_int()


def random_complex(rng: random.Random, max_degree: int = 3, max_rank: int = 3,
                   max_entry: int = 4, tries: int = 200) -> CochainComplex:
    """Random bounded complex, built as a sum of elementary pieces in a random basis."""
    for _ in range(tries):
        top = rng.randint(0, max_degree)
        ranks = [rng.randint(0, max_rank) for _ in range(top + 1)]
        if not any(ranks):
            ranks[0] = 1
        # pair off basis elements into pieces Z -(d)-> Z in consecutive degrees
        diag = [[[0] * ranks[n] for _ in range(ranks[n + 1])] for n in range(top)]
        used = [0] * (top + 1)
        for n in range(top):
            while used[n] < ranks[n] and used[n + 1] < ranks[n + 1] and rng.random() < 0.6:
                diag[n][used[n + 1]][used[n]] = rng.choice([1, 1, 2, 2, 3, 4, -2])
                used[n] += 1
                used[n + 1] += 1
        Us = [_random_unimodular(rng, r) for r in ranks]
        Uinv = [_unimodular_inverse(U) for U in Us]
        diffs = []
        ok = True
        for n in range(top):
            D = Mat(diag[n], ranks[n + 1], ranks[n])
            M = Us[n + 1] @ D @ Uinv[n]
            if any(abs(x) > max_entry for r in M.rows for x in r):
                ok = False
                break
            diffs.append(M)
        if ok:
            return CochainComplex(tuple(ranks), tuple(diffs))
    return CochainComplex((1,), ())


def random_poset(rng: random.Random, k: int) -> FinitePoset:
    """Random order on ``0..k-1`` with ``k-1`` as the maximum."""
    rel = []
    for i in range(k - 1):
        for j in range(i + 1, k - 1):
            if rng.random() < 0.4:
                rel.append((i, j))
        rel.append((i, k - 1))
    return FinitePoset(list(range(k)), rel)


def _span_subcomplex(A: CochainComplex, gens: dict) -> list[list[list[int]]]:
    """HNF bases (rows) per degree of the subcomplex generated by ``gens[n]``."""
    top = A.top
    spans = [list(gens.get(n, [])) for n in range(top + 1)]
    for n in range(top):
        spans[n + 1] += [list(A.d(n).apply(v)) for v in spans[n]]
    return [hermite_rows(spans[n], A.rank(n)) if spans[n] else [] for n in range(top + 1)]


def _restricted_complex(A: CochainComplex, bases) -> CochainComplex:
    ranks = tuple(len(b) for b in bases)
    diffs = []
    for n in range(len(bases) - 1):
        B1 = Mat.from_columns(bases[n + 1], A.rank(n + 1)) if bases[n + 1] else None
        cols = []
        for v in bases[n]:
            w = A.d(n).apply(v)
            if B1 is None:
                cols.append([])
            else:
                c = solve_rational(B1, w)
                cols.append([int(x) for x in c])
        diffs.append(Mat.from_columns(cols, ranks[n + 1]) if bases[n] else Mat.zeros(ranks[n + 1], 0))
    return CochainComplex(ranks, tuple(diffs))


def _inclusion(A: CochainComplex, small, big) -> list[Mat]:
    out = []
    for n in range(len(small)):
        if not small[n]:
            out.append(Mat.zeros(len(big[n]), 0))
            continue
        B = Mat.from_columns(big[n], A.rank(n))
        cols = [[int(x) for x in solve_rational(B, v)] for v in small[n]]
        out.append(Mat.from_columns(cols, len(big[n])))
    return out


def random_sublattice_system(rng: random.Random, k: int, max_entry: int = 4) -> DirectSystem:
    """Subcomplexes ``M_λ = Σ_(μ<=λ) N_μ`` of a random complex with inclusions as bondings."""
    P = random_poset(rng, k)
    while True:
        A = random_complex(rng, max_entry=max_entry)
        if sum(A.ranks) >= 2:
            break
    gens = {}
    for x in P.elements:
        g = {}
        for _ in range(rng.randint(1, 2)):
            n = rng.randint(0, A.top)
            if A.rank(n):
                g.setdefault(n, []).append([rng.randint(-2, 2) for _ in range(A.rank(n))])
        gens[x] = g
    bases = {}
    for x in P.elements:
        merged: dict = {}
        for y in P.elements:
            if P.le(y, x):
                for n, vs in gens[y].items():
                    merged.setdefault(n, []).extend(vs)
        bases[x] = _span_subcomplex(A, merged)
    complexes = {x: _restricted_complex(A, bases[x]) for x in P.elements}
    bond = {}
    for a, b in P.covers():
        bond[(a, b)] = CochainMap(complexes[a], complexes[b], tuple(_inclusion(A, bases[a], bases[b])))
    return DirectSystem(P, complexes, bond)


def _random_subcomplex_of_triangle(rng: random.Random) -> SimplicialComplex:
    simplices = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    chosen = [s for s in simplices if rng.random() < 0.7]
    closed = set()
    for s in chosen:
        for k in range(1, len(s) + 1):
            closed.update(combinations(s, k))
    return SimplicialComplex(closed or [(0,)])


def random_restriction_system(rng: random.Random, k: int) -> DirectSystem:
    """Decreasing subcomplexes ``K_λ`` of a triangle; restriction of cochains as bondings."""
    P = random_poset(rng, k)
    L = {x: _random_subcomplex_of_triangle(rng) for x in P.elements}
    K = {}
    for x in P.elements:
        faces = None
        for y in P.elements:
            if P.le(y, x):
                faces = L[y].faces if faces is None else faces & L[y].faces
        K[x] = SimplicialComplex(faces or [])
    spaces = dict(K)
    maps = {(a, b): {v: v for v in K[b].vertices} for a, b in P.covers()}
    return simplicial_system(P, spaces, maps)


def random_system(rng: random.Random, k: int | None = None) -> DirectSystem:
    k = k if k is not None else rng.randint(3, 5)
    if rng.random() < 0.7:
        return random_sublattice_system(rng, k)
    return random_restriction_system(rng, k)


def system_suite(count: int = 50, seed: int | None = None, min_size: int = 3,
                 max_size: int = 5) -> list[DirectSystem]:
    rng = random.Random(resolve_seed(seed))
    return [random_system(rng, rng.randint(min_size, max_size)) for _ in range(count)]
