"""Finitely generated abelian groups as integer presentations.

A group is ``Z^ngens / (column span of relations)``.  Morphisms are integer
matrices on generators.  Every subgroup or subquotient that the engine
builds carries *generator lifts*: integer vectors in the ambient generator
lattice, so that maps can be pushed through homology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from typing import Sequence

from .linalg import (Mat, hermite_rows, hstack, integer_kernel, smith_normal_form,
                     solve_integer, vstack, block_diag)

__all__ = [
    "FgAbGroup", "FgMorphism", "Subquotient", "smith_normal_form", "invariant_factors",
    "hom_group", "ext_group", "kernel", "image", "cokernel", "check_exactness",
    "ExactnessReport", "IllDefinedMorphism", "format_factors", "cyclic", "free", "trivial",
    "direct_sum", "complex_homology", "is_isomorphism",
]


class IllDefinedMorphism(ValueError):
    """A matrix does not descend to the quotient groups."""


@dataclass(frozen=True, eq=False)
class FgAbGroup:
    """``Z^ngens / <relations>`` with relators stored as matrix columns."""

    ngens: int
    relations: Mat = None

    def __post_init__(self):
        rel = self.relations
        if rel is None:
            rel = Mat.zeros(self.ngens, 0)
        if rel.nrows != self.ngens:
            raise ValueError(f"relation matrix has {rel.nrows} rows for {self.ngens} generators")
        object.__setattr__(self, "relations", rel.to_int())

    @cached_property
    def _snf(self):
        S, U, V = smith_normal_form(self.relations, want_v=False)
        diag = [S[i, i] if i < S.ncols else 0 for i in range(self.ngens)]
        return diag, U

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nonunit invariant factors ``d1 | d2 | ...``; 0 stands for Z."""
        diag, _ = self._snf
        tors = sorted(d for d in diag if d > 1)
        return tuple(tors) + (0,) * sum(1 for d in diag if d == 0)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    @property
    def torsion_order(self) -> int:
        return prod(d for d in self.invariant_factors if d)

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def is_free(self) -> bool:
        return all(d == 0 for d in self.invariant_factors)

    def order(self) -> int | None:
        """Cardinality, or None for infinite groups."""
        return None if self.rank else self.torsion_order

    def isomorphic(self, other: "FgAbGroup") -> bool:
        return self.invariant_factors == other.invariant_factors

    # elements -----------------------------------------------------------

    def canonical(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of an element (equal iff equal in the group)."""
        diag, U = self._snf
        y = U.apply([int(v) for v in x])
        out = []
        for d, c in zip(diag, y):
            if d == 1:
                continue
            out.append(c % d if d else c)
        return tuple(out)

    def first_nonzero_column(self, m: Mat) -> int | None:
        """Index of the first column of ``m`` that is nonzero in the group."""
        if not m.ncols:
            return None
        diag, U = self._snf
        Y = U @ m
        for i, d in enumerate(diag):
            if d == 1:
                continue
            for j, c in enumerate(Y.rows[i]):
                if (c % d if d else c):
                    return j
        return None

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.canonical(x))

    def contains_relation(self, x: Sequence[int]) -> bool:
        return self.is_zero(x)

    def element_order(self, x: Sequence[int]) -> int:
        """Order of ``x`` (0 for infinite order)."""
        diag, U = self._snf
        y = U.apply([int(v) for v in x])
        o = 1
        for d, c in zip(diag, y):
            if d == 1:
                continue
            if d == 0:
                if c:
                    return 0
                continue
            c %= d
            if c:
                o = o * (d // gcd(d, c)) // gcd(o, d // gcd(d, c))
        return o

    def canonical_form(self) -> "FgAbGroup":
        return FgAbGroup.from_factors(self.invariant_factors)

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "FgAbGroup":
        factors = [int(d) for d in factors if d != 1]
        if any(d < 0 for d in factors):
            raise ValueError("invariant factors must be nonnegative")
        cols = []
        n = len(factors)
        for i, d in enumerate(factors):
            if d:
                c = [0] * n
                c[i] = d
                cols.append(c)
        return cls(n, Mat.from_columns(cols, n))

    def identity(self) -> "FgMorphism":
        return FgMorphism(self, self, Mat.identity(self.ngens))

    def __str__(self) -> str:
        return format_factors(self.invariant_factors)

    def __repr__(self) -> str:
        return f"FgAbGroup({format_factors(self.invariant_factors)})"


def cyclic(d: int) -> FgAbGroup:
    """``Z/d`` (``d = 0`` gives Z)."""
    return FgAbGroup.from_factors([d])


def free(n: int) -> FgAbGroup:
    return FgAbGroup.from_factors([0] * n)


def trivial() -> FgAbGroup:
    return FgAbGroup(0)


def format_factors(factors: Sequence[int]) -> str:
    """``(2, 0)`` -> ``"Z/2+Z"``; the trivial group prints as ``"0"``."""
    if not factors:
        return "0"
    return "+".join("Z" if d == 0 else f"Z/{d}" for d in factors)


def parse_factors(text: str) -> tuple[int, ...]:
    """Inverse of :func:`format_factors` (also accepts ``Z/6`` style tokens)."""
    text = text.strip()
    if text in ("0", ""):
        return ()
    out = []
    for tok in text.split("+"):
        tok = tok.strip()
        if tok == "Z":
            out.append(0)
        elif tok.startswith("Z/"):
            out.append(int(tok[2:]))
        else:
            raise ValueError(f"bad group token {tok!r}")
    return FgAbGroup.from_factors(out).invariant_factors


def invariant_factors(g: FgAbGroup) -> tuple[int, ...]:
    return g.invariant_factors


def direct_sum(groups: Sequence[FgAbGroup]) -> FgAbGroup:
    n = sum(g.ngens for g in groups)
    return FgAbGroup(n, block_diag([g.relations for g in groups]) if groups else Mat.zeros(0, 0))


@dataclass(frozen=True, eq=False)
class FgMorphism:
    source: FgAbGroup
    target: FgAbGroup
    matrix: Mat
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        mat = self.matrix.to_int()
        object.__setattr__(self, "matrix", mat)
        if mat.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {mat.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        if self.check:
            img = mat @ self.source.relations
            j = self.target.first_nonzero_column(img)
            if j is not None:
                raise IllDefinedMorphism(
                        f"relator {j} of the source ({list(self.source.relations.col(j))}) "
                        f"maps to a nonzero element {list(img.col(j))}")

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.matrix.apply(x)

    def compose(self, first: "FgMorphism") -> "FgMorphism":
        """``self ∘ first``."""
        if first.target.ngens != self.source.ngens:
            raise ValueError("morphisms are not composable")
        return FgMorphism(first.source, self.target, self.matrix @ first.matrix, check=False)

    def is_zero(self) -> bool:
        return all(self.target.is_zero(c) for c in self.matrix.columns())

    def equals(self, other: "FgMorphism") -> bool:
        d = self.matrix - other.matrix
        return all(self.target.is_zero(c) for c in d.columns())

    def kernel(self) -> "Subquotient":
        return kernel(self)

    def image(self) -> "Subquotient":
        return image(self)

    def cokernel(self) -> "Subquotient":
        return cokernel(self)

    def is_injective(self) -> bool:
        return kernel(self).group.is_trivial()

    def is_surjective(self) -> bool:
        return cokernel(self).group.is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def is_isomorphism(f: FgMorphism) -> bool:
    return f.is_isomorphism()


# ---------------------------------------------------------------------------
# subquotients


class Subquotient:
    """``N / D`` for integer lattices ``D ⊆ N ⊆ Z^n``.

    ``basis`` holds a lattice basis of ``N`` as columns; these are the
    generator lifts of ``group``.  ``coords`` expresses an element of ``N``
    in that basis.
    """

    def __init__(self, numerator: Sequence[Sequence[int]], denominator: Sequence[Sequence[int]], n: int):
        H = hermite_rows(numerator, n)
        self.ambient_dim = n
        self.basis = Mat.from_columns(H, n)
        self._rows = [list(h) for h in H]
        self._pivots = [next(j for j, x in enumerate(h) if x) for h in H]
        rel_cols = []
        for d in denominator:
            c = self.coords(d)
            if c is None:
                raise ValueError("denominator lattice is not contained in the numerator")
            rel_cols.append(c)
        self.group = FgAbGroup(len(H), Mat.from_columns(rel_cols, len(H)))

    def coords(self, x: Sequence[int]):
        """Coordinates of ``x`` in the numerator basis, or None if x ∉ N."""
        x = [int(v) for v in x]
        H = self._rows
        c = []
        for h, p in zip(H, self._pivots):
            if x[p] % h[p]:
                return None
            q = x[p] // h[p]
            c.append(q)
            if q:
                for j in range(p, len(x)):
                    if h[j]:
                        x[j] -= q * h[j]
        if any(x):
            return None
        return tuple(c)

    def contains(self, x: Sequence[int]) -> bool:
        return self.coords(x) is not None

    @property
    def lifts(self) -> Mat:
        return self.basis


def _lattice_cols(m: Mat) -> list[tuple[int, ...]]:
    return [tuple(int(v) for v in c) for c in m.columns()]


def kernel(f: FgMorphism) -> Subquotient:
    """``ker f`` with lifts into source generators."""
    A, B = f.source, f.target
    big = hstack([f.matrix, B.relations.scale(-1)]) if B.relations.ncols else f.matrix
    K = integer_kernel(big)
    gens = [c[:A.ngens] for c in K.columns()]
    gens += _lattice_cols(A.relations)
    return Subquotient(gens, _lattice_cols(A.relations), A.ngens)


def image(f: FgMorphism) -> Subquotient:
    """``im f`` with lifts into target generators."""
    B = f.target
    rel = _lattice_cols(B.relations)
    return Subquotient(_lattice_cols(f.matrix) + rel, rel, B.ngens)


def cokernel(f: FgMorphism) -> Subquotient:
    """``coker f``; the lifts are the target generators themselves."""
    B = f.target
    n = B.ngens
    ident = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    return Subquotient(ident, _lattice_cols(f.matrix) + _lattice_cols(B.relations), n)


def kernel_lattice(f: FgMorphism) -> list[tuple[int, ...]]:
    """Generators of ``{x in Z^n : f(x) = 0}`` (contains the source relations)."""
    A, B = f.source, f.target
    big = hstack([f.matrix, B.relations.scale(-1)]) if B.relations.ncols else f.matrix
    K = integer_kernel(big)
    return [c[:A.ngens] for c in K.columns()] + _lattice_cols(A.relations)


def complex_homology(incoming: FgMorphism | None, outgoing: FgMorphism | None,
                     group: FgAbGroup) -> Subquotient:
    """``ker(outgoing) / im(incoming)`` at ``group``."""
    n = group.ngens
    rel = _lattice_cols(group.relations)
    if outgoing is None:
        num = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    else:
        num = kernel_lattice(outgoing)
    den = list(rel)
    if incoming is not None:
        den += _lattice_cols(incoming.matrix)
    return Subquotient(num + den, den, n)


# ---------------------------------------------------------------------------
# Hom and Ext


def hom_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    """``Hom(A, B)`` from invariant factors."""
    out = []
    for d in a.invariant_factors:
        for e in b.invariant_factors:
            if d == 0:
                out.append(e)
            elif e == 0:
                continue
            else:
                out.append(gcd(d, e))
    return FgAbGroup.from_factors(out).canonical_form()


def ext_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    """``Ext(A, B)``: ``Ext(Z/d, B) = B/dB`` and ``Ext(Z, B) = 0``."""
    out = []
    for d in a.invariant_factors:
        if d == 0:
            continue
        for e in b.invariant_factors:
            out.append(d if e == 0 else gcd(d, e))
    return FgAbGroup.from_factors(out).canonical_form()


# ---------------------------------------------------------------------------
# exactness


@dataclass
class ExactnessReport:
    """Per-node exactness defects of a chain of maps.

    ``defects`` lists ``(node, invariant factors, kind)``.  ``kind`` is
    ``"homology"`` for ``(ker + im)/im`` at a node, or ``"composite"`` for the
    image of a nonzero composite landing in that node.
    """

    defects: list[tuple[int, tuple[int, ...], str]]

    @property
    def exact(self) -> bool:
        return all(not f for _, f, _ in self.defects)

    def failures(self) -> list[tuple[int, tuple[int, ...], str]]:
        return [d for d in self.defects if d[1]]

    def __str__(self) -> str:
        if self.exact:
            return "exact"
        return "; ".join(f"node {i}: {kind} defect {format_factors(f)}"
                         for i, f, kind in self.failures())


def check_exactness(seq: Sequence[FgMorphism], *, ends: bool = True) -> ExactnessReport:
    """Check exactness of ``G0 -f0-> G1 -f1-> ... -> Gk``.

    With ``ends`` the end nodes count as flanked by zero groups
    (``0 -> G0`` and ``Gk -> 0``), as in short and long exact sequences.
    Where a composite ``f(i) ∘ f(i-1)`` is nonzero the chain is not even a
    complex; its image is reported at node ``i + 1``.
    """
    for i in range(len(seq) - 1):
        if seq[i].target.ngens != seq[i + 1].source.ngens:
            raise ValueError(f"maps {i} and {i + 1} are not composable")
    defects = []
    nodes = range(len(seq) + 1) if ends else range(1, len(seq))
    for i in nodes:
        incoming = seq[i - 1] if i >= 1 else None
        outgoing = seq[i] if i < len(seq) else None
        group = outgoing.source if outgoing is not None else incoming.target
        n = group.ngens
        rel = _lattice_cols(group.relations)
        if outgoing is None:
            num = [tuple(1 if a == b else 0 for a in range(n)) for b in range(n)]
        else:
            num = kernel_lattice(outgoing)
        den = list(rel)
        if incoming is not None:
            den += _lattice_cols(incoming.matrix)
        h = Subquotient(num + den, den, n)
        defects.append((i, h.group.invariant_factors, "homology"))
        if incoming is not None and outgoing is not None:
            comp = outgoing.compose(incoming)
            if not comp.is_zero():
                defects.append((i + 1, image(comp).group.invariant_factors, "composite"))
    return ExactnessReport(defects)
