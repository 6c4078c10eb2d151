"""Linear algebra over divisible groups ``Q^a ⊕ (Q/Z)^b``.

A :class:`DivGroup` is ``Q^n / L`` where ``L`` is ``Z`` on the coordinates
flagged as ``Q/Z`` and ``0`` on the ``Q`` coordinates.  Morphisms are
rational matrices that carry ``L`` into the target lattice.  Subgroups of
``Q^n`` of the form ``W + <Λ>`` (a rational subspace plus a lattice) are
:class:`LatticeSubgroup` values; cycles, boundaries, kernels and images all
live there, so homology, injectivity and surjectivity questions reduce to
exact subgroup arithmetic.

A homomorphism ``Q^n/L -> Q^m/L'`` given by a rational matrix is zero iff
the matrix is zero (a linear map sending ``Q^n`` into a lattice vanishes).
Consequently "``∂∂ = 0`` in the quotient" and "commutes in the quotient"
are exact matrix identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Mapping, Sequence

from .fgab import FgAbGroup, FgMorphism, Subquotient, format_factors
from .linalg import (Mat, block_diag, hermite_rows, hstack, left_annihilator, nullspace,
                     rref, smith_normal_form, solve_rational, vec_denominator)

__all__ = [
    "DivGroup", "DivMorphism", "LatticeSubgroup", "DivComplex", "DivChainMap", "DivHomology",
    "IncompatibleMorphism", "NonFinitelyGenerated", "div_kernel", "div_image", "div_cokernel",
    "homology_of_div_complex", "div_homology", "induced_map_on_homology",
    "map_is_injective", "map_is_surjective", "maps_agree", "MixedStructure", "subquotient_structure",
]


class IncompatibleMorphism(ValueError):
    """A rational matrix does not carry the source lattice into the target lattice."""


class NonFinitelyGenerated(ValueError):
    """Homology has a divisible part; it cannot be an FgAbGroup."""


@dataclass(frozen=True)
class DivGroup:
    """``Q^n / L``; ``kinds[i]`` is True for a ``Q/Z`` coordinate."""

    kinds: tuple[bool, ...]

    @classmethod
    def make(cls, q_rank: int, qz_rank: int) -> "DivGroup":
        return cls((False,) * q_rank + (True,) * qz_rank)

    @property
    def dim(self) -> int:
        return len(self.kinds)

    @property
    def q_rank(self) -> int:
        return sum(1 for k in self.kinds if not k)

    @property
    def qz_rank(self) -> int:
        return sum(1 for k in self.kinds if k)

    @property
    def lattice_coords(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k]

    def is_trivial(self) -> bool:
        return not self.kinds

    def lattice(self) -> "LatticeSubgroup":
        """The subgroup ``L`` (the zero element of the quotient)."""
        n = self.dim
        return LatticeSubgroup.from_gens(n, [], [_unit(n, i) for i in self.lattice_coords])

    def everything(self) -> "LatticeSubgroup":
        n = self.dim
        return LatticeSubgroup.from_gens(n, [_unit(n, i) for i in range(n)], [])

    def reduce(self, v: Sequence) -> tuple:
        """Canonical representative: Q/Z coordinates reduced into [0, 1)."""
        return tuple(_norm(x - (x.numerator // x.denominator) if type(x) is Fraction else 0)
                     if k else _norm(x) for x, k in zip(v, self.kinds))

    def __add__(self, other: "DivGroup") -> "DivGroup":
        return DivGroup(self.kinds + other.kinds)

    def __str__(self) -> str:
        parts = []
        if self.q_rank:
            parts.append("Q" if self.q_rank == 1 else f"Q^{self.q_rank}")
        if self.qz_rank:
            parts.append("Q/Z" if self.qz_rank == 1 else f"(Q/Z)^{self.qz_rank}")
        return "+".join(parts) or "0"


def direct_sum(groups: Sequence[DivGroup]) -> DivGroup:
    return DivGroup(tuple(k for g in groups for k in g.kinds))


def _unit(n: int, i: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(n))


def _norm(x):
    if type(x) is int:
        return x
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def _scaled(x, num: int, den: int):
    """``x * num / den`` kept as int when integral."""
    if type(x) is int:
        p, q = x * num, den
    else:
        p, q = x.numerator * num, x.denominator * den
    if p % q == 0:
        return p // q
    return Fraction(p, q)


def _is_int(x) -> bool:
    return isinstance(x, int) or x.denominator == 1


def check_compatible(matrix: Mat, source: DivGroup, target: DivGroup) -> None:
    """Raise unless ``matrix`` carries the source lattice into the target lattice."""
    if matrix.shape != (target.dim, source.dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match {target.dim}x{source.dim}")
    for j in source.lattice_coords:
        for i, k in enumerate(target.kinds):
            x = matrix[i, j]
            if k and not _is_int(x):
                raise IncompatibleMorphism(f"entry ({i},{j}) = {x} is not an integer on a Q/Z row")
            if not k and x != 0:
                raise IncompatibleMorphism(f"entry ({i},{j}) = {x} maps Q/Z into a Q coordinate")


@dataclass(frozen=True, eq=False)
class DivMorphism:
    source: DivGroup
    target: DivGroup
    matrix: Mat

    def __post_init__(self):
        object.__setattr__(self, "matrix", self.matrix.normalized())
        check_compatible(self.matrix, self.source, self.target)

    def compose(self, first: "DivMorphism") -> "DivMorphism":
        return DivMorphism(first.source, self.target, self.matrix @ first.matrix)

    def is_zero(self) -> bool:
        return self.matrix.is_zero()


# ---------------------------------------------------------------------------
# subgroups W + <Λ> of Q^n


def _mixed_kernel(a_rat: Mat, a_int: Mat) -> tuple[list[tuple], list[tuple]]:
    """Solutions of ``a_rat q + a_int c = 0`` with q rational, c integral.

    Returned as ``(subspace basis, lattice generators)`` in ``Q^(a+b)``
    with variables ordered ``(q, c)``.
    """
    na, nb = a_rat.ncols, a_int.ncols
    if a_rat.nrows != a_int.nrows:
        raise ValueError("row mismatch")
    N = nullspace(hstack([a_rat, a_int]) if a_rat.nrows else Mat.zeros(0, na + nb))
    k = N.ncols
    cols = N.columns()
    if nb == 0 or k == 0:
        return cols, []
    Nc = Mat([N.rows[na + i] for i in range(nb)], nb, k)
    m = Nc.denominator()
    E = Mat([[int(x * m) for x in r] for r in Nc.rows], nb, k)
    S, _, V = smith_normal_form(E, want_u=False)
    r = sum(1 for i in range(min(nb, k)) if S[i, i])
    NV = N @ V
    W, lam = [], []
    for i in range(k):
        v = NV.col(i)
        if i < r:
            d = S[i, i]
            lam.append(tuple(_scaled(x, m, d) if x else 0 for x in v))
        else:
            W.append(v)
    return W, lam


class LatticeSubgroup:
    """The subgroup ``W + <Λ>`` of ``Q^n`` in normal form.

    ``W`` is kept as reduced row echelon rows; ``Λ`` is reduced modulo W
    (zero on W's pivot coordinates) and then Hermite-normalized, so two
    subgroups are equal iff their normal forms coincide.
    """

    __slots__ = ("n", "W", "pivots", "lam", "denom", "_lam_int", "_lam_piv")

    def __init__(self, n: int, W: list[tuple], pivots: list[int], lam: list[tuple], denom: int,
                 lam_int: list[list[int]]):
        self.n = n
        self.W = W
        self.pivots = pivots
        self.lam = lam
        self.denom = denom
        self._lam_int = lam_int
        self._lam_piv = [next(j for j, x in enumerate(h) if x) for h in lam_int]

    @classmethod
    def from_gens(cls, n: int, W_gens: Sequence[Sequence], lam_gens: Sequence[Sequence]) -> "LatticeSubgroup":
        if W_gens:
            R, piv = rref(Mat([list(w) for w in W_gens], len(W_gens), n))
        else:
            R, piv = [], []
        W = [tuple(r) for r in R]
        reduced = [_reduce_mod(tuple(v), W, piv) for v in lam_gens]
        reduced = [v for v in reduced if any(v)]
        d = 1
        for v in reduced:
            d = lcm(d, vec_denominator(v))
        ints = [[int(x * d) for x in v] for v in reduced]
        H = hermite_rows(ints, n) if ints else []
        if d == 1:
            lam = [tuple(h) for h in H]
        else:
            lam = [tuple(x // d if x % d == 0 else Fraction(x, d) for x in h) for h in H]
        # canonical denominator: the least d' with d' * lattice integral
        d2 = 1
        for v in lam:
            d2 = lcm(d2, vec_denominator(v))
        if d2 != d:
            H = [[int(x * d2) for x in v] for v in lam]
        return cls(n, W, list(piv), lam, d2, H)

    @classmethod
    def zero(cls, n: int) -> "LatticeSubgroup":
        return cls(n, [], [], [], 1, [])

    @classmethod
    def full(cls, n: int) -> "LatticeSubgroup":
        return cls.from_gens(n, [_unit(n, i) for i in range(n)], [])

    # queries ------------------------------------------------------------

    @property
    def subspace_dim(self) -> int:
        return len(self.W)

    @property
    def lattice_rank(self) -> int:
        return len(self.lam)

    def is_zero(self) -> bool:
        return not self.W and not self.lam

    def reduce(self, v: Sequence) -> tuple:
        """Representative of ``v`` modulo the subspace part."""
        return _reduce_mod(tuple(v), self.W, self.pivots)

    def lattice_coords(self, v: Sequence):
        """Integer coordinates of ``v`` (mod W) in the lattice basis, or None."""
        r = self.reduce(v)
        d = self.denom
        x = []
        for t in r:
            y = t * d
            if not _is_int(y):
                return None
            x.append(int(y))
        c = []
        for h, p in zip(self._lam_int, self._lam_piv):
            if x[p] % h[p]:
                return None
            q = x[p] // h[p]
            c.append(q)
            if q:
                for j in range(p, self.n):
                    if h[j]:
                        x[j] -= q * h[j]
        if any(x):
            return None
        return tuple(c)

    def contains(self, v: Sequence) -> bool:
        return self.lattice_coords(v) is not None

    def in_subspace(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def contains_subgroup(self, other: "LatticeSubgroup") -> bool:
        return (all(self.in_subspace(w) for w in other.W)
                and all(self.contains(v) for v in other.lam))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeSubgroup):
            return NotImplemented
        return (self.n == other.n and self.W == other.W and self.lam == other.lam)

    def __hash__(self):
        return hash((self.n, tuple(self.W), tuple(self.lam)))

    def __repr__(self) -> str:
        return f"LatticeSubgroup(n={self.n}, dim W={len(self.W)}, rank Λ={len(self.lam)})"

    # constructions ------------------------------------------------------

    def __add__(self, other: "LatticeSubgroup") -> "LatticeSubgroup":
        if self.n != other.n:
            raise ValueError("ambient dimensions differ")
        return LatticeSubgroup.from_gens(self.n, self.W + other.W, self.lam + other.lam)

    def image(self, matrix: Mat) -> "LatticeSubgroup":
        """``matrix(self)`` as a subgroup of ``Q^m``."""
        if matrix.ncols != self.n:
            raise ValueError("matrix does not act on this ambient space")
        return LatticeSubgroup.from_gens(matrix.nrows, [matrix.apply(w) for w in self.W],
                                         [matrix.apply(v) for v in self.lam])

    def preimage(self, matrix: Mat) -> "LatticeSubgroup":
        """``{x : matrix x ∈ self}``."""
        if matrix.nrows != self.n:
            raise ValueError("matrix does not land in this ambient space")
        n = matrix.ncols
        negW = Mat.from_columns([[-x for x in w] for w in self.W], self.n)
        negL = Mat.from_columns([[-x for x in v] for v in self.lam], self.n)
        a_rat = hstack([matrix, negW]) if self.W else matrix
        Wg, Lg = _mixed_kernel(a_rat, negL)
        return LatticeSubgroup.from_gens(n, [w[:n] for w in Wg], [v[:n] for v in Lg])

    def intersection(self, other: "LatticeSubgroup") -> "LatticeSubgroup":
        n = self.n
        WA = Mat.from_columns(self.W, n)
        WB = Mat.from_columns([[-x for x in w] for w in other.W], n)
        LA = Mat.from_columns(self.lam, n)
        LB = Mat.from_columns([[-x for x in v] for v in other.lam], n)
        Wg, Lg = _mixed_kernel(hstack([WA, WB]), hstack([LA, LB]))
        wa, wb, la = len(self.W), len(other.W), len(self.lam)

        def back(t):
            q = t[:wa]
            c = t[wa + wb: wa + wb + la]
            x = [0] * n
            for coef, w in zip(q, self.W):
                if coef:
                    for j in range(n):
                        x[j] += coef * w[j]
            for coef, v in zip(c, self.lam):
                if coef:
                    for j in range(n):
                        x[j] += coef * v[j]
            return tuple(x)

        return LatticeSubgroup.from_gens(n, [back(t) for t in Wg], [back(t) for t in Lg])

    def generators(self) -> tuple[list[tuple], list[tuple]]:
        return list(self.W), list(self.lam)


def _reduce_mod(v: tuple, W: list[tuple], pivots: list[int]) -> tuple:
    if not W:
        return tuple(_norm(x) for x in v)
    v = list(v)
    for w, p in zip(W, pivots):
        x = v[p]
        if x:
            for j, y in enumerate(w):
                if y:
                    v[j] -= x * y
    return tuple(_norm(x) for x in v)


# ---------------------------------------------------------------------------
# kernels, images, cokernels of single morphisms


def div_kernel(f: DivMorphism) -> LatticeSubgroup:
    """``{x : f(x) ∈ L_target}``; always contains ``L_source``."""
    return f.target.lattice().preimage(f.matrix)


def div_image(f: DivMorphism) -> LatticeSubgroup:
    """Column space of the matrix plus ``L_target``."""
    m = f.target.dim
    W = [f.matrix.col(j) for j in range(f.matrix.ncols)]
    return LatticeSubgroup.from_gens(m, W, [_unit(m, i) for i in f.target.lattice_coords])


def div_cokernel(f: DivMorphism) -> DivGroup:
    """Cokernel of ``f`` as a group ``Q^a' ⊕ (Q/Z)^b'``."""
    im = div_image(f)
    return quotient_type(im)


def quotient_type(sub: LatticeSubgroup) -> DivGroup:
    """``Q^n / sub`` for a subgroup with a lattice part: ``Q^a ⊕ (Q/Z)^b``."""
    b = sub.lattice_rank
    a = sub.n - sub.subspace_dim - b
    return DivGroup.make(a, b)


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True, eq=False)
class DivComplex:
    """Bounded chain complex of DivGroups; ``boundaries[n]`` maps degree n to n-1."""

    groups: Mapping[int, DivGroup]
    boundaries: Mapping[int, Mat]
    _homology: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for n, d in self.boundaries.items():
            check_compatible(d, self.group(n), self.group(n - 1))

    @property
    def degrees(self) -> list[int]:
        return sorted(n for n, g in self.groups.items() if g.dim)

    def group(self, n: int) -> DivGroup:
        return self.groups.get(n, DivGroup(()))

    def boundary(self, n: int) -> Mat:
        d = self.boundaries.get(n)
        if d is None:
            return Mat.zeros(self.group(n - 1).dim, self.group(n).dim)
        return d

    def check_square_zero(self) -> list[int]:
        """Degrees n where ``∂(n-1) ∂(n)`` is not the zero matrix."""
        bad = []
        for n in sorted(self.boundaries):
            if (n - 1) in self.boundaries:
                if not (self.boundary(n - 1) @ self.boundary(n)).is_zero():
                    bad.append(n)
        return bad

    def cycles(self, n: int) -> LatticeSubgroup:
        return self.group(n - 1).lattice().preimage(self.boundary(n))

    def boundaries_at(self, n: int) -> LatticeSubgroup:
        d = self.boundary(n + 1)
        g = self.group(n)
        return LatticeSubgroup.from_gens(g.dim, d.columns(), [_unit(g.dim, i) for i in g.lattice_coords])

    def homology(self, n: int) -> "DivHomology":
        if n not in self._homology:
            self._homology[n] = div_homology(self, n)
        return self._homology[n]

    def direct_sum(self, other: "DivComplex") -> "DivComplex":
        degs = set(self.groups) | set(other.groups)
        groups = {n: self.group(n) + other.group(n) for n in degs}
        bds = {n: block_diag([self.boundary(n), other.boundary(n)])
               for n in set(self.boundaries) | set(other.boundaries)}
        return DivComplex(groups, bds)


@dataclass(frozen=True, eq=False)
class DivChainMap:
    """Degreewise rational matrices ``source(n) -> target(n)``."""

    source: DivComplex
    target: DivComplex
    maps: Mapping[int, Mat]

    def __post_init__(self):
        for n, m in self.maps.items():
            check_compatible(m, self.source.group(n), self.target.group(n))

    def at(self, n: int) -> Mat:
        m = self.maps.get(n)
        if m is None:
            return Mat.zeros(self.target.group(n).dim, self.source.group(n).dim)
        return m

    def commutation_defects(self) -> list[int]:
        """Degrees n where ``∂ f(n) != f(n-1) ∂`` (exact matrix comparison)."""
        bad = []
        degs = set(self.source.groups) | set(self.target.groups)
        for n in sorted(degs):
            lhs = self.target.boundary(n) @ self.at(n)
            rhs = self.at(n - 1) @ self.source.boundary(n)
            if lhs != rhs:
                bad.append(n)
        return bad

    def compose(self, first: "DivChainMap") -> "DivChainMap":
        """``self ∘ first``."""
        degs = set(self.maps) | set(first.maps)
        return DivChainMap(first.source, self.target, {n: self.at(n) @ first.at(n) for n in degs})

    @classmethod
    def identity(cls, X: DivComplex) -> "DivChainMap":
        return cls(X, X, {n: Mat.identity(g.dim) for n, g in X.groups.items()})


class DivHomology:
    """Homology ``Z_n / B_n`` of a DivComplex at one degree.

    ``cycles`` and ``bounds`` are always available.  When the subspace parts
    agree the quotient is finitely generated and ``group``, ``lifts`` and
    ``coords`` present it; otherwise :class:`NonFinitelyGenerated` is raised
    on access and :meth:`structure` still describes the group.
    """

    def __init__(self, cycles: LatticeSubgroup, bounds: LatticeSubgroup):
        if not cycles.contains_subgroup(bounds):
            raise ValueError("boundaries are not contained in cycles; ∂∂ != 0?")
        self.cycles = cycles
        self.bounds = bounds
        self.finitely_generated = cycles.W == bounds.W

    @cached_property
    def _sq(self):
        if not self.finitely_generated:
            raise NonFinitelyGenerated(
                f"non-finitely-generated homology: cycle subspace dim {self.cycles.subspace_dim} "
                f"> boundary subspace dim {self.bounds.subspace_dim}")
        m = lcm(self.cycles.denom, self.bounds.denom)
        num = [[int(x * m) for x in v] for v in self.cycles.lam]
        den = [[int(x * m) for x in v] for v in self.bounds.lam]
        return Subquotient(num, den, self.cycles.n), m

    @property
    def group(self) -> FgAbGroup:
        return self._sq[0].group

    @property
    def lifts(self) -> list[tuple]:
        sq, m = self._sq
        return [tuple(_norm(Fraction(x, m)) for x in c) for c in sq.basis.columns()]

    def coords(self, z: Sequence) -> tuple[int, ...]:
        """Coordinates of the class of a cycle ``z`` in ``group``'s generators."""
        sq, m = self._sq
        r = self.cycles.reduce(z)
        x = []
        for t in r:
            y = t * m
            if not _is_int(y):
                raise ValueError("vector is not a cycle")
            x.append(int(y))
        c = sq.coords(x)
        if c is None:
            raise ValueError("vector is not a cycle")
        return c

    def is_trivial(self) -> bool:
        return self.cycles == self.bounds

    def structure(self) -> "MixedStructure":
        return subquotient_structure(self.cycles, self.bounds)

    def __str__(self) -> str:
        if self.finitely_generated:
            return str(self.group)
        return str(self.structure())


def div_homology(X: DivComplex, n: int) -> DivHomology:
    return DivHomology(X.cycles(n), X.boundaries_at(n))


def homology_of_div_complex(X: DivComplex, n: int) -> tuple[FgAbGroup, list[tuple]]:
    """``(group, generator lifts)``; raises NonFinitelyGenerated for divisible homology."""
    h = div_homology(X, n)
    return h.group, h.lifts


def induced_map_on_homology(f: DivChainMap, n: int, source: DivHomology | None = None,
                            target: DivHomology | None = None) -> FgMorphism:
    """Matrix of ``f_*`` on generator lifts, in target homology generators."""
    bad = f.commutation_defects()
    if bad:
        raise ValueError(f"not a chain map: boundary square fails in degree {bad[0]}")
    hs = source or f.source.homology(n)
    ht = target or f.target.homology(n)
    m = f.at(n)
    cols = [ht.coords(m.apply(z)) for z in hs.lifts]
    return FgMorphism(hs.group, ht.group, Mat.from_columns(cols, ht.group.ngens))


def map_is_injective(matrix: Mat, source: DivHomology, target: DivHomology) -> bool:
    """Is the map of subquotients induced by ``matrix`` injective?"""
    pre = target.bounds.preimage(matrix).intersection(source.cycles)
    return pre == source.bounds


def map_image(matrix: Mat, source: DivHomology, target: DivHomology) -> LatticeSubgroup:
    """Numerator of the image subgroup: ``matrix(Z) + B``."""
    return source.cycles.image(matrix) + target.bounds


def map_is_surjective(matrix: Mat, source: DivHomology, target: DivHomology) -> bool:
    return map_image(matrix, source, target) == target.cycles


def map_is_well_defined(matrix: Mat, source: DivHomology, target: DivHomology) -> bool:
    return (target.cycles.contains_subgroup(source.cycles.image(matrix))
            and target.bounds.contains_subgroup(source.bounds.image(matrix)))


def maps_agree(f: Mat, g: Mat, source: DivHomology, target: DivHomology) -> bool:
    """Do two matrices induce the same map ``source -> target``?"""
    return target.bounds.contains_subgroup(source.cycles.image(f - g))


# ---------------------------------------------------------------------------
# structure of W + <Λ> quotients


@dataclass(frozen=True)
class MixedStructure:
    """``Q^q ⊕ (Q/Z)^qz ⊕ (finitely generated part)``."""

    q: int
    qz: int
    factors: tuple[int, ...]

    def is_trivial(self) -> bool:
        return not self.q and not self.qz and not self.factors

    @property
    def finitely_generated(self) -> bool:
        return not self.q and not self.qz

    def __str__(self) -> str:
        parts = []
        if self.q:
            parts.append("Q" if self.q == 1 else f"Q^{self.q}")
        if self.qz:
            parts.append("Q/Z" if self.qz == 1 else f"(Q/Z)^{self.qz}")
        if self.factors:
            parts.append(format_factors(self.factors))
        return "+".join(parts) or "0"


def subquotient_structure(big: LatticeSubgroup, small: LatticeSubgroup) -> MixedStructure:
    """Isomorphism type of ``big / small`` for ``small ⊆ big``.

    ``big`` is parametrized as ``Q^w ⊕ Z^l``; the image of ``small`` is
    split into a subspace part (quotiented away), a part meeting the
    integral coordinates (Smith form gives the finite and free factors) and
    a lattice inside the rational coordinates (each independent vector gives
    a ``Q/Z``).
    """
    n = big.n
    w, l = len(big.W), len(big.lam)
    P = Mat.from_columns(list(big.W) + list(big.lam), n)

    def param(v):
        s = solve_rational(P, v)
        if s is None:
            raise ValueError("subgroup is not contained in the big group")
        return s

    S_cols = [param(v)[:w] for v in small.W]
    gens = [param(v) for v in small.lam]
    T = [g[:w] for g in gens]
    C = Mat.from_columns([[int(x) for x in g[w:]] for g in gens], l)
    if S_cols:
        proj = left_annihilator(Mat.from_columns(S_cols, w))
    else:
        proj = Mat.identity(w)
    wp = proj.nrows
    Tp = [proj.apply(t) for t in T]
    S, _, V = smith_normal_form(C, want_u=False)
    rho = sum(1 for i in range(min(C.shape)) if S[i, i])
    tors = [S[i, i] for i in range(rho)]
    TV = Mat.from_columns(Tp, wp) @ V if Tp else Mat.zeros(wp, 0)
    rest = [TV.col(i) for i in range(rho, TV.ncols)]
    lat_rank = len(rref(Mat.from_columns(rest, wp).T)[1]) if rest else 0
    factors = FgAbGroup.from_factors(tors + [0] * (l - rho)).invariant_factors
    return MixedStructure(wp - lat_rank, lat_rank, factors)
