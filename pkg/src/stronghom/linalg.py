"""Exact integer and rational matrix arithmetic.

Everything in the engine funnels through :class:`Mat`, a small immutable
row-major matrix whose entries are Python ``int`` or ``Fraction``.  Shapes
are stored explicitly so that ``0 x n`` and ``n x 0`` matrices behave.

The integer routines (Smith and Hermite normal forms, integer kernels,
integer solving) never leave ``int``.  The rational routines (row echelon
form, null spaces) work on ``Fraction`` internally.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


class Mat:
    """Immutable exact matrix acting on column vectors."""

    __slots__ = ("nrows", "ncols", "rows", "_hash", "_sparse")

    def __init__(self, rows: Iterable[Sequence], nrows: int | None = None, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if nrows is None:
            nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        for r in rows:
            if len(r) != ncols:
                raise ValueError(f"ragged matrix: row of length {len(r)} in a {nrows}x{ncols} matrix")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows
        self._hash = None
        self._sparse = None

    # construction -------------------------------------------------------

    @classmethod
    def zeros(cls, m: int, n: int) -> "Mat":
        return cls([[0] * n for _ in range(m)], m, n)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Mat":
        return cls([[c[i] for c in cols] for i in range(nrows)], nrows, len(cols))

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def scalar(cls, n: int, c) -> "Mat":
        return cls.diag([c] * n)

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        if not self.nrows:
            return [()] * self.ncols
        return list(zip(*self.rows))

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    @property
    def T(self) -> "Mat":
        if not self.nrows:
            return Mat([()] * self.ncols, self.ncols, 0)
        return Mat(zip(*self.rows), self.ncols, self.nrows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self.rows[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_integral(self) -> bool:
        return all(type(x) is int or x.denominator == 1 for r in self.rows for x in r)

    def denominator(self) -> int:
        """Least common denominator of all entries."""
        d = 1
        for r in self.rows:
            for x in r:
                if not isinstance(x, int):
                    d = lcm(d, x.denominator)
        return d

    def to_int(self) -> "Mat":
        if all(type(x) is int for r in self.rows for x in r):
            return self
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return Mat([[int(x) for x in r] for r in self.rows], self.nrows, self.ncols)

    def normalized(self) -> "Mat":
        """Replace integral Fractions by ints (canonical storage)."""
        return Mat([[_norm(x) for x in r] for r in self.rows], self.nrows, self.ncols)

    # arithmetic ---------------------------------------------------------

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n = other.ncols
        osp = other.sparse_rows()
        out = []
        for r in self.sparse_rows():
            acc = [0] * n
            for k, a in r:
                for j, b in osp[k]:
                    acc[j] += a * b
            out.append(acc)
        return Mat(out, self.nrows, n)

    def sparse_rows(self) -> list[list[tuple]]:
        """Per row, the ``(column, entry)`` pairs with nonzero entry (cached)."""
        if self._sparse is None:
            self._sparse = [[(j, a) for j, a in enumerate(r) if a] for r in self.rows]
        return self._sparse

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for a {self.shape} matrix")
        out = []
        for r in self.sparse_rows():
            acc = 0
            for j, a in r:
                x = v[j]
                if x:
                    acc += a * x
            out.append(acc)
        return tuple(out)

    def __add__(self, other: "Mat") -> "Mat":
        _same_shape(self, other)
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                   self.nrows, self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        _same_shape(self, other)
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                   self.nrows, self.ncols)

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows], self.nrows, self.ncols)

    def scale(self, c) -> "Mat":
        return Mat([[c * a for a in r] for r in self.rows], self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Mat({self.tolist()!r}, {self.nrows}, {self.ncols})"


def _is_int(x) -> bool:
    return isinstance(x, int) or x.denominator == 1


def _norm(x):
    if isinstance(x, int):
        return x
    return int(x) if x.denominator == 1 else x


def _same_shape(a: Mat, b: Mat) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def hstack(mats: Sequence[Mat], nrows: int | None = None) -> Mat:
    if not mats:
        return Mat.zeros(nrows or 0, 0)
    m = mats[0].nrows
    for a in mats:
        if a.nrows != m:
            raise ValueError("hstack: row counts differ")
    rows = [sum((list(a.rows[i]) for a in mats), []) for i in range(m)]
    return Mat(rows, m, sum(a.ncols for a in mats))


def vstack(mats: Sequence[Mat], ncols: int | None = None) -> Mat:
    if not mats:
        return Mat.zeros(0, ncols or 0)
    n = mats[0].ncols
    for a in mats:
        if a.ncols != n:
            raise ValueError("vstack: column counts differ")
    return Mat([r for a in mats for r in a.rows], sum(a.nrows for a in mats), n)


def block_diag(mats: Sequence[Mat]) -> Mat:
    m = sum(a.nrows for a in mats)
    n = sum(a.ncols for a in mats)
    rows = []
    off = 0
    for a in mats:
        for r in a.rows:
            rows.append([0] * off + list(r) + [0] * (n - off - a.ncols))
        off += a.ncols
    return Mat(rows, m, n)


def kron_identity(a: Mat, k: int) -> Mat:
    """``a ⊗ I_k`` with rows/cols indexed (i, t) -> i*k + t."""
    rows = []
    for r in a.rows:
        for t in range(k):
            row = [0] * (a.ncols * k)
            for j, x in enumerate(r):
                if x:
                    row[j * k + t] = x
            rows.append(row)
    return Mat(rows, a.nrows * k, a.ncols * k)


def identity_kron(k: int, b: Mat) -> Mat:
    """``I_k ⊗ b`` (block diagonal with k copies of b)."""
    return block_diag([b] * k)


def clear_denominators(a: Mat) -> tuple[Mat, int]:
    """Return ``(m*a, m)`` with ``m*a`` integral and ``m`` minimal."""
    m = a.denominator()
    return Mat([[int(x * m) for x in r] for r in a.rows], a.nrows, a.ncols), m


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a: Mat, *, want_u: bool = True, want_v: bool = True,
                      want_vinv: bool = False):
    """Smith normal form ``S = U A V`` of an integer matrix.

    Returns ``(S, U, V)`` or ``(S, U, V, Vinv)`` when ``want_vinv``.  The
    diagonal of ``S`` is nonnegative with ``d1 | d2 | ...``; ``U`` and ``V``
    are unimodular.  Transforms that were not requested come back as None.

    Pivots are chosen as the entry of least absolute value in the remaining
    block, which keeps intermediate entries small on the sparse ±1-heavy
    matrices that topology produces.
    """
    m, n = a.shape
    A = [[int(x) for x in r] for r in a.rows]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if want_u else None
    # V is stored transposed (Vt[j] is column j of V) so column ops are row ops
    Vt = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if want_v else None
    Vinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if want_vinv else None

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        if Vt is not None:
            Vt[i], Vt[j] = Vt[j], Vt[i]
        if Vinv is not None:
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_addmul(dst, src, q):  # row_dst += q * row_src
        rd, rs = A[dst], A[src]
        for k in range(t, n):
            if rs[k]:
                rd[k] += q * rs[k]
        if U is not None:
            ud, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ud[k] += q * us[k]

    def col_addmul(dst, src, q):  # col_dst += q * col_src
        for r in A[t:]:
            if r[src]:
                r[dst] += q * r[src]
        if Vt is not None:
            vd, vs = Vt[dst], Vt[src]
            for k in range(n):
                if vs[k]:
                    vd[k] += q * vs[k]
        if Vinv is not None:
            # V <- V E with E = I + q e_src e_dst^T, so Vinv <- E^{-1} Vinv
            rs, rd = Vinv[src], Vinv[dst]
            for k in range(n):
                if rd[k]:
                    rs[k] -= q * rd[k]

    t = 0
    while t < min(m, n):
        # locate the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            r = A[i]
            for j in range(t, n):
                x = r[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    row_addmul(i, t, -(x // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    col_addmul(j, t, -(x // p))
                    if A[t][j]:
                        done = False
            if done and p == 1:
                break
            if done:
                # divisibility: every remaining entry must be a multiple of p
                bad = None
                for i in range(t + 1, m):
                    r = A[i]
                    for j in range(t + 1, n):
                        if r[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_addmul(t, bad, 1)
                continue
            # move the smallest entry of row/column t onto the diagonal
            best = (abs(A[t][t]), t, t)
            for i in range(t + 1, m):
                x = A[i][t]
                if x and abs(x) < best[0]:
                    best = (abs(x), i, t)
            for j in range(t + 1, n):
                x = A[t][j]
                if x and abs(x) < best[0]:
                    best = (abs(x), t, j)
            _, i, j = best
            if i != t:
                row_swap(i, t)
            if j != t:
                col_swap(j, t)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1

    S = Mat(A, m, n)
    Um = Mat(U, m, m) if U is not None else None
    Vm = Mat(Vt, n, n).T if Vt is not None else None
    if want_vinv:
        return S, Um, Vm, Mat(Vinv, n, n)
    return S, Um, Vm


def snf_diagonal(a: Mat) -> list[int]:
    """Diagonal entries of the Smith form (length ``min(m, n)``)."""
    S, _, _ = smith_normal_form(a, want_u=False, want_v=False)
    return [S[i, i] for i in range(min(S.shape))]


def determinant(a: Mat) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = a.nrows
    if a.ncols != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [[int(x) for x in r] for r in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Hermite normal form and integer lattices


def hermite_rows(gens: Sequence[Sequence[int]], ncols: int, track: bool = False):
    """Row-style Hermite normal form of the lattice spanned by ``gens``.

    Returns the nonzero rows (upper echelon, positive pivots, entries above
    each pivot reduced into ``[0, pivot)``).  With ``track`` also returns the
    list of transformation rows: ``T`` with ``T @ G = H_full`` where
    ``H_full`` has the HNF rows first followed by zero rows, and the
    trailing rows of ``T`` span the integer left kernel of ``G``.
    """
    A = [[int(x) for x in g] for g in gens]
    k = len(A)
    T = [[1 if i == j else 0 for j in range(k)] for i in range(k)] if track else None
    piv_row = 0
    pivots = []
    for c in range(ncols):
        if piv_row >= k:
            break
        # gcd-combine column c over rows piv_row.. into row piv_row
        while True:
            nz = [i for i in range(piv_row, k) if A[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            if i0 != piv_row:
                A[i0], A[piv_row] = A[piv_row], A[i0]
                if T is not None:
                    T[i0], T[piv_row] = T[piv_row], T[i0]
            p = A[piv_row][c]
            clean = True
            for i in range(piv_row + 1, k):
                x = A[i][c]
                if x:
                    q = x // p
                    ri, rp = A[i], A[piv_row]
                    for j in range(c, ncols):
                        if rp[j]:
                            ri[j] -= q * rp[j]
                    if T is not None:
                        ti, tp = T[i], T[piv_row]
                        for j in range(k):
                            if tp[j]:
                                ti[j] -= q * tp[j]
                    if ri[c]:
                        clean = False
            if clean:
                break
        if A[piv_row][c] == 0:
            continue
        if A[piv_row][c] < 0:
            A[piv_row] = [-x for x in A[piv_row]]
            if T is not None:
                T[piv_row] = [-x for x in T[piv_row]]
        p = A[piv_row][c]
        for i in range(piv_row):
            x = A[i][c]
            q = x // p
            if q:
                ri, rp = A[i], A[piv_row]
                for j in range(c, ncols):
                    if rp[j]:
                        ri[j] -= q * rp[j]
                if T is not None:
                    ti, tp = T[i], T[piv_row]
                    for j in range(k):
                        if tp[j]:
                            ti[j] -= q * tp[j]
        pivots.append(c)
        piv_row += 1
    H = [A[i] for i in range(piv_row)]
    if track:
        return H, T, piv_row
    return H


def lattice_basis(gens: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """A canonical basis (HNF rows) of the integer lattice spanned by gens."""
    return hermite_rows(gens, n)


def integer_kernel(a: Mat) -> Mat:
    """Basis (as columns) of ``{x in Z^n : a x = 0}``."""
    m, n = a.shape
    at = a.T.to_int()
    _, T, r = hermite_rows(at.rows, m, track=True)
    ker = [T[i] for i in range(r, n)]
    return Mat.from_columns(ker, n)


def solve_integer(a: Mat, b: Sequence[int]):
    """An integer solution of ``a x = b`` or None."""
    m, n = a.shape
    S, U, V = smith_normal_form(a.to_int())
    ub = U.apply([int(x) for x in b])
    y = [0] * n
    for i in range(m):
        d = S[i, i] if i < n else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
    return V.apply(y)


# ---------------------------------------------------------------------------
# rational elimination


def _primitive(r: dict) -> dict:
    g = 0
    for y in r.values():
        g = gcd(g, y)
        if g == 1:
            return r
    return {j: y // g for j, y in r.items()} if g > 1 else r


def _combine(r: dict, pr: dict, c: int) -> dict:
    """Clear column c of r using pr, fraction-free: ``a r - b pr``."""
    x, p = r[c], pr[c]
    g = gcd(x, p)
    a, b = p // g, x // g
    out = {j: a * y for j, y in r.items()} if a != 1 else dict(r)
    for j, y in pr.items():
        v = out.get(j, 0) - b * y
        if v:
            out[j] = v
        else:
            out.pop(j, None)
    return _primitive(out)


def rref(a: Mat) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q: ``(nonzero rows, pivot columns)``.

    Elimination runs on integer rows (each row scaled by its denominator
    and kept primitive); only the final division by the pivots produces
    fractions.  Entries come back as ``int`` where integral.
    """
    m, n = a.shape
    done = []  # (pivot col, integer row dict) kept mutually reduced
    for row in a.rows:
        den = 1
        for x in row:
            if x and not isinstance(x, int):
                den = lcm(den, x.denominator)
        r = {j: int(x * den) for j, x in enumerate(row) if x}
        for c, pr in done:
            if r.get(c):
                r = _combine(r, pr, c)
        if not r:
            continue
        r = _primitive(r)
        c = min(r)
        if r[c] < 0:
            r = {j: -y for j, y in r.items()}
        for idx, (c2, pr) in enumerate(done):
            if pr.get(c):
                pr2 = _combine(pr, r, c)
                if pr2[c2] < 0:
                    pr2 = {j: -y for j, y in pr2.items()}
                done[idx] = (c2, pr2)
        done.append((c, r))
    done.sort(key=lambda t: t[0])
    pivots = [c for c, _ in done]
    out = []
    for c, r in done:
        p = r[c]
        line = [0] * n
        for j, y in r.items():
            line[j] = y // p if y % p == 0 else Fraction(y, p)
        out.append(line)
    return out, pivots


def rank(a: Mat) -> int:
    return len(rref(a)[1])


def nullspace(a: Mat) -> Mat:
    """Basis of the rational null space as columns (free-variable basis)."""
    m, n = a.shape
    R, piv = rref(a)
    pivset = set(piv)
    free = [j for j in range(n) if j not in pivset]
    cols = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, p in zip(R, piv):
            v[p] = -r[f]
        cols.append(v)
    return Mat.from_columns(cols, n)


def column_space_basis(a: Mat) -> Mat:
    """Independent columns of ``a`` spanning its column space."""
    _, piv = rref(a)
    return a.submatrix(range(a.nrows), piv)


def left_annihilator(a: Mat) -> Mat:
    """Rows spanning ``{y : y a = 0}``; its null space is the column space of a."""
    return nullspace(a.T).T


def solve_rational(a: Mat, b: Sequence):
    """A rational solution of ``a x = b`` or None."""
    m, n = a.shape
    aug = hstack([a, Mat.from_columns([list(b)], m)])
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, p in zip(R, piv):
        x[p] = r[n]
    return tuple(_norm(v) for v in x)


def vec_denominator(v: Sequence) -> int:
    d = 1
    for x in v:
        if not isinstance(x, int):
            d = lcm(d, x.denominator)
    return d


def vec_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
