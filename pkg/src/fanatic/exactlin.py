"""Exact rational linear algebra: matrices, echelon forms, subspaces, SNF.

Everything here works over arbitrary-precision rationals (fractions.Fraction)
or plain Python ints; no floating point is used anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class RMatrix:
    """Immutable matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence]):
        entries = tuple(tuple(Fraction(x) for x in row) for row in data)
        if entries:
            ncols = len(entries[0])
            if any(len(row) != ncols for row in entries):
                raise ValueError("ragged rows")
        else:
            ncols = 0
        object.__setattr__(self, "data", entries)
        object.__setattr__(self, "rows", len(entries))
        object.__setattr__(self, "cols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("RMatrix is immutable")

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, k: int) -> "RMatrix":
        return cls([[1 if i == j else 0 for j in range(k)] for i in range(k)])

    @classmethod
    def vstack(cls, *mats: "RMatrix") -> "RMatrix":
        cols = {m.cols for m in mats if m.rows}
        if len(cols) > 1:
            raise ValueError("column mismatch in vstack")
        rows = []
        for m in mats:
            rows.extend(m.data)
        return cls(rows)

    def __eq__(self, other):
        return isinstance(other, RMatrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"RMatrix({[list(map(str, r)) for r in self.data]})"

    def row(self, i: int) -> tuple:
        return self.data[i]

    def entry(self, i: int, j: int) -> Fraction:
        return self.data[i][j]

    def transpose(self) -> "RMatrix":
        return RMatrix(zip(*self.data)) if self.rows else RMatrix([])

    def __mul__(self, other: "RMatrix") -> "RMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ot = list(zip(*other.data))
        return RMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.data]
        )

    def apply(self, vec: Sequence) -> tuple:
        """Matrix times column vector, returned as a tuple."""
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.data)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        m = [list(r) for r in self.data]
        det = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            inv = m[c][c]
            m[c] = [x / inv for x in m[c]]
            for i in range(c + 1, n):
                f = m[i][c]
                if f:
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return det


def _rref_rows(data) -> tuple[list[list[Fraction]], list[int]]:
    rows = [[Fraction(x) for x in row] for row in data]
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: RMatrix) -> RMatrix:
    """Reduced row-echelon form, same shape as the input."""
    rows, _ = _rref_rows(m.data)
    return RMatrix(rows)


def row_space_pivots(m: RMatrix) -> tuple[RMatrix, list[int]]:
    """Nonzero rref rows and their pivot columns."""
    rows, pivots = _rref_rows(m.data)
    return RMatrix(rows[: len(pivots)]), pivots


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^ambient_dim, held as a canonical rref basis.

    Two subspaces are equal iff their canonical bases are equal, so equality
    and hashing decide subspace identity exactly.
    """

    ambient_dim: int
    basis: RMatrix

    @classmethod
    def from_rows(cls, ambient_dim: int, rows: Iterable[Sequence]) -> "Subspace":
        mat = RMatrix(rows)
        if mat.rows and mat.cols != ambient_dim:
            raise ValueError("row length does not match ambient dimension")
        basis, _ = row_space_pivots(mat) if mat.rows else (RMatrix([]), [])
        return cls(ambient_dim, basis)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RMatrix([]))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains(self, vec: Sequence) -> bool:
        v = [Fraction(x) for x in vec]
        if len(v) != self.ambient_dim:
            raise ValueError("dimension mismatch")
        _, pivots = row_space_pivots(self.basis) if self.basis.rows else (None, [])
        for row, p in zip(self.basis.data, pivots):
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
        return all(x == 0 for x in v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis.data)

    def coords(self, vec: Sequence) -> tuple:
        """Coordinates of vec in the canonical basis (vec must lie in self)."""
        v = [Fraction(x) for x in vec]
        _, pivots = row_space_pivots(self.basis) if self.basis.rows else (None, [])
        out = tuple(v[p] for p in pivots)
        recon = [Fraction(0)] * self.ambient_dim
        for c, row in zip(out, self.basis.data):
            recon = [a + c * b for a, b in zip(recon, row)]
        if recon != v:
            raise ValueError("vector not in subspace")
        return out


def kernel(m: RMatrix) -> Subspace:
    """Null space {x : m x = 0} as a Subspace of Q^cols."""
    if m.rows == 0:
        return Subspace.full(m.cols)
    rows, pivots = _rref_rows(m.data)
    nc = m.cols
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nc
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return Subspace.from_rows(nc, basis)


@lru_cache(maxsize=4096)
def forms_of(s: Subspace) -> RMatrix:
    """Rows of linear functionals cutting out s (the null space of its basis)."""
    if s.dim == 0:
        return RMatrix.identity(s.ambient_dim)
    return kernel(RMatrix(s.basis.data)).basis


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    stacked = RMatrix.vstack(forms_of(a), forms_of(b))
    if stacked.rows == 0:  # both subspaces are the full space
        return Subspace.full(a.ambient_dim)
    return kernel(stacked)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    rows = list(a.basis.data) + list(b.basis.data)
    return Subspace.from_rows(a.ambient_dim, rows)


def smith_normal_form(m: Sequence[Sequence[int]]):
    """Smith normal form of an integer matrix.

    Returns (diag, U, V) with U @ m @ V diagonal, diag[i] >= 0,
    diag[i] | diag[i+1], and U, V unimodular (as lists of lists of int).
    """
    A = [[int(x) for x in row] for row in m]
    nr = len(A)
    nc = len(A[0]) if nr else 0
    U = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    V = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_op(i, j, f):  # row i -= f * row j
        A[i] = [a - f * b for a, b in zip(A[i], A[j])]
        U[i] = [a - f * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, f):  # col i -= f * col j
        for r in range(nr):
            A[r][i] -= f * A[r][j]
        for r in range(nc):
            V[r][i] -= f * V[r][j]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(nr):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(nc):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    def diagonalize():
        t = 0
        while t < min(nr, nc):
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if A[i][j] != 0 and (
                        best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])
                    ):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            dirty = True
            while dirty:
                dirty = False
                for i in range(t + 1, nr):
                    if A[i][t] != 0:
                        q = A[i][t] // A[t][t]
                        row_op(i, t, q)
                        if A[i][t] != 0:
                            swap_rows(t, i)
                            dirty = True
                for j in range(t + 1, nc):
                    if A[t][j] != 0:
                        q = A[t][j] // A[t][t]
                        col_op(j, t, q)
                        if A[t][j] != 0:
                            swap_cols(t, j)
                            dirty = True
            t += 1

    diagonalize()
    # enforce the divisibility chain; each fold is followed by rediagonalization
    k = min(nr, nc)
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a != 0 and b % a != 0:
                col_op(i, i + 1, -1)  # col i += col i+1, then clean up again
                diagonalize()
                changed = True
                break

    for i in range(k):
        if A[i][i] < 0:
            A[i] = [-x for x in A[i]]
            U[i] = [-x for x in U[i]]
    diag = [A[i][i] for i in range(k)]
    return diag, U, V
