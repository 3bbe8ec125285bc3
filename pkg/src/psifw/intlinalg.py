"""Exact integer linear algebra: HNF, SNF, determinants, lattice indices.

Matrices are plain tuples of tuples of Python ints; no numpy, no floats.
Everything here is small and desk-scale, so the classical cubic algorithms
are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Row = tuple[int, ...]
Matrix = tuple[Row, ...]

INFINITE = "INFINITE"


class LatticeError(ValueError):
    pass


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    mat = tuple(tuple(int(x) for x in row) for row in rows)
    if mat and any(len(row) != len(mat[0]) for row in mat):
        raise LatticeError("ragged matrix")
    return mat


def identity(k: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def det(a: Matrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise LatticeError("determinant needs a square matrix")
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def hnf(mat: Iterable[Iterable[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form: returns (H, U) with H = U @ mat, U unimodular.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    and zero rows sink to the bottom.
    """
    a = [list(r) for r in as_matrix(mat)]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(r) for r in identity(rows)]
    pivot_row = 0
    pivots = []
    for col in range(cols):
        # Euclidean reduction of this column below pivot_row.
        while True:
            nonzero = [i for i in range(pivot_row, rows) if a[i][col] != 0]
            if not nonzero:
                break
            i0 = min(nonzero, key=lambda i: abs(a[i][col]))
            if i0 != pivot_row:
                a[pivot_row], a[i0] = a[i0], a[pivot_row]
                u[pivot_row], u[i0] = u[i0], u[pivot_row]
            done = True
            for i in range(pivot_row + 1, rows):
                if a[i][col] != 0:
                    q = a[i][col] // a[pivot_row][col]
                    for j in range(cols):
                        a[i][j] -= q * a[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
                    if a[i][col] != 0:
                        done = False
            if done:
                break
        if pivot_row < rows and a[pivot_row][col] != 0:
            if a[pivot_row][col] < 0:
                a[pivot_row] = [-x for x in a[pivot_row]]
                u[pivot_row] = [-x for x in u[pivot_row]]
            for i in range(pivot_row):
                q = a[i][col] // a[pivot_row][col]
                if q:
                    for j in range(cols):
                        a[i][j] -= q * a[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
            pivots.append(col)
            pivot_row += 1
    return as_matrix(a), as_matrix(u)


def rank(mat: Iterable[Iterable[int]]) -> int:
    h, _ = hnf(mat)
    return sum(1 for row in h if any(row))


def snf_diagonal(mat: Iterable[Iterable[int]]) -> tuple[int, ...]:
    """Elementary divisors d1 | d2 | ... (length min(rows, cols), zero-padded)."""
    a = [list(r) for r in as_matrix(mat)]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    size = min(rows, cols)
    divisors = []
    top = 0
    while top < size:
        if all(a[i][j] == 0 for i in range(top, rows) for j in range(top, cols)):
            break
        # Move a minimal nonzero entry to the corner, then clear its row
        # and column; restart whenever a division-inexactness fix is applied.
        while True:
            i0, j0 = min(
                (
                    (i, j)
                    for i in range(top, rows)
                    for j in range(top, cols)
                    if a[i][j] != 0
                ),
                key=lambda ij: abs(a[ij[0]][ij[1]]),
            )
            a[top], a[i0] = a[i0], a[top]
            for row in a:
                row[top], row[j0] = row[j0], row[top]
            pivot = a[top][top]
            dirty = False
            for i in range(top + 1, rows):
                q = a[i][top] // pivot
                if q:
                    for j in range(top, cols):
                        a[i][j] -= q * a[top][j]
                if a[i][top] != 0:
                    dirty = True
            for j in range(top + 1, cols):
                q = a[top][j] // pivot
                if q:
                    for i in range(top, rows):
                        a[i][j] -= q * a[i][top]
                if a[top][j] != 0:
                    dirty = True
            if dirty:
                continue
            # Enforce divisibility of the remaining block by the pivot.
            offender = next(
                (
                    (i, j)
                    for i in range(top + 1, rows)
                    for j in range(top + 1, cols)
                    if a[i][j] % pivot != 0
                ),
                None,
            )
            if offender is None:
                break
            i, _ = offender
            for j in range(top, cols):
                a[top][j] += a[i][j]
        divisors.append(abs(a[top][top]))
        top += 1
    divisors.extend([0] * (size - len(divisors)))
    return tuple(divisors)


def solve_unit_upper_triangular(a: Iterable[Iterable[int]], rhs: Sequence[int]) -> tuple[int, ...]:
    """Back-substitute A y = rhs for A unit upper triangular with 0/1 entries."""
    mat = as_matrix(a)
    r = len(mat)
    if any(len(row) != r for row in mat):
        raise LatticeError("matrix must be square")
    for i in range(r):
        if mat[i][i] != 1:
            raise LatticeError("diagonal must be all ones")
        for j in range(r):
            if j < i and mat[i][j] != 0:
                raise LatticeError("matrix must be upper triangular")
            if mat[i][j] not in (0, 1):
                raise LatticeError("entries must be 0 or 1")
    if len(rhs) != r:
        raise LatticeError("rhs length mismatch")
    y = [0] * r
    for i in range(r - 1, -1, -1):
        y[i] = rhs[i] - sum(mat[i][j] * y[j] for j in range(i + 1, r))
    return tuple(y)


def invert_unit_upper_triangular(a: Iterable[Iterable[int]]) -> Matrix:
    mat = as_matrix(a)
    r = len(mat)
    cols = []
    for k in range(r):
        e = [1 if i == k else 0 for i in range(r)]
        cols.append(solve_unit_upper_triangular(mat, e))
    return transpose(as_matrix(cols))


def kernel_basis(mat: Iterable[Iterable[int]]) -> Matrix:
    """Basis of the integer kernel {x : mat @ x = 0}; rows are basis vectors."""
    a = as_matrix(mat)
    if not a:
        raise LatticeError("kernel of an empty matrix is ambiguous")
    h, u = hnf(transpose(a))
    return tuple(u[i] for i in range(len(h)) if not any(h[i]))


def saturation(rows: Iterable[Iterable[int]]) -> Matrix:
    """Basis of (Q-span of rows) intersected with Z^n; rows are basis vectors."""
    a = as_matrix(rows)
    if not a:
        raise LatticeError("saturation needs at least one generator")
    n = len(a[0])
    ker = kernel_basis(a)
    if not ker:
        return identity(n)
    return kernel_basis(ker)


def _solve_in_row_space(basis: Matrix, vec: Row) -> tuple[Fraction, ...] | None:
    """Coordinates of vec in the row space of basis (full-row-rank), or None."""
    rows = len(basis)
    cols = len(basis[0])
    aug = [[Fraction(basis[i][j]) for i in range(rows)] + [Fraction(vec[j])] for j in range(cols)]
    # Gaussian elimination on the cols x rows system (transposed view).
    pivots = []
    r = 0
    for c in range(rows):
        pr = next((i for i in range(r, cols) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        scale = aug[r][c]
        aug[r] = [x / scale for x in aug[r]]
        for i in range(cols):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    coords = [Fraction(0)] * rows
    for i, c in enumerate(pivots):
        coords[c] = aug[i][-1]
    for i in range(r, cols):
        if aug[i][-1] != 0:
            return None
    return tuple(coords)


@dataclass(frozen=True)
class Lattice:
    """Subgroup of Z^ambient_rank generated by the rows of ``generators``."""

    ambient_rank: int
    generators: Matrix

    @staticmethod
    def build(ambient_rank: int, generators: Iterable[Iterable[int]]) -> "Lattice":
        mat = as_matrix(generators)
        if any(len(row) != ambient_rank for row in mat):
            raise LatticeError("generators must live in Z^ambient_rank")
        return Lattice(ambient_rank, mat)

    def rank(self) -> int:
        return rank(self.generators) if self.generators else 0


def lattice_index(ambient: Lattice, sub: Lattice):
    """Index of <sub> inside <ambient>, or INFINITE when ranks differ.

    Raises if the sub generators leave the Q-span of the ambient generators,
    or sit in the Q-span without being in the generated subgroup.
    """
    if ambient.ambient_rank != sub.ambient_rank:
        raise LatticeError("ambient ranks differ")
    h_amb, _ = hnf(ambient.generators)
    basis = tuple(row for row in h_amb if any(row))
    if not basis:
        raise LatticeError("ambient lattice is trivial")
    coords = []
    for g in sub.generators:
        c = _solve_in_row_space(basis, g)
        if c is None:
            raise LatticeError("sub generator outside the ambient Q-span")
        if any(x.denominator != 1 for x in c):
            raise LatticeError("sub generator is not in the ambient subgroup")
        coords.append(tuple(int(x) for x in c))
    if rank(coords) < len(basis):
        return INFINITE
    h_sub, _ = hnf(coords)
    r = len(basis)
    index = 1
    for i in range(r):
        index *= h_sub[i][i]
    return abs(index)


def primitive(vec: Sequence[int]) -> Row:
    """Primitive integer vector on the same ray (gcd 1, direction kept)."""
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        raise LatticeError("zero vector has no primitive representative")
    return tuple(x // g for x in vec)
