"""Exact linear algebra over QuadScalar entries, plus integer normal forms.

QuadScalar matrices use straightforward fraction-free-enough Gaussian
elimination (entries form a field, so exact division is fine).  Integer
matrices are plain ``list[list[int]]``; the Hermite form is column-style
(A * U = H, H lower triangular, positive pivots, row entries left of a
pivot reduced into [0, pivot)), which also yields integer kernels.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .scalars import QuadScalar, ScalarError

Vector = tuple[QuadScalar, ...]
IntMatrix = list[list[int]]


class SingularMatrixError(ValueError):
    pass


def _as_scalar(value, d: int) -> QuadScalar:
    if isinstance(value, QuadScalar):
        if value.b != 0 and value.d != d:
            raise ScalarError(f"entry radicand {value.d} differs from matrix radicand {d}")
        if value.b == 0 and value.d != d:
            return QuadScalar(value.a, 0, d)
        return value
    return QuadScalar(Fraction(value), 0, d)


class ExactMatrix:
    """Immutable rectangular matrix of QuadScalar entries sharing one radicand."""

    __slots__ = ("rows", "cols", "d", "_entries")

    def __init__(self, entries: Sequence[Sequence], d: int = 0) -> None:
        rows = [tuple(_as_scalar(v, d) for v in row) for row in entries]
        if not rows:
            raise ValueError("matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = width
        self.d = d
        self._entries = tuple(rows)

    @classmethod
    def identity(cls, n: int, d: int = 0) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], d)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], d: int = 0) -> "ExactMatrix":
        cols = [list(c) for c in columns]
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))], d)

    def __getitem__(self, ij: tuple[int, int]) -> QuadScalar:
        return self._entries[ij[0]][ij[1]]

    def row(self, i: int) -> Vector:
        return self._entries[i]

    def column(self, j: int) -> Vector:
        return tuple(self._entries[i][j] for i in range(self.rows))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            self._entries[i][j] == other._entries[i][j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(v) for v in row) for row in self._entries)
        return f"ExactMatrix[{body}]"

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            [[self._entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.d
        )

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        d = self.d if self.d else other.d
        return ExactMatrix(
            [
                [
                    sum(
                        (self._entries[i][k] * other._entries[k][j] for k in range(self.cols)),
                        QuadScalar(0, 0, d),
                    )
                    for j in range(other.cols)
                ]
                for i in range(self.rows)
            ],
            d,
        )

    def apply(self, vector: Sequence) -> Vector:
        if len(vector) != self.cols:
            raise ValueError("dimension mismatch in matrix-vector product")
        vec = [_as_scalar(v, self.d) for v in vector]
        return tuple(
            sum((self._entries[i][j] * vec[j] for j in range(self.cols)), QuadScalar(0, 0, self.d))
            for i in range(self.rows)
        )

    def _eliminated(self) -> tuple[list[list[QuadScalar]], QuadScalar, list[int]]:
        # Forward elimination with first-nonzero pivoting; returns the echelon
        # grid, the determinant-so-far (square case), and pivot columns.
        work = [list(row) for row in self._entries]
        det = QuadScalar(1, 0, self.d)
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            pivot_row = next((i for i in range(r, self.rows) if work[i][c]), None)
            if pivot_row is None:
                continue
            if pivot_row != r:
                work[r], work[pivot_row] = work[pivot_row], work[r]
                det = -det
            det = det * work[r][c]
            inv = QuadScalar(1, 0, self.d) / work[r][c]
            for i in range(r + 1, self.rows):
                if work[i][c]:
                    factor = work[i][c] * inv
                    for j in range(c, self.cols):
                        work[i][j] = work[i][j] - factor * work[r][j]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return work, det, pivots

    def rank(self) -> int:
        return len(self._eliminated()[2])

    def det(self) -> QuadScalar:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        _, det, pivots = self._eliminated()
        if len(pivots) < self.rows:
            return QuadScalar(0, 0, self.d)
        return det

    def solve(self, rhs: Sequence) -> Optional[Vector]:
        """Solve self * x = rhs exactly; None when no solution exists."""
        b = [_as_scalar(v, self.d) for v in rhs]
        if len(b) != self.rows:
            raise ValueError("dimension mismatch in solve")
        work = [list(row) + [b[i]] for i, row in enumerate(self._entries)]
        pivots: list[tuple[int, int]] = []
        r = 0
        for c in range(self.cols):
            pivot_row = next((i for i in range(r, self.rows) if work[i][c]), None)
            if pivot_row is None:
                continue
            work[r], work[pivot_row] = work[pivot_row], work[r]
            inv = QuadScalar(1, 0, self.d) / work[r][c]
            for j in range(c, self.cols + 1):
                work[r][j] = work[r][j] * inv
            for i in range(self.rows):
                if i != r and work[i][c]:
                    factor = work[i][c]
                    for j in range(c, self.cols + 1):
                        work[i][j] = work[i][j] - factor * work[r][j]
            pivots.append((r, c))
            r += 1
            if r == self.rows:
                break
        for i in range(r, self.rows):
            if work[i][self.cols]:
                return None
        x = [QuadScalar(0, 0, self.d)] * self.cols
        for row_idx, col_idx in pivots:
            x[col_idx] = work[row_idx][self.cols]
        return tuple(x)

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        work = [list(row) + [QuadScalar(1 if i == j else 0, 0, self.d) for j in range(n)]
                for i, row in enumerate(self._entries)]
        for c in range(n):
            pivot_row = next((i for i in range(c, n) if work[i][c]), None)
            if pivot_row is None:
                raise SingularMatrixError("matrix is singular")
            work[c], work[pivot_row] = work[pivot_row], work[c]
            inv = QuadScalar(1, 0, self.d) / work[c][c]
            for j in range(2 * n):
                work[c][j] = work[c][j] * inv
            for i in range(n):
                if i != c and work[i][c]:
                    factor = work[i][c]
                    for j in range(2 * n):
                        work[i][j] = work[i][j] - factor * work[c][j]
        return ExactMatrix([row[n:] for row in work], self.d)

    def is_integer(self) -> bool:
        return all(v.is_integer for row in self._entries for v in row)

    def to_int_matrix(self) -> IntMatrix:
        if not self.is_integer():
            raise ValueError("matrix has non-integer entries")
        return [[int(v.a) for v in row] for row in self._entries]

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        d = self.d if self.d else other.d
        return ExactMatrix(
            [list(self._entries[i]) + list(other._entries[i]) for i in range(self.rows)], d
        )


def scalar_dot(x: Sequence[QuadScalar], y: Sequence[QuadScalar]) -> QuadScalar:
    if len(x) != len(y):
        raise ValueError("dimension mismatch in dot product")
    d = 0
    for v in list(x) + list(y):
        if isinstance(v, QuadScalar) and v.d:
            d = v.d
            break
    total = QuadScalar(0, 0, d)
    for a, b in zip(x, y):
        total = total + a * b
    return total


# ---------------------------------------------------------------------------
# Integer matrices: Hermite and Smith normal forms with transforms.
# ---------------------------------------------------------------------------


def _int_identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _col_addmul(m: IntMatrix, dst: int, src: int, k: int) -> None:
    if k:
        for row in m:
            row[dst] += k * row[src]


def _col_swap(m: IntMatrix, i: int, j: int) -> None:
    if i != j:
        for row in m:
            row[i], row[j] = row[j], row[i]


def _col_negate(m: IntMatrix, j: int) -> None:
    for row in m:
        row[j] = -row[j]


def hnf(matrix: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Column-style Hermite normal form: A * U = H with U unimodular.

    H is lower triangular by pivot structure, pivots positive, entries to the
    left of each pivot in its row reduced into [0, pivot).  Zero columns of H
    are collected at the right; the matching columns of U span the integer
    kernel of A.
    """
    h = [list(row) for row in matrix]
    if not h:
        raise ValueError("empty matrix")
    n_rows, n_cols = len(h), len(h[0])
    u = _int_identity(n_cols)
    c = 0
    for i in range(n_rows):
        if c == n_cols:
            break
        # Gcd-reduce row i over columns c..end until a single pivot remains.
        while True:
            tail = [k for k in range(c + 1, n_cols) if h[i][k]]
            if h[i][c] == 0:
                if not tail:
                    break
                k = min(tail, key=lambda k: (abs(h[i][k]), k))
                _col_swap(h, c, k)
                _col_swap(u, c, k)
                continue
            if not tail:
                break
            for k in tail:
                q = h[i][k] // h[i][c]
                _col_addmul(h, k, c, -q)
                _col_addmul(u, k, c, -q)
            tail = [k for k in range(c + 1, n_cols) if h[i][k]]
            if not tail:
                break
            k = min(tail, key=lambda k: (abs(h[i][k]), k))
            _col_swap(h, c, k)
            _col_swap(u, c, k)
        if h[i][c] == 0:
            continue
        if h[i][c] < 0:
            _col_negate(h, c)
            _col_negate(u, c)
        # Reduce earlier columns of this row into [0, pivot).
        for k in range(c):
            q = h[i][k] // h[i][c]
            _col_addmul(h, k, c, -q)
            _col_addmul(u, k, c, -q)
        c += 1
    return h, u


def int_kernel(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {z integer : A z = 0}, as a list of column vectors."""
    h, u = hnf(matrix)
    n_rows, n_cols = len(h), len(h[0])
    kernel_cols = [
        j for j in range(n_cols) if all(h[i][j] == 0 for i in range(n_rows))
    ]
    return [[u[i][j] for i in range(n_cols)] for j in kernel_cols]


def int_det(matrix: Sequence[Sequence[int]]) -> int:
    m = ExactMatrix(matrix, 0)
    value = m.det()
    return int(value.a)


def solve_integer(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> Optional[list[int]]:
    """Some integer solution of A x = rhs, or None; works for any shape/rank."""
    h, u = hnf(matrix)
    n_rows, n_cols = len(h), len(h[0])
    y = [0] * n_cols
    residual = list(rhs)
    col = 0
    for i in range(n_rows):
        if col < n_cols and h[i][col]:
            if residual[i] % h[i][col] != 0:
                return None
            q = residual[i] // h[i][col]
            y[col] = q
            for ii in range(i, n_rows):
                residual[ii] -= q * h[ii][col]
            col += 1
        elif residual[i] != 0:
            return None
    if any(residual):
        return None
    return [sum(u[i][j] * y[j] for j in range(n_cols)) for i in range(n_cols)]


def snf(matrix: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: U * A * V = S diagonal with d1 | d2 | ...

    U and V are unimodular; diagonal entries are non-negative.
    """
    s = [list(row) for row in matrix]
    if not s:
        raise ValueError("empty matrix")
    n_rows, n_cols = len(s), len(s[0])
    u = _int_identity(n_rows)
    v = _int_identity(n_cols)

    def row_addmul(dst: int, src: int, k: int) -> None:
        if k:
            for j in range(n_cols):
                s[dst][j] += k * s[src][j]
            for j in range(n_rows):
                u[dst][j] += k * u[src][j]

    def row_swap(i: int, j: int) -> None:
        if i != j:
            s[i], s[j] = s[j], s[i]
            u[i], u[j] = u[j], u[i]

    def row_negate(i: int) -> None:
        for j in range(n_cols):
            s[i][j] = -s[i][j]
        for j in range(n_rows):
            u[i][j] = -u[i][j]

    def smallest_nonzero(t: int) -> Optional[tuple[int, int]]:
        best = None
        for i in range(t, n_rows):
            for j in range(t, n_cols):
                if s[i][j] and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        return best

    def diagonalize() -> int:
        t = 0
        while t < min(n_rows, n_cols):
            if smallest_nonzero(t) is None:
                break
            while True:
                i0, j0 = smallest_nonzero(t)
                row_swap(t, i0)
                _col_swap(s, t, j0)
                _col_swap(v, t, j0)
                dirty = False
                for i in range(t + 1, n_rows):
                    q = s[i][t] // s[t][t]
                    row_addmul(i, t, -q)
                    if s[i][t]:
                        dirty = True
                for j in range(t + 1, n_cols):
                    q = s[t][j] // s[t][t]
                    _col_addmul(s, j, t, -q)
                    _col_addmul(v, j, t, -q)
                    if s[t][j]:
                        dirty = True
                if not dirty:
                    break
            if s[t][t] < 0:
                row_negate(t)
            t += 1
        return t

    rank = diagonalize()
    # Enforce the divisibility chain d_k | d_{k+1}; mixing a violating pair
    # back into one column and re-diagonalizing replaces it by (gcd, lcm).
    for _ in range(64 * (rank + 1)):
        violation = next(
            (k for k in range(rank - 1) if s[k + 1][k + 1] % s[k][k] != 0), None
        )
        if violation is None:
            return s, u, v
        _col_addmul(s, violation, violation + 1, 1)
        _col_addmul(v, violation, violation + 1, 1)
        diagonalize()
    raise RuntimeError("Smith normal form did not converge")  # unreachable
