"""Lattices and lower-rank discrete subgroups of R^d with exact bases.

Bases are column matrices over one quadratic field.  Full-rank groups are
:class:`Lattice`; lower-rank ones are :class:`DiscreteGroup`.  Covolume of a
lower-rank group is kept as the exact Gram determinant det(B^T B) and
compared in squared form, so no new square roots enter the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Optional, Sequence

from .linalg import ExactMatrix, IntMatrix, hnf, int_det, int_kernel, snf, solve_integer
from .scalars import QuadScalar

Vector = tuple[QuadScalar, ...]


class LatticeError(ValueError):
    pass


def _as_matrix(basis, d: int) -> ExactMatrix:
    return basis if isinstance(basis, ExactMatrix) else ExactMatrix(basis, d)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice basis * Z^d, basis columns a Z-basis."""

    basis: ExactMatrix

    def __post_init__(self):
        if self.basis.rows != self.basis.cols:
            raise LatticeError("lattice basis must be square")
        if not self.basis.det():
            raise LatticeError("lattice basis is singular")

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def rank(self) -> int:
        return self.basis.cols

    @classmethod
    def standard(cls, n: int, d: int = 0) -> "Lattice":
        return cls(ExactMatrix.identity(n, d))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], d: int = 0) -> "Lattice":
        return cls(ExactMatrix.from_columns(columns, d))


@dataclass(frozen=True)
class DiscreteGroup:
    """Rank-r discrete subgroup of R^d given by r independent basis columns."""

    basis: ExactMatrix

    def __post_init__(self):
        if self.basis.rank() != self.basis.cols:
            raise LatticeError("discrete group columns must be R-independent")

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def rank(self) -> int:
        return self.basis.cols

    def as_lattice(self) -> Lattice:
        if self.rank != self.dim:
            raise LatticeError("group is not full rank")
        return Lattice(self.basis)


GroupLike = "Lattice | DiscreteGroup"


def volume(lattice: Lattice) -> QuadScalar:
    """|det(basis)|, the covolume of a full-rank lattice."""
    return abs(lattice.basis.det())


def gram_determinant(group) -> QuadScalar:
    """det(B^T B); equals volume squared for any rank.  Exact in the field."""
    b = group.basis
    return (b.transpose() * b).det()


def dual(lattice: Lattice) -> Lattice:
    """Dual lattice basis A^(-T); pairings with the primal are integers."""
    return Lattice(lattice.basis.inverse().transpose())


def member(group, vector: Sequence) -> Optional[tuple[int, ...]]:
    """Integer coordinates c with basis * c = vector, or None.

    Works for lower-rank groups via the normal equations (B^T B is
    non-singular when columns are independent), then an exact re-check.
    """
    b = group.basis
    if b.rows == b.cols:
        coords = b.solve(vector)
        if coords is None:
            return None
    else:
        gram = b.transpose() * b
        rhs = b.transpose().apply(vector)
        coords = gram.solve(rhs)
        if coords is None:
            return None
        reconstructed = b.apply(coords)
        if any(reconstructed[i] != vector[i] for i in range(b.rows)):
            return None
    if not all(c.is_integer for c in coords):
        return None
    return tuple(int(c.a) for c in coords)


def spans_same_group(g1, g2) -> bool:
    return (
        g1.rank == g2.rank
        and all(member(g1, col) is not None for col in g2.basis.columns())
        and all(member(g2, col) is not None for col in g1.basis.columns())
    )


def intersect_coordinate_subspace(lattice: Lattice, m: int) -> DiscreteGroup:
    """The group lattice ∩ ({0}^m x R^n), for a lattice inside Z^m x R^n.

    Precondition (checked): the first m coordinates of every basis vector are
    integers.  The result has rank exactly n = d - m; anything else signals an
    internal inconsistency and raises.
    """
    d = lattice.dim
    if not 0 <= m <= d:
        raise LatticeError(f"m must be in 0..{d}")
    top = [[lattice.basis[i, j] for j in range(d)] for i in range(m)]
    for row in top:
        for v in row:
            if not v.is_integer:
                raise LatticeError("lattice is not inside Z^m x R^n")
    if m == 0:
        return DiscreteGroup(lattice.basis)
    kernel = int_kernel([[int(v.a) for v in row] for row in top])
    n = d - m
    if len(kernel) != n:
        raise AssertionError("coordinate-subspace intersection has wrong rank")
    columns = [lattice.basis.apply(col) for col in kernel]
    return DiscreteGroup(ExactMatrix.from_columns(columns, lattice.basis.d))


def extend_basis(lattice: Lattice, subgroup: DiscreteGroup) -> DiscreteGroup:
    """A complement L1 with lattice = L1 ⊕ subgroup, via unimodular completion.

    The subgroup must be primitive in the lattice (subgroup = lattice ∩ its
    R-span); equivalently its coordinate matrix has all invariant factors 1.
    """
    d, r = lattice.dim, subgroup.rank
    coords_cols = []
    for col in subgroup.basis.columns():
        sol = lattice.basis.solve(col)
        if sol is None or not all(c.is_integer for c in sol):
            raise LatticeError("subgroup is not contained in the lattice")
        coords_cols.append([int(c.a) for c in sol])
    c = [[coords_cols[j][i] for j in range(r)] for i in range(d)]
    s, u, v = snf(c)
    if any(s[i][i] != 1 for i in range(r)):
        raise LatticeError("subgroup is not primitive in the lattice")
    # U C V = [I; 0], so C V equals the first r columns of U^{-1}; the last
    # d - r columns of U^{-1} complete them to a basis of Z^d.
    u_inv = ExactMatrix(u, 0).inverse()
    complement_cols = []
    for j in range(r, d):
        col_int = [int(u_inv[i, j].a) for i in range(d)]
        complement_cols.append(lattice.basis.apply(col_int))
    return DiscreteGroup(ExactMatrix.from_columns(complement_cols, lattice.basis.d))


@dataclass(frozen=True)
class SumIntersection:
    sum_group: Lattice
    intersection: Lattice
    index_sum_in_ambient: int
    index_g1_in_sum: int
    index_g2_in_sum: int


def group_sum_and_intersection(g1: Lattice, g2: Lattice) -> SumIntersection:
    """Sum and intersection of two full-rank sublattices of Z^k, with indices."""
    b1 = g1.basis.to_int_matrix()
    b2 = g2.basis.to_int_matrix()
    k = len(b1)
    if len(b2) != k:
        raise LatticeError("ambient dimension mismatch")
    concat = [b1[i] + b2[i] for i in range(k)]
    h, _ = hnf(concat)
    sum_basis = [[h[i][j] for j in range(k)] for i in range(k)]
    if int_det(sum_basis) == 0:
        raise LatticeError("inputs are not full rank")
    # Intersection: kernel of [B1 | -B2] gives B1 x = B2 y; image under B1.
    paired = [b1[i] + [-v for v in b2[i]] for i in range(k)]
    kern = int_kernel(paired)
    inter_cols = []
    for z in kern:
        x = z[:k]
        inter_cols.append([sum(b1[i][j] * x[j] for j in range(k)) for i in range(k)])
    inter_matrix = [[inter_cols[j][i] for j in range(len(inter_cols))] for i in range(k)]
    hi, _ = hnf(inter_matrix)
    inter_basis = [[hi[i][j] for j in range(k)] for i in range(k)]
    d_sum = abs(int_det(sum_basis))
    return SumIntersection(
        sum_group=Lattice(ExactMatrix(sum_basis, 0)),
        intersection=Lattice(ExactMatrix(inter_basis, 0)),
        index_sum_in_ambient=d_sum,
        index_g1_in_sum=abs(int_det(b1)) // d_sum,
        index_g2_in_sum=abs(int_det(b2)) // d_sum,
    )


def superlattice_with_index(group: DiscreteGroup, k: int) -> tuple[DiscreteGroup, list[Vector]]:
    """Super-group G' ⊇ G with [G':G] = k: the first basis vector is divided
    by k.  Also returns the transversal J = {j * (b1/k) : 0 <= j < k} with
    G' = G ⊕ J.
    """
    if k < 1:
        raise LatticeError("index must be a positive integer")
    cols = group.basis.columns()
    first = tuple(v / k for v in cols[0])
    new_cols = [first] + list(cols[1:])
    new_group = DiscreteGroup(ExactMatrix.from_columns(new_cols, group.basis.d))
    transversal = [tuple(v * j for v in first) for j in range(k)]
    return new_group, transversal


def _float_interval(scalar: QuadScalar) -> tuple[float, float]:
    x = scalar.to_float(60)
    pad = 1e-12 * (1.0 + abs(x)) + 1e-300
    return x - pad, x + pad


def enumerate_points(group, box: Sequence[tuple]) -> list[Vector]:
    """All points of the group inside the closed axis-aligned box.

    Coefficient ranges are over-approximated with padded float bounds, then
    every candidate is filtered by exact comparisons.
    """
    b = group.basis
    d_rad = b.d
    lo = [QuadScalar(Fraction(x), 0, d_rad) if not isinstance(x, QuadScalar) else x for x, _ in box]
    hi = [QuadScalar(Fraction(y), 0, d_rad) if not isinstance(y, QuadScalar) else y for _, y in box]
    if len(lo) != b.rows:
        raise LatticeError("box dimension mismatch")
    # Coefficients: c = P v with P the exact pseudo-inverse; bound c over the box.
    gram = b.transpose() * b
    p = gram.inverse() * b.transpose()
    ranges = []
    for i in range(b.cols):
        lo_acc, hi_acc = 0.0, 0.0
        for j in range(b.rows):
            w_lo, w_hi = _float_interval(p[i, j])
            x_lo, x_hi = _float_interval(lo[j])
            y_lo, y_hi = _float_interval(hi[j])
            candidates = [w_lo * x_lo, w_lo * x_hi, w_lo * y_lo, w_lo * y_hi,
                          w_hi * x_lo, w_hi * x_hi, w_hi * y_lo, w_hi * y_hi]
            lo_acc += min(candidates)
            hi_acc += max(candidates)
        margin = 1e-9 * (1.0 + abs(lo_acc) + abs(hi_acc)) + 1e-9
        ranges.append((floor(lo_acc - margin), ceil(hi_acc + margin)))
    points: list[Vector] = []
    coeffs = [r[0] for r in ranges]

    def recurse(idx: int, current: list[int]) -> None:
        if idx == b.cols:
            pt = b.apply(current)
            if all(lo[j] <= pt[j] <= hi[j] for j in range(b.rows)):
                points.append(pt)
            return
        for c in range(ranges[idx][0], ranges[idx][1] + 1):
            recurse(idx + 1, current + [c])

    recurse(0, [])
    points.sort(key=lambda pt: tuple((v.a, v.b) for v in pt))
    return points


class ShiftDecomposer:
    """Solves L u + M v = t over integer coefficient vectors, many times.

    Splitting each coordinate equation into rational and sqrt(D) parts gives
    a fixed integer system; its Hermite form is precomputed so each query is
    a triangular solve plus divisibility checks.
    """

    def __init__(self, l: Lattice, m: Lattice) -> None:
        self.l = l
        self.m = m
        self.d = l.dim
        rows: list[list[Fraction]] = []
        for i in range(self.d):
            rows.append([l.basis[i, j].a for j in range(self.d)]
                        + [m.basis[i, j].a for j in range(self.d)])
            rows.append([l.basis[i, j].b for j in range(self.d)]
                        + [m.basis[i, j].b for j in range(self.d)])
        denom = 1
        for row in rows:
            for value in row:
                denom = denom * value.denominator // gcd(denom, value.denominator)
        self.denom = denom
        int_rows = [[int(v * denom) for v in row] for row in rows]
        self.h, self.u = hnf(int_rows)

    def __call__(self, vector: Sequence) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
        vec = [
            v if isinstance(v, QuadScalar) else QuadScalar(Fraction(v), 0, self.l.basis.d)
            for v in vector
        ]
        rhs: list[int] = []
        for v in vec:
            for part in (v.a, v.b):
                scaled = part * self.denom
                if scaled.denominator != 1:
                    return None
                rhs.append(int(scaled))
        n_rows, n_cols = len(self.h), len(self.h[0])
        y = [0] * n_cols
        residual = rhs
        col = 0
        for i in range(n_rows):
            if col < n_cols and self.h[i][col]:
                if residual[i] % self.h[i][col] != 0:
                    return None
                q = residual[i] // self.h[i][col]
                y[col] = q
                if q:
                    for ii in range(i, n_rows):
                        residual[ii] -= q * self.h[ii][col]
                col += 1
            elif residual[i] != 0:
                return None
        if any(residual):
            return None
        w = [sum(self.u[i][j] * y[j] for j in range(n_cols)) for i in range(n_cols)]
        return tuple(w[: self.d]), tuple(w[self.d:])


def decompose_in_sum(l: Lattice, m: Lattice, vector: Sequence) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Integer coefficients (u, v) with L u + M v = vector, or None."""
    return ShiftDecomposer(l, m)(vector)


def volume_via_snf(lattice: Lattice) -> int:
    """Cross-check: |det| of an integer lattice equals the product of its
    invariant factors."""
    s, _, _ = snf(lattice.basis.to_int_matrix())
    prod = 1
    for i in range(lattice.dim):
        prod *= s[i][i]
    return abs(prod)
