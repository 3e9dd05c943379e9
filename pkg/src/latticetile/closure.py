"""Closure of L + M as a closed subgroup of R^d, with a normalizing map.

The closed subgroups of R^d are, up to an invertible linear map, of the
form Z^m x R^n.  We find that map by computing the annihilator group
G* = {xi : xi . w in Z for all generators w}: its rank is m, and stacking a
basis of G* (transposed) over completion rows from the standard basis gives
a matrix T with T(closure) = Z^m x R^n.  Over Q(sqrt(D)) the integrality
condition splits into a rational congruence and an irrational homogeneous
part, both solvable exactly over Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .linalg import ExactMatrix, hnf, int_kernel
from .lattices import DiscreteGroup, Lattice, LatticeError, volume
from .scalars import QuadScalar

Vector = tuple[QuadScalar, ...]


class ClosureError(ValueError):
    pass


@dataclass(frozen=True)
class ClosureDecomposition:
    m: int
    n: int
    transform: ExactMatrix
    transform_inv: ExactMatrix
    dual_group: DiscreteGroup | None


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else max(a, b)


def dual_group_of_generators(generators: list[Vector], dim: int, radicand: int) -> DiscreteGroup | None:
    """G* = {xi : xi . w in Z for every generator w}; None when G* = {0}.

    The generators must span R^dim.  Parametrize xi = W0^(-T) n over the
    first dim independent generators W0; each remaining generator w with
    c = W0^(-1) w = c_a + sqrt(D) c_b imposes n . c_b = 0 and n . c_a in Z,
    which reduce to an integer kernel plus denominator congruences.
    """
    gens = [tuple(v for v in g) for g in generators]
    # Pick the first dim R-independent generators, in order.
    chosen: list[Vector] = []
    for g in gens:
        trial = chosen + [g]
        if ExactMatrix.from_columns(trial, radicand).rank() == len(trial):
            chosen.append(g)
        if len(chosen) == dim:
            break
    if len(chosen) < dim:
        raise ClosureError("generators do not span R^d")
    w0 = ExactMatrix.from_columns(chosen, radicand)
    w0_inv = w0.inverse()
    rest = [g for g in gens if g not in chosen]

    # Conditions on the integer parameter vector n.
    homogeneous: list[list[Fraction]] = []
    congruences: list[list[Fraction]] = []
    for w in rest:
        c = w0_inv.apply(w)
        c_a = [v.a for v in c]
        c_b = [v.b for v in c]
        if any(c_b):
            homogeneous.append(c_b)
        congruences.append(c_a)

    # Integer kernel of the homogeneous part.
    if homogeneous:
        denom = 1
        for row in homogeneous:
            for v in row:
                denom = _lcm(denom, v.denominator)
        int_rows = [[int(v * denom) for v in row] for row in homogeneous]
        kernel = int_kernel(int_rows)
    else:
        kernel = [[1 if i == j else 0 for i in range(dim)] for j in range(dim)]
    if not kernel:
        return None
    t = len(kernel)

    # Congruence part: rows of Q = A_a * K must take integer values on y.
    q_rows: list[list[Fraction]] = []
    for row in congruences:
        q_rows.append(
            [sum(Fraction(row[i]) * kernel[j][i] for i in range(dim)) for j in range(t)]
        )
    denom = 1
    for row in q_rows:
        for v in row:
            denom = _lcm(denom, v.denominator)
    if denom == 1 or not q_rows:
        y_basis = [[1 if i == j else 0 for i in range(t)] for j in range(t)]
    else:
        scaled = [[int(v * denom) for v in row] for row in q_rows]
        # {y : Q' y = 0 mod denom} via the kernel of [Q' | -denom I].
        s = len(scaled)
        padded = [scaled[i] + [-denom if j == i else 0 for j in range(s)] for i in range(s)]
        kern = int_kernel(padded)
        proj = [[col[i] for col in kern] for i in range(t)]
        h, _ = hnf(proj)
        y_basis = [
            [h[i][j] for i in range(t)]
            for j in range(t)
            if any(h[i][j] for i in range(t))
        ]
        if len(y_basis) != t:
            raise AssertionError("congruence solution lost rank")  # contains denom*Z^t

    # n = K y, canonicalized by Hermite form; then xi = W0^(-T) n.
    n_cols = [
        [sum(kernel[j][i] * y[j] for j in range(t)) for i in range(dim)] for y in y_basis
    ]
    n_matrix = [[col[i] for col in n_cols] for i in range(dim)]
    h, _ = hnf(n_matrix)
    basis_cols = [
        [h[i][j] for i in range(dim)] for j in range(t) if any(h[i][j] for i in range(dim))
    ]
    w0_inv_t = w0_inv.transpose()
    xi_cols = [w0_inv_t.apply(col) for col in basis_cols]
    return DiscreteGroup(ExactMatrix.from_columns(xi_cols, radicand))


def closure_of_sum(l: Lattice, m_lat: Lattice) -> ClosureDecomposition:
    """Normalize closure(L + M) to Z^m x R^n; requires equal volumes."""
    if l.dim != m_lat.dim:
        raise ClosureError("ambient dimension mismatch")
    if volume(l) != volume(m_lat):
        raise ClosureError(
            f"volume mismatch: vol(L) = {volume(l)}, vol(M) = {volume(m_lat)}"
        )
    d = l.dim
    radicand = l.basis.d or m_lat.basis.d
    generators = l.basis.columns() + m_lat.basis.columns()
    dual = dual_group_of_generators(generators, d, radicand)
    m = dual.rank if dual is not None else 0
    rows: list[list[QuadScalar]] = []
    if dual is not None:
        rows.extend([list(dual.basis.column(j)) for j in range(m)])
    # Complete with standard basis rows, greedily in index order.
    for i in range(d):
        if len(rows) == d:
            break
        zero = QuadScalar(0, 0, radicand)
        one = QuadScalar(1, 0, radicand)
        candidate = [one if j == i else zero for j in range(d)]
        trial = rows + [candidate]
        if ExactMatrix(trial, radicand).rank() == len(trial):
            rows.append(candidate)
    transform = ExactMatrix(rows, radicand)
    transform_inv = transform.inverse()
    # Postcondition: first m coordinates of T*generators are integers.
    for g in generators:
        image = transform.apply(g)
        for i in range(m):
            if not image[i].is_integer:
                raise AssertionError("normalization failed: non-integer discrete part")
    return ClosureDecomposition(m, d - m, transform, transform_inv, dual)


def apply_to_lattice(decomp_matrix: ExactMatrix, lattice: Lattice) -> Lattice:
    return Lattice(decomp_matrix * lattice.basis)


@dataclass
class DensityWitnessReport:
    epsilon: float
    radius_cap: int
    sample_count: int
    achieved_radius: int | None = None
    max_error: float = float("inf")
    errors_by_radius: dict = field(default_factory=dict)
    reached: bool = False


def density_witness(
    decomp: ClosureDecomposition,
    l: Lattice,
    m_lat: Lattice,
    epsilon: float = 1e-3,
    radius_cap: int = 64,
    sample_count: int = 1000,
) -> DensityWitnessReport:
    """Diagnostic: approximate sample points of Z^m x [0,1)^n by integer
    combinations of the normalized generators with coefficients in an
    expanding box.  Failure at the cap is reported, never asserted; the
    convergence rate is not bounded by any theory this package relies on.

    The M-side coefficients are enumerated over the box; the L-side is
    completed by exact rounding in L-coordinates (the optimal completion
    whenever its own coefficients stay inside the box, which holds at desk
    scale).
    """
    import numpy as np

    d = l.dim
    n = decomp.n
    tl = apply_to_lattice(decomp.transform, l)
    tm = apply_to_lattice(decomp.transform, m_lat)
    tl_f = np.array([[tl.basis[i, j].to_float(60) for j in range(d)] for i in range(d)])
    tm_f = np.array([[tm.basis[i, j].to_float(60) for j in range(d)] for i in range(d)])
    tl_inv = np.linalg.inv(tl_f)

    # Deterministic near-uniform sample of Z^m x [0,1)^n: integer parts zero,
    # fractional parts on a centered grid.
    from itertools import product

    per_axis = max(2, round(sample_count ** (1.0 / n))) if n else 1
    if n:
        grid = [
            [0.0] * (d - n) + [(k + 0.5) / per_axis for k in idx]
            for idx in product(range(per_axis), repeat=n)
        ]
    else:
        grid = [[0.0] * d]
    targets = np.array(grid)

    report = DensityWitnessReport(
        epsilon=epsilon, radius_cap=radius_cap, sample_count=len(targets)
    )
    radii: list[int] = []
    r = 1
    while r < radius_cap:
        radii.append(r)
        r *= 2
    radii.append(radius_cap)
    for radius in radii:
        coeffs = np.array(list(product(range(-radius, radius + 1), repeat=d)), dtype=float)
        pts = coeffs @ tm_f.T
        worst = 0.0
        for target in targets:
            resid = target[None, :] - pts
            c_l = np.round(resid @ tl_inv.T)
            inside = np.max(np.abs(c_l), axis=1) <= radius
            err_vec = np.linalg.norm(resid - c_l @ tl_f.T, axis=1)
            err = float(err_vec[inside].min()) if inside.any() else float("inf")
            worst = max(worst, err)
        report.errors_by_radius[radius] = worst
        report.max_error = worst
        if worst <= epsilon:
            report.reached = True
            report.achieved_radius = radius
            return report
    return report
