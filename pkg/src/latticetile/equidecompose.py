"""Dense-sum engine: cut-and-project scheme, window equidecomposition by
translations from L + M, and assembly of the common tile.

The two half-open basis parallelotopes have equal volume; when L + M is
dense, one can be partitioned into finitely many polytope pieces whose
shifted copies partition the other, with every shift an explicit sum
ell + em (ell in L, em in M).  The greedy loop enumerates candidate shifts
over expanding integer-coefficient boxes and successively removes the
intersection of (what remains of) the source window, shifted, with what
remains of the target window.  Both residuals shrink to exactly zero volume
on success; caps make failure explicit rather than non-terminating.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .closure import closure_of_sum
from .lattices import Lattice, ShiftDecomposer, enumerate_points, member, volume
from .linalg import ExactMatrix
from .regions import Cell, Region, parallelotope
from .scalars import QuadScalar

Vector = tuple[QuadScalar, ...]

DEFAULT_COEFF_RADIUS = 12
DEFAULT_MAX_PIECES = 4096


class SchemeError(ValueError):
    pass


class EquidecompositionIncomplete(RuntimeError):
    """Caps were hit with positive residual volume left."""

    def __init__(self, residual_volume: QuadScalar, pieces: list, radius: int):
        self.residual_volume = residual_volume
        self.pieces = pieces
        self.radius = radius
        super().__init__(
            f"equidecomposition incomplete at radius {radius}: "
            f"residual volume {residual_volume}"
        )


@dataclass(frozen=True)
class CutProjectScheme:
    """Lattice in R^d x R^d with K over [L | M]; K injective on Z^(2d)."""

    dim: int
    gamma: ExactMatrix
    k_block: ExactMatrix
    l: Lattice
    m: Lattice


@dataclass(frozen=True)
class PieceAssignment:
    piece: Cell
    ell: Vector
    em: Vector

    @property
    def shift(self) -> Vector:
        return tuple(a + b for a, b in zip(self.ell, self.em))


def build_scheme(l: Lattice, m: Lattice) -> CutProjectScheme:
    """Gamma = [[c*I, sqrt(D)*I], [L, M]] for the smallest c >= 1 making it
    non-singular; irrationality of sqrt(D) makes K injective on Z^(2d)."""
    d = l.dim
    radicand = l.basis.d or m.basis.d
    if radicand < 2:
        raise SchemeError("cut-and-project scheme needs an irrational radicand")
    root = QuadScalar(0, 1, radicand)
    zero = QuadScalar(0, 0, radicand)
    for c in range(1, 64):
        top = [
            [QuadScalar(c if i == j else 0, 0, radicand) for j in range(d)]
            + [root if i == j else zero for j in range(d)]
            for i in range(d)
        ]
        bottom = [
            list(l.basis.row(i)) + list(m.basis.row(i)) for i in range(d)
        ]
        gamma = ExactMatrix(top + bottom, radicand)
        if gamma.det():
            k_block = ExactMatrix(top, radicand)
            return CutProjectScheme(d, gamma, k_block, l, m)
    raise SchemeError("no small multiplier makes the scheme non-singular")


def model_set_points(
    scheme: CutProjectScheme, window: Region | Cell, radius
) -> list[Vector]:
    """p1(gamma) for lattice points with |p1| <= radius and p2 in the window
    (half-open membership, exact)."""
    win = window if isinstance(window, Region) else Region.from_cell(window)
    if win.is_empty:
        return []
    d = scheme.dim
    bbox = win.bounding_box()
    box = [(-radius, radius)] * d + [(lo, hi) for lo, hi in bbox]
    gamma_lat = Lattice(scheme.gamma)
    points = []
    r2 = QuadScalar(radius) * QuadScalar(radius)
    for pt in enumerate_points(gamma_lat, box):
        p1, p2 = pt[:d], pt[d:]
        norm2 = sum((v * v for v in p1), QuadScalar(0, 0, scheme.gamma.d))
        if norm2 <= r2 and win.contains(p2):
            points.append(p1)
    return points


@dataclass
class MatchingReport:
    ok: bool
    size: int = 0
    max_displacement: float = float("nan")
    pairs: tuple = ()
    message: str = ""


def bounded_distance_matching(a_points, b_points, window_box) -> MatchingReport:
    """Minimum-bottleneck perfect matching between the two point sets inside
    the window box (floats; diagnostic only)."""
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    def trim(points):
        out = []
        for p in points:
            coords = [float(v) if not isinstance(v, QuadScalar) else v.to_float(60) for v in p]
            if all(lo <= c <= hi for c, (lo, hi) in zip(coords, window_box)):
                out.append(coords)
        return np.array(sorted(out))

    a = trim(a_points)
    b = trim(b_points)
    if len(a) != len(b):
        return MatchingReport(
            ok=False, message=f"count mismatch after trimming: {len(a)} vs {len(b)}"
        )
    if len(a) == 0:
        return MatchingReport(ok=True, size=0, max_displacement=0.0)
    dists = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    thresholds = np.unique(dists)

    def feasible(threshold):
        graph = csr_matrix(dists <= threshold + 1e-12)
        match = maximum_bipartite_matching(graph, perm_type="column")
        return match if (match >= 0).all() else None

    lo, hi = 0, len(thresholds) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        match = feasible(thresholds[mid])
        if match is not None:
            best = (thresholds[mid], match)
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None  # the full graph is always feasible
    threshold, match = best
    pairs = tuple((int(i), int(match[i])) for i in range(len(a)))
    actual = max(float(dists[i, j]) for i, j in pairs)
    return MatchingReport(ok=True, size=len(a), max_displacement=actual, pairs=pairs)


def _shell_tuples(dim: int, rho: int):
    """Coefficient pairs (u, v) on the max-norm-rho shell, lexicographic."""
    shell = []
    for uv in product(range(-rho, rho + 1), repeat=2 * dim):
        if max(abs(x) for x in uv) == rho:
            shell.append(uv)
    shell.sort()
    for uv in shell:
        yield uv[:dim], uv[dim:]


class _Carver:
    """Shared state of one window equidecomposition run."""

    def __init__(self, window_l: Cell, window_m: Cell, l: Lattice, m: Lattice,
                 max_pieces: int):
        self.l = l
        self.m = m
        self.d = l.dim
        self.max_pieces = max_pieces
        self.source = Region.from_cell(window_l)
        self.target = Region.from_cell(window_m)
        self.assignments: list[PieceAssignment] = []
        self.decomposer = ShiftDecomposer(l, m)
        self.l_float = [[l.basis[i, j].to_float(60) for j in range(self.d)]
                        for i in range(self.d)]
        self.m_float = [[m.basis[i, j].to_float(60) for j in range(self.d)]
                        for i in range(self.d)]
        self._refresh_boxes()

    def _refresh_boxes(self):
        if not self.source.is_empty:
            self.source_box = [
                (lo.to_float(60), hi.to_float(60)) for lo, hi in self.source.bounding_box()
            ]
        if not self.target.is_empty:
            self.target_box = [
                (lo.to_float(60), hi.to_float(60)) for lo, hi in self.target.bounding_box()
            ]

    @property
    def done(self) -> bool:
        return self.source.is_empty

    def shift_box_misses(self, shift_float) -> bool:
        pad = 1e-7
        return any(
            self.target_box[j][1] - shift_float[j] < self.source_box[j][0] - pad
            or self.source_box[j][1] + pad < self.target_box[j][0] - shift_float[j]
            for j in range(self.d)
        )

    def carve(self, ell, em) -> bool:
        """Remove source ∩ (target - shift) from both residuals; True if any."""
        shift = tuple(a + b for a, b in zip(ell, em))
        shifted_target = self.target.translated(tuple(-x for x in shift))
        carved = self.source.intersect(shifted_target)
        if carved.is_empty:
            return False
        self.source = self.source.subtract(carved)
        self.target = self.target.subtract(carved.translated(shift))
        self._refresh_boxes()
        for cell in carved.cells:
            self.assignments.append(PieceAssignment(cell, ell, em))
        return True

    def check_cap(self, rho: int):
        if len(self.assignments) > self.max_pieces:
            raise EquidecompositionIncomplete(
                self.source.volume(), self.assignments, rho
            )

    def greedy_shell(self, rho: int):
        """Spec enumeration: one expanding max-norm coefficient shell."""
        for u, v in _shell_tuples(self.d, rho):
            if self.done:
                return
            shift_f = [
                sum(self.l_float[i][j] * u[j] + self.m_float[i][j] * v[j]
                    for j in range(self.d))
                for i in range(self.d)
            ]
            if self.shift_box_misses(shift_f):
                continue
            ell = self.l.basis.apply(list(u))
            em = self.m.basis.apply(list(v))
            self.carve(ell, em)
            self.check_cap(rho)

    def snap_pass(self, rho: int, tried: set) -> bool:
        """Vertex-aligned closure: try every shift that brings a residual
        target vertex flush onto a residual source vertex and decomposes
        exactly as ell + em.  Closes the convergent-tail slivers that pure
        radius order keeps chasing."""
        candidates = []
        for sc in self.source.cells:
            for tc in self.target.cells:
                for pv in sc.vertices():
                    for qv in tc.vertices():
                        shift = tuple(b - a for a, b in zip(pv, qv))
                        key = tuple((x.a, x.b) for x in shift)
                        if key in tried:
                            continue
                        tried.add(key)
                        dec = self.decomposer(shift)
                        if dec is not None:
                            candidates.append(dec)
        progress = False
        for u, v in candidates:
            if self.done:
                break
            ell = self.l.basis.apply(list(u))
            em = self.m.basis.apply(list(v))
            if self.carve(ell, em):
                self.check_cap(rho)
                progress = True
        return progress

    def snap_rounds(self, rho: int, tried: set):
        while not self.done and self.snap_pass(rho, tried):
            pass


def equidecompose_windows(
    window_l: Cell,
    window_m: Cell,
    l: Lattice,
    m: Lattice,
    max_coeff_radius: int = DEFAULT_COEFF_RADIUS,
    max_pieces: int = DEFAULT_MAX_PIECES,
) -> list[PieceAssignment]:
    """Partition window_l into cells whose (ell + em)-translates partition
    window_m, both exactly (zero residual volume) thanks to the half-open
    convention.

    Candidate shifts are enumerated over expanding max-norm coefficient
    boxes (lexicographic within a shell); after each shell, vertex-aligned
    shifts with exact ell + em decompositions close the residual slivers
    that pure radius order provably keeps chasing.  Raises
    EquidecompositionIncomplete when caps are hit with residual left."""
    if window_l.volume() != window_m.volume():
        raise SchemeError("windows must have equal volume")
    carver = _Carver(window_l, window_m, l, m, max_pieces)
    tried: set = set()
    for rho in range(max_coeff_radius + 1):
        if carver.done:
            break
        before = len(carver.assignments)
        carver.greedy_shell(rho)
        # Snap only once plain radius order stalls; earlier snapping carves
        # far-flung slivers and fragments the bulk.
        if not carver.done and len(carver.assignments) == before and rho > 0:
            carver.snap_rounds(rho, tried)
    if not carver.done or not carver.target.is_empty:
        raise EquidecompositionIncomplete(
            carver.source.volume(), carver.assignments, max_coeff_radius
        )
    return carver.assignments


def window_of(lattice: Lattice) -> Cell:
    """Half-open basis parallelotope anchored at the origin."""
    return parallelotope(
        [list(col) for col in lattice.basis.columns()], None, lattice.basis.d
    )


def dense_common_domain(
    l: Lattice,
    m: Lattice,
    max_coeff_radius: int = DEFAULT_COEFF_RADIUS,
    max_pieces: int = DEFAULT_MAX_PIECES,
    _skip_density_check: bool = False,
) -> tuple[Region, list[PieceAssignment]]:
    """Bounded common fundamental domain E = union(S_i + ell_i) for a pair
    with dense sum; the pieces partition the L-window and their shifts the
    M-window."""
    if volume(l) != volume(m):
        raise SchemeError("lattices must have equal volume")
    if not _skip_density_check:
        dec = closure_of_sum(l, m)
        if dec.m != 0:
            raise SchemeError("sum of lattices is not dense")
    assignments = equidecompose_windows(
        window_of(l), window_of(m), l, m, max_coeff_radius, max_pieces
    )
    cells = []
    for assign in assignments:
        cells.append(assign.piece.translated(assign.ell))
    region = Region(l.dim, cells)
    # Certify the shift decompositions.
    for assign in assignments:
        if member(l, assign.ell) is None or member(m, assign.em) is None:
            raise AssertionError("shift decomposition lost certification")
    return region, assignments
