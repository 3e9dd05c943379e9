"""Exact half-open polytope arithmetic.

A :class:`Cell` is a finite conjunction of half-space conditions
``normal . x < offset`` (strict) or ``<= offset``; a :class:`Region` is a
finite union of cells with pairwise disjoint interiors.  All predicates are
exact; measure computations ignore strictness (tilings hold almost
everywhere anyway).  Cells created as parallelotopes remember their anchor
and spanning matrix, which gives closed-form volumes in any dimension; the
general vertex-enumeration path is capped at ambient dimension 3.

Degenerate (lower-dimensional) cells arising from subtraction are dropped
eagerly; emptiness of interiors is decided by exact Fourier-Motzkin
elimination on the all-strict system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence

from .linalg import ExactMatrix
from .scalars import QuadScalar

Vector = tuple[QuadScalar, ...]


class RegionError(ValueError):
    pass


class UnboundedRegionError(RegionError):
    pass


class DimensionCapError(RegionError):
    pass


def _scalar(v, d: int = 0) -> QuadScalar:
    return v if isinstance(v, QuadScalar) else QuadScalar(Fraction(v), 0, d)


def _vec(values, d: int = 0) -> Vector:
    return tuple(_scalar(v, d) for v in values)


def _dot(x: Sequence[QuadScalar], y: Sequence[QuadScalar]) -> QuadScalar:
    total = None
    for a, b in zip(x, y):
        term = a * b
        total = term if total is None else total + term
    return total if total is not None else QuadScalar(0)


@dataclass(frozen=True)
class HalfspaceCondition:
    normal: Vector
    offset: QuadScalar
    strict: bool

    def __post_init__(self):
        if not any(v for v in self.normal):
            raise RegionError("half-space normal must be nonzero")

    def holds(self, point: Sequence[QuadScalar]) -> bool:
        lhs = _dot(self.normal, point)
        return lhs < self.offset if self.strict else lhs <= self.offset

    def holds_closed(self, point: Sequence[QuadScalar]) -> bool:
        return _dot(self.normal, point) <= self.offset

    def negated(self) -> "HalfspaceCondition":
        # not(n.x < o) is n.x >= o; not(n.x <= o) is n.x > o.
        return HalfspaceCondition(
            tuple(-v for v in self.normal), -self.offset, not self.strict
        )

    def translated(self, t: Sequence[QuadScalar]) -> "HalfspaceCondition":
        return HalfspaceCondition(self.normal, self.offset + _dot(self.normal, t), self.strict)

    def normalized(self) -> "HalfspaceCondition":
        lead = next(v for v in self.normal if v)
        scale = abs(lead)
        return HalfspaceCondition(
            tuple(v / scale for v in self.normal), self.offset / scale, self.strict
        )


def condition(normal, offset, strict, d: int = 0) -> HalfspaceCondition:
    return HalfspaceCondition(_vec(normal, d), _scalar(offset, d), strict)


@dataclass(frozen=True)
class Parallelotope:
    """Provenance record: cell = anchor + basis * [0,1)^k (full-dimensional)."""

    anchor: Vector
    basis: ExactMatrix


class Cell:
    """Half-open convex cell; immutable with cached geometry."""

    __slots__ = ("dim", "conditions", "para", "_cache")

    def __init__(
        self,
        dim: int,
        conditions: Iterable[HalfspaceCondition] = (),
        para: Optional[Parallelotope] = None,
    ) -> None:
        self.dim = dim
        self.conditions = tuple(conditions)
        for c in self.conditions:
            if len(c.normal) != dim:
                raise RegionError("condition dimension mismatch")
        self.para = para
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"Cell(dim={self.dim}, conditions={len(self.conditions)})"

    def contains(self, point: Sequence) -> bool:
        pt = _vec(point)
        return all(c.holds(pt) for c in self.conditions)

    def translated(self, t: Sequence) -> "Cell":
        tv = _vec(t)
        para = None
        if self.para is not None:
            para = Parallelotope(
                tuple(a + b for a, b in zip(self.para.anchor, tv)), self.para.basis
            )
        out = Cell(self.dim, (c.translated(tv) for c in self.conditions), para)
        # Geometry caches transport exactly under translation.
        for key in ("empty", "bounded", "volume"):
            if key in self._cache:
                out._cache[key] = self._cache[key]
        if "vertices" in self._cache:
            out._cache["vertices"] = sorted(
                (tuple(a + b for a, b in zip(v, tv)) for v in self._cache["vertices"]),
                key=_vertex_key,
            )
        return out

    def linear_image(self, a: ExactMatrix, a_inv: ExactMatrix) -> "Cell":
        """The image {A x : x in cell}; conditions pick up A^(-T) normals."""
        a_inv_t = a_inv.transpose()
        conds = [
            HalfspaceCondition(a_inv_t.apply(c.normal), c.offset, c.strict)
            for c in self.conditions
        ]
        para = None
        if self.para is not None:
            para = Parallelotope(a.apply(self.para.anchor), a * self.para.basis)
        out = Cell(self.dim, conds, para)
        for key in ("empty", "bounded"):
            if key in self._cache:
                out._cache[key] = self._cache[key]
        if "vertices" in self._cache:
            out._cache["vertices"] = sorted(
                (a.apply(v) for v in self._cache["vertices"]), key=_vertex_key
            )
        return out

    def reduced_conditions(self) -> tuple[HalfspaceCondition, ...]:
        """Scale-normalized conditions with duplicates merged to the binding one."""
        if "reduced" in self._cache:
            return self._cache["reduced"]
        best: dict[Vector, tuple[QuadScalar, bool]] = {}
        order: list[Vector] = []
        for c in self.conditions:
            n = c.normalized()
            key = n.normal
            if key not in best:
                best[key] = (n.offset, n.strict)
                order.append(key)
            else:
                o, s = best[key]
                if n.offset < o or (n.offset == o and n.strict and not s):
                    best[key] = (n.offset, n.strict)
        out = tuple(HalfspaceCondition(k, best[k][0], best[k][1]) for k in order)
        self._cache["reduced"] = out
        return out

    # -- exact predicates ---------------------------------------------------

    def is_empty_interior(self) -> bool:
        if "empty" not in self._cache:
            strict_all = [
                (c.normal, c.offset, True) for c in self.reduced_conditions()
            ]
            self._cache["empty"] = not _fm_feasible(strict_all, self.dim)
        return self._cache["empty"]

    def is_bounded(self) -> bool:
        if "bounded" not in self._cache:
            self._cache["bounded"] = self._check_bounded()
        return self._cache["bounded"]

    def _check_bounded(self) -> bool:
        if self.para is not None:
            return True
        cone = [(c.normal, QuadScalar(0), False) for c in self.reduced_conditions()]
        zero = QuadScalar(0)
        one = QuadScalar(1)
        for j in range(self.dim):
            for sign in (1, -1):
                ray = tuple(
                    (one if sign > 0 else -one) if i == j else zero for i in range(self.dim)
                )
                # feasible {n.r <= 0, sign*r_j >= 1} means a recession ray exists
                probe = cone + [(tuple(-v for v in ray), QuadScalar(-1), False)]
                if _fm_feasible(probe, self.dim):
                    return False
        return True

    def vertices(self) -> list[Vector]:
        """Vertices of the closure, by exact enumeration of tight subsets."""
        if "vertices" in self._cache:
            return self._cache["vertices"]
        if self.para is not None:
            verts = _parallelotope_corners(self.para)
            self._cache["vertices"] = verts
            return verts
        if self.dim == 0:
            self._cache["vertices"] = [()]
            return [()]
        if not self.is_bounded():
            raise UnboundedRegionError("cell is unbounded")
        conds = self.reduced_conditions()
        if len(conds) < self.dim:
            raise UnboundedRegionError("cell is unbounded (too few conditions)")
        verts: list[Vector] = []
        seen = set()
        from itertools import combinations

        for subset in combinations(range(len(conds)), self.dim):
            m = ExactMatrix([list(conds[i].normal) for i in subset], _first_d(conds))
            if m.rank() < self.dim:
                continue
            sol = m.solve([conds[i].offset for i in subset])
            if sol is None:
                continue
            if sol in seen:
                continue
            if all(c.holds_closed(sol) for c in conds):
                seen.add(sol)
                verts.append(sol)
        verts.sort(key=_vertex_key)
        self._cache["vertices"] = verts
        return verts

    def volume(self) -> QuadScalar:
        if "volume" in self._cache:
            return self._cache["volume"]
        vol = self._compute_volume()
        self._cache["volume"] = vol
        return vol

    def _compute_volume(self) -> QuadScalar:
        if self.para is not None:
            return abs(self.para.basis.det())
        if self.dim == 0:
            return QuadScalar(1)
        try:
            axis = self._axis_intervals()
        except UnboundedRegionError:
            if self.is_empty_interior():
                return QuadScalar(0)
            raise
        if axis is not None:
            vol = QuadScalar(1)
            for lo, hi in axis:
                width = hi - lo
                if width.sign() <= 0:
                    return QuadScalar(0)
                vol = vol * width
            return vol
        if self.is_empty_interior():
            return QuadScalar(0)
        if self.dim > 3:
            raise DimensionCapError("general cell volume is capped at dimension 3")
        simplices = self.triangulate()
        total = QuadScalar(0)
        factorial = {1: 1, 2: 2, 3: 6}[self.dim]
        for simplex in simplices:
            base = simplex[0]
            edges = [
                [v[i] - base[i] for i in range(self.dim)] for v in simplex[1:]
            ]
            det = ExactMatrix(edges, _first_d(self.reduced_conditions())).det()
            total = total + abs(det) / factorial
        return total

    def _axis_intervals(self) -> Optional[list[tuple[QuadScalar, QuadScalar]]]:
        """Interval form when every condition is axis-aligned; None otherwise."""
        lows = [None] * self.dim
        highs = [None] * self.dim
        for c in self.reduced_conditions():
            support = [j for j, v in enumerate(c.normal) if v]
            if len(support) != 1:
                return None
            j = support[0]
            coeff = c.normal[j]
            bound = c.offset / coeff
            if coeff.sign() > 0:
                if highs[j] is None or bound < highs[j]:
                    highs[j] = bound
            else:
                if lows[j] is None or bound > lows[j]:
                    lows[j] = bound
        if any(v is None for v in lows) or any(v is None for v in highs):
            raise UnboundedRegionError("axis cell is unbounded")
        return list(zip(lows, highs))

    def triangulate(self) -> list[tuple[Vector, ...]]:
        """Simplices (vertex tuples) partitioning the closure; dim <= 3."""
        if self.dim > 3:
            raise DimensionCapError("triangulation is capped at dimension 3")
        if self.dim == 0:
            return [((),)]
        if self.is_empty_interior():
            return []
        verts = self.vertices()
        if self.dim == 1:
            xs = sorted(verts, key=_vertex_key)
            if len(xs) < 2 or xs[0][0] == xs[-1][0]:
                return []
            return [(xs[0], xs[-1])]
        if self.dim == 2:
            ordered = _sort_polygon(verts)
            return _fan(ordered)
        return self._triangulate_3d(verts)

    def _triangulate_3d(self, verts: list[Vector]) -> list[tuple[Vector, ...]]:
        conds = self.reduced_conditions()
        base = min(verts, key=_vertex_key)
        simplices: list[tuple[Vector, ...]] = []
        seen_facets: set[frozenset] = set()
        for c in conds:
            tight = [v for v in verts if _dot(c.normal, v) == c.offset]
            if len(tight) < 3:
                continue
            key = frozenset(tight)
            if key in seen_facets:
                continue
            seen_facets.add(key)
            if base in tight:
                continue
            drop = next(j for j, v in enumerate(c.normal) if v)
            flat = [tuple(v[j] for j in range(3) if j != drop) for v in tight]
            order = _sort_polygon_indices(flat)
            ordered = [tight[i] for i in order]
            for a, b in zip(ordered[1:], ordered[2:]):
                tet = (base, ordered[0], a, b)
                edges = [[v[i] - base[i] for i in range(3)] for v in tet[1:]]
                if ExactMatrix(edges, _first_d(conds)).det():
                    simplices.append(tet)
        return simplices

    def bounding_box(self) -> list[tuple[QuadScalar, QuadScalar]]:
        verts = self.vertices()
        if not verts:
            raise RegionError("empty cell has no bounding box")
        return [
            (min(v[j] for v in verts), max(v[j] for v in verts))
            for j in range(self.dim)
        ]


def _first_d(conds) -> int:
    for c in conds:
        for v in c.normal:
            if v.d:
                return v.d
        if isinstance(c.offset, QuadScalar) and c.offset.d:
            return c.offset.d
    return 0


def _vertex_key(v: Vector):
    return tuple((x.a, x.b) for x in v)


def _parallelotope_corners(para: Parallelotope) -> list[Vector]:
    k = para.basis.cols
    corners = []
    for mask in range(1 << k):
        eps = [(mask >> j) & 1 for j in range(k)]
        offset = para.basis.apply(eps)
        corners.append(tuple(a + o for a, o in zip(para.anchor, offset)))
    corners.sort(key=_vertex_key)
    return corners


def _sort_polygon_indices(points: list[tuple[QuadScalar, QuadScalar]]) -> list[int]:
    """Indices of 2D points in convex-traversal order (exact angular sort
    around the lowest vertex, ties by distance)."""
    lowest = min(range(len(points)), key=lambda i: (points[i][1].a, points[i][1].b,
                                                    points[i][0].a, points[i][0].b))
    origin = points[lowest]
    rest = [i for i in range(len(points)) if i != lowest]

    def cmp(i: int, j: int) -> int:
        pi = (points[i][0] - origin[0], points[i][1] - origin[1])
        pj = (points[j][0] - origin[0], points[j][1] - origin[1])
        cross = pi[0] * pj[1] - pi[1] * pj[0]
        s = cross.sign()
        if s > 0:
            return -1
        if s < 0:
            return 1
        # Collinear: closer point first.
        di = pi[0] * pi[0] + pi[1] * pi[1]
        dj = pj[0] * pj[0] + pj[1] * pj[1]
        return (di - dj).sign()

    rest.sort(key=cmp_to_key(cmp))
    return [lowest] + rest


def _sort_polygon(verts: list[Vector]) -> list[Vector]:
    order = _sort_polygon_indices([(v[0], v[1]) for v in verts])
    return [verts[i] for i in order]


def _fan(ordered: list[Vector]) -> list[tuple[Vector, ...]]:
    if len(ordered) < 3:
        return []
    out = []
    base = ordered[0]
    for a, b in zip(ordered[1:], ordered[2:]):
        cross = (a[0] - base[0]) * (b[1] - base[1]) - (a[1] - base[1]) * (b[0] - base[0])
        if cross:
            out.append((base, a, b))
    return out


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility over exact scalars.
# ---------------------------------------------------------------------------


def _fm_feasible(conditions, dim: int) -> bool:
    """Feasibility over R^dim of a system of (normal, offset, strict) triples,
    where strict means 'normal . x < offset'."""

    def dedupe(conds):
        out = {}
        for n, o, s in conds:
            lead = next((v for v in n if v), None)
            if lead is None:
                # Constant condition: 0 <(=) o.
                if (s and o.sign() <= 0) or (not s and o.sign() < 0):
                    return None
                continue
            scale = abs(lead)
            key = tuple(v / scale for v in n)
            val = (o / scale, s)
            if key not in out:
                out[key] = val
            else:
                oo, ss = out[key]
                if val[0] < oo or (val[0] == oo and val[1] and not ss):
                    out[key] = val
        return [(k, v[0], v[1]) for k, v in out.items()]

    conds = dedupe(list(conditions))
    if conds is None:
        return False
    for var in range(dim):
        pos, neg, rest = [], [], []
        for n, o, s in conds:
            c = n[var]
            sg = c.sign()
            if sg > 0:
                pos.append((n, o, s))
            elif sg < 0:
                neg.append((n, o, s))
            else:
                rest.append((n, o, s))
        new = list(rest)
        for np_, op_, sp in pos:
            cp = np_[var]
            for nn, on, sn in neg:
                cn = nn[var]
                normal = tuple(
                    -cn * np_[j] + cp * nn[j] for j in range(dim)
                )
                offset = -cn * op_ + cp * on
                new.append((normal, offset, sp or sn))
        conds = dedupe(new)
        if conds is None:
            return False
    return True


# ---------------------------------------------------------------------------
# Constructors and Region.
# ---------------------------------------------------------------------------


def parallelotope(columns: Sequence[Sequence], anchor: Optional[Sequence] = None,
                  d: int = 0) -> Cell:
    """Half-open parallelotope anchor + {sum t_k v_k : 0 <= t_k < 1}."""
    basis = ExactMatrix.from_columns(columns, d)
    if basis.rows != basis.cols or not basis.det():
        raise RegionError("parallelotope spanning vectors must be independent")
    n = basis.rows
    if anchor is None:
        anchor = [0] * n
    anchor_v = _vec(anchor, basis.d)
    inv = basis.inverse()
    conds = []
    one = QuadScalar(1, 0, basis.d)
    for k in range(n):
        g = inv.row(k)
        g_dot_a = _dot(g, anchor_v)
        conds.append(HalfspaceCondition(tuple(-v for v in g), -g_dot_a, False))
        conds.append(HalfspaceCondition(g, g_dot_a + one, True))
    return Cell(n, conds, Parallelotope(anchor_v, basis))


def box_cell(bounds: Sequence[tuple], d: int = 0) -> Cell:
    """Half-open axis box [lo_1, hi_1) x ... x [lo_n, hi_n)."""
    lo = [_scalar(x, d) for x, _ in bounds]
    hi = [_scalar(y, d) for _, y in bounds]
    columns = [
        [hi[i] - lo[i] if i == j else QuadScalar(0, 0, d) for i in range(len(bounds))]
        for j in range(len(bounds))
    ]
    return parallelotope(columns, lo, d)


def _known_bounded(c: Cell) -> bool:
    return c.para is not None or c._cache.get("bounded") is True


def cell_intersection(c1: Cell, c2: Cell) -> Cell:
    if c1.dim != c2.dim:
        raise RegionError("dimension mismatch in intersection")
    out = Cell(c1.dim, c1.conditions + c2.conditions)
    if _known_bounded(c1) or _known_bounded(c2):
        out._cache["bounded"] = True
    return out


def cell_subtract(c: Cell, d: Cell) -> list[Cell]:
    """c minus d as disjoint cells, clipping against each condition in turn.

    A disjoint subtrahend returns c unchanged (no fragmentation)."""
    if c.dim != d.dim:
        raise RegionError("dimension mismatch in subtraction")
    if cell_intersection(c, d).is_empty_interior():
        return [c]
    bounded = _known_bounded(c)
    pieces: list[Cell] = []
    prefix: list[HalfspaceCondition] = []
    for cond in d.reduced_conditions():
        piece = Cell(c.dim, c.conditions + tuple(prefix) + (cond.negated(),))
        if bounded:
            piece._cache["bounded"] = True
        if not piece.is_empty_interior():
            pieces.append(piece)
        prefix.append(cond)
    return pieces


class Region:
    """Finite union of interior-disjoint cells."""

    __slots__ = ("dim", "cells")

    def __init__(self, dim: int, cells: Iterable[Cell] = ()) -> None:
        self.dim = dim
        kept = []
        for c in cells:
            if c.dim != dim:
                raise RegionError("cell dimension mismatch")
            if not c.is_empty_interior():
                kept.append(c)
        self.cells = tuple(kept)

    @classmethod
    def from_cell(cls, cell: Cell) -> "Region":
        return cls(cell.dim, [cell])

    @classmethod
    def empty(cls, dim: int) -> "Region":
        return cls(dim, [])

    def __repr__(self) -> str:
        return f"Region(dim={self.dim}, cells={len(self.cells)})"

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def contains(self, point: Sequence) -> bool:
        return any(c.contains(point) for c in self.cells)

    def translated(self, t: Sequence) -> "Region":
        return Region(self.dim, [c.translated(t) for c in self.cells])

    def linear_image(self, a: ExactMatrix, a_inv: Optional[ExactMatrix] = None) -> "Region":
        inv = a_inv if a_inv is not None else a.inverse()
        return Region(self.dim, [c.linear_image(a, inv) for c in self.cells])

    def intersect(self, other: "Region") -> "Region":
        if self.dim != other.dim:
            raise RegionError("dimension mismatch")
        out = []
        for c1 in self.cells:
            box1 = _try_box(c1)
            for c2 in other.cells:
                if box1 is not None:
                    box2 = _try_box(c2)
                    if box2 is not None and _boxes_disjoint(box1, box2):
                        continue
                cell = cell_intersection(c1, c2)
                if not cell.is_empty_interior():
                    out.append(cell)
        return Region(self.dim, out)

    def subtract(self, other: "Region") -> "Region":
        if self.dim != other.dim:
            raise RegionError("dimension mismatch")
        pieces = list(self.cells)
        for d in other.cells:
            box_d = _try_box(d)
            next_pieces: list[Cell] = []
            for p in pieces:
                if box_d is not None:
                    box_p = _try_box(p)
                    if box_p is not None and _boxes_disjoint(box_p, box_d):
                        next_pieces.append(p)
                        continue
                next_pieces.extend(cell_subtract(p, d))
            pieces = next_pieces
        return Region(self.dim, pieces)

    def volume(self) -> QuadScalar:
        total = QuadScalar(0)
        for c in self.cells:
            total = total + c.volume()
        return total

    def bounding_box(self) -> list[tuple[QuadScalar, QuadScalar]]:
        if not self.cells:
            raise RegionError("empty region has no bounding box")
        boxes = [c.bounding_box() for c in self.cells]
        return [
            (min(b[j][0] for b in boxes), max(b[j][1] for b in boxes))
            for j in range(self.dim)
        ]

    def pairwise_interior_disjoint(self) -> bool:
        for i in range(len(self.cells)):
            for j in range(i + 1, len(self.cells)):
                if not cell_intersection(self.cells[i], self.cells[j]).is_empty_interior():
                    return False
        return True


def _try_box(cell: Cell):
    try:
        return cell.bounding_box()
    except (RegionError, DimensionCapError):
        return None


def _boxes_disjoint(b1, b2) -> bool:
    return any(b1[j][1] < b2[j][0] or b2[j][1] < b1[j][0] for j in range(len(b1)))
