"""Common coset representatives for two equal-index sublattices of Z^k.

Given G1, G2 of the same finite index, a single finite set can represent
every coset of both at once.  The construction quotients by G1 ∩ G2, pairs
the (now trivially-intersecting) images by enumeration order, and adds
representatives of G1 + G2 in Z^k.  Quotients are handled through Smith
coordinates; lifts take the minimal non-negative box representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .linalg import ExactMatrix, int_det, snf, solve_integer
from .lattices import DiscreteGroup, Lattice, LatticeError, group_sum_and_intersection, member

IntVector = tuple[int, ...]


class TransversalError(ValueError):
    pass


def _int_matrix(group) -> list[list[int]]:
    basis = group.basis if hasattr(group, "basis") else group
    if not basis.is_integer():
        raise TransversalError("expected an integer lattice")
    return basis.to_int_matrix()


def _coords_in(super_basis: ExactMatrix, vectors) -> list[list[int]]:
    out = []
    for v in vectors:
        sol = super_basis.solve(v)
        if sol is None or not all(c.is_integer for c in sol):
            raise TransversalError("vector outside the super-lattice")
        out.append([int(c.a) for c in sol])
    return out


class _Quotient:
    """Z^k-lattice quotient super/sub in Smith coordinates."""

    def __init__(self, super_lat: Lattice, sub_lat: Lattice) -> None:
        self.super_basis = super_lat.basis
        coords = _coords_in(self.super_basis, sub_lat.basis.columns())
        k = self.super_basis.rows
        c = [[coords[j][i] for j in range(len(coords))] for i in range(k)]
        s, u, v = snf(c)
        self.diag = [s[i][i] for i in range(k)]
        if any(x == 0 for x in self.diag):
            raise TransversalError("infinite index")
        self.u = u
        self.u_inv = ExactMatrix(u, 0).inverse()
        self.order = 1
        for x in self.diag:
            self.order *= x

    def project(self, vector) -> IntVector:
        """Smith-box coordinates of an ambient vector (must lie in super)."""
        coords = _coords_in(self.super_basis, [vector])[0]
        k = len(coords)
        mixed = [sum(self.u[i][j] * coords[j] for j in range(k)) for i in range(k)]
        return tuple(mixed[i] % self.diag[i] for i in range(k))

    def add(self, x: IntVector, y: IntVector) -> IntVector:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.diag))

    def lift(self, x: IntVector):
        """Ambient representative with minimal non-negative box coordinates."""
        k = len(x)
        coords = [
            int(sum(self.u_inv[i, j].a * x[j] for j in range(k))) for i in range(k)
        ]
        return self.super_basis.apply(coords)

    def subgroup_elements(self, generators) -> list[IntVector]:
        """All elements of the subgroup generated by images of the generators."""
        gens = [self.project(g) for g in generators]
        zero = tuple(0 for _ in self.diag)
        seen = {zero}
        frontier = [zero]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = self.add(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return sorted(seen)


def coset_reps(sub: Lattice, super_lat: Lattice) -> list:
    """Exactly [super : sub] coset representatives, from the Smith box."""
    quotient = _Quotient(super_lat, sub)
    reps = []
    for box in product(*(range(d) for d in quotient.diag)):
        reps.append(quotient.lift(box))
    return reps


@dataclass(frozen=True)
class NonMembershipCertificate:
    """Witness that (rep_i - rep_j) is outside a group: its exact coordinate
    vector in the group basis, at least one entry non-integer."""

    i: int
    j: int
    group: str
    coordinates: tuple[str, ...]


@dataclass(frozen=True)
class TransversalResult:
    reps: tuple
    size: int
    certificates: tuple[NonMembershipCertificate, ...]


def common_transversal(g1: Lattice, g2: Lattice) -> TransversalResult:
    """A set simultaneously a transversal of G1 and of G2 in Z^k (Lemma-style
    construction: quotient by G1 ∩ G2, pair enumerations, add sum-cosets)."""
    k = g1.dim
    if g2.dim != k:
        raise TransversalError("ambient dimension mismatch")
    b1 = _int_matrix(g1)
    b2 = _int_matrix(g2)
    idx1, idx2 = abs(int_det(b1)), abs(int_det(b2))
    if idx1 != idx2:
        raise TransversalError(f"unequal indices {idx1} and {idx2}")
    ambient = Lattice.standard(k)
    si = group_sum_and_intersection(g1, g2)
    s = si.index_sum_in_ambient
    r = idx1 // s

    quotient = _Quotient(si.sum_group, si.intersection)
    gamma1 = quotient.subgroup_elements(g1.basis.columns())
    gamma2 = quotient.subgroup_elements(g2.basis.columns())
    if len(gamma1) != r or len(gamma2) != r:
        raise AssertionError("quotient images have unexpected order")
    # Case-1 reduction: the images must intersect trivially.
    common = set(gamma1) & set(gamma2)
    if common != {tuple(0 for _ in quotient.diag)}:
        raise AssertionError("quotient images intersect non-trivially")

    inner = [
        tuple(a + b for a, b in zip(quotient.lift(x), quotient.lift(y)))
        for x, y in zip(gamma1, gamma2)
    ]
    outer = coset_reps(si.sum_group, ambient)
    reps = []
    for o in outer:
        for f in inner:
            reps.append(tuple(a + b for a, b in zip(f, o)))

    certificates = []
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            diff = tuple(a - b for a, b in zip(reps[i], reps[j]))
            for name, g in (("G1", g1), ("G2", g2)):
                coords = g.basis.solve(diff)
                if coords is None or all(c.is_integer for c in coords):
                    raise AssertionError("representatives collide modulo " + name)
                certificates.append(
                    NonMembershipCertificate(
                        i, j, name, tuple(str(c.a) for c in coords)
                    )
                )
    if len(reps) != idx1:
        raise AssertionError("transversal size differs from the index")
    return TransversalResult(tuple(reps), len(reps), tuple(certificates))


def transversal_in_subgroup(source: DiscreteGroup, target: DiscreteGroup, m: int) -> list:
    """A subset J of `source` whose first-m projections represent every coset
    of the projection of `target` in Z^m exactly once.

    Preconditions: both projections are integer; the target projection has
    full rank m; jointly the projections generate Z^m (holds for the inputs
    the assembly produces; failure signals an upstream bug).
    """
    def proj_int(group) -> list[list[int]]:
        rows = []
        for i in range(m):
            row = []
            for j in range(group.rank):
                v = group.basis[i, j]
                if not v.is_integer:
                    raise TransversalError("projection is not integral")
                row.append(int(v.a))
            rows.append(row)
        return rows

    pi_source = proj_int(source)
    pi_target = proj_int(target)
    if m == 0:
        return [_zero_vector(source)]
    target_lat = Lattice(ExactMatrix(pi_target, 0))
    cosets = coset_reps(target_lat, Lattice.standard(m))

    concat = [pi_source[i] + pi_target[i] for i in range(m)]
    lifted = []
    for c in cosets:
        c_int = [int(v.a) for v in c]
        w = solve_integer(concat, c_int)
        if w is None:
            raise AssertionError("projections do not jointly generate Z^m")
        src_coeffs = w[: source.rank]
        lifted.append(source.basis.apply(src_coeffs))
    return lifted


def _zero_vector(group):
    from .scalars import QuadScalar

    return tuple(QuadScalar(0, 0, group.basis.d) for _ in range(group.dim))
