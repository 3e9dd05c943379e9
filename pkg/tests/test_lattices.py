import random
from fractions import Fraction
from itertools import product

import pytest

from latticetile.lattices import (
    DiscreteGroup,
    Lattice,
    LatticeError,
    dual,
    enumerate_points,
    extend_basis,
    gram_determinant,
    group_sum_and_intersection,
    intersect_coordinate_subspace,
    member,
    spans_same_group,
    superlattice_with_index,
    volume,
    volume_via_snf,
)
from latticetile.linalg import ExactMatrix
from latticetile.scalars import QuadScalar, sqrt_d

S2 = sqrt_d(2)


def lat(cols, d=0):
    return Lattice.from_columns(cols, d)


def test_volume_examples():
    assert volume(Lattice.standard(3)) == QuadScalar(1)
    assert volume(lat([[2, 0], [0, 2]])) == QuadScalar(4)
    assert volume(lat([[S2, 1], [1, S2]], 2)) == QuadScalar(1, 0, 2)


def test_volume_via_snf_cross_check():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(1, 3)
        while True:
            cols = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
            try:
                l = lat(cols)
                break
            except LatticeError:
                continue
        assert volume(l) == QuadScalar(volume_via_snf(l))


def test_dual_examples():
    assert dual(Lattice.standard(2)).basis == ExactMatrix.identity(2)
    half = dual(lat([[2, 0], [0, 2]]))
    assert half.basis[0, 0] == QuadScalar(Fraction(1, 2))
    sheared = lat([[1, 1], [0, 1]])
    ds = dual(sheared)
    # Pairings between primal and dual basis vectors are integers.
    for pcol in sheared.basis.columns():
        for dcol in ds.basis.columns():
            pairing = sum((p * q for p, q in zip(pcol, dcol)), QuadScalar(0))
            assert pairing.is_integer
    assert spans_same_group(dual(ds), sheared)


def test_dual_of_dual_random():
    rng = random.Random(5)
    for _ in range(20):
        while True:
            cols = [
                [QuadScalar(Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-1, 1)), 2)
                 for _ in range(2)]
                for _ in range(2)
            ]
            try:
                l = lat(cols, 2)
                break
            except LatticeError:
                continue
        assert spans_same_group(dual(dual(l)), l)


def test_member_examples():
    assert member(Lattice.standard(2), (3, -5)) == (3, -5)
    assert member(lat([[2, 0], [0, 2]]), (1, 0)) is None
    m = lat([[S2, 1], [1, S2]], 2)
    assert member(m, (S2 + 1, S2 + 1)) == (1, 1)
    assert member(m, (S2, 1)) == (1, 0)
    assert member(m, (S2, S2)) is None


def test_member_lower_rank():
    g = DiscreteGroup(ExactMatrix.from_columns([[0, 1, S2]], 2))
    assert member(g, (0, 2, 2 * S2)) == (2,)
    assert member(g, (1, 1, S2)) is None
    assert member(g, (0, 1, 1)) is None


def test_intersect_coordinate_subspace_examples():
    g = intersect_coordinate_subspace(Lattice.standard(2), 1)
    assert g.rank == 1
    assert member(g, (0, 1)) is not None

    l2 = lat([[0, 1], [1, S2]], 2)  # columns (0,1), (1,sqrt2)
    g2 = intersect_coordinate_subspace(l2, 1)
    assert g2.rank == 1
    assert member(g2, (0, 1)) is not None
    assert member(g2, (0, QuadScalar(Fraction(1, 2)))) is None

    l3 = lat([[2, 1], [0, 1]])  # columns (2,1), (0,1)
    g3 = intersect_coordinate_subspace(l3, 1)
    assert g3.rank == 1
    assert member(g3, (0, 1)) is not None


def test_intersect_coordinate_subspace_precondition():
    bad = lat([[QuadScalar(Fraction(1, 2)), 0], [0, 1]])
    with pytest.raises(LatticeError):
        intersect_coordinate_subspace(bad, 1)


def test_extend_basis_examples():
    z2 = Lattice.standard(2)
    sub = DiscreteGroup(ExactMatrix.from_columns([[0, 1]]))
    comp = extend_basis(z2, sub)
    assert comp.rank == 1
    # complement + subgroup spans the whole lattice
    full = ExactMatrix.from_columns(comp.basis.columns() + sub.basis.columns())
    assert abs(full.det()) == QuadScalar(1)

    diag = DiscreteGroup(ExactMatrix.from_columns([[1, 1]]))
    comp2 = extend_basis(z2, diag)
    full2 = ExactMatrix.from_columns(comp2.basis.columns() + diag.basis.columns())
    assert abs(full2.det()) == QuadScalar(1)

    l = lat([[0, 1], [1, S2]], 2)
    sub3 = intersect_coordinate_subspace(l, 1)
    comp3 = extend_basis(l, sub3)
    assert comp3.rank == 1
    assert member(l, comp3.basis.column(0)) is not None


def test_extend_basis_unique_split():
    rng = random.Random(17)
    l = lat([[0, 1], [1, S2]], 2)
    sub = intersect_coordinate_subspace(l, 1)
    comp = extend_basis(l, sub)
    for _ in range(40):
        c = [rng.randint(-4, 4), rng.randint(-4, 4)]
        v = l.basis.apply(c)
        split = member(
            Lattice(ExactMatrix.from_columns(comp.basis.columns() + sub.basis.columns(), 2)), v
        )
        assert split is not None


def test_extend_basis_primitivity_violation():
    z2 = Lattice.standard(2)
    doubled = DiscreteGroup(ExactMatrix.from_columns([[0, 2]]))
    with pytest.raises(LatticeError):
        extend_basis(z2, doubled)


def _residue_classes(basis_cols, modulus):
    seen = set()
    k = len(basis_cols[0])
    for v in product(range(modulus), repeat=k):
        seen.add(tuple(x % modulus for x in v))
    return seen


def test_group_sum_and_intersection_examples():
    two = lat([[2, 0], [0, 2]])
    si = group_sum_and_intersection(two, two)
    assert spans_same_group(si.sum_group, two)
    assert spans_same_group(si.intersection, two)
    assert si.index_g1_in_sum == 1 and si.index_g2_in_sum == 1

    g1 = lat([[2, 0], [0, 1]])
    g2 = lat([[1, 1], [1, -1]])  # {(a,b): a+b even}
    si = group_sum_and_intersection(g1, g2)
    assert spans_same_group(si.sum_group, Lattice.standard(2))
    # Intersection: a even and a+b even, i.e. both coordinates even.
    assert spans_same_group(si.intersection, two)
    # Brute force on residues mod 2 confirms: intersection residues = {(0,0)}.
    inter_residues = {
        (x % 2, y % 2)
        for x in range(-4, 5)
        for y in range(-4, 5)
        if member(si.intersection, (x, y)) is not None
    }
    assert inter_residues == {(0, 0)}

    si2 = group_sum_and_intersection(Lattice.standard(2), lat([[3, 0], [0, 3]]))
    assert spans_same_group(si2.sum_group, Lattice.standard(2))
    assert spans_same_group(si2.intersection, lat([[3, 0], [0, 3]]))


def test_superlattice_with_index_examples():
    g = DiscreteGroup(ExactMatrix.from_columns([[0, 1]]))
    sup, j = superlattice_with_index(g, 3)
    assert len(j) == 3
    assert member(sup, (0, Fraction(1, 3))) is not None
    assert member(sup, j[1]) is not None
    assert member(g, j[1]) is None

    g1, j1 = superlattice_with_index(DiscreteGroup(ExactMatrix.from_columns([[1]])), 1)
    assert j1 == [(QuadScalar(0),)]

    g2 = DiscreteGroup(ExactMatrix.from_columns([[1, S2]], 2))
    sup2, j2 = superlattice_with_index(g2, 2)
    assert len(j2) == 2
    assert member(sup2, (QuadScalar(Fraction(1, 2), 0, 2), S2 / 2)) is not None
    # Index check: old basis vector is 2x the new one.
    assert member(sup2, g2.basis.column(0)) == (2,)


def test_enumerate_points_examples():
    pts = enumerate_points(Lattice.standard(1), [(-1.5, 1.5)])
    assert [p[0] for p in pts] == [QuadScalar(-1), QuadScalar(0), QuadScalar(1)]

    pts2 = enumerate_points(lat([[2, 0], [0, 2]]), [(0, 3), (0, 3)])
    assert {(int(p[0].a), int(p[1].a)) for p in pts2} == {(0, 0), (0, 2), (2, 0), (2, 2)}

    l = lat([[1, 0], [S2, 1]], 2)  # columns (1,0), (sqrt2,1)
    pts3 = enumerate_points(l, [(0, 3), (0, 1.5)])
    # Brute-force oracle over coefficients: a*(1,0) + b*(sqrt2,1).
    expected = set()
    for a in range(-10, 11):
        for b in range(-10, 11):
            x = QuadScalar(a) + b * S2
            y = QuadScalar(b, 0, 2)
            if QuadScalar(0, 0, 2) <= x <= 3 and 0 <= b <= 1:
                expected.add((x, y))
    assert {(p[0], p[1]) for p in pts3} == expected


def test_gram_determinant_lower_rank():
    g = DiscreteGroup(ExactMatrix.from_columns([[0, 1, S2]], 2))
    assert gram_determinant(g) == QuadScalar(3, 0, 2)  # 1 + 2
