from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

import riskdist as rd
from riskdist.errors import (
    Asymmetry,
    EmptySubset,
    InputFormatError,
    NonzeroDiagonal,
    PointCountExceeded,
    TriangleViolation,
    ZeroOffDiagonal,
)
from riskdist.space import (
    compose_relations,
    diagonal_relation,
    full_relation,
    left_projection_map,
    product_space,
    right_projection_map,
)


class TestValidateMetric:
    def test_minimal_two_point(self):
        space = rd.validate_metric(["a", "b"], [[0, 1], [1, 0]])
        assert space.n == 2
        assert space.d(0, 1) == 1

    def test_path_space(self, p3):
        assert p3.diameter() == 2

    def test_asymmetry_names_indices(self):
        with pytest.raises(Asymmetry) as err:
            rd.validate_metric(["a", "b"], [[0, 3], [1, 0]])
        assert err.value.indices == (0, 1)

    def test_nonzero_diagonal(self):
        with pytest.raises(NonzeroDiagonal):
            rd.validate_metric(["a"], [[1]])

    def test_zero_off_diagonal(self):
        with pytest.raises(ZeroOffDiagonal):
            rd.validate_metric(["a", "b"], [[0, 0], [0, 0]])

    def test_triangle_violation(self):
        with pytest.raises(TriangleViolation):
            rd.validate_metric(
                ["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
            )

    def test_duplicate_labels(self):
        with pytest.raises(InputFormatError):
            rd.validate_metric(["a", "a"], [[0, 1], [1, 0]])

    def test_exact_mode_point_guard(self):
        n = 13
        d = [[0 if i == j else 1 for j in range(n)] for i in range(n)]
        with pytest.raises(PointCountExceeded):
            rd.validate_metric([str(i) for i in range(n)], d)

    def test_rational_strings(self):
        space = rd.validate_metric(["a", "b"], [["0", "5/2"], ["5/2", 0]])
        assert space.d(0, 1) == Fraction(5, 2)

    def test_float_mode(self):
        space = rd.validate_metric(["a", "b"], [[0, 1.5], [1.5, 0]], mode="float")
        assert not space.exact
        assert space.d(0, 1) == 1.5


class TestSublevel:
    def test_zero_is_diagonal(self, p3):
        rel = rd.sublevel_relation(p3, 0)
        assert sorted(rel.pairs()) == [(0, 0), (1, 1), (2, 2)]

    def test_middle_level(self, p3):
        rel = rd.sublevel_relation(p3, 1)
        assert sorted(rel.pairs()) == [
            (0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2),
        ]

    def test_diameter_level_is_full(self, p3):
        assert len(rd.sublevel_relation(p3, 2).pairs()) == 9

    @given(a=st.integers(0, 8), b=st.integers(0, 8))
    @settings(deadline=None, max_examples=30)
    def test_monotone_in_threshold(self, a, b):
        space = make_space()
        lo, hi = sorted((Fraction(a, 2), Fraction(b, 2)))
        assert rd.sublevel_relation(space, lo).is_subrelation(
            rd.sublevel_relation(space, hi)
        )


def make_space():
    return rd.validate_metric(
        ["a", "b", "c", "d"],
        [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]],
    )


class TestDistanceLevels:
    def test_path(self, p3):
        assert rd.distance_levels(p3) == [0, 1, 2]

    def test_two_point(self, two_point):
        assert rd.distance_levels(two_point) == [0, Fraction(5, 2)]

    def test_single_point(self):
        space = rd.validate_metric(["a"], [[0]])
        assert rd.distance_levels(space) == [0]


class TestHausdorff:
    def test_identical_sets(self, p3):
        a = rd.PointSubset.of(p3, ["a"])
        assert rd.hausdorff_distance(a, a) == 0

    def test_uncovered_point(self, p3):
        a = rd.PointSubset.of(p3, ["a"])
        ac = rd.PointSubset.of(p3, ["a", "c"])
        assert rd.hausdorff_distance(a, ac) == 2

    def test_overlapping_pairs(self, p3):
        ab = rd.PointSubset.of(p3, ["a", "b"])
        bc = rd.PointSubset.of(p3, ["b", "c"])
        # independent evaluation of the two max-min terms
        fwd = max(min(p3.d(x, y) for y in bc.indices()) for x in ab.indices())
        bwd = max(min(p3.d(x, y) for x in ab.indices()) for y in bc.indices())
        assert max(fwd, bwd) == 1
        assert rd.hausdorff_distance(ab, bc) == 1

    def test_empty_subset_rejected(self, p3):
        with pytest.raises(EmptySubset):
            rd.hausdorff_distance(
                rd.PointSubset(p3, 0), rd.PointSubset.of(p3, ["a"])
            )

    def test_metric_axioms_exhaustive_four_points(self, cycle4):
        subsets = [rd.PointSubset(cycle4, m) for m in range(1, 16)]
        for a, b in product(subsets, repeat=2):
            dab = rd.hausdorff_distance(a, b)
            assert dab == rd.hausdorff_distance(b, a)
            assert (dab == 0) == (a.mask == b.mask)
        for a, b, c in product(subsets, repeat=3):
            assert rd.hausdorff_distance(a, b) <= rd.hausdorff_distance(
                a, c
            ) + rd.hausdorff_distance(c, b)


class TestModulus:
    def test_zero_threshold(self, p3):
        phi = rd.PointFunction(p3, (0, 1, 5))
        assert rd.modulus_of_continuity(phi, 0) == 0

    def test_path_values(self, p3):
        phi = rd.PointFunction(p3, (0, 1, 5))
        # brute force over pairs within the threshold
        pairs1 = [(i, j) for i in range(3) for j in range(3) if p3.d(i, j) <= 1]
        assert max(abs(phi(i) - phi(j)) for i, j in pairs1) == 4
        assert rd.modulus_of_continuity(phi, 1) == 4
        assert rd.modulus_of_continuity(phi, 2) == 5

    @given(t1=st.integers(0, 4), t2=st.integers(0, 4))
    @settings(deadline=None, max_examples=30)
    def test_monotone_in_threshold(self, t1, t2):
        space = make_space()
        phi = rd.PointFunction(space, (3, -1, 4, 0))
        lo, hi = sorted((t1, t2))
        assert rd.modulus_of_continuity(phi, lo) <= rd.modulus_of_continuity(
            phi, hi
        )


class TestProducts:
    def test_labels_and_metric(self, two_point):
        prod = product_space(two_point, two_point)
        assert prod.labels == ("x*x", "x*y", "y*x", "y*y")
        # max metric: (x,x) vs (y,y) is max(d, d) = d
        assert prod.d(0, 3) == Fraction(5, 2)
        assert prod.d(0, 1) == Fraction(5, 2)

    def test_projection_maps(self, p3):
        left = left_projection_map(p3, p3)
        right = right_projection_map(p3, p3)
        assert left[4] == 1 and right[4] == 1  # (b, b)
        assert left[5] == 1 and right[5] == 2  # (b, c)

    def test_relation_composition(self, p3):
        s = rd.sublevel_relation(p3, 1)
        composed = compose_relations(s, s)
        # two steps of radius 1 reach everything on the path
        assert len(composed.pairs()) == 9
        diag = diagonal_relation(p3)
        assert compose_relations(diag, s).pairs() == s.pairs()

    def test_full_relation(self, p3):
        assert len(full_relation(p3, p3).pairs()) == 9
