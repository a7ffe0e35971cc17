import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruviz.pareto import (
    CompositeFront,
    FrontPoint,
    composite_front,
    dominates,
    knee_point,
    pareto_set,
    rays_to_reference,
)

from conftest import make_nm, oracle_front_ids, oracle_pareto_ids


class TestDominates:
    def test_componentwise_true(self):
        assert dominates((0.8, 0.9), (0.2,), (0.7, 0.9), (0.3,))

    def test_identical_vectors_false(self):
        assert not dominates((0.5, 0.5), (0.5,), (0.5, 0.5), (0.5,))

    def test_incomparable_false(self):
        assert not dominates((0.9, 0.1), (0.2,), (0.1, 0.9), (0.3,))
        assert not dominates((0.1, 0.9), (0.3,), (0.9, 0.1), (0.2,))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dominates((0.1, 0.2), (0.3,), (0.1,), (0.3,))


class TestParetoSet:
    def test_single_candidate_is_optimal(self):
        nm = make_nm(np.array([[0.2, 0.6], [0.9, 0.9]]), 1, reference_index=1)
        res = pareto_set(nm)
        assert res.pareto_ids == {"a0"}
        assert res.candidate_labels == ("a0",)

    def test_totally_dominated_row_excluded(self):
        vals = np.array([[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]])  # risk, utility
        nm = make_nm(vals, 1)
        res = pareto_set(nm, exclude_reference=False)
        assert "a2" not in res.pareto_ids  # worst on both
        assert "a0" in res.pareto_ids

    def test_dominance_matrix_covers_reference(self):
        nm = make_nm(np.array([[0.0, 1.0], [0.5, 0.5]]), 1, reference_index=0)
        res = pareto_set(nm)
        # reference (row 0) dominates row 1 in the relation even though it is
        # not a candidate
        assert res.matrix[0, 1]
        assert not res.matrix[1, 0]
        assert res.pareto_ids == {"a1"}

    def test_matches_bruteforce_oracle_random(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            vals = rng.random((n, 5))
            nm = make_nm(vals, 3)
            res = pareto_set(nm, exclude_reference=False)
            expected = oracle_pareto_ids(
                [list(row[3:]) for row in vals], [list(row[:3]) for row in vals]
            )
            assert res.pareto_ids == {f"a{i}" for i in expected}


class TestCompositeFront:
    def test_three_point_front_edges(self):
        front = composite_front(
            [("a", 0.2, 0.1), ("b", 0.5, 0.3), ("c", 0.9, 0.8)]
        )
        assert [p.id for p in front.points] == ["a", "b", "c"]
        assert len(front.edges) == 2
        assert front.edges[0].slope == pytest.approx(0.2 / 0.3)
        assert front.edges[1].slope == pytest.approx(0.5 / 0.4)

    def test_dominated_point_absent(self):
        front = composite_front([("good", 0.8, 0.2), ("bad", 0.5, 0.4)])
        assert front.ids == {"good"}

    def test_duplicate_points_both_kept(self):
        front = composite_front([("x", 0.5, 0.5), ("y", 0.5, 0.5)])
        assert front.ids == {"x", "y"}
        assert front.edges[0].slope is None  # zero utility step

    def test_staircase_property_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            pts = [(f"p{i}", float(u), float(r))
                   for i, (u, r) in enumerate(rng.random((10, 2)))]
            front = composite_front(pts)
            risks = [p.risk for p in front.points]
            assert risks == sorted(risks)
            assert front.ids == oracle_front_ids(pts)


class TestKnee:
    def test_known_knee(self):
        front = composite_front([("a", 0.0, 0.0), ("b", 0.5, 0.9), ("c", 1.0, 1.0)])
        knee = knee_point(front)
        assert knee is not None
        assert knee.id == "b"
        assert knee.distance == pytest.approx(0.4 / math.sqrt(2), abs=1e-9)
        assert knee.concave is False  # bows toward the high-risk side

    def test_concave_side_flag(self):
        knee = knee_point(
            [FrontPoint("a", 0.0, 0.0), FrontPoint("b", 0.9, 0.5),
             FrontPoint("c", 1.0, 1.0)]
        )
        assert knee is not None and knee.id == "b" and knee.concave is True

    def test_collinear_returns_none(self):
        knee = knee_point(
            [FrontPoint("a", 0.0, 0.0), FrontPoint("b", 0.5, 0.5),
             FrontPoint("c", 1.0, 1.0)]
        )
        assert knee is None

    def test_two_point_front_none(self):
        front = composite_front([("a", 0.1, 0.1), ("b", 0.9, 0.9)])
        assert knee_point(front) is None

    def test_order_invariance(self):
        pts = [FrontPoint("a", 0.0, 0.0), FrontPoint("b", 0.5, 0.9),
               FrontPoint("c", 1.0, 1.0)]
        k1 = knee_point(pts)
        k2 = knee_point(list(reversed(pts)))
        assert k1 == k2

    def test_tie_breaks_lower_risk_then_id(self):
        pts = [
            FrontPoint("a", 0.0, 0.0),
            FrontPoint("z", 0.25, 0.45),
            FrontPoint("b", 0.75, 0.95),
            FrontPoint("c", 1.0, 1.0),
        ]
        # both interior points are 0.2/sqrt(2) from the chord
        knee = knee_point(pts)
        assert knee is not None and knee.id == "z"


class TestRays:
    def test_diagonal(self):
        rays = rays_to_reference([("p", 0.5, 0.5)], (1.0, 1.0))
        assert rays[0].slope == pytest.approx(1.0)
        assert rays[0].l2 == pytest.approx(math.sqrt(0.5), abs=1e-9)

    def test_zero_displacement_flagged(self):
        rays = rays_to_reference([("p", 1.0, 1.0)], (1.0, 1.0))
        assert rays[0].slope is None
        assert rays[0].l2 == 0.0

    def test_random_matches_direct_recomputation(self):
        rng = np.random.default_rng(9)
        pts = [(f"p{i}", float(u), float(r))
               for i, (u, r) in enumerate(rng.random((20, 2)))]
        u0, r0 = 0.9, 0.85
        for ray in rays_to_reference(pts, (u0, r0)):
            u, r = ray.utility, ray.risk
            assert ray.l2 == pytest.approx(math.hypot(u - u0, r - r0), abs=1e-12)
            if ray.slope is not None:
                assert ray.slope == pytest.approx((r - r0) / (u - u0), abs=1e-12)


unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def nm_values(draw, n_min=2, n_max=7, margin=0.0):
    n = draw(st.integers(n_min, n_max))
    p_risk = draw(st.integers(1, 3))
    p_util = draw(st.integers(1, 3))
    p = p_risk + p_util
    lo, hi = margin, 1.0 - margin
    cell = st.floats(min_value=lo, max_value=hi, allow_nan=False)
    rows = draw(st.lists(st.lists(cell, min_size=p, max_size=p),
                         min_size=n, max_size=n))
    return np.array(rows), p_risk


@settings(max_examples=60, deadline=None)
@given(nm_values(), st.floats(min_value=0.05, max_value=1.0))
def test_property_scale_free_membership(data, c):
    vals, p_risk = data
    nm = make_nm(vals, p_risk)
    scaled = vals.copy()
    scaled[:, p_risk:] = scaled[:, p_risk:] * c  # positive rescale of utilities
    nm_scaled = make_nm(scaled, p_risk)
    assert (
        pareto_set(nm, exclude_reference=False).pareto_ids
        == pareto_set(nm_scaled, exclude_reference=False).pareto_ids
    )


def test_scale_free_dominance_above_one():
    # arbitrary positive constants on raw vectors (outside the [0,1] type)
    rng = np.random.default_rng(3)
    for _ in range(100):
        u_i, u_j = rng.random(3), rng.random(3)
        r_i, r_j = rng.random(2), rng.random(2)
        c = float(rng.uniform(0.01, 50.0))
        assert dominates(u_i, r_i, u_j, r_j) == dominates(
            c * u_i, r_i, c * u_j, r_j
        )


@settings(max_examples=60, deadline=None)
@given(nm_values(n_min=2, n_max=6, margin=0.05), st.integers(0, 5))
def test_property_adding_dominated_row_changes_nothing(data, pick):
    vals, p_risk = data
    base = pareto_set(make_nm(vals, p_risk), exclude_reference=False).pareto_ids
    row = vals[pick % len(vals)].copy()
    row[:p_risk] = row[:p_risk] + 0.04  # strictly riskier
    row[p_risk:] = row[p_risk:] - 0.04  # strictly less useful
    extended = np.vstack([vals, row])
    ext = pareto_set(make_nm(extended, p_risk), exclude_reference=False).pareto_ids
    assert ext == base
