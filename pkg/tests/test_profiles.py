import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruviz.profiles import (
    AREA_CAVEAT,
    build_origami,
    build_pcp,
    origami_profiles,
    ranked_areas,
)

from conftest import make_nm

IDS5 = tuple(f"m{i}" for i in range(5))


def fan_area(radii: np.ndarray) -> float:
    """Independent fan-triangulation oracle: sum of 0.5 r_i r_{i+1} sin(dtheta)."""
    k = len(radii)
    dtheta = 2.0 * math.pi / k
    total = 0.0
    for i in range(k):
        total += 0.5 * radii[i] * radii[(i + 1) % k] * math.sin(dtheta)
    return total


class TestBuildOrigami:
    def test_all_ones_area_is_one(self):
        prof = build_origami("x", np.ones(5), IDS5, r_aux=0.1)
        assert prof.area_normalized == pytest.approx(1.0, abs=1e-12)

    def test_all_values_at_r_aux_regular_polygon(self):
        m, r_aux = 5, 0.3
        prof = build_origami("x", np.full(m, r_aux), IDS5, r_aux=r_aux)
        expected = m * r_aux**2 * math.sin(math.pi / m)
        assert prof.area_raw == pytest.approx(expected, abs=1e-12)

    def test_random_profiles_match_fan_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            m = int(rng.integers(3, 9))
            ids = tuple(f"m{i}" for i in range(m))
            vals = rng.random(m)
            prof = build_origami("x", vals, ids, r_aux=0.2)
            assert prof.area_raw == pytest.approx(fan_area(prof.radii), abs=1e-10)

    def test_angles_strictly_increasing_and_vertices_closed_shape(self):
        prof = build_origami("x", np.array([0.2, 0.5, 0.9]), ("a", "b", "c"))
        assert np.all(np.diff(prof.angles) > 0)
        assert prof.angles[0] == 0.0
        assert prof.angles[-1] < 2 * math.pi
        assert prof.vertices.shape == (6, 2)

    def test_requires_three_measures(self):
        with pytest.raises(ValueError, match="at least 3"):
            build_origami("x", np.array([0.1, 0.2]), ("a", "b"))

    def test_r_aux_bounds(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError, match="r_aux"):
                build_origami("x", np.ones(3), ("a", "b", "c"), r_aux=bad)

    def test_weights_scale_area(self):
        vals = np.array([0.5, 0.5, 0.5, 0.5])
        ids = tuple("abcd")
        w = np.array([1.0, 0.5, 1.0, 0.5])
        prof = build_origami("x", vals, ids, weights=w)
        # normalized area is the weighted mean of the values
        assert prof.area_normalized == pytest.approx(0.5, abs=1e-12)

    def test_bad_weights(self):
        with pytest.raises(ValueError, match="weights"):
            build_origami("x", np.ones(3), ("a", "b", "c"),
                          weights=np.array([1.0, 2.0, 1.0]))


class TestAreaInvariances:
    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                 min_size=3, max_size=9),
        st.integers(0, 8),
    )
    def test_cyclic_rotation_invariance(self, values, shift):
        vals = np.array(values)
        ids = tuple(f"m{i}" for i in range(len(vals)))
        base = build_origami("x", vals, ids, r_aux=0.15)
        rolled = np.roll(vals, shift % len(vals))
        rotated = build_origami("x", rolled, ids, r_aux=0.15)
        assert rotated.area_raw == pytest.approx(base.area_raw, abs=1e-9)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                 min_size=3, max_size=9)
    )
    def test_reflection_invariance(self, values):
        vals = np.array(values)
        ids = tuple(f"m{i}" for i in range(len(vals)))
        base = build_origami("x", vals, ids)
        reflected = build_origami("x", vals[::-1].copy(), ids)
        assert reflected.area_raw == pytest.approx(base.area_raw, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.01, max_value=1.0, allow_nan=False),
                 min_size=3, max_size=8),
        st.integers(0, 7),
        st.floats(min_value=0.01, max_value=0.5),
    )
    def test_monotone_in_any_radius(self, values, idx, bump):
        vals = np.array(values)
        ids = tuple(f"m{i}" for i in range(len(vals)))
        base = build_origami("x", vals, ids)
        raised = vals.copy()
        j = idx % len(vals)
        raised[j] = min(1.0, raised[j] + bump)
        bigger = build_origami("x", raised, ids)
        assert bigger.area_raw >= base.area_raw - 1e-12
        assert 0.0 < bigger.area_normalized <= 1.0 + 1e-12


class TestRankedAreas:
    def test_ordering_with_degenerate_profile(self):
        ones = build_origami("full", np.ones(4), tuple("abcd"))
        zeros = build_origami("empty", np.zeros(4), tuple("abcd"))
        table = ranked_areas([zeros, ones])
        assert [e.id for e in table.entries] == ["full", "empty"]
        assert table.entries[0].display == "1.00"
        assert table.entries[1].area == pytest.approx(0.0, abs=1e-12)
        assert table.caveat == AREA_CAVEAT

    def test_ties_stable_lexicographic(self):
        a = build_origami("b", np.full(4, 0.5), tuple("wxyz"))
        b = build_origami("a", np.full(4, 0.5), tuple("wxyz"))
        table = ranked_areas([a, b])
        assert [e.id for e in table.entries] == ["a", "b"]

    def test_display_rounding_two_decimals(self):
        prof = build_origami("p", np.array([0.123, 0.456, 0.789]), tuple("abc"))
        table = ranked_areas([prof])
        assert table.entries[0].display == f"{prof.area_normalized:.2f}"
        assert table.entries[0].area == prof.area_normalized  # full precision

    def test_mismatched_axes_rejected(self):
        a = build_origami("a", np.ones(3), ("x", "y", "z"))
        b = build_origami("b", np.ones(3), ("x", "y", "q"))
        with pytest.raises(ValueError, match="share axis order"):
            ranked_areas([a, b])


class TestPcp:
    def test_shape_and_flags(self):
        vals = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
        nm = make_nm(vals, 1, reference_index=1)
        pcp = build_pcp(nm, {"a0"})
        assert len(pcp.axes) == 3
        assert len(pcp.lines) == 2
        assert all(len(line.values) == 3 for line in pcp.lines)
        assert pcp.lines[0].is_pareto and not pcp.lines[0].is_reference
        assert pcp.lines[1].is_reference and not pcp.lines[1].is_pareto

    def test_lossless_roundtrip(self):
        rng = np.random.default_rng(50)
        vals = rng.random((6, 5))
        nm = make_nm(vals, 2)
        pcp = build_pcp(nm, set())
        rebuilt = np.vstack([line.values for line in pcp.lines])
        np.testing.assert_array_equal(rebuilt, vals)

    def test_axis_order_follows_declaration(self, study_config, study_csv_bytes):
        from ruviz.model import harmonize_and_normalize, ingest

        nm = harmonize_and_normalize(ingest(study_csv_bytes, study_config))
        pcp = build_pcp(nm, set())
        assert [a.measure_id for a in pcp.axes] == list(study_config.measure_ids)
        assert [a.block.value for a in pcp.axes[:5]] == ["risk"] * 5


def test_origami_profiles_covers_every_row(study_config, study_csv_bytes):
    from ruviz.model import harmonize_and_normalize, ingest

    nm = harmonize_and_normalize(ingest(study_csv_bytes, study_config))
    profs = origami_profiles(nm, r_aux=0.1)
    assert [p.id for p in profs] == list(nm.labels)
    # the reference row is at the normalized maximum everywhere
    original = next(p for p in profs if p.id == "original")
    assert original.area_normalized == pytest.approx(1.0, abs=1e-12)
