import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruviz.config import StudyConfig
from ruviz.errors import ValidationError
from ruviz.model import (
    ApproachRecord,
    Block,
    Direction,
    MeasureMatrix,
    MeasureSpec,
    harmonize_and_normalize,
    ingest,
)


def small_config(n_risk=1, n_utility=1, directions=None, reference="orig"):
    specs = []
    for i in range(n_risk):
        d = directions[i] if directions else "lower"
        specs.append({"id": f"r{i}", "block": "risk", "direction": d})
    for i in range(n_utility):
        d = directions[n_risk + i] if directions else "higher"
        specs.append({"id": f"u{i}", "block": "utility", "direction": d})
    import json

    return StudyConfig.from_json(
        json.dumps({"measures": specs, "reference": reference})
    )


class TestIngest:
    def test_fixture_csv(self, study_config, study_csv_bytes):
        m = ingest(study_csv_bytes, study_config)
        assert len(m.rows) == 9
        assert len(m.specs) == 10
        assert len(m.block_indices(Block.RISK)) == 5
        assert len(m.block_indices(Block.UTILITY)) == 5
        # risk block declared first, retained in order
        assert [s.id for s in m.specs[:5]] == ["RepU", "DiSCO", "DCAP", "TCAP", "RAPID"]
        ref = [r for r in m.rows if r.is_reference]
        assert [r.id for r in ref] == ["original"]

    def test_columns_reordered_to_config(self, study_config, study_csv_bytes):
        # shuffle CSV columns; the matrix must come back in config order
        text = study_csv_bytes.decode()
        lines = text.strip().splitlines()
        header = lines[0].split(",")
        order = [0] + [len(header) - 1 - i for i in range(len(header) - 1)]
        shuffled = "\n".join(
            ",".join(row.split(",")[i] for i in order) for row in lines
        )
        m1 = ingest(study_csv_bytes, study_config)
        m2 = ingest(shuffled, study_config)
        assert [s.id for s in m1.specs] == [s.id for s in m2.specs]
        np.testing.assert_array_equal(m1.values, m2.values)

    def test_single_row_rejected(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match="at least 2 rows"):
            ingest("approach,r0,u0\norig,1,2\n", cfg)

    def test_nan_cell_rejected_naming_row_and_column(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match=r"row 'b', column 'u0'"):
            ingest("approach,r0,u0\norig,1,2\nb,3,NaN\n", cfg)

    def test_non_numeric_cell(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match=r"row 'orig', column 'r0'"):
            ingest("approach,r0,u0\norig,x,2\nb,3,4\n", cfg)

    def test_missing_column(self):
        cfg = small_config(n_utility=2)
        with pytest.raises(ValidationError, match=r"missing measure column.*u1"):
            ingest("approach,r0,u0\norig,1,2\nb,3,4\n", cfg)

    def test_extra_column(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match=r"undeclared measure column.*zz"):
            ingest("approach,r0,u0,zz\norig,1,2,3\nb,4,5,6\n", cfg)

    def test_duplicate_row(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match="duplicate approach row 'b'"):
            ingest("approach,r0,u0\norig,1,2\nb,3,4\nb,5,6\n", cfg)

    def test_missing_reference(self):
        cfg = small_config(reference="nope")
        with pytest.raises(ValidationError, match="reference approach 'nope'"):
            ingest("approach,r0,u0\na,1,2\nb,3,4\n", cfg)

    def test_dataset_column(self):
        cfg = small_config()
        m = ingest(
            "approach,dataset,r0,u0\n"
            "orig,d1,1,2\na,d1,3,4\norig,d2,5,6\na,d2,7,8\n",
            cfg,
        )
        assert [r.label for r in m.rows] == ["orig@d1", "a@d1", "orig@d2", "a@d2"]
        assert sum(r.is_reference for r in m.rows) == 2

    def test_bad_header(self):
        cfg = small_config()
        with pytest.raises(ValidationError, match="first CSV column"):
            ingest("id,r0,u0\na,1,2\nb,3,4\n", cfg)

    def test_block_with_zero_measures_rejected_in_config(self):
        import json

        with pytest.raises(ValidationError, match="at least one risk and one utility"):
            StudyConfig.from_json(
                json.dumps(
                    {
                        "measures": [
                            {"id": "u0", "block": "utility", "direction": "higher"}
                        ],
                        "reference": "orig",
                    }
                )
            )


def matrix_of(values, directions, n_risk=1, reference_index=None):
    """Build a MeasureMatrix with given raw values and per-column directions."""
    values = np.asarray(values, dtype=float)
    n, p = values.shape
    specs = []
    for j in range(p):
        block = Block.RISK if j < n_risk else Block.UTILITY
        specs.append(
            MeasureSpec(f"m{j}", f"m{j}", block, Direction(directions[j]))
        )
    rows = tuple(
        ApproachRecord(id=f"a{i}", is_reference=i == reference_index)
        for i in range(n)
    )
    return MeasureMatrix(specs=tuple(specs), rows=rows, values=values)


class TestHarmonizeNormalize:
    def test_utility_lower_is_better_two_points(self):
        # raw {0.1, 0.3} with lower better flips to {1, 0}
        m = matrix_of([[0.0, 0.1], [1.0, 0.3]], ["lower", "lower"])
        nm = harmonize_and_normalize(m)
        np.testing.assert_allclose(nm.values[:, 1], [1.0, 0.0])

    def test_affine_map_higher_is_better(self):
        m = matrix_of(
            [[0.0, 2.0], [0.5, 4.0], [1.0, 6.0]], ["lower", "higher"]
        )
        nm = harmonize_and_normalize(m)
        np.testing.assert_allclose(nm.values[:, 1], [0.0, 0.5, 1.0])

    def test_risk_higher_is_better_flips(self):
        # risk with higher-is-better raw ends up inverted: higher = riskier
        m = matrix_of([[10.0, 0.0], [30.0, 1.0]], ["higher", "higher"])
        nm = harmonize_and_normalize(m)
        np.testing.assert_allclose(nm.values[:, 0], [1.0, 0.0])

    def test_random_matrix_against_column_oracle(self):
        rng = np.random.default_rng(7)
        vals = rng.normal(size=(6, 4)) * 10 + 3
        directions = ["lower", "higher", "lower", "higher"]
        m = matrix_of(vals, directions, n_risk=2)
        nm = harmonize_and_normalize(m)
        # independent column-wise oracle using sorting to find extremes
        for j in range(4):
            ordered = sorted(vals[:, j])
            lo, hi = ordered[0], ordered[-1]
            scaled = (vals[:, j] - lo) / (hi - lo)
            block = m.specs[j].block
            d = m.specs[j].direction
            flip = (block is Block.UTILITY and d is Direction.LOWER) or (
                block is Block.RISK and d is Direction.HIGHER
            )
            expected = 1.0 - scaled if flip else scaled
            np.testing.assert_allclose(nm.values[:, j], expected, atol=1e-15)

    def test_constant_column_maps_to_half_with_warning(self):
        m = matrix_of([[5.0, 1.0], [5.0, 2.0]], ["lower", "higher"])
        with pytest.warns(UserWarning, match="constant"):
            nm = harmonize_and_normalize(m)
        np.testing.assert_array_equal(nm.values[:, 0], [0.5, 0.5])
        assert nm.scales[0].constant

    def test_nonconstant_columns_attain_0_and_1(self):
        rng = np.random.default_rng(11)
        m = matrix_of(rng.normal(size=(5, 3)), ["lower", "higher", "lower"], 1)
        nm = harmonize_and_normalize(m)
        for j in range(3):
            assert nm.values[:, j].min() == 0.0
            assert nm.values[:, j].max() == 1.0

    def test_exclude_reference_from_range_clamps(self):
        m = matrix_of(
            [[100.0, 0.0], [10.0, 1.0], [20.0, 3.0]],
            ["lower", "higher"],
            reference_index=0,
        )
        nm = harmonize_and_normalize(m, exclude_reference_from_range=True)
        # reference risk above candidate max clamps to 1 (risk, lower=better)
        assert nm.values[0, 0] == 1.0
        # candidates span the full range
        np.testing.assert_allclose(sorted(nm.values[1:, 0]), [0.0, 1.0])
        assert nm.values.min() >= 0.0 and nm.values.max() <= 1.0

    def test_reference_in_range_by_default(self):
        m = matrix_of(
            [[100.0, 0.0], [10.0, 1.0], [20.0, 3.0]],
            ["lower", "higher"],
            reference_index=0,
        )
        nm = harmonize_and_normalize(m)
        assert nm.values[0, 0] == 1.0  # reference is the risk max
        assert 0.0 < nm.values[2, 0] < 1.0


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@st.composite
def raw_matrices(draw):
    n = draw(st.integers(2, 7))
    p_risk = draw(st.integers(1, 3))
    p_util = draw(st.integers(1, 3))
    p = p_risk + p_util
    rows = draw(
        st.lists(st.lists(finite, min_size=p, max_size=p), min_size=n, max_size=n)
    )
    directions = draw(
        st.lists(st.sampled_from(["higher", "lower"]), min_size=p, max_size=p)
    )
    return np.array(rows), directions, p_risk


@settings(max_examples=60, deadline=None)
@given(raw_matrices())
def test_property_idempotent_on_normalized(data):
    vals, directions, p_risk = data
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nm = harmonize_and_normalize(matrix_of(vals, directions, p_risk))
        # re-feed with directions matching the block semantics
        semantic = ["lower"] * p_risk + ["higher"] * (vals.shape[1] - p_risk)
        again = harmonize_and_normalize(matrix_of(nm.values, semantic, p_risk))
    np.testing.assert_allclose(again.values, nm.values, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(raw_matrices(), st.randoms(use_true_random=False))
def test_property_row_permutation_invariance(data, rnd):
    vals, directions, p_risk = data
    import warnings

    perm = list(range(vals.shape[0]))
    rnd.shuffle(perm)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nm = harmonize_and_normalize(matrix_of(vals, directions, p_risk))
        nm_p = harmonize_and_normalize(matrix_of(vals[perm], directions, p_risk))
    np.testing.assert_array_equal(nm.values[perm], nm_p.values)


@settings(max_examples=60, deadline=None)
@given(raw_matrices())
def test_property_monotone_in_raw_order(data):
    vals, directions, p_risk = data
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nm = harmonize_and_normalize(matrix_of(vals, directions, p_risk))
    for j in range(p_risk, vals.shape[1]):  # utility columns
        raw = vals[:, j]
        norm = nm.values[:, j]
        for i1 in range(len(raw)):
            for i2 in range(len(raw)):
                if raw[i1] < raw[i2]:
                    if directions[j] == "higher":
                        assert norm[i1] <= norm[i2]
                    else:
                        assert norm[i1] >= norm[i2]
