"""
Unit tests for domain types and record validation.
"""

import math

import numpy as np
import pytest

from src.core.errors import DimensionMismatchError, IngestionError, NonFiniteValueError
from src.core.types import (
    Decision,
    Observation,
    TestOutcome,
    observations_from_arrays,
    observations_to_arrays,
    validate_observation,
)
from src.harness import stream_test


class TestObservation:
    """Tests for Observation."""

    def test_features_row(self):
        """Test the feature row is [x, z]."""
        obs = Observation(1.5, 2.0, (3.0, 4.0))
        np.testing.assert_array_equal(obs.features(), [1.5, 3.0, 4.0])
        assert obs.d == 2

    def test_to_record(self):
        """Test the record form."""
        assert Observation(1.0, 2.0, (3.0,)).to_record() == {"x": 1.0, "y": 2.0, "z": [3.0]}


class TestValidateObservation:
    """Tests for validate_observation."""

    def test_valid_record(self):
        """Test a well-formed record."""
        obs = validate_observation({"x": 1, "y": 2.5, "z": [0.0, 1.0]}, 2)
        assert obs == Observation(1.0, 2.5, (0.0, 1.0))

    def test_wrong_dimension(self):
        """Test len(z) != d raises DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError) as info:
            validate_observation({"x": 1, "y": 2, "z": [0.0]}, 2)
        assert info.value.expected == 2
        assert info.value.actual == 1

    @pytest.mark.parametrize(
        "record",
        [
            {"x": math.nan, "y": 0.0, "z": [0.0]},
            {"x": 0.0, "y": math.inf, "z": [0.0]},
            {"x": 0.0, "y": 0.0, "z": [-math.inf]},
        ],
    )
    def test_non_finite(self, record):
        """Test NaN and infinities are refused."""
        with pytest.raises(NonFiniteValueError):
            validate_observation(record, 1)

    def test_missing_key(self):
        """Test a record without y."""
        with pytest.raises(IngestionError, match="missing"):
            validate_observation({"x": 0.0, "z": [0.0]}, 1)

    @pytest.mark.parametrize("x", ["1.0", True, None])
    def test_non_numeric(self, x):
        """Test strings, booleans and nulls are not numbers."""
        with pytest.raises(IngestionError):
            validate_observation({"x": x, "y": 0.0, "z": [0.0]}, 1)

    def test_z_must_be_array(self):
        """Test a scalar z."""
        with pytest.raises(IngestionError):
            validate_observation({"x": 0.0, "y": 0.0, "z": 1.0}, 1)


class TestArrays:
    """Tests for the array converters."""

    def test_unpack_shapes(self):
        """Test observations_to_arrays shapes and order."""
        obs = [Observation(float(i), float(-i), (float(i), 2.0 * i)) for i in range(4)]
        x, y, z = observations_to_arrays(obs)
        assert x.shape == (4,) and y.shape == (4,) and z.shape == (4, 2)
        np.testing.assert_array_equal(z[:, 1], [0.0, 2.0, 4.0, 6.0])

    def test_pack_from_columns(self):
        """Test observations_from_arrays builds one Observation per row."""
        obs = observations_from_arrays(np.array([1.0]), np.array([2.0]), np.array([[3.0, 4.0]]))
        assert obs == [Observation(1.0, 2.0, (3.0, 4.0))]

    def test_empty(self):
        """Test an empty list unpacks to empty arrays."""
        x, _, z = observations_to_arrays([])
        assert x.size == 0 and z.shape[0] == 0


class TestTestOutcome:
    """Tests for TestOutcome."""

    def test_no_collection_marker(self):
        """Test the outcome type and the stream entry point carry no pytest attributes."""
        assert "__test__" not in vars(TestOutcome)
        assert not hasattr(stream_test.test_stream, "__test__")

    def test_wealth_at_is_step_function(self):
        """Test wealth_at returns the last value at or before t."""
        outcome = TestOutcome(
            Decision.NOT_REJECTED, 5, 3.0, [(0, 1.0), (2, 2.0), (4, 3.0)], warmup=20
        )
        assert outcome.wealth_at(0) == 1.0
        assert outcome.wealth_at(3) == 2.0
        assert outcome.wealth_at(10) == 3.0
        assert outcome.samples_consumed == 25
        assert not outcome.rejected

    def test_to_dict(self):
        """Test the serialised form names the decision."""
        outcome = TestOutcome(
            Decision.REJECTED, 1, 25.0, [(0, 1.0), (1, 25.0)], batch_wealth={2: 25.0}
        )
        data = outcome.to_dict()
        assert data["decision"] == "rejected"
        assert data["batch_wealth"] == {"2": 25.0}
