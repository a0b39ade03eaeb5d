"""Tests for base estimator class."""

import numpy as np
import pytest

from hybrid_tail_system.algorithms.evt_baselines import TailFit
from hybrid_tail_system.core import BaseTailEstimator
from hybrid_tail_system.core.constants import BaselineDefaults
from hybrid_tail_system.core.exceptions import DomainError, EmptyDataError


class DummyEstimator(BaseTailEstimator):
    """Dummy estimator for testing."""

    def __init__(self):
        super().__init__(name="dummy", description="Dummy estimator for testing")

    def estimate(self, data, **kwargs):
        """Fit nothing: report the sample maximum as threshold."""
        return TailFit(
            method="Dummy",
            threshold=float(np.max(data)),
            threshold_order=1.0,
            n_exceedances=int(np.size(data)),
            xi=0.25,
            beta=1.5,
            tail_mse=0.0,
        )

    def get_supported_options(self):
        """Get supported options."""
        return self.get_common_options()


class TestBaseTailEstimator:
    """Test cases for BaseTailEstimator."""

    def test_estimator_creation(self):
        """Test creating an estimator."""
        estimator = DummyEstimator()
        assert estimator.name == "dummy"
        assert estimator.description == "Dummy estimator for testing"

    def test_validate_data_success(self):
        """Test data validation with a finite sample."""
        values = DummyEstimator().validate_data([1.0, 2.0, 3.0])
        assert isinstance(values, np.ndarray)
        assert values.tolist() == [1.0, 2.0, 3.0]

    def test_validate_data_too_small(self):
        """Test data validation with a single observation."""
        with pytest.raises(EmptyDataError):
            DummyEstimator().validate_data([1.0])

    def test_validate_data_non_finite(self):
        """Test data validation with NaN."""
        with pytest.raises(DomainError):
            DummyEstimator().validate_data([1.0, float("nan"), 2.0])

    def test_execute_returns_dict(self):
        """Test that execute validates and serializes the fit."""
        result = DummyEstimator().execute([1.0, 4.0, 2.0])
        assert result["method"] == "Dummy"
        assert result["threshold"] == 4.0
        assert result["n_exceedances"] == 3
        assert set(result) == {
            "method",
            "threshold",
            "threshold_order",
            "n_exceedances",
            "xi",
            "beta",
            "tail_mse",
        }

    def test_extract_execution_options_defaults(self):
        """Test that missing options fall back to defaults."""
        options = DummyEstimator()._extract_execution_options()
        assert options["candidate_orders"] == BaselineDefaults.CANDIDATE_ORDERS
        assert options["min_exceedances"] == BaselineDefaults.MIN_EXCEEDANCES

    def test_extract_execution_options_override(self):
        """Test that explicit options are kept."""
        options = DummyEstimator()._extract_execution_options(
            candidate_orders=[0.9, 0.95], min_exceedances=5
        )
        assert options["candidate_orders"] == (0.9, 0.95)
        assert options["min_exceedances"] == 5

    def test_format_results(self):
        """Test human-readable formatting of a result dict."""
        estimator = DummyEstimator()
        text = estimator.format_results(estimator.execute([1.0, 2.0]))
        assert "Dummy estimator for testing" in text
        assert "xi: 0.25" in text
        assert "method" not in text

    def test_get_info(self):
        """Test getting estimator info."""
        info = DummyEstimator().get_info()
        assert info["name"] == "dummy"
        assert info["description"] == "Dummy estimator for testing"
        assert "candidate_orders" in info["supported_options"]
