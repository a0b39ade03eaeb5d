"""共通フィクスチャ"""

import numpy as np
import pytest

from hybrid_tail_system.algorithms.hybrid_model import HybridModel, ModelParams


def quantile_grid(theta: ModelParams, n: int) -> np.ndarray:
    """ノイズのない標本: 分位点 H^{-1}((i - 0.5)/n), i = 1..n"""
    probs = (np.arange(n) + 0.5) / n
    return np.asarray(HybridModel.from_params(theta).quantile(probs))


@pytest.fixture
def baseline_theta() -> ModelParams:
    return ModelParams(2.0, 1.0, 5.0, 0.5)


@pytest.fixture
def baseline_grid(baseline_theta) -> np.ndarray:
    return quantile_grid(baseline_theta, 2000)
