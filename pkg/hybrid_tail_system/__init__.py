#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布 自己キャリブレーションシステム

ガウス本体・指数ブリッジ・GPD裾を接続したハイブリッド分布を、
閾値を人手で選ばずにデータから推定します。古典的EVT推定量との比較と
モンテカルロ検証も含みます。
"""

__version__ = "0.3.0"
__author__ = "Hybrid Tail System Team"

from .algorithms import FitConfig, FitResult, HybridModel, ModelParams, derive_params, fit
from .core import (
    BaseTailEstimator,
    EstimatorRegistry,
    ExecutionResult,
    ParallelExecutor,
    SequentialExecutor,
    register_estimator,
)

__all__ = [
    "BaseTailEstimator",
    "EstimatorRegistry",
    "ExecutionResult",
    "FitConfig",
    "FitResult",
    "HybridModel",
    "ModelParams",
    "ParallelExecutor",
    "SequentialExecutor",
    "__author__",
    "__version__",
    "derive_params",
    "fit",
    "register_estimator",
]
