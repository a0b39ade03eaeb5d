#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布 自己キャリブレーションシステム - コアモジュール
"""

from . import constants
from .base_estimator import BaseTailEstimator
from .estimator_registry import EstimatorRegistry, register_estimator
from .exceptions import (
    AlgorithmExecutionError,
    AlgorithmNotFoundError,
    CalibrationError,
    DataError,
    DataLoadError,
    EstimationError,
    HybridTailSystemError,
    MonteCarloError,
    SolverError,
    ValidationError,
)
from .executor import ExecutionResult, ParallelExecutor, SequentialExecutor, Task
from .logging_config import get_logger, setup_logging
from .types import (
    ExecutionResultData,
    FitResultData,
    McReportData,
    ModelParamsData,
    RunManifestData,
    TailFitData,
)

__all__ = [
    "AlgorithmExecutionError",
    "AlgorithmNotFoundError",
    "BaseTailEstimator",
    "CalibrationError",
    "DataError",
    "DataLoadError",
    "EstimationError",
    "EstimatorRegistry",
    "ExecutionResult",
    "ExecutionResultData",
    "FitResultData",
    "HybridTailSystemError",
    "McReportData",
    "ModelParamsData",
    "MonteCarloError",
    "ParallelExecutor",
    "RunManifestData",
    "SequentialExecutor",
    "SolverError",
    "TailFitData",
    "Task",
    "ValidationError",
    "constants",
    "get_logger",
    "register_estimator",
    "setup_logging",
]
