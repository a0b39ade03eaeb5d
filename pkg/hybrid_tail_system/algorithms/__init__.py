#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布 自己キャリブレーションシステム - アルゴリズムモジュール

分布・ソルバー・キャリブレーション・古典的EVT推定量・モンテカルロ検証を提供し、
古典的推定手法をレジストリに登録します。

登録される推定手法:
    - MepPwmEstimator: 平均超過プロットの候補閾値 + PWM
    - HillEstimator: Hill推定量
    - QqEstimator: QQ推定量
    - MlEstimator: GPDの最尤推定
"""

from ..core.logging_config import get_logger
from .calibrator import FitConfig, FitResult, fit
from .hybrid_model import DerivedParams, HybridModel, ModelParams, derive_params
from .lm_solver import LmOptions, LmProblem, LmResult, solve

logger = get_logger(__name__)

__all__ = [
    "DerivedParams",
    "FitConfig",
    "FitResult",
    "HybridModel",
    "LmOptions",
    "LmProblem",
    "LmResult",
    "ModelParams",
    "derive_params",
    "fit",
    "solve",
]

# ============================================================================
# 推定手法の登録（インポート時にレジストリへ登録される）
# ============================================================================

try:
    from .tail_estimators import HillEstimator, MepPwmEstimator, MlEstimator, QqEstimator

    __all__.extend(["HillEstimator", "MepPwmEstimator", "MlEstimator", "QqEstimator"])
except ImportError as e:
    logger.warning(f"推定手法のインポートに失敗しました: {e}")
