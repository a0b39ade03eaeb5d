#!/usr/bin/env python3

"""
古典的EVT推定手法のレジストリ登録

MEP-PWM・Hill・QQ・MLの各手法を BaseTailEstimator として登録します。
既定では候補閾値をスキャンして裾のMSEが最小の閾値を選び、
Hill・QQ では k を指定すると上位 k 個の順序統計量で推定します。
"""

from typing import Any, Dict, Optional

import numpy as np

from ..core import BaseTailEstimator, constants, register_estimator
from .evt_baselines import TailFit, fit_at_k, select_threshold

# ============================================================================
# 閾値スキャン型の手法
# ============================================================================


class _ScanningEstimator(BaseTailEstimator):
    """候補閾値をスキャンする手法の共通部分"""

    def estimate(self, data: np.ndarray, **kwargs: Any) -> TailFit:
        options = self._extract_execution_options(**kwargs)
        return select_threshold(
            data,
            self.name,
            candidate_orders=options["candidate_orders"],
            min_exceedances=options["min_exceedances"],
        )

    def get_supported_options(self) -> Dict[str, Dict[str, Any]]:
        return self.get_common_options()


@register_estimator
class MepPwmEstimator(_ScanningEstimator):
    """平均超過プロットの候補閾値 + PWM推定"""

    def __init__(self) -> None:
        super().__init__(
            name=constants.EstimatorNames.MEP,
            description="MEP-PWM（候補閾値ごとのPWM推定、裾MSE最小）",
        )


@register_estimator
class MlEstimator(_ScanningEstimator):
    """候補閾値 + GPDの最尤推定"""

    def __init__(self) -> None:
        super().__init__(
            name=constants.EstimatorNames.ML,
            description="ML（候補閾値ごとのGPD最尤推定、裾MSE最小）",
        )


# ============================================================================
# 順序統計量型の手法
# ============================================================================


class _OrderStatisticEstimator(BaseTailEstimator):
    """Hill・QQ の共通部分（k 指定時は上位 k 個、未指定時はスキャン）"""

    def estimate(self, data: np.ndarray, **kwargs: Any) -> TailFit:
        k: Optional[int] = kwargs.get("k")
        if k is not None:
            return fit_at_k(data, self.name, k)
        options = self._extract_execution_options(**kwargs)
        return select_threshold(
            data,
            self.name,
            candidate_orders=options["candidate_orders"],
            min_exceedances=options["min_exceedances"],
        )

    def get_supported_options(self) -> Dict[str, Dict[str, Any]]:
        options = self.get_common_options()
        options["k"] = {
            "type": int,
            "default": None,
            "help": "上位順序統計量の数（指定時は閾値スキャンを行わない）",
        }
        return options


@register_estimator
class HillEstimator(_OrderStatisticEstimator):
    """Hill推定量（GPD尺度は beta = xi * 閾値）"""

    def __init__(self) -> None:
        super().__init__(name=constants.EstimatorNames.HILL, description="Hill推定量")


@register_estimator
class QqEstimator(_OrderStatisticEstimator):
    """QQ推定量（GPD尺度は beta = xi * 閾値）"""

    def __init__(self) -> None:
        super().__init__(name=constants.EstimatorNames.QQ, description="QQ推定量")
