#!/usr/bin/env python3

"""
統一された例外階層

ハイブリッド裾分布キャリブレーションシステム全体で使用する例外クラスを定義します。
各例外はCLIの終了コードと分類名を持ちます。
"""

from typing import Optional

from .constants import ExitCodes


class HybridTailSystemError(Exception):
    """システム全体の基底例外クラス"""

    exit_code: int = ExitCodes.NUMERICAL
    category: str = "error"


# ============================================================================
# データ読み込み関連のエラー
# ============================================================================


class DataLoadError(HybridTailSystemError):
    """データ読み込みに関する基底例外クラス"""

    exit_code = ExitCodes.DATA
    category = "data"


class ParseError(DataLoadError):
    """数値として解釈できない行"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"{line_number}行目: {message}"
        super().__init__(message)


class EmptySeriesError(DataLoadError):
    """有効な値が1つも含まれない系列"""


class DataError(HybridTailSystemError):
    """入力標本そのものの不備"""

    exit_code = ExitCodes.DATA
    category = "data"


class EmptyDataError(DataError):
    """空の標本"""


class DegenerateRangeError(DataError):
    """最大値と最小値が一致する標本"""


# ============================================================================
# 検証関連のエラー
# ============================================================================


class ValidationError(HybridTailSystemError):
    """パラメータ・設定の検証エラー"""

    exit_code = ExitCodes.USAGE
    category = "usage"


class InvalidParameterError(ValidationError):
    """モデルパラメータの不正値"""


class InvalidGeometryError(ValidationError):
    """u1 = mu + lambda*sigma^2 が u2 を超える（指数ブリッジが存在しない）"""


class DomainError(ValidationError):
    """関数の定義域外の引数"""


class DegenerateJunctionError(ValidationError):
    """混合モデルの接合点で両密度が0"""


class InvalidConfigError(ValidationError):
    """設定値の不正"""


# ============================================================================
# アルゴリズム実行関連のエラー
# ============================================================================


class AlgorithmExecutionError(HybridTailSystemError):
    """数値計算の失敗"""

    exit_code = ExitCodes.NUMERICAL
    category = "numerical"


class AlgorithmNotFoundError(AlgorithmExecutionError):
    """未登録の推定手法"""

    exit_code = ExitCodes.USAGE
    category = "usage"


class AlgorithmRegistrationError(AlgorithmExecutionError):
    """推定手法の登録エラー"""


class SolverError(AlgorithmExecutionError):
    """Levenberg-Marquardtソルバーのエラー"""


class NonFiniteResidualError(SolverError):
    """初期点で残差がNaNまたは無限大"""


class SingularNormalEquationsError(SolverError):
    """最大減衰でも正規方程式が解けない"""


class CalibrationError(AlgorithmExecutionError):
    """自己キャリブレーションのエラー"""


class AllStepsFailedError(CalibrationError):
    """初回反復で両ステップが失敗"""


class NoTailPointsError(CalibrationError):
    """裾条件の評価点が存在しない"""


class EstimationError(AlgorithmExecutionError):
    """古典的EVT推定量のエラー"""


class NonPositiveThresholdStatisticError(EstimationError):
    """閾値となる順序統計量が正でない"""


class DegenerateMomentsError(EstimationError):
    """PWM推定が有効範囲外"""


class NoInteriorMaximumError(EstimationError):
    """尤度が探索区間の内部で最大とならない"""


class NoValidCandidateError(EstimationError):
    """有効な閾値候補がない"""


class MonteCarloError(AlgorithmExecutionError):
    """モンテカルロ検証のエラー"""


class ZeroVarianceError(MonteCarloError):
    """推定値の分散が0で検定統計量が定義できない"""


class NonFiniteDensityError(MonteCarloError):
    """テスト点で密度が0"""


class TooManyFailuresError(MonteCarloError):
    """失敗した反復が許容割合を超えた"""
