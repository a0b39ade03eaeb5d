#!/usr/bin/env python3

"""
型定義モジュール

JSON出力に現れる辞書の形をTypedDictで定義します。
"""

from typing import Any, Dict, List, Optional, TypedDict

# ============================================================================
# モデルパラメータ型
# ============================================================================


class ModelParamsData(TypedDict):
    """
    自由パラメータ θ の辞書表現

    Attributes:
        mu: ガウス成分の位置
        sigma: ガウス成分の尺度
        u2: 裾閾値
        xi: 裾指数
    """

    mu: float
    sigma: float
    u2: float
    xi: float


# 制約から決まる従属パラメータの辞書表現（"lambda" は予約語のため関数形式）
DerivedParamsData = TypedDict(
    "DerivedParamsData",
    {
        "beta": float,
        "lambda": float,
        "u1": float,
        "gamma1": float,
        "gamma2": float,
        "gamma3": float,
    },
)


# ============================================================================
# キャリブレーション結果型
# ============================================================================


class TraceEntryData(TypedDict):
    """外側反復1回分の記録"""

    iteration: int
    theta: ModelParamsData
    full_mse: float
    tail_mse: float


class FitResultData(TypedDict, total=False):
    """
    自己キャリブレーション結果の辞書表現

    Attributes:
        theta: 推定された自由パラメータ
        derived: 従属パラメータ
        iterations: 外側反復回数
        stop_reason: 停止理由
        full_mse: 条件C1の距離
        tail_mse: 条件C2の距離
        trace: 反復履歴（省略可）
        initial_theta: 初期値
    """

    theta: ModelParamsData
    derived: DerivedParamsData
    iterations: int
    stop_reason: str
    full_mse: float
    tail_mse: float
    trace: List[TraceEntryData]
    initial_theta: ModelParamsData


class TailFitData(TypedDict):
    """古典的EVT推定結果の辞書表現"""

    method: str
    threshold: float
    threshold_order: float
    n_exceedances: int
    xi: float
    beta: float
    tail_mse: float


# ============================================================================
# モンテカルロ結果型
# ============================================================================


class ParameterStatsData(TypedDict):
    """
    パラメータごとの統計量

    Attributes:
        true_value: 真値
        mean: 推定値の平均
        variance: 不偏分散
        mse: 平均二乗誤差
        t_stat: 平均の検定統計量（分散0のときNone）
        p_value: p値（分散0のときNone）
        degenerate: 分散0で検定が定義できないか
    """

    true_value: float
    mean: float
    variance: float
    mse: float
    t_stat: Optional[float]
    p_value: Optional[float]
    degenerate: bool


class McReportData(TypedDict, total=False):
    """モンテカルロ報告の辞書表現"""

    parameters: Dict[str, ParameterStatsData]
    d_metric: float
    average_execution_seconds: float
    average_outer_iterations: float
    n_success: int
    n_failed: int
    failures: List[Dict[str, Any]]
    stop_reasons: Dict[str, int]
    config: Dict[str, Any]


# ============================================================================
# 実行結果型
# ============================================================================


class ExecutionResultData(TypedDict):
    """
    タスク実行結果の型定義

    Attributes:
        task_name: タスク名
        index: タスク番号
        success: 成功フラグ
        result: 結果（成功時）
        error: エラーメッセージ（失敗時）
        error_type: 例外クラス名（失敗時）
        execution_time: 実行時間（秒）
    """

    task_name: str
    index: int
    success: bool
    result: Any
    error: Optional[str]
    error_type: Optional[str]
    execution_time: float


class RunManifestData(TypedDict, total=False):
    """出力ファイルに埋め込む実行記録"""

    command: str
    input_path: Optional[str]
    config: Dict[str, Any]
    tool_version: str
    timestamp: Optional[str]
