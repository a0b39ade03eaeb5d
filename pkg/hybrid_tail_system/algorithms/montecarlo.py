#!/usr/bin/env python3

"""
モンテカルロ検証

真のパラメータ θ から訓練・テスト標本の組を N 回生成し、訓練標本ごとに
自己キャリブレーションを行って、パラメータごとの平均・分散・MSE・平均の検定と、
テスト標本上の対数尤度比の平均 D を集計します。

反復 q の乱数は SeedSequence(seed, spawn_key=(q,)) から作るため、
実行順や並列度によらず結果は同じになります。
"""

import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtr

from ..core.constants import REGIMES, EstimatorNames, MonteCarloDefaults, ParameterNames
from ..core.exceptions import (
    EmptyDataError,
    EstimationError,
    InvalidConfigError,
    NonFiniteDensityError,
    TooManyFailuresError,
    ZeroVarianceError,
)
from ..core.executor import ExecutionResult, ParallelExecutor, SequentialExecutor, Task
from ..core.logging_config import get_logger
from ..core.types import McReportData, ParameterStatsData
from ..utils.validation import validate_open_interval
from .calibrator import FitConfig, fit
from .evt_baselines import mle_gpd, pwm_gpd
from .hybrid_model import HybridModel, ModelParams

logger = get_logger(__name__)

SELF_CALIBRATED = "self-calibrated"


# ============================================================================
# 設定
# ============================================================================


@dataclass(frozen=True)
class McConfig:
    """
    モンテカルロ検証の設定

    Attributes:
        theta_true: 真のパラメータ
        n: 訓練標本のサイズ
        l: テスト標本のサイズ
        replicates: 反復回数 N（2以上）
        delta: 平均の検定の有意水準
        fit_config: 自己キャリブレーションの設定
        seed: 親シード
        workers: 並列ワーカー数（1なら逐次実行）
        use_processes: プロセス並列にするか
        max_failure_rate: 許容する失敗反復の割合
        shared_seed: 全反復で同じ乱数列を使う（分散0の検証用）
    """

    theta_true: ModelParams
    n: int = MonteCarloDefaults.TRAIN_SIZE
    l: int = MonteCarloDefaults.TEST_SIZE  # noqa: E741
    replicates: int = MonteCarloDefaults.REPLICATES
    delta: float = MonteCarloDefaults.DELTA
    fit_config: FitConfig = field(default_factory=FitConfig)
    seed: int = MonteCarloDefaults.SEED
    workers: Optional[int] = 1
    use_processes: bool = False
    max_failure_rate: float = MonteCarloDefaults.MAX_FAILURE_RATE
    shared_seed: bool = False

    def __post_init__(self) -> None:
        if self.replicates < 2:
            msg = f"反復回数は2以上で指定してください: N={self.replicates}"
            raise InvalidConfigError(msg)
        if self.n < self.fit_config.min_sample_size:
            msg = f"訓練標本のサイズが小さすぎます: n={self.n}"
            raise InvalidConfigError(msg)
        if self.l < 1:
            msg = f"テスト標本のサイズは1以上で指定してください: l={self.l}"
            raise InvalidConfigError(msg)
        if self.workers is not None and self.workers < 1:
            msg = f"ワーカー数は1以上で指定してください: {self.workers}"
            raise InvalidConfigError(msg)
        validate_open_interval(self.delta, 0.0, 1.0, "delta")
        validate_open_interval(self.max_failure_rate, 0.0, 1.0, "max_failure_rate")

    def replicate_seeds(self, index: int) -> Tuple[int, int]:
        """反復 index の (訓練用, テスト用) シード"""
        key = 0 if self.shared_seed else index
        state = np.random.SeedSequence(self.seed, spawn_key=(key,)).generate_state(2)
        return int(state[0]), int(state[1])

    def to_dict(self) -> Dict[str, Any]:
        values = {
            k: v for k, v in self.__dict__.items() if k not in ("theta_true", "fit_config")
        }
        values["theta_true"] = self.theta_true.to_dict()
        values["fit_config"] = self.fit_config.to_dict()
        return values


def regime_config(name: str, **overrides: Any) -> McConfig:
    """
    プリセット名から McConfig を作る（rho はプリセットの値）

    Raises:
        InvalidConfigError: 未知のプリセット名
    """
    if name not in REGIMES:
        msg = f"未知のプリセットです: {name!r} (利用可能: {', '.join(REGIMES)})"
        raise InvalidConfigError(msg)
    theta, rho = REGIMES[name]
    fit_config = replace(overrides.pop("fit_config", FitConfig()), rho=rho)
    return McConfig(theta_true=ModelParams(*theta), fit_config=fit_config, **overrides)


# ============================================================================
# 統計量
# ============================================================================


@dataclass(frozen=True)
class ParameterStats:
    """
    1パラメータの推定値の統計量

    Attributes:
        true_value: 真値
        mean: 推定値の平均
        variance: 不偏分散
        mse: 平均二乗誤差 sum (a_q - a)^2 / N
        t_stat: (mean - a) / sqrt(variance)（分散0ならNone）
        p_value: 2(1 - Phi(|T|))（分散0ならNone）
        degenerate: 分散0で検定が定義できない
    """

    true_value: float
    mean: float
    variance: float
    mse: float
    t_stat: Optional[float]
    p_value: Optional[float]
    degenerate: bool = False

    def accepted(self, delta: float = MonteCarloDefaults.DELTA) -> Optional[bool]:
        """p値が delta を超えれば「平均 = 真値」を棄却しない"""
        if self.p_value is None:
            return None
        return self.p_value > delta

    def to_dict(self) -> ParameterStatsData:
        return {
            "true_value": self.true_value,
            "mean": self.mean,
            "variance": self.variance,
            "mse": self.mse,
            "t_stat": self.t_stat,
            "p_value": self.p_value,
            "degenerate": self.degenerate,
        }


def _moments(estimates: Sequence[float], true_value: float) -> Tuple[float, float, float]:
    values = np.asarray(estimates, dtype=float)
    if values.size < 2:
        msg = f"統計量の計算には2個以上の推定値が必要です: {values.size}"
        raise EmptyDataError(msg)
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1))
    mse = float(np.mean((values - true_value) ** 2))
    return mean, variance, mse


def parameter_stats(estimates: Sequence[float], true_value: float) -> ParameterStats:
    """
    推定値の平均・不偏分散・MSE と平均の検定

    Args:
        estimates: 各反復の推定値（2個以上）
        true_value: 真値

    Returns:
        ParameterStats

    Raises:
        ZeroVarianceError: 不偏分散が0

    Examples:
        >>> s = parameter_stats([1.0, 3.0], 2.0)
        >>> s.mean, s.variance, s.mse, s.t_stat, s.p_value
        (2.0, 2.0, 1.0, 0.0, 1.0)
    """
    mean, variance, mse = _moments(estimates, true_value)
    if variance == 0.0:
        msg = "推定値の分散が0のため検定統計量が定義できません"
        raise ZeroVarianceError(msg)
    t_stat = (mean - true_value) / math.sqrt(variance)
    p_value = float(2.0 * ndtr(-abs(t_stat)))
    return ParameterStats(true_value, mean, variance, mse, t_stat, p_value)


def summarize_estimates(estimates: Sequence[float], true_value: float) -> ParameterStats:
    """parameter_stats と同じだが、分散0は degenerate として返す"""
    try:
        return parameter_stats(estimates, true_value)
    except ZeroVarianceError:
        mean, variance, mse = _moments(estimates, true_value)
        return ParameterStats(true_value, mean, variance, mse, None, None, degenerate=True)


def log_ratio_sum(test: np.ndarray, theta_true: ModelParams, theta_hat: ModelParams) -> float:
    """
    テスト標本上の sum log(h(y; θ) / h(y; θ̂))

    Raises:
        NonFiniteDensityError: いずれかのモデルで密度0の点がある
    """
    true_log = np.asarray(HybridModel.from_params(theta_true).logpdf(test))
    hat_log = np.asarray(HybridModel.from_params(theta_hat).logpdf(test))
    if not (np.all(np.isfinite(true_log)) and np.all(np.isfinite(hat_log))):
        msg = "テスト点で密度が0または有限でありません"
        raise NonFiniteDensityError(msg)
    return float(np.sum(true_log - hat_log))


def d_metric(
    test_sets: Sequence[Sequence[float]],
    theta_true: ModelParams,
    theta_hats: Sequence[ModelParams],
) -> float:
    """
    対数尤度比の平均 D = (1/(N l)) sum_q sum_j log(h(y_j; θ) / h(y_j; θ̂_q))

    Raises:
        InvalidConfigError: テスト標本と推定値の数が一致しない
        NonFiniteDensityError: 密度0の点がある
    """
    if len(test_sets) != len(theta_hats) or not test_sets:
        msg = f"テスト標本 ({len(test_sets)}) と推定値 ({len(theta_hats)}) の数が一致しません"
        raise InvalidConfigError(msg)
    total = 0.0
    count = 0
    for test, theta_hat in zip(test_sets, theta_hats):
        values = np.asarray(test, dtype=float)
        total += log_ratio_sum(values, theta_true, theta_hat)
        count += values.size
    return total / count


# ============================================================================
# 反復
# ============================================================================


@dataclass(frozen=True)
class ReplicateOutcome:
    """1反復の結果"""

    index: int
    theta_hat: ModelParams
    iterations: int
    stop_reason: str
    elapsed: float
    log_ratio_sum: float
    test_size: int


def run_replicate(index: int, cfg: McConfig) -> ReplicateOutcome:
    """反復 index の訓練・テスト標本を生成して推定する"""
    train_seed, test_seed = cfg.replicate_seeds(index)
    model = HybridModel.from_params(cfg.theta_true)
    train = model.sample(cfg.n, seed=train_seed)
    test = model.sample(cfg.l, seed=test_seed)

    start = time.perf_counter()
    result = fit(train, cfg.fit_config)
    elapsed = time.perf_counter() - start

    return ReplicateOutcome(
        index=index,
        theta_hat=result.theta,
        iterations=result.iterations,
        stop_reason=result.stop_reason,
        elapsed=elapsed,
        log_ratio_sum=log_ratio_sum(test, cfg.theta_true, result.theta),
        test_size=test.size,
    )


def _executor(cfg: McConfig) -> Any:
    if cfg.workers == 1:
        return SequentialExecutor()
    return ParallelExecutor(max_workers=cfg.workers, use_processes=cfg.use_processes)


def _run_tasks(
    cfg: McConfig,
    function: Callable[[int, McConfig], Any],
    progress_callback: Optional[Callable[[str], None]] = None,
) -> Tuple[List[Any], List[ExecutionResult]]:
    tasks = [
        Task(name=f"replicate-{q}", function=function, args=(q, cfg))
        for q in range(cfg.replicates)
    ]
    results = _executor(cfg).execute_multiple(tasks, progress_callback)
    successes = [r.result for r in results if r.success]
    failures = [r for r in results if not r.success]

    limit = cfg.max_failure_rate * cfg.replicates
    if len(failures) > limit or len(successes) < 2:
        msg = (
            f"失敗した反復が多すぎます: {len(failures)}/{cfg.replicates} "
            f"(許容割合 {cfg.max_failure_rate:.0%})"
        )
        raise TooManyFailuresError(msg)
    for failure in failures:
        logger.warning(f"{failure.task_name} を除外: {failure.error_type}: {failure.error}")
    return successes, failures


def _failure_records(failures: Sequence[ExecutionResult]) -> List[Dict[str, Any]]:
    return [
        {"index": f.index, "error_type": f.error_type, "message": f.error} for f in failures
    ]


@dataclass(frozen=True)
class McReport:
    """
    モンテカルロ検証の報告

    Attributes:
        parameters: パラメータ名 -> 統計量（mu, sigma, u2, xi の順）
        d_metric: 対数尤度比の平均 D
        average_execution_seconds: 1反復あたりの平均推定時間
        average_outer_iterations: 平均外側反復回数
        n_success: 成功した反復数
        failures: 除外した反復の記録
        stop_reasons: 停止理由ごとの反復数
        config: 設定
    """

    parameters: Dict[str, ParameterStats]
    d_metric: float
    average_execution_seconds: float
    average_outer_iterations: float
    n_success: int
    failures: Tuple[Dict[str, Any], ...] = ()
    stop_reasons: Dict[str, int] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    def to_dict(self, include_timing: bool = True) -> McReportData:
        result: McReportData = {
            "parameters": {name: s.to_dict() for name, s in self.parameters.items()},
            "d_metric": self.d_metric,
            "average_outer_iterations": self.average_outer_iterations,
            "n_success": self.n_success,
            "n_failed": self.failure_count,
            "failures": list(self.failures),
            "stop_reasons": dict(self.stop_reasons),
            "config": self.config,
        }
        if include_timing:
            result["average_execution_seconds"] = self.average_execution_seconds
        return result


def run_mc(
    cfg: McConfig, progress_callback: Optional[Callable[[str], None]] = None
) -> McReport:
    """
    モンテカルロ検証を実行

    Args:
        cfg: 設定
        progress_callback: 反復ごとの進捗コールバック

    Returns:
        McReport

    Raises:
        TooManyFailuresError: 失敗した反復が許容割合を超えた
    """
    logger.info(
        f"モンテカルロ検証開始: θ={cfg.theta_true.as_array().tolist()}, "
        f"n={cfg.n}, l={cfg.l}, N={cfg.replicates}"
    )
    outcomes, failures = _run_tasks(cfg, run_replicate, progress_callback)
    outcomes.sort(key=lambda o: o.index)

    parameters = {}
    for name in ParameterNames.ALL:
        estimates = [getattr(o.theta_hat, name) for o in outcomes]
        parameters[name] = summarize_estimates(estimates, getattr(cfg.theta_true, name))

    total_points = sum(o.test_size for o in outcomes)
    stop_reasons: Dict[str, int] = {}
    for outcome in outcomes:
        stop_reasons[outcome.stop_reason] = stop_reasons.get(outcome.stop_reason, 0) + 1

    report = McReport(
        parameters=parameters,
        d_metric=sum(o.log_ratio_sum for o in outcomes) / total_points,
        average_execution_seconds=float(np.mean([o.elapsed for o in outcomes])),
        average_outer_iterations=float(np.mean([o.iterations for o in outcomes])),
        n_success=len(outcomes),
        failures=tuple(_failure_records(failures)),
        stop_reasons=dict(sorted(stop_reasons.items())),
        config=cfg.to_dict(),
    )
    logger.info(
        f"モンテカルロ検証終了: 成功={report.n_success}, 失敗={report.failure_count}, "
        f"D={report.d_metric:.3e}"
    )
    return report


# ============================================================================
# GPD推定量の比較（ML・PWM・自己キャリブレーション）
# ============================================================================


def run_gpd_comparison_replicate(index: int, cfg: McConfig) -> Dict[str, Tuple[float, float]]:
    """
    自己キャリブレーションの閾値 û2 を超える超過量に ML・PWM を当てはめる

    Returns:
        手法名 -> (xi, beta)。推定できなかった手法は含まない
    """
    train_seed, _ = cfg.replicate_seeds(index)
    train = HybridModel.from_params(cfg.theta_true).sample(cfg.n, seed=train_seed)
    theta_hat = fit(train, cfg.fit_config).theta

    estimates = {SELF_CALIBRATED: (theta_hat.xi, theta_hat.xi * theta_hat.u2)}
    excesses = train[train > theta_hat.u2] - theta_hat.u2
    for name, estimator in ((EstimatorNames.ML, mle_gpd), (EstimatorNames.MEP, pwm_gpd)):
        try:
            estimates[name] = estimator(excesses)
        except (EstimationError, EmptyDataError) as e:
            logger.debug(f"反復{index}: {name} を推定できません: {e}")
    return estimates


@dataclass(frozen=True)
class GpdComparisonReport:
    """手法ごとの xi・beta の統計量"""

    methods: Dict[str, Dict[str, ParameterStats]]
    n_success: int
    failures: Tuple[Dict[str, Any], ...] = ()
    config: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "methods": {
                method: {name: s.to_dict() for name, s in values.items()}
                for method, values in self.methods.items()
            },
            "n_success": self.n_success,
            "n_failed": len(self.failures),
            "failures": list(self.failures),
            "config": self.config,
        }


def compare_gpd_estimators(
    cfg: McConfig, progress_callback: Optional[Callable[[str], None]] = None
) -> GpdComparisonReport:
    """
    反復ごとに ML・PWM・自己キャリブレーションの (xi, beta) を比較

    真の beta は xi * u2。

    Raises:
        TooManyFailuresError: 失敗した反復が許容割合を超えた
    """
    outcomes, failures = _run_tasks(cfg, run_gpd_comparison_replicate, progress_callback)
    true_xi = cfg.theta_true.xi
    true_beta = cfg.theta_true.xi * cfg.theta_true.u2

    methods: Dict[str, Dict[str, ParameterStats]] = {}
    for method in (EstimatorNames.ML, EstimatorNames.MEP, SELF_CALIBRATED):
        pairs = [o[method] for o in outcomes if method in o]
        if len(pairs) < 2:
            logger.warning(f"{method}: 推定できた反復が2未満のため集計しません")
            continue
        methods[method] = {
            "xi": summarize_estimates([p[0] for p in pairs], true_xi),
            "beta": summarize_estimates([p[1] for p in pairs], true_beta),
        }

    return GpdComparisonReport(
        methods=methods,
        n_success=len(outcomes),
        failures=tuple(_failure_records(failures)),
        config=cfg.to_dict(),
    )
