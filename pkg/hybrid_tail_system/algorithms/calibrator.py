#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布の自己キャリブレーション

経験分布関数 H_n と対数間隔の合成グリッド上で、本体パラメータ p = (mu, sigma, u2)
と裾指数 xi を交互にLevenberg-Marquardt法で推定する。閾値 u2 の選択も
同じ最小二乗に含まれるため、人手による閾値選択は不要。

停止条件:
    C1: 全グリッドのMSE < epsilon
    C2: モデル分位点 q_alpha より上のグリッド点のMSE < epsilon
    C3: 反復回数が k_max に達した
    (C1 かつ C2) または C3 で停止。任意で xi の停滞、既定で反復の不動点化でも停止。
    第2反復以降に両ステップが失敗した場合は直前の θ で打ち切る。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.constants import LOG_FIT_DONE, LOG_FIT_START, FitDefaults, StopReasons
from ..core.exceptions import (
    AlgorithmExecutionError,
    AllStepsFailedError,
    InvalidConfigError,
    InvalidGeometryError,
    NoTailPointsError,
    ValidationError,
)
from ..core.logging_config import get_logger
from ..core.types import FitResultData, TraceEntryData
from ..utils.validation import (
    validate_nondegenerate,
    validate_open_interval,
    validate_positive,
    validate_probability,
    validate_sample,
)
from .hybrid_model import ArrayLike, DerivedParams, HybridModel, ModelParams, _finish
from .lm_solver import (
    IdentityTransform,
    LmOptions,
    LmProblem,
    LogisticTransform,
    LogTransform,
    solve,
)

logger = get_logger(__name__)

# 分位点の添字 ceil(p*n) で p*n の丸め誤差を吸収する桁数
_QUANTILE_ROUND_DIGITS = 9
# u2 の比率パラメータを内部座標へ送るときの余裕
_FRACTION_EDGE = 1e-12


# ============================================================================
# 経験分布関数と合成グリッド
# ============================================================================


@dataclass(frozen=True)
class EmpiricalCdf:
    """
    経験分布関数 H_n(t) = #{x_i <= t} / n

    Attributes:
        sorted_sample: 昇順に並べた標本
    """

    sorted_sample: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.sorted_sample.size)

    def __call__(self, t: ArrayLike) -> Any:
        values = np.asarray(t, dtype=float)
        counts = np.searchsorted(self.sorted_sample, values, side="right")
        return _finish(np.asarray(counts / self.size, dtype=float), values.ndim == 0)

    def quantile(self, p: float) -> float:
        """
        経験分位点（順序統計量 x_(ceil(p*n))）

        Examples:
            >>> empirical_cdf([3.0, 1.0, 2.0, 4.0]).quantile(0.5)
            2.0
        """
        validate_probability(p)
        n = self.size
        index = int(np.ceil(np.round(p * n, _QUANTILE_ROUND_DIGITS)))
        index = min(max(index, 1), n)
        return float(self.sorted_sample[index - 1])


def empirical_cdf(data: Sequence[float]) -> EmpiricalCdf:
    """
    標本から経験分布関数を作成

    Raises:
        EmptyDataError: 空の標本
        DomainError: NaNや無限大を含む
    """
    values = validate_sample(data)
    return EmpiricalCdf(sorted_sample=np.sort(values))


@dataclass(frozen=True)
class SyntheticGrid:
    """データ範囲上の対数間隔の合成グリッド"""

    points: np.ndarray = field(repr=False)
    data_min: float
    data_max: float

    @property
    def size(self) -> int:
        return int(self.points.size)


def synthetic_grid(data: Sequence[float], m: int) -> SyntheticGrid:
    """
    合成グリッド y_j = min + (max - min) * log10(1 + 9(j-1)/(m-1))

    Args:
        data: 標本
        m: グリッド点数（2以上）

    Returns:
        SyntheticGrid: 両端がデータの最小値・最大値に一致する狭義単調増加列

    Raises:
        InvalidConfigError: m < 2
        DegenerateRangeError: 最大値 == 最小値
    """
    if m < 2:
        msg = f"グリッド点数は2以上で指定してください: m={m}"
        raise InvalidConfigError(msg)
    values = validate_sample(data)
    low, high = validate_nondegenerate(values)

    steps = np.arange(m, dtype=float)
    points = low + (high - low) * np.log10(1.0 + 9.0 * steps / (m - 1))
    points[0] = low
    points[-1] = high
    return SyntheticGrid(points=points, data_min=low, data_max=high)


def estimate_mode(data: Sequence[float], rule: str = FitDefaults.MODE_RULE) -> float:
    """
    ヒストグラムの最頻ビンの中心

    同数のビンが複数ある場合は小さい側を選ぶ。

    Args:
        data: 標本（10点以上）
        rule: numpy.histogram_bin_edges のビン幅規則（"fd", "sturges" など）

    Returns:
        最頻ビンの中心

    Raises:
        EmptyDataError: 空、または10点未満
        InvalidConfigError: 未知のビン幅規則
    """
    values = validate_sample(data, min_size=10)
    try:
        edges = np.histogram_bin_edges(values, bins=rule)
    except ValueError as e:
        msg = f"未知のビン幅規則です: {rule!r}"
        raise InvalidConfigError(msg) from e
    counts, _ = np.histogram(values, bins=edges)
    top = int(np.argmax(counts))
    return float(0.5 * (edges[top] + edges[top + 1]))


# ============================================================================
# 設定と結果
# ============================================================================


@dataclass(frozen=True)
class FitConfig:
    """
    自己キャリブレーションの設定

    Attributes:
        epsilon: 条件C1・C2のMSE許容値
        alpha: 条件C2の分位次数
        rho: 初期閾値 u2 の分位次数
        k_max: 外側反復の上限（条件C3）
        m: 合成グリッドの点数（Noneなら max(n, 10^4)）
        xi_stagnation_epsilon: xi 停滞による追加停止の許容値（Noneで無効）
        stationary_tol: 1反復での θ の相対変化がこれ未満なら停止（Noneで無効）
        mode_rule: 最頻値推定のビン幅規則
        sigma_quantile: 初期 sigma に使う分位次数
        min_sample_size: 必要な最小標本サイズ
        seed: 乱数シード（記録用。fit 自体は決定的）
        solver: 内側のLM設定
    """

    epsilon: float = FitDefaults.EPSILON
    alpha: float = FitDefaults.ALPHA
    rho: float = FitDefaults.RHO
    k_max: int = FitDefaults.K_MAX
    m: Optional[int] = None
    xi_stagnation_epsilon: Optional[float] = None
    stationary_tol: Optional[float] = FitDefaults.STATIONARY_TOL
    mode_rule: str = FitDefaults.MODE_RULE
    sigma_quantile: float = FitDefaults.SIGMA_QUANTILE
    min_sample_size: int = FitDefaults.MIN_SAMPLE_SIZE
    seed: int = 0
    solver: LmOptions = field(default_factory=LmOptions)

    def __post_init__(self) -> None:
        validate_positive(self.epsilon, "epsilon")
        validate_open_interval(self.alpha, 0.5, 1.0, "alpha")
        validate_open_interval(self.rho, 0.5, 1.0, "rho")
        validate_open_interval(self.sigma_quantile, 0.0, 0.5, "sigma_quantile")
        if self.k_max < 1:
            msg = f"k_max は1以上で指定してください: {self.k_max}"
            raise InvalidConfigError(msg)
        if self.m is not None and self.m < 2:
            msg = f"グリッド点数は2以上で指定してください: m={self.m}"
            raise InvalidConfigError(msg)
        if self.min_sample_size < 2:
            msg = f"min_sample_size は2以上で指定してください: {self.min_sample_size}"
            raise InvalidConfigError(msg)
        if self.xi_stagnation_epsilon is not None:
            validate_positive(self.xi_stagnation_epsilon, "xi_stagnation_epsilon")
        if self.stationary_tol is not None:
            validate_positive(self.stationary_tol, "stationary_tol")

    def grid_size(self, n: int) -> int:
        """標本サイズ n に対するグリッド点数"""
        if self.m is not None:
            return self.m
        return max(n, FitDefaults.MIN_GRID_SIZE)

    def to_dict(self) -> Dict[str, Any]:
        values = {k: v for k, v in self.__dict__.items() if k != "solver"}
        values["solver"] = self.solver.to_dict()
        return values


@dataclass(frozen=True)
class TraceEntry:
    """外側反復1回分の記録"""

    iteration: int
    theta: ModelParams
    full_mse: float
    tail_mse: float

    def to_dict(self) -> TraceEntryData:
        return {
            "iteration": self.iteration,
            "theta": self.theta.to_dict(),
            "full_mse": self.full_mse,
            "tail_mse": self.tail_mse,
        }


@dataclass(frozen=True)
class FitResult:
    """
    自己キャリブレーションの結果

    Attributes:
        theta: 推定された自由パラメータ
        derived: 従属パラメータ
        iterations: 外側反復回数
        stop_reason: 停止理由（StopReasons）
        full_mse: theta での条件C1の距離
        tail_mse: theta での条件C2の距離
        trace: 反復ごとの記録
        initial_theta: 初期値
    """

    theta: ModelParams
    derived: DerivedParams
    iterations: int
    stop_reason: str
    full_mse: float
    tail_mse: float
    trace: Tuple[TraceEntry, ...] = field(default=(), repr=False)
    initial_theta: Optional[ModelParams] = None

    @property
    def model(self) -> HybridModel:
        return HybridModel(params=self.theta, derived=self.derived)

    def to_dict(self, include_trace: bool = True) -> FitResultData:
        result: FitResultData = {
            "theta": self.theta.to_dict(),
            "derived": self.derived.to_dict(),
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "full_mse": self.full_mse,
            "tail_mse": self.tail_mse,
        }
        if self.initial_theta is not None:
            result["initial_theta"] = self.initial_theta.to_dict()
        if include_trace:
            result["trace"] = [entry.to_dict() for entry in self.trace]
        return result


# ============================================================================
# 目的関数
# ============================================================================


def _cdf_residuals(theta: ModelParams, grid: SyntheticGrid, targets: np.ndarray) -> np.ndarray:
    model = HybridModel.from_params(theta)
    return np.asarray(model.cdf(grid.points)) - targets


def _sse(theta: ModelParams, grid: SyntheticGrid, targets: np.ndarray) -> float:
    residuals = _cdf_residuals(theta, grid, targets)
    return float(residuals @ residuals)


def full_mse(theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid) -> float:
    """全グリッド点での H(y; θ) と H_n(y) の平均二乗誤差（条件C1の距離）"""
    residuals = _cdf_residuals(theta, grid, np.asarray(ecdf(grid.points)))
    return float(np.mean(residuals**2))


def tail_mse(
    theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid, alpha: float = FitDefaults.ALPHA
) -> float:
    """
    モデル分位点 q_alpha より上のグリッド点に限った平均二乗誤差（条件C2の距離）

    Args:
        theta: 自由パラメータ
        ecdf: 経験分布関数
        grid: 合成グリッド
        alpha: 分位次数 (0, 1)

    Returns:
        平均二乗誤差

    Raises:
        DomainError: alpha が (0, 1) の外側
        NoTailPointsError: q_alpha より上のグリッド点がない
    """
    validate_probability(alpha, "alpha")
    model = HybridModel.from_params(theta)
    threshold = float(model.quantile(alpha))
    points = grid.points[grid.points > threshold]
    if points.size == 0:
        msg = f"q_{alpha} = {threshold:.6g} より上にグリッド点がありません"
        raise NoTailPointsError(msg)
    residuals = np.asarray(model.cdf(points)) - np.asarray(ecdf(points))
    return float(np.mean(residuals**2))


# ============================================================================
# 初期化と交互推定の各ステップ
# ============================================================================


def _feasible_u2_lower(mu: float, sigma: float, xi: float) -> float:
    """xi を固定したとき u1 <= u2 となる u2 の下限"""
    return 0.5 * (mu + math.sqrt(mu * mu + 4.0 * (1.0 + xi) * sigma * sigma / xi))


def _xi_lower(mu: float, sigma: float, u2: float) -> float:
    """
    p を固定したとき u1 <= u2 となる xi の下限

    Raises:
        InvalidGeometryError: どの xi > 0 でも指数ブリッジが存在しない
    """
    ratio = (u2 - mu) * u2 / (sigma * sigma)
    if not ratio > 1.0:
        msg = f"p = (mu={mu!r}, sigma={sigma!r}, u2={u2!r}) ではどの xi でも u1 <= u2 になりません"
        raise InvalidGeometryError(msg)
    return 1.0 / (ratio - 1.0)


def initialize(data: Sequence[float], cfg: Optional[FitConfig] = None) -> Tuple[np.ndarray, float]:
    """
    初期値 p0 = (mu0, sigma0, u20) と xi0 を求める

    mu0 はデータの最頻値、sigma0 は |mu0 - q_16%|、u20 は q_rho。
    xi0 は p0 を固定した最小二乗で求める。

    Args:
        data: 標本
        cfg: 設定

    Returns:
        (p0, xi0)

    Raises:
        DegenerateRangeError: 最大値 == 最小値
        InvalidGeometryError: u20 が mu0 と 0 のどちらも上回らない
    """
    cfg = cfg or FitConfig()
    values = validate_sample(data, min_size=10)
    validate_nondegenerate(values)
    ecdf = empirical_cdf(values)

    mu0 = estimate_mode(values, cfg.mode_rule)
    sigma0 = abs(mu0 - ecdf.quantile(cfg.sigma_quantile))
    if sigma0 <= 0:
        sigma0 = float(np.std(values))
        logger.warning(f"初期sigmaが0のため標本標準偏差を使用します: {sigma0:.6g}")

    u20 = ecdf.quantile(cfg.rho)
    if u20 <= max(mu0, 0.0):
        msg = f"初期閾値 q_{cfg.rho} = {u20!r} が最頻値 {mu0!r} と 0 を上回っていません"
        raise InvalidGeometryError(msg)

    # xi <= 1 で指数ブリッジが存在するよう sigma0 を抑える
    sigma_cap = math.sqrt(0.5 * (u20 - mu0) * u20)
    if sigma0 > sigma_cap:
        logger.debug(f"初期sigmaを {sigma0:.6g} から {sigma_cap:.6g} に制限")
        sigma0 = sigma_cap

    p0 = np.array([mu0, sigma0, u20])
    grid = synthetic_grid(values, cfg.grid_size(values.size))
    xi_start = max(1.0, 2.0 * _xi_lower(mu0, sigma0, u20))
    xi0 = step_xi(grid, ecdf, p0, xi_start, cfg.solver)

    logger.debug(f"初期値: mu0={mu0:.6g}, sigma0={sigma0:.6g}, u20={u20:.6g}, xi0={xi0:.6g}")
    return p0, xi0


def step_p(
    grid: SyntheticGrid,
    ecdf: EmpiricalCdf,
    xi_fixed: float,
    p_prev: Sequence[float],
    opts: Optional[LmOptions] = None,
) -> np.ndarray:
    """
    xi を固定して p = (mu, sigma, u2) を最小二乗で更新

    u2 は実行可能域の下限 L(mu, sigma) と上限の間の比率 s で表し、
    探索中の全点で u1 <= u2 が保たれる。

    Args:
        grid: 合成グリッド
        ecdf: 経験分布関数
        xi_fixed: 固定する裾指数
        p_prev: 直前の p（実行可能）
        opts: LM設定

    Returns:
        np.ndarray: 更新後の p。目的関数が下がらなければ p_prev

    Raises:
        SolverError: LMソルバーの失敗
    """
    mu0, sigma0, u2_prev = (float(v) for v in p_prev)
    targets = np.asarray(ecdf(grid.points))
    span = grid.data_max - grid.data_min
    margin = FitDefaults.U2_LOWER_MARGIN * span
    upper_cap = max(grid.data_max, u2_prev)

    def bounds(mu: float, sigma: float) -> Tuple[float, float]:
        lower = _feasible_u2_lower(mu, sigma, xi_fixed) + margin
        upper = upper_cap if upper_cap > lower else lower + span
        return lower, upper

    def to_theta(external: np.ndarray) -> ModelParams:
        mu, sigma, fraction = (float(v) for v in external)
        lower, upper = bounds(mu, sigma)
        return ModelParams(mu, sigma, lower + fraction * (upper - lower), xi_fixed)

    lower0, upper0 = bounds(mu0, sigma0)
    fraction0 = (u2_prev - lower0) / (upper0 - lower0)
    fraction0 = min(max(fraction0, _FRACTION_EDGE), 1.0 - _FRACTION_EDGE)

    problem = LmProblem(
        residuals=lambda ext: _cdf_residuals(to_theta(ext), grid, targets),
        dimension=3,
        residual_count=grid.size,
        transforms=(IdentityTransform(), LogTransform(0.0), LogisticTransform(0.0, 1.0)),
    )
    result = solve(problem, [mu0, sigma0, fraction0], opts)

    candidate = to_theta(result.solution)
    previous = ModelParams(mu0, sigma0, u2_prev, xi_fixed)
    if _sse(candidate, grid, targets) >= _sse(previous, grid, targets):
        return np.array([mu0, sigma0, u2_prev])
    return np.array([candidate.mu, candidate.sigma, candidate.u2])


def step_xi(
    grid: SyntheticGrid,
    ecdf: EmpiricalCdf,
    p_fixed: Sequence[float],
    xi_prev: float,
    opts: Optional[LmOptions] = None,
) -> float:
    """
    p を固定して xi > 0 を最小二乗で更新

    xi の下限は u1 <= u2 を保つ値 1/((u2 - mu)u2/sigma^2 - 1) とする。

    Returns:
        更新後の xi。目的関数が下がらなければ xi_prev

    Raises:
        InvalidGeometryError: p ではどの xi でも指数ブリッジが存在しない
        SolverError: LMソルバーの失敗
    """
    mu, sigma, u2 = (float(v) for v in p_fixed)
    targets = np.asarray(ecdf(grid.points))
    lower = max(_xi_lower(mu, sigma, u2), 0.0)
    start = xi_prev if xi_prev > lower else lower * (1.0 + 1e-6) + 1e-12

    def residuals(external: np.ndarray) -> np.ndarray:
        return _cdf_residuals(ModelParams(mu, sigma, u2, float(external[0])), grid, targets)

    problem = LmProblem(
        residuals=residuals,
        dimension=1,
        residual_count=grid.size,
        transforms=(LogTransform(lower),),
    )
    result = solve(problem, [start], opts)
    candidate = float(result.solution[0])

    if xi_prev <= lower:
        return candidate
    previous_sse = _sse(ModelParams(mu, sigma, u2, xi_prev), grid, targets)
    if _sse(ModelParams(mu, sigma, u2, candidate), grid, targets) >= previous_sse:
        return float(xi_prev)
    return candidate


# ============================================================================
# 外側ループ
# ============================================================================


def _relative_change(new: ModelParams, old: ModelParams) -> float:
    a, b = new.as_array(), old.as_array()
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny))


def fit(data: Sequence[float], cfg: Optional[FitConfig] = None) -> FitResult:
    """
    自己キャリブレーションで θ = [mu, sigma, u2, xi] を推定

    Args:
        data: 標本（min_sample_size 点以上、範囲が0でない）
        cfg: 設定

    Returns:
        FitResult: 推定結果と反復履歴

    Raises:
        EmptyDataError: 標本サイズ不足
        DegenerateRangeError: 最大値 == 最小値
        AllStepsFailedError: 第1反復で両ステップとも失敗
    """
    cfg = cfg or FitConfig()
    values = validate_sample(data, min_size=cfg.min_sample_size)
    validate_nondegenerate(values)

    ecdf = empirical_cdf(values)
    grid = synthetic_grid(values, cfg.grid_size(values.size))
    logger.info(LOG_FIT_START.format(values.size, grid.size))

    p, xi = initialize(values, cfg)
    theta = ModelParams(float(p[0]), float(p[1]), float(p[2]), xi)
    initial_theta = theta

    trace: List[TraceEntry] = []
    stop_reason = StopReasons.C3
    iterations = 0
    current_full = full_mse(theta, ecdf, grid)
    current_tail = tail_mse(theta, ecdf, grid, cfg.alpha)

    for k in range(1, cfg.k_max + 1):
        iterations = k
        failures: List[str] = []

        try:
            p_new = step_p(grid, ecdf, theta.xi, [theta.mu, theta.sigma, theta.u2], cfg.solver)
        except (AlgorithmExecutionError, ValidationError) as e:
            failures.append(f"p: {e}")
            p_new = np.array([theta.mu, theta.sigma, theta.u2])

        try:
            xi_new = step_xi(grid, ecdf, p_new, theta.xi, cfg.solver)
        except (AlgorithmExecutionError, ValidationError) as e:
            failures.append(f"xi: {e}")
            xi_new = theta.xi

        if len(failures) == 2:
            if k == 1:
                msg = f"第1反復で両ステップが失敗しました: {'; '.join(failures)}"
                raise AllStepsFailedError(msg)
            logger.warning(f"反復{k}で両ステップが失敗したため停止します: {'; '.join(failures)}")
            stop_reason = StopReasons.STEPS_FAILED
            break
        for failure in failures:
            logger.warning(f"反復{k}でステップが失敗しました（直前の値を維持）: {failure}")

        previous = theta
        theta = ModelParams(float(p_new[0]), float(p_new[1]), float(p_new[2]), float(xi_new))
        current_full = full_mse(theta, ecdf, grid)
        current_tail = tail_mse(theta, ecdf, grid, cfg.alpha)
        trace.append(TraceEntry(k, theta, current_full, current_tail))
        logger.debug(
            f"反復{k}: θ={theta.as_array().tolist()}, "
            f"全体MSE={current_full:.3e}, 裾MSE={current_tail:.3e}"
        )

        if current_full < cfg.epsilon and current_tail < cfg.epsilon:
            stop_reason = StopReasons.C1C2
            break
        if (
            cfg.xi_stagnation_epsilon is not None
            and abs(theta.xi - previous.xi) < cfg.xi_stagnation_epsilon
        ):
            stop_reason = StopReasons.XI_STAGNATION
            break
        tol = cfg.stationary_tol
        if tol is not None and _relative_change(theta, previous) < tol:
            stop_reason = StopReasons.STATIONARY
            break

    logger.info(LOG_FIT_DONE.format(stop_reason, iterations, current_full, current_tail))

    return FitResult(
        theta=theta,
        derived=HybridModel.from_params(theta).derived,
        iterations=iterations,
        stop_reason=stop_reason,
        full_mse=current_full,
        tail_mse=current_tail,
        trace=tuple(trace),
        initial_theta=initial_theta,
    )
