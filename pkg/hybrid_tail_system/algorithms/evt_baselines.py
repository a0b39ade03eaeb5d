#!/usr/bin/env python3

"""
古典的EVT推定量と閾値の自動選択

平均超過関数（MEP）、Hill推定量、QQ推定量、GPDのPWM推定・最尤推定と、
候補閾値ごとに裾のMSEを比較して閾値を選ぶスキャンを提供します。
自己キャリブレーションとの比較用のベースラインです。
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..core.constants import BaselineDefaults, EstimatorNames
from ..core.exceptions import (
    AlgorithmNotFoundError,
    DegenerateMomentsError,
    DomainError,
    EmptyDataError,
    EstimationError,
    InvalidConfigError,
    NoInteriorMaximumError,
    NonPositiveThresholdStatisticError,
    NoValidCandidateError,
)
from ..core.logging_config import get_logger
from ..core.types import TailFitData
from ..utils.validation import validate_orders, validate_sample
from .hybrid_model import _gpd_cdf_unchecked

logger = get_logger(__name__)

# 最尤推定の粗い走査の点数（各符号側）
_ML_SCAN_POINTS = 60


# ============================================================================
# 結果型
# ============================================================================


@dataclass(frozen=True)
class TailFit:
    """
    閾値より上の超過量へのGPD当てはめ結果

    Attributes:
        method: 手法名（MEP-PWM, Hill, QQ, ML）
        threshold: 閾値 u2
        threshold_order: 閾値の経験分位次数
        n_exceedances: 閾値を超える観測数
        xi: 裾指数
        beta: GPDの尺度
        tail_mse: 超過量の経験分布関数とGPD分布関数のMSE
    """

    method: str
    threshold: float
    threshold_order: float
    n_exceedances: int
    xi: float
    beta: float
    tail_mse: float

    def to_dict(self) -> TailFitData:
        return {
            "method": self.method,
            "threshold": self.threshold,
            "threshold_order": self.threshold_order,
            "n_exceedances": self.n_exceedances,
            "xi": self.xi,
            "beta": self.beta,
            "tail_mse": self.tail_mse,
        }


@dataclass(frozen=True)
class MeanExcessCurve:
    """平均超過関数 e(u) = mean(x - u | x > u) の標本版"""

    thresholds: np.ndarray = field(repr=False)
    mean_excess: np.ndarray = field(repr=False)
    n_exceedances: np.ndarray = field(repr=False)

    def pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.thresholds.tolist(), self.mean_excess.tolist()))


# ============================================================================
# 平均超過関数
# ============================================================================


def mean_excess_curve(data: Sequence[float]) -> MeanExcessCurve:
    """
    最大値未満の各順序統計量 u における平均超過量

    Args:
        data: 標本（2点以上）

    Returns:
        MeanExcessCurve: 重複を除いた昇順の閾値ごとの平均超過量

    Raises:
        EmptyDataError: 2点未満、またはすべての値が等しい

    Examples:
        >>> mean_excess_curve([1.0, 2.0, 3.0]).pairs()[0]
        (1.0, 1.5)
    """
    values = np.sort(validate_sample(data, min_size=2))
    thresholds = np.unique(values)[:-1]
    if thresholds.size == 0:
        msg = "すべての値が等しいため平均超過関数が定義できません"
        raise EmptyDataError(msg)

    # 末尾からの累積和で #{x > u} と sum{x > u} を求める
    suffix = np.concatenate([np.cumsum(values[::-1])[::-1], [0.0]])
    above = np.searchsorted(values, thresholds, side="right")
    counts = values.size - above
    sums = suffix[above]
    return MeanExcessCurve(
        thresholds=thresholds,
        mean_excess=sums / counts - thresholds,
        n_exceedances=counts,
    )


# ============================================================================
# Hill / QQ
# ============================================================================


def default_k(n: int) -> int:
    """金融データ向けの上位順序統計量の数 floor(sqrt(n))"""
    return max(int(math.isqrt(n)), 2)


def _upper_order_statistics(data: Sequence[float], k: int) -> Tuple[np.ndarray, float]:
    values = np.sort(validate_sample(data, min_size=3))
    n = values.size
    if not 2 <= k < n:
        msg = f"k は 2 <= k < n（n={n}）で指定してください: k={k}"
        raise InvalidConfigError(msg)
    pivot = float(values[n - k - 1])
    if pivot <= 0:
        msg = f"順序統計量 X_(n-k) = {pivot!r} が正ではありません（k={k}）"
        raise NonPositiveThresholdStatisticError(msg)
    # 降順: X_(n), X_(n-1), ..., X_(n-k+1)
    return values[n - k :][::-1], pivot


def hill_estimator(data: Sequence[float], k: int) -> float:
    """
    Hill推定量 (1/k) * sum log(X_(n-i+1) / X_(n-k))

    Args:
        data: 標本
        k: 上位順序統計量の数（2 <= k < n）

    Returns:
        裾指数 xi の推定値

    Raises:
        InvalidConfigError: k が範囲外
        NonPositiveThresholdStatisticError: X_(n-k) <= 0
    """
    top, pivot = _upper_order_statistics(data, k)
    return float(np.mean(np.log(top) - math.log(pivot)))


def qq_estimator(data: Sequence[float], k: int) -> float:
    """
    QQ推定量: 点列 (-log(i/(k+1)), log X_(n-i+1)), i=1..k の最小二乗の傾き

    Raises:
        InvalidConfigError: k が範囲外
        NonPositiveThresholdStatisticError: X_(n-k) <= 0
    """
    top, _ = _upper_order_statistics(data, k)
    ranks = np.arange(1, k + 1, dtype=float)
    x = -np.log(ranks / (k + 1))
    y = np.log(top)
    x_centered = x - x.mean()
    return float(np.dot(x_centered, y - y.mean()) / np.dot(x_centered, x_centered))


def _plot_series(
    estimator: Callable[[Sequence[float], int], float], data: Sequence[float], ks: Sequence[int]
) -> List[Tuple[int, float]]:
    series = []
    for k in ks:
        try:
            series.append((int(k), estimator(data, int(k))))
        except (EstimationError, InvalidConfigError):
            continue
    return series


def hill_plot(data: Sequence[float], ks: Sequence[int]) -> List[Tuple[int, float]]:
    """Hillプロット用の (k, xi) の列（定義できない k は除く）"""
    return _plot_series(hill_estimator, data, ks)


def qq_plot(data: Sequence[float], ks: Sequence[int]) -> List[Tuple[int, float]]:
    """QQ推定量プロット用の (k, xi) の列"""
    return _plot_series(qq_estimator, data, ks)


# ============================================================================
# PWM
# ============================================================================


def _validate_excesses(excesses: Sequence[float]) -> np.ndarray:
    values = validate_sample(excesses, min_size=2)
    if np.any(values < 0):
        msg = "超過量に負の値が含まれています"
        raise DomainError(msg)
    return values


def gpd_from_pwm(a0: float, a1: float) -> Tuple[float, float]:
    """
    確率加重モーメント a0 = E[X], a1 = E[X(1 - F(X))] からGPDのパラメータ

    xi = 2 - a0/(a0 - 2a1), beta = 2 a0 a1/(a0 - 2a1)

    Raises:
        DegenerateMomentsError: a0 - 2a1 <= 0、xi >= 1、または beta <= 0

    Examples:
        >>> gpd_from_pwm(1.0, 0.25)
        (0.0, 1.0)
    """
    denominator = a0 - 2.0 * a1
    if not denominator > 0:
        msg = f"a0 - 2a1 = {denominator!r} が正ではありません"
        raise DegenerateMomentsError(msg)
    xi = 2.0 - a0 / denominator
    beta = 2.0 * a0 * a1 / denominator
    if xi >= 1.0 or not beta > 0:
        msg = f"PWM推定が有効範囲外です: xi={xi!r}, beta={beta!r}"
        raise DegenerateMomentsError(msg)
    return xi, beta


def pwm_gpd(
    excesses: Sequence[float], plotting_shift: float = BaselineDefaults.PWM_PLOTTING_SHIFT
) -> Tuple[float, float]:
    """
    PWM法によるGPDのパラメータ推定

    プロット位置 p_(i) = (i - plotting_shift)/n を使う。

    Args:
        excesses: 閾値からの超過量（非負、2点以上）
        plotting_shift: プロット位置のずらし

    Returns:
        (xi, beta)

    Raises:
        DegenerateMomentsError: PWM推定が有効範囲外
    """
    values = np.sort(_validate_excesses(excesses))
    n = values.size
    positions = (np.arange(1, n + 1) - plotting_shift) / n
    a0 = float(np.mean(values))
    a1 = float(np.mean((1.0 - positions) * values))
    return gpd_from_pwm(a0, a1)


# ============================================================================
# 最尤推定（プロファイル尤度 theta = xi/beta）
# ============================================================================


class _GpdProfile:
    """平均で正規化した超過量に対するGPDのプロファイル対数尤度"""

    def __init__(self, values: np.ndarray):
        self.values = values
        self.theta_min = -1.0 / float(np.max(values))

    def xi(self, theta: float) -> float:
        return float(np.mean(np.log1p(theta * self.values)))

    def scale_ratio(self, theta: float) -> float:
        # xi(theta)/theta = beta
        if abs(theta) < 1e-12:
            return float(np.mean(self.values))
        return self.xi(theta) / theta

    def loglik(self, theta: float) -> float:
        """1観測あたりのプロファイル対数尤度"""
        ratio = self.scale_ratio(theta)
        if not ratio > 0:
            return -math.inf
        return -(math.log(ratio) + 1.0 + self.xi(theta))

    def derivative(self, theta: float) -> float:
        a = self.xi(theta)
        b = float(np.mean(self.values / (1.0 + theta * self.values)))
        return 1.0 / theta - b / a - b

    def bounds(self, xi_lower: float, xi_upper: float) -> Tuple[float, float]:
        left = self.theta_min * (1.0 - 1e-10)
        if self.xi(left) < xi_lower:
            left = optimize.brentq(lambda t: self.xi(t) - xi_lower, left, 0.0, xtol=1e-14)

        right = 1.0
        while self.xi(right) < xi_upper:
            right *= 2.0
        right = optimize.brentq(lambda t: self.xi(t) - xi_upper, 0.0, right, xtol=1e-14)
        return left, right

    def scan_grid(self, left: float, right: float) -> np.ndarray:
        negative = left * np.geomspace(1.0, 1e-6, _ML_SCAN_POINTS)
        positive = right * np.geomspace(1e-6, 1.0, _ML_SCAN_POINTS)
        return np.concatenate([negative, [0.0], positive])


def mle_gpd(
    excesses: Sequence[float],
    xi_lower: float = BaselineDefaults.ML_XI_LOWER,
    xi_upper: float = BaselineDefaults.ML_XI_UPPER,
) -> Tuple[float, float]:
    """
    GPDの最尤推定

    theta = xi/beta に対するプロファイル尤度を1次元で最大化する。
    超過量は平均で正規化してから探索し、beta を元の尺度に戻す。

    Args:
        excesses: 閾値からの超過量（非負、2点以上）
        xi_lower: 探索する xi の下限
        xi_upper: 探索する xi の上限

    Returns:
        (xi, beta)

    Raises:
        NoInteriorMaximumError: 定数データ、または尤度が探索区間の端で最大
    """
    values = _validate_excesses(excesses)
    scale = float(np.mean(values))
    if not scale > 0 or float(np.ptp(values)) == 0.0:
        msg = "超過量がすべて等しいため尤度が探索区間の内部で最大になりません"
        raise NoInteriorMaximumError(msg)

    profile = _GpdProfile(values / scale)
    left, right = profile.bounds(xi_lower, xi_upper)
    grid = profile.scan_grid(left, right)
    logliks = np.array([profile.loglik(t) for t in grid])
    best = int(np.argmax(logliks))
    if best == 0 or best == grid.size - 1:
        msg = f"GPDの尤度が探索区間 xi in ({xi_lower}, {xi_upper}) の端で最大です"
        raise NoInteriorMaximumError(msg)

    low, high = float(grid[best - 1]), float(grid[best + 1])
    result = optimize.minimize_scalar(
        lambda t: -profile.loglik(t),
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-12 * max(abs(low), abs(high))},
    )
    theta = float(result.x)

    # 0 を含まない区間ではスコア方程式の根で仕上げる
    if low * high > 0:
        d_low, d_high = profile.derivative(low), profile.derivative(high)
        if d_low * d_high < 0:
            theta = optimize.brentq(profile.derivative, low, high, xtol=1e-15, rtol=1e-14)

    xi = profile.xi(theta)
    beta = profile.scale_ratio(theta) * scale
    logger.debug(f"GPD最尤推定: xi={xi:.6g}, beta={beta:.6g}")
    return xi, beta


# ============================================================================
# 裾のMSEと閾値スキャン
# ============================================================================


def gpd_tail_mse(excesses: Sequence[float], xi: float, beta: float) -> float:
    """
    超過量の経験分布関数 i/N と GPD 分布関数の平均二乗誤差

    Args:
        excesses: 超過量
        xi: 裾指数
        beta: 尺度

    Returns:
        MSE（0以上）
    """
    values = np.sort(validate_sample(excesses))
    empirical = np.arange(1, values.size + 1) / values.size
    model = _gpd_cdf_unchecked(values, xi, beta)
    return float(np.mean((model - empirical) ** 2))


def _fit_pwm(data: np.ndarray, threshold: float, excesses: np.ndarray) -> Tuple[float, float]:
    return pwm_gpd(excesses)


def _fit_ml(data: np.ndarray, threshold: float, excesses: np.ndarray) -> Tuple[float, float]:
    return mle_gpd(excesses)


def _fit_hill(data: np.ndarray, threshold: float, excesses: np.ndarray) -> Tuple[float, float]:
    xi = hill_estimator(data, excesses.size)
    return xi, xi * threshold


def _fit_qq(data: np.ndarray, threshold: float, excesses: np.ndarray) -> Tuple[float, float]:
    xi = qq_estimator(data, excesses.size)
    return xi, xi * threshold


FITTERS: Dict[str, Callable[[np.ndarray, float, np.ndarray], Tuple[float, float]]] = {
    EstimatorNames.MEP: _fit_pwm,
    EstimatorNames.HILL: _fit_hill,
    EstimatorNames.QQ: _fit_qq,
    EstimatorNames.ML: _fit_ml,
}


def _fitter(method: str) -> Callable[[np.ndarray, float, np.ndarray], Tuple[float, float]]:
    try:
        return FITTERS[method]
    except KeyError as e:
        msg = f"未知の推定手法です: {method!r} (利用可能: {', '.join(FITTERS)})"
        raise AlgorithmNotFoundError(msg) from e


def fit_at_threshold(
    data: Sequence[float], method: str, threshold: float, threshold_order: float
) -> TailFit:
    """
    与えた閾値で手法ごとにGPDを当てはめて TailFit を作る

    Raises:
        EmptyDataError: 閾値を超える観測が2点未満
        EstimationError: 推定量が定義できない
    """
    fitter = _fitter(method)
    values = validate_sample(data)
    excesses = values[values > threshold] - threshold
    if excesses.size < 2:
        msg = f"閾値 {threshold!r} を超える観測が不足しています: {excesses.size}"
        raise EmptyDataError(msg)

    xi, beta = fitter(values, threshold, excesses)
    if not beta > 0:
        msg = f"{EstimatorNames.LABELS[method]}: GPDの尺度が正になりません (xi={xi!r})"
        raise DegenerateMomentsError(msg)
    return TailFit(
        method=EstimatorNames.LABELS[method],
        threshold=float(threshold),
        threshold_order=float(threshold_order),
        n_exceedances=int(excesses.size),
        xi=float(xi),
        beta=float(beta),
        tail_mse=gpd_tail_mse(excesses, xi, beta),
    )


def fit_at_k(data: Sequence[float], method: str, k: Optional[int] = None) -> TailFit:
    """
    上位 k 個の順序統計量（閾値 X_(n-k)）で当てはめる（既定 k = floor(sqrt(n))）
    """
    values = np.sort(validate_sample(data, min_size=3))
    n = values.size
    k = default_k(n) if k is None else k
    if not 2 <= k < n:
        msg = f"k は 2 <= k < n（n={n}）で指定してください: k={k}"
        raise InvalidConfigError(msg)
    return fit_at_threshold(values, method, float(values[n - k - 1]), (n - k) / n)


def scan_thresholds(
    data: Sequence[float],
    method: str,
    candidate_orders: Sequence[float] = BaselineDefaults.CANDIDATE_ORDERS,
    min_exceedances: int = BaselineDefaults.MIN_EXCEEDANCES,
) -> List[TailFit]:
    """
    候補閾値（経験分位点 x_(ceil(order*n))）ごとにGPDを当てはめる

    超過数が min_exceedances 未満、または推定できない候補は除く。

    Returns:
        次数の昇順の TailFit のリスト
    """
    _fitter(method)
    orders = validate_orders(candidate_orders)
    values = np.sort(validate_sample(data, min_size=2))
    n = values.size

    fits = []
    for order in orders:
        index = min(max(int(np.ceil(np.round(order * n, 9))), 1), n)
        threshold = float(values[index - 1])
        count = int(np.count_nonzero(values > threshold))
        if count < min_exceedances:
            logger.debug(f"候補 q_{order}: 超過数 {count} が {min_exceedances} 未満のため除外")
            continue
        try:
            fits.append(fit_at_threshold(values, method, threshold, order))
        except (EstimationError, EmptyDataError) as e:
            logger.debug(f"候補 q_{order} を除外: {e}")
    return fits


def select_threshold(
    data: Sequence[float],
    method: str,
    candidate_orders: Sequence[float] = BaselineDefaults.CANDIDATE_ORDERS,
    min_exceedances: int = BaselineDefaults.MIN_EXCEEDANCES,
) -> TailFit:
    """
    裾のMSEが最小の候補閾値を選ぶ（同値なら低い次数）

    Raises:
        NoValidCandidateError: 有効な候補がない
    """
    fits = scan_thresholds(data, method, candidate_orders, min_exceedances)
    if not fits:
        msg = f"{EstimatorNames.LABELS[method]}: 有効な閾値候補がありません"
        raise NoValidCandidateError(msg)

    best = fits[0]
    for candidate in fits[1:]:
        if candidate.tail_mse < best.tail_mse:
            best = candidate
    logger.info(
        f"{best.method}: 閾値 {best.threshold:.6g} (q_{best.threshold_order}), "
        f"xi={best.xi:.4f}, 裾MSE={best.tail_mse:.3e}"
    )
    return best
