#!/usr/bin/env python3

"""
2成分G-GPDモデルと不動点反復の収束実験

ガウス分布と一般化パレート分布を接合点 u で C1 級に接続し、両成分に同じ重み
w = 1/(1 + F(u)) を与えたモデル。接続条件から

    beta = 1 / f(u; mu, sigma)
    xi = -1 + (u - mu) * beta / sigma^2

が決まり、自由パラメータは p = (mu, sigma) と u だけになる。

推定は p ステップ（u 固定）と u ステップ（p 固定）の交互最小二乗で、
u の列 u(k) = phi(u(k-1)) を不動点反復として観察できる。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from ..core.constants import GgpdDefaults
from ..core.exceptions import InvalidConfigError, InvalidParameterError
from ..core.logging_config import get_logger
from ..utils.validation import (
    validate_nondegenerate,
    validate_open_interval,
    validate_positive,
    validate_probability,
    validate_sample,
)
from .calibrator import EmpiricalCdf, empirical_cdf, estimate_mode
from .hybrid_model import ArrayLike, _finish, _gpd_cdf_unchecked, gpd_quantile
from .lm_solver import (
    IdentityTransform,
    LmOptions,
    LmProblem,
    LogisticTransform,
    LogTransform,
    solve,
)

logger = get_logger(__name__)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# ============================================================================
# パラメータとモデル
# ============================================================================


@dataclass(frozen=True)
class GgpdParams:
    """
    G-GPDモデルのパラメータ

    Attributes:
        mu, sigma: ガウス成分
        u: 接合点
        beta: GPDの尺度 1/f(u)
        xi: GPDの裾指数
        weight: 両成分に共通の重み 1/(1 + F(u))
    """

    mu: float
    sigma: float
    u: float
    beta: float
    xi: float
    weight: float

    @property
    def junction_cdf(self) -> float:
        """接合点での分布関数値 w * F(u)"""
        return self.weight * float(special.ndtr((self.u - self.mu) / self.sigma))

    def to_dict(self) -> Dict[str, float]:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "u": self.u,
            "beta": self.beta,
            "xi": self.xi,
            "weight": self.weight,
        }


def ggpd_derive(mu: float, sigma: float, u: float) -> GgpdParams:
    """
    (mu, sigma, u) から接続条件で beta, xi, weight を決める

    Raises:
        InvalidParameterError: sigma <= 0 または有限でない値

    Examples:
        >>> p = ggpd_derive(0.0, 1.0, 0.0)
        >>> round(p.beta, 6), p.xi
        (2.506628, -1.0)
    """
    if not all(math.isfinite(v) for v in (mu, sigma, u)):
        msg = f"G-GPDのパラメータに有限でない値があります: mu={mu!r}, sigma={sigma!r}, u={u!r}"
        raise InvalidParameterError(msg)
    if not sigma > 0:
        msg = f"sigma は正である必要があります: {sigma!r}"
        raise InvalidParameterError(msg)

    z = (u - mu) / sigma
    log_density = -0.5 * z * z - _LOG_SQRT_2PI - math.log(sigma)
    beta = math.exp(-log_density)
    xi = -1.0 + (u - mu) * beta / (sigma * sigma)
    weight = 1.0 / (1.0 + float(special.ndtr(z)))
    return GgpdParams(mu=mu, sigma=sigma, u=u, beta=beta, xi=xi, weight=weight)


def ggpd_cdf(x: ArrayLike, params: GgpdParams) -> Any:
    """G-GPDの分布関数"""
    values = np.asarray(x, dtype=float)
    flat = np.atleast_1d(values)
    body = flat <= params.u
    out = np.empty_like(flat)
    out[body] = params.weight * special.ndtr((flat[body] - params.mu) / params.sigma)
    excess = flat[~body] - params.u
    out[~body] = params.junction_cdf + params.weight * _gpd_cdf_unchecked(
        excess, params.xi, params.beta
    )
    return _finish(np.clip(out, 0.0, 1.0).reshape(values.shape), values.ndim == 0)


def ggpd_pdf(x: ArrayLike, params: GgpdParams) -> Any:
    """G-GPDの密度（接合点で連続）"""
    values = np.asarray(x, dtype=float)
    flat = np.atleast_1d(values)
    body = flat <= params.u
    out = np.zeros_like(flat)
    z = (flat[body] - params.mu) / params.sigma
    out[body] = params.weight * np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / params.sigma

    excess = flat[~body] - params.u
    scaled = 1.0 + params.xi * excess / params.beta
    inside = scaled > 0
    tail = np.zeros_like(excess)
    if params.xi == 0.0:
        tail = np.exp(-excess / params.beta)
    else:
        with np.errstate(divide="ignore", over="ignore"):
            tail[inside] = np.exp(-(1.0 + 1.0 / params.xi) * np.log(scaled[inside]))
    out[~body] = params.weight * tail / params.beta
    return _finish(out.reshape(values.shape), values.ndim == 0)


def ggpd_quantile(p: ArrayLike, params: GgpdParams) -> Any:
    """G-GPDの分位関数（p は (0, 1)）"""
    probs = validate_probability(p)
    flat = np.atleast_1d(probs)
    body = flat <= params.junction_cdf
    out = np.empty_like(flat)
    out[body] = params.mu + params.sigma * special.ndtri(flat[body] / params.weight)
    level = np.clip((flat[~body] - params.junction_cdf) / params.weight, 0.0, np.nextafter(1.0, 0))
    out[~body] = params.u + np.asarray(gpd_quantile(level, params.xi, params.beta))
    return _finish(out.reshape(probs.shape), probs.ndim == 0)


def ggpd_sample(n: int, params: GgpdParams, seed: Optional[int] = None) -> np.ndarray:
    """逆変換法によるG-GPDの乱数生成"""
    if n < 1:
        msg = f"標本サイズは1以上で指定してください: n={n}"
        raise InvalidParameterError(msg)
    rng = np.random.default_rng(seed)
    uniforms = np.maximum(rng.random(n), 2.0**-53)
    return np.asarray(ggpd_quantile(uniforms, params))


# ============================================================================
# 推定
# ============================================================================


@dataclass(frozen=True)
class GgpdConfig:
    """
    G-GPD推定の設定

    Attributes:
        epsilon: |u(k) - u(k-1)| の停止許容値
        k_max: 反復の上限
        initial_order: u の初期値に使う経験分位点の次数
        solver: 内側のLM設定
    """

    epsilon: float = GgpdDefaults.EPSILON
    k_max: int = GgpdDefaults.K_MAX
    initial_order: float = GgpdDefaults.INITIAL_ORDER
    solver: LmOptions = field(default_factory=LmOptions)

    def __post_init__(self) -> None:
        validate_positive(self.epsilon, "epsilon")
        validate_open_interval(self.initial_order, 0.0, 1.0, "initial_order")
        if self.k_max < 1:
            msg = f"k_max は1以上で指定してください: {self.k_max}"
            raise InvalidConfigError(msg)

    def to_dict(self) -> Dict[str, Any]:
        values = {k: v for k, v in self.__dict__.items() if k != "solver"}
        values["solver"] = self.solver.to_dict()
        return values


@dataclass(frozen=True)
class FixedPointTrace:
    """
    1つの初期値からの不動点反復の記録

    Attributes:
        u0: 初期閾値
        values: u(0), u(1), ... の列
        converged: |u(k) - u(k-1)| < epsilon で停止したか
        final: 最終パラメータ
    """

    u0: float
    values: Tuple[float, ...]
    converged: bool
    final: GgpdParams

    @property
    def iterations(self) -> int:
        return len(self.values) - 1

    @property
    def limit(self) -> float:
        return self.values[-1]

    @property
    def monotone(self) -> bool:
        """下から始めれば非減少、上から始めれば非増加"""
        steps = np.diff(np.asarray(self.values))
        return bool(np.all(steps >= 0) or np.all(steps <= 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u0": self.u0,
            "values": list(self.values),
            "iterations": self.iterations,
            "converged": self.converged,
            "monotone": self.monotone,
            "final": self.final.to_dict(),
        }


def _data_residuals(
    params: GgpdParams, points: np.ndarray, targets: np.ndarray
) -> np.ndarray:
    return np.asarray(ggpd_cdf(points, params)) - targets


def _p_step(
    points: np.ndarray,
    targets: np.ndarray,
    u: float,
    p_prev: Tuple[float, float],
    opts: LmOptions,
) -> Tuple[float, float]:
    problem = LmProblem(
        residuals=lambda ext: _data_residuals(
            ggpd_derive(float(ext[0]), float(ext[1]), u), points, targets
        ),
        dimension=2,
        residual_count=points.size,
        transforms=(IdentityTransform(), LogTransform(0.0)),
    )
    result = solve(problem, list(p_prev), opts)
    return float(result.solution[0]), float(result.solution[1])


def _u_step(
    points: np.ndarray,
    targets: np.ndarray,
    p: Tuple[float, float],
    u_prev: float,
    opts: LmOptions,
) -> float:
    low, high = float(points[0]), float(points[-1])
    problem = LmProblem(
        residuals=lambda ext: _data_residuals(
            ggpd_derive(p[0], p[1], float(ext[0])), points, targets
        ),
        dimension=1,
        residual_count=points.size,
        transforms=(LogisticTransform(low, high),),
    )
    result = solve(problem, [u_prev], opts)
    return float(result.solution[0])


def _initial_p(values: np.ndarray, ecdf: EmpiricalCdf) -> Tuple[float, float]:
    mu0 = estimate_mode(values)
    sigma0 = abs(mu0 - ecdf.quantile(0.16))
    if sigma0 <= 0:
        sigma0 = float(np.std(values))
    return mu0, sigma0


def _iterate(
    values: np.ndarray, ecdf: EmpiricalCdf, u0: float, cfg: GgpdConfig
) -> FixedPointTrace:
    points = ecdf.sorted_sample
    targets = np.asarray(ecdf(points))
    p = _initial_p(values, ecdf)
    u = u0
    history: List[float] = [u0]
    converged = False

    for k in range(1, cfg.k_max + 1):
        p = _p_step(points, targets, u, p, cfg.solver)
        u_new = _u_step(points, targets, p, u, cfg.solver)
        history.append(u_new)
        logger.debug(f"G-GPD反復{k}: mu={p[0]:.6g}, sigma={p[1]:.6g}, u={u_new:.8g}")
        if abs(u_new - u) < cfg.epsilon:
            u = u_new
            converged = True
            break
        u = u_new

    return FixedPointTrace(
        u0=u0, values=tuple(history), converged=converged, final=ggpd_derive(p[0], p[1], u)
    )


def ggpd_fit(
    data: Sequence[float], cfg: Optional[GgpdConfig] = None, u0: Optional[float] = None
) -> Tuple[GgpdParams, FixedPointTrace]:
    """
    G-GPDモデルを交互最小二乗で推定

    Args:
        data: 標本
        cfg: 設定
        u0: 初期閾値（省略時は initial_order の経験分位点）

    Returns:
        (推定パラメータ, u の反復列)

    Raises:
        DegenerateRangeError: 最大値 == 最小値
        InvalidConfigError: u0 がデータ範囲の外側
        SolverError: LMソルバーの失敗
    """
    cfg = cfg or GgpdConfig()
    values = validate_sample(data, min_size=10)
    low, high = validate_nondegenerate(values)
    ecdf = empirical_cdf(values)

    start = ecdf.quantile(cfg.initial_order) if u0 is None else float(u0)
    if not low < start < high:
        msg = f"初期閾値はデータ範囲 ({low!r}, {high!r}) の内側で指定してください: {start!r}"
        raise InvalidConfigError(msg)

    trace = _iterate(values, ecdf, start, cfg)
    logger.info(
        f"G-GPD推定終了: u={trace.limit:.6g}, 反復={trace.iterations}, 収束={trace.converged}"
    )
    return trace.final, trace


def fixed_point_trace(
    data: Sequence[float], u0_list: Sequence[float], cfg: Optional[GgpdConfig] = None
) -> List[FixedPointTrace]:
    """
    複数の初期閾値から不動点反復 u(k) = phi(u(k-1)) を記録

    Args:
        data: 標本
        u0_list: 初期閾値の列（それぞれデータ範囲の内側）
        cfg: 設定

    Returns:
        初期値ごとの FixedPointTrace
    """
    cfg = cfg or GgpdConfig()
    traces = []
    for u0 in u0_list:
        _, trace = ggpd_fit(data, cfg, u0=u0)
        traces.append(trace)
    return traces


def initial_thresholds(
    data: Sequence[float], orders: Sequence[float] = GgpdDefaults.LAB_ORDERS
) -> List[float]:
    """経験分位点の次数から初期閾値の列を作る"""
    ecdf = empirical_cdf(data)
    return [ecdf.quantile(order) for order in orders]


def fixed_point_limit(traces: Sequence[FixedPointTrace]) -> Tuple[float, float]:
    """
    各初期値の最終値から共通の極限とばらつきを求める

    Returns:
        (最終値の中央値, 最大値 - 最小値)
    """
    if not traces:
        msg = "反復の記録が空です"
        raise InvalidConfigError(msg)
    limits = np.array([trace.limit for trace in traces])
    return float(np.median(limits)), float(np.max(limits) - np.min(limits))
