#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布

ガウス分布（本体）・指数分布（ブリッジ）・一般化パレート分布（裾）を
接合点 u1, u2 で C1 級に接続した3成分分布の密度・分布関数・分位関数・乱数生成。

自由パラメータは θ = [mu, sigma, u2, xi] の4つで、残りは連続性と正規化から

    beta = xi * u2
    lambda = (1 + xi) / beta
    u1 = mu + lambda * sigma^2

と重み gamma1, gamma2, gamma3 に決まる。数値評価では e^{-lambda*u1} をくくり出した
分母 D = xi*e^{-lambda(u2-u1)} + 1 + lambda*F(u1)/f(u1) を使う。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy import special

from ..core.constants import ParameterNames
from ..core.exceptions import DomainError, InvalidGeometryError, InvalidParameterError
from ..core.types import DerivedParamsData, ModelParamsData
from ..utils.validation import validate_probability

ArrayLike = Union[float, Sequence[float], np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# 逆変換法で 0 を引かないための下限
_MIN_UNIFORM = 2.0**-53


def _log_normal_pdf(z: np.ndarray) -> np.ndarray:
    return -0.5 * z * z - _LOG_SQRT_2PI


def _finish(values: np.ndarray, scalar: bool) -> Any:
    return float(values) if scalar else values


# ============================================================================
# パラメータ
# ============================================================================


@dataclass(frozen=True)
class ModelParams:
    """自由パラメータ θ = [mu, sigma, u2, xi]"""

    mu: float
    sigma: float
    u2: float
    xi: float

    def __post_init__(self) -> None:
        for name in ParameterNames.ALL:
            value = getattr(self, name)
            if not math.isfinite(value):
                msg = f"{name} が有限値ではありません: {value!r}"
                raise InvalidParameterError(msg)
        if self.sigma <= 0:
            msg = f"sigma は正である必要があります: {self.sigma!r}"
            raise InvalidParameterError(msg)
        if self.xi <= 0:
            msg = f"xi は正である必要があります（Fréchet領域）: {self.xi!r}"
            raise InvalidParameterError(msg)
        if self.u2 <= 0:
            msg = f"u2 は正である必要があります: {self.u2!r}"
            raise InvalidParameterError(msg)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "ModelParams":
        """[mu, sigma, u2, xi] の列から作成"""
        if len(values) != 4:
            msg = f"θ は4要素 [mu, sigma, u2, xi] で指定してください: {list(values)!r}"
            raise InvalidParameterError(msg)
        mu, sigma, u2, xi = (float(v) for v in values)
        return cls(mu=mu, sigma=sigma, u2=u2, xi=xi)

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.sigma, self.u2, self.xi], dtype=float)

    def to_dict(self) -> ModelParamsData:
        return {"mu": self.mu, "sigma": self.sigma, "u2": self.u2, "xi": self.xi}


@dataclass(frozen=True)
class DerivedParams:
    """
    制約系から決まる従属パラメータ

    Attributes:
        beta: GPDの尺度
        lam: 指数ブリッジの強度（lambda）
        u1: 第1接合点
        gamma1, gamma2, gamma3: 成分の重み
        p1: 第1接合点での分布関数値 gamma1*F(u1)
        p2: 第2接合点での分布関数値 1 - gamma3
    """

    beta: float
    lam: float
    u1: float
    gamma1: float
    gamma2: float
    gamma3: float
    p1: float
    p2: float
    log_gamma1: float = field(repr=False)
    denominator: float = field(repr=False)

    def to_dict(self) -> DerivedParamsData:
        return {
            "beta": self.beta,
            "lambda": self.lam,
            "u1": self.u1,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
        }


def derive_params(free: ModelParams) -> DerivedParams:
    """
    自由パラメータから従属パラメータを計算

    Args:
        free: 自由パラメータ

    Returns:
        DerivedParams: 従属パラメータ

    Raises:
        InvalidGeometryError: u1 = mu + lambda*sigma^2 が u2 を超える
    """
    mu, sigma, u2, xi = free.mu, free.sigma, free.u2, free.xi

    beta = xi * u2
    lam = (1.0 + xi) / beta
    u1 = mu + lam * sigma**2
    if u1 > u2:
        msg = f"u1 = {u1!r} が u2 = {u2!r} を超えています（指数ブリッジが存在しません）"
        raise InvalidGeometryError(msg)

    z1 = lam * sigma
    log_f1 = float(_log_normal_pdf(np.float64(z1))) - math.log(sigma)
    log_cdf1 = float(special.log_ndtr(z1))
    mills = math.exp(log_cdf1 - log_f1)
    bridge_decay = math.exp(-lam * (u2 - u1))
    denominator = xi * bridge_decay + 1.0 + lam * mills

    log_gamma1 = math.log(lam) - log_f1 - math.log(denominator)
    log_gamma2 = lam * u1 - math.log(denominator)
    gamma3 = (1.0 + xi) * bridge_decay / denominator

    return DerivedParams(
        beta=beta,
        lam=lam,
        u1=u1,
        gamma1=math.exp(log_gamma1),
        gamma2=math.exp(log_gamma2) if log_gamma2 < 700 else math.inf,
        gamma3=gamma3,
        p1=lam * mills / denominator,
        p2=1.0 - gamma3,
        log_gamma1=log_gamma1,
        denominator=denominator,
    )


# ============================================================================
# 分布
# ============================================================================


@dataclass(frozen=True)
class HybridModel:
    """自由パラメータと従属パラメータをまとめた分布オブジェクト"""

    params: ModelParams
    derived: DerivedParams

    @classmethod
    def from_params(cls, free: ModelParams) -> "HybridModel":
        return cls(params=free, derived=derive_params(free))

    def pdf(self, x: ArrayLike) -> Any:
        values = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            out = np.exp(self._logpdf(values))
        return _finish(out, values.ndim == 0)

    def logpdf(self, x: ArrayLike) -> Any:
        values = np.asarray(x, dtype=float)
        return _finish(self._logpdf(values), values.ndim == 0)

    def cdf(self, x: ArrayLike) -> Any:
        values = np.asarray(x, dtype=float)
        return _finish(self._cdf(values), values.ndim == 0)

    def quantile(self, p: ArrayLike) -> Any:
        probs = validate_probability(p)
        return _finish(self._quantile(probs), probs.ndim == 0)

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        if n < 1:
            msg = f"標本サイズは1以上で指定してください: n={n}"
            raise InvalidParameterError(msg)
        rng = np.random.default_rng(seed)
        uniforms = np.maximum(rng.random(n), _MIN_UNIFORM)
        return self._quantile(uniforms)

    # ------------------------------------------------------------------
    # 各区間の評価（配列入力）
    # ------------------------------------------------------------------

    def _segments(self, x: np.ndarray):
        d = self.derived
        body = x <= d.u1
        tail = x > self.params.u2
        bridge = ~body & ~tail
        return body, bridge, tail

    def _logpdf(self, x: np.ndarray) -> np.ndarray:
        p, d = self.params, self.derived
        x1 = np.atleast_1d(x)
        out = np.empty_like(x1)
        body, bridge, tail = self._segments(x1)

        z = (x1[body] - p.mu) / p.sigma
        out[body] = d.log_gamma1 + _log_normal_pdf(z) - math.log(p.sigma)
        out[bridge] = math.log(d.lam) - d.lam * (x1[bridge] - d.u1) - math.log(d.denominator)
        scaled = 1.0 + p.xi * (x1[tail] - p.u2) / d.beta
        out[tail] = math.log(d.gamma3 / d.beta) - (1.0 + 1.0 / p.xi) * np.log(scaled)
        return out.reshape(x.shape)

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        p, d = self.params, self.derived
        x1 = np.atleast_1d(x)
        out = np.empty_like(x1)
        body, bridge, tail = self._segments(x1)

        z = (x1[body] - p.mu) / p.sigma
        with np.errstate(under="ignore"):
            out[body] = np.exp(d.log_gamma1 + special.log_ndtr(z))
        out[bridge] = d.p1 - np.expm1(-d.lam * (x1[bridge] - d.u1)) / d.denominator
        scaled = 1.0 + p.xi * (x1[tail] - p.u2) / d.beta
        out[tail] = 1.0 - d.gamma3 * scaled ** (-1.0 / p.xi)
        return np.clip(out, 0.0, 1.0).reshape(x.shape)

    def _quantile(self, probs: np.ndarray) -> np.ndarray:
        p, d = self.params, self.derived
        q1 = np.atleast_1d(probs)
        out = np.empty_like(q1)
        body = q1 <= d.p1
        tail = q1 >= d.p2
        bridge = ~body & ~tail

        with np.errstate(under="ignore"):
            ratio = np.exp(np.log(q1[body]) - d.log_gamma1)
        out[body] = p.mu + p.sigma * special.ndtri(np.minimum(ratio, 1.0))
        out[bridge] = d.u1 - np.log1p(-(q1[bridge] - d.p1) * d.denominator) / d.lam
        tail_ratio = np.minimum((1.0 - q1[tail]) / d.gamma3, 1.0)
        out[tail] = p.u2 + d.beta * np.expm1(-p.xi * np.log(tail_ratio)) / p.xi
        # 第3区間の左端はちょうど u2
        out[q1 == d.p2] = p.u2
        return out.reshape(probs.shape)


# ============================================================================
# 関数インターフェース
# ============================================================================


def pdf(x: ArrayLike, free: ModelParams) -> Any:
    """密度 h(x; θ)"""
    return HybridModel.from_params(free).pdf(x)


def logpdf(x: ArrayLike, free: ModelParams) -> Any:
    """対数密度 log h(x; θ)"""
    return HybridModel.from_params(free).logpdf(x)


def cdf(x: ArrayLike, free: ModelParams) -> Any:
    """分布関数 H(x; θ)"""
    return HybridModel.from_params(free).cdf(x)


def quantile(p: ArrayLike, free: ModelParams) -> Any:
    """
    分位関数 H^{-1}(p; θ)

    Raises:
        DomainError: p が (0, 1) の外側
    """
    return HybridModel.from_params(free).quantile(p)


def sample(n: int, free: ModelParams, seed: Optional[int] = None) -> np.ndarray:
    """逆変換法による乱数生成（seedに対して決定的）"""
    return HybridModel.from_params(free).sample(n, seed)


# ============================================================================
# 補助分布
# ============================================================================


def normal_cdf(x: ArrayLike) -> Any:
    """標準正規分布の分布関数（相補誤差関数ベース）"""
    values = np.asarray(x, dtype=float)
    return _finish(special.ndtr(values), values.ndim == 0)


def normal_pdf(x: ArrayLike) -> Any:
    """標準正規分布の密度"""
    values = np.asarray(x, dtype=float)
    return _finish(np.exp(_log_normal_pdf(values)), values.ndim == 0)


def _check_gpd_scale(beta: float) -> None:
    if not (math.isfinite(beta) and beta > 0):
        msg = f"GPDの尺度 beta は正である必要があります: {beta!r}"
        raise DomainError(msg)


def _gpd_upper_endpoint(xi: float, beta: float) -> float:
    return -beta / xi if xi < 0 else math.inf


def _check_gpd_support(x: np.ndarray, xi: float, beta: float) -> None:
    _check_gpd_scale(beta)
    if np.any(x < 0) or np.any(x > _gpd_upper_endpoint(xi, beta)):
        msg = f"GPDの台の外側の値があります (xi={xi!r}, beta={beta!r})"
        raise DomainError(msg)


def _gpd_cdf_unchecked(x: np.ndarray, xi: float, beta: float) -> np.ndarray:
    x = np.clip(x, 0.0, _gpd_upper_endpoint(xi, beta))
    if xi == 0.0:
        return -np.expm1(-x / beta)
    with np.errstate(divide="ignore"):
        return -np.expm1(-np.log1p(xi * x / beta) / xi)


def gpd_cdf(x: ArrayLike, xi: float, beta: float) -> Any:
    """
    一般化パレート分布の分布関数

    Raises:
        DomainError: beta <= 0 または x が台の外側
    """
    values = np.asarray(x, dtype=float)
    _check_gpd_support(values, xi, beta)
    return _finish(_gpd_cdf_unchecked(values, xi, beta), values.ndim == 0)


def gpd_pdf(x: ArrayLike, xi: float, beta: float) -> Any:
    """一般化パレート分布の密度"""
    values = np.asarray(x, dtype=float)
    _check_gpd_support(values, xi, beta)
    if xi == 0.0:
        out = np.exp(-values / beta) / beta
    else:
        with np.errstate(divide="ignore"):
            out = np.exp(-(1.0 + 1.0 / xi) * np.log1p(xi * values / beta)) / beta
    return _finish(out, values.ndim == 0)


def gpd_quantile(q: ArrayLike, xi: float, beta: float) -> Any:
    """一般化パレート分布の分位関数（q は [0, 1)）"""
    _check_gpd_scale(beta)
    probs = np.asarray(q, dtype=float)
    if np.any(probs < 0) or np.any(probs >= 1):
        msg = f"q は [0, 1) に含まれる必要があります: {q!r}"
        raise DomainError(msg)
    if xi == 0.0:
        out = -beta * np.log1p(-probs)
    else:
        out = beta * np.expm1(-xi * np.log1p(-probs)) / xi
    return _finish(out, probs.ndim == 0)
