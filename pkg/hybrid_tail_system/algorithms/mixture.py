#!/usr/bin/env python3

"""
2つのG-E-GPDハイブリッドの両側混合

左裾は符号を反転した観測 -x に当てはめた θ1、右裾は θ2 で表し、接合点 c
（既定 0）で密度が連続になるよう重み alpha1, alpha2 を決める。

各半分は接合点の片側に条件付けたハイブリッド密度

    x <  c:  alpha1 * h(-x; θ1) / (1 - H(-c; θ1))
    x >= c:  alpha2 * h(x; θ2)  / (1 - H(c; θ2))

で、mixture_cdf(c) = alpha1 と全体の正規化が同時に成り立つ。
接合点ちょうどの質量は右側に属する。
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.exceptions import DegenerateJunctionError, InvalidParameterError
from ..utils.validation import validate_probability
from .hybrid_model import ArrayLike, HybridModel, ModelParams, _finish

_EDGE = 2.0**-53


def junction_weights(h_left: float, h_right: float) -> Tuple[float, float]:
    """
    接合点での左右の密度から重みを解く

    alpha1 + alpha2 = 1 かつ alpha1*h_left = alpha2*h_right の唯一解。

    Args:
        h_left: 左側の（重みを掛ける前の）接合点密度
        h_right: 右側の（重みを掛ける前の）接合点密度

    Returns:
        (alpha1, alpha2)

    Raises:
        DegenerateJunctionError: 両密度の和が0または有限でない

    Examples:
        >>> junction_weights(3.0, 1.0)
        (0.25, 0.75)
    """
    total = h_left + h_right
    if not (math.isfinite(total) and total > 0):
        msg = f"接合点で両側の密度が0です (h_left={h_left!r}, h_right={h_right!r})"
        raise DegenerateJunctionError(msg)
    alpha1 = h_right / total
    return alpha1, 1.0 - alpha1


def _half_junction_density(model: HybridModel, point: float) -> float:
    survival = 1.0 - float(model.cdf(point))
    if survival <= 0:
        return 0.0
    return float(model.pdf(point)) / survival


def mixture_weights(
    theta_left: ModelParams, theta_right: ModelParams, junction: float = 0.0
) -> Tuple[float, float]:
    """
    密度の連続性と単位質量から混合重みを計算

    各半分は接合点の片側に条件付けた密度なので、junction_weights に渡すのは
    素の密度 h ではなく h / (1 - H)。h_left : h_right = 3 : 1 で alpha1 = 0.25
    となる関係は junction_weights の入力についてのもの。

    Args:
        theta_left: 左裾（符号反転済み観測）のパラメータ
        theta_right: 右裾のパラメータ
        junction: 接合点

    Returns:
        (alpha1, alpha2)

    Raises:
        DegenerateJunctionError: 接合点で両密度が0
    """
    left = HybridModel.from_params(theta_left)
    right = HybridModel.from_params(theta_right)
    return junction_weights(
        _half_junction_density(left, -junction), _half_junction_density(right, junction)
    )


@dataclass(frozen=True)
class MixtureModel:
    """両側混合モデル"""

    theta_left: ModelParams
    theta_right: ModelParams
    alpha1: float
    alpha2: float
    junction: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                msg = f"{name} は (0, 1) に含まれる必要があります: {value!r}"
                raise InvalidParameterError(msg)
        if abs(self.alpha1 + self.alpha2 - 1.0) > 1e-12:
            msg = f"alpha1 + alpha2 が1ではありません: {self.alpha1!r} + {self.alpha2!r}"
            raise InvalidParameterError(msg)

    @classmethod
    def from_params(
        cls, theta_left: ModelParams, theta_right: ModelParams, junction: float = 0.0
    ) -> "MixtureModel":
        alpha1, alpha2 = mixture_weights(theta_left, theta_right, junction)
        return cls(theta_left, theta_right, alpha1, alpha2, junction)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_left": self.theta_left.to_dict(),
            "theta_right": self.theta_right.to_dict(),
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "junction": self.junction,
        }


@dataclass(frozen=True)
class _MixtureParts:
    left: HybridModel
    right: HybridModel
    left_mass: float
    right_mass: float
    right_base: float

    @classmethod
    def of(cls, mix: MixtureModel) -> "_MixtureParts":
        left = HybridModel.from_params(mix.theta_left)
        right = HybridModel.from_params(mix.theta_right)
        right_base = float(right.cdf(mix.junction))
        return cls(
            left=left,
            right=right,
            left_mass=1.0 - float(left.cdf(-mix.junction)),
            right_mass=1.0 - right_base,
            right_base=right_base,
        )


def mixture_pdf(x: ArrayLike, mix: MixtureModel) -> Any:
    """両側混合の密度"""
    values = np.asarray(x, dtype=float)
    parts = _MixtureParts.of(mix)
    lower = values < mix.junction
    out = np.where(
        lower,
        mix.alpha1 * np.asarray(parts.left.pdf(-values)) / parts.left_mass,
        mix.alpha2 * np.asarray(parts.right.pdf(values)) / parts.right_mass,
    )
    return _finish(out, values.ndim == 0)


def mixture_cdf(x: ArrayLike, mix: MixtureModel) -> Any:
    """両側混合の分布関数（接合点で alpha1）"""
    values = np.asarray(x, dtype=float)
    parts = _MixtureParts.of(mix)
    lower = values < mix.junction
    left_part = mix.alpha1 * (1.0 - np.asarray(parts.left.cdf(-values))) / parts.left_mass
    right_part = mix.alpha1 + mix.alpha2 * (
        np.asarray(parts.right.cdf(values)) - parts.right_base
    ) / parts.right_mass
    out = np.clip(np.where(lower, left_part, right_part), 0.0, 1.0)
    return _finish(out, values.ndim == 0)


def mixture_quantile(p: ArrayLike, mix: MixtureModel) -> Any:
    """両側混合の分位関数"""
    probs = validate_probability(p)
    parts = _MixtureParts.of(mix)
    q = np.atleast_1d(probs)
    out = np.empty_like(q)
    lower = q < mix.alpha1

    left_level = np.clip(1.0 - q[lower] * parts.left_mass / mix.alpha1, _EDGE, 1.0 - _EDGE)
    out[lower] = -np.asarray(parts.left.quantile(left_level))
    right_level = parts.right_base + (q[~lower] - mix.alpha1) * parts.right_mass / mix.alpha2
    right_level = np.clip(right_level, _EDGE, 1.0 - _EDGE)
    out[~lower] = np.asarray(parts.right.quantile(right_level))
    return _finish(out.reshape(probs.shape), probs.ndim == 0)


def mixture_sample(n: int, mix: MixtureModel, seed: Optional[int] = None) -> np.ndarray:
    """両側混合からの乱数生成"""
    if n < 1:
        msg = f"標本サイズは1以上で指定してください: n={n}"
        raise InvalidParameterError(msg)
    rng = np.random.default_rng(seed)
    uniforms = np.maximum(rng.random(n), _EDGE)
    return np.asarray(mixture_quantile(uniforms, mix))
