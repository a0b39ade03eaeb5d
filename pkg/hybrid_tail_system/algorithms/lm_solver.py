#!/usr/bin/env python3

"""
Levenberg-Marquardt法による制約付き非線形最小二乗

制約は滑らかな変数変換（恒等・対数・アフィンロジスティック）で扱い、
ソルバーは常に無制約の内部座標を動かす。ヤコビアンは前進差分。
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from ..core.constants import SolverDefaults, SolverStatus
from ..core.exceptions import (
    DomainError,
    InvalidConfigError,
    NonFiniteResidualError,
    SingularNormalEquationsError,
    ValidationError,
)
from ..core.logging_config import get_logger

logger = get_logger(__name__)

ResidualFunction = Callable[[np.ndarray], np.ndarray]


# ============================================================================
# 変数変換
# ============================================================================


class IdentityTransform:
    """恒等変換"""

    tag = "identity"

    def to_external(self, z: float) -> float:
        return z

    def to_internal(self, x: float) -> float:
        return x

    def __repr__(self) -> str:
        return "IdentityTransform()"


class LogTransform:
    """x = lower + exp(z)（x > lower）"""

    tag = "log"

    def __init__(self, lower: float = 0.0):
        self.lower = float(lower)

    def to_external(self, z: float) -> float:
        return self.lower + math.exp(min(z, 700.0))

    def to_internal(self, x: float) -> float:
        if not x > self.lower:
            msg = f"初期値が下限を満たしていません: {x!r} <= {self.lower!r}"
            raise DomainError(msg)
        return math.log(x - self.lower)

    def __repr__(self) -> str:
        return f"LogTransform(lower={self.lower!r})"


class LogisticTransform:
    """x = lower + (upper - lower) * expit(z)（lower < x < upper）"""

    tag = "affine-logistic"

    # 境界上の初期値を内部座標へ送るときの余裕
    _EDGE = 1e-12

    def __init__(self, lower: float, upper: float):
        if not (math.isfinite(lower) and math.isfinite(upper) and lower < upper):
            msg = f"ロジスティック変換の区間が不正です: [{lower!r}, {upper!r}]"
            raise InvalidConfigError(msg)
        self.lower = float(lower)
        self.upper = float(upper)

    def to_external(self, z: float) -> float:
        return self.lower + (self.upper - self.lower) * float(special.expit(z))

    def to_internal(self, x: float) -> float:
        fraction = (x - self.lower) / (self.upper - self.lower)
        if not 0.0 <= fraction <= 1.0:
            msg = f"初期値が区間の外側です: {x!r} not in [{self.lower!r}, {self.upper!r}]"
            raise DomainError(msg)
        fraction = min(max(fraction, self._EDGE), 1.0 - self._EDGE)
        return float(special.logit(fraction))

    def __repr__(self) -> str:
        return f"LogisticTransform(lower={self.lower!r}, upper={self.upper!r})"


# ============================================================================
# 問題・設定・結果
# ============================================================================


@dataclass(frozen=True)
class LmProblem:
    """
    最小二乗問題

    Attributes:
        residuals: 外部座標のパラメータ -> 残差ベクトル
        dimension: パラメータ数
        residual_count: 残差の数
        transforms: パラメータごとの変数変換（省略時は恒等）
    """

    residuals: ResidualFunction
    dimension: int
    residual_count: int
    transforms: Tuple = ()

    def __post_init__(self) -> None:
        if self.dimension < 1:
            msg = f"パラメータ数は1以上で指定してください: {self.dimension}"
            raise InvalidConfigError(msg)
        if self.residual_count < self.dimension:
            msg = f"残差の数 ({self.residual_count}) がパラメータ数 ({self.dimension}) より少ないです"
            raise InvalidConfigError(msg)
        if not self.transforms:
            object.__setattr__(
                self, "transforms", tuple(IdentityTransform() for _ in range(self.dimension))
            )
        elif len(self.transforms) != self.dimension:
            msg = f"変数変換の数 ({len(self.transforms)}) がパラメータ数と一致しません"
            raise InvalidConfigError(msg)

    def to_external(self, z: np.ndarray) -> np.ndarray:
        return np.array([t.to_external(float(v)) for t, v in zip(self.transforms, z)])

    def to_internal(self, x: Sequence[float]) -> np.ndarray:
        return np.array([t.to_internal(float(v)) for t, v in zip(self.transforms, x)])


@dataclass(frozen=True)
class LmOptions:
    """ソルバーの設定"""

    max_iterations: int = SolverDefaults.MAX_ITERATIONS
    gradient_tolerance: float = SolverDefaults.GRADIENT_TOL
    step_tolerance: float = SolverDefaults.STEP_TOL
    initial_damping: float = SolverDefaults.INITIAL_DAMPING
    damping_increase: float = SolverDefaults.DAMPING_INCREASE
    damping_decrease: float = SolverDefaults.DAMPING_DECREASE
    jacobian_step: float = SolverDefaults.JACOBIAN_STEP
    max_damping: float = SolverDefaults.MAX_DAMPING

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            msg = f"max_iterations は1以上で指定してください: {self.max_iterations}"
            raise InvalidConfigError(msg)
        for name in ("gradient_tolerance", "step_tolerance", "initial_damping", "jacobian_step"):
            if not getattr(self, name) > 0:
                msg = f"{name} は正の値で指定してください: {getattr(self, name)!r}"
                raise InvalidConfigError(msg)
        if not self.damping_increase > 1.0 > self.damping_decrease > 0.0:
            msg = "減衰係数は increase > 1 > decrease > 0 を満たす必要があります"
            raise InvalidConfigError(msg)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class LmResult:
    """
    ソルバーの結果

    Attributes:
        solution: 外部座標の解
        internal: 内部座標の解
        objective: 最終的な残差二乗和
        initial_objective: 初期点の残差二乗和
        iterations: 反復回数（棄却された試行を含む）
        status: 終了状態
        history: 受理された点の目的関数値の列
    """

    solution: np.ndarray
    internal: np.ndarray
    objective: float
    initial_objective: float
    iterations: int
    status: str
    history: Tuple[float, ...] = field(default=(), repr=False)


# ============================================================================
# 本体
# ============================================================================


def _evaluate(problem: LmProblem, z: np.ndarray) -> Optional[np.ndarray]:
    """内部座標で残差を評価。有限でない、または実行不能な点では None"""
    try:
        residuals = np.asarray(problem.residuals(problem.to_external(z)), dtype=float)
    except (ValidationError, FloatingPointError, OverflowError):
        return None
    if residuals.shape != (problem.residual_count,) or not np.all(np.isfinite(residuals)):
        return None
    return residuals


def forward_difference_jacobian(
    fun: Callable[[np.ndarray], Optional[np.ndarray]],
    z: np.ndarray,
    base: np.ndarray,
    rel_step: float = SolverDefaults.JACOBIAN_STEP,
) -> np.ndarray:
    """
    前進差分ヤコビアン（刻み rel_step*(1+|z_i|)）

    前進側で評価できない成分は後退差分、どちらも不可なら0列。

    Args:
        fun: 内部座標 -> 残差（評価不能なら None）
        z: 評価点
        base: fun(z)
        rel_step: 相対刻み

    Returns:
        np.ndarray: (残差数, 次元) の行列
    """
    jacobian = np.zeros((base.size, z.size))
    for i in range(z.size):
        step = rel_step * (1.0 + abs(z[i]))
        shifted = z.copy()
        shifted[i] += step
        forward = fun(shifted)
        if forward is not None:
            jacobian[:, i] = (forward - base) / step
            continue
        shifted[i] = z[i] - step
        backward = fun(shifted)
        if backward is not None:
            jacobian[:, i] = (base - backward) / step
    return jacobian


def solve(
    problem: LmProblem, init: Sequence[float], opts: Optional[LmOptions] = None
) -> LmResult:
    """
    Levenberg-Marquardt法で残差二乗和を最小化

    Args:
        problem: 最小二乗問題
        init: 実行可能な初期値（外部座標）
        opts: ソルバー設定

    Returns:
        LmResult: 結果（目的関数値は初期値以下）

    Raises:
        NonFiniteResidualError: 初期点で残差が有限でない
        SingularNormalEquationsError: 最大減衰でも減衰正規方程式が解けない
    """
    opts = opts or LmOptions()
    z = problem.to_internal(init)

    def evaluate(point: np.ndarray) -> Optional[np.ndarray]:
        return _evaluate(problem, point)

    residuals = evaluate(z)
    if residuals is None:
        msg = f"初期点で残差がNaNまたは無限大です: {list(init)!r}"
        raise NonFiniteResidualError(msg)

    cost = float(residuals @ residuals)
    initial_cost = cost
    history: List[float] = [cost]

    jacobian = forward_difference_jacobian(evaluate, z, residuals, opts.jacobian_step)
    normal = jacobian.T @ jacobian
    gradient = jacobian.T @ residuals
    damping = opts.initial_damping * float(np.max(np.diag(normal)))
    if not damping > 0:
        damping = opts.initial_damping

    identity = np.eye(problem.dimension)
    status = SolverStatus.MAX_ITERATIONS
    iterations = 0

    while iterations < opts.max_iterations:
        if float(np.max(np.abs(gradient))) <= opts.gradient_tolerance:
            status = SolverStatus.CONVERGED_GRADIENT
            break

        iterations += 1
        try:
            delta = np.linalg.solve(normal + damping * identity, -gradient)
        except np.linalg.LinAlgError:
            delta = None
        if delta is None or not np.all(np.isfinite(delta)):
            damping *= opts.damping_increase
            if damping > opts.max_damping:
                msg = f"最大減衰 ({opts.max_damping:.1e}) でも正規方程式が解けません"
                raise SingularNormalEquationsError(msg)
            continue

        step_norm = float(np.linalg.norm(delta))
        if step_norm <= opts.step_tolerance * (float(np.linalg.norm(z)) + opts.step_tolerance):
            status = SolverStatus.CONVERGED_STEP
            break

        candidate = z + delta
        trial = evaluate(candidate)
        trial_cost = float(trial @ trial) if trial is not None else math.inf

        if trial is not None and trial_cost < cost:
            z, residuals, cost = candidate, trial, trial_cost
            history.append(cost)
            jacobian = forward_difference_jacobian(evaluate, z, residuals, opts.jacobian_step)
            normal = jacobian.T @ jacobian
            gradient = jacobian.T @ residuals
            damping = max(damping * opts.damping_decrease, np.finfo(float).tiny)
        else:
            damping = min(damping * opts.damping_increase, opts.max_damping)

    logger.debug(
        f"LM終了: 状態={status}, 反復={iterations}, 目的関数 {initial_cost:.6e} -> {cost:.6e}"
    )

    return LmResult(
        solution=problem.to_external(z),
        internal=z,
        objective=cost,
        initial_objective=initial_cost,
        iterations=iterations,
        status=status,
        history=tuple(history),
    )
