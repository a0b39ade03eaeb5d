#!/usr/bin/env python3

"""
Levenberg-Marquardtソルバーのテスト
"""

import math

import numpy as np
import pytest

from hybrid_tail_system.algorithms.lm_solver import (
    IdentityTransform,
    LmOptions,
    LmProblem,
    LogisticTransform,
    LogTransform,
    forward_difference_jacobian,
    solve,
)
from hybrid_tail_system.core.constants import SolverStatus
from hybrid_tail_system.core.exceptions import (
    DomainError,
    InvalidConfigError,
    NonFiniteResidualError,
)

A = np.array([[3.0, 1.0], [1.0, 2.0]])
B = np.array([9.0, 8.0])


def rosenbrock(x):
    return np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]])


class TestTransforms:
    """変数変換のテスト"""

    def test_identity(self):
        """恒等変換"""
        t = IdentityTransform()
        assert t.to_external(t.to_internal(-3.5)) == -3.5

    def test_log_round_trip(self):
        """対数変換は下限より上で往復する"""
        t = LogTransform(lower=0.2)
        assert t.to_external(t.to_internal(1.7)) == pytest.approx(1.7)
        assert t.to_external(-5.0) > 0.2

    def test_log_rejects_infeasible_start(self):
        """下限以下の初期値は拒否"""
        with pytest.raises(DomainError):
            LogTransform(lower=1.0).to_internal(1.0)

    def test_logistic_round_trip(self):
        """ロジスティック変換は区間内で往復する"""
        t = LogisticTransform(-1.0, 3.0)
        assert t.to_external(t.to_internal(0.5)) == pytest.approx(0.5)
        for z in (-40.0, 0.0, 40.0):
            assert -1.0 <= t.to_external(z) <= 3.0

    def test_logistic_boundary_start(self):
        """区間の端の初期値は有限の内部座標になる"""
        t = LogisticTransform(0.0, 1.0)
        assert math.isfinite(t.to_internal(0.0))
        assert math.isfinite(t.to_internal(1.0))

    def test_logistic_invalid(self):
        """不正な区間と区間外の初期値"""
        with pytest.raises(InvalidConfigError):
            LogisticTransform(1.0, 1.0)
        with pytest.raises(DomainError):
            LogisticTransform(0.0, 1.0).to_internal(2.0)


class TestProblemAndOptions:
    """LmProblem・LmOptionsの検証のテスト"""

    def test_default_transforms(self):
        """変換の省略時は恒等"""
        problem = LmProblem(residuals=rosenbrock, dimension=2, residual_count=2)
        assert all(isinstance(t, IdentityTransform) for t in problem.transforms)

    def test_too_few_residuals(self):
        """残差数 < 次元はエラー"""
        with pytest.raises(InvalidConfigError):
            LmProblem(residuals=rosenbrock, dimension=3, residual_count=2)

    def test_transform_count_mismatch(self):
        """変換の数が次元と違うとエラー"""
        with pytest.raises(InvalidConfigError):
            LmProblem(
                residuals=rosenbrock,
                dimension=2,
                residual_count=2,
                transforms=(IdentityTransform(),),
            )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"gradient_tolerance": 0.0},
            {"damping_increase": 0.5},
            {"damping_decrease": 1.5},
        ],
    )
    def test_invalid_options(self, kwargs):
        """不正な設定値"""
        with pytest.raises(InvalidConfigError):
            LmOptions(**kwargs)


class TestJacobian:
    """前進差分ヤコビアンのテスト"""

    def test_linear_jacobian(self):
        """線形残差のヤコビアンは係数行列"""
        z = np.array([0.5, -1.0])

        def fun(point):
            return A @ point - B

        jacobian = forward_difference_jacobian(fun, z, fun(z))
        assert jacobian == pytest.approx(A, abs=1e-6)

    def test_matches_central_difference(self):
        """滑らかな残差では中心差分と相対1e-6で一致"""
        z = np.array([0.7, 1.3])

        def fun(point):
            return np.array(
                [
                    np.sin(point[0]) * point[1],
                    np.exp(0.3 * point[0]) - point[1] ** 2,
                    point[0] * point[1],
                ]
            )

        h = 1e-5
        central = np.column_stack(
            [(fun(z + h * e) - fun(z - h * e)) / (2.0 * h) for e in np.eye(z.size)]
        )
        jacobian = forward_difference_jacobian(fun, z, fun(z))
        np.testing.assert_allclose(jacobian, central, rtol=1e-6)

    def test_backward_fallback(self):
        """前進側で評価できない成分は後退差分"""
        z = np.array([0.0])

        def fun(point):
            if point[0] > 0:
                return None
            return np.array([2.0 * point[0]])

        jacobian = forward_difference_jacobian(fun, z, fun(z))
        assert jacobian[0, 0] == pytest.approx(2.0)


class TestSolve:
    """solveのテスト"""

    def test_linear_least_squares(self):
        """正則な線形問題は3反復以内に厳密解"""
        problem = LmProblem(residuals=lambda x: A @ x - B, dimension=2, residual_count=2)
        opts = LmOptions(max_iterations=3, initial_damping=1e-6)
        result = solve(problem, [0.0, 0.0], opts)
        assert result.iterations <= 3
        assert result.solution == pytest.approx(np.linalg.solve(A, B), abs=1e-10)

    def test_rosenbrock(self):
        """曲がった谷の問題を (1, 1) まで解く"""
        problem = LmProblem(residuals=rosenbrock, dimension=2, residual_count=2)
        result = solve(problem, [-1.2, 1.0])
        assert result.solution == pytest.approx([1.0, 1.0], abs=1e-8)
        assert result.status in (SolverStatus.CONVERGED_GRADIENT, SolverStatus.CONVERGED_STEP)

    def test_objective_never_increases(self):
        """受理された目的関数値は単調減少で、初期値以下"""
        problem = LmProblem(residuals=rosenbrock, dimension=2, residual_count=2)
        result = solve(problem, [-1.2, 1.0])
        history = np.array(result.history)
        assert np.all(np.diff(history) < 0)
        assert result.objective <= result.initial_objective
        assert history[0] == result.initial_objective

    def test_positivity_by_log_transform(self):
        """x > 0 の下で (x + 1)^2 を最小化すると境界に近づく"""
        problem = LmProblem(
            residuals=lambda x: np.array([x[0] + 1.0]),
            dimension=1,
            residual_count=1,
            transforms=(LogTransform(0.0),),
        )
        result = solve(problem, [1.0])
        assert 0.0 <= result.solution[0] <= 1e-6
        assert np.all(np.isfinite(result.internal))

    def test_every_iterate_is_feasible(self):
        """試行点とヤコビアンの評価点を含め、すべての評価点が制約を満たす"""
        visited = []

        def residuals(x):
            visited.append(x.copy())
            return np.array([x[0] + 1.0, x[1] - 2.0, x[0] * x[1]])

        problem = LmProblem(
            residuals=residuals,
            dimension=2,
            residual_count=3,
            transforms=(LogTransform(0.0), LogisticTransform(0.0, 1.0)),
        )
        result = solve(problem, [2.0, 0.5])

        points = np.array(visited)
        assert len(points) > 1
        assert np.all(points[:, 0] >= 0.0)
        assert np.all((points[:, 1] >= 0.0) & (points[:, 1] <= 1.0))
        assert result.solution[0] > 0.0
        assert 0.0 < result.solution[1] <= 1.0

    def test_max_iterations_status(self):
        """反復上限に達したときの状態"""
        problem = LmProblem(residuals=rosenbrock, dimension=2, residual_count=2)
        result = solve(problem, [-1.2, 1.0], LmOptions(max_iterations=1))
        assert result.iterations == 1
        assert result.status == SolverStatus.MAX_ITERATIONS

    def test_nonfinite_start(self):
        """初期点で残差がNaNならエラー"""
        problem = LmProblem(
            residuals=lambda x: np.array([math.nan, x[0]]), dimension=1, residual_count=2
        )
        with pytest.raises(NonFiniteResidualError):
            solve(problem, [1.0])

    def test_infeasible_trial_points_rejected(self):
        """評価できない試行点は棄却され、解は実行可能域に残る"""

        def residuals(x):
            if x[0] < 0.5:
                msg = "infeasible"
                raise DomainError(msg)
            return np.array([x[0] - 0.0])

        problem = LmProblem(residuals=residuals, dimension=1, residual_count=1)
        result = solve(problem, [2.0])
        assert result.solution[0] >= 0.5
        assert result.objective <= 4.0
