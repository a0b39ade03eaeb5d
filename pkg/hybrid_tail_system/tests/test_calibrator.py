#!/usr/bin/env python3

"""
自己キャリブレーションのテスト
"""

import math

import numpy as np
import pytest
from scipy import special

from hybrid_tail_system.algorithms import calibrator
from hybrid_tail_system.algorithms.calibrator import (
    FitConfig,
    _sse,
    empirical_cdf,
    estimate_mode,
    fit,
    full_mse,
    initialize,
    step_p,
    step_xi,
    synthetic_grid,
    tail_mse,
)
from hybrid_tail_system.algorithms.hybrid_model import HybridModel, ModelParams
from hybrid_tail_system.core.constants import StopReasons
from hybrid_tail_system.core.exceptions import (
    AllStepsFailedError,
    DegenerateRangeError,
    DomainError,
    EmptyDataError,
    InvalidConfigError,
    NoTailPointsError,
    SingularNormalEquationsError,
)
from hybrid_tail_system.tests.conftest import quantile_grid


def gaussian_grid(mu: float, sigma: float, n: int) -> np.ndarray:
    return mu + sigma * special.ndtri((np.arange(n) + 0.5) / n)


def failing_after(real, calls_before_failure):
    """指定回数の呼び出しの後は SingularNormalEquationsError を送出する"""
    calls = {"count": 0}

    def wrapper(*args, **kwargs):
        calls["count"] += 1
        if calls["count"] > calls_before_failure:
            msg = "最大減衰でも正規方程式が解けません"
            raise SingularNormalEquationsError(msg)
        return real(*args, **kwargs)

    return wrapper


class TestEmpiricalCdf:
    """経験分布関数のテスト"""

    def test_direct_count(self):
        """[1,2,3] で H_n(2) = 2/3"""
        ecdf = empirical_cdf([3.0, 1.0, 2.0])
        assert ecdf(2.0) == pytest.approx(2.0 / 3.0)

    def test_outside_range(self):
        """最小値未満は0、最大値以上は1"""
        ecdf = empirical_cdf([1.0, 2.0, 3.0])
        assert ecdf(0.5) == 0.0
        assert ecdf(3.0) == 1.0
        assert ecdf(10.0) == 1.0

    def test_right_continuous(self):
        """観測点ちょうどで跳ぶ"""
        ecdf = empirical_cdf([1.0, 2.0])
        assert ecdf(np.nextafter(1.0, 0.0)) == 0.0
        assert ecdf(1.0) == 0.5

    def test_quantile_convention(self):
        """分位点は x_(ceil(p*n))"""
        ecdf = empirical_cdf(np.arange(1.0, 1001.0))
        assert ecdf.quantile(0.9) == 900.0
        assert ecdf.quantile(0.9001) == 901.0
        assert empirical_cdf([3.0, 1.0, 2.0, 4.0]).quantile(0.5) == 2.0

    def test_empty(self):
        """空の標本はエラー"""
        with pytest.raises(EmptyDataError):
            empirical_cdf([])


class TestSyntheticGrid:
    """合成グリッドのテスト"""

    def test_two_points(self):
        """m=2 は両端だけ"""
        grid = synthetic_grid([0.0, 4.0, 9.0], 2)
        assert grid.points.tolist() == [0.0, 9.0]

    def test_three_points(self):
        """m=3 の中点は 9*log10(5.5)"""
        grid = synthetic_grid([0.0, 9.0], 3)
        assert grid.points == pytest.approx([0.0, 9.0 * math.log10(5.5), 9.0])

    def test_strictly_increasing(self):
        """端点がデータの最小・最大で狭義単調増加"""
        data = np.random.default_rng(0).normal(size=500)
        grid = synthetic_grid(data, 1000)
        assert grid.size == 1000
        assert grid.points[0] == data.min()
        assert grid.points[-1] == data.max()
        assert np.all(np.diff(grid.points) > 0)

    def test_invalid_size(self):
        """m < 2 はエラー"""
        with pytest.raises(InvalidConfigError):
            synthetic_grid([0.0, 1.0], 1)

    def test_degenerate_range(self):
        """範囲0はエラー"""
        with pytest.raises(DegenerateRangeError):
            synthetic_grid([2.0, 2.0, 2.0], 10)


class TestEstimateMode:
    """最頻値推定のテスト"""

    def test_standard_normal(self):
        """標準正規標本の最頻値は0付近"""
        data = np.random.default_rng(12345).normal(size=100_000)
        assert abs(estimate_mode(data)) < 0.1

    def test_dominating_value(self):
        """多く繰り返された値を含むビンを選ぶ"""
        data = np.concatenate([np.full(300, 3.0), np.linspace(0.0, 10.0, 1000)])
        edges = np.histogram_bin_edges(data, bins="fd")
        half_width = 0.5 * (edges[1] - edges[0])
        assert abs(estimate_mode(data) - 3.0) <= half_width

    def test_bimodal_heavier_left(self):
        """左の山が重い二峰分布では左の山"""
        rng = np.random.default_rng(7)
        data = np.concatenate([rng.normal(-3.0, 0.5, 6000), rng.normal(3.0, 0.5, 4000)])
        assert estimate_mode(data) == pytest.approx(-3.0, abs=0.2)

    def test_tie_goes_to_smaller(self):
        """同数のビンは小さい側"""
        data = [0.0] * 5 + [1.0] * 5
        assert estimate_mode(data, rule="sturges") == pytest.approx(0.1)

    def test_too_small(self):
        """10点未満はエラー"""
        with pytest.raises(EmptyDataError):
            estimate_mode([1.0, 2.0, 3.0])

    def test_unknown_rule(self):
        """未知のビン幅規則はエラー"""
        with pytest.raises(InvalidConfigError):
            estimate_mode(np.arange(20.0), rule="nonexistent")


class TestFitConfig:
    """FitConfigのテスト"""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": 0.5},
            {"alpha": 1.0},
            {"rho": 0.4},
            {"epsilon": 0.0},
            {"m": 1},
            {"k_max": 0},
            {"min_sample_size": 1},
            {"xi_stagnation_epsilon": -1.0},
        ],
    )
    def test_invalid(self, kwargs):
        """範囲外の設定値"""
        with pytest.raises(InvalidConfigError):
            FitConfig(**kwargs)

    def test_grid_size(self):
        """既定の m は max(n, 10^4)"""
        assert FitConfig().grid_size(500) == 10_000
        assert FitConfig().grid_size(20_000) == 20_000
        assert FitConfig(m=300).grid_size(20_000) == 300

    def test_defaults(self):
        """xi 停滞による停止は既定で無効"""
        cfg = FitConfig()
        assert cfg.xi_stagnation_epsilon is None
        assert cfg.to_dict()["solver"]["max_iterations"] == cfg.solver.max_iterations


class TestTailMse:
    """条件C2の距離のテスト"""

    def test_tiny_alpha_equals_full(self, baseline_theta, baseline_grid):
        """alpha -> 0 では全体のMSEに一致"""
        ecdf = empirical_cdf(baseline_grid)
        grid = synthetic_grid(baseline_grid, 500)
        assert tail_mse(baseline_theta, ecdf, grid, alpha=1e-12) == pytest.approx(
            full_mse(baseline_theta, ecdf, grid)
        )

    def test_true_model_is_small(self, baseline_theta, baseline_grid):
        """真のモデルの分位点標本では距離が小さい"""
        ecdf = empirical_cdf(baseline_grid)
        grid = synthetic_grid(baseline_grid, 10_000)
        assert 0.0 <= tail_mse(baseline_theta, ecdf, grid) < 1e-6

    def test_no_tail_points(self, baseline_grid):
        """q_alpha より上にグリッド点がなければエラー"""
        far = ModelParams(1000.0, 1.0, 2000.0, 0.5)
        ecdf = empirical_cdf(baseline_grid)
        grid = synthetic_grid(baseline_grid, 100)
        with pytest.raises(NoTailPointsError):
            tail_mse(far, ecdf, grid)

    def test_alpha_domain(self, baseline_theta, baseline_grid):
        """alpha は (0, 1)"""
        ecdf = empirical_cdf(baseline_grid)
        grid = synthetic_grid(baseline_grid, 100)
        with pytest.raises(DomainError):
            tail_mse(baseline_theta, ecdf, grid, alpha=1.0)


class TestInitialize:
    """初期値のテスト"""

    def test_gaussian_quantile_data(self):
        """正規分位点データでは mu0, sigma0 がほぼ真値"""
        data = gaussian_grid(5.0, 1.0, 200_000)
        p0, xi0 = initialize(data)
        assert p0[0] == pytest.approx(5.0, abs=0.05)
        assert p0[1] == pytest.approx(1.0, abs=0.05)
        assert p0[2] == pytest.approx(5.0 + special.ndtri(0.9), abs=1e-3)
        assert xi0 > 0
        assert math.isfinite(xi0)

    def test_threshold_order_statistic(self):
        """rho = 0.9 の初期閾値は900番目の順序統計量"""
        data = gaussian_grid(10.0, 1.0, 1000)[::-1]
        p0, _ = initialize(data, FitConfig(rho=0.9))
        assert p0[2] == np.sort(data)[899]

    def test_simulated_sample(self, baseline_theta):
        """シミュレーション標本で xi0 は正の有限値"""
        data = HybridModel.from_params(baseline_theta).sample(10_000, seed=1)
        p0, xi0 = initialize(data)
        assert 0 < xi0 < math.inf
        # 初期値は実行可能（u1 <= u2）
        HybridModel.from_params(ModelParams(p0[0], p0[1], p0[2], xi0))


class TestAlternatingSteps:
    """step_p・step_xi のテスト"""

    @pytest.fixture(scope="class")
    def noiseless(self):
        theta = ModelParams(2.0, 1.0, 5.0, 0.5)
        data = quantile_grid(theta, 40_000)
        return theta, empirical_cdf(data), synthetic_grid(data, data.size)

    def test_step_p_recovers_truth(self, noiseless):
        """真の xi を固定すると p は真値の近く"""
        theta, ecdf, grid = noiseless
        p = step_p(grid, ecdf, theta.xi, [2.1, 1.05, 5.2])
        assert p == pytest.approx([theta.mu, theta.sigma, theta.u2], abs=1e-3)

    def test_step_p_descent(self, noiseless):
        """目的関数は増えない"""
        theta, ecdf, grid = noiseless
        targets = np.asarray(ecdf(grid.points))
        start = [2.5, 0.8, 6.0]
        p = step_p(grid, ecdf, theta.xi, start)
        before = _sse(ModelParams(*start, theta.xi), grid, targets)
        after = _sse(ModelParams(*p, theta.xi), grid, targets)
        assert after <= before

    def test_step_xi_recovers_truth(self, noiseless):
        """真の p を固定すると xi は真値の近く"""
        theta, ecdf, grid = noiseless
        xi = step_xi(grid, ecdf, [theta.mu, theta.sigma, theta.u2], 0.8)
        assert xi == pytest.approx(theta.xi, abs=1e-3)

    def test_step_xi_descent(self, noiseless):
        """目的関数は増えず、u1 <= u2 を保つ"""
        theta, ecdf, grid = noiseless
        targets = np.asarray(ecdf(grid.points))
        p = [1.8, 1.2, 4.5]
        xi = step_xi(grid, ecdf, p, 1.0)
        assert _sse(ModelParams(*p, xi), grid, targets) <= _sse(
            ModelParams(*p, 1.0), grid, targets
        )
        assert HybridModel.from_params(ModelParams(*p, xi)).derived.u1 <= p[2]


class TestFit:
    """fit のテスト"""

    @pytest.fixture(scope="class")
    def result(self):
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        return fit(data, FitConfig(k_max=50))

    def test_recovers_tail_index(self, result):
        """分位点データから xi を回復"""
        assert 0.35 < result.theta.xi < 0.65
        assert result.full_mse < 1e-4

    def test_stop_reason_and_trace(self, result):
        """停止理由と反復記録"""
        assert result.stop_reason in (
            StopReasons.C1C2,
            StopReasons.C3,
            StopReasons.STATIONARY,
        )
        assert len(result.trace) == result.iterations
        assert result.trace[-1].theta == result.theta

    def test_full_mse_never_increases(self, result):
        """反復ごとの全体MSEは増えない"""
        values = [entry.full_mse for entry in result.trace]
        assert np.all(np.diff(values) <= 1e-15)

    def test_deterministic(self, result):
        """同じ入力で同じ結果"""
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        again = fit(data, FitConfig(k_max=50))
        assert again.theta == result.theta
        assert again.iterations == result.iterations

    def test_to_dict(self, result):
        """辞書表現のキー"""
        payload = result.to_dict()
        assert set(payload["theta"]) == {"mu", "sigma", "u2", "xi"}
        assert "lambda" in payload["derived"]
        assert len(payload["trace"]) == result.iterations
        assert "trace" not in result.to_dict(include_trace=False)

    def test_feasible_result(self, result):
        """結果は u1 <= u2"""
        assert result.derived.u1 <= result.theta.u2

    def test_xi_stagnation_stop(self):
        """xi 停滞の停止条件を有効にすると早く止まる"""
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        result = fit(data, FitConfig(k_max=50, xi_stagnation_epsilon=1.0))
        assert result.stop_reason in (StopReasons.XI_STAGNATION, StopReasons.C1C2)
        assert result.iterations == 1

    def test_both_steps_fail_later(self, monkeypatch):
        """第2反復で両ステップが失敗すると steps-failed で第1反復の θ を返す"""
        # step_xi は initialize と第1反復で1回ずつ呼ばれる
        monkeypatch.setattr(calibrator, "step_p", failing_after(step_p, 1))
        monkeypatch.setattr(calibrator, "step_xi", failing_after(step_xi, 2))
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        cfg = FitConfig(m=2000, k_max=10, epsilon=1e-30, stationary_tol=None)

        result = fit(data, cfg)

        assert result.stop_reason == StopReasons.STEPS_FAILED
        assert result.iterations == 2
        assert len(result.trace) == 1
        assert result.theta == result.trace[0].theta

    def test_both_steps_fail_first(self, monkeypatch):
        """第1反復で両ステップが失敗すると AllStepsFailedError"""
        monkeypatch.setattr(calibrator, "step_p", failing_after(step_p, 0))
        monkeypatch.setattr(calibrator, "step_xi", failing_after(step_xi, 1))
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        with pytest.raises(AllStepsFailedError):
            fit(data, FitConfig(m=2000, k_max=10))

    def test_one_failed_step_keeps_going(self, monkeypatch):
        """片方のステップだけの失敗では止まらない"""
        monkeypatch.setattr(calibrator, "step_p", failing_after(step_p, 0))
        data = quantile_grid(ModelParams(2.0, 1.0, 5.0, 0.5), 2000)
        result = fit(data, FitConfig(m=2000, k_max=3, epsilon=1e-30, stationary_tol=None))
        assert result.stop_reason == StopReasons.C3
        assert result.iterations == 3

    def test_too_few_points(self):
        """50点未満はエラー"""
        with pytest.raises(EmptyDataError):
            fit(np.arange(1.0, 21.0))

    def test_constant_series(self):
        """範囲0はエラー"""
        with pytest.raises(DegenerateRangeError):
            fit(np.full(100, 3.0))


@pytest.mark.slow
class TestFitAcceptance:
    """シミュレーション規模の受け入れテスト"""

    def test_baseline_regime(self):
        """θ=[2,1,5,0.5], n=10^4 の標本"""
        data = HybridModel.from_params(ModelParams(2.0, 1.0, 5.0, 0.5)).sample(10_000, seed=5)
        result = fit(data)
        assert result.theta.xi == pytest.approx(0.5, abs=0.1)
        assert result.theta.mu == pytest.approx(2.0, abs=0.15)
        assert result.theta.u2 == pytest.approx(5.0, abs=1.0)

    def test_heavy_tail_regime(self):
        """θ=[0,5,11,1.2], n=10^4 の標本"""
        data = HybridModel.from_params(ModelParams(0.0, 5.0, 11.0, 1.2)).sample(10_000, seed=9)
        assert fit(data).theta.xi == pytest.approx(1.2, abs=0.1)

    def test_collapsed_bridge(self):
        """u1 = u2 の法則（2成分G-GPD）からの標本では推定したブリッジもほぼ消える"""
        # beta = 1.5, lambda = 1, u1 = 2 + 1 = 3 = u2
        theta = ModelParams(2.0, 1.0, 3.0, 0.5)
        assert HybridModel.from_params(theta).derived.u1 == theta.u2
        data = HybridModel.from_params(theta).sample(10_000, seed=17)

        result = fit(data)

        data_range = float(data.max() - data.min())
        assert abs(result.derived.u1 - result.theta.u2) < 0.01 * data_range
        assert result.theta.xi == pytest.approx(0.5, abs=0.1)

    def test_refit_own_quantiles(self):
        """推定モデルの分位点標本を再推定するとほぼ同じ θ"""
        data = HybridModel.from_params(ModelParams(2.0, 1.0, 5.0, 0.5)).sample(5000, seed=2)
        first = fit(data)
        second = fit(quantile_grid(first.theta, 5000))
        assert second.theta.as_array() == pytest.approx(first.theta.as_array(), rel=1e-2)
