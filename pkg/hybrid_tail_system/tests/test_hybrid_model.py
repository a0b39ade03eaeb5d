#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布のテスト
"""

import math

import numpy as np
import pytest
from scipy import integrate

from hybrid_tail_system.algorithms.hybrid_model import (
    HybridModel,
    ModelParams,
    cdf,
    derive_params,
    gpd_cdf,
    gpd_pdf,
    gpd_quantile,
    normal_cdf,
    pdf,
    quantile,
    sample,
)
from hybrid_tail_system.core.exceptions import (
    DomainError,
    InvalidGeometryError,
    InvalidParameterError,
)

BASELINE = ModelParams(2.0, 1.0, 5.0, 0.5)


class TestModelParams:
    """ModelParamsのテスト"""

    def test_from_sequence(self):
        """[mu, sigma, u2, xi] の順に読む"""
        theta = ModelParams.from_sequence([2, 1, 5, 0.5])
        assert theta == BASELINE
        assert theta.as_array().tolist() == [2.0, 1.0, 5.0, 0.5]

    def test_wrong_length(self):
        """4要素以外はエラー"""
        with pytest.raises(InvalidParameterError):
            ModelParams.from_sequence([1.0, 2.0, 3.0])

    @pytest.mark.parametrize(
        "values",
        [
            (2.0, 0.0, 5.0, 0.5),
            (2.0, 1.0, 5.0, 0.0),
            (2.0, 1.0, 5.0, -0.1),
            (2.0, 1.0, -5.0, 0.5),
            (math.nan, 1.0, 5.0, 0.5),
        ],
    )
    def test_invalid_values(self, values):
        """sigma, xi, u2 は正、すべて有限"""
        with pytest.raises(InvalidParameterError):
            ModelParams(*values)


class TestDeriveParams:
    """従属パラメータの計算のテスト"""

    def test_baseline_regime(self):
        """θ=[2,1,5,0.5] で beta=2.5, lambda=0.6, u1=2.6"""
        derived = derive_params(BASELINE)
        assert derived.beta == pytest.approx(2.5)
        assert derived.lam == pytest.approx(0.6)
        assert derived.u1 == pytest.approx(2.6)

    def test_wide_bridge_regime(self):
        """θ=[1,1,12,0.5] で lambda=0.25, u1=1.25"""
        derived = derive_params(ModelParams(1.0, 1.0, 12.0, 0.5))
        assert derived.lam == pytest.approx(0.25)
        assert derived.u1 == pytest.approx(1.25)

    def test_weights_are_positive(self):
        """重みはすべて正で、p1 < p2"""
        derived = derive_params(BASELINE)
        assert derived.gamma1 > 0
        assert derived.gamma2 > 0
        assert 0 < derived.gamma3 < 1
        assert 0 < derived.p1 < derived.p2 < 1

    def test_bridge_missing(self):
        """u1 > u2 は InvalidGeometryError"""
        with pytest.raises(InvalidGeometryError):
            derive_params(ModelParams(4.0, 1.0, 2.0, 0.5))

    def test_collapsed_bridge_allowed(self):
        """u1 == u2 でも評価できる"""
        # u2 = 2, xi = 1 -> beta = 2, lambda = 1, u1 = mu + sigma^2
        theta = ModelParams(1.0, 1.0, 2.0, 1.0)
        derived = derive_params(theta)
        assert derived.u1 == pytest.approx(theta.u2)
        assert float(cdf(theta.u2, theta)) == pytest.approx(derived.p2)

    def test_to_dict_keys(self):
        """辞書のキー"""
        keys = set(derive_params(BASELINE).to_dict())
        assert keys == {"beta", "lambda", "u1", "gamma1", "gamma2", "gamma3"}


class TestDistribution:
    """密度・分布関数・分位関数のテスト"""

    def test_cdf_at_u2(self):
        """H(5; θ) = 0.8534"""
        assert float(cdf(5.0, BASELINE)) == pytest.approx(0.8534, abs=1e-4)

    def test_quantile_at_u2_order(self):
        """H^{-1}(0.8534) = 5"""
        assert float(quantile(0.8534, BASELINE)) == pytest.approx(5.0, abs=1e-3)

    def test_quantile_at_p2_is_u2(self):
        """p = p2 でちょうど u2"""
        model = HybridModel.from_params(BASELINE)
        assert model.quantile(model.derived.p2) == BASELINE.u2

    def test_pdf_integrates_to_one(self):
        """(-inf, u2] の数値積分 + 裾の質量 gamma3 = 1"""
        model = HybridModel.from_params(BASELINE)
        d = model.derived
        body, _ = integrate.quad(lambda x: model.pdf(x), -np.inf, d.u1, epsabs=1e-12)
        bridge, _ = integrate.quad(lambda x: model.pdf(x), d.u1, BASELINE.u2, epsabs=1e-12)
        assert body + bridge + d.gamma3 == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("point", ["u1", "u2"])
    def test_pdf_derivative_continuous_at_junctions(self, point):
        """接合点で左右の片側微分が一致（C1級）"""
        model = HybridModel.from_params(BASELINE)
        x = model.derived.u1 if point == "u1" else BASELINE.u2
        step = 1e-6
        below, at, above = model.pdf([x - step, x, x + step])
        left = (at - below) / step
        right = (above - at) / step
        # どちらの接合点でも h' = -lambda * h
        assert left == pytest.approx(right, abs=1e-4)
        assert left == pytest.approx(-model.derived.lam * at, abs=1e-4)

    @pytest.mark.parametrize("point", ["u1", "u2"])
    def test_pdf_continuous_at_junctions(self, point):
        """接合点で密度が連続"""
        model = HybridModel.from_params(BASELINE)
        x = model.derived.u1 if point == "u1" else BASELINE.u2
        left, right = model.pdf([x - 1e-9, x + 1e-9])
        assert left == pytest.approx(right, rel=1e-6)

    def test_cdf_monotone_and_bounded(self):
        """分布関数は単調非減少で [0, 1] に収まる"""
        values = cdf(np.linspace(-10.0, 200.0, 5001), BASELINE)
        assert np.all(np.diff(values) >= 0)
        assert values[0] >= 0.0
        assert values[-1] <= 1.0

    def test_quantile_inverts_cdf(self):
        """H(H^{-1}(p)) = p（3区間すべて）"""
        model = HybridModel.from_params(BASELINE)
        probs = np.array([1e-6, 0.1, 0.5, model.derived.p1, 0.7, 0.85, 0.99, 1 - 1e-9])
        assert model.cdf(model.quantile(probs)) == pytest.approx(probs, rel=1e-9, abs=1e-12)

    def test_scalar_in_scalar_out(self):
        """スカラー入力はfloat"""
        assert isinstance(pdf(3.0, BASELINE), float)
        assert np.asarray(pdf([3.0, 4.0], BASELINE)).shape == (2,)

    def test_logpdf_matches_pdf(self):
        """log h と h の整合"""
        model = HybridModel.from_params(BASELINE)
        x = np.array([-1.0, 2.0, 3.0, 6.0, 50.0])
        assert np.exp(model.logpdf(x)) == pytest.approx(model.pdf(x))

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        """p は開区間 (0, 1)"""
        with pytest.raises(DomainError):
            quantile(p, BASELINE)


class TestSample:
    """乱数生成のテスト"""

    def test_zero_size_rejected(self):
        """n = 0 はエラー"""
        with pytest.raises(InvalidParameterError):
            sample(0, BASELINE, seed=1)

    def test_reproducible(self):
        """同じシードで同じ系列"""
        first = sample(1, BASELINE, seed=42)
        second = sample(1, BASELINE, seed=42)
        assert first.shape == (1,)
        assert first[0] == second[0]

    @pytest.fixture(scope="class")
    def draws(self):
        return np.sort(sample(1_000_000, BASELINE, seed=2024))

    def test_kolmogorov_distance(self, draws):
        """10^6 個の乱数の経験分布と H の Kolmogorov 距離 < 0.002"""
        n = draws.size
        model_cdf = np.asarray(cdf(draws, BASELINE))
        ranks = np.arange(1, n + 1) / n
        distance = max(np.max(ranks - model_cdf), np.max(model_cdf - (ranks - 1.0 / n)))
        assert distance < 0.002

    def test_body_mean_matches_truncated_gaussian(self, draws):
        """u1 以下の乱数の平均は (-inf, u1] の数値積分による平均に近い"""
        model = HybridModel.from_params(BASELINE)
        u1 = model.derived.u1
        first_moment, _ = integrate.quad(lambda x: x * model.pdf(x), -np.inf, u1)
        expected = first_moment / float(model.cdf(u1))

        body = draws[draws <= u1]
        tolerance = 4.0 * body.std() / math.sqrt(body.size)
        assert body.mean() == pytest.approx(expected, abs=tolerance)

    def test_tail_fraction(self):
        """u2 を超える割合は gamma3 に近い"""
        model = HybridModel.from_params(BASELINE)
        draws = model.sample(50_000, seed=3)
        assert np.mean(draws > BASELINE.u2) == pytest.approx(model.derived.gamma3, abs=0.01)


class TestAuxiliaryDistributions:
    """正規分布・GPDの補助関数のテスト"""

    def test_normal_cdf(self):
        """Φ(0) = 0.5"""
        assert normal_cdf(0.0) == pytest.approx(0.5)

    def test_gpd_exponential_case(self):
        """xi = 0 は指数分布"""
        assert gpd_cdf(1.0, 0.0, 1.0) == pytest.approx(1 - math.exp(-1))
        assert gpd_pdf(0.0, 0.0, 2.0) == pytest.approx(0.5)

    def test_gpd_small_xi_matches_exponential(self):
        """xi = 1e-12 は xi = 0 の分岐と一致"""
        x = np.array([0.0, 0.3, 2.0, 15.0])
        assert gpd_cdf(x, 1e-12, 1.5) == pytest.approx(gpd_cdf(x, 0.0, 1.5), abs=1e-9)

    def test_gpd_quantile_inverts_cdf(self):
        """G^{-1}(G(x)) = x"""
        x = np.array([0.0, 0.5, 3.0, 40.0])
        q = gpd_cdf(x, 0.3, 1.2)
        assert gpd_quantile(q, 0.3, 1.2) == pytest.approx(x, rel=1e-9, abs=1e-12)

    def test_gpd_support(self):
        """負の値や beta <= 0 はエラー"""
        with pytest.raises(DomainError):
            gpd_cdf(-1.0, 0.5, 1.0)
        with pytest.raises(DomainError):
            gpd_cdf(1.0, 0.5, 0.0)
        with pytest.raises(DomainError):
            gpd_quantile(1.0, 0.5, 1.0)
