#!/usr/bin/env python3

"""
定数定義モジュール

プロジェクト全体で使用する定数・既定値を一元管理します。
"""

# アプリケーション情報
APP_NAME = "hybrid-tail-system"
APP_TITLE = "G-E-GPDハイブリッド分布 自己キャリブレーションシステム"
APP_VERSION = "0.3.0"

# ファイル関連
FILE_ENCODING = "utf-8-sig"
OUTPUT_ENCODING = "utf-8"
STDIN_PATH = "-"

# 欠損値として読み飛ばすトークン（小文字で比較）
MISSING_TOKENS = frozenset({"", "nan", "na", "n/a", "null", "none"})

# 色定義（CLI用）
COLOR_RED = "\033[91m"
COLOR_GREEN = "\033[92m"
COLOR_YELLOW = "\033[93m"
COLOR_BLUE = "\033[94m"
COLOR_MAGENTA = "\033[95m"
COLOR_CYAN = "\033[96m"
COLOR_DEFAULT = "\033[0m"
COLOR_BOLD = "\033[1m"

# 浮動小数点の往復可能な桁数
ROUND_TRIP_DIGITS = 17


class ExitCodes:
    """CLIの終了コード"""

    SUCCESS = 0
    USAGE = 2
    DATA = 3
    NUMERICAL = 4


class ParameterNames:
    """自由パラメータ名（θ = [mu, sigma, u2, xi] の順）"""

    MU = "mu"
    SIGMA = "sigma"
    U2 = "u2"
    XI = "xi"
    ALL = (MU, SIGMA, U2, XI)


class StopReasons:
    """外側反復の停止理由"""

    C1C2 = "C1C2"
    C3 = "C3"
    XI_STAGNATION = "xi-stagnation"
    STATIONARY = "stationary"
    # k > 1 で両ステップが失敗した
    STEPS_FAILED = "steps-failed"


class SolverStatus:
    """LMソルバーの終了状態"""

    CONVERGED_GRADIENT = "converged-gradient"
    CONVERGED_STEP = "converged-step"
    MAX_ITERATIONS = "max-iterations"


class TailModes:
    """読み込み時の裾の向き"""

    RIGHT = "right"
    LEFT = "left"
    BOTH = "both"
    ALL = (RIGHT, LEFT, BOTH)


class EstimatorNames:
    """古典的EVT推定手法のタグ"""

    MEP = "mep"
    HILL = "hill"
    QQ = "qq"
    ML = "ml"
    ALL = (MEP, HILL, QQ, ML)

    # 表示名
    LABELS = {
        MEP: "MEP-PWM",
        HILL: "Hill",
        QQ: "QQ",
        ML: "ML",
    }


class OutputFormats:
    """表の出力形式"""

    ASCII = "ascii"
    MARKDOWN = "markdown"
    CSV = "csv"
    LATEX = "latex"
    ALL = (ASCII, MARKDOWN, CSV, LATEX)


class FitDefaults:
    """自己キャリブレーションの既定値"""

    # 経験分布の標本誤差によるMSE（n=10^3 で 1e-5 程度）より小さく取る
    EPSILON = 1e-7
    ALPHA = 0.8
    RHO = 0.9
    K_MAX = 1000
    MIN_GRID_SIZE = 10_000
    MIN_SAMPLE_SIZE = 50
    MODE_RULE = "fd"
    SIGMA_QUANTILE = 0.16
    STATIONARY_TOL = 1e-10
    # u2 下限に加える余裕（データ範囲に対する比）
    U2_LOWER_MARGIN = 1e-9


class SolverDefaults:
    """Levenberg-Marquardtの既定値"""

    MAX_ITERATIONS = 200
    GRADIENT_TOL = 1e-10
    STEP_TOL = 1e-12
    INITIAL_DAMPING = 1e-3
    DAMPING_INCREASE = 10.0
    DAMPING_DECREASE = 0.1
    JACOBIAN_STEP = 1e-7
    MAX_DAMPING = 1e16


class GgpdDefaults:
    """2成分G-GPDモデルの既定値"""

    EPSILON = 1e-8
    K_MAX = 200
    INITIAL_ORDER = 0.35
    LAB_ORDERS = (0.35, 0.375, 0.4, 0.425, 0.45, 0.475)


class BaselineDefaults:
    """古典的EVT推定量の既定値"""

    CANDIDATE_ORDERS = tuple(round(0.90 + 0.01 * i, 2) for i in range(10))
    MIN_EXCEEDANCES = 30
    PWM_PLOTTING_SHIFT = 0.35
    ML_XI_LOWER = -0.99
    ML_XI_UPPER = 5.0


class MonteCarloDefaults:
    """モンテカルロ検証の既定値"""

    REPLICATES = 20
    FULL_REPLICATES = 100
    TRAIN_SIZE = 1000
    TEST_SIZE = 1000
    DELTA = 0.05
    MAX_FAILURE_RATE = 0.2
    SEED = 20240101


# シミュレーション設定のプリセット: 名前 -> (theta, rho)
REGIMES = {
    "baseline": ((2.0, 1.0, 5.0, 0.5), 0.9),
    "high-threshold": ((1.0, 1.0, 12.0, 0.5), 0.9),
    "light-low": ((1.0, 1.0, 2.7, 0.3), 0.9),
    "light-mid": ((1.0, 1.0, 3.0, 0.3), 0.9),
    "light-high": ((1.0, 1.0, 12.0, 0.3), 0.9),
    "wide-low": ((2.0, 2.0, 5.0, 0.5), 0.9),
    "wide-mid": ((2.0, 2.0, 8.0, 0.5), 0.9),
    "wide-high": ((2.0, 2.0, 12.0, 0.5), 0.9),
    "narrow-low": ((0.0, 0.5, 1.0, 0.4), 0.9),
    "narrow-high": ((0.0, 0.5, 10.0, 0.4), 0.9),
    "heavy": ((2.0, 2.0, 20.0, 1.0), 0.8),
    "very-heavy": ((0.0, 5.0, 11.0, 1.2), 0.8),
}


# ============================================================================
# ドメイン用語の用語集
# ============================================================================
"""
G-E-GPD: ガウス分布（本体）・指数分布（ブリッジ）・一般化パレート分布（裾）を
    接合点 u1, u2 でC1級に接続したハイブリッド分布。
theta: 自由パラメータ [mu, sigma, u2, xi]。残り6つ (beta, lambda, u1, gamma1..3)
    は連続性と正規化の制約から決まる。
H_n: 経験分布関数。
q_p: 順序統計量 ceil(p*n) による経験分位点。
"""


# ログメッセージ
LOG_ALGORITHM_EXECUTION_START = "タスク実行開始: {}"
LOG_ALGORITHM_EXECUTION_SUCCESS = "タスク実行成功: {} ({:.2f}秒)"
LOG_ALGORITHM_EXECUTION_FAILURE = "タスク実行失敗: {} - {}"
LOG_LOADING_DATA = "データを読み込み中: {}"
LOG_FIT_START = "キャリブレーション開始: n={}, m={}"
LOG_FIT_DONE = "キャリブレーション終了: 理由={}, 反復={}, 全体MSE={:.3e}, 裾MSE={:.3e}"
