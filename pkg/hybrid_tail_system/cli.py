#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布 自己キャリブレーションシステム - CLI

サブコマンド:
    fit           系列を読み込んで自己キャリブレーション
    simulate      ハイブリッド分布から乱数を生成
    mc            モンテカルロ検証
    baselines     古典的EVT推定手法
    converge-lab  G-GPDの不動点反復の観察
    list          登録済みの推定手法とプリセット
"""

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .algorithms import tail_estimators  # noqa: F401
from .algorithms.calibrator import FitConfig, FitResult, empirical_cdf, fit, synthetic_grid
from .algorithms.evt_baselines import default_k, hill_plot, mean_excess_curve, qq_plot
from .algorithms.ggpd import (
    GgpdConfig,
    fixed_point_limit,
    fixed_point_trace,
    ggpd_derive,
    ggpd_fit,
    ggpd_sample,
    initial_thresholds,
)
from .algorithms.hybrid_model import HybridModel, ModelParams
from .algorithms.mixture import MixtureModel
from .algorithms.montecarlo import McConfig, compare_gpd_estimators, regime_config, run_mc
from .core import (
    EstimatorRegistry,
    ParallelExecutor,
    SequentialExecutor,
    constants,
    get_logger,
    setup_logging,
)
from .core.constants import (
    REGIMES,
    BaselineDefaults,
    EstimatorNames,
    ExitCodes,
    FitDefaults,
    GgpdDefaults,
    MonteCarloDefaults,
    OutputFormats,
    TailModes,
)
from .core.exceptions import EstimationError, HybridTailSystemError
from .core.logging_config import verbosity_level
from .core.types import RunManifestData
from .utils.csv_loader import LoadedSeries, load_series
from .utils.plot_data import PlotDataWriter
from .utils.report_formatter import ReportFormatter, export_to_file
from .utils.result_formatter import ResultFormatter, dump_json
from .utils.validation import parse_float_list, validate_orders

logger = get_logger(__name__)


# ============================================================================
# 実行記録
# ============================================================================


@dataclass(frozen=True)
class RunManifest:
    """
    出力ファイルに埋め込む実行記録

    Attributes:
        command: サブコマンド名
        input_path: 入力パス（なければNone）
        config: 使用した設定
        tool_version: バージョン
        timestamp: 実行時刻（--no-timestamp ならNone）
    """

    command: str
    input_path: Optional[str] = None
    config: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = constants.APP_VERSION
    timestamp: Optional[str] = None

    @classmethod
    def create(
        cls,
        command: str,
        input_path: Optional[str],
        config: Dict[str, Any],
        with_timestamp: bool = True,
    ) -> "RunManifest":
        timestamp = (
            datetime.now(timezone.utc).isoformat(timespec="seconds") if with_timestamp else None
        )
        return cls(command, input_path, config, constants.APP_VERSION, timestamp)

    def to_dict(self) -> RunManifestData:
        result: RunManifestData = {
            "command": self.command,
            "input_path": self.input_path,
            "config": self.config,
            "tool_version": self.tool_version,
        }
        if self.timestamp is not None:
            result["timestamp"] = self.timestamp
        return result


# ============================================================================
# 出力ヘルパー
# ============================================================================


def print_colored(text: str, color: str = "default") -> None:
    """色付きテキストを出力（端末でない場合は色なし）"""
    if sys.platform == "win32" or not sys.stdout.isatty():
        print(text)
        return

    colors = {
        "red": constants.COLOR_RED,
        "green": constants.COLOR_GREEN,
        "yellow": constants.COLOR_YELLOW,
        "blue": constants.COLOR_BLUE,
        "magenta": constants.COLOR_MAGENTA,
        "cyan": constants.COLOR_CYAN,
        "default": constants.COLOR_DEFAULT,
        "bold": constants.COLOR_BOLD,
    }
    print(f"{colors.get(color, '')}{text}{colors['default']}")


def write_text(content: str, output: Optional[str]) -> None:
    """ファイルまたは標準出力に書き出す"""
    if output:
        export_to_file(content, output)
    else:
        sys.stdout.write(content)


def emit_error(error: BaseException, exit_code: int, category: str) -> int:
    """1行のJSONエラー記録を標準エラー出力に書いて終了コードを返す"""
    record = {"error": category, "type": type(error).__name__, "message": str(error)}
    print(json.dumps(record, ensure_ascii=False), file=sys.stderr)
    return exit_code


def _manifest(args: argparse.Namespace, config: Dict[str, Any]) -> RunManifestData:
    input_path = getattr(args, "input", None)
    return RunManifest.create(
        args.command, input_path, config, with_timestamp=not args.no_timestamp
    ).to_dict()


def _plot_writer(args: argparse.Namespace, prefix: str = "") -> Optional[PlotDataWriter]:
    if not args.plot_dir:
        return None
    return PlotDataWriter(args.plot_dir, prefix=prefix)


def _parse_theta(text: str) -> ModelParams:
    return ModelParams.from_sequence(parse_float_list(text, 4, "theta"))


def _fit_config(args: argparse.Namespace) -> FitConfig:
    return FitConfig(
        epsilon=args.eps,
        alpha=args.alpha,
        rho=args.rho if args.rho is not None else FitDefaults.RHO,
        k_max=args.kmax,
        m=args.m,
        xi_stagnation_epsilon=args.xi_stagnation,
        stationary_tol=None if args.no_stationary else FitDefaults.STATIONARY_TOL,
        mode_rule=args.mode_rule,
        seed=args.seed,
    )


def _load(args: argparse.Namespace) -> LoadedSeries:
    loaded = load_series(
        args.input,
        column=args.column,
        tail=args.tail,
        split=args.split,
        absolute=args.absolute,
        split_at_mode=args.split_at_mode,
    )
    if loaded.skipped_rows:
        logger.warning(f"欠損として読み飛ばした行: {loaded.skipped_rows}")
    return loaded


# ============================================================================
# fit
# ============================================================================


def _fit_hybrid(
    half: str, values: np.ndarray, cfg: FitConfig, args: argparse.Namespace
) -> FitResult:
    result = fit(values, cfg)
    writer = _plot_writer(args, prefix=half)
    if writer:
        ecdf = empirical_cdf(values)
        grid = synthetic_grid(values, cfg.grid_size(values.size))
        writer.write_cdf(result.theta, ecdf, grid)
        writer.write_tail(result.theta, ecdf, grid)
    if not args.quiet:
        summary = ResultFormatter.format_fit_summary(result.to_dict(), f"{half}側")
        print(summary, file=sys.stderr)
    return result


def _fit_ggpd(half: str, values: np.ndarray, args: argparse.Namespace) -> Dict[str, Any]:
    cfg = GgpdConfig(epsilon=args.ggpd_eps, k_max=args.ggpd_kmax)
    params, trace = ggpd_fit(values, cfg)
    writer = _plot_writer(args, prefix=half)
    if writer:
        writer.write_traces([trace])
    return {"params": params.to_dict(), "trace": trace.to_dict(), "config": cfg.to_dict()}


def cmd_fit(args: argparse.Namespace) -> int:
    """系列を読み込んで推定し、構造化結果を出力"""
    loaded = _load(args)
    cfg = _fit_config(args)

    fits: Dict[str, Any] = {}
    thetas: Dict[str, ModelParams] = {}
    for half, values in loaded.halves.items():
        if args.model == "ggpd":
            fits[half] = _fit_ggpd(half, values, args)
        else:
            result = _fit_hybrid(half, values, cfg, args)
            fits[half] = result.to_dict(include_trace=args.trace)
            thetas[half] = result.theta

    config = cfg.to_dict() if args.model == "hybrid" else {"model": args.model}
    payload: Dict[str, Any] = {
        "manifest": _manifest(args, config),
        "input": loaded.to_dict(),
        "fits": fits,
    }
    if len(thetas) == 2:
        split = loaded.split if loaded.split is not None else 0.0
        payload["mixture"] = MixtureModel.from_params(
            thetas["left"], thetas["right"], split
        ).to_dict()

    write_text(dump_json(payload), args.output)
    return ExitCodes.SUCCESS


# ============================================================================
# simulate
# ============================================================================


def cmd_simulate(args: argparse.Namespace) -> int:
    """1行に1つの値（往復可能な表現）を出力"""
    theta = _parse_theta(args.theta) if args.theta else ModelParams(*REGIMES[args.regime][0])
    values = HybridModel.from_params(theta).sample(args.n, seed=args.seed)
    write_text("".join(f"{v!r}\n" for v in values.tolist()), args.output)
    logger.info(f"{args.n}点を生成しました: θ={theta.as_array().tolist()}, seed={args.seed}")
    return ExitCodes.SUCCESS


# ============================================================================
# mc
# ============================================================================


def _mc_config(args: argparse.Namespace) -> McConfig:
    replicates = MonteCarloDefaults.FULL_REPLICATES if args.full_scale else args.replicates
    common: Dict[str, Any] = {
        "n": args.n,
        "l": args.l,
        "replicates": replicates,
        "delta": args.delta,
        "seed": args.seed,
        "workers": args.workers,
        "use_processes": args.use_processes,
    }
    if args.theta:
        return McConfig(theta_true=_parse_theta(args.theta), fit_config=_fit_config(args), **common)

    cfg = regime_config(args.regime, fit_config=_fit_config(args), **common)
    if args.rho is not None:
        # 明示した rho はプリセットより優先
        cfg = replace(cfg, fit_config=replace(cfg.fit_config, rho=args.rho))
    return cfg


def cmd_mc(args: argparse.Namespace) -> int:
    """モンテカルロ検証を実行し、表と構造化結果を出力"""
    cfg = _mc_config(args)

    def progress(message: str) -> None:
        logger.info(message)

    report = run_mc(cfg, progress)
    payload: Dict[str, Any] = {
        "manifest": _manifest(args, cfg.to_dict()),
        "report": report.to_dict(include_timing=not args.no_timestamp),
    }
    tables = [ReportFormatter.format_mc_report(payload["report"], args.format)]

    if args.compare_gpd:
        comparison = compare_gpd_estimators(cfg, progress).to_dict()
        payload["gpd_comparison"] = comparison
        tables.append(ReportFormatter.format_gpd_comparison(comparison, args.format))

    print("\n\n".join(table.rstrip("\n") for table in tables))
    if args.output:
        write_text(dump_json(payload), args.output)
    return ExitCodes.SUCCESS


# ============================================================================
# baselines
# ============================================================================


def _baseline_options(args: argparse.Namespace, n: int) -> Dict[str, Any]:
    options: Dict[str, Any] = {"min_exceedances": args.min_exceedances}
    if args.orders:
        options["candidate_orders"] = validate_orders(parse_float_list(args.orders, 0, "orders"))
    if not args.scan:
        options["k"] = args.k if args.k is not None else default_k(n)
    return options


def _baseline_manifest(args: argparse.Namespace, names: Sequence[str]) -> Dict[str, Any]:
    return {
        "methods": list(names),
        "k": args.k,
        "scan": args.scan,
        "orders": args.orders,
        "min_exceedances": args.min_exceedances,
    }


def _write_baseline_plots(writer: PlotDataWriter, values: np.ndarray) -> None:
    writer.write_mean_excess(mean_excess_curve(values))
    # 上位 k 個がすべて正である範囲だけ描く
    k_upper = min(values.size // 4, int(np.sum(values > 0)) - 1)
    if k_upper < 2:
        logger.warning("正の値が少ないため Hill・QQ プロットを省略します")
        return
    ks = list(range(2, k_upper + 1))
    writer.write_xi_plot(EstimatorNames.HILL, hill_plot(values, ks))
    writer.write_xi_plot(EstimatorNames.QQ, qq_plot(values, ks))


def _run_baselines(
    names: Sequence[str], values: np.ndarray, args: argparse.Namespace
) -> Dict[str, Any]:
    options = _baseline_options(args, values.size)

    if len(names) == 1:
        # 単一手法の失敗はそのまま終了コードに反映する
        estimator = EstimatorRegistry.require_estimator(names[0])
        return {"results": {names[0]: estimator.execute(values, **options)}, "failures": {}}

    executor: Any
    if args.workers == 1:
        executor = SequentialExecutor()
    else:
        executor = ParallelExecutor(max_workers=args.workers)
    results = executor.execute_estimators(names, values, **options)
    processed = ResultFormatter.process_results(results)
    for entry in processed["formatted_results"]:
        print(ResultFormatter.format_result_for_cli(entry), file=sys.stderr)
    print(
        ResultFormatter.format_success_summary(
            processed["success_count"], processed["total_count"]
        ),
        file=sys.stderr,
    )
    return {"results": processed["all_results"], "failures": processed["failures"]}


def cmd_baselines(args: argparse.Namespace) -> int:
    """古典的EVT推定手法を実行"""
    loaded = _load(args)
    names = EstimatorRegistry.list_estimators() if args.method == "all" else [args.method]

    outcomes: Dict[str, Any] = {}
    tables: List[str] = []
    for half, values in loaded.halves.items():
        outcome = _run_baselines(names, values, args)
        outcomes[half] = outcome
        if outcome["results"]:
            fits = [outcome["results"][name] for name in names if name in outcome["results"]]
            tables.append(ReportFormatter.format_tail_fits(fits, args.format))
        writer = _plot_writer(args, prefix=half)
        if writer:
            _write_baseline_plots(writer, values)

    payload = {
        "manifest": _manifest(args, _baseline_manifest(args, names)),
        "input": loaded.to_dict(),
        "baselines": outcomes,
    }
    if tables:
        print("\n\n".join(table.rstrip("\n") for table in tables))
    if args.output:
        write_text(dump_json(payload), args.output)

    if not any(outcome["results"] for outcome in outcomes.values()):
        first = next(iter(outcomes.values()))["failures"]
        msg = "すべての推定手法が失敗しました: " + "; ".join(
            f"{name}: {failure['message']}" for name, failure in first.items()
        )
        raise EstimationError(msg)
    return ExitCodes.SUCCESS


# ============================================================================
# converge-lab
# ============================================================================


def cmd_converge_lab(args: argparse.Namespace) -> int:
    """複数の初期閾値から G-GPD の不動点反復を記録"""
    if args.input:
        values = _load(args).values
        source: Dict[str, Any] = {"input": args.input}
    else:
        mu, sigma, u = parse_float_list(args.simulate, 3, "simulate")
        params = ggpd_derive(mu, sigma, u)
        values = ggpd_sample(args.n, params, seed=args.seed)
        source = {"simulated": params.to_dict(), "n": args.n, "seed": args.seed}

    orders = _lab_orders(args.orders)
    cfg = GgpdConfig(epsilon=args.ggpd_eps, k_max=args.ggpd_kmax)
    traces = fixed_point_trace(values, initial_thresholds(values, orders), cfg)
    limit, spread = fixed_point_limit(traces)
    data_range = float(np.max(values) - np.min(values))

    writer = _plot_writer(args)
    if writer:
        writer.write_traces(traces)

    payload = {
        "manifest": _manifest(args, {"orders": list(orders), **cfg.to_dict()}),
        "source": source,
        "traces": [trace.to_dict() for trace in traces],
        "limit": limit,
        "spread": spread,
        "relative_spread": spread / data_range,
        "all_converged": all(trace.converged for trace in traces),
        "all_monotone": all(trace.monotone for trace in traces),
    }
    write_text(dump_json(payload), args.output)
    return ExitCodes.SUCCESS


def _lab_orders(text: Optional[str]) -> Sequence[float]:
    orders = parse_float_list(text, 0, "orders") if text else []
    return sorted(orders) if orders else list(GgpdDefaults.LAB_ORDERS)


# ============================================================================
# list
# ============================================================================


def cmd_list(args: argparse.Namespace) -> int:
    """登録されている推定手法とプリセットの一覧を表示"""
    print()
    print_colored("━" * 70, "cyan")
    print_colored("利用可能な推定手法", "bold")
    print_colored("━" * 70, "cyan")
    for name in EstimatorRegistry.list_estimators():
        info = EstimatorRegistry.get_estimator_info(name)
        if info:
            print_colored(f"● {name}", "bold")
            print(f"  {info['description']}")
            for opt_name, opt_def in info["supported_options"].items():
                print(f"    {opt_name.replace('_', '-')}: {opt_def['help']}")
    print()
    print_colored("シミュレーション設定のプリセット", "bold")
    for name, (theta, rho) in REGIMES.items():
        print(f"  {name:<15} θ={list(theta)} rho={rho}")
    print_colored("━" * 70, "cyan")
    return ExitCodes.SUCCESS


# ============================================================================
# 引数パーサー
# ============================================================================


def _common_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    verbosity = parent.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="DEBUGログを表示")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="WARNING以上のみ表示")
    parent.add_argument("-o", "--output", help="結果の出力先（省略時は標準出力）")
    parent.add_argument("--plot-dir", help="プロット用CSVの出力ディレクトリ")
    parent.add_argument(
        "--no-timestamp", action="store_true", help="実行時刻と所要時間を出力しない"
    )
    parent.add_argument("--log-file", help="ログファイルのパス")
    return parent


def _add_input_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    nargs = None if required else "?"
    parser.add_argument("input", nargs=nargs, help="入力CSV（- で標準入力）")
    parser.add_argument("--column", help="列名または0始まりの列番号")
    parser.add_argument("--tail", choices=TailModes.ALL, default=TailModes.RIGHT, help="裾の向き")
    parser.add_argument("--split", type=float, help="left/both の分割点（both の既定は0）")
    parser.add_argument("--split-at-mode", action="store_true", help="最頻値で分割")
    parser.add_argument("--absolute", action="store_true", help="先に絶対値をとる")


def _add_fit_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rho", type=float, default=None, help="u2 初期値の分位次数 (0.9)")
    parser.add_argument("--alpha", type=float, default=FitDefaults.ALPHA, help="裾MSEの次数")
    parser.add_argument("--eps", type=float, default=FitDefaults.EPSILON, help="停止許容値")
    parser.add_argument("--kmax", type=int, default=FitDefaults.K_MAX, help="外側反復の上限")
    parser.add_argument("--m", type=int, default=None, help="合成格子の点数 (max(n, 10000))")
    parser.add_argument("--seed", type=int, default=MonteCarloDefaults.SEED, help="乱数シード")
    parser.add_argument("--mode-rule", default=FitDefaults.MODE_RULE, help="最頻値のビン幅規則")
    parser.add_argument(
        "--xi-stagnation", type=float, default=None, help="|Δxi| がこの値未満で停止"
    )
    parser.add_argument(
        "--no-stationary", action="store_true", help="θ不変による早期停止を行わない"
    )


def _add_ggpd_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ggpd-eps", type=float, default=GgpdDefaults.EPSILON)
    parser.add_argument("--ggpd-kmax", type=int, default=GgpdDefaults.K_MAX)


def _add_fit_command(subparsers: Any, common: argparse.ArgumentParser) -> None:
    fit_parser = subparsers.add_parser("fit", parents=[common], help="自己キャリブレーション")
    _add_input_arguments(fit_parser)
    _add_fit_arguments(fit_parser)
    _add_ggpd_arguments(fit_parser)
    fit_parser.add_argument(
        "--model", choices=["hybrid", "ggpd"], default="hybrid", help="推定するモデル"
    )
    fit_parser.add_argument("--trace", action="store_true", help="反復履歴を出力に含める")
    fit_parser.set_defaults(handler=cmd_fit)


def _add_simulate_command(subparsers: Any, common: argparse.ArgumentParser) -> None:
    sim_parser = subparsers.add_parser("simulate", parents=[common], help="乱数生成")
    sim_parser.add_argument("--theta", help="mu,sigma,u2,xi")
    sim_parser.add_argument("--regime", choices=list(REGIMES), default="baseline")
    sim_parser.add_argument("--n", type=int, default=MonteCarloDefaults.TRAIN_SIZE)
    sim_parser.add_argument("--seed", type=int, default=MonteCarloDefaults.SEED)
    sim_parser.set_defaults(handler=cmd_simulate)


def _add_mc_command(subparsers: Any, common: argparse.ArgumentParser) -> None:
    mc_parser = subparsers.add_parser("mc", parents=[common], help="モンテカルロ検証")
    mc_parser.add_argument("--theta", help="mu,sigma,u2,xi（--regime より優先）")
    mc_parser.add_argument("--regime", choices=list(REGIMES), default="baseline")
    mc_parser.add_argument("--n", type=int, default=MonteCarloDefaults.TRAIN_SIZE)
    mc_parser.add_argument("--l", type=int, default=MonteCarloDefaults.TEST_SIZE)
    mc_parser.add_argument("--replicates", type=int, default=MonteCarloDefaults.REPLICATES)
    mc_parser.add_argument(
        "--full-scale", action="store_true", help="反復回数を100にする（--replicates を上書き）"
    )
    mc_parser.add_argument("--delta", type=float, default=MonteCarloDefaults.DELTA)
    mc_parser.add_argument("--workers", type=int, default=1, help="並列ワーカー数")
    mc_parser.add_argument("--use-processes", action="store_true", help="プロセス並列")
    mc_parser.add_argument("--compare-gpd", action="store_true", help="ML・PWMとの比較も行う")
    mc_parser.add_argument("--format", choices=OutputFormats.ALL, default=OutputFormats.ASCII)
    _add_fit_arguments(mc_parser)
    mc_parser.set_defaults(handler=cmd_mc)


def _add_baselines_command(subparsers: Any, common: argparse.ArgumentParser) -> None:
    base_parser = subparsers.add_parser("baselines", parents=[common], help="古典的EVT推定")
    _add_input_arguments(base_parser)
    base_parser.add_argument(
        "--method", choices=[*EstimatorNames.ALL, "all"], default="all", help="推定手法"
    )
    base_parser.add_argument("--k", type=int, default=None, help="Hill・QQの k (floor(sqrt(n)))")
    base_parser.add_argument(
        "--scan", action="store_true", help="Hill・QQでも候補閾値をスキャンする"
    )
    base_parser.add_argument("--orders", help="候補閾値の分位次数（カンマ区切り）")
    base_parser.add_argument(
        "--min-exceedances", type=int, default=BaselineDefaults.MIN_EXCEEDANCES
    )
    base_parser.add_argument("--workers", type=int, default=1, help="並列ワーカー数")
    base_parser.add_argument("--format", choices=OutputFormats.ALL, default=OutputFormats.ASCII)
    base_parser.set_defaults(handler=cmd_baselines)


def _add_converge_lab_command(subparsers: Any, common: argparse.ArgumentParser) -> None:
    lab_parser = subparsers.add_parser(
        "converge-lab", parents=[common], help="G-GPDの不動点反復"
    )
    _add_input_arguments(lab_parser, required=False)
    lab_parser.add_argument(
        "--simulate", default="0,1,0.4354", help="入力がない場合に生成する mu,sigma,u"
    )
    lab_parser.add_argument("--n", type=int, default=10_000)
    lab_parser.add_argument("--seed", type=int, default=MonteCarloDefaults.SEED)
    lab_parser.add_argument("--orders", help="初期閾値の分位次数（カンマ区切り）")
    _add_ggpd_arguments(lab_parser)
    lab_parser.set_defaults(handler=cmd_converge_lab)


def _create_argument_parser() -> argparse.ArgumentParser:
    """
    コマンドライン引数パーサーを作成

    Returns:
        設定済みのArgumentParser
    """
    parser = argparse.ArgumentParser(
        prog=constants.APP_NAME,
        description=constants.APP_TITLE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
使用例
━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

  # 生成して推定
  hybrid-tail-system simulate --theta 2,1,5,0.5 --n 1000 --seed 7 | hybrid-tail-system fit -

  # 収益率の絶対値で推定し、プロット用データを出力
  hybrid-tail-system fit returns.csv --column ret --absolute --plot-dir plots

  # モンテカルロ検証（LaTeX表）
  hybrid-tail-system mc --regime baseline --replicates 20 --format latex

  # 古典的推定手法を比較
  hybrid-tail-system baselines data.csv --method all
━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {constants.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    _add_fit_command(subparsers, common)
    _add_simulate_command(subparsers, common)
    _add_mc_command(subparsers, common)
    _add_baselines_command(subparsers, common)
    _add_converge_lab_command(subparsers, common)
    list_parser = subparsers.add_parser("list", parents=[common], help="推定手法の一覧")
    list_parser.set_defaults(handler=cmd_list)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = verbosity_level(verbose=args.verbose, quiet=args.quiet)
    setup_logging(level=level, log_file=args.log_file)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    メイン関数

    Returns:
        終了コード（0: 成功, 2: 使い方の誤り, 3: データの誤り, 4: 数値計算の失敗）
    """
    parser = _create_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else ExitCodes.USAGE

    _configure_logging(args)
    handler: Callable[[argparse.Namespace], int] = args.handler

    try:
        return handler(args)
    except HybridTailSystemError as e:
        logger.debug("詳細", exc_info=True)
        return emit_error(e, e.exit_code, e.category)
    except OSError as e:
        return emit_error(e, ExitCodes.DATA, "data")


if __name__ == "__main__":
    sys.exit(main())
