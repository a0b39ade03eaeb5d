#!/usr/bin/env python3

"""
プロット用データの出力

描画は外部ツールに任せ、ここでは列順を固定したCSVだけを書き出します。

    cdf / tail : x,empirical,model
    mep        : threshold,mean_excess,n_exceedances
    hill / qq  : k,xi
    trace      : init_index,u0,iteration,u
"""

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..algorithms.calibrator import EmpiricalCdf, SyntheticGrid
from ..algorithms.evt_baselines import MeanExcessCurve
from ..algorithms.ggpd import FixedPointTrace
from ..algorithms.hybrid_model import HybridModel, ModelParams
from ..core.constants import OUTPUT_ENCODING
from ..core.logging_config import get_logger

logger = get_logger(__name__)

CDF_HEADER = ("x", "empirical", "model")
MEP_HEADER = ("threshold", "mean_excess", "n_exceedances")
XI_HEADER = ("k", "xi")
TRACE_HEADER = ("init_index", "u0", "iteration", "u")

Row = Tuple[object, ...]


def cdf_rows(theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid) -> List[Row]:
    """合成格子上の (x, H_n(x), H(x; θ))"""
    points = grid.points
    empirical = np.asarray(ecdf(points), dtype=float)
    model = np.asarray(HybridModel.from_params(theta).cdf(points), dtype=float)
    return [(float(x), float(e), float(m)) for x, e, m in zip(points, empirical, model)]


def tail_rows(theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid) -> List[Row]:
    """u2 以上の格子点だけの (x, H_n(x), H(x; θ))"""
    rows = cdf_rows(theta, ecdf, grid)
    return [row for row, x in zip(rows, grid.points) if x >= theta.u2]


def mean_excess_rows(curve: MeanExcessCurve) -> List[Row]:
    return [
        (float(t), float(e), int(n))
        for t, e, n in zip(curve.thresholds, curve.mean_excess, curve.n_exceedances)
    ]


def xi_rows(series: Iterable[Tuple[int, float]]) -> List[Row]:
    """Hill・QQプロットの (k, xi)"""
    return [(int(k), float(xi)) for k, xi in series]


def trace_rows(traces: Sequence[FixedPointTrace]) -> List[Row]:
    """不動点反復の (初期値番号, u0, 反復番号, u)"""
    rows: List[Row] = []
    for index, trace in enumerate(traces):
        for iteration, value in enumerate(trace.values):
            rows.append((index, float(trace.u0), iteration, float(value)))
    return rows


def _cell(value: object) -> str:
    # float の repr は往復可能な最短表現
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_plot_csv(path: Path, header: Sequence[str], rows: Iterable[Row]) -> Path:
    """
    ヘッダー付きCSVを書き出す

    Args:
        path: 出力先（親ディレクトリは作成する）
        header: 列名
        rows: データ行

    Returns:
        書き出したパス
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding=OUTPUT_ENCODING, newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    logger.info(f"プロットデータを書き出しました: {path} ({count}行)")
    return path


class PlotDataWriter:
    """出力ディレクトリに種類ごとのCSVを書き出す"""

    def __init__(self, plot_dir: str, prefix: str = ""):
        self.plot_dir = Path(plot_dir)
        self.prefix = prefix
        self.written: List[str] = []

    def _path(self, kind: str) -> Path:
        name = f"{self.prefix}_{kind}.csv" if self.prefix else f"{kind}.csv"
        return self.plot_dir / name

    def _write(self, kind: str, header: Sequence[str], rows: Iterable[Row]) -> Path:
        path = write_plot_csv(self._path(kind), header, rows)
        self.written.append(str(path))
        return path

    def write_cdf(self, theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid) -> Path:
        return self._write("cdf", CDF_HEADER, cdf_rows(theta, ecdf, grid))

    def write_tail(self, theta: ModelParams, ecdf: EmpiricalCdf, grid: SyntheticGrid) -> Path:
        return self._write("tail", CDF_HEADER, tail_rows(theta, ecdf, grid))

    def write_mean_excess(self, curve: MeanExcessCurve) -> Path:
        return self._write("mep", MEP_HEADER, mean_excess_rows(curve))

    def write_xi_plot(self, kind: str, series: Iterable[Tuple[int, float]]) -> Path:
        return self._write(kind, XI_HEADER, xi_rows(series))

    def write_traces(self, traces: Sequence[FixedPointTrace]) -> Path:
        return self._write("trace", TRACE_HEADER, trace_rows(traces))
