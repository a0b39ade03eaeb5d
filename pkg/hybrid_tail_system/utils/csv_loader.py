#!/usr/bin/env python3

"""
CSV読み込みユーティリティ

1列の数値系列をCSV（ヘッダー有無どちらも可）から読み込み、
裾の向きに応じて符号反転・分割します。
"""

import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..algorithms.calibrator import estimate_mode
from ..core import constants
from ..core.constants import FitDefaults
from ..core.exceptions import DataLoadError, EmptySeriesError, InvalidConfigError, ParseError
from ..core.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class RawSeries:
    """
    読み込んだままの系列

    Attributes:
        values: 有効な値
        skipped_rows: 欠損として読み飛ばした行数
        source: 入力元（パスまたは "-"）
        column: 使用した列（名前または番号）
    """

    values: np.ndarray
    skipped_rows: int
    source: str
    column: str


@dataclass(frozen=True)
class LoadedSeries:
    """
    裾の向きに応じて前処理した系列

    Attributes:
        halves: "right" / "left" -> 正の向きに揃えた系列
        skipped_rows: 欠損として読み飛ばした行数
        split: 分割点（分割しない場合None）
        source: 入力元
    """

    halves: Dict[str, np.ndarray]
    skipped_rows: int = 0
    split: Optional[float] = None
    source: str = constants.STDIN_PATH
    column: str = "0"

    @property
    def values(self) -> np.ndarray:
        """片側だけの場合の系列"""
        if len(self.halves) != 1:
            msg = "両側に分割された系列です。halves を参照してください"
            raise InvalidConfigError(msg)
        return next(iter(self.halves.values()))

    def to_dict(self) -> Dict[str, object]:
        return {
            "source": self.source,
            "column": self.column,
            "skipped_rows": self.skipped_rows,
            "split": self.split,
            "sizes": {name: int(v.size) for name, v in self.halves.items()},
        }


class SeriesLoader:
    """数値系列の読み込み"""

    @staticmethod
    def _open_rows(path: str) -> List[List[str]]:
        if path == constants.STDIN_PATH:
            return list(csv.reader(io.StringIO(sys.stdin.read())))

        file_path = Path(path)
        if not file_path.exists():
            msg = f"ファイルが見つかりません: {path}"
            raise DataLoadError(msg)
        try:
            with file_path.open(encoding=constants.FILE_ENCODING, newline="") as f:
                return list(csv.reader(f))
        except UnicodeDecodeError as e:
            msg = (
                f"ファイルのエンコーディングエラー: {path}\n"
                "UTF-8またはUTF-8 with BOMで保存されているか確認してください。"
            )
            raise DataLoadError(msg) from e

    @staticmethod
    def _parse(token: str) -> Optional[float]:
        """数値に変換。欠損トークンなら None、数値でなければ ValueError"""
        text = token.strip()
        if text.lower() in constants.MISSING_TOKENS:
            return None
        value = float(text)
        if not np.isfinite(value):
            return None
        return value

    @staticmethod
    def _resolve_column(header: List[str], column: Optional[str]) -> int:
        if column is None:
            return 0
        names = [name.strip() for name in header]
        if column in names:
            return names.index(column)
        if column.isdigit():
            return int(column)
        msg = f"列 '{column}' が見つかりません (ヘッダー: {names})"
        raise DataLoadError(msg)

    @staticmethod
    def _has_header(first_row: List[str], column: Optional[str]) -> bool:
        if column is not None and not column.isdigit():
            return True
        try:
            index = int(column) if column is not None else 0
            SeriesLoader._parse(first_row[index])
        except (ValueError, IndexError):
            return True
        return False

    @staticmethod
    def read_column(path: str, column: Optional[str] = None) -> RawSeries:
        """
        CSVから1列を数値として読み込む

        1行目が数値でなければヘッダーとして扱う。空欄・NaN等の行は読み飛ばす。

        Args:
            path: CSVのパス（"-" で標準入力）
            column: 列名または0始まりの列番号（既定は先頭列）

        Returns:
            RawSeries

        Raises:
            DataLoadError: ファイルが開けない、列が見つからない
            ParseError: 数値として解釈できない行（行番号付き）
            EmptySeriesError: 有効な値が1つもない

        Examples:
            >>> # "1\\n2\\n3" -> [1.0, 2.0, 3.0]
        """
        logger.info(constants.LOG_LOADING_DATA.format(path))
        rows = SeriesLoader._open_rows(path)
        numbered: List[Tuple[int, List[str]]] = [
            (line, row) for line, row in enumerate(rows, start=1) if row
        ]
        if not numbered:
            msg = f"データが空です: {path}"
            raise EmptySeriesError(msg)

        if SeriesLoader._has_header(numbered[0][1], column):
            index = SeriesLoader._resolve_column(numbered[0][1], column)
            start = 1
        else:
            index = int(column) if column is not None else 0
            start = 0

        values: List[float] = []
        skipped = 0
        for line, row in numbered[start:]:
            if index >= len(row):
                skipped += 1
                continue
            try:
                value = SeriesLoader._parse(row[index])
            except ValueError as e:
                msg = f"数値として解釈できません: {row[index]!r}"
                raise ParseError(msg, line_number=line) from e
            if value is None:
                skipped += 1
                continue
            values.append(value)

        if skipped:
            logger.warning(f"{skipped}行の欠損値を読み飛ばしました: {path}")
        if not values:
            msg = f"有効な数値が含まれていません: {path}"
            raise EmptySeriesError(msg)

        column_label = column if column is not None else str(index)
        return RawSeries(np.asarray(values, dtype=float), skipped, path, column_label)


def split_tails(
    values: np.ndarray, tail: str = constants.TailModes.RIGHT, split: Optional[float] = None
) -> Dict[str, np.ndarray]:
    """
    裾の向きに応じて系列を正の向きに揃える

    right は split 以上の値（split=None なら全体）、left は split 未満の値を
    符号反転したもの（split=None なら全体を符号反転）、both は両方を返す。

    Raises:
        InvalidConfigError: 未知の裾の向き

    Examples:
        >>> split_tails(np.array([-3.0, -1.0, 2.0]), "left", 0.0)["left"].tolist()
        [3.0, 1.0]
    """
    if tail not in constants.TailModes.ALL:
        msg = f"未知の裾の向きです: {tail!r} (利用可能: {', '.join(constants.TailModes.ALL)})"
        raise InvalidConfigError(msg)
    if tail == constants.TailModes.BOTH and split is None:
        split = 0.0

    halves: Dict[str, np.ndarray] = {}
    if tail in (constants.TailModes.RIGHT, constants.TailModes.BOTH):
        halves["right"] = values if split is None else values[values >= split]
    if tail in (constants.TailModes.LEFT, constants.TailModes.BOTH):
        halves["left"] = -values if split is None else -values[values < split]
    return halves


def load_series(
    path: str,
    column: Optional[str] = None,
    tail: str = constants.TailModes.RIGHT,
    split: Optional[float] = None,
    absolute: bool = False,
    split_at_mode: bool = False,
    mode_rule: str = FitDefaults.MODE_RULE,
) -> LoadedSeries:
    """
    系列を読み込み、前処理する

    Args:
        path: CSVのパス（"-" で標準入力）
        column: 列名または列番号
        tail: right / left / both
        split: 分割点（both の既定は0）
        absolute: 先に絶対値をとる
        split_at_mode: 分割点をヒストグラムの最頻値にする（split より優先）
        mode_rule: 最頻値推定のビン幅規則

    Returns:
        LoadedSeries

    Raises:
        DataLoadError: 読み込みの失敗
        EmptySeriesError: 前処理後に空になった側がある
    """
    raw = SeriesLoader.read_column(path, column)
    values = np.abs(raw.values) if absolute else raw.values
    if split_at_mode:
        split = estimate_mode(values, mode_rule)
        logger.info(f"最頻値 {split:.6g} で分割します")
    halves = split_tails(values, tail, split)

    for name, half in halves.items():
        if half.size == 0:
            msg = f"{name}側に値がありません (split={split})"
            raise EmptySeriesError(msg)

    if tail == constants.TailModes.BOTH and split is None:
        split = 0.0
    return LoadedSeries(
        halves=halves,
        skipped_rows=raw.skipped_rows,
        split=split,
        source=raw.source,
        column=raw.column,
    )
