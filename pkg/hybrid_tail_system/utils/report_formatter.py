#!/usr/bin/env python3

"""
レポート出力フォーマッター

モンテカルロ検証・GPD推定量比較・古典的推定手法の結果を
ASCII罫線・Markdown・CSV・LaTeXの表として出力するユーティリティ
"""

import csv
from io import StringIO
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence

from ..core.constants import OUTPUT_ENCODING, EstimatorNames, OutputFormats, ParameterNames
from ..core.exceptions import InvalidConfigError
from ..core.logging_config import get_logger
from .formatting import format_fixed, format_number, format_scientific

logger = get_logger(__name__)

Rows = List[List[str]]


def _is_numeric(cell: str) -> bool:
    try:
        float(cell)
    except (ValueError, TypeError):
        return False
    return True


def _column_widths(headers: Sequence[str], rows: Rows) -> List[int]:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            if i < len(widths):
                widths[i] = max(widths[i], len(str(cell)))
    return widths


class TableFormatter:
    """表フォーマッター"""

    @staticmethod
    def format_ascii_table(
        headers: Sequence[str], rows: Rows, title: Optional[str] = None
    ) -> str:
        """
        ASCII罫線を使った表を生成（数値列は右寄せ）

        Args:
            headers: ヘッダー行
            rows: データ行のリスト
            title: 表のタイトル

        Returns:
            フォーマット済みの表文字列
        """
        if not rows:
            return ""

        widths = _column_widths(headers, rows)
        align = ["right" if _is_numeric(cell) else "left" for cell in rows[0]]

        def format_row(cells: Sequence[str], alignments: Sequence[str]) -> str:
            formatted = []
            for cell, width, align_type in zip(cells, widths, alignments):
                text = str(cell)
                if align_type == "right":
                    formatted.append(text.rjust(width))
                elif align_type == "center":
                    formatted.append(text.center(width))
                else:
                    formatted.append(text.ljust(width))
            return "│ " + " │ ".join(formatted) + " │"

        lines = []
        if title:
            total_width = sum(widths) + len(widths) * 3 + 1
            lines.append("┌" + "─" * (total_width - 2) + "┐")
            lines.append("│ " + title.center(total_width - 4) + " │")
            lines.append("├" + "┬".join("─" * (w + 2) for w in widths) + "┤")
        else:
            lines.append("┌" + "┬".join("─" * (w + 2) for w in widths) + "┐")

        lines.append(format_row(headers, ["center"] * len(headers)))
        lines.append("╞" + "╪".join("═" * (w + 2) for w in widths) + "╡")
        lines.extend(format_row(row, align) for row in rows)
        lines.append("└" + "┴".join("─" * (w + 2) for w in widths) + "┘")
        return "\n".join(lines)

    @staticmethod
    def format_latex_table(
        headers: Sequence[str],
        rows: Rows,
        caption: Optional[str] = None,
        label: Optional[str] = None,
    ) -> str:
        """
        LaTeX形式の表を生成（先頭列は左寄せ、数値列は右寄せ）

        Args:
            headers: ヘッダー行
            rows: データ行のリスト
            caption: キャプション
            label: LaTeXラベル

        Returns:
            LaTeX形式の表文字列
        """
        alignments = ["l"]
        for i in range(1, len(headers)):
            numeric = bool(rows) and i < len(rows[0]) and _is_numeric(rows[0][i])
            alignments.append("r" if numeric else "c")

        lines = ["\\begin{table}[htbp]", "  \\centering"]
        if caption:
            lines.append(f"  \\caption{{{caption}}}")
        if label:
            lines.append(f"  \\label{{{label}}}")

        bold = " & ".join("\\textbf{" + h + "}" for h in headers)
        lines.extend(
            [
                "  \\begin{tabular}{|" + "|".join(alignments) + "|}",
                "    \\hline",
                f"    {bold} \\\\",
                "    \\hline",
            ]
        )
        lines.extend(f"    {' & '.join(str(cell) for cell in row)} \\\\" for row in rows)
        lines.extend(["    \\hline", "  \\end{tabular}", "\\end{table}"])
        return "\n".join(lines)

    @staticmethod
    def format_markdown_table(headers: Sequence[str], rows: Rows) -> str:
        """Markdown形式の表を生成"""
        widths = _column_widths(headers, rows)
        header_line = "| " + " | ".join(h.ljust(w) for h, w in zip(headers, widths)) + " |"

        separators = []
        for i, w in enumerate(widths):
            numeric = bool(rows) and i < len(rows[0]) and _is_numeric(rows[0][i])
            separators.append("-" * (w - 1) + ":" if numeric else "-" * w)
        separator_line = "| " + " | ".join(separators) + " |"

        data_lines = [
            "| " + " | ".join(str(cell).ljust(w) for cell, w in zip(row, widths)) + " |"
            for row in rows
        ]
        return "\n".join([header_line, separator_line, *data_lines])

    @staticmethod
    def format_csv(headers: Sequence[str], rows: Rows) -> str:
        """CSV形式の文字列を生成"""
        output = StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
        return output.getvalue()

    @staticmethod
    def render(
        headers: Sequence[str],
        rows: Rows,
        format_type: str = OutputFormats.ASCII,
        title: Optional[str] = None,
        label: Optional[str] = None,
    ) -> str:
        """
        指定形式で表を生成

        Raises:
            InvalidConfigError: 未知の出力形式
        """
        if format_type == OutputFormats.LATEX:
            return TableFormatter.format_latex_table(headers, rows, caption=title, label=label)
        if format_type == OutputFormats.MARKDOWN:
            return TableFormatter.format_markdown_table(headers, rows)
        if format_type == OutputFormats.CSV:
            return TableFormatter.format_csv(headers, rows)
        if format_type == OutputFormats.ASCII:
            return TableFormatter.format_ascii_table(headers, rows, title=title)
        msg = f"未知の出力形式です: {format_type!r} (利用可能: {', '.join(OutputFormats.ALL)})"
        raise InvalidConfigError(msg)


def _full_precision(format_type: str) -> bool:
    return format_type == OutputFormats.CSV


def _stats_row(name: str, stats: Mapping[str, Any], format_type: str) -> List[str]:
    if _full_precision(format_type):
        value = format_number
        return [
            name,
            value(stats["true_value"]),
            value(stats["mean"]),
            value(stats["variance"]),
            value(stats["mse"]),
            value(stats["t_stat"]),
            value(stats["p_value"]),
        ]
    return [
        name,
        format_fixed(stats["true_value"]),
        format_fixed(stats["mean"]),
        format_scientific(stats["variance"]),
        format_scientific(stats["mse"]),
        format_fixed(stats["t_stat"], 3),
        format_fixed(stats["p_value"], 3),
    ]


class ReportFormatter:
    """検証結果のフォーマッター"""

    STATS_HEADERS = ["parameter", "true", "mean", "variance", "MSE", "T", "p-value"]

    @staticmethod
    def format_mc_report(report: Mapping[str, Any], format_type: str = OutputFormats.ASCII) -> str:
        """
        モンテカルロ検証の結果をパラメータごとの行で表にする

        Args:
            report: McReport.to_dict() の結果
            format_type: 出力形式

        Returns:
            表と D・平均反復数・失敗数の要約
        """
        parameters = report["parameters"]
        rows = [
            _stats_row(name, parameters[name], format_type)
            for name in ParameterNames.ALL
            if name in parameters
        ]
        table = TableFormatter.render(
            ReportFormatter.STATS_HEADERS,
            rows,
            format_type,
            title="モンテカルロ検証",
            label="tab:montecarlo",
        )
        if format_type == OutputFormats.CSV:
            return table

        summary = [
            f"D: {format_scientific(report['d_metric'])}",
            f"平均外側反復数: {report['average_outer_iterations']:.1f}",
            f"成功: {report['n_success']}  失敗: {report['n_failed']}",
        ]
        if "average_execution_seconds" in report:
            summary.append(f"平均推定時間: {report['average_execution_seconds']:.3f}秒")
        return "\n".join([table, "", *summary])

    @staticmethod
    def format_gpd_comparison(
        report: Mapping[str, Any], format_type: str = OutputFormats.ASCII
    ) -> str:
        """GPD推定量比較（手法 x {xi, beta}）の表"""
        headers = ["method", *ReportFormatter.STATS_HEADERS]
        rows = []
        for method, values in report["methods"].items():
            label = EstimatorNames.LABELS.get(method, method)
            for name in ("xi", "beta"):
                rows.append([label, *_stats_row(name, values[name], format_type)])
        return TableFormatter.render(
            headers, rows, format_type, title="GPD推定量の比較", label="tab:gpd_comparison"
        )

    @staticmethod
    def format_tail_fits(
        fits: Sequence[Mapping[str, Any]], format_type: str = OutputFormats.ASCII
    ) -> str:
        """古典的推定手法の結果（TailFit.to_dict() の列）の表"""
        headers = ["method", "threshold", "order", "n_exc", "xi", "beta", "tail MSE"]
        rows = []
        for entry in fits:
            label = EstimatorNames.LABELS.get(entry["method"], entry["method"])
            if _full_precision(format_type):
                numbers = [format_number(entry[key]) for key in ("threshold", "threshold_order")]
                tail = [format_number(entry[key]) for key in ("xi", "beta", "tail_mse")]
            else:
                numbers = [format_fixed(entry[key]) for key in ("threshold", "threshold_order")]
                tail = [
                    format_fixed(entry["xi"]),
                    format_fixed(entry["beta"]),
                    format_scientific(entry["tail_mse"]),
                ]
            rows.append([label, *numbers, str(entry["n_exceedances"]), *tail])
        return TableFormatter.render(
            headers, rows, format_type, title="古典的EVT推定", label="tab:baselines"
        )


def export_to_file(content: str, filepath: str, encoding: str = OUTPUT_ENCODING) -> None:
    """
    テキストをファイルに書き出す（親ディレクトリは作成する）

    Args:
        content: 出力内容
        filepath: 出力ファイルパス
        encoding: 文字エンコーディング
    """
    output_path = Path(filepath)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding=encoding, newline="") as f:
        f.write(content)
    logger.info(f"結果を書き出しました: {filepath}")
