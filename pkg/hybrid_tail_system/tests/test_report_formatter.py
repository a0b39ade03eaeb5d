"""
表・構造化出力のフォーマッターのテスト
"""

import csv
import io
import json

import pytest

from hybrid_tail_system.core.exceptions import InvalidConfigError
from hybrid_tail_system.core.executor import ExecutionResult
from hybrid_tail_system.utils.report_formatter import (
    ReportFormatter,
    TableFormatter,
    export_to_file,
)
from hybrid_tail_system.utils.result_formatter import ResultFormatter, dump_json

HEADERS = ["name", "value"]
ROWS = [["mu", "2.0003"], ["xi", "0.4998"]]


def stats(true_value, mean, t_stat=0.5, p_value=0.6):
    return {
        "true_value": true_value,
        "mean": mean,
        "variance": 1.5e-6,
        "mse": 1.6e-6,
        "t_stat": t_stat,
        "p_value": p_value,
        "degenerate": t_stat is None,
    }


MC_REPORT = {
    "parameters": {
        "mu": stats(2.0, 2.0003),
        "sigma": stats(1.0, 0.9998),
        "u2": stats(5.0, 5.0011),
        "xi": stats(0.5, 0.4993, None, None),
    },
    "d_metric": 3.2e-7,
    "average_outer_iterations": 12.5,
    "n_success": 10,
    "n_failed": 0,
    "failures": [],
    "stop_reasons": {"C1C2": 10},
    "config": {},
}

TAIL_FIT = {
    "method": "hill",
    "threshold": 4.2,
    "threshold_order": 1900,
    "n_exceedances": 100,
    "xi": 0.51,
    "beta": 2.142,
    "tail_mse": 2.5e-7,
}


class TestTableFormatter:
    """TableFormatter のテスト"""

    def test_ascii(self):
        """罫線付きの表、数値列は右寄せ"""
        table = TableFormatter.format_ascii_table(HEADERS, ROWS, title="結果")
        lines = table.split("\n")
        assert lines[0].startswith("┌")
        assert "結果" in lines[1]
        assert lines[-1].startswith("└")
        assert any("│ mu   │ 2.0003 │" == line for line in lines)

    def test_ascii_empty(self):
        """行がなければ空文字列"""
        assert TableFormatter.format_ascii_table(HEADERS, []) == ""

    def test_markdown(self):
        """数値列の区切りは右寄せ指定"""
        lines = TableFormatter.format_markdown_table(HEADERS, ROWS).split("\n")
        assert lines[0] == "| name | value  |"
        assert lines[1] == "| ---- | -----: |"
        assert len(lines) == 4

    def test_csv(self):
        """CSVはヘッダー付きで読み戻せる"""
        text = TableFormatter.format_csv(HEADERS, ROWS)
        assert list(csv.reader(io.StringIO(text))) == [HEADERS, *ROWS]

    def test_latex(self):
        """LaTeXの表環境"""
        text = TableFormatter.format_latex_table(HEADERS, ROWS, caption="c", label="tab:x")
        assert text.startswith("\\begin{table}[htbp]")
        assert "\\caption{c}" in text
        assert "\\label{tab:x}" in text
        assert "\\begin{tabular}{|l|r|}" in text
        assert "mu & 2.0003 \\\\" in text

    @pytest.mark.parametrize("format_type", ["ascii", "markdown", "csv", "latex"])
    def test_render_known(self, format_type):
        """すべての既知形式で行が含まれる"""
        assert "2.0003" in TableFormatter.render(HEADERS, ROWS, format_type)

    def test_render_unknown(self):
        """未知の形式はエラー"""
        with pytest.raises(InvalidConfigError, match="未知の出力形式"):
            TableFormatter.render(HEADERS, ROWS, "html")


class TestReportFormatter:
    """ReportFormatter のテスト"""

    def test_mc_report_ascii(self):
        """パラメータごとの行と要約"""
        text = ReportFormatter.format_mc_report(MC_REPORT)
        assert "2.0003" in text
        assert "D: 3.20e-07" in text
        assert "平均外側反復数: 12.5" in text
        assert "N/A" in text
        assert "平均推定時間" not in text

    def test_mc_report_csv_full_precision(self):
        """CSVは往復可能な桁数で、要約を付けない"""
        text = ReportFormatter.format_mc_report(MC_REPORT, "csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ReportFormatter.STATS_HEADERS
        assert [row[0] for row in rows[1:]] == ["mu", "sigma", "u2", "xi"]
        assert float(rows[1][2]) == 2.0003
        assert rows[4][5] == "N/A"
        assert "D:" not in text

    def test_mc_report_with_timing(self):
        """計測時間があれば表示"""
        report = dict(MC_REPORT, average_execution_seconds=0.125)
        assert "平均推定時間: 0.125秒" in ReportFormatter.format_mc_report(report)

    def test_gpd_comparison(self):
        """手法ごとに xi と beta の2行"""
        report = {
            "methods": {
                "mep": {"xi": stats(0.5, 0.49), "beta": stats(2.5, 2.4)},
                "ml": {"xi": stats(0.5, 0.51), "beta": stats(2.5, 2.6)},
            }
        }
        rows = list(csv.reader(io.StringIO(ReportFormatter.format_gpd_comparison(report, "csv"))))
        assert len(rows) == 5
        assert rows[1][:2] == ["MEP-PWM", "xi"]
        assert rows[4][:2] == ["ML", "beta"]

    def test_tail_fits(self):
        """古典的推定手法の表"""
        text = ReportFormatter.format_tail_fits([TAIL_FIT], "markdown")
        assert "Hill" in text
        assert "100" in text
        assert "2.50e-07" in text


class TestExportToFile:
    """export_to_file のテスト"""

    def test_creates_parent(self, tmp_path):
        """親ディレクトリを作って書き出す"""
        target = tmp_path / "out" / "report.txt"
        export_to_file("内容\n", str(target))
        assert target.read_text(encoding="utf-8") == "内容\n"


class TestResultFormatter:
    """ResultFormatter と dump_json のテスト"""

    def test_process_results(self):
        """成功と失敗を分けて集計"""
        results = [
            ExecutionResult("hill", True, result=TAIL_FIT, execution_time=0.01),
            ExecutionResult.create_not_found("nonexistent", index=1),
        ]
        summary = ResultFormatter.process_results(results)
        assert summary["success_count"] == 1
        assert summary["total_count"] == 2
        assert summary["all_results"] == {"hill": TAIL_FIT}
        assert summary["failures"]["nonexistent"]["error_type"] == "AlgorithmNotFoundError"

    def test_format_result_for_cli(self):
        """失敗行には記号とエラーを表示"""
        entry = {
            "name": "ml",
            "success": False,
            "execution_time": 0.0,
            "formatted_output": None,
            "error": "内点の最大値がありません",
        }
        expected = "✗ ml: 失敗 - 内点の最大値がありません"
        assert ResultFormatter.format_result_for_cli(entry) == expected

    def test_success_summary(self):
        """成功数の表示"""
        assert ResultFormatter.format_success_summary(3, 4) == "成功: 3/4"

    def test_fit_summary(self):
        """θ・従属パラメータ・停止情報"""
        fit = {
            "theta": {"mu": 2.0, "sigma": 1.0, "u2": 5.0, "xi": 0.5},
            "derived": {"beta": 2.5, "lam": 0.6, "u1": 2.6},
            "stop_reason": "C1C2",
            "iterations": 7,
            "full_mse": 1.0e-7,
            "tail_mse": 2.0e-7,
        }
        text = ResultFormatter.format_fit_summary(fit)
        assert "  xi: 0.5" in text
        assert "  u1: 2.6" in text
        assert "理由: C1C2" in text
        assert "外側反復: 7" in text

    def test_dump_json(self):
        """キー整列、末尾改行、float の往復"""
        text = dump_json({"b": 0.1, "a": [1, 2], "name": "裾"})
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')
        assert "裾" in text
        assert json.loads(text)["b"] == 0.1
