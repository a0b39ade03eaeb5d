#!/usr/bin/env python3

"""
ユーティリティモジュール
共通のヘルパー関数とユーティリティを提供します。

csv_loader と plot_data は algorithms に依存するため、ここでは読み込まない。
"""

from .formatting import (
    create_separator,
    create_title_block,
    format_fixed,
    format_mapping,
    format_number,
    format_scientific,
    join_output,
)
from .report_formatter import ReportFormatter, TableFormatter, export_to_file
from .result_formatter import ResultFormatter, dump_json
from .validation import (
    parse_float_list,
    validate_nondegenerate,
    validate_open_interval,
    validate_orders,
    validate_positive,
    validate_probability,
    validate_sample,
)

__all__ = [
    "ReportFormatter",
    "ResultFormatter",
    "TableFormatter",
    "create_separator",
    "create_title_block",
    "dump_json",
    "export_to_file",
    "format_fixed",
    "format_mapping",
    "format_number",
    "format_scientific",
    "join_output",
    "parse_float_list",
    "validate_nondegenerate",
    "validate_open_interval",
    "validate_orders",
    "validate_positive",
    "validate_probability",
    "validate_sample",
]
