#!/usr/bin/env python3

"""
結果フォーマッティングユーティリティ

推定手法の ExecutionResult のリストや自己キャリブレーションの結果を
表示用テキストと構造化出力（JSON）に変換する
"""

import json
from typing import Any, Dict, List, Mapping

from ..core.estimator_registry import EstimatorRegistry
from ..core.executor import ExecutionResult
from .formatting import create_title_block, format_mapping, join_output


class ResultFormatter:
    """推定結果のフォーマッティングユーティリティ"""

    @staticmethod
    def process_results(results: List[ExecutionResult]) -> Dict[str, Any]:
        """
        推定手法の実行結果を集計

        Args:
            results: ExecutionResultのリスト

        Returns:
            集計結果の辞書
                - success_count: 成功した数
                - total_count: 総数
                - formatted_results: フォーマット済み結果のリスト
                - all_results: 手法名 -> TailFitの辞書
                - failures: 手法名 -> エラー情報
        """
        all_results: Dict[str, Any] = {}
        failures: Dict[str, Dict[str, Any]] = {}
        formatted_results = []

        for result in results:
            formatted_results.append(ResultFormatter._format_single_result(result))
            if result.success and result.result:
                all_results[result.task_name] = result.result
            elif not result.success:
                failures[result.task_name] = {
                    "error_type": result.error_type,
                    "message": result.error,
                }

        return {
            "success_count": len(all_results),
            "total_count": len(results),
            "formatted_results": formatted_results,
            "all_results": all_results,
            "failures": failures,
        }

    @staticmethod
    def _format_single_result(result: ExecutionResult) -> Dict[str, Any]:
        formatted_entry = {
            "name": result.task_name,
            "success": result.success,
            "execution_time": result.execution_time,
            "formatted_output": None,
            "error": result.error,
        }

        if result.success and result.result:
            estimator = EstimatorRegistry.get_estimator(result.task_name)
            if estimator:
                formatted_entry["formatted_output"] = estimator.format_results(result.result)

        return formatted_entry

    @staticmethod
    def format_success_summary(success_count: int, total_count: int) -> str:
        return f"成功: {success_count}/{total_count}"

    @staticmethod
    def format_result_for_cli(formatted_entry: Dict[str, Any]) -> str:
        """
        CLI用に1手法の結果をフォーマット

        Args:
            formatted_entry: _format_single_result の結果

        Returns:
            CLI表示用の文字列
        """
        name = formatted_entry["name"]
        if not formatted_entry["success"]:
            return f"✗ {name}: 失敗 - {formatted_entry['error']}"

        lines = [f"✓ {name}: 成功 ({formatted_entry['execution_time']:.2f}秒)"]
        if formatted_entry["formatted_output"]:
            lines.append(formatted_entry["formatted_output"])
        return "\n".join(lines)

    @staticmethod
    def format_fit_summary(
        fit: Mapping[str, Any], title: str = "自己キャリブレーション結果"
    ) -> str:
        """
        FitResult.to_dict() を人間向けのテキストにする

        Examples:
            >>> text = ResultFormatter.format_fit_summary(result.to_dict())
        """
        output = create_title_block(title)
        output.extend(format_mapping(fit["theta"], "【θ】"))
        output.extend(format_mapping(fit["derived"], "【従属パラメータ】"))
        output.append("【停止】")
        output.append(f"  理由: {fit['stop_reason']}")
        output.append(f"  外側反復: {fit['iterations']}")
        output.append(f"  全体MSE: {fit['full_mse']:.3e}")
        output.append(f"  裾MSE: {fit['tail_mse']:.3e}")
        return join_output(output)


def dump_json(payload: Dict[str, Any]) -> str:
    """
    構造化出力を JSON 文字列にする

    キーは整列し、float は往復可能な最短表現で出力される。
    """
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
