#!/usr/bin/env python3

"""
基底推定手法クラス
古典的EVTの裾推定手法はすべてこのクラスを継承して実装する
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence

import numpy as np

from .constants import BaselineDefaults
from .logging_config import get_logger


class BaseTailEstimator(ABC):
    """裾推定手法の基底クラス"""

    def __init__(self, name: str, description: str):
        """
        Args:
            name: 手法のタグ（レジストリのキー）
            description: 手法の説明
        """
        self.name = name
        self.description = description
        self.options: Dict[str, Any] = {}
        self.logger = get_logger(f"{__name__}.{self.__class__.__name__}")

    @abstractmethod
    def estimate(self, data: np.ndarray, **kwargs: Any) -> Any:
        """
        閾値選択とGPD当てはめを実行

        Args:
            data: 標本
            **kwargs: 追加のオプション

        Returns:
            TailFit: 推定結果
        """

    @abstractmethod
    def get_supported_options(self) -> Dict[str, Dict[str, Any]]:
        """
        サポートされているオプションの定義を返す

        Returns:
            Dict[str, Dict[str, Any]]: オプション名とその定義の辞書
                例: {
                    'k': {
                        'type': int,
                        'default': None,
                        'help': '上側順序統計量の数'
                    }
                }
        """

    def validate_data(self, data: Sequence[float]) -> np.ndarray:
        """
        標本を検証して配列に変換

        Args:
            data: 標本

        Returns:
            np.ndarray: 有限値のみからなる1次元配列
        """
        from ..utils.validation import validate_sample

        return validate_sample(data, min_size=2)

    def _extract_execution_options(self, **kwargs: Any) -> Dict[str, Any]:
        """
        共通の実行オプション（候補次数・最小超過数）を抽出し、既定値を適用

        Args:
            **kwargs: 実行時に渡されたキーワード引数

        Returns:
            Dict[str, Any]: 抽出されたオプション
        """
        orders = kwargs.get("candidate_orders")
        return {
            "candidate_orders": tuple(orders) if orders else BaselineDefaults.CANDIDATE_ORDERS,
            "min_exceedances": kwargs.get("min_exceedances", BaselineDefaults.MIN_EXCEEDANCES),
        }

    def execute(self, data: Sequence[float], **kwargs: Any) -> Dict[str, Any]:
        """
        検証・推定・辞書化をまとめて行うテンプレートメソッド

        Args:
            data: 標本
            **kwargs: 追加のオプション

        Returns:
            Dict[str, Any]: TailFitの辞書表現
        """
        values = self.validate_data(data)
        self.logger.info(f"{self.name}: n={values.size} で推定を開始")
        tail_fit = self.estimate(values, **kwargs)
        return dict(tail_fit.to_dict())

    def format_results(self, results: Dict[str, Any]) -> str:
        """
        結果を人間が読みやすい形式にフォーマット

        Args:
            results: 実行結果

        Returns:
            str: フォーマットされた結果
        """
        from ..utils.formatting import create_title_block, format_number, join_output

        output = []
        output.extend(create_title_block(f"推定手法: {self.description}"))

        for key, value in results.items():
            if key == "method":
                continue
            shown = format_number(value) if isinstance(value, float) else value
            output.append(f"{key}: {shown}")

        return join_output(output)

    def get_info(self) -> Dict[str, Any]:
        """
        手法の情報を返す

        Returns:
            Dict[str, Any]: 手法の情報
        """
        return {
            "name": self.name,
            "description": self.description,
            "supported_options": self.get_supported_options(),
        }

    @staticmethod
    def get_common_options() -> Dict[str, Dict[str, Any]]:
        """
        すべての手法に共通するオプションの定義を返す

        Returns:
            Dict[str, Dict[str, Any]]: 共通オプション定義
        """
        return {
            "candidate_orders": {
                "type": tuple,
                "default": BaselineDefaults.CANDIDATE_ORDERS,
                "help": "閾値候補の分位次数",
            },
            "min_exceedances": {
                "type": int,
                "default": BaselineDefaults.MIN_EXCEEDANCES,
                "help": "候補ごとに必要な最小超過数",
            },
        }
