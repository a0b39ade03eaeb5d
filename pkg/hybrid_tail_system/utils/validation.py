#!/usr/bin/env python3

"""
データ検証ユーティリティ

標本・確率・設定値の妥当性をチェックするための検証関数を提供します。
"""

import math
from typing import Any, Iterable, Sequence, Tuple

import numpy as np

from ..core.exceptions import (
    DegenerateRangeError,
    DomainError,
    EmptyDataError,
    InvalidConfigError,
)


def validate_sample(data: Any, min_size: int = 1) -> np.ndarray:
    """
    標本を1次元の有限なfloat配列に変換して検証

    Args:
        data: 数値の列
        min_size: 必要な最小サイズ

    Returns:
        np.ndarray: 検証済みの配列（コピー）

    Raises:
        EmptyDataError: 空、または最小サイズ未満
        DomainError: NaNや無限大を含む

    Examples:
        >>> validate_sample([1, 2, 3]).tolist()
        [1.0, 2.0, 3.0]
    """
    values = np.array(data, dtype=float).ravel()

    if values.size == 0:
        msg = "標本が空です"
        raise EmptyDataError(msg)

    if values.size < min_size:
        msg = f"標本サイズが不足しています: n={values.size} (必要: {min_size}以上)"
        raise EmptyDataError(msg)

    if not np.all(np.isfinite(values)):
        msg = "標本にNaNまたは無限大が含まれています"
        raise DomainError(msg)

    return values


def validate_nondegenerate(data: np.ndarray) -> Tuple[float, float]:
    """
    最小値と最大値が異なることを検証

    Args:
        data: 検証済みの標本

    Returns:
        (最小値, 最大値)

    Raises:
        DegenerateRangeError: 最大値 == 最小値
    """
    low = float(np.min(data))
    high = float(np.max(data))
    if high <= low:
        msg = f"標本の値がすべて等しいため範囲が0です: {low!r}"
        raise DegenerateRangeError(msg)
    return low, high


def validate_probability(p: Any, name: str = "p") -> np.ndarray:
    """
    開区間 (0, 1) の確率であることを検証

    Args:
        p: 確率（スカラーまたは配列）
        name: エラーメッセージ用の名前

    Returns:
        np.ndarray: float配列

    Raises:
        DomainError: (0, 1) の外側の値を含む
    """
    values = np.asarray(p, dtype=float)
    if not np.all((values > 0.0) & (values < 1.0)):
        msg = f"{name} は開区間 (0, 1) に含まれる必要があります: {p!r}"
        raise DomainError(msg)
    return values


def validate_open_interval(value: float, low: float, high: float, name: str) -> float:
    """
    設定値が開区間 (low, high) にあることを検証

    Raises:
        InvalidConfigError: 区間外、または有限でない
    """
    if not (math.isfinite(value) and low < value < high):
        msg = f"{name} は ({low}, {high}) の範囲で指定してください: {value!r}"
        raise InvalidConfigError(msg)
    return float(value)


def validate_positive(value: float, name: str) -> float:
    """
    設定値が正の有限値であることを検証

    Raises:
        InvalidConfigError: 正でない、または有限でない
    """
    if not (math.isfinite(value) and value > 0):
        msg = f"{name} は正の値で指定してください: {value!r}"
        raise InvalidConfigError(msg)
    return float(value)


def validate_orders(orders: Iterable[float]) -> Tuple[float, ...]:
    """
    閾値候補の分位次数を検証して昇順のタプルにする

    Args:
        orders: 分位次数の列

    Returns:
        昇順・重複なしのタプル

    Raises:
        InvalidConfigError: 空、または (0.5, 1) の外側の値を含む
    """
    values = sorted({float(o) for o in orders})
    if not values:
        msg = "閾値候補が空です"
        raise InvalidConfigError(msg)
    for order in values:
        validate_open_interval(order, 0.5, 1.0, "閾値候補の次数")
    return tuple(values)


def parse_float_list(text: str, expected: int = 0, name: str = "値") -> Sequence[float]:
    """
    カンマ区切りの数値列を解析

    Args:
        text: "2,1,5,0.5" のような文字列
        expected: 期待する要素数（0なら任意）
        name: エラーメッセージ用の名前

    Returns:
        floatのリスト

    Raises:
        InvalidConfigError: 解析できない、または要素数が異なる

    Examples:
        >>> parse_float_list("2,1,5,0.5", 4)
        [2.0, 1.0, 5.0, 0.5]
    """
    try:
        values = [float(token) for token in text.split(",") if token.strip()]
    except ValueError as e:
        msg = f"{name} を数値列として解釈できません: {text!r}"
        raise InvalidConfigError(msg) from e

    if expected and len(values) != expected:
        msg = f"{name} は {expected} 個の数値が必要です: {text!r}"
        raise InvalidConfigError(msg)
    return values
