#!/usr/bin/env python3

"""
推定手法レジストリ
裾推定手法の登録と管理を行う
"""

from typing import ClassVar, Dict, List, Optional, Type

from .base_estimator import BaseTailEstimator
from .exceptions import AlgorithmNotFoundError
from .logging_config import get_logger

logger = get_logger(__name__)


class EstimatorRegistry:
    """推定手法レジストリ（シングルトン）"""

    _instance: ClassVar[Optional["EstimatorRegistry"]] = None
    _estimators: ClassVar[Dict[str, Type[BaseTailEstimator]]] = {}

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    @classmethod
    def register(cls, estimator_class: Type[BaseTailEstimator]) -> None:
        """
        推定手法を登録

        Args:
            estimator_class: 推定手法クラス
        """
        instance = estimator_class()  # type: ignore[call-arg]
        name = instance.name

        if name in cls._estimators:
            logger.warning(f"推定手法 '{name}' は既に登録されています。上書きします。")

        cls._estimators[name] = estimator_class
        logger.debug(f"推定手法 '{name}' を登録しました")

    @classmethod
    def unregister(cls, name: str) -> bool:
        """
        推定手法の登録を解除

        Args:
            name: 手法名

        Returns:
            bool: 解除に成功した場合True
        """
        if name in cls._estimators:
            del cls._estimators[name]
            return True
        return False

    @classmethod
    def get_estimator(cls, name: str) -> Optional[BaseTailEstimator]:
        """
        推定手法を取得

        Args:
            name: 手法名

        Returns:
            Optional[BaseTailEstimator]: 推定手法のインスタンス
        """
        if name not in cls._estimators:
            return None

        return cls._estimators[name]()  # type: ignore[call-arg]

    @classmethod
    def require_estimator(cls, name: str) -> BaseTailEstimator:
        """
        推定手法を取得（未登録ならエラー）

        Raises:
            AlgorithmNotFoundError: 未登録の手法名
        """
        estimator = cls.get_estimator(name)
        if estimator is None:
            msg = f"推定手法 '{name}' が見つかりません（登録済み: {', '.join(cls.list_estimators())}）"
            raise AlgorithmNotFoundError(msg)
        return estimator

    @classmethod
    def list_estimators(cls) -> List[str]:
        """
        登録されている手法名のリストを返す

        Returns:
            List[str]: 手法名のリスト
        """
        return list(cls._estimators)

    @classmethod
    def get_estimator_info(cls, name: str) -> Optional[Dict]:
        """
        推定手法の情報を取得

        Args:
            name: 手法名

        Returns:
            Optional[Dict]: 手法の情報
        """
        estimator = cls.get_estimator(name)
        if estimator:
            return estimator.get_info()
        return None

    @classmethod
    def clear(cls) -> None:
        """すべての推定手法を登録解除"""
        cls._estimators.clear()


def register_estimator(estimator_class: Type[BaseTailEstimator]) -> Type[BaseTailEstimator]:
    """
    推定手法を登録するデコレータ

    Args:
        estimator_class: 推定手法クラス

    Returns:
        Type[BaseTailEstimator]: 登録されたクラス
    """
    EstimatorRegistry.register(estimator_class)
    return estimator_class
