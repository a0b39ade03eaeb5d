#!/usr/bin/env python3

"""
並列実行エンジン
独立なタスク（モンテカルロ反復、複数の推定手法など）を並列に実行し、
完了順によらずタスク番号の順に結果を返す
"""

import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .constants import (
    LOG_ALGORITHM_EXECUTION_FAILURE,
    LOG_ALGORITHM_EXECUTION_START,
    LOG_ALGORITHM_EXECUTION_SUCCESS,
)
from .estimator_registry import EstimatorRegistry
from .exceptions import HybridTailSystemError
from .logging_config import current_level, get_logger, worker_initializer
from .types import ExecutionResultData

logger = get_logger(__name__)


@dataclass(frozen=True)
class Task:
    """実行単位。プロセス実行時は function がモジュールレベルの関数である必要がある"""

    name: str
    function: Callable[..., Any]
    args: Tuple[Any, ...] = ()
    kwargs: Dict[str, Any] = field(default_factory=dict)


class ExecutionResult:
    """実行結果を表すクラス"""

    def __init__(
        self,
        task_name: str,
        success: bool,
        result: Any = None,
        error: Optional[str] = None,
        execution_time: float = 0.0,
        index: int = 0,
        error_type: Optional[str] = None,
    ):
        self.task_name = task_name
        self.success = success
        self.result = result
        self.error = error
        self.execution_time = execution_time
        self.index = index
        self.error_type = error_type

    def to_dict(self) -> ExecutionResultData:
        """辞書形式に変換"""
        return {
            "task_name": self.task_name,
            "index": self.index,
            "success": self.success,
            "result": self.result,
            "error": self.error,
            "error_type": self.error_type,
            "execution_time": self.execution_time,
        }

    def __repr__(self):
        status = "成功" if self.success else "失敗"
        return f"<ExecutionResult: {self.task_name} - {status} ({self.execution_time:.2f}s)>"

    @staticmethod
    def create_not_found(name: str, index: int = 0) -> "ExecutionResult":
        """
        推定手法が見つからない場合のExecutionResultを作成

        Args:
            name: 手法名
            index: タスク番号

        Returns:
            ExecutionResult: 失敗結果
        """
        return ExecutionResult(
            task_name=name,
            success=False,
            error=f"推定手法 '{name}' が見つかりません",
            index=index,
            error_type="AlgorithmNotFoundError",
        )


def _report_progress(
    callback: Optional[Callable[[str], None]], task_name: str, status: str
) -> None:
    """
    進捗をコールバックで報告

    Args:
        callback: 進捗コールバック関数
        task_name: タスク名
        status: ステータスメッセージ
    """
    if callback:
        callback(f"{task_name}: {status}")


def run_task(task: Task, index: int) -> ExecutionResult:
    """
    単一のタスクを実行し、例外を結果に変換

    Args:
        task: タスク
        index: タスク番号（結果の並び順に使う）

    Returns:
        ExecutionResult: 実行結果
    """
    start_time = time.perf_counter()
    logger.debug(LOG_ALGORITHM_EXECUTION_START.format(task.name))

    try:
        result = task.function(*task.args, **task.kwargs)
    except HybridTailSystemError as e:
        execution_time = time.perf_counter() - start_time
        logger.warning(LOG_ALGORITHM_EXECUTION_FAILURE.format(task.name, e))
        return ExecutionResult(
            task_name=task.name,
            success=False,
            error=str(e),
            execution_time=execution_time,
            index=index,
            error_type=type(e).__name__,
        )
    except Exception as e:
        execution_time = time.perf_counter() - start_time
        logger.exception(LOG_ALGORITHM_EXECUTION_FAILURE.format(task.name, e))
        return ExecutionResult(
            task_name=task.name,
            success=False,
            error=str(e),
            execution_time=execution_time,
            index=index,
            error_type=type(e).__name__,
        )

    execution_time = time.perf_counter() - start_time
    logger.debug(LOG_ALGORITHM_EXECUTION_SUCCESS.format(task.name, execution_time))
    return ExecutionResult(
        task_name=task.name,
        success=True,
        result=result,
        execution_time=execution_time,
        index=index,
    )


def _estimator_task(name: str, data: Any, kwargs: Dict[str, Any]) -> Dict[str, Any]:
    # spawn方式の子プロセスでも登録が済むように
    from ..algorithms import tail_estimators  # noqa: F401

    estimator = EstimatorRegistry.require_estimator(name)
    return estimator.execute(data, **kwargs)


def estimator_tasks(names: Sequence[str], data: Any, **kwargs: Any) -> List[Task]:
    """
    登録済み推定手法を実行するタスク列を作成

    Args:
        names: 手法名のリスト
        data: 標本
        **kwargs: 各手法に渡すオプション

    Returns:
        List[Task]: タスクのリスト
    """
    return [Task(name=name, function=_estimator_task, args=(name, data, kwargs)) for name in names]


class ParallelExecutor:
    """並列実行エンジン"""

    def __init__(self, max_workers: Optional[int] = None, use_processes: bool = False):
        """
        Args:
            max_workers: 最大ワーカー数（Noneの場合は自動）
            use_processes: Trueの場合プロセスベース、Falseの場合スレッドベース
        """
        self.max_workers = max_workers
        self.use_processes = use_processes

    def execute_single(self, task: Task, index: int = 0) -> ExecutionResult:
        """
        単一のタスクを実行

        Args:
            task: タスク
            index: タスク番号

        Returns:
            ExecutionResult: 実行結果
        """
        return run_task(task, index)

    def execute_multiple(
        self,
        tasks: Sequence[Task],
        progress_callback: Optional[Callable[[str], None]] = None,
    ) -> List[ExecutionResult]:
        """
        複数のタスクを並列に実行

        Args:
            tasks: タスクのリスト
            progress_callback: 進捗コールバック関数

        Returns:
            List[ExecutionResult]: タスク番号順に並べた実行結果
        """
        if not tasks:
            return []

        results: List[ExecutionResult] = []
        executor: Executor
        if self.use_processes:
            executor = ProcessPoolExecutor(
                max_workers=self.max_workers,
                initializer=worker_initializer,
                initargs=(current_level(),),
            )
        else:
            executor = ThreadPoolExecutor(max_workers=self.max_workers)

        with executor:
            future_to_index = {
                executor.submit(run_task, task, index): index for index, task in enumerate(tasks)
            }

            for future in as_completed(future_to_index):
                index = future_to_index[future]
                task = tasks[index]

                try:
                    result = future.result()
                    results.append(result)
                    status = "完了" if result.success else "失敗"
                    _report_progress(progress_callback, task.name, status)

                except Exception as e:
                    # プロセスの異常終了やpickle失敗
                    results.append(
                        ExecutionResult(
                            task_name=task.name,
                            success=False,
                            error=str(e),
                            index=index,
                            error_type=type(e).__name__,
                        )
                    )
                    _report_progress(progress_callback, task.name, f"エラー - {e!s}")

        results.sort(key=lambda r: r.index)
        return results

    def execute_estimators(
        self,
        names: Sequence[str],
        data: Any,
        progress_callback: Optional[Callable[[str], None]] = None,
        **kwargs: Any,
    ) -> List[ExecutionResult]:
        """
        複数の推定手法を並列に実行

        Args:
            names: 手法名のリスト
            data: 標本
            progress_callback: 進捗コールバック関数
            **kwargs: 各手法に渡すオプション

        Returns:
            List[ExecutionResult]: 実行結果のリスト
        """
        registered = EstimatorRegistry.list_estimators()
        positions = [i for i, n in enumerate(names) if n in registered]
        missing = [
            ExecutionResult.create_not_found(n, index=i)
            for i, n in enumerate(names)
            if n not in registered
        ]
        known = [names[i] for i in positions]
        results = self.execute_multiple(estimator_tasks(known, data, **kwargs), progress_callback)
        for result in results:
            result.index = positions[result.index]
        return sorted(missing + results, key=lambda r: r.index)

    def execute_all(
        self,
        data: Any,
        progress_callback: Optional[Callable[[str], None]] = None,
        **kwargs: Any,
    ) -> List[ExecutionResult]:
        """
        すべての登録された推定手法を並列に実行

        Args:
            data: 標本
            progress_callback: 進捗コールバック関数
            **kwargs: 各手法に渡すオプション

        Returns:
            List[ExecutionResult]: 実行結果のリスト
        """
        return self.execute_estimators(
            EstimatorRegistry.list_estimators(), data, progress_callback, **kwargs
        )


class SequentialExecutor:
    """逐次実行エンジン"""

    def execute_single(self, task: Task, index: int = 0) -> ExecutionResult:
        """
        単一のタスクを実行

        Args:
            task: タスク
            index: タスク番号

        Returns:
            ExecutionResult: 実行結果
        """
        return run_task(task, index)

    def execute_multiple(
        self,
        tasks: Sequence[Task],
        progress_callback: Optional[Callable[[str], None]] = None,
    ) -> List[ExecutionResult]:
        """
        複数のタスクを逐次実行

        Args:
            tasks: タスクのリスト
            progress_callback: 進捗コールバック関数

        Returns:
            List[ExecutionResult]: 実行結果のリスト
        """
        results = []

        for index, task in enumerate(tasks):
            result = self.execute_single(task, index)
            results.append(result)
            status = "完了" if result.success else "失敗"
            _report_progress(progress_callback, task.name, status)

        return results

    def execute_estimators(
        self,
        names: Sequence[str],
        data: Any,
        progress_callback: Optional[Callable[[str], None]] = None,
        **kwargs: Any,
    ) -> List[ExecutionResult]:
        """
        複数の推定手法を逐次実行

        Args:
            names: 手法名のリスト
            data: 標本
            progress_callback: 進捗コールバック関数
            **kwargs: 各手法に渡すオプション

        Returns:
            List[ExecutionResult]: 実行結果のリスト
        """
        results = []

        for index, name in enumerate(names):
            if EstimatorRegistry.get_estimator(name) is None:
                results.append(ExecutionResult.create_not_found(name, index=index))
                _report_progress(progress_callback, name, "エラー - 推定手法が見つかりません")
                continue

            (task,) = estimator_tasks([name], data, **kwargs)
            result = self.execute_single(task, index)
            results.append(result)
            status = "完了" if result.success else "失敗"
            _report_progress(progress_callback, name, status)

        return results
