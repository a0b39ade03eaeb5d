#!/usr/bin/env python3

"""
ロギング設定モジュール

パッケージのロガー "hybrid_tail_system" にハンドラーを付けます。
標準出力は生成した系列とJSON結果に使うため、コンソールログは標準エラー出力へ書きます。
numpy・scipy の RuntimeWarning などもログに流し、プロセス並列の子プロセスにも
親と同じレベルを設定します。
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional

LOGGER_NAME = "hybrid_tail_system"
WARNINGS_LOGGER_NAME = "py.warnings"

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
# 子プロセスのログにはプロセスIDを付ける
WORKER_LOG_FORMAT = "%(asctime)s - [pid %(process)d] %(name)s - %(levelname)s - %(message)s"


def verbosity_level(verbose: bool = False, quiet: bool = False) -> int:
    """
    CLIの -v / -q からログレベルを決める

    Examples:
        >>> verbosity_level(verbose=True) == logging.DEBUG
        True
        >>> verbosity_level() == logging.INFO
        True
    """
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return logging.INFO


def _build_handlers(level: int, log_file: Optional[str], fmt: str) -> List[logging.Handler]:
    formatter = logging.Formatter(fmt, datefmt=DATE_FORMAT)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path, encoding="utf-8"))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
    return handlers


def _install(name: str, level: int, handlers: List[logging.Handler]) -> logging.Logger:
    logger = logging.getLogger(name)
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()
    logger.setLevel(level)
    for handler in handlers:
        logger.addHandler(handler)
    return logger


def setup_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None,
    capture_warnings: bool = True,
) -> logging.Logger:
    """
    パッケージのロガーを設定

    呼ぶたびに既存のハンドラーを外して付け直すので、同じプロセスで
    main() を何度呼んでもログは重複しません。

    Args:
        level: ログレベル
        log_file: ログファイルのパス（Noneの場合は標準エラー出力のみ）
        capture_warnings: warnings モジュールの警告を同じハンドラーに流すか

    Returns:
        logging.Logger: 設定されたロガー
    """
    handlers = _build_handlers(level, log_file, LOG_FORMAT)
    logger = _install(LOGGER_NAME, level, handlers)

    logging.captureWarnings(capture_warnings)
    if capture_warnings:
        _install(WARNINGS_LOGGER_NAME, logging.WARNING, handlers)
    else:
        _install(WARNINGS_LOGGER_NAME, logging.WARNING, [])

    return logger


def worker_initializer(level: int) -> None:
    """
    プロセスプールの initializer

    spawn方式の子プロセスはハンドラーを引き継がないため、親のレベルで
    標準エラー出力のハンドラーを付ける。fork方式で既にハンドラーがあれば何もしない。
    """
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        return
    _install(LOGGER_NAME, level, _build_handlers(level, None, WORKER_LOG_FORMAT))


def current_level() -> int:
    """パッケージロガーの実効レベル"""
    return logging.getLogger(LOGGER_NAME).getEffectiveLevel()


def get_logger(name: str = LOGGER_NAME) -> logging.Logger:
    """
    ロガーを取得

    Args:
        name: ロガー名（通常は __name__）

    Returns:
        logging.Logger: ロガーインスタンス
    """
    return logging.getLogger(name)
