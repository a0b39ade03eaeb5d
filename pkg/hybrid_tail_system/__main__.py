#!/usr/bin/env python3

"""
G-E-GPDハイブリッド分布 自己キャリブレーションシステム - メインエントリーポイント

python -m hybrid_tail_system で実行可能
"""

import sys

from .cli import main as cli_main


def main() -> None:
    """
    コンソールスクリプト hybrid-tail-system の入口

    終了コード:
        - 0: 正常終了
        - 2: 使い方の誤り（引数・設定値）
        - 3: データの誤り（読み込み・空の系列・範囲0）
        - 4: 数値計算の失敗

    使用例:
        python -m hybrid_tail_system fit data.csv
        python -m hybrid_tail_system mc --regime baseline
    """
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
