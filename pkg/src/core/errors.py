# src/core/errors.py

"""シミュレータ固有の例外"""

from typing import Optional


class MobSimError(Exception):
    """シミュレータ共通の基底例外"""
    pass


class PlacementExhaustedError(MobSimError):
    """ワールド生成で配置の試行回数が上限に達した"""

    def __init__(self, body_label: str, attempts: int):
        self.body_label = body_label
        self.attempts = attempts
        super().__init__(
            f"{body_label} の配置に{attempts}回失敗しました（配置が過密です）"
        )


class ProtocolError(MobSimError):
    """無線プロトコルの事前条件違反"""
    pass


class WorldFileError(MobSimError):
    """ワールドファイルが存在しない・壊れている"""
    pass


class TraceFileError(MobSimError):
    """トレースファイルが壊れている・ワールドと一致しない"""
    pass


class IncompleteTableError(MobSimError):
    """被験者内計画の表に欠損セルがある"""

    def __init__(self, world_id: int, condition_label: str, detail: Optional[str] = None):
        self.world_id = world_id
        self.condition_label = condition_label
        message = f"欠損セル: world {world_id}, {condition_label}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class UsageError(MobSimError):
    """コマンドライン引数の誤り"""
    pass


class RunsFileError(MobSimError):
    """runs.csv / robots.csv が存在しない・読めない"""
    pass
