# src/utils/file_handler.py

import json
import yaml
import pandas as pd
from pathlib import Path
from typing import Iterable, List, Sequence, Union
import logging

from ..models.world import WorldSpec
from ..models.run_record import Event, RunRecord, TraceRow
from ..core.errors import WorldFileError, TraceFileError, RunsFileError
from ..analysis.summary import RUNS_COLUMNS, ROBOTS_COLUMNS

TRACE_COLUMNS = ['tick', 'robot_id', 'x', 'y', 'heading', 'mode']

PathLike = Union[str, Path]


def _time(value) -> str:
    """時刻は小数6桁（なしは空欄）"""
    return "" if value is None else f"{value:.6f}"


class FileHandler:
    """ファイル操作を管理するクラス

    出力はすべて UTF-8（BOMなし）・改行 LF・'.' 小数点で、同じ入力から同じバイト列になる。
    """

    logger = logging.getLogger(__name__)

    @staticmethod
    def _prepare(file_path: PathLike) -> Path:
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        return file_path

    @staticmethod
    def _write_frame(df: pd.DataFrame, file_path: PathLike) -> Path:
        file_path = FileHandler._prepare(file_path)
        df.to_csv(file_path, index=False, encoding='utf-8', lineterminator='\n')
        FileHandler.logger.info(f"CSVファイル保存完了: {file_path} ({len(df)}行)")
        return file_path

    @staticmethod
    def save_frame_csv(df: pd.DataFrame, file_path: PathLike) -> Path:
        """データフレームをそのまま CSV で保存（anova.csv など）"""
        return FileHandler._write_frame(df, file_path)

    # ワールドファイル

    @staticmethod
    def save_world(spec: WorldSpec, file_path: PathLike) -> Path:
        """ワールドをYAMLで保存"""
        file_path = FileHandler._prepare(file_path)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            yaml.safe_dump(spec.to_dict(), f, default_flow_style=False,
                           allow_unicode=True, sort_keys=False)
        FileHandler.logger.info(f"ワールドファイル保存完了: {file_path}")
        return file_path

    @staticmethod
    def load_world(file_path: PathLike) -> WorldSpec:
        """ワールドファイルを読み込み

        Raises:
            WorldFileError: ファイルが存在しない・スキーマに合わない場合
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise WorldFileError(f"ワールドファイルが見つかりません: {file_path}")

        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
            if not isinstance(data, dict):
                raise ValueError("トップレベルがマッピングではありません")
            spec = WorldSpec.from_dict(data)
        except (yaml.YAMLError, KeyError, TypeError, ValueError) as e:
            raise WorldFileError(f"ワールドファイルが壊れています: {file_path}: {e}") from e

        FileHandler.logger.info(f"ワールドファイル読み込み完了: {file_path}")
        return spec

    # 実行記録

    @staticmethod
    def save_runs_csv(records: Sequence[RunRecord], file_path: PathLike) -> Path:
        """runs.csv を保存"""
        rows = [
            [
                record.run_id,
                record.world_id,
                "" if record.world_seed is None else record.world_seed,
                record.range_policy.label,
                record.group_size,
                record.status.value,
                record.n_mobbing,
                f"{record.participation_pct:.2f}",
                _time(record.first_call_time)
            ]
            for record in records
        ]
        return FileHandler._write_frame(pd.DataFrame(rows, columns=RUNS_COLUMNS), file_path)

    @staticmethod
    def save_robots_csv(records: Sequence[RunRecord], file_path: PathLike) -> Path:
        """robots.csv を保存（モビングしなかったロボットの決定時刻は空欄）"""
        rows = []
        for record in records:
            for robot_id in sorted(record.decision_times):
                decision = record.decision_times[robot_id]
                rows.append([record.run_id, robot_id, 0 if decision is None else 1, _time(decision)])
        return FileHandler._write_frame(pd.DataFrame(rows, columns=ROBOTS_COLUMNS), file_path)

    @staticmethod
    def load_runs_csv(file_path: PathLike) -> pd.DataFrame:
        """runs.csv を読み込み

        Raises:
            RunsFileError: ファイルが存在しない・列が不足している場合
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise RunsFileError(f"ファイルが見つかりません: {file_path}")

        try:
            df = pd.read_csv(file_path, dtype={'range_m': str, 'status': str})
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise RunsFileError(f"CSVを読み込めません: {file_path}: {e}") from e

        required = ['world_id', 'range_m', 'group_size', 'status', 'n_mobbing']
        missing = [column for column in required if column not in df.columns]
        if missing:
            raise RunsFileError(f"必須列が不足しています: {', '.join(missing)}")
        if df[required].isna().any().any():
            raise RunsFileError(f"必須列に空欄があります: {file_path}")

        FileHandler.logger.info(f"CSVファイル読み込み完了: {file_path} ({len(df)}行)")
        return df

    @staticmethod
    def load_robots_csv(file_path: PathLike) -> pd.DataFrame:
        """robots.csv を読み込み"""
        file_path = Path(file_path)
        if not file_path.exists():
            raise RunsFileError(f"ファイルが見つかりません: {file_path}")
        try:
            df = pd.read_csv(file_path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise RunsFileError(f"CSVを読み込めません: {file_path}: {e}") from e
        if list(df.columns) != ROBOTS_COLUMNS:
            raise RunsFileError(f"列構成が一致しません: {list(df.columns)}")
        return df

    # イベントログ

    @staticmethod
    def save_events_jsonl(events: Iterable[Event], file_path: PathLike) -> Path:
        """イベントログを JSONL で保存"""
        file_path = FileHandler._prepare(file_path)
        count = 0
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            for event in events:
                f.write(json.dumps(event.to_dict(), ensure_ascii=False) + "\n")
                count += 1
        FileHandler.logger.info(f"イベントログ保存完了: {file_path} ({count}件)")
        return file_path

    @staticmethod
    def load_events_jsonl(file_path: PathLike) -> List[Event]:
        """イベントログを読み込み"""
        events = []
        with open(file_path, 'r', encoding='utf-8') as f:
            for line in f:
                if line.strip():
                    events.append(Event.from_dict(json.loads(line)))
        return events

    # 姿勢トレース

    @staticmethod
    def save_trace_csv(rows: Iterable[TraceRow], file_path: PathLike) -> Path:
        """姿勢トレースを保存"""
        data = [
            [row.tick, row.robot_id, f"{row.x:.6f}", f"{row.y:.6f}", f"{row.heading:.6f}", row.mode]
            for row in rows
        ]
        return FileHandler._write_frame(pd.DataFrame(data, columns=TRACE_COLUMNS), file_path)

    @staticmethod
    def load_trace_csv(file_path: PathLike) -> pd.DataFrame:
        """姿勢トレースを読み込み

        Raises:
            TraceFileError: ファイルが存在しない・列構成が一致しない場合
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise TraceFileError(f"トレースファイルが見つかりません: {file_path}")

        try:
            df = pd.read_csv(file_path, dtype={'mode': str})
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise TraceFileError(f"トレースファイルを読み込めません: {file_path}: {e}") from e
        except pd.errors.EmptyDataError:
            return pd.DataFrame(columns=TRACE_COLUMNS)

        if list(df.columns) != TRACE_COLUMNS:
            raise TraceFileError(f"トレースの列構成が一致しません: {list(df.columns)}")
        if df[['tick', 'robot_id', 'x', 'y', 'heading']].isna().any().any():
            raise TraceFileError(f"トレースに空欄があります: {file_path}")
        return df

    @staticmethod
    def save_text(text: str, file_path: PathLike) -> Path:
        """テキストを保存"""
        file_path = FileHandler._prepare(file_path)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        FileHandler.logger.info(f"テキストファイル保存完了: {file_path}")
        return file_path
