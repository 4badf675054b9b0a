# src/core/harness.py

import logging
from datetime import datetime
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Any, Optional, Sequence, Tuple

from tqdm import tqdm

from ..models.world import WorldSpec
from ..models.sim_config import SimConfig
from ..models.run_record import (
    Condition, CANONICAL_CONDITIONS, RunRecord, SweepResult, PhysicsAudit
)
from .world_generator import WorldSettings, generate_world, reduce_to_group
from .engine import run


@dataclass(frozen=True)
class _RunTask:
    """ワーカーに渡す1観測分の入力"""
    index: int
    world: WorldSpec
    condition: Condition
    config: SimConfig
    audit: bool


def _execute(task: _RunTask) -> Tuple[int, RunRecord, Optional[PhysicsAudit]]:
    """1観測を実行（プロセスプールから呼ばれる）"""
    world = reduce_to_group(task.world, task.condition.group_size)
    outcome = run(world, task.config.with_range(task.condition.range_policy), audit=task.audit)
    return task.index, outcome.record, outcome.audit


class ExperimentHarness:
    """被験者内計画の実験（ワールド × 条件）を実行するクラス"""

    def __init__(self, config: SimConfig, settings: Optional[WorldSettings] = None,
                 n_robots: int = 10, n_boxes: int = 3, max_workers: int = 1,
                 show_progress: bool = False, audit: bool = False):
        """初期化

        Args:
            config: シミュレーション設定（通信範囲は条件ごとに上書きされる）
            settings: ワールド生成設定
            n_robots: 生成するワールドのロボット数
            n_boxes: 生成するワールドの箱の数
            max_workers: 並列実行数（1なら逐次実行）
            show_progress: 進捗バーを表示するか
            audit: 物理不変条件を監査するか

        Raises:
            ValueError: 無効な設定値の場合
        """
        if max_workers < 1:
            raise ValueError(f"max_workersは1以上である必要があります: {max_workers}")

        self.config = config
        self.settings = settings or WorldSettings()
        self.n_robots = n_robots
        self.n_boxes = n_boxes
        self.max_workers = max_workers
        self.show_progress = show_progress
        self.audit = audit

        self.logger = logging.getLogger(__name__)

        # 処理統計
        self.processing_stats: Dict[str, Any] = {
            "start_time": None,
            "end_time": None,
            "total_runs": 0,
            "completed_runs": 0
        }

    def build_worlds(self, master_seed: int, n_worlds: int) -> List[WorldSpec]:
        """シード master_seed+1 〜 master_seed+n_worlds のワールドを生成"""
        if n_worlds < 1:
            raise ValueError(f"n_worldsは1以上である必要があります: {n_worlds}")

        return [
            generate_world(master_seed + world_id, self.n_robots, self.n_boxes,
                           self.settings, world_id=world_id)
            for world_id in range(1, n_worlds + 1)
        ]

    def validate_conditions(self, conditions: Sequence[Condition]) -> None:
        """条件の重複・群れサイズの上限をチェック"""
        if not conditions:
            raise ValueError("条件が空です")
        if len(set(conditions)) != len(conditions):
            raise ValueError("条件が重複しています")
        for condition in conditions:
            if condition.group_size > self.n_robots:
                raise ValueError(
                    f"群れサイズ{condition.group_size}がワールドのロボット数{self.n_robots}を超えています"
                )

    def sweep(self, master_seed: int, n_worlds: int = 10,
              conditions: Sequence[Condition] = CANONICAL_CONDITIONS) -> SweepResult:
        """全ワールド × 全条件を実行

        結果はワールド順 → 条件順に並べ、run_id を1から振る。

        Args:
            master_seed: マスターシード
            n_worlds: ワールド数（1以上）
            conditions: 実験条件

        Returns:
            SweepResult: スイープ結果

        Raises:
            ValueError: 引数が不正な場合
            PlacementExhaustedError: ワールド生成に失敗した場合
        """
        conditions = tuple(conditions)
        self.validate_conditions(conditions)
        worlds = self.build_worlds(master_seed, n_worlds)

        tasks = [
            _RunTask(index, world, condition, self.config, self.audit)
            for index, (world, condition) in enumerate(
                (world, condition) for world in worlds for condition in conditions
            )
        ]

        self.processing_stats["start_time"] = datetime.now()
        self.processing_stats["total_runs"] = len(tasks)
        self.processing_stats["completed_runs"] = 0
        self.logger.info(
            f"スイープ開始: master_seed={master_seed}, ワールド{n_worlds}個 × 条件{len(conditions)}個"
        )

        slots: List[Optional[Tuple[RunRecord, Optional[PhysicsAudit]]]] = [None] * len(tasks)

        with tqdm(total=len(tasks), desc="sweep", unit="run", disable=not self.show_progress) as progress:
            if self.max_workers == 1:
                for task in tasks:
                    index, record, audit = _execute(task)
                    slots[index] = (record, audit)
                    self._on_complete(progress)
            else:
                with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
                    future_to_task = {executor.submit(_execute, task): task for task in tasks}

                    # 完了順に受け取り、後で正規の順序に並べ直す
                    for future in as_completed(future_to_task):
                        index, record, audit = future.result()
                        slots[index] = (record, audit)
                        self._on_complete(progress)

        records: List[RunRecord] = []
        aggregate = PhysicsAudit() if self.audit else None
        for run_id, slot in enumerate(slots, 1):
            record, audit = slot
            record.run_id = run_id
            records.append(record)
            if aggregate is not None and audit is not None:
                aggregate.merge(audit)

        self.processing_stats["end_time"] = datetime.now()
        elapsed = (self.processing_stats["end_time"] - self.processing_stats["start_time"]).total_seconds()
        self.logger.info(f"スイープ完了: {len(records)}件 ({elapsed:.1f}秒)")

        return SweepResult(
            records=records,
            master_seed=master_seed,
            config_snapshot=self.snapshot(n_worlds),
            conditions=conditions,
            audit=aggregate
        )

    def _on_complete(self, progress: tqdm) -> None:
        self.processing_stats["completed_runs"] += 1
        progress.update(1)
        done = self.processing_stats["completed_runs"]
        total = self.processing_stats["total_runs"]
        if done % 10 == 0 or done == total:
            self.logger.info(f"進捗: {done}/{total}")

    def snapshot(self, n_worlds: int) -> Dict[str, Any]:
        """結果に添付する設定のスナップショット"""
        return {
            'n_worlds': n_worlds,
            'n_robots': self.n_robots,
            'n_boxes': self.n_boxes,
            'simulation': self.config.to_dict()
        }

