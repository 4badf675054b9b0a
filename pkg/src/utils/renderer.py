# src/utils/renderer.py

import math
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle, Circle as CirclePatch
import numpy as np
import pandas as pd

from ..models.world import WorldSpec, ROBOT_RADIUS
from ..models.controller_state import BehaviorMode, ControllerParams
from ..models.sensors import SensorRig
from ..core.errors import TraceFileError
from ..core.sensing import calibrate_detection_radius

# 1000×1000 の SVG ユーザー単位（72 dpi のインチ換算）
VIEWPORT_UNITS = 1000

_MODE_COLORS = {
    BehaviorMode.AVOIDING.value: "#4c72b0",
    BehaviorMode.MOBBING.value: "#c44e52",
}

# 出力を決定的にするための SVG 設定
_SVG_RC = {
    'svg.hashsalt': 'mobsim',
    'svg.fonttype': 'none',
    'path.simplify': False,
}


class TrajectoryRenderer:
    """軌跡・交互作用図の SVG 出力クラス"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """初期化

        Args:
            config: 設定辞書。以下のキーを含む：
                - controller: ControllerParams（検出半径の算出に使用）
                - sensor_rig: SensorRig
        """
        config = config or {}
        self.params: ControllerParams = config.get('controller') or ControllerParams()
        self.rig: SensorRig = config.get('sensor_rig') or SensorRig()
        self.logger = logging.getLogger(__name__)

    def detection_radius(self, intensity: float) -> Optional[float]:
        """光源の検出半径（点線の円）"""
        return calibrate_detection_radius(self.params, self.rig, intensity=intensity)

    @staticmethod
    def _check_ids(trace: pd.DataFrame, world: WorldSpec) -> None:
        if trace.empty:
            return
        unknown = sorted(set(int(i) for i in trace['robot_id'].unique()) - set(world.robot_ids))
        if unknown:
            raise TraceFileError(
                f"トレースのロボットIDがワールドと一致しません: {unknown} (ワールドは1〜{world.n_robots})"
            )

    def render_trajectories(self, trace: pd.DataFrame, world: WorldSpec,
                            output_path: Union[str, Path]) -> Path:
        """アリーナ・箱・光源・軌跡・最終姿勢を描画

        Raises:
            TraceFileError: トレースのロボットIDがワールドに存在しない場合
        """
        self._check_ids(trace, world)
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        side = world.arena_side
        inches = VIEWPORT_UNITS / 72.0

        with matplotlib.rc_context(_SVG_RC):
            fig = plt.figure(figsize=(inches, inches), dpi=72)
            ax = fig.add_axes([0.0, 0.0, 1.0, 1.0])
            ax.set_xlim(0.0, side)
            ax.set_ylim(0.0, side)
            ax.set_aspect('equal')
            ax.axis('off')

            ax.add_patch(Rectangle((0.0, 0.0), side, side, fill=False, edgecolor="black", linewidth=2))

            for box in world.boxes:
                corner = box.min_corner
                size = 2.0 * box.half_extent
                ax.add_patch(Rectangle((corner.x, corner.y), size, size,
                                       facecolor="#7f7f7f", edgecolor="black"))

            light = world.light.position
            ax.add_patch(CirclePatch((light.x, light.y), 0.02, facecolor="#f2c14e", edgecolor="#b8860b"))
            radius = self.detection_radius(world.light.intensity)
            if radius is not None:
                ax.add_patch(CirclePatch((light.x, light.y), radius, fill=False,
                                         edgecolor="#b8860b", linestyle="--", linewidth=1))

            if not trace.empty:
                ordered = trace.sort_values(['robot_id', 'tick'], kind='mergesort')
                for robot_id, rows in ordered.groupby('robot_id', sort=True):
                    ax.plot(rows['x'].to_numpy(), rows['y'].to_numpy(),
                            color="#555555", linewidth=0.8)

                    final = rows.iloc[-1]
                    color = _MODE_COLORS.get(str(final['mode']), "#999999")
                    ax.add_patch(CirclePatch((final['x'], final['y']), ROBOT_RADIUS,
                                             facecolor=color, edgecolor="black"))
                    heading = float(final['heading'])
                    ax.plot([final['x'], final['x'] + ROBOT_RADIUS * math.cos(heading)],
                            [final['y'], final['y'] + ROBOT_RADIUS * math.sin(heading)],
                            color="black", linewidth=1)
                    ax.text(final['x'], final['y'], str(int(robot_id)), fontsize=8,
                            ha='center', va='center', color="white")

            fig.savefig(output_path, format='svg', metadata={'Date': None})
            plt.close(fig)

        self.logger.info(f"軌跡図を保存しました: {output_path}")
        return output_path

    def render_interaction(self, by_condition: pd.DataFrame,
                           output_path: Union[str, Path]) -> Path:
        """通信範囲ごとの平均参加率（群れサイズ別の折れ線、誤差棒は95%信頼区間）"""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)

        ranges = list(dict.fromkeys(by_condition['range_m']))
        positions = {label: index for index, label in enumerate(ranges)}

        with matplotlib.rc_context(_SVG_RC):
            fig, ax = plt.subplots(figsize=(8, 5))

            for size, rows in by_condition.groupby('group_size', sort=False):
                x = np.array([positions[label] for label in rows['range_m']], dtype=float)
                mean = rows['mean'].to_numpy(dtype=float)
                low = np.nan_to_num(mean - rows['ci_low'].to_numpy(dtype=float))
                high = np.nan_to_num(rows['ci_high'].to_numpy(dtype=float) - mean)
                ax.errorbar(x, mean, yerr=[low, high], marker='o', capsize=4,
                            label=f"group size {int(size)}")

            ax.set_xticks(range(len(ranges)))
            ax.set_xticklabels(ranges)
            ax.set_xlabel("call range [m]")
            ax.set_ylabel("participation [%]")
            ax.set_ylim(-5, 105)
            ax.legend()
            ax.grid(True, alpha=0.3)

            fig.savefig(output_path, format='svg', metadata={'Date': None})
            plt.close(fig)

        self.logger.info(f"交互作用図を保存しました: {output_path}")
        return output_path
