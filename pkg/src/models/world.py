# src/models/world.py

from dataclasses import dataclass
from typing import Dict, List, Any, Optional, Tuple

from .geometry import Vec2, Pose, AxisBox

# e-puck 相当の寸法（m）
ROBOT_RADIUS = 0.037
BOX_HALF_EXTENT = 0.05
DEFAULT_ARENA_SIDE = 1.0
DEFAULT_LIGHT_INTENSITY = 2.0


@dataclass(frozen=True)
class LightSource:
    """点光源（捕食者）。衝突判定は持たない"""
    position: Vec2
    intensity: float = DEFAULT_LIGHT_INTENSITY

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"光源強度は正の値である必要があります: {self.intensity}")

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.position.x, 'y': self.position.y, 'intensity': self.intensity}


@dataclass(frozen=True)
class WorldSpec:
    """ワールド定義（不変）

    座標系は [0, arena_side] × [0, arena_side]。壁はこの正方形の4辺。
    spawns はロボットID順（#1, #2, ...）。
    """
    arena_side: float
    boxes: Tuple[AxisBox, ...]
    light: LightSource
    spawns: Tuple[Pose, ...]
    world_id: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.arena_side > 0:
            raise ValueError(f"arena_sideは正の値である必要があります: {self.arena_side}")
        object.__setattr__(self, 'boxes', tuple(self.boxes))
        object.__setattr__(self, 'spawns', tuple(self.spawns))

    @property
    def n_robots(self) -> int:
        return len(self.spawns)

    @property
    def robot_ids(self) -> List[int]:
        return list(range(1, len(self.spawns) + 1))

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換（ワールドファイルのスキーマ）"""
        return {
            'world_id': self.world_id,
            'seed': self.seed,
            'arena_side': self.arena_side,
            'light': self.light.to_dict(),
            'boxes': [box.to_dict() for box in self.boxes],
            'robots': [
                {'id': i, 'x': pose.position.x, 'y': pose.position.y, 'heading': pose.heading}
                for i, pose in enumerate(self.spawns, 1)
            ]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WorldSpec':
        """辞書から作成

        Raises:
            KeyError, TypeError, ValueError: スキーマに合わない場合
        """
        light_data = data['light']
        robots = sorted(data.get('robots') or [], key=lambda r: int(r['id']))
        expected_ids = list(range(1, len(robots) + 1))
        if [int(r['id']) for r in robots] != expected_ids:
            raise ValueError("ロボットIDは1から連番である必要があります")

        return cls(
            arena_side=float(data.get('arena_side', DEFAULT_ARENA_SIDE)),
            boxes=tuple(
                AxisBox(Vec2(float(b['x']), float(b['y'])), float(b.get('half', BOX_HALF_EXTENT)))
                for b in (data.get('boxes') or [])
            ),
            light=LightSource(
                position=Vec2(float(light_data['x']), float(light_data['y'])),
                intensity=float(light_data.get('intensity', DEFAULT_LIGHT_INTENSITY))
            ),
            spawns=tuple(
                Pose(Vec2(float(r['x']), float(r['y'])), float(r['heading']))
                for r in robots
            ),
            world_id=int(data.get('world_id') or 0),
            seed=None if data.get('seed') is None else int(data['seed'])
        )
