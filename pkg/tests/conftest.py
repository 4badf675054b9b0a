"""pytestの設定とフィクスチャ"""

import math
import sys
import pytest
from pathlib import Path

# プロジェクトルートをPythonパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.models.geometry import Vec2, Pose, AxisBox
from src.models.world import WorldSpec, LightSource
from src.models.sim_config import SimConfig
from src.models.messages import RangePolicy


@pytest.fixture
def temp_dir(tmp_path):
    """一時ディレクトリ"""
    return tmp_path


@pytest.fixture
def empty_world():
    """箱もロボットもない 1m 四方のワールド（光源は中央）"""
    return WorldSpec(
        arena_side=1.0,
        boxes=(),
        light=LightSource(Vec2(0.5, 0.5), 2.0),
        spawns=()
    )


@pytest.fixture
def handshake_world():
    """2台のロボットと光源を一直線に並べたワールド

    ロボット#2（0.5, 0.5）は光源に正対して閾値を超え、
    ロボット#1（0.5, 0.3）は光源に背を向けて閾値を下回る。
    """
    return WorldSpec(
        arena_side=1.0,
        boxes=(),
        light=LightSource(Vec2(0.5, 0.8), 2.0),
        spawns=(
            Pose(Vec2(0.5, 0.3), -math.pi / 2),
            Pose(Vec2(0.5, 0.5), math.pi / 2),
        ),
        world_id=1
    )


@pytest.fixture
def boxed_world():
    """箱1個・ロボット3台のワールド"""
    return WorldSpec(
        arena_side=1.0,
        boxes=(AxisBox(Vec2(0.5, 0.5), 0.05),),
        light=LightSource(Vec2(0.8, 0.8), 2.0),
        spawns=(
            Pose(Vec2(0.2, 0.2), 0.0),
            Pose(Vec2(0.2, 0.8), 0.0),
            Pose(Vec2(0.8, 0.2), math.pi / 2),
        ),
        world_id=1,
        seed=11
    )


@pytest.fixture
def short_config():
    """短時間（1秒）のシミュレーション設定"""
    return SimConfig(duration=1.0, range_policy=RangePolicy.infinite())
