"""SVG描画のユニットテスト"""
import xml.etree.ElementTree as ET

import pandas as pd
import pytest

from src.core.engine import run
from src.core.errors import TraceFileError
from src.utils.file_handler import FileHandler, TRACE_COLUMNS
from src.utils.renderer import TrajectoryRenderer, VIEWPORT_UNITS
from src.analysis.summary import summarize_frame

pytestmark = pytest.mark.unit


@pytest.fixture
def renderer():
    return TrajectoryRenderer()


@pytest.fixture
def trace_frame(temp_dir, boxed_world, short_config):
    outcome = run(boxed_world, short_config, trace_stride=1)
    path = FileHandler.save_trace_csv(outcome.trace, temp_dir / "trace.csv")
    return FileHandler.load_trace_csv(path)


class TestTrajectoryRenderer:
    """TrajectoryRenderer のテスト"""

    def test_軌跡図はSVG(self, renderer, trace_frame, boxed_world, temp_dir):
        # When
        path = renderer.render_trajectories(trace_frame, boxed_world, temp_dir / "world.svg")

        # Then
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")
        assert root.attrib['viewBox'] == f"0 0 {VIEWPORT_UNITS} {VIEWPORT_UNITS}"

    def test_同じ入力なら同じバイト列(self, renderer, trace_frame, boxed_world, temp_dir):
        first = renderer.render_trajectories(trace_frame, boxed_world, temp_dir / "a.svg")
        second = renderer.render_trajectories(trace_frame, boxed_world, temp_dir / "b.svg")
        assert first.read_bytes() == second.read_bytes()

    def test_ロボットIDの文字(self, renderer, trace_frame, boxed_world, temp_dir):
        path = renderer.render_trajectories(trace_frame, boxed_world, temp_dir / "world.svg")
        text = path.read_text(encoding='utf-8')
        for robot_id in boxed_world.robot_ids:
            assert f">{robot_id}<" in text

    def test_空のトレースでも描画(self, renderer, boxed_world, temp_dir):
        empty = pd.DataFrame(columns=TRACE_COLUMNS)
        path = renderer.render_trajectories(empty, boxed_world, temp_dir / "empty.svg")
        assert ET.parse(path).getroot().tag.endswith("svg")

    def test_ワールドにないロボット(self, renderer, trace_frame, handshake_world, temp_dir):
        with pytest.raises(TraceFileError):
            renderer.render_trajectories(trace_frame, handshake_world, temp_dir / "bad.svg")

    def test_検出半径(self, renderer):
        radius = renderer.detection_radius(2.0)
        assert 0.4 <= radius <= 0.7


class TestInteractionPlot:
    """交互作用図のテスト"""

    def test_交互作用図(self, renderer, temp_dir):
        runs = pd.DataFrame({
            'run_id': range(1, 13),
            'world_id': [1] * 6 + [2] * 6,
            'range_m': ["inf", "inf", "0.5", "0.5", "0.1", "0.1"] * 2,
            'group_size': [10, 3] * 6,
            'status': ["unanimous"] * 2 + ["partial"] * 4 + ["unanimous"] * 2 + ["failed"] * 4,
            'n_mobbing': [10, 3, 5, 1, 2, 1, 10, 3, 0, 0, 0, 0],
        })
        summary = summarize_frame(runs)

        path = renderer.render_interaction(summary.by_condition, temp_dir / "interaction.svg")

        text = path.read_text(encoding='utf-8')
        assert ET.fromstring(text).tag.endswith("svg")
        assert "group size 10" in text
