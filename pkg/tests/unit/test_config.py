"""設定管理のユニットテスト"""
import pytest
import yaml

from src.utils.config import SystemConfig
from src.models.messages import RangePolicy

pytestmark = pytest.mark.unit


class TestSystemConfig:
    """SystemConfigのユニットテスト"""

    def test_初期化_ファイルなしはデフォルト(self, temp_dir):
        # Given
        path = temp_dir / "missing.yaml"

        # When
        config = SystemConfig(str(path))

        # Then
        assert config.get('controller.i_th') == 12.0
        assert config.get('experiment.master_seed') == 2019
        assert config.validate()

    def test_デフォルトは共有されない(self, temp_dir):
        first = SystemConfig(str(temp_dir / "a.yaml"))
        first.set('controller.i_th', 99.0)

        second = SystemConfig(str(temp_dir / "b.yaml"))

        assert second.get('controller.i_th') == 12.0
        assert SystemConfig.DEFAULT_CONFIG['controller']['i_th'] == 12.0

    def test_部分的な設定をマージ(self, temp_dir):
        # Given
        path = temp_dir / "config.yaml"
        path.write_text("controller:\n  i_th: 8.0\nsimulation:\n  duration: 5.0\n", encoding='utf-8')

        # When
        config = SystemConfig(str(path))

        # Then
        assert config.get('controller.i_th') == 8.0
        assert config.get('controller.k_fear') == 5.0
        assert config.get('simulation.duration') == 5.0
        assert config.get('simulation.dt') == 0.032

    def test_壊れたYAMLはデフォルト(self, temp_dir):
        path = temp_dir / "broken.yaml"
        path.write_text("controller: [1, 2\n", encoding='utf-8')

        config = SystemConfig(str(path))

        assert config.get('controller.i_th') == 12.0

    def test_ドット記法_存在しないキー(self, temp_dir):
        config = SystemConfig(str(temp_dir / "none.yaml"))
        assert config.get('controller.unknown', 'x') == 'x'
        assert config.get('nothing.at.all') is None

    def test_保存と再読み込み(self, temp_dir):
        path = temp_dir / "saved.yaml"
        config = SystemConfig(str(path))
        config.set('experiment.n_worlds', 4)

        config.save()

        reloaded = SystemConfig(str(path))
        assert reloaded.get('experiment.n_worlds') == 4
        with open(path, encoding='utf-8') as f:
            assert yaml.safe_load(f)['experiment']['n_worlds'] == 4

    @pytest.mark.parametrize("key, value", [
        ('simulation.dt', 0.0),
        ('simulation.duration', 0.01),
        ('controller.omega_base', 7.0),
        ('controller.k_fear', 1.0),
        ('controller.k_mob', 1.0),
        ('controller.i_th', -1.0),
        ('world.n_robots', 0),
        ('experiment.jobs', 0),
        ('simulation.wheel_radius', 0.0),
        ('simulation.axle_length', -0.053),
        ('simulation.collision_passes', 0),
        ('simulation.collision_max_passes', 2),
    ])
    def test_不正な値は検証エラー(self, temp_dir, key, value):
        config = SystemConfig(str(temp_dir / "none.yaml"))
        config.set(key, value)
        assert config.validate() is False

    def test_型付きの取得(self, temp_dir):
        config = SystemConfig(str(temp_dir / "none.yaml"))
        config.set('controller.call_once', True)
        config.set('simulation.duration', 2.0)

        sim = config.get_sim_config(RangePolicy.of_meters(0.5))

        assert sim.duration == 2.0
        assert sim.n_ticks == 62
        assert sim.range_policy.meters == 0.5
        assert sim.controller_params.call_once is True
        assert sim.sensor_rig.light_bearings_deg == (17.0, 47.0, 90.0, 150.0)

    def test_実験設定とワールド設定(self, temp_dir):
        config = SystemConfig(str(temp_dir / "none.yaml"))

        experiment = config.get_experiment_config()
        settings = config.get_world_settings()

        assert experiment['n_worlds'] == 10
        assert experiment['n_robots'] == 10
        assert experiment['n_boxes'] == 3
        assert settings.max_placement_attempts == 10000
        assert settings.arena_side == 1.0

    def test_検証を通る設定はSimConfigになる(self, temp_dir):
        config = SystemConfig(str(temp_dir / "none.yaml"))
        config.set('simulation.collision_passes', 8)
        config.set('simulation.collision_max_passes', 8)

        assert config.validate()
        sim = config.get_sim_config()
        assert (sim.collision_passes, sim.collision_max_passes) == (8, 8)
        assert SystemConfig(str(temp_dir / "none.yaml")).get_sim_config().collision_max_passes == 256
