# src/utils/config.py

import copy
import yaml
from pathlib import Path
from typing import Any, Dict, Optional
import logging

from ..models.messages import RangePolicy
from ..models.controller_state import ControllerParams
from ..models.sensors import SensorRig
from ..models.sim_config import SimConfig
from ..core.world_generator import WorldSettings


class SystemConfig:
    """システム設定管理クラス"""

    DEFAULT_CONFIG = {
        'world': {
            'arena_side': 1.0,
            'n_robots': 10,
            'n_boxes': 3,
            'light_intensity': 2.0,
            'box_half_extent': 0.05,
            'light_placement_radius': 0.02,
            'wall_clearance': 0.01,
            'body_clearance': 0.02,
            'max_placement_attempts': 10000
        },
        'sensing': {
            'light_bearings_deg': [17.0, 47.0, 90.0, 150.0],
            'prox_bearings_deg': [17.0, 47.0, 90.0],
            'mount_radius': 0.037,
            'prox_range': 0.05,
            'd_min': 0.01
        },
        'controller': {
            'omega_base': 4.0,
            'omega_max': 6.28,
            'k_obs': 1.5,
            'k_fear': 5.0,
            'k_mob': 6.0,
            'i_th': 12.0,
            'i_sat': 50.0,
            'call_once': False
        },
        'simulation': {
            'dt': 0.032,
            'duration': 60.0,
            'wheel_radius': 0.0205,
            'axle_length': 0.053,
            'collision_passes': 4,
            'collision_max_passes': 256
        },
        'experiment': {
            'master_seed': 2019,
            'n_worlds': 10,
            'jobs': 1,
            'trace_stride': 1,
            'show_progress': True
        },
        'logging': {
            'level': 'INFO',
            'file': '',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        }
    }

    def __init__(self, config_path: str = "config.yaml"):
        self.config_path = Path(config_path)
        self.logger = logging.getLogger(__name__)
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """設定ファイルを読み込み"""
        if not self.config_path.exists():
            self.logger.info(f"設定ファイルが見つかりません。デフォルト設定を使用します: {self.config_path}")
            return copy.deepcopy(self.DEFAULT_CONFIG)

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}

            if not isinstance(config, dict):
                raise ValueError("設定ファイルのトップレベルはマッピングである必要があります")

            # デフォルト設定とマージ
            return self._merge_configs(self.DEFAULT_CONFIG, config)

        except Exception as e:
            self.logger.error(f"設定ファイル読み込みエラー: {e}")
            self.logger.info("デフォルト設定を使用します")
            return copy.deepcopy(self.DEFAULT_CONFIG)

    def _merge_configs(self, default: Dict, user: Dict) -> Dict:
        """設定をマージ"""
        result = copy.deepcopy(default)

        for key, value in user.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def get(self, key_path: str, default: Any = None) -> Any:
        """設定値を取得（ドット記法対応）"""
        value = self.config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, key_path: str, value: Any):
        """設定値を設定"""
        keys = key_path.split('.')
        config_ref = self.config

        # 最後のキー以外まで辿る
        for key in keys[:-1]:
            if key not in config_ref or not isinstance(config_ref[key], dict):
                config_ref[key] = {}
            config_ref = config_ref[key]

        config_ref[keys[-1]] = value

    def save(self, path: Optional[str] = None):
        """設定ファイルを保存"""
        target = Path(path) if path else self.config_path
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, 'w', encoding='utf-8') as f:
                yaml.safe_dump(self.config, f, default_flow_style=False,
                               allow_unicode=True, indent=2, sort_keys=False)
            self.logger.info(f"設定ファイルを保存しました: {target}")
        except Exception as e:
            self.logger.error(f"設定ファイル保存エラー: {e}")

    def validate(self) -> bool:
        """設定の妥当性をチェック"""
        errors = []

        dt = self.get('simulation.dt', 0.032)
        duration = self.get('simulation.duration', 60.0)
        if not dt > 0:
            errors.append(f"simulation.dt は正の値で設定してください: {dt}")
        elif not duration >= dt:
            errors.append(f"simulation.duration は dt 以上で設定してください: {duration}")

        for key in ('simulation.wheel_radius', 'simulation.axle_length'):
            if not self.get(key, 1.0) > 0:
                errors.append(f"{key} は正の値で設定してください")

        passes = self.get('simulation.collision_passes', 4)
        max_passes = self.get('simulation.collision_max_passes', 256)
        if not passes >= 1:
            errors.append(f"simulation.collision_passes は1以上で設定してください: {passes}")
        elif not max_passes >= passes:
            errors.append(
                f"simulation.collision_max_passes は collision_passes 以上で設定してください: {max_passes}"
            )

        omega_base = self.get('controller.omega_base', 4.0)
        omega_max = self.get('controller.omega_max', 6.28)
        if not 0 < omega_base <= omega_max:
            errors.append("controller.omega_base は 0 < omega_base <= omega_max を満たす必要があります")

        k_obs = self.get('controller.k_obs', 1.5)
        if not self.get('controller.k_fear', 5.0) > k_obs:
            errors.append("controller.k_fear は k_obs より大きく設定してください")
        if not self.get('controller.k_mob', 6.0) > k_obs:
            errors.append("controller.k_mob は k_obs より大きく設定してください")

        for key in ('controller.i_th', 'controller.i_sat'):
            if not self.get(key, 1.0) > 0:
                errors.append(f"{key} は正の値で設定してください")

        if not self.get('world.n_robots', 10) >= 1:
            errors.append("world.n_robots は1以上で設定してください")
        if not self.get('world.n_boxes', 3) >= 0:
            errors.append("world.n_boxes は0以上で設定してください")
        if not self.get('experiment.n_worlds', 10) >= 1:
            errors.append("experiment.n_worlds は1以上で設定してください")
        if not self.get('experiment.jobs', 1) >= 1:
            errors.append("experiment.jobs は1以上で設定してください")

        if errors:
            for error in errors:
                self.logger.error(f"設定エラー: {error}")
            return False

        return True

    def get_controller_params(self) -> ControllerParams:
        """制御パラメータを取得"""
        return ControllerParams.from_dict(self.get('controller', {}))

    def get_sensor_rig(self) -> SensorRig:
        """センサー配置を取得"""
        return SensorRig.from_dict(self.get('sensing', {}))

    def get_world_settings(self) -> WorldSettings:
        """ワールド生成設定を取得"""
        return WorldSettings.from_dict(self.get('world', {}))

    def get_sim_config(self, range_policy: Optional[RangePolicy] = None) -> SimConfig:
        """シミュレーション設定を取得"""
        return SimConfig(
            dt=float(self.get('simulation.dt', 0.032)),
            duration=float(self.get('simulation.duration', 60.0)),
            range_policy=range_policy or RangePolicy.infinite(),
            controller_params=self.get_controller_params(),
            sensor_rig=self.get_sensor_rig(),
            wheel_radius=float(self.get('simulation.wheel_radius', 0.0205)),
            axle_length=float(self.get('simulation.axle_length', 0.053)),
            collision_passes=int(self.get('simulation.collision_passes', 4)),
            collision_max_passes=int(self.get('simulation.collision_max_passes', 256))
        )

    def get_experiment_config(self) -> Dict[str, Any]:
        """実験設定を取得"""
        return {
            'master_seed': int(self.get('experiment.master_seed', 2019)),
            'n_worlds': int(self.get('experiment.n_worlds', 10)),
            'jobs': int(self.get('experiment.jobs', 1)),
            'trace_stride': int(self.get('experiment.trace_stride', 1)),
            'show_progress': bool(self.get('experiment.show_progress', True)),
            'n_robots': int(self.get('world.n_robots', 10)),
            'n_boxes': int(self.get('world.n_boxes', 3))
        }

    def __str__(self) -> str:
        """設定の文字列表現"""
        return f"SystemConfig(config_path={self.config_path})"

    def __repr__(self) -> str:
        return self.__str__()
