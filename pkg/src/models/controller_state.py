# src/models/controller_state.py

from dataclasses import dataclass
from typing import Dict, Any, Optional
from enum import Enum


class BehaviorMode(Enum):
    """行動モード（MOBBING は吸収状態）"""
    AVOIDING = "avoiding"
    MOBBING = "mobbing"


@dataclass(frozen=True)
class ControllerState:
    """ロボット1台分のコントローラ状態"""
    mode: BehaviorMode = BehaviorMode.AVOIDING
    has_called: bool = False
    mob_decision_time: Optional[float] = None

    @property
    def is_mobbing(self) -> bool:
        return self.mode is BehaviorMode.MOBBING

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode.value,
            'has_called': self.has_called,
            'mob_decision_time': self.mob_decision_time
        }


@dataclass(frozen=True)
class ControllerParams:
    """ブライテンベルグ制御則のパラメータ

    ゲインの単位は rad/s（光量は I_sat で正規化した値、近接は 0〜1）。
    """
    omega_base: float = 4.0
    omega_max: float = 6.28
    k_obs: float = 1.5
    k_fear: float = 5.0
    k_mob: float = 6.0
    i_th: float = 12.0
    i_sat: float = 50.0
    call_once: bool = False

    def __post_init__(self):
        if not 0 < self.omega_base <= self.omega_max:
            raise ValueError(
                f"0 < omega_base <= omega_max を満たす必要があります: {self.omega_base}, {self.omega_max}"
            )
        # 捕食者への反応は障害物回避より強くなければならない
        if not self.k_fear > self.k_obs:
            raise ValueError(f"k_fear は k_obs より大きい必要があります: {self.k_fear} <= {self.k_obs}")
        if not self.k_mob > self.k_obs:
            raise ValueError(f"k_mob は k_obs より大きい必要があります: {self.k_mob} <= {self.k_obs}")
        if self.k_obs < 0:
            raise ValueError(f"k_obs は0以上である必要があります: {self.k_obs}")
        if not self.i_th > 0:
            raise ValueError(f"i_th は正の値である必要があります: {self.i_th}")
        if not self.i_sat > 0:
            raise ValueError(f"i_sat は正の値である必要があります: {self.i_sat}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'omega_base': self.omega_base,
            'omega_max': self.omega_max,
            'k_obs': self.k_obs,
            'k_fear': self.k_fear,
            'k_mob': self.k_mob,
            'i_th': self.i_th,
            'i_sat': self.i_sat,
            'call_once': self.call_once
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ControllerParams':
        known = cls().to_dict()
        values = {key: data[key] for key in known if key in data}
        return cls(**values)


@dataclass(frozen=True)
class WheelCommand:
    """左右車輪の角速度指令（rad/s）"""
    omega_left: float
    omega_right: float
