# src/core/controller.py

"""ブライテンベルグ型コントローラ

障害物回避は常時有効。捕食者（光源）に対しては回避（fear）とモビング（aggression）を
排他的に切り替え、切り替えは回避 → モビングの一方向のみ。
"""

from dataclasses import replace
from typing import List, Sequence, Tuple

from ..models.messages import Message, MessageKind, MessageOrigin
from ..models.sensors import SideReading
from ..models.controller_state import BehaviorMode, ControllerState, ControllerParams, WheelCommand


def _clamp(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


def run_protocol(state: ControllerState, light: SideReading, inbox: Sequence[Message],
                 params: ControllerParams, now: float,
                 origin: MessageOrigin) -> Tuple[ControllerState, List[Message]]:
    """モビングコール / 応答プロトコル

    1. コールを受信したら応答を返し、回避中ならモビングに切り替える
    2. そうでなく、回避中・コール済みで応答を受信したらモビングに切り替える
    3. 回避中で光量が I_th を超えたらコールを送る
    """
    outbox: List[Message] = []
    received_call = any(message.is_call for message in inbox)
    received_ack = any(message.is_ack for message in inbox)

    if received_call:
        outbox.append(origin.make(MessageKind.ACK))
        if state.mode is BehaviorMode.AVOIDING:
            state = replace(state, mode=BehaviorMode.MOBBING, mob_decision_time=now)
    elif state.mode is BehaviorMode.AVOIDING and state.has_called and received_ack:
        state = replace(state, mode=BehaviorMode.MOBBING, mob_decision_time=now)

    if state.mode is BehaviorMode.AVOIDING and light.peak > params.i_th:
        if not (params.call_once and state.has_called):
            outbox.append(origin.make(MessageKind.CALL))
            state = replace(state, has_called=True)

    return state, outbox


def wheel_command(mode: BehaviorMode, light: SideReading, prox: SideReading,
                  params: ControllerParams) -> WheelCommand:
    """対側結合の車輪則

    片側の刺激は反対側の車輪を減速（離れる）または加速（近づく）させる。
    """
    lam_left = min(1.0, light.left / params.i_sat)
    lam_right = min(1.0, light.right / params.i_sat)

    omega_left = params.omega_base - params.k_obs * prox.right
    omega_right = params.omega_base - params.k_obs * prox.left

    if mode is BehaviorMode.AVOIDING:
        omega_right -= params.k_fear * lam_left
        omega_left -= params.k_fear * lam_right
    else:
        omega_right += params.k_mob * lam_left
        omega_left += params.k_mob * lam_right

    return WheelCommand(
        omega_left=_clamp(omega_left, params.omega_max),
        omega_right=_clamp(omega_right, params.omega_max)
    )


def decide(state: ControllerState, light: SideReading, prox: SideReading,
           inbox: Sequence[Message], params: ControllerParams, now: float,
           origin: MessageOrigin) -> Tuple[ControllerState, WheelCommand, List[Message]]:
    """1ティック分の意思決定（プロトコル → モーター）

    Args:
        state: 現在のコントローラ状態
        light: 光センサーの左右合計
        prox: 近接センサーの左右合計
        inbox: このティックに配送されたメッセージ
        params: 制御パラメータ
        now: 現在時刻（秒）。モビング決定時刻として記録される
        origin: 送信メッセージに付与する送信元情報

    Returns:
        Tuple[ControllerState, WheelCommand, List[Message]]: 新しい状態・車輪指令・送信メッセージ
    """
    new_state, outbox = run_protocol(state, light, inbox, params, now, origin)
    command = wheel_command(new_state.mode, light, prox, params)
    return new_state, command, outbox
