#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
モビング行動シミュレータ メインエントリーポイント

Usage:
    python main.py gen --seed 7 --out world.yaml          # ワールド生成
    python main.py run --world world.yaml --out out/      # 1観測の実行
    python main.py sweep --out results/                   # 2×3 実験の一括実行
    python main.py analyze --runs results/runs.csv --out results/
    python main.py render --trace out/trace.csv --world world.yaml --out out/world.svg

終了コード: 0 成功, 1 引数エラー, 2 データエラー, 3 配置の試行回数超過
"""

import sys
import argparse
import itertools
import logging
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

# プロジェクトルートをパスに追加
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.utils.config import SystemConfig
from src.utils.file_handler import FileHandler
from src.utils.renderer import TrajectoryRenderer
from src.models.messages import RangePolicy
from src.models.sim_config import SimConfig
from src.models.run_record import Condition, CANONICAL_CONDITIONS
from src.core.errors import (
    UsageError, PlacementExhaustedError, WorldFileError, TraceFileError,
    IncompleteTableError, RunsFileError
)
from src.core.world_generator import generate_world, reduce_to_group
from src.core.engine import run as run_simulation
from src.core.harness import ExperimentHarness
from src.analysis.summary import summarize, format_summary
from src.analysis.report import analyze_runs, analysis_frame, format_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PLACEMENT = 3

DATA_ERRORS = (WorldFileError, TraceFileError, IncompleteTableError, RunsFileError)


class CliArgumentParser(argparse.ArgumentParser):
    """引数エラーを UsageError として送出するパーサー"""

    def error(self, message: str):
        raise UsageError(message)


def setup_logging(config: SystemConfig, verbose: bool = False):
    """ログ設定"""

    level_name = 'DEBUG' if verbose else str(config.get('logging.level', 'INFO')).upper()
    log_format = config.get('logging.format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handlers: List[logging.Handler] = []

    # コンソールハンドラー
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(log_format))
    handlers.append(console_handler)

    # ファイルハンドラー（logging.file が空なら出力しない）
    log_file = config.get('logging.file', '')
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(log_format))
        handlers.append(file_handler)

    logging.basicConfig(level=getattr(logging, level_name, logging.INFO),
                        handlers=handlers, force=True)


def _parse_range(text: str) -> RangePolicy:
    try:
        return RangePolicy.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _sim_config(config: SystemConfig, policy: Optional[RangePolicy] = None) -> SimConfig:
    try:
        return config.get_sim_config(policy)
    except ValueError as e:
        raise UsageError(f"シミュレーション設定が不正です: {e}") from e


def _parse_list(text: str, label: str) -> List[str]:
    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise UsageError(f"{label} が空です")
    return items


def build_conditions(ranges: Optional[str], group_sizes: Optional[str]) -> Sequence[Condition]:
    """--ranges / --group-sizes から条件を作成（未指定なら標準の6条件）"""
    if ranges is None and group_sizes is None:
        return CANONICAL_CONDITIONS

    if ranges is None:
        policies = list(dict.fromkeys(c.range_policy for c in CANONICAL_CONDITIONS))
    else:
        policies = [_parse_range(item) for item in _parse_list(ranges, '--ranges')]

    if group_sizes is None:
        sizes = list(dict.fromkeys(c.group_size for c in CANONICAL_CONDITIONS))
    else:
        try:
            sizes = [int(item) for item in _parse_list(group_sizes, '--group-sizes')]
        except ValueError as e:
            raise UsageError(f"--group-sizes は整数のリストで指定してください: {group_sizes}") from e

    try:
        return tuple(Condition(policy, size) for policy, size in itertools.product(policies, sizes))
    except ValueError as e:
        raise UsageError(str(e)) from e


def command_gen(args, config: SystemConfig) -> int:
    """ワールドを生成して保存"""
    robots = args.robots if args.robots is not None else int(config.get('world.n_robots', 10))
    boxes = args.boxes if args.boxes is not None else int(config.get('world.n_boxes', 3))
    if robots < 1:
        raise UsageError(f"--robots は1以上で指定してください: {robots}")
    if boxes < 0:
        raise UsageError(f"--boxes は0以上で指定してください: {boxes}")

    spec = generate_world(args.seed, robots, boxes, config.get_world_settings())
    path = FileHandler.save_world(spec, args.out)
    print(f"[OK] ワールドを保存しました: {path} (ロボット{robots}台, 箱{boxes}個)")
    return EXIT_OK


def command_run(args, config: SystemConfig) -> int:
    """1観測を実行して runs.csv・robots.csv・events.jsonl・trace.csv を出力"""
    world = FileHandler.load_world(args.world)
    policy = _parse_range(args.range)

    if args.robots is not None:
        try:
            world = reduce_to_group(world, args.robots)
        except ValueError as e:
            raise UsageError(str(e)) from e

    sim_config = _sim_config(config, policy)
    try:
        overrides = {}
        if args.duration is not None:
            overrides['duration'] = args.duration
        if args.dt is not None:
            overrides['dt'] = args.dt
        sim_config = replace(sim_config, **overrides)
    except ValueError as e:
        raise UsageError(str(e)) from e

    stride = args.trace_stride if args.trace_stride is not None else int(config.get('experiment.trace_stride', 1))
    if stride < 0:
        raise UsageError(f"--trace-stride は0以上で指定してください: {stride}")

    outcome = run_simulation(world, sim_config, audit=args.audit, trace_stride=stride)
    outcome.record.run_id = 1

    out_dir = Path(args.out)
    FileHandler.save_runs_csv([outcome.record], out_dir / "runs.csv")
    FileHandler.save_robots_csv([outcome.record], out_dir / "robots.csv")
    FileHandler.save_events_jsonl(outcome.events, out_dir / "events.jsonl")
    if stride > 0:
        FileHandler.save_trace_csv(outcome.trace, out_dir / "trace.csv")

    record = outcome.record
    print(f"[OK] 実行完了: status={record.status.value}, 参加率={record.participation_pct:.2f}%")
    if outcome.audit is not None:
        audit = outcome.audit
        print(f"   [AUDIT] 最大重なり: ロボット {audit.max_robot_overlap:.3e} m, "
              f"箱 {audit.max_box_overlap:.3e} m, アリーナ内: {'yes' if audit.contained else 'no'}")
    print(f"   [OUTPUT] {out_dir}")
    return EXIT_OK


def command_sweep(args, config: SystemConfig) -> int:
    """全ワールド × 全条件を実行して runs.csv・robots.csv・summary.txt を出力"""
    experiment = config.get_experiment_config()
    master_seed = args.master_seed if args.master_seed is not None else experiment['master_seed']
    n_worlds = args.worlds if args.worlds is not None else experiment['n_worlds']
    jobs = args.jobs if args.jobs is not None else experiment['jobs']
    if n_worlds < 1:
        raise UsageError(f"--worlds は1以上で指定してください: {n_worlds}")
    if jobs < 1:
        raise UsageError(f"--jobs は1以上で指定してください: {jobs}")

    conditions = build_conditions(args.ranges, args.group_sizes)

    sim_config = _sim_config(config)
    if args.duration is not None:
        try:
            sim_config = replace(sim_config, duration=args.duration)
        except ValueError as e:
            raise UsageError(str(e)) from e

    try:
        harness = ExperimentHarness(
            sim_config,
            settings=config.get_world_settings(),
            n_robots=experiment['n_robots'],
            n_boxes=experiment['n_boxes'],
            max_workers=jobs,
            show_progress=experiment['show_progress'] and not args.no_progress,
            audit=args.audit
        )
        harness.validate_conditions(tuple(conditions))
    except ValueError as e:
        raise UsageError(str(e)) from e

    result = harness.sweep(master_seed, n_worlds, conditions)
    summary = summarize(result)

    out_dir = Path(args.out)
    FileHandler.save_runs_csv(result.records, out_dir / "runs.csv")
    FileHandler.save_robots_csv(result.records, out_dir / "robots.csv")
    FileHandler.save_text(format_summary(summary), out_dir / "summary.txt")
    TrajectoryRenderer().render_interaction(summary.by_condition, out_dir / "interaction.svg")

    overall = summary.overall
    print(f"[OK] スイープ完了: {len(result.records)}件 (ワールド{n_worlds}個 × 条件{len(conditions)}個)")
    print(f"   unanimous={overall['unanimous']}, partial={overall['partial']}, failed={overall['failed']}")
    print(f"   [OUTPUT] {out_dir}")
    return EXIT_OK


def command_analyze(args, config: SystemConfig) -> int:
    """runs.csv を分散分析して anova.csv・report.txt を出力"""
    runs = FileHandler.load_runs_csv(args.runs)
    try:
        report = analyze_runs(runs, args.response)
    except ValueError as e:
        raise RunsFileError(f"分散分析を実行できません: {e}") from e

    out_dir = Path(args.out)
    FileHandler.save_frame_csv(analysis_frame(report), out_dir / "anova.csv")
    FileHandler.save_text(format_report(report), out_dir / "report.txt")

    print(f"[OK] 分散分析完了: response={args.response}, n={report.table.n_subjects}")
    print(f"   [OUTPUT] {out_dir}")
    return EXIT_OK


def command_render(args, config: SystemConfig) -> int:
    """トレースとワールドから SVG を出力"""
    world = FileHandler.load_world(args.world)
    trace = FileHandler.load_trace_csv(args.trace)
    renderer = TrajectoryRenderer({
        'controller': config.get_controller_params(),
        'sensor_rig': config.get_sensor_rig()
    })
    path = renderer.render_trajectories(trace, world, args.out)
    print(f"[OK] SVGを保存しました: {path}")
    return EXIT_OK


COMMANDS = {
    'gen': command_gen,
    'run': command_run,
    'sweep': command_sweep,
    'analyze': command_analyze,
    'render': command_render,
}


def build_parser() -> CliArgumentParser:
    """コマンドラインパーサーを作成"""

    parser = CliArgumentParser(
        description="モビング行動シミュレータ",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用例:
  python main.py gen --seed 7 --out worlds/w7.yaml
  python main.py run --world worlds/w7.yaml --range 0.5 --robots 3 --out out/
  python main.py sweep --master-seed 2019 --worlds 10 --out results/
  python main.py analyze --runs results/runs.csv --response unanimous --out results/
  python main.py render --trace out/trace.csv --world worlds/w7.yaml --out out/w7.svg
        """
    )
    parser.add_argument('--config', '-c', default='config.yaml', help='設定ファイルパス')
    parser.add_argument('--verbose', '-v', action='store_true', help='詳細ログ出力')

    subparsers = parser.add_subparsers(dest='command', required=True)

    gen = subparsers.add_parser('gen', help='ワールド生成')
    gen.add_argument('--seed', type=int, required=True, help='乱数シード')
    gen.add_argument('--robots', type=int, default=None, help='ロボット数（既定 10）')
    gen.add_argument('--boxes', type=int, default=None, help='箱の数（既定 3）')
    gen.add_argument('--out', required=True, help='出力ファイル（YAML）')

    run = subparsers.add_parser('run', help='1観測の実行')
    run.add_argument('--world', required=True, help='ワールドファイル')
    run.add_argument('--range', default='inf', help='通信範囲 {inf|-1|0.5|0.1|<m>}')
    run.add_argument('--robots', type=int, default=None, help='ロボット#1〜#kだけを使う')
    run.add_argument('--duration', type=float, default=None, help='実行時間（秒、既定 60）')
    run.add_argument('--dt', type=float, default=None, help='タイムステップ（秒、既定 0.032）')
    run.add_argument('--trace-stride', type=int, default=None, help='トレースの間引き（0で出力なし）')
    run.add_argument('--audit', action='store_true', help='物理不変条件を監査')
    run.add_argument('--out', required=True, help='出力ディレクトリ')

    sweep = subparsers.add_parser('sweep', help='2×3 実験の一括実行')
    sweep.add_argument('--master-seed', type=int, default=None, help='マスターシード（既定 2019）')
    sweep.add_argument('--worlds', type=int, default=None, help='ワールド数（既定 10）')
    sweep.add_argument('--jobs', type=int, default=None, help='並列プロセス数（既定 1）')
    sweep.add_argument('--ranges', default=None, help='通信範囲のリスト（例: inf,0.5,0.1）')
    sweep.add_argument('--group-sizes', default=None, help='群れサイズのリスト（例: 10,3）')
    sweep.add_argument('--duration', type=float, default=None, help='実行時間（秒）')
    sweep.add_argument('--audit', action='store_true', help='物理不変条件を監査')
    sweep.add_argument('--no-progress', action='store_true', help='進捗バーを表示しない')
    sweep.add_argument('--out', required=True, help='出力ディレクトリ')

    analyze = subparsers.add_parser('analyze', help='反復測定分散分析')
    analyze.add_argument('--runs', required=True, help='runs.csv')
    analyze.add_argument('--response', choices=['participation', 'unanimous'],
                         default='participation', help='応答変数')
    analyze.add_argument('--out', required=True, help='出力ディレクトリ')

    render = subparsers.add_parser('render', help='軌跡のSVG出力')
    render.add_argument('--trace', required=True, help='trace.csv')
    render.add_argument('--world', required=True, help='ワールドファイル')
    render.add_argument('--out', required=True, help='出力SVG')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """メイン関数"""

    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"[ERROR] 引数エラー: {e}", file=sys.stderr)
        return EXIT_USAGE

    config = SystemConfig(args.config)
    setup_logging(config, args.verbose)

    logger = logging.getLogger(__name__)
    logger.info(f"モビング行動シミュレータ開始: {args.command}")

    if not config.validate():
        print("[ERROR] 設定ファイルに問題があります", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, config)

    except UsageError as e:
        print(f"[ERROR] 引数エラー: {e}", file=sys.stderr)
        return EXIT_USAGE

    except DATA_ERRORS as e:
        logger.error(f"データエラー: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_DATA

    except PlacementExhaustedError as e:
        logger.error(f"ワールド生成エラー: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        print("[INFO] ロボット数・箱の数を減らすか、クリアランスを小さくしてください", file=sys.stderr)
        return EXIT_PLACEMENT

    except KeyboardInterrupt:
        print("\n[STOP] ユーザーによって中断されました", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
