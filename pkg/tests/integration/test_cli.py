"""コマンドラインの統合テスト

main() を直接呼び出し、終了コードと出力ファイルを確認する。
"""
import pandas as pd
import pytest
import yaml

from main import main, EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PLACEMENT

pytestmark = pytest.mark.integration


@pytest.fixture
def config_path(temp_dir):
    """存在しない設定ファイル（デフォルト設定を使う）"""
    return str(temp_dir / "config.yaml")


def _cli(config_path, *args):
    return main(['--config', config_path, *args])


class TestGen:
    """gen コマンド"""

    def test_同じシードなら同じファイル(self, temp_dir, config_path):
        # When
        first = _cli(config_path, 'gen', '--seed', '7', '--out', str(temp_dir / "a.yaml"))
        second = _cli(config_path, 'gen', '--seed', '7', '--out', str(temp_dir / "b.yaml"))

        # Then
        assert first == EXIT_OK and second == EXIT_OK
        assert (temp_dir / "a.yaml").read_bytes() == (temp_dir / "b.yaml").read_bytes()
        data = yaml.safe_load((temp_dir / "a.yaml").read_text(encoding='utf-8'))
        assert len(data['robots']) == 10
        assert len(data['boxes']) == 3

    def test_ロボット0台は引数エラー(self, temp_dir, config_path):
        code = _cli(config_path, 'gen', '--seed', '7', '--robots', '0', '--out', str(temp_dir / "w.yaml"))
        assert code == EXIT_USAGE

    def test_シードなしは引数エラー(self, temp_dir, config_path):
        assert _cli(config_path, 'gen', '--out', str(temp_dir / "w.yaml")) == EXIT_USAGE

    def test_過密な配置は終了コード3(self, temp_dir, capsys):
        # Given: 狭いアリーナと少ない試行回数
        path = temp_dir / "tight.yaml"
        path.write_text("world:\n  arena_side: 0.3\n  max_placement_attempts: 100\n", encoding='utf-8')

        # When
        code = main(['--config', str(path), 'gen', '--seed', '1', '--robots', '20',
                     '--out', str(temp_dir / "w.yaml")])

        # Then
        assert code == EXIT_PLACEMENT
        assert "[ERROR]" in capsys.readouterr().err


class TestRun:
    """run コマンド"""

    @pytest.fixture
    def world_path(self, temp_dir, config_path):
        path = temp_dir / "world.yaml"
        assert _cli(config_path, 'gen', '--seed', '11', '--out', str(path)) == EXIT_OK
        return path

    def test_1台では失敗(self, temp_dir, config_path, world_path):
        out = temp_dir / "out"

        code = _cli(config_path, 'run', '--world', str(world_path), '--robots', '1',
                    '--duration', '3', '--out', str(out))

        assert code == EXIT_OK
        runs = pd.read_csv(out / "runs.csv", dtype={'range_m': str})
        assert runs.loc[0, 'status'] == "failed"
        assert runs.loc[0, 'participation_pct'] == 0.0
        assert (out / "robots.csv").exists()
        assert (out / "events.jsonl").exists()
        assert (out / "trace.csv").exists()

    def test_範囲マイナス1は無限(self, temp_dir, config_path, world_path):
        out = temp_dir / "out"

        code = _cli(config_path, 'run', '--world', str(world_path), '--range', '-1',
                    '--duration', '1', '--trace-stride', '0', '--out', str(out))

        assert code == EXIT_OK
        runs = pd.read_csv(out / "runs.csv", dtype={'range_m': str})
        assert runs.loc[0, 'range_m'] == "inf"
        assert not (out / "trace.csv").exists()

    @pytest.mark.parametrize("value", ["abc", "0", "-2"])
    def test_不正な範囲は引数エラー(self, temp_dir, config_path, world_path, value):
        code = _cli(config_path, 'run', '--world', str(world_path), '--range', value,
                    '--duration', '1', '--out', str(temp_dir / "out"))
        assert code == EXIT_USAGE

    def test_台数がワールドより多いと引数エラー(self, temp_dir, config_path, world_path):
        code = _cli(config_path, 'run', '--world', str(world_path), '--robots', '11',
                    '--duration', '1', '--out', str(temp_dir / "out"))
        assert code == EXIT_USAGE

    def test_ワールドがないとデータエラー(self, temp_dir, config_path):
        code = _cli(config_path, 'run', '--world', str(temp_dir / "none.yaml"), '--out', str(temp_dir / "out"))
        assert code == EXIT_DATA

    def test_描画(self, temp_dir, config_path, world_path):
        out = temp_dir / "out"
        assert _cli(config_path, 'run', '--world', str(world_path), '--duration', '1',
                    '--trace-stride', '5', '--out', str(out)) == EXIT_OK

        code = _cli(config_path, 'render', '--trace', str(out / "trace.csv"),
                    '--world', str(world_path), '--out', str(out / "world.svg"))

        assert code == EXIT_OK
        assert (out / "world.svg").read_text(encoding='utf-8').lstrip().startswith("<?xml")

    def test_トレースとワールドの不一致(self, temp_dir, config_path, world_path):
        out = temp_dir / "out"
        assert _cli(config_path, 'run', '--world', str(world_path), '--duration', '1',
                    '--out', str(out)) == EXIT_OK
        small = temp_dir / "small.yaml"
        assert _cli(config_path, 'gen', '--seed', '3', '--robots', '2', '--out', str(small)) == EXIT_OK

        code = _cli(config_path, 'render', '--trace', str(out / "trace.csv"),
                    '--world', str(small), '--out', str(out / "bad.svg"))

        assert code == EXIT_DATA


class TestSweepAndAnalyze:
    """sweep / analyze コマンド"""

    def test_1ワールドで6観測(self, temp_dir, config_path):
        out = temp_dir / "sweep"

        code = _cli(config_path, 'sweep', '--worlds', '1', '--duration', '1',
                    '--no-progress', '--out', str(out))

        assert code == EXIT_OK
        runs = pd.read_csv(out / "runs.csv", dtype={'range_m': str})
        assert len(runs) == 6
        assert list(runs['run_id']) == [1, 2, 3, 4, 5, 6]
        assert list(zip(runs['range_m'], runs['group_size'])) == [
            ("inf", 10), ("inf", 3), ("0.5", 10), ("0.5", 3), ("0.1", 10), ("0.1", 3)
        ]
        assert set(runs['world_seed']) == {2020}
        assert (out / "summary.txt").exists()
        assert (out / "interaction.svg").exists()

    def test_同じ設定のスイープは同じバイト列(self, temp_dir, config_path):
        first = temp_dir / "first"
        second = temp_dir / "second"
        for out in (first, second):
            assert _cli(config_path, 'sweep', '--worlds', '2', '--duration', '2',
                        '--no-progress', '--out', str(out)) == EXIT_OK

        for name in ("runs.csv", "robots.csv", "summary.txt"):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_条件の指定(self, temp_dir, config_path):
        out = temp_dir / "sweep"

        code = _cli(config_path, 'sweep', '--worlds', '1', '--duration', '0.5',
                    '--ranges', 'inf,0.2', '--group-sizes', '5', '--no-progress', '--out', str(out))

        assert code == EXIT_OK
        runs = pd.read_csv(out / "runs.csv", dtype={'range_m': str})
        assert list(runs['range_m']) == ["inf", "0.2"]
        assert list(runs['group_size']) == [5, 5]

    def test_群れサイズが大きすぎると引数エラー(self, temp_dir, config_path):
        code = _cli(config_path, 'sweep', '--worlds', '1', '--group-sizes', '12',
                    '--no-progress', '--out', str(temp_dir / "sweep"))
        assert code == EXIT_USAGE

    def test_スイープから分散分析(self, temp_dir, config_path):
        out = temp_dir / "sweep"
        assert _cli(config_path, 'sweep', '--worlds', '2', '--duration', '1',
                    '--no-progress', '--out', str(out)) == EXIT_OK

        code = _cli(config_path, 'analyze', '--runs', str(out / "runs.csv"), '--out', str(out))

        assert code == EXIT_OK
        anova = pd.read_csv(out / "anova.csv", dtype=str)
        assert list(anova['effect'][:3]) == ['range', 'group_size', 'range_x_group_size']
        assert list(anova['df'][:3]) == ['2', '1', '2']
        assert list(anova['error_df'][:3]) == ['2', '1', '2']
        assert "球面性" in (out / "report.txt").read_text(encoding='utf-8')

    def test_欠損セルはデータエラー(self, temp_dir, config_path):
        runs = pd.DataFrame({
            'run_id': [1, 2, 3, 4, 5],
            'world_id': [1, 1, 2, 2, 2],
            'range_m': ["inf", "0.1", "inf", "0.1", "0.1"],
            'group_size': [3, 3, 3, 3, 3],
            'status': ["unanimous"] * 5,
            'n_mobbing': [3] * 5,
        })
        path = temp_dir / "runs.csv"
        runs.to_csv(path, index=False)

        code = _cli(config_path, 'analyze', '--runs', str(path), '--out', str(temp_dir))

        assert code == EXIT_DATA

    def test_全セル同じ値ならF0(self, temp_dir, config_path):
        rows = []
        run_id = 1
        for world_id in (1, 2, 3):
            for range_m in ("inf", "0.5", "0.1"):
                for size in (10, 3):
                    rows.append({'run_id': run_id, 'world_id': world_id, 'range_m': range_m,
                                 'group_size': size, 'status': "unanimous", 'n_mobbing': size})
                    run_id += 1
        path = temp_dir / "runs.csv"
        pd.DataFrame(rows).to_csv(path, index=False)

        code = _cli(config_path, 'analyze', '--runs', str(path), '--out', str(temp_dir))

        assert code == EXIT_OK
        anova = pd.read_csv(temp_dir / "anova.csv", dtype=str)
        assert list(anova['f'][:3]) == ['0.000000'] * 3
        assert list(anova['p'][:3]) == ['1'] * 3

    def test_runsがないとデータエラー(self, temp_dir, config_path):
        code = _cli(config_path, 'analyze', '--runs', str(temp_dir / "none.csv"), '--out', str(temp_dir))
        assert code == EXIT_DATA

    def test_サブコマンドなしは引数エラー(self, config_path):
        assert main(['--config', config_path]) == EXIT_USAGE

    @pytest.mark.parametrize("body", [
        "simulation:\n  wheel_radius: 0\n",
        "simulation:\n  collision_passes: 4\n  collision_max_passes: 2\n",
        "sensing:\n  prox_range: -0.05\n",
    ])
    def test_不正なシミュレーション設定は終了コード1(self, temp_dir, capsys, body):
        # Given
        path = temp_dir / "bad.yaml"
        path.write_text(body, encoding='utf-8')

        # When
        code = main(['--config', str(path), 'sweep', '--worlds', '1', '--duration', '0.1',
                     '--no-progress', '--out', str(temp_dir / "sweep")])

        # Then
        assert code == EXIT_USAGE
        assert "[ERROR]" in capsys.readouterr().err
