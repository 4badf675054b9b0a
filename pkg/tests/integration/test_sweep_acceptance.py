"""標準スイープ（マスターシード2019・10ワールド・60秒）の受け入れテスト

60観測を実行するため slow マーカーを付けている。
"""
import pytest

from src.models.sim_config import SimConfig
from src.models.run_record import RunStatus
from src.core.harness import ExperimentHarness
from src.analysis.summary import summarize, records_frame
from src.analysis.report import analyze_runs

pytestmark = [pytest.mark.integration, pytest.mark.slow]


@pytest.fixture(scope="module")
def canonical_sweep():
    harness = ExperimentHarness(SimConfig(), audit=True)
    return harness.sweep(2019, 10)


@pytest.fixture(scope="module")
def canonical_summary(canonical_sweep):
    return summarize(canonical_sweep)


class TestCanonicalSweep:
    """標準スイープの性質"""

    def test_観測数と並び(self, canonical_sweep):
        records = canonical_sweep.records
        assert len(records) == 60
        assert [r.run_id for r in records] == list(range(1, 61))
        assert [r.world_seed for r in records[::6]] == list(range(2020, 2030))

    def test_無限範囲でコールがあれば全会一致(self, canonical_sweep):
        called = [r for r in canonical_sweep.records
                  if r.range_policy.is_infinite and r.first_call_time is not None]

        assert called
        for record in called:
            assert record.status is RunStatus.UNANIMOUS, record.run_id

    def test_全会一致率は通信範囲とともに下がる(self, canonical_summary):
        rates = dict(zip(canonical_summary.by_range['range_m'], canonical_summary.by_range['unanimous_rate']))
        assert rates["inf"] >= rates["0.5"] >= rates["0.1"]
        assert rates["inf"] > rates["0.1"]

    def test_大きい群れほど参加率が高い(self, canonical_summary):
        by_size = dict(zip(canonical_summary.by_group_size['group_size'],
                           canonical_summary.by_group_size['mean']))
        assert by_size[10] >= by_size[3]

    def test_分散分析の自由度(self, canonical_sweep):
        report = analyze_runs(records_frame(canonical_sweep.records))

        dfs = [(effect.df, effect.error_df) for effect in report.anova.effects.values()]

        assert dfs == [(2, 18), (1, 9), (2, 18)]

    def test_物理監査(self, canonical_sweep):
        audit = canonical_sweep.audit
        assert audit is not None
        assert audit.ticks_checked > 0
        assert audit.contained
        assert audit.passes(1e-6)
