import pytest

from linegom.bench import bench_positions, format_report, run_bench
from linegom.board import GameOutcome


def test_positions_deterministic_and_ongoing():
    a = bench_positions()
    b = bench_positions()
    assert len(a) == 20
    for pa, pb in zip(a, b):
        assert pa.to_text() == pb.to_text()
        assert pa.outcome is GameOutcome.ONGOING


@pytest.fixture(scope="module")
def report(bundle):
    # bundle ensures the shared bake is reused by the default engine
    return run_bench(ab_depth=1, mcts_playouts=16)


def test_lookup_accounting(report):
    assert report["full_rebuild"]["lookups_per_eval"] == 1800
    assert report["expected_full_lookups"] == 1800
    assert report["incremental"]["max_lookups_per_move"] <= 88
    assert report["lookup_ratio"] >= 20.0


def test_throughput_fields_positive(report):
    assert report["full_rebuild"]["evals_per_s"] > 0
    assert report["incremental"]["evals_per_s"] > 0
    assert report["alphabeta"]["nps"] > 0
    assert report["mcts"]["pps"] > 0
    assert report["mcts"]["playouts"] == 20 * 16


def test_format_report_readable(report):
    text = format_report(report)
    assert "lookup ratio" in text
    assert "playouts/s" in text
