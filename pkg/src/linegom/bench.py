"""Benchmark report over a fixed 20-position suite.

Measures evaluations/sec for the full-rebuild and incremental paths (plus
their codebook lookup counts), alpha-beta nodes/sec and MCTS playouts/sec.
Node and lookup counts are deterministic; only the timings vary per host.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .alphabeta import AbSearch
from .board import Board
from .config import EngineConfig
from .engine import Engine
from .evaluator import Evaluator
from .mcts import MctsParams, MctsSearch

SUITE_SEED = 0xBE7C
SUITE_SIZE = 20


def bench_positions(count: int = SUITE_SIZE, size: int = 15) -> list[Board]:
    """Deterministic random midgame positions (10 to 30 plies, game ongoing)."""
    rng = np.random.default_rng(SUITE_SEED)
    positions = []
    while len(positions) < count:
        b = Board(size, size)
        target = int(rng.integers(10, 31))
        ok = True
        for _ in range(target):
            moves = b.legal_moves(near_only=True)
            b.place_move(*moves[int(rng.integers(len(moves)))])
            if b.outcome.value != "ongoing":
                ok = False
                break
        if ok:
            positions.append(b)
    return positions


def run_bench(config: EngineConfig | None = None, ab_depth: int = 2,
              mcts_playouts: int = 200) -> dict:
    engine = Engine(config)
    codebook = engine.codebook
    positions = bench_positions(size=engine.board.h)
    hw = engine.board.h * engine.board.w

    # full rebuild path
    codebook.reset_counter()
    t0 = time.monotonic()
    for b in positions:
        engine.evaluator.refresh(b)
        engine.evaluator.evaluate(b)
    t_full = time.monotonic() - t0
    full_lookups = codebook.lookups / len(positions)

    # incremental path: one stone added on top of each position
    inc_lookups = []
    t0 = time.monotonic()
    for b in positions:
        engine.evaluator.refresh(b)
        mv = b.legal_moves(near_only=True)[0]
        codebook.reset_counter()
        b.place_move(*mv)
        engine.evaluator.push(b, mv[0], mv[1], b.move_stack[-1][2])
        inc_lookups.append(codebook.lookups)
        engine.evaluator.evaluate(b)
        b.undo_move()
        engine.evaluator.pop()
    t_inc = time.monotonic() - t0

    # search throughput
    ab_nodes = 0
    t0 = time.monotonic()
    for b in positions:
        game = b.clone()
        ev = Evaluator(game, codebook, engine.heads)
        search = AbSearch(game, ev, engine.config.ab)
        search.search_root(max_depth=ab_depth)
        ab_nodes += search.nodes + search.vcf_nodes
    t_ab = time.monotonic() - t0

    playouts = 0
    t0 = time.monotonic()
    for b in positions:
        game = b.clone()
        ev = Evaluator(game, codebook, engine.heads)
        params = replace(MctsParams(), playouts=mcts_playouts)
        s = MctsSearch(game, ev, params)
        s.run()
        playouts += s.playouts_done
    t_mcts = time.monotonic() - t0

    return {
        "positions": len(positions),
        "full_rebuild": {
            "evals_per_s": len(positions) / t_full,
            "lookups_per_eval": full_lookups,
        },
        "incremental": {
            "evals_per_s": len(positions) / t_inc,
            "lookups_per_move": inc_lookups,
            "max_lookups_per_move": max(inc_lookups),
        },
        "lookup_ratio": full_lookups / max(inc_lookups),
        "expected_full_lookups": 2 * 4 * hw,
        "alphabeta": {"depth": ab_depth, "nodes": ab_nodes, "nps": ab_nodes / t_ab},
        "mcts": {"playouts": playouts, "pps": playouts / t_mcts},
    }


def format_report(report: dict) -> str:
    lines = [
        f"positions            : {report['positions']}",
        f"full rebuild         : {report['full_rebuild']['evals_per_s']:8.1f} evals/s "
        f"({report['full_rebuild']['lookups_per_eval']:.0f} lookups/eval)",
        f"incremental          : {report['incremental']['evals_per_s']:8.1f} evals/s "
        f"(<= {report['incremental']['max_lookups_per_move']} lookups/move)",
        f"lookup ratio         : {report['lookup_ratio']:8.1f}x",
        f"alpha-beta depth {report['alphabeta']['depth']}   : {report['alphabeta']['nps']:8.1f} nodes/s "
        f"({report['alphabeta']['nodes']} nodes)",
        f"mcts                 : {report['mcts']['pps']:8.1f} playouts/s",
    ]
    return "\n".join(lines)
