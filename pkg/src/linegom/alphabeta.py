"""Principal Variation Search with VCF quiescence, transposition table and
policy-guided move ordering.

Scores are integer centi-values in [-32000, 32000]; static evaluations map
the value head's utility to round(u * 1000), mate scores are MATE - ply.
Every pruning heuristic (futility, null move, late move reduction, singular
extension) can be toggled independently; with all of them off, the search
returns plain alpha-beta values.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .board import BLACK, WHITE, Board, GameOutcome, opponent
from .evaluator import Evaluator
from .mcts import SearchResult

MATE = 30000
MATE_THRESHOLD = 20000
SCORE_MIN, SCORE_MAX = -32000, 32000

EXACT, LOWER, UPPER = 0, 1, 2


class NoLegalMoveError(ValueError):
    pass


@dataclass
class AbParams:
    max_depth: int = 64
    use_tt: bool = True
    use_futility: bool = True
    use_null_move: bool = True
    use_lmr: bool = True
    use_singular: bool = True
    futility_margins: tuple[int, ...] = (0, 120, 250, 400)  # per remaining depth
    lmr_base: float = 0.75
    lmr_divisor: float = 2.25
    null_move_reduction: int = 2
    singular_margin: int = 80
    singular_min_depth: int = 6
    vcf_node_cap: int = 100_000
    tt_buckets: int = 1 << 16
    near_only: bool = True
    time_limit: Optional[float] = None


# -- five / four detection -------------------------------------------------

@lru_cache(maxsize=8)
def _five_windows(h: int, w: int) -> np.ndarray:
    """All straight windows of 5 cells, as flat indices, shape (Nw, 5)."""
    wins = []
    for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
        for r in range(h):
            for c in range(w):
                r4, c4 = r + 4 * dr, c + 4 * dc
                if 0 <= r4 < h and 0 <= c4 < w:
                    wins.append([(r + k * dr) * w + (c + k * dc) for k in range(5)])
    return np.array(wins, dtype=np.int64)


def five_points(board: Board, color: int) -> list[int]:
    """Empty flat cells where `color` completes five immediately."""
    wins = _five_windows(board.h, board.w)
    vals = board.cells[wins]
    mask = ((vals == color).sum(axis=1) == 4) & ((vals == 0).sum(axis=1) == 1)
    if not mask.any():
        return []
    sel = wins[mask]
    empt = sel[board.cells[sel] == 0]
    return sorted(set(int(x) for x in empt))


def four_moves(board: Board, color: int) -> list[int]:
    """Empty flat cells where placing `color` creates an immediate five threat."""
    wins = _five_windows(board.h, board.w)
    vals = board.cells[wins]
    mask = ((vals == color).sum(axis=1) == 3) & ((vals == 0).sum(axis=1) == 2)
    if not mask.any():
        return []
    sel = wins[mask]
    empt = sel[board.cells[sel] == 0]
    return sorted(set(int(x) for x in empt))


# -- transposition table ---------------------------------------------------

@dataclass
class TTEntry:
    key: int
    depth: int
    bound: int
    score: int
    move: Optional[tuple[int, int]]
    generation: int


class TranspositionTable:
    """Power-of-two buckets, 4-way, replacement prefers shallower-then-older."""

    WAYS = 4

    def __init__(self, buckets: int = 1 << 16):
        if buckets & (buckets - 1):
            raise ValueError("bucket count must be a power of two")
        self.mask = buckets - 1
        self.buckets: list[list[TTEntry]] = [[] for _ in range(buckets)]
        self.generation = 0

    def new_search(self) -> None:
        self.generation += 1

    def probe(self, key: int) -> Optional[TTEntry]:
        for e in self.buckets[key & self.mask]:
            if e.key == key:
                return e
        return None

    def store(self, key: int, depth: int, bound: int, score: int,
              move: Optional[tuple[int, int]]) -> None:
        bucket = self.buckets[key & self.mask]
        for e in bucket:
            if e.key == key:
                if depth >= e.depth or bound == EXACT:
                    e.depth, e.bound, e.score, e.move = depth, bound, score, move
                    e.generation = self.generation
                elif move is not None and e.move is None:
                    e.move = move
                return
        entry = TTEntry(key, depth, bound, score, move, self.generation)
        if len(bucket) < self.WAYS:
            bucket.append(entry)
        else:
            victim = min(bucket, key=lambda e: (e.generation, e.depth))
            bucket[bucket.index(victim)] = entry

    def clear(self) -> None:
        for b in self.buckets:
            b.clear()


def _score_to_tt(score: int, ply: int) -> int:
    if score >= MATE_THRESHOLD:
        return score + ply
    if score <= -MATE_THRESHOLD:
        return score - ply
    return score


def _score_from_tt(score: int, ply: int) -> int:
    if score >= MATE_THRESHOLD:
        return score - ply
    if score <= -MATE_THRESHOLD:
        return score + ply
    return score


# -- search ----------------------------------------------------------------

class AbSearch:
    def __init__(self, board: Board, evaluator: Evaluator, params: AbParams | None = None,
                 tt: TranspositionTable | None = None):
        self.board = board
        self.evaluator = evaluator
        self.params = params or AbParams()
        self.tt = tt or TranspositionTable(self.params.tt_buckets)
        self.nodes = 0
        self.vcf_nodes = 0
        self.stop_flag = False
        self._deadline: Optional[float] = None
        self.info_lines: list[dict] = []

    # -- helpers -----------------------------------------------------------

    def _check_stop(self) -> bool:
        if self.stop_flag:
            return True
        if self._deadline is not None and self.nodes % 1024 == 0:
            if time.monotonic() > self._deadline:
                self.stop_flag = True
        return self.stop_flag

    def _static(self):
        return self.evaluator.evaluate(self.board)

    def _make(self, mv: tuple[int, int]) -> None:
        self.board.place_move(*mv)
        r, c, color = self.board.move_stack[-1]
        self.evaluator.push(self.board, r, c, color)

    def _unmake(self) -> None:
        self.board.undo_move()
        self.evaluator.pop()

    # -- VCF quiescence ----------------------------------------------------

    def vcf_search(self, alpha: int, beta: int, ply: int) -> int:
        """Stand-pat static eval unless the side to move has a forced win by
        a continuous-four sequence within the node cap."""
        attacker = self.board.side_to_move
        budget = [self.params.vcf_node_cap]
        mate = self._vcf_prove(attacker, ply, budget)
        if mate is not None:
            return mate
        ev = self._static()
        return int(round((ev.win - ev.loss) * 1000))

    def _vcf_prove(self, attacker: int, ply: int, budget: list[int]) -> Optional[int]:
        budget[0] -= 1
        self.vcf_nodes += 1
        if budget[0] <= 0:
            return None
        board = self.board
        defender = opponent(attacker)
        mine = five_points(board, attacker)
        if mine:
            return MATE - (ply + 1)
        theirs = five_points(board, defender)
        if len(theirs) >= 2:
            return None
        cands = four_moves(board, attacker)
        if theirs:
            cands = [m for m in cands if m == theirs[0]]
        for m in cands:
            mv = (m // board.w, m % board.w)
            board.place_move(*mv)
            try:
                if board.outcome is not GameOutcome.ONGOING:
                    return MATE - (ply + 1)  # overline or immediate five
                if five_points(board, defender):
                    continue  # defender mates first
                threats = five_points(board, attacker)
                if len(threats) >= 2:
                    return MATE - (ply + 3)  # double threat, unstoppable
                if not threats:
                    continue
                b = threats[0]
                bmv = (b // board.w, b % board.w)
                board.place_move(*bmv)
                try:
                    res = self._vcf_prove(attacker, ply + 2, budget)
                finally:
                    board.undo_move()
                if res is not None:
                    return res
            finally:
                board.undo_move()
        return None

    # -- move ordering -----------------------------------------------------

    def order_moves(self, policy: np.ndarray, tt_move: Optional[tuple[int, int]]) -> list[tuple[int, int]]:
        moves = self.board.legal_moves(near_only=self.params.near_only)
        moves.sort(key=lambda m: (-float(policy[m[0], m[1]]), m[0], m[1]))
        if tt_move is not None and tt_move in moves:
            moves.remove(tt_move)
            moves.insert(0, tt_move)
        return moves

    # -- PVS ---------------------------------------------------------------

    def pvs(self, depth: int, alpha: int, beta: int, ply: int = 0,
            excluded: Optional[tuple[int, int]] = None) -> int:
        assert alpha < beta
        board = self.board
        p = self.params
        self.nodes += 1
        if self._check_stop():
            return 0

        if board.outcome is not GameOutcome.ONGOING:
            return 0 if board.outcome is GameOutcome.DRAW else -(MATE - ply)

        # completing a five is always optimal; prove mate-in-1 without a sweep
        wins = five_points(board, board.side_to_move)
        if wins:
            mv = (wins[0] // board.w, wins[0] % board.w)
            if p.use_tt and excluded is None:
                self.tt.store(board.hash, depth, EXACT, _score_to_tt(MATE - (ply + 1), ply), mv)
            return MATE - (ply + 1)

        if depth <= 0:
            return self.vcf_search(alpha, beta, ply)

        is_pv = beta - alpha > 1
        tt_move = None
        if p.use_tt and excluded is None:
            entry = self.tt.probe(board.hash)
            if entry is not None:
                tt_move = entry.move
                if entry.depth >= depth and not is_pv:
                    score = _score_from_tt(entry.score, ply)
                    if entry.bound == EXACT:
                        return score
                    if entry.bound == LOWER and score >= beta:
                        return score
                    if entry.bound == UPPER and score <= alpha:
                        return score

        ev = self._static()
        static_score = int(round((ev.win - ev.loss) * 1000))

        my_threat = bool(five_points(board, board.side_to_move))
        opp_four = bool(four_moves(board, opponent(board.side_to_move)))
        quiet_board = not my_threat and not opp_four and not five_points(board, opponent(board.side_to_move))

        # null move: skipping a turn is sound only on quiet boards
        if (p.use_null_move and not is_pv and depth >= 3 and excluded is None
                and quiet_board and static_score >= beta):
            board.make_null()
            try:
                score = -self.pvs(depth - 1 - p.null_move_reduction, -beta, -beta + 1, ply + 1)
            finally:
                board.undo_null()
            if self.stop_flag:
                return 0
            if score >= beta and abs(score) < MATE_THRESHOLD:
                return score

        moves = self.order_moves(ev.policy, tt_move)
        if excluded is not None:
            moves = [m for m in moves if m != excluded]
        if not moves:
            return 0  # board full enough that the filter found nothing: draw-ish

        tactical_cells = set(five_points(board, board.side_to_move)
                             + five_points(board, opponent(board.side_to_move))
                             + four_moves(board, board.side_to_move))

        best_score = -MATE
        best_move = None
        orig_alpha = alpha
        for i, mv in enumerate(moves):
            flat = mv[0] * board.w + mv[1]
            is_tactical = flat in tactical_cells

            if (p.use_futility and depth <= 3 and not is_pv and not is_tactical
                    and quiet_board and best_move is not None
                    and static_score + p.futility_margins[depth] <= alpha):
                continue

            ext = 0
            if (p.use_singular and mv == tt_move and excluded is None
                    and depth >= p.singular_min_depth and p.use_tt):
                entry = self.tt.probe(board.hash)
                if entry is not None and entry.bound != UPPER and entry.depth >= depth - 3:
                    target = _score_from_tt(entry.score, ply) - p.singular_margin
                    s = self.pvs(depth // 2, target - 1, target, ply, excluded=mv)
                    if s < target:
                        ext = 1

            self._make(mv)
            try:
                new_depth = depth - 1 + ext
                if i == 0:
                    score = -self.pvs(new_depth, -beta, -alpha, ply + 1)
                else:
                    red = 0
                    if (p.use_lmr and depth >= 3 and i >= 3 and not is_tactical
                            and ext == 0):
                        red = int(p.lmr_base + math.log(depth) * math.log(i) / p.lmr_divisor)
                        red = max(0, min(red, depth - 2))
                    score = -self.pvs(new_depth - red, -alpha - 1, -alpha, ply + 1)
                    if score > alpha and (red > 0 or score < beta):
                        score = -self.pvs(new_depth, -beta, -alpha, ply + 1)
            finally:
                self._unmake()
            if self.stop_flag:
                return 0

            if score > best_score:
                best_score = score
                best_move = mv
            if score > alpha:
                alpha = score
            if alpha >= beta:
                break

        if p.use_tt and excluded is None and not self.stop_flag:
            if best_score >= beta:
                bound = LOWER
            elif best_score <= orig_alpha:
                bound = UPPER
            else:
                bound = EXACT
            self.tt.store(board.hash, depth, bound, _score_to_tt(best_score, ply), best_move)
        return best_score

    # -- root --------------------------------------------------------------

    def search_root(self, max_depth: Optional[int] = None,
                    time_budget: Optional[float] = None) -> SearchResult:
        p = self.params
        board = self.board
        if board.outcome is not GameOutcome.ONGOING or not board.legal_moves(near_only=p.near_only):
            raise NoLegalMoveError("no legal move in this position")
        max_depth = max_depth or p.max_depth
        budget = time_budget if time_budget is not None else p.time_limit
        start = time.monotonic()
        if budget is not None:
            self._deadline = start + budget
        self.tt.new_search()

        best_move, best_score, completed = None, 0, 0
        score = 0
        for depth in range(1, max_depth + 1):
            window = 50
            alpha, beta = score - window, score + window
            if depth <= 2:
                alpha, beta = SCORE_MIN, SCORE_MAX
            while True:
                score = self.pvs(depth, alpha, beta)
                if self.stop_flag:
                    break
                if score <= alpha:
                    alpha = max(SCORE_MIN, alpha - 4 * window)
                elif score >= beta:
                    beta = min(SCORE_MAX, beta + 4 * window)
                else:
                    break
            if self.stop_flag and completed > 0:
                break
            entry = self.tt.probe(board.hash) if p.use_tt else None
            if entry is not None and entry.move is not None:
                best_move, best_score, completed = entry.move, score, depth
            else:
                # TT disabled: re-derive the best root move explicitly
                best_move, best_score, completed = self._root_best(depth), score, depth
            self.info_lines.append({"depth": depth, "score": best_score,
                                    "nodes": self.nodes,
                                    "time": time.monotonic() - start})
            if budget is not None and time.monotonic() - start > budget * 0.5:
                break
            if abs(best_score) >= MATE_THRESHOLD:
                break

        if best_move is None:
            best_move = self.order_moves(self._static().policy, None)[0]
        pv = self._extract_pv(best_move, completed)
        u = max(-1.0, min(1.0, best_score / 1000.0)) if abs(best_score) < MATE_THRESHOLD \
            else (1.0 if best_score > 0 else -1.0)
        value = (max(u, 0.0), max(-u, 0.0), 1.0 - abs(u))
        return SearchResult(best_move, pv, value, nodes=self.nodes,
                            depth=completed, score=best_score)

    def _root_best(self, depth: int) -> tuple[int, int]:
        ev = self._static()
        moves = self.order_moves(ev.policy, None)
        best, best_score = moves[0], -MATE - 1
        for mv in moves:
            self._make(mv)
            try:
                score = -self.pvs(depth - 1, -MATE, MATE, 1)
            finally:
                self._unmake()
            if score > best_score:
                best, best_score = mv, score
        return best

    def _extract_pv(self, first: tuple[int, int], depth: int) -> list[tuple[int, int]]:
        pv = [first]
        if not self.params.use_tt:
            return pv
        made = 0
        try:
            self.board.place_move(*first)
            made += 1
            while made < max(depth, 1):
                entry = self.tt.probe(self.board.hash)
                if entry is None or entry.move is None:
                    break
                mv = entry.move
                if self.board.outcome is not GameOutcome.ONGOING or \
                        self.board.cell(mv[0], mv[1]) != 0:
                    break
                pv.append(mv)
                self.board.place_move(*mv)
                made += 1
        finally:
            for _ in range(made):
                self.board.undo_move()
        return pv


def search_root(board: Board, evaluator: Evaluator, params: AbParams | None = None,
                time_budget: Optional[float] = None) -> SearchResult:
    return AbSearch(board, evaluator, params).search_root(time_budget=time_budget)
