"""PUCT Monte Carlo Tree Search with dynamic exploration constant, first-play
urgency, delayed child expansion and LCB move choice at the root.

Utilities are scalars in [-1, 1] from the perspective of the side to move at
each node (u = p_win - p_loss; terminal win = +1, loss = -1, draw = 0); a
child's utility enters its parent negated.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .board import Board, GameOutcome
from .evaluator import Evaluator

LCB_Z = 1.28  # 80% one-sided


class BudgetZeroError(ValueError):
    pass


@dataclass
class MctsParams:
    c_puct_init: float = 1.0
    c_puct_log: float = 0.4
    c_puct_base: float = 500.0
    c_fpu: float = 0.1
    playouts: int = 1000
    time_limit: Optional[float] = None  # seconds; checked every 64 playouts
    near_only: bool = True


@dataclass
class SearchResult:
    best_move: tuple[int, int]
    pv: list[tuple[int, int]]
    value: tuple[float, float, float]
    nodes: int = 0
    playouts: int = 0
    depth: int = 0
    score: Optional[int] = None


class Node:
    __slots__ = ("n", "w", "w2", "prior", "children", "terminal", "expanded",
                 "pending_policy")

    def __init__(self, prior: float = 0.0):
        self.n = 0
        self.w = 0.0
        self.w2 = 0.0
        self.prior = prior
        self.children: dict[tuple[int, int], "Node"] = {}
        self.terminal: Optional[float] = None  # utility for side to move, if game over
        self.expanded = False
        self.pending_policy = None  # policy kept from the first-visit evaluation

    @property
    def q(self) -> float:
        return self.w / self.n if self.n else 0.0

    def variance(self) -> float:
        if self.n < 2:
            return 1.0
        v = self.w2 / self.n - self.q ** 2
        return max(v, 0.0)


def cpuct(parent_visits: int, p: MctsParams) -> float:
    return p.c_puct_init + p.c_puct_log * math.log(1.0 + parent_visits / p.c_puct_base)


def select_child(node: Node, p: MctsParams) -> tuple[int, int]:
    """argmax of Q + c * P * sqrt(sum N) / (1 + N); unvisited children take the
    first-play-urgency value parent_Q - c_fpu * sqrt(sum of explored priors).
    Ties break on the lowest move index (row-major)."""
    total = sum(ch.n for ch in node.children.values())
    c = cpuct(total, p)
    sqrt_total = math.sqrt(total)
    explored_prior = sum(ch.prior for ch in node.children.values() if ch.n > 0)
    fpu_q = node.q - p.c_fpu * math.sqrt(explored_prior)
    best, best_score = None, -math.inf
    for move in sorted(node.children):
        ch = node.children[move]
        q = -ch.q if ch.n > 0 else fpu_q
        score = q + c * ch.prior * sqrt_total / (1 + ch.n)
        if score > best_score:
            best, best_score = move, score
    return best


def _terminal_utility(board: Board) -> Optional[float]:
    out = board.outcome
    if out is GameOutcome.ONGOING:
        return None
    if out is GameOutcome.DRAW:
        return 0.0
    return -1.0  # the side to move faces a completed five


class MctsSearch:
    def __init__(self, board: Board, evaluator: Evaluator, params: MctsParams | None = None):
        self.board = board
        self.evaluator = evaluator
        self.params = params or MctsParams()
        self.stop_flag = False
        self.root = Node()
        self.playouts_done = 0
        self.max_depth = 0
        self.info_callback: Optional[Callable[[dict], None]] = None

    # -- playout -----------------------------------------------------------

    def _expand(self, node: Node) -> None:
        policy = node.pending_policy
        if policy is None:
            policy = self.evaluator.evaluate(self.board).policy
        moves = self.board.legal_moves(near_only=self.params.near_only)
        for mv in moves:
            node.children[mv] = Node(prior=float(policy[mv[0], mv[1]]))
        node.expanded = True
        node.pending_policy = None

    def _playout(self) -> None:
        board, evaluator = self.board, self.evaluator
        path: list[Node] = [self.root]
        pushed = 0
        node = self.root
        try:
            while True:
                node.terminal = _terminal_utility(board) if node.terminal is None else node.terminal
                if node.terminal is not None:
                    util = node.terminal
                    break
                if node.n == 0:
                    ev = evaluator.evaluate(board)
                    node.pending_policy = ev.policy
                    util = ev.utility
                    break
                if not node.expanded:
                    # second visit: materialize and prior-score the children
                    self._expand(node)
                mv = select_child(node, self.params)
                board.place_move(*mv)
                evaluator.push(board, mv[0], mv[1], board.move_stack[-1][2])
                pushed += 1
                node = node.children[mv]
                path.append(node)
        finally:
            for _ in range(pushed):
                board.undo_move()
                evaluator.pop()
        self.max_depth = max(self.max_depth, len(path) - 1)
        for n in reversed(path):
            n.n += 1
            n.w += util
            n.w2 += util * util
            util = -util
        self.playouts_done += 1

    # -- root selection ----------------------------------------------------

    def _root_choice(self) -> tuple[int, int]:
        children = self.root.children
        visited = {m: ch for m, ch in children.items() if ch.n >= 2}
        pool = visited or children
        best, best_lcb = None, -math.inf
        for mv in sorted(pool):
            ch = pool[mv]
            if ch.n > 0:
                lcb = -ch.q - LCB_Z * math.sqrt(ch.variance()) / math.sqrt(ch.n)
            else:
                lcb = -math.inf
            if lcb > best_lcb:
                best, best_lcb = mv, lcb
        if best is None:
            best = max(sorted(children), key=lambda m: children[m].prior)
        return best

    def run(self) -> SearchResult:
        p = self.params
        if p.playouts <= 0:
            raise BudgetZeroError("playout budget must be positive")
        start = time.monotonic()
        while self.playouts_done < p.playouts and not self.stop_flag:
            if p.time_limit is not None and self.playouts_done % 64 == 0:
                if time.monotonic() - start > p.time_limit:
                    break
            self._playout()

        if not self.root.children:
            # budget exhausted before the second visit: policy-only move
            ev = self.evaluator.evaluate(self.board)
            moves = self.board.legal_moves(near_only=p.near_only)
            best = max(moves, key=lambda m: (ev.policy[m[0], m[1]], (-m[0], -m[1])))
            return SearchResult(best, [best], ev.value, playouts=self.playouts_done,
                                depth=self.max_depth)

        best = self._root_choice()
        pv = self._principal_variation(best)
        ch = self.root.children[best]
        u = -ch.q if ch.n else 0.0
        win = max(u, 0.0)
        loss = max(-u, 0.0)
        value = (win, loss, 1.0 - win - loss)
        return SearchResult(best, pv, value, nodes=self.root.n,
                            playouts=self.playouts_done, depth=self.max_depth)

    def _principal_variation(self, first: tuple[int, int]) -> list[tuple[int, int]]:
        pv = [first]
        node = self.root.children[first]
        while node.children:
            mv = max(sorted(node.children), key=lambda m: node.children[m].n)
            if node.children[mv].n == 0:
                break
            pv.append(mv)
            node = node.children[mv]
        return pv


def run_search(board: Board, evaluator: Evaluator, params: MctsParams | None = None) -> SearchResult:
    return MctsSearch(board, evaluator, params).run()
