import math

import numpy as np
import pytest

from helpers import ThreatEvaluator, mate_in_one_board
from linegom.board import Board, GameOutcome
from linegom.evaluator import Evaluator
from linegom.mcts import (LCB_Z, BudgetZeroError, MctsParams, MctsSearch,
                          Node, cpuct, run_search, select_child)


def default_params(**kw):
    return MctsParams(**kw)


class TestCpuct:
    def test_zero_visits(self):
        assert cpuct(0, default_params()) == 1.0

    def test_paper_point(self):
        assert cpuct(500, default_params()) == pytest.approx(
            1.0 + 0.4 * math.log(2.0), abs=1e-9)

    def test_monotone(self):
        p = default_params()
        values = [cpuct(n, p) for n in range(0, 5000, 37)]
        assert all(b >= a for a, b in zip(values, values[1:]))


def brute_force_choice(node, p):
    """Independent evaluation of the selection formula."""
    total = sum(ch.n for ch in node.children.values())
    c = p.c_puct_init + p.c_puct_log * math.log(1 + total / p.c_puct_base)
    explored = sum(ch.prior for ch in node.children.values() if ch.n > 0)
    fpu = (node.w / node.n if node.n else 0.0) - p.c_fpu * math.sqrt(explored)
    best, best_score = None, -math.inf
    for mv in sorted(node.children):
        ch = node.children[mv]
        q = (-ch.w / ch.n) if ch.n > 0 else fpu
        score = q + c * ch.prior * math.sqrt(total) / (1 + ch.n)
        if score > best_score:
            best, best_score = mv, score
    return best


class TestSelectChild:
    def test_single_child(self):
        node = Node()
        node.n = 3
        node.children[(4, 4)] = Node(prior=1.0)
        assert select_child(node, default_params()) == (4, 4)

    def test_prior_drives_unvisited(self):
        node = Node()
        node.n = 1
        node.children[(0, 0)] = Node(prior=0.9)
        node.children[(0, 1)] = Node(prior=0.1)
        assert select_child(node, default_params()) == (0, 0)

    def test_matches_brute_force_randomized(self):
        rng = np.random.default_rng(12)
        p = default_params()
        for _ in range(1000):
            node = Node()
            node.n = int(rng.integers(1, 200))
            node.w = float(rng.uniform(-1, 1)) * node.n
            k = int(rng.integers(2, 8))
            priors = rng.dirichlet(np.ones(k))
            for j in range(k):
                ch = Node(prior=float(priors[j]))
                ch.n = int(rng.integers(0, 30))
                ch.w = float(rng.uniform(-1, 1)) * ch.n
                node.children[(j // 3, j % 3)] = ch
            assert select_child(node, p) == brute_force_choice(node, p)


class TestSearch:
    def test_budget_zero(self):
        with pytest.raises(BudgetZeroError):
            run_search(Board(), ThreatEvaluator(), MctsParams(playouts=0))

    def test_budget_one_is_policy_argmax(self):
        b = Board()
        b.place_move(7, 7)
        ev = ThreatEvaluator()
        res = run_search(b, ev, MctsParams(playouts=1))
        policy = ThreatEvaluator().evaluate(b).policy
        legal = b.legal_moves(near_only=True)
        expected = max(legal, key=lambda m: (policy[m[0], m[1]], (-m[0], -m[1])))
        assert res.best_move == expected

    def test_visit_conservation_and_q_bounds(self):
        b = Board()
        b.place_move(7, 7)
        s = MctsSearch(b, ThreatEvaluator(), MctsParams(playouts=200))
        s.run()

        def walk(node):
            if node.children:
                child_sum = sum(ch.n for ch in node.children.values())
                assert node.n == child_sum + 1
            assert -1.0 <= node.q <= 1.0
            for ch in node.children.values():
                if ch.n:
                    walk(ch)
        walk(s.root)

    def test_deterministic(self):
        b = Board()
        b.place_move(7, 7)
        b.place_move(8, 8)
        r1 = run_search(b.clone(), ThreatEvaluator(), MctsParams(playouts=150))
        r2 = run_search(b.clone(), ThreatEvaluator(), MctsParams(playouts=150))
        assert r1.best_move == r2.best_move
        assert r1.pv == r2.pv
        assert r1.value == r2.value

    def test_mate_in_one_dominates(self):
        b = mate_in_one_board()
        s = MctsSearch(b, ThreatEvaluator(), MctsParams(playouts=1000))
        res = s.run()
        assert res.best_move == (7, 6)
        win_child = s.root.children[(7, 6)]
        assert win_child.n / (s.root.n - 1) >= 0.95

    def test_terminal_backprop_exact(self):
        b = mate_in_one_board()
        s = MctsSearch(b, ThreatEvaluator(), MctsParams(playouts=50))
        s.run()
        ch = s.root.children[(7, 6)]
        assert ch.terminal == -1.0  # loss for the side to move below
        assert ch.q == -1.0

    def test_board_restored_after_search(self):
        b = mate_in_one_board()
        stack = list(b.move_stack)
        run_search(b, ThreatEvaluator(), MctsParams(playouts=120))
        assert b.move_stack == stack
        assert b.outcome is GameOutcome.ONGOING

    def test_lcb_prefers_proven_win(self):
        # proven winner (q=+1 from parent view) must beat a proven loser
        b = mate_in_one_board()
        s = MctsSearch(b, ThreatEvaluator(), MctsParams(playouts=400))
        s.run()
        choice = s._root_choice()
        ch = s.root.children[choice]
        assert -ch.q == pytest.approx(1.0)

    def test_works_with_network_evaluator(self, bundle):
        _, heads, codebook = bundle
        b = Board()
        b.place_move(7, 7)
        ev = Evaluator(b, codebook, heads)
        res = run_search(b, ev, MctsParams(playouts=60))
        assert b.cell(*res.best_move) == 0
        assert ev.acc.journal_depth == 0
        assert abs(sum(res.value) - 1.0) < 1e-6
