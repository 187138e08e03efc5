#!/usr/bin/env python3
"""Regenerate the frozen test position suites under tests/data/.

Deterministic (fixed seeds); run only when the suite layout changes, then
review the diff.  Suites:
  oracle_suite.txt    20 quiet midgame positions (search-score oracle tests)
  tactical_suite.txt  30 positions with a forced mate for the side to move
  vcf_suite.txt       forced wins by chains of four threats
"""

from pathlib import Path

import numpy as np

from linegom.alphabeta import AbParams, AbSearch, five_points
from linegom.board import Board, GameOutcome

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def random_quiet(rng, size, plies_lo, plies_hi, max_cands):
    while True:
        b = Board(size, size)
        for _ in range(int(rng.integers(plies_lo, plies_hi + 1))):
            moves = b.legal_moves(near_only=True)
            b.place_move(*moves[int(rng.integers(len(moves)))])
            if b.outcome is not GameOutcome.ONGOING:
                break
        if b.outcome is not GameOutcome.ONGOING:
            continue
        if five_points(b, 1) or five_points(b, 2):
            continue  # keep the oracle suite free of immediate tactics
        if len(b.legal_moves(near_only=True)) > max_cands:
            continue
        return b


def make_oracle_suite(rng):
    return [random_quiet(rng, 11, 6, 12, 30) for _ in range(20)]


DIRS = ((0, 1), (1, 0), (1, 1), (1, -1))


def _build(size, blacks, whites):
    """Board from explicit stone lists (black to move); None if unreachable."""
    if len(blacks) != len(whites):
        return None
    cells = set(blacks) | set(whites)
    if len(cells) != len(blacks) + len(whites):
        return None
    b = Board(size, size)
    try:
        for i in range(len(blacks) + len(whites)):
            r, c = blacks[i // 2] if i % 2 == 0 else whites[i // 2]
            b.place_move(r, c)
    except Exception:
        return None
    if b.outcome is not GameOutcome.ONGOING:
        return None
    return b


def _far_fillers(rng, size, taken, count, away_from):
    out = []
    tries = 0
    while len(out) < count and tries < 500:
        tries += 1
        r, c = int(rng.integers(size)), int(rng.integers(size))
        if (r, c) in taken or (r, c) in out:
            continue
        if abs(r - away_from[0]) + abs(c - away_from[1]) < 7:
            continue
        if any(abs(r - fr) <= 1 and abs(c - fc) <= 1 for fr, fc in out):
            continue  # keep fillers isolated so they add no threats
        out.append((r, c))
    return out if len(out) == count else None


def make_tactical_suite(rng):
    boards = []
    # 20 mate-in-1: a black four, blocked on one end, open on the other
    while len(boards) < 20:
        d = DIRS[int(rng.integers(4))]
        r0, c0 = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        seg = [(r0 + k * d[0], c0 + k * d[1]) for k in range(4)]
        block = (r0 + 4 * d[0], c0 + 4 * d[1])
        winp = (r0 - d[0], c0 - d[1])
        cells = seg + [block, winp]
        if not all(0 <= r < 15 and 0 <= c < 15 for r, c in cells):
            continue
        fill = _far_fillers(rng, 15, set(seg) | {block, winp}, 3, seg[0])
        if fill is None:
            continue
        b = _build(15, seg, [block] + fill)
        if b is None or not five_points(b, 1) or five_points(b, 2):
            continue
        boards.append(b)
    # 10 mate-in-3: a black open three with room for an open four on each end
    while len(boards) < 30:
        d = DIRS[int(rng.integers(4))]
        r0, c0 = int(rng.integers(3, 11)), int(rng.integers(3, 11))
        seg = [(r0 + k * d[0], c0 + k * d[1]) for k in range(3)]
        room = [(r0 - 2 * d[0], c0 - 2 * d[1]), (r0 - d[0], c0 - d[1]),
                (r0 + 3 * d[0], c0 + 3 * d[1]), (r0 + 4 * d[0], c0 + 4 * d[1])]
        if not all(0 <= r < 15 and 0 <= c < 15 for r, c in seg + room):
            continue
        fill = _far_fillers(rng, 15, set(seg) | set(room), 3, seg[0])
        if fill is None:
            continue
        b = _build(15, seg, fill)
        if b is None or five_points(b, 1) or five_points(b, 2):
            continue
        boards.append(b)
    return boards


def make_vcf_suite(rng):
    boards = []
    # crossing open threes: the shared extension creates a double four
    while len(boards) < 4:
        r0, c0 = int(rng.integers(4, 10)), int(rng.integers(4, 10))
        horiz = [(r0, c0 + k) for k in (1, 2, 3)]
        vert = [(r0 + k, c0) for k in (1, 2, 3)]
        key = (r0, c0)  # completing cell shared by both lines
        need = horiz + vert + [key, (r0, c0 + 4), (r0 + 4, c0)]
        if not all(0 <= r < 15 and 0 <= c < 15 for r, c in need):
            continue
        fill = _far_fillers(rng, 15, set(need), 6, key)
        if fill is None:
            continue
        b = _build(15, horiz + vert, fill)
        if b is None or five_points(b, 1) or five_points(b, 2):
            continue
        boards.append(b)
    # curated from random play: keep positions where VCF proves a chain of
    # at least two consecutive fours for the side to move
    probe_rng = np.random.default_rng(0xFC5)
    tries = 0
    while len(boards) < 10 and tries < 20000:
        tries += 1
        b = Board()
        for _ in range(int(probe_rng.integers(14, 31))):
            moves = b.legal_moves(near_only=True)
            b.place_move(*moves[int(probe_rng.integers(len(moves)))])
            if b.outcome is not GameOutcome.ONGOING:
                break
        if b.outcome is not GameOutcome.ONGOING:
            continue
        if five_points(b, b.side_to_move):
            continue  # mate-in-1, not a chain
        search = AbSearch(b, evaluator=None, params=AbParams())
        score = search._vcf_prove(b.side_to_move, 0, [100_000])
        if score is None or score > 30000 - 3:
            continue
        boards.append(b.clone())
    return boards


def dump(path, boards):
    path.write_text("\n---\n".join(b.to_text() for b in boards) + "\n")
    print(f"{path.name}: {len(boards)} positions")


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    dump(DATA / "oracle_suite.txt", make_oracle_suite(np.random.default_rng(11)))
    dump(DATA / "tactical_suite.txt", make_tactical_suite(np.random.default_rng(22)))
    dump(DATA / "vcf_suite.txt", make_vcf_suite(np.random.default_rng(33)))


if __name__ == "__main__":
    main()
