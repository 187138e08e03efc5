"""Gomocup-style line protocol over stdin/stdout.

Coordinates on the wire are `x,y` = column,row (Gomocup convention);
internally everything is row,col, so this module is the only place the swap
happens.  Malformed or unknown input produces an `ERROR <message>` line and
the loop continues; only END terminates it.
"""

from __future__ import annotations

import sys
from typing import Optional, TextIO

from . import __version__
from .board import BoardError
from .config import EngineConfig
from .engine import Engine

ABOUT = (f'name="linegom", version="{__version__}", '
         'author="linegom developers", country="XX"')

INFO_KEYS = {"timeout_turn", "timeout_match", "time_left", "max_memory",
             "game_type", "rule", "folder"}


class GomocupProtocol:
    """Feed lines in, collect response lines; `running` drops after END."""

    def __init__(self, config: EngineConfig | None = None, engine: Engine | None = None):
        self.config = config or EngineConfig()
        self.engine = engine or Engine(self.config)
        self.running = True
        self._board_lines: Optional[list[tuple[int, int, int]]] = None

    # -- plumbing ----------------------------------------------------------

    def handle_line(self, line: str) -> list[str]:
        line = line.strip()
        if not line:
            return []
        if self._board_lines is not None:
            return self._board_entry(line)
        parts = line.split(None, 1)
        cmd = parts[0].upper()
        arg = parts[1] if len(parts) > 1 else ""
        handler = getattr(self, f"_cmd_{cmd.lower()}", None)
        if handler is None:
            return [f"ERROR unknown command {cmd}"]
        try:
            return handler(arg)
        except (BoardError, ValueError) as exc:
            return [f"ERROR {exc}"]

    def loop(self, inp: TextIO = sys.stdin, out: TextIO = sys.stdout) -> None:
        for line in inp:
            for resp in self.handle_line(line):
                out.write(resp + "\n")
                out.flush()
            if not self.running:
                break

    def _reply_move(self) -> str:
        row, col = self.engine.genmove(time_budget=self._budget())
        return f"{col},{row}"

    def _budget(self) -> Optional[float]:
        ms = self.config.turn_time_ms
        return None if ms is None else max(ms / 1000.0 * 0.9 - 0.05, 0.01)

    def _parse_coord(self, text: str) -> tuple[int, int]:
        try:
            x_s, y_s = text.split(",")
            x, y = int(x_s), int(y_s)
        except ValueError:
            raise ValueError(f"expected x,y coordinate, got {text!r}") from None
        return y, x  # wire order is col,row

    # -- commands ----------------------------------------------------------

    def _cmd_start(self, arg: str) -> list[str]:
        size = int(arg)
        if not 5 <= size <= 32:
            return [f"ERROR unsupported size {size}"]
        self.engine.new_game(size)
        return ["OK"]

    def _cmd_restart(self, arg: str) -> list[str]:
        self.engine.new_game(self.engine.board.h)
        return ["OK"]

    def _cmd_begin(self, arg: str) -> list[str]:
        return [self._reply_move()]

    def _cmd_turn(self, arg: str) -> list[str]:
        row, col = self._parse_coord(arg)
        self.engine.play(row, col)
        return [self._reply_move()]

    def _cmd_board(self, arg: str) -> list[str]:
        self._board_lines = []
        return []

    def _board_entry(self, line: str) -> list[str]:
        if line.upper() == "DONE":
            entries, self._board_lines = self._board_lines, None
            own = [(r, c) for r, c, who in entries if who == 1]
            opp = [(r, c) for r, c, who in entries if who == 2]
            self.engine.load_stones(own, opp, size=self.engine.board.h)
            return [self._reply_move()]
        try:
            x_s, y_s, who_s = line.split(",")
            x, y, who = int(x_s), int(y_s), int(who_s)
            if who not in (1, 2):
                raise ValueError
        except ValueError:
            self._board_lines = None
            return [f"ERROR bad board entry {line!r}"]
        self._board_lines.append((y, x, who))
        return []

    def _cmd_info(self, arg: str) -> list[str]:
        parts = arg.split(None, 1)
        if len(parts) != 2:
            return ["ERROR info needs a key and a value"]
        key, value = parts[0].lower(), parts[1]
        if key not in INFO_KEYS:
            return []  # unknown info keys are ignored per convention
        if key == "timeout_turn":
            self.config.turn_time_ms = int(value) or None
        elif key in ("timeout_match", "time_left"):
            self.engine.time_left_ms = int(value) or None
        return []

    def _cmd_about(self, arg: str) -> list[str]:
        return [ABOUT]

    def _cmd_end(self, arg: str) -> list[str]:
        self.running = False
        return []


def protocol_loop(config: EngineConfig | None = None) -> None:
    GomocupProtocol(config).loop()
