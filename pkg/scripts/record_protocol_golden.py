#!/usr/bin/env python3
"""Record the protocol golden transcript (tests/data/protocol_golden.txt).

The replayed configuration is fixed: built-in seeded net, alpha-beta at
depth 2, no clock, so every response is deterministic.  Regenerate only when
the protocol surface intentionally changes, and review the diff.
"""

from pathlib import Path

from linegom.config import EngineConfig
from linegom.protocol import GomocupProtocol

COMMANDS = [
    "START 15",
    "ABOUT",
    "INFO max_memory 83886080",
    "BEGIN",
    "TURN 8,8",
    "TURN 8,8",
    "RESTART",
    "BOARD",
    "7,7,2",
    "8,8,1",
    "DONE",
    "NOSUCH x",
    "END",
]


def golden_config() -> EngineConfig:
    return EngineConfig.from_dict({"backend": "alphabeta", "ab": {"max_depth": 2}})


def main():
    proto = GomocupProtocol(golden_config())
    lines = []
    for cmd in COMMANDS:
        lines.append(f"> {cmd}")
        for resp in proto.handle_line(cmd):
            lines.append(f"< {resp}")
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "protocol_golden.txt"
    out.write_text("\n".join(lines) + "\n")
    print(out.read_text())


if __name__ == "__main__":
    main()
