"""Engine configuration: weight locations, search backend and time control.

Built from plain dicts (JSON-friendly); unknown keys anywhere in the tree are
rejected so typos fail fast instead of silently running defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .alphabeta import AbParams
from .mcts import MctsParams

BACKENDS = ("mcts", "alphabeta")


class ConfigError(ValueError):
    pass


@dataclass
class EngineConfig:
    weights: Optional[str] = None       # MIXW path; None -> built-in seeded net
    codebook_cache: Optional[str] = None
    backend: str = "alphabeta"
    board_size: int = 15
    turn_time_ms: Optional[int] = None
    match_time_ms: Optional[int] = None
    mcts: MctsParams = field(default_factory=MctsParams)
    ab: AbParams = field(default_factory=AbParams)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}, expected one of {BACKENDS}")
        if not (5 <= self.board_size <= 32):
            raise ConfigError(f"board size {self.board_size} outside [5, 32]")
        for name in ("turn_time_ms", "match_time_ms"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        def build(dc_cls, sub: dict):
            names = {f.name for f in dataclasses.fields(dc_cls)}
            unknown = set(sub) - names
            if unknown:
                raise ConfigError(f"unknown {dc_cls.__name__} keys: {sorted(unknown)}")
            return dc_cls(**sub)

        data = dict(data)
        kwargs = {}
        if "mcts" in data:
            kwargs["mcts"] = build(MctsParams, data.pop("mcts"))
        if "ab" in data:
            kwargs["ab"] = build(AbParams, data.pop("ab"))
        top_names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - top_names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs.update(data)
        return cls(**kwargs)
