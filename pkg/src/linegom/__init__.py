"""Gomoku engine with an incrementally updated line-pattern network evaluator.

Feature extraction maps each of the four lines through a cell onto a
precomputed int16 codebook entry; an accumulator keeps the processed feature
map exact under do/undo, and policy/value heads feed either a PUCT tree
search or a principal variation search.
"""

from .board import BLACK, EMPTY, WHITE, Board, GameOutcome
from .heads import Evaluation, HeadWeights
from .mapping import Codebook, MappingWeights, NetConfig, bake_codebook
from .evaluator import Evaluator
from .formats import load_or_bake, load_weights, write_weights

__version__ = "0.1.0"

__all__ = [
    "BLACK", "EMPTY", "WHITE", "Board", "GameOutcome",
    "Evaluation", "HeadWeights", "Codebook", "MappingWeights", "NetConfig",
    "bake_codebook", "Evaluator", "load_or_bake", "load_weights",
    "write_weights", "__version__",
]
