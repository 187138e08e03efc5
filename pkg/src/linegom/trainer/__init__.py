"""Torch training counterpart of the integer inference pipeline."""

from .model import TrainNet, board_planes
from .train import toy_dataset, toy_run, total_loss, train

__all__ = ["TrainNet", "board_planes", "toy_dataset", "toy_run",
           "total_loss", "train"]
