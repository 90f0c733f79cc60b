"""Training harness that learns suitability tiles from exported pair manifests."""

from .data import ManifestError, Pair, load_pairs, subset_pairs
from .evaluate import evaluate
from .train import TrainSettings, train

__version__ = "0.1.0"

__all__ = [
    "ManifestError",
    "Pair",
    "TrainSettings",
    "evaluate",
    "load_pairs",
    "subset_pairs",
    "train",
]
