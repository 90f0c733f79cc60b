"""Checkpoint evaluation: average PSNR/SSIM of generated tiles against targets."""

from __future__ import annotations

import json
from pathlib import Path

import torch

from .data import ManifestError, load_pairs, subset_pairs, to_image, to_tensor
from .metrics import average_metrics
from .networks import UnetGenerator


def load_generator(checkpoint_path) -> UnetGenerator:
    state = torch.load(Path(checkpoint_path), map_location="cpu", weights_only=True)
    generator = UnetGenerator()
    generator.load_state_dict(state["generator"])
    generator.eval()
    return generator


def evaluate(checkpoint_path, manifest_dir, subset: str, out_path=None) -> dict:
    """Average metrics of the generator's predictions over one subset.

    A checkpoint_path of None substitutes each pair's target for the
    prediction; that oracle mode pins the metric ceiling (SSIM 1.0, PSNR at
    the 99 dB cap) and calibrates the reporting path end to end.
    """
    pairs = subset_pairs(load_pairs(manifest_dir), subset)
    if not pairs:
        raise ManifestError(f"{subset} split is empty")
    if checkpoint_path is None:
        predictions = [pair.target for pair in pairs]
    else:
        generator = load_generator(checkpoint_path)
        predictions = []
        with torch.no_grad():
            for pair in pairs:
                output = generator(to_tensor(pair.input).unsqueeze(0))[0]
                predictions.append(to_image(output))
    report = average_metrics(predictions, [pair.target for pair in pairs])
    if out_path is not None:
        Path(out_path).write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return report
