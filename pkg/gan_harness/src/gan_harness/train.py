"""Conditional adversarial training on exported tile pairs.

One optimization step trains the discriminator on real (input, target)
composites against buffered fakes, then the generator on the adversarial
term plus an L1 reconstruction term weighted by 100, per the reference
Pix2Pix recipe (Adam at 2e-4 with beta1 0.5).
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .data import ManifestError, load_pairs, subset_pairs, to_tensor
from .networks import PatchDiscriminator, UnetGenerator, init_weights
from .pool import ImagePool

LEARNING_RATE = 2e-4
ADAM_BETAS = (0.5, 0.999)
LAMBDA_L1 = 100.0

CHECKPOINT_NAME = "checkpoint.pt"
LOG_NAME = "train_log.jsonl"


@dataclass(frozen=True)
class TrainSettings:
    """Loop controls; 200 epochs is the full-scale run, 2 the smoke default."""

    epochs: int = 2
    batch_size: int = 2
    buffer_size: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.buffer_size < 0:
            raise ValueError(f"buffer_size must be >= 0, got {self.buffer_size}")


def batch_schedule(pair_ids: list[str], settings: TrainSettings) -> list[list[list[str]]]:
    """Per-epoch batches: a fresh seeded shuffle each epoch, chunked in order.

    The schedule is a pure function of the ids and settings, which pins the
    dataset order for a given seed.
    """
    rng = random.Random(settings.seed)
    epochs = []
    for _ in range(settings.epochs):
        order = list(pair_ids)
        rng.shuffle(order)
        epochs.append(
            [order[i : i + settings.batch_size] for i in range(0, len(order), settings.batch_size)]
        )
    return epochs


def train(manifest_dir, settings: TrainSettings, out_dir) -> Path:
    """Train on the manifest's train split; returns the checkpoint path.

    Writes checkpoint.pt and a JSON-lines loss log under out_dir. The pair
    directory itself is read-only to the harness.
    """
    pairs = subset_pairs(load_pairs(manifest_dir), "train")
    if not pairs:
        raise ManifestError("train split is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(settings.seed)
    generator = UnetGenerator()
    discriminator = PatchDiscriminator()
    generator.apply(init_weights)
    discriminator.apply(init_weights)
    generator.train()
    discriminator.train()

    opt_g = torch.optim.Adam(generator.parameters(), lr=LEARNING_RATE, betas=ADAM_BETAS)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=LEARNING_RATE, betas=ADAM_BETAS)
    adversarial = nn.BCEWithLogitsLoss()
    reconstruction = nn.L1Loss()
    pool = ImagePool(settings.buffer_size, settings.seed)

    by_id = {pair.pair_id: pair for pair in pairs}
    schedule = batch_schedule(sorted(by_id), settings)

    log_path = out_dir / LOG_NAME
    with log_path.open("w", encoding="utf-8") as log:
        for epoch, batches in enumerate(schedule):
            for step, batch_ids in enumerate(batches):
                inputs = torch.stack([to_tensor(by_id[i].input) for i in batch_ids])
                targets = torch.stack([to_tensor(by_id[i].target) for i in batch_ids])
                fakes = generator(inputs)

                opt_d.zero_grad()
                real_pair = torch.cat([inputs, targets], dim=1)
                fake_pair = pool.query(torch.cat([inputs, fakes], dim=1).detach())
                pred_real = discriminator(real_pair)
                pred_fake = discriminator(fake_pair)
                loss_d = 0.5 * (
                    adversarial(pred_real, torch.ones_like(pred_real))
                    + adversarial(pred_fake, torch.zeros_like(pred_fake))
                )
                loss_d.backward()
                opt_d.step()

                opt_g.zero_grad()
                pred_fake = discriminator(torch.cat([inputs, fakes], dim=1))
                loss_gan = adversarial(pred_fake, torch.ones_like(pred_fake))
                loss_l1 = reconstruction(fakes, targets)
                loss_g = loss_gan + LAMBDA_L1 * loss_l1
                loss_g.backward()
                opt_g.step()

                record = {
                    "epoch": epoch,
                    "step": step,
                    "pairs": batch_ids,
                    "loss_d": loss_d.item(),
                    "loss_g": loss_g.item(),
                    "loss_g_gan": loss_gan.item(),
                    "loss_g_l1": loss_l1.item(),
                }
                log.write(json.dumps(record, sort_keys=True) + "\n")

    checkpoint_path = out_dir / CHECKPOINT_NAME
    torch.save(
        {
            "generator": generator.state_dict(),
            "discriminator": discriminator.state_dict(),
            "settings": asdict(settings),
        },
        checkpoint_path,
    )
    return checkpoint_path
