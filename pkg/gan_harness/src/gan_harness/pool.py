"""Replay buffer of past generator outputs for discriminator updates."""

from __future__ import annotations

import random

import torch


class ImagePool:
    """Keeps up to `capacity` generated samples; once full, each query swaps
    the fresh sample for a buffered one with probability one half.

    Feeding the discriminator a mix of current and historical fakes damps
    oscillation between the two players.
    """

    def __init__(self, capacity: int, seed: int = 0):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self._rng = random.Random(seed)
        self._images: list[torch.Tensor] = []

    def __len__(self) -> int:
        return len(self._images)

    def query(self, batch: torch.Tensor) -> torch.Tensor:
        if self.capacity == 0:
            return batch
        out = []
        for image in batch:
            image = image.unsqueeze(0)
            if len(self._images) < self.capacity:
                self._images.append(image.clone())
                out.append(image)
            elif self._rng.random() < 0.5:
                index = self._rng.randrange(self.capacity)
                out.append(self._images[index])
                self._images[index] = image.clone()
            else:
                out.append(image)
        return torch.cat(out, dim=0)
