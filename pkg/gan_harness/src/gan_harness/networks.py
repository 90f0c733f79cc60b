"""Pix2Pix networks: 8-level U-Net generator and 70x70 PatchGAN discriminator.

Layer layout, normalization placement, and the normal(0, 0.02) weight init
follow the Isola et al. reference architecture for 256x256 images.
"""

from __future__ import annotations

import torch
from torch import nn

NGF = 64  # generator filters after the first convolution
NDF = 64  # discriminator filters after the first convolution
INIT_STD = 0.02


def init_weights(module: nn.Module) -> None:
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.normal_(module.weight, 0.0, INIT_STD)
        if module.bias is not None:
            nn.init.zeros_(module.bias)
    elif isinstance(module, nn.BatchNorm2d):
        nn.init.normal_(module.weight, 1.0, INIT_STD)
        nn.init.zeros_(module.bias)


class _UnetBlock(nn.Module):
    """One encoder/decoder ring; inner rings nest inside, skips concat on channels."""

    def __init__(
        self,
        outer_ch: int,
        inner_ch: int,
        in_ch: int | None = None,
        submodule: nn.Module | None = None,
        outermost: bool = False,
        innermost: bool = False,
        dropout: bool = False,
    ):
        super().__init__()
        self.outermost = outermost
        if in_ch is None:
            in_ch = outer_ch
        # Convolutions feeding a batch norm carry no bias; the outermost
        # decoder convolution has no norm after it and keeps one.
        down_conv = nn.Conv2d(in_ch, inner_ch, 4, stride=2, padding=1, bias=False)
        down_relu = nn.LeakyReLU(0.2, inplace=True)
        up_relu = nn.ReLU(inplace=True)

        if outermost:
            up_conv = nn.ConvTranspose2d(inner_ch * 2, outer_ch, 4, stride=2, padding=1)
            layers = [down_conv, submodule, up_relu, up_conv, nn.Tanh()]
        elif innermost:
            # The bottleneck reaches 1x1 spatial size, so no norm on either side
            # of the innermost convolution pair's encoder half.
            up_conv = nn.ConvTranspose2d(inner_ch, outer_ch, 4, stride=2, padding=1, bias=False)
            layers = [down_relu, down_conv, up_relu, up_conv, nn.BatchNorm2d(outer_ch)]
        else:
            up_conv = nn.ConvTranspose2d(inner_ch * 2, outer_ch, 4, stride=2, padding=1, bias=False)
            layers = [
                down_relu,
                down_conv,
                nn.BatchNorm2d(inner_ch),
                submodule,
                up_relu,
                up_conv,
                nn.BatchNorm2d(outer_ch),
            ]
            if dropout:
                layers.append(nn.Dropout(0.5))
        self.model = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.outermost:
            return self.model(x)
        return torch.cat([x, self.model(x)], dim=1)


class UnetGenerator(nn.Module):
    """256 -> 1 -> 256 U-Net with skip connections and tanh output."""

    def __init__(self, in_ch: int = 3, out_ch: int = 3, ngf: int = NGF):
        super().__init__()
        block = _UnetBlock(ngf * 8, ngf * 8, innermost=True)
        for _ in range(3):  # the three 512-channel rings carry dropout
            block = _UnetBlock(ngf * 8, ngf * 8, submodule=block, dropout=True)
        block = _UnetBlock(ngf * 4, ngf * 8, submodule=block)
        block = _UnetBlock(ngf * 2, ngf * 4, submodule=block)
        block = _UnetBlock(ngf, ngf * 2, submodule=block)
        self.model = _UnetBlock(out_ch, ngf, in_ch=in_ch, submodule=block, outermost=True)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)


class PatchDiscriminator(nn.Module):
    """Three strided stages then two stride-1 stages: a 70x70 receptive field.

    Input is the conditioning tile concatenated with the candidate tile on
    channels; output is a logit per patch (30x30 for 256x256 tiles).
    """

    def __init__(self, in_ch: int = 6, ndf: int = NDF):
        super().__init__()
        self.model = nn.Sequential(
            nn.Conv2d(in_ch, ndf, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(ndf, ndf * 2, 4, stride=2, padding=1, bias=False),
            nn.BatchNorm2d(ndf * 2),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(ndf * 2, ndf * 4, 4, stride=2, padding=1, bias=False),
            nn.BatchNorm2d(ndf * 4),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(ndf * 4, ndf * 8, 4, stride=1, padding=1, bias=False),
            nn.BatchNorm2d(ndf * 8),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(ndf * 8, 1, 4, stride=1, padding=1),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)
