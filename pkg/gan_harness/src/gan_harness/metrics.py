"""PSNR and windowed SSIM on uint8 tiles.

Definitions match the exporter's metric contract: PSNR over all channels
with peak 255, SSIM on the Rec. 601 gray plane over 11x11 Gaussian windows
(sigma 1.5) at valid positions, and an infinite PSNR clamped to 99 dB when
averaging across pairs.
"""

from __future__ import annotations

import math

import numpy as np

C1 = (0.01 * 255.0) ** 2
C2 = (0.03 * 255.0) ** 2
PSNR_CAP_DB = 99.0
WINDOW = 11
SIGMA = 1.5


def luma(image: np.ndarray) -> np.ndarray:
    """Rec. 601 gray plane of an (h, w, 3) uint8 image; fractions of .5 round up."""
    rgb = image.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.floor(y + 0.5)


def _check_comparable(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"images are not comparable: {a.shape} vs {b.shape}")


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB over every sample; identical gives +inf."""
    _check_comparable(a, b)
    diff = a.astype(np.float64) - b.astype(np.float64)
    err = float(np.mean(diff * diff))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / err)


def clamp_psnr(value: float, cap: float = PSNR_CAP_DB) -> float:
    return cap if math.isinf(value) else value


def _gaussian() -> np.ndarray:
    half = (WINDOW - 1) / 2.0
    coords = np.arange(WINDOW, dtype=np.float64) - half
    g = np.exp(-(coords**2) / (2.0 * SIGMA * SIGMA))
    return g / g.sum()


def _smooth(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # The 2-D window is an outer product, so filter rows then columns.
    rows = np.apply_along_axis(lambda r: np.convolve(r, g, mode="valid"), 1, x)
    return np.apply_along_axis(lambda c: np.convolve(c, g, mode="valid"), 0, rows)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over Gaussian windows fully inside the image."""
    _check_comparable(a, b)
    x = luma(a)
    y = luma(b)
    if min(x.shape) < WINDOW:
        raise ValueError(f"windowed SSIM needs both dimensions >= {WINDOW}, got {x.shape}")
    g = _gaussian()
    # The separable weights sum to 1, so these are weighted first and second
    # moments per window; population variances follow.
    mu_x = _smooth(x, g)
    mu_y = _smooth(y, g)
    var_x = _smooth(x * x, g) - mu_x * mu_x
    var_y = _smooth(y * y, g) - mu_y * mu_y
    cov = _smooth(x * y, g) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + C1) * (2.0 * cov + C2)
    den = (mu_x * mu_x + mu_y * mu_y + C1) * (var_x + var_y + C2)
    return float((num / den).mean())


def average_metrics(predictions: list[np.ndarray], targets: list[np.ndarray]) -> dict:
    """Mean clamped PSNR and mean SSIM over aligned prediction/target lists."""
    if len(predictions) != len(targets):
        raise ValueError(
            f"prediction and target counts differ: {len(predictions)} vs {len(targets)}"
        )
    if not predictions:
        raise ValueError("no image pairs to average over")
    psnrs = [clamp_psnr(psnr(p, t)) for p, t in zip(predictions, targets)]
    ssims = [ssim(p, t) for p, t in zip(predictions, targets)]
    return {
        "psnr_avg": float(np.mean(psnrs)),
        "ssim_avg": float(np.mean(ssims)),
    }
