"""Image comparison metrics: MSE, PSNR, and SSIM (global or windowed)."""

from __future__ import annotations

import math

import numpy as np

from .images import ImageBuf

_C1 = (0.01 * 255.0) ** 2
_C2 = (0.03 * 255.0) ** 2

PSNR_CAP_DB = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


def _check_comparable(a: ImageBuf, b: ImageBuf) -> None:
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise ValueError(
            f"images are not comparable: {a.width}x{a.height}x{a.channels} "
            f"vs {b.width}x{b.height}x{b.channels}"
        )


def mse(a: ImageBuf, b: ImageBuf) -> float:
    """Mean squared error over every sample (all channels)."""
    _check_comparable(a, b)
    diff = a.samples.astype(np.float64) - b.samples.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(a: ImageBuf, b: ImageBuf, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; identical images give +inf."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def clamp_psnr(value: float, cap: float = PSNR_CAP_DB) -> float:
    """Replace an infinite PSNR with the reporting cap (for averaging)."""
    return cap if math.isinf(value) else value


def gaussian_kernel(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Separable 2-D Gaussian, normalized to sum to 1."""
    half = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(coords**2) / (2.0 * sigma * sigma))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def _ssim_terms(mu_a, mu_b, var_a, var_b, cov):
    num = (2.0 * mu_a * mu_b + _C1) * (2.0 * cov + _C2)
    den = (mu_a * mu_a + mu_b * mu_b + _C1) * (var_a + var_b + _C2)
    return num / den


def ssim_global(a: ImageBuf, b: ImageBuf) -> float:
    """Single-window SSIM over the whole image, population moments."""
    _check_comparable(a, b)
    x = a.to_gray().samples[:, :, 0].astype(np.float64)
    y = b.to_gray().samples[:, :, 0].astype(np.float64)
    mu_a = x.mean()
    mu_b = y.mean()
    var_a = (x * x).mean() - mu_a * mu_a
    var_b = (y * y).mean() - mu_b * mu_b
    cov = (x * y).mean() - mu_a * mu_b
    return float(_ssim_terms(mu_a, mu_b, var_a, var_b, cov))


def ssim_windowed(a: ImageBuf, b: ImageBuf) -> float:
    """Mean of the SSIM map over 11x11 Gaussian windows, valid positions only."""
    _check_comparable(a, b)
    if min(a.width, a.height) < SSIM_WINDOW:
        raise ValueError(
            f"windowed SSIM needs both dimensions >= {SSIM_WINDOW}, "
            f"got {a.width}x{a.height}"
        )
    x = a.to_gray().samples[:, :, 0].astype(np.float64)
    y = b.to_gray().samples[:, :, 0].astype(np.float64)
    kernel = gaussian_kernel()

    win_x = np.lib.stride_tricks.sliding_window_view(x, (SSIM_WINDOW, SSIM_WINDOW))
    win_y = np.lib.stride_tricks.sliding_window_view(y, (SSIM_WINDOW, SSIM_WINDOW))
    mu_a = np.einsum("ijkl,kl->ij", win_x, kernel)
    mu_b = np.einsum("ijkl,kl->ij", win_y, kernel)
    e_aa = np.einsum("ijkl,kl->ij", win_x * win_x, kernel)
    e_bb = np.einsum("ijkl,kl->ij", win_y * win_y, kernel)
    e_ab = np.einsum("ijkl,kl->ij", win_x * win_y, kernel)
    var_a = e_aa - mu_a * mu_a
    var_b = e_bb - mu_b * mu_b
    cov = e_ab - mu_a * mu_b
    return float(_ssim_terms(mu_a, mu_b, var_a, var_b, cov).mean())


def ssim(a: ImageBuf, b: ImageBuf, mode: str = "auto") -> float:
    """SSIM in the requested mode.

    "auto" picks windowed when both dimensions reach the window size and
    falls back to global for smaller images.
    """
    if mode == "auto":
        mode = "windowed" if min(a.width, a.height) >= SSIM_WINDOW else "global"
    if mode == "windowed":
        return ssim_windowed(a, b)
    if mode == "global":
        return ssim_global(a, b)
    raise ValueError(f"unknown SSIM mode {mode!r}")
