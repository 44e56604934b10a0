"""Occlusion detection and guided median filtering of the disparity field.

Occlusion can only happen at depth discontinuities, so suspected regions are
found by thresholding the box-filtered squared disparity gradient; the box
filter widens the band so the whole neighborhood of an edge is treated. The
disparity inside the band is then replaced by a weighted median whose weights
come from color similarity in the central view, which snaps disparity edges
onto the image edges of the reference view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import ContractViolation, DisparityField, View


@dataclass(frozen=True)
class GuidedMedianConfig:
    window_radius: int = 7
    sigma_color: float = 0.1
    sigma_spatial: float | None = None  # resolved to half the window radius
    occlusion_threshold: float = 0.01
    box_radius: int = 5

    def __post_init__(self):
        if self.window_radius < 1:
            raise ContractViolation("window_radius must be >= 1")
        if self.sigma_color <= 0:
            raise ContractViolation("sigma_color must be > 0")
        if self.sigma_spatial is None:
            object.__setattr__(self, "sigma_spatial", 0.5 * self.window_radius)
        if self.sigma_spatial <= 0:
            raise ContractViolation("sigma_spatial must be > 0")
        if self.box_radius < 0:
            raise ContractViolation("box_radius must be >= 0")


@dataclass(frozen=True)
class OcclusionMask:
    mask: np.ndarray  # boolean (H, W)
    threshold_used: float
    box_radius: int


def detect_occlusion(omega: DisparityField, cfg: GuidedMedianConfig) -> OcclusionMask:
    """Threshold the box-expanded squared disparity gradient.

    Gradients use plain central differences; the box filter is normalized,
    so the threshold is in units of mean squared gradient.
    """
    stencil = np.array([-0.5, 0.0, 0.5])
    gx = ndimage.correlate1d(omega.values, stencil, axis=1, mode="mirror")
    gy = ndimage.correlate1d(omega.values, stencil, axis=0, mode="mirror")
    response = ndimage.uniform_filter(
        gx * gx + gy * gy, size=2 * cfg.box_radius + 1, mode="mirror"
    )
    return OcclusionMask(
        mask=response > cfg.occlusion_threshold,
        threshold_used=cfg.occlusion_threshold,
        box_radius=cfg.box_radius,
    )


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    cw = np.cumsum(weights[order])
    total = cw[-1]
    if total <= 0.0:
        return float(values[len(values) // 2])
    idx = int(np.searchsorted(cw, 0.5 * total))
    return float(v[min(idx, len(v) - 1)])


def guided_median(
    omega: DisparityField,
    mask: OcclusionMask,
    guide: View,
    cfg: GuidedMedianConfig,
) -> DisparityField:
    """Replace masked pixels by the guide-weighted median of their window.

    Weights are bilateral: a Gaussian on guide color distance times a
    Gaussian on spatial distance. Unmasked pixels pass through untouched;
    every output value is drawn from the input window, so no new disparity
    values are invented. Reads only the input field (no sequential
    dependency between masked pixels).
    """
    h, w = omega.values.shape
    if mask.mask.shape != (h, w):
        raise ContractViolation("mask dimensions do not match the disparity field")
    if (guide.height, guide.width) != (h, w):
        raise ContractViolation("guide view dimensions do not match the disparity field")

    r = cfg.window_radius
    inv_2sc2 = 1.0 / (2.0 * cfg.sigma_color**2)
    inv_2ss2 = 1.0 / (2.0 * cfg.sigma_spatial**2)
    src = omega.values
    out = src.copy()
    guide_img = guide.channels

    for i, j in np.argwhere(mask.mask):
        i0, i1 = max(0, i - r), min(h, i + r + 1)
        j0, j1 = max(0, j - r), min(w, j + r + 1)
        patch = src[i0:i1, j0:j1]
        color_d2 = ((guide_img[i0:i1, j0:j1] - guide_img[i, j]) ** 2).sum(axis=2)
        di = np.arange(i0, i1, dtype=np.float64)[:, None] - i
        dj = np.arange(j0, j1, dtype=np.float64)[None, :] - j
        spatial_d2 = di * di + dj * dj
        weights = np.exp(-color_d2 * inv_2sc2 - spatial_d2 * inv_2ss2)
        out[i, j] = _weighted_median(patch.ravel(), weights.ravel())
    return DisparityField(out)
