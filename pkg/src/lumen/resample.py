"""Geometric kernel: Gaussian presmoothing, bicubic sampling, rescaling,
and disparity-driven warping of light-field views onto the central view.

All operations extend grids by whole-sample mirroring (index -1 maps to 1),
matching the no-flux boundary treatment of the solver, and are deterministic:
identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import ContractViolation, DisparityField, LightField, View, relative_offset


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 1D Gaussian taps truncated at 3 sigma."""

    sigma: float
    radius: int
    taps: np.ndarray


def make_gaussian_kernel(sigma: float) -> GaussianKernel:
    if sigma < 0:
        raise ContractViolation("sigma must be >= 0")
    if sigma == 0.0:
        return GaussianKernel(0.0, 0, np.array([1.0]))
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (x / sigma) ** 2)
    taps /= taps.sum()
    return GaussianKernel(float(sigma), radius, taps)


def gaussian_smooth(grid: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution with mirrored boundaries."""
    grid = np.asarray(grid, dtype=np.float64)
    if sigma == 0.0:
        return grid.copy()
    kernel = make_gaussian_kernel(sigma)
    out = ndimage.convolve1d(grid, kernel.taps, axis=0, mode="mirror")
    out = ndimage.convolve1d(out, kernel.taps, axis=1, mode="mirror")
    return out


def _smooth_anisotropic(grid: np.ndarray, sigma_y: float, sigma_x: float) -> np.ndarray:
    out = np.asarray(grid, dtype=np.float64)
    if sigma_y > 0.0:
        out = ndimage.convolve1d(out, make_gaussian_kernel(sigma_y).taps, axis=0, mode="mirror")
    if sigma_x > 0.0:
        out = ndimage.convolve1d(out, make_gaussian_kernel(sigma_x).taps, axis=1, mode="mirror")
    return out


def _reflect_indices(idx: np.ndarray, n: int) -> np.ndarray:
    """Whole-sample mirror: ..., 2, 1, 0, 1, 2, ..., n-1, n-2, ..."""
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * n - 2
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx)


def _catmull_rom_weights(t: np.ndarray) -> tuple[np.ndarray, ...]:
    """Weights for samples at offsets -1, 0, 1, 2 from the base index."""
    t2 = t * t
    t3 = t2 * t
    w0 = 0.5 * (-t3 + 2.0 * t2 - t)
    w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0)
    w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t)
    w3 = 0.5 * (t3 - t2)
    return w0, w1, w2, w3


def _bicubic_at(grid: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Catmull-Rom sampling at arbitrary (vectorized) coordinates."""
    h, w = grid.shape
    x0 = np.floor(xs)
    y0 = np.floor(ys)
    tx = xs - x0
    ty = ys - y0
    ix = x0.astype(np.int64)
    iy = y0.astype(np.int64)

    wx = _catmull_rom_weights(tx)
    wy = _catmull_rom_weights(ty)
    cols = [_reflect_indices(ix + k, w) for k in (-1, 0, 1, 2)]
    rows = [_reflect_indices(iy + k, h) for k in (-1, 0, 1, 2)]

    out = np.zeros(np.broadcast(xs, ys).shape, dtype=np.float64)
    for j, (r, wyj) in enumerate(zip(rows, wy)):
        acc = np.zeros_like(out)
        for c, wxi in zip(cols, wx):
            acc += wxi * grid[r, c]
        out += wyj * acc
    return out


def bicubic_sample(grid: np.ndarray, x: float, y: float) -> float:
    """Catmull-Rom bicubic interpolation of a single point.

    Sampling exactly on an interior lattice point returns the stored value.
    Out-of-range coordinates read mirrored samples.
    """
    grid = np.asarray(grid, dtype=np.float64)
    return float(_bicubic_at(grid, np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)))


def _scale_coords(n_target: int, n_source: int) -> np.ndarray:
    """Center-aligned resize map from target pixel index to source coordinate."""
    idx = np.arange(n_target, dtype=np.float64)
    return (idx + 0.5) * (n_source / n_target) - 0.5


def rescale(grid: np.ndarray, target_w: int, target_h: int, presmooth_sigma: float) -> np.ndarray:
    """Resize a grid with anti-alias presmoothing on downscale.

    The per-axis anti-alias sigma is ``presmooth_sigma * sqrt(1/f^2 - 1)``
    for a downscale factor f = target/source < 1; upscaled axes are not
    smoothed. Resampling is bicubic on the center-aligned coordinate map.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if target_w < 1 or target_h < 1:
        raise ContractViolation("target dimensions must be >= 1")
    h, w = grid.shape
    fx = target_w / w
    fy = target_h / h
    sigma_x = presmooth_sigma * math.sqrt(1.0 / fx**2 - 1.0) if fx < 1.0 else 0.0
    sigma_y = presmooth_sigma * math.sqrt(1.0 / fy**2 - 1.0) if fy < 1.0 else 0.0
    smoothed = _smooth_anisotropic(grid, sigma_y, sigma_x)
    if target_w == w and target_h == h and sigma_x == 0.0 and sigma_y == 0.0:
        return smoothed.copy()
    xs = _scale_coords(target_w, w)[None, :]
    ys = _scale_coords(target_h, h)[:, None]
    return _bicubic_at(smoothed, np.broadcast_to(xs, (target_h, target_w)),
                       np.broadcast_to(ys, (target_h, target_w)))


def upscale_disparity(field: DisparityField, target_w: int, target_h: int) -> DisparityField:
    """Bicubic spatial upscaling of a disparity field.

    Values are interpolated, not rescaled; converting them to the finer
    level's pixel units (multiplying by the dimension ratio) is the
    pipeline's job.
    """
    if target_w < field.width or target_h < field.height:
        raise ContractViolation("upscale target must not shrink the field")
    return DisparityField(rescale(field.values, target_w, target_h, 0.0))


def warp_lightfield(lf: LightField, omega: DisparityField) -> tuple[LightField, dict]:
    """Warp every view onto the central view using the current disparity.

    Each pixel x of view theta_i is replaced by the view sampled at
    ``x + relative_offset(theta_i) * omega(x)``. The central view passes
    through unchanged. Returns the warped light-field and a per-view boolean
    grid which is False where the source coordinate left the image rectangle
    (those samples read mirrored data and must not feed the data term).
    """
    if (omega.height, omega.width) != (lf.height, lf.width):
        raise ContractViolation(
            f"disparity grid {omega.width}x{omega.height} does not match "
            f"views {lf.width}x{lf.height}"
        )
    h, w = lf.height, lf.width
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    warped_views: dict = {}
    validity: dict = {}
    for vi in lf.valid_indices():
        view = lf.views[vi]
        if vi == lf.center:
            warped_views[vi] = view
            validity[vi] = np.ones((h, w), dtype=bool)
            continue
        off = relative_offset(vi, lf.center, lf.kappa_k)
        sx = xs + off[0] * omega.values
        sy = ys + off[1] * omega.values
        valid = (sx >= 0.0) & (sx <= w - 1.0) & (sy >= 0.0) & (sy <= h - 1.0)
        channels = np.empty((h, w, 3), dtype=np.float64)
        for c in range(3):
            channels[:, :, c] = _bicubic_at(view.channels[:, :, c], sx, sy)
        warped_views[vi] = View(channels)
        validity[vi] = valid
    warped = LightField(
        views=warped_views, ns=lf.ns, nt=lf.nt, center=lf.center, kappa_k=lf.kappa_k
    )
    return warped, validity
