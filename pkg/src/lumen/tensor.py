"""Per-pixel motion tensors built from spatial and directional derivatives.

For each non-central view the constancy residual is linearized into a
2-vector d = (offset . grad L, L_i - L_0); summing the outer products d d^T
over views gives a symmetric 2x2 tensor per pixel and channel. The quadratic
form (w^T J w with w = (omega, 1)) measures how badly a trial disparity
violates the constancy assumption. Intensity and gradient constancy each get
their own tensor stack; the robustified combination of both is the joint
tensor consumed by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import (
    ColorSpace,
    ContractViolation,
    DataError,
    DisparityField,
    LightField,
    relative_offset,
)

# Shared default for the robustification epsilons (0.001 squared).
DEFAULT_EPSILON = 1e-6

# Fourth-order central difference, offsets -2..2.
_GRAD_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class MotionTensor2:
    """Entries of one symmetric 2x2 motion tensor."""

    j11: float
    j12: float
    j22: float


@dataclass(frozen=True)
class TensorField:
    """Per-channel tensor grids for the intensity and gradient terms.

    Arrays are shaped (3, H, W), channel-major. ``view_count`` records how
    many valid non-central views contributed at each pixel (diagnostic only;
    tensor entries are raw sums, never averages).
    """

    jg11: np.ndarray
    jg12: np.ndarray
    jg22: np.ndarray
    jG11: np.ndarray
    jG12: np.ndarray
    jG22: np.ndarray
    view_count: np.ndarray
    color_space: ColorSpace

    @property
    def height(self) -> int:
        return self.jg11.shape[1]

    @property
    def width(self) -> int:
        return self.jg11.shape[2]

    def intensity_tensor_at(self, channel: int, row: int, col: int) -> MotionTensor2:
        return MotionTensor2(
            float(self.jg11[channel, row, col]),
            float(self.jg12[channel, row, col]),
            float(self.jg22[channel, row, col]),
        )

    def gradient_tensor_at(self, channel: int, row: int, col: int) -> MotionTensor2:
        return MotionTensor2(
            float(self.jG11[channel, row, col]),
            float(self.jG12[channel, row, col]),
            float(self.jG22[channel, row, col]),
        )


def spatial_gradient(grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order central-difference gradient (gx, gy), unit grid spacing.

    Boundaries are mirrored; the stencil is exact for polynomials up to
    degree 4 on interior pixels.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape[0] < 5 or grid.shape[1] < 5:
        raise ContractViolation("spatial_gradient needs a grid at least 5x5")
    gx = ndimage.correlate1d(grid, _GRAD_STENCIL, axis=1, mode="mirror")
    gy = ndimage.correlate1d(grid, _GRAD_STENCIL, axis=0, mode="mirror")
    return gx, gy


def directional_derivative(
    warped: np.ndarray, center: np.ndarray, theta_offset: np.ndarray
) -> np.ndarray:
    """(warped - center) / |theta_offset| for one channel pair."""
    norm = float(np.hypot(theta_offset[0], theta_offset[1]))
    if norm == 0.0:
        raise ContractViolation("directional derivative undefined for zero offset")
    return (np.asarray(warped, dtype=np.float64) - np.asarray(center, dtype=np.float64)) / norm


def accumulate_tensors(
    warped_lf: LightField, validity: dict, color_space: ColorSpace
) -> TensorField:
    """Sum per-view outer products into intensity and gradient tensors.

    The light-field must already be warped by the current disparity and its
    channels already converted to ``color_space``. Gradient-constancy tensors
    are built from the x/y derivative images of the warped views. Pixels
    invalid in a view contribute nothing for that view.
    """
    h, w = warped_lf.height, warped_lf.width
    shape = (3, h, w)
    jg11 = np.zeros(shape)
    jg12 = np.zeros(shape)
    jg22 = np.zeros(shape)
    jG11 = np.zeros(shape)
    jG12 = np.zeros(shape)
    jG22 = np.zeros(shape)
    view_count = np.zeros((h, w))

    center_view = warped_lf.center_view
    center_grads = [spatial_gradient(center_view.channel(c)) for c in range(3)]

    for vi in warped_lf.valid_indices():
        if vi == warped_lf.center:
            continue
        off = relative_offset(vi, warped_lf.center, warped_lf.kappa_k)
        norm = float(np.hypot(off[0], off[1]))
        mask = np.asarray(validity[vi], dtype=np.float64)
        view = warped_lf.views[vi]
        for c in range(3):
            ch = view.channel(c)
            gx, gy = spatial_gradient(ch)
            a = off[0] * gx + off[1] * gy
            b = norm * directional_derivative(ch, center_view.channel(c), off)
            jg11[c] += mask * a * a
            jg12[c] += mask * a * b
            jg22[c] += mask * b * b
            # Gradient constancy: one tensor per derivative image, summed.
            for deriv, deriv0 in zip((gx, gy), center_grads[c]):
                dgx, dgy = spatial_gradient(deriv)
                aG = off[0] * dgx + off[1] * dgy
                bG = norm * directional_derivative(deriv, deriv0, off)
                jG11[c] += mask * aG * aG
                jG12[c] += mask * aG * bG
                jG22[c] += mask * bG * bG
        view_count += mask

    if view_count.max() == 0:
        raise DataError(
            "no valid non-central view contributes anywhere; light-field unusable"
        )
    return TensorField(jg11, jg12, jg22, jG11, jG12, jG22, view_count, color_space)


def _robust_weight(s: np.ndarray, eps: float) -> np.ndarray:
    """Derivative of the square-root penalizer: 1 / (2 sqrt(s + eps))."""
    return 0.5 / np.sqrt(s + eps)


def _quadratic_form(j11, j12, j22, omega):
    return j11 * omega * omega + 2.0 * j12 * omega + j22


def joint_tensor(
    tf: TensorField,
    omega: DisparityField,
    gamma: float,
    color_space: ColorSpace,
    eps_g: float = DEFAULT_EPSILON,
    eps_G: float = DEFAULT_EPSILON,
) -> tuple[np.ndarray, np.ndarray]:
    """First-row entries of the robustified joint tensor.

    HSV penalizes each channel separately: every channel tensor is weighted
    by the robustification derivative of its own quadratic form. RGB applies
    one joint weight to the channel sum. Returns (jbar11, jbar12).
    """
    if gamma < 0:
        raise ContractViolation("gamma must be >= 0")
    om = omega.values
    if color_space is ColorSpace.HSV:
        jbar11 = np.zeros_like(om)
        jbar12 = np.zeros_like(om)
        for c in range(3):
            wg = _robust_weight(_quadratic_form(tf.jg11[c], tf.jg12[c], tf.jg22[c], om), eps_g)
            wG = _robust_weight(_quadratic_form(tf.jG11[c], tf.jG12[c], tf.jG22[c], om), eps_G)
            jbar11 += wg * tf.jg11[c] + gamma * wG * tf.jG11[c]
            jbar12 += wg * tf.jg12[c] + gamma * wG * tf.jG12[c]
        return jbar11, jbar12

    sg11 = tf.jg11.sum(axis=0)
    sg12 = tf.jg12.sum(axis=0)
    sg22 = tf.jg22.sum(axis=0)
    sG11 = tf.jG11.sum(axis=0)
    sG12 = tf.jG12.sum(axis=0)
    sG22 = tf.jG22.sum(axis=0)
    wg = _robust_weight(_quadratic_form(sg11, sg12, sg22, om), eps_g)
    wG = _robust_weight(_quadratic_form(sG11, sG12, sG22, om), eps_G)
    return wg * sg11 + gamma * wG * sG11, wg * sg12 + gamma * wG * sG12
