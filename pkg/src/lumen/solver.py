"""Lagged-nonlinearity Gauss-Seidel/SOR solver for the disparity system.

At each pixel the discretized optimality condition is

    0 = jbar11 * omega + jbar12
        - alpha * sum_n w_n * (omega_n - omega)          (unit grid spacing)

where the sum runs over the 4-neighborhood, w_n is the half-sum of the
diffusivity at the pixel and its neighbor, and neighbors outside the grid
are dropped from both sums (no-flux boundary). The nonlinear weights
(robustification derivatives of data and smoothness terms) are frozen at
the previous lag step, so each lag step solves a linear system by
successive over-relaxation in forward lexicographic order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .core import ColorSpace, ContractViolation, DisparityField, NumericalError, View
from .tensor import TensorField, joint_tensor, spatial_gradient

logger = logging.getLogger("lumen.solver")

_DEGENERATE_DIAGONAL = 1e-12


class Penalizer(Enum):
    TV_L1 = "tvl1"
    TV_L2 = "tvl2"
    IMAGE_DRIVEN = "image"


@dataclass
class SolverConfig:
    """Knobs of the inner solver; defaults follow the reference setup
    (over-relaxation 1.88, roughly 100 total sweeps split into 10 lag steps
    of 10 sweeps each)."""

    alpha: float
    inner_iterations: int = 10
    lag_steps: int = 10
    sor_omega: float = 1.88
    epsilon_s: float = 1e-6
    penalizer: Penalizer = Penalizer.TV_L1
    residual_tol: float = 1e-6

    def __post_init__(self):
        if self.alpha <= 0:
            raise ContractViolation("alpha must be > 0")
        if not (0.0 < self.sor_omega < 2.0):
            raise ContractViolation("sor_omega must lie in (0, 2)")
        if self.inner_iterations < 1 or self.lag_steps < 1:
            raise ContractViolation("iteration counts must be positive")
        if self.epsilon_s <= 0:
            raise ContractViolation("epsilon_s must be > 0")


@dataclass
class SolveInfo:
    """What the solve actually did, for per-level diagnostics."""

    residual: float
    sweeps: int
    lag_steps_run: int
    converged: bool


def smoothness_weight(
    omega: DisparityField,
    center_view: View | None,
    penalizer: Penalizer,
    epsilon_s: float,
) -> np.ndarray:
    """Per-pixel diffusivity of the selected regularizer.

    TV_L1 evaluates the robustification derivative at the squared disparity
    gradient; TV_L2 is the constant quadratic penalizer; IMAGE_DRIVEN weights
    by inverse edge strength of the central view (summed over channels) and
    does not depend on omega.
    """
    if penalizer is Penalizer.TV_L2:
        return np.ones_like(omega.values)
    if penalizer is Penalizer.TV_L1:
        gx, gy = spatial_gradient(omega.values)
        return 0.5 / np.sqrt(gx * gx + gy * gy + epsilon_s)
    if penalizer is Penalizer.IMAGE_DRIVEN:
        if center_view is None:
            raise ContractViolation("image-driven penalizer needs the central view")
        mag2 = np.zeros_like(omega.values)
        for c in range(3):
            gx, gy = spatial_gradient(center_view.channel(c))
            mag2 += gx * gx + gy * gy
        return 1.0 / np.sqrt(mag2 + epsilon_s)
    raise ContractViolation(f"unknown penalizer {penalizer!r}")


@njit(cache=True)
def _sor_sweep(omega, jbar11, jbar12, diff, alpha, sor_omega):
    h, w = omega.shape
    for i in range(h):
        for j in range(w):
            dc = diff[i, j]
            wsum = 0.0
            wnbr = 0.0
            if i > 0:
                wn = 0.5 * (diff[i - 1, j] + dc)
                wsum += wn
                wnbr += wn * omega[i - 1, j]
            if i < h - 1:
                wn = 0.5 * (diff[i + 1, j] + dc)
                wsum += wn
                wnbr += wn * omega[i + 1, j]
            if j > 0:
                wn = 0.5 * (diff[i, j - 1] + dc)
                wsum += wn
                wnbr += wn * omega[i, j - 1]
            if j < w - 1:
                wn = 0.5 * (diff[i, j + 1] + dc)
                wsum += wn
                wnbr += wn * omega[i, j + 1]
            denom = jbar11[i, j] + alpha * wsum
            if denom < _DEGENERATE_DIAGONAL:
                continue
            gs = (-jbar12[i, j] + alpha * wnbr) / denom
            omega[i, j] = (1.0 - sor_omega) * omega[i, j] + sor_omega * gs


def gauss_seidel_sweep(
    omega: DisparityField,
    jbar11: np.ndarray,
    jbar12: np.ndarray,
    diffusivity: np.ndarray,
    alpha: float,
    sor_omega: float,
) -> DisparityField:
    """One lexicographic SOR sweep, updating ``omega.values`` in place.

    Pixels with a degenerate diagonal (all-zero data term and vanishing
    diffusivity) are skipped for the sweep. Returns the same field.
    """
    h, w = omega.values.shape
    for name, arr in (("jbar11", jbar11), ("jbar12", jbar12), ("diffusivity", diffusivity)):
        if arr.shape != (h, w):
            raise ContractViolation(f"{name} shape {arr.shape} != omega shape {(h, w)}")
    _sor_sweep(
        omega.values,
        np.ascontiguousarray(jbar11, dtype=np.float64),
        np.ascontiguousarray(jbar12, dtype=np.float64),
        np.ascontiguousarray(diffusivity, dtype=np.float64),
        float(alpha),
        float(sor_omega),
    )
    return omega


def system_residual(
    omega: np.ndarray,
    jbar11: np.ndarray,
    jbar12: np.ndarray,
    diffusivity: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """Pointwise residual of the discretized system at the current iterate."""
    flux = np.zeros_like(omega)
    for axis, sign in ((0, 1), (0, -1), (1, 1), (1, -1)):
        nbr_omega = np.roll(omega, -sign, axis=axis)
        nbr_diff = np.roll(diffusivity, -sign, axis=axis)
        wn = 0.5 * (nbr_diff + diffusivity)
        contrib = wn * (nbr_omega - omega)
        # Drop the wrapped-around edge: no flux through the boundary.
        if axis == 0 and sign == 1:
            contrib[-1, :] = 0.0
        elif axis == 0 and sign == -1:
            contrib[0, :] = 0.0
        elif axis == 1 and sign == 1:
            contrib[:, -1] = 0.0
        else:
            contrib[:, 0] = 0.0
        flux += contrib
    return jbar11 * omega + jbar12 - alpha * flux


def solve_increment(
    tf: TensorField,
    omega0: DisparityField,
    center_view: View,
    cfg: SolverConfig,
    gamma: float,
    color_space: ColorSpace,
) -> tuple[DisparityField, SolveInfo]:
    """Solve for the disparity at one warping level.

    The tensors were accumulated on views already warped by ``omega0``, so
    the data term is linearized around it: the robustification derivatives
    of the data term are evaluated at the residual displacement
    (current - omega0), while the rhs is shifted by ``jbar11 * omega0`` so
    the unknown of the swept system is the total field and the smoothness
    term regularizes the total field directly. Returns the total disparity
    and solve diagnostics. Exits early once the lagged-system residual
    max-norm drops below ``cfg.residual_tol``.
    """
    omega = DisparityField(omega0.values.copy())
    anchor = omega0.values
    residual = np.inf
    sweeps = 0
    lag_runs = 0
    for _ in range(cfg.lag_steps):
        lag_runs += 1
        du = DisparityField(omega.values - anchor)
        jbar11, jbar12 = joint_tensor(tf, du, gamma, color_space)
        rhs = jbar12 - jbar11 * anchor
        diffusivity = smoothness_weight(omega, center_view, cfg.penalizer, cfg.epsilon_s)
        for _ in range(cfg.inner_iterations):
            gauss_seidel_sweep(omega, jbar11, rhs, diffusivity, cfg.alpha, cfg.sor_omega)
            sweeps += 1
        if not np.all(np.isfinite(omega.values)):
            bad = np.argwhere(~np.isfinite(omega.values))[0]
            raise NumericalError(
                f"solver produced a non-finite disparity at pixel "
                f"(row={bad[0]}, col={bad[1]})"
            )
        residual = float(
            np.max(np.abs(system_residual(omega.values, jbar11, rhs, diffusivity, cfg.alpha)))
        )
        if residual < cfg.residual_tol:
            break
    converged = residual < cfg.residual_tol
    logger.debug(
        "solve: %d sweeps over %d lag steps, residual %.3e%s",
        sweeps, lag_runs, residual, "" if converged else " (budget exhausted)",
    )
    return omega, SolveInfo(residual, sweeps, lag_runs, converged)
