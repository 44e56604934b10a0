"""Coarse-to-fine warping driver.

The light-field is repeatedly downscaled into a pyramid; estimation starts
at the coarsest level with zero disparity and, per level, upscales the
current estimate, warps all views by it, accumulates motion tensors on the
warped views, and solves for the updated field. Solving on warped views
means each level only ever sees a residual displacement small enough for
the linearized data term to hold, which is what makes displacements larger
than the texture scale recoverable at all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import ColorSpace, ContractViolation, DisparityField, LightField, View, rgb_to_hsv
from .postproc import GuidedMedianConfig, detect_occlusion, guided_median
from .resample import gaussian_smooth, rescale, upscale_disparity, warp_lightfield
from .solver import SolverConfig, solve_increment
from .tensor import accumulate_tensors

logger = logging.getLogger("lumen.pipeline")

_MIN_LEVEL_DIM = 8


@dataclass
class PipelineConfig:
    """Full configuration of one estimation run.

    ``alpha`` and ``gamma`` have no universal defaults; they are tuned per
    dataset. The remaining defaults follow the reference setup (11 warping
    steps, downsampling factor 0.8, presmoothing 0.5, HSV data term).
    """

    alpha: float
    gamma: float
    sigma: float = 0.5
    eta: float = 0.8
    levels: int = 11
    color_space: ColorSpace = ColorSpace.HSV
    solver: SolverConfig | None = None
    postproc_enabled: bool = False
    postproc: GuidedMedianConfig = field(default_factory=GuidedMedianConfig)

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ContractViolation("eta must lie in (0, 1)")
        if self.levels < 0:
            raise ContractViolation("levels must be >= 0")
        if self.sigma < 0:
            raise ContractViolation("sigma must be >= 0")
        if self.solver is None:
            self.solver = SolverConfig(alpha=self.alpha)

    def resolved(self) -> dict:
        """All settings with defaults materialized, for diagnostics."""
        return {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "sigma": self.sigma,
            "eta": self.eta,
            "levels": self.levels,
            "color_space": self.color_space.value,
            "penalizer": self.solver.penalizer.value,
            "sor_omega": self.solver.sor_omega,
            "inner_iterations": self.solver.inner_iterations,
            "lag_steps": self.solver.lag_steps,
            "epsilon_s": self.solver.epsilon_s,
            "residual_tol": self.solver.residual_tol,
            "postproc": self.postproc_enabled,
            "occlusion_threshold": self.postproc.occlusion_threshold,
            "median_window_radius": self.postproc.window_radius,
            "median_box_radius": self.postproc.box_radius,
        }


@dataclass
class PyramidLevel:
    lf: LightField
    width: int
    height: int
    scale_to_next: float  # width ratio to the next finer level (1.0 at level 0)


@dataclass
class LevelRecord:
    level: int
    width: int
    height: int
    residual: float
    mean_abs_increment: float
    sweeps: int
    mae_vs_gt: float | None = None          # in this level's pixel units
    mae_vs_gt_fullres: float | None = None  # rescaled to full-resolution pixels


@dataclass
class Diagnostics:
    records: list[LevelRecord]
    warnings: list[str]
    config: dict


def _convert_colorspace(lf: LightField, color_space: ColorSpace) -> LightField:
    if color_space is ColorSpace.RGB:
        return lf
    views = {vi: rgb_to_hsv(v) for vi, v in lf.views.items()}
    return LightField(views=views, ns=lf.ns, nt=lf.nt, center=lf.center, kappa_k=lf.kappa_k)


def _smooth_lightfield(lf: LightField, sigma: float) -> LightField:
    if sigma == 0.0:
        return lf
    views = {}
    for vi, v in lf.views.items():
        ch = np.stack([gaussian_smooth(v.channel(c), sigma) for c in range(3)], axis=-1)
        views[vi] = View(ch)
    return LightField(views=views, ns=lf.ns, nt=lf.nt, center=lf.center, kappa_k=lf.kappa_k)


def _rescale_lightfield(lf: LightField, w: int, h: int, presmooth_sigma: float) -> LightField:
    views = {}
    for vi, v in lf.views.items():
        ch = np.stack(
            [rescale(v.channel(c), w, h, presmooth_sigma) for c in range(3)], axis=-1
        )
        views[vi] = View(ch)
    return LightField(views=views, ns=lf.ns, nt=lf.nt, center=lf.center, kappa_k=lf.kappa_k)


def _level_dims(width: int, height: int, eta: float, level: int) -> tuple[int, int]:
    f = eta**level
    return int(np.floor(f * width + 0.5)), int(np.floor(f * height + 0.5))


def usable_levels(width: int, height: int, eta: float, requested: int) -> int:
    """Largest level count whose coarsest grid still has 8-px sides."""
    lv = requested
    while lv > 0 and min(_level_dims(width, height, eta, lv)) < _MIN_LEVEL_DIM:
        lv -= 1
    return lv


def build_pyramid(lf: LightField, cfg: PipelineConfig) -> list[PyramidLevel]:
    """Presmoothed, color-converted pyramid; level 0 is full resolution.

    Level i has dimensions round(eta^i * (W, H)) relative to the input, but
    is built incrementally from level i-1 with per-step anti-alias
    smoothing. If the requested level count would shrink the coarsest grid
    below 8 px on a side, the count is clamped (and logged).
    """
    levels_requested = cfg.levels
    levels_used = usable_levels(lf.width, lf.height, cfg.eta, levels_requested)
    if levels_used < levels_requested:
        logger.warning(
            "clamping warping levels from %d to %d for a %dx%d input",
            levels_requested, levels_used, lf.width, lf.height,
        )
    base = _smooth_lightfield(_convert_colorspace(lf, cfg.color_space), cfg.sigma)
    pyramid = [PyramidLevel(base, lf.width, lf.height, 1.0)]
    for i in range(1, levels_used + 1):
        w, h = _level_dims(lf.width, lf.height, cfg.eta, i)
        prev = pyramid[-1]
        reduced = _rescale_lightfield(prev.lf, w, h, cfg.sigma)
        pyramid.append(PyramidLevel(reduced, w, h, prev.width / w))
    return pyramid


def estimate(
    lf: LightField,
    cfg: PipelineConfig,
    ground_truth: DisparityField | None = None,
) -> tuple[DisparityField, Diagnostics]:
    """Run the full coarse-to-fine estimation.

    When ``ground_truth`` (full resolution) is passed, each level record also
    carries the error of the level estimate against the bicubic-downscaled,
    unit-rescaled ground truth. Post-processing, when enabled, detects
    occlusion on the raw result and applies one guided median pass with the
    original (unconverted) central view as guide.
    """
    pyramid = build_pyramid(lf, cfg)
    top = len(pyramid) - 1
    warnings = []
    if top < cfg.levels:
        warnings.append(
            f"levels clamped from {cfg.levels} to {top}: "
            f"coarsest usable grid is {_MIN_LEVEL_DIM} px"
        )

    records: list[LevelRecord] = []
    omega = DisparityField(np.zeros((pyramid[top].height, pyramid[top].width)))
    for i in range(top, -1, -1):
        level = pyramid[i]
        if i == top:
            omega_hat = omega
        else:
            coarser = pyramid[i + 1]
            up = upscale_disparity(omega, level.width, level.height)
            omega_hat = DisparityField(up.values * (level.width / coarser.width))
        warped, validity = warp_lightfield(level.lf, omega_hat)
        tf = accumulate_tensors(warped, validity, cfg.color_space)
        omega, info = solve_increment(
            tf, omega_hat, level.lf.center_view, cfg.solver, cfg.gamma, cfg.color_space
        )
        record = LevelRecord(
            level=i,
            width=level.width,
            height=level.height,
            residual=info.residual,
            mean_abs_increment=float(np.mean(np.abs(omega.values - omega_hat.values))),
            sweeps=info.sweeps,
        )
        if ground_truth is not None:
            unit_scale = level.width / lf.width
            gt_level = rescale(ground_truth.values, level.width, level.height, cfg.sigma)
            gt_level *= unit_scale
            record.mae_vs_gt = float(np.mean(np.abs(omega.values - gt_level)))
            record.mae_vs_gt_fullres = record.mae_vs_gt / unit_scale
        records.append(record)
        logger.info(
            "level %d (%dx%d): residual %.3e, mean increment %.4f",
            i, level.width, level.height, record.residual, record.mean_abs_increment,
        )

    if cfg.postproc_enabled:
        mask = detect_occlusion(omega, cfg.postproc)
        omega = guided_median(omega, mask, lf.center_view, cfg.postproc)

    return omega, Diagnostics(records=records, warnings=warnings, config=cfg.resolved())
