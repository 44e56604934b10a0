"""Disparity evaluation: relative-error bad-pixel rate and summary stats."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractViolation, DisparityField


@dataclass(frozen=True)
class ErrorReport:
    bad_pixel_fraction: float
    threshold: float
    mae: float
    rmse: float
    evaluated_pixels: int
    excluded_pixels: int

    def to_dict(self) -> dict:
        return {
            "bad_pixel_fraction": self.bad_pixel_fraction,
            "threshold": self.threshold,
            "mae": self.mae,
            "rmse": self.rmse,
            "evaluated_pixels": self.evaluated_pixels,
            "excluded_pixels": self.excluded_pixels,
        }

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.to_dict().items())


def relative_error_report(
    est: DisparityField,
    gt: DisparityField,
    threshold: float,
    exclusion_floor: float = 1e-6,
) -> ErrorReport:
    """Fraction of pixels whose relative error exceeds ``threshold``.

    The relative error divides by the per-pixel reference value; pixels with
    |reference| below ``exclusion_floor`` are excluded rather than divided
    by near-zero. MAE/RMSE are computed on absolute differences over the
    evaluated pixels.
    """
    if threshold <= 0:
        raise ContractViolation("threshold must be > 0")
    if est.values.shape != gt.values.shape:
        raise ContractViolation(
            f"estimate {est.values.shape} and reference {gt.values.shape} differ"
        )
    ref = gt.values
    keep = np.abs(ref) >= exclusion_floor
    evaluated = int(keep.sum())
    excluded = ref.size - evaluated
    if evaluated == 0:
        return ErrorReport(0.0, threshold, 0.0, 0.0, 0, excluded)
    diff = np.abs(est.values[keep] - ref[keep])
    rel = diff / np.abs(ref[keep])
    bad = float(np.count_nonzero(rel > threshold) / evaluated)
    mae = float(diff.sum() / evaluated)
    rmse = float(np.sqrt((diff * diff).sum() / evaluated))
    return ErrorReport(bad, threshold, mae, rmse, evaluated, excluded)
