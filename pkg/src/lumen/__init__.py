"""Variational sub-pixel disparity estimation for plenoptic light-fields.

The package estimates a dense disparity map relative to the central
sub-aperture view of a 4D light-field by minimizing a robustified
constancy-plus-smoothness energy. Motion tensors pool the linearized
constancy evidence of all views, a coarse-to-fine warping loop handles
displacements beyond the linearization range, and an occlusion-aware guided
median sharpens depth discontinuities.
"""

from .core import (
    ColorSpace,
    ContractViolation,
    DataError,
    DisparityField,
    LightField,
    LumenError,
    NumericalError,
    View,
    ViewIndex,
    relative_offset,
    rgb_to_hsv,
)
from .metrics import ErrorReport, relative_error_report
from .pipeline import Diagnostics, PipelineConfig, build_pyramid, estimate
from .postproc import GuidedMedianConfig, OcclusionMask, detect_occlusion, guided_median
from .solver import Penalizer, SolverConfig, gauss_seidel_sweep, solve_increment
from .synth import Plane, SceneSpec, Slope, Step, generate
from .tensor import MotionTensor2, TensorField, accumulate_tensors, joint_tensor

__all__ = [
    "ColorSpace",
    "ContractViolation",
    "DataError",
    "Diagnostics",
    "DisparityField",
    "ErrorReport",
    "GuidedMedianConfig",
    "LightField",
    "LumenError",
    "MotionTensor2",
    "NumericalError",
    "OcclusionMask",
    "Penalizer",
    "PipelineConfig",
    "Plane",
    "SceneSpec",
    "Slope",
    "SolverConfig",
    "Step",
    "TensorField",
    "View",
    "ViewIndex",
    "accumulate_tensors",
    "build_pyramid",
    "detect_occlusion",
    "estimate",
    "gauss_seidel_sweep",
    "generate",
    "guided_median",
    "joint_tensor",
    "relative_error_report",
    "relative_offset",
    "rgb_to_hsv",
    "solve_increment",
]

__version__ = "0.1.0"
