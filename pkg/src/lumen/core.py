"""Domain types shared by every stage of the disparity pipeline.

A light-field is stored as a grid of sub-aperture views indexed by a
directional coordinate (s, t). The disparity field assigns each pixel of
the central view a displacement, in pixels per unit directional offset,
that predicts where that pixel appears in the other views.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class LumenError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(LumenError):
    """An operation was called with arguments that violate its contract."""


class DataError(LumenError):
    """Input data is missing, malformed, or unusable."""


class NumericalError(LumenError):
    """A computation produced non-finite or degenerate values."""


class ColorSpace(Enum):
    RGB = "rgb"
    HSV = "hsv"


@dataclass(frozen=True, order=True)
class ViewIndex:
    """Directional grid coordinate of a sub-aperture view (column s, row t)."""

    s: int
    t: int


@dataclass(frozen=True)
class View:
    """One sub-aperture image: three channel planes stacked as (H, W, 3).

    Loaded and generated views hold values in [0, 1]; derived intermediates
    (warped or rescaled views) may overshoot that range slightly because
    cubic interpolation is not monotone.
    """

    channels: np.ndarray

    def __post_init__(self):
        ch = np.asarray(self.channels, dtype=np.float64)
        if ch.ndim != 3 or ch.shape[2] != 3:
            raise ContractViolation(
                f"view channels must have shape (H, W, 3), got {ch.shape}"
            )
        if not np.all(np.isfinite(ch)):
            raise ContractViolation("view samples must be finite")
        object.__setattr__(self, "channels", ch)

    @property
    def height(self) -> int:
        return self.channels.shape[0]

    @property
    def width(self) -> int:
        return self.channels.shape[1]

    def channel(self, c: int) -> np.ndarray:
        return self.channels[:, :, c]


@dataclass(frozen=True)
class LightField:
    """A sampled 4D light-field: valid sub-aperture views on an ns x nt grid.

    ``views`` holds only the valid views; a directional index absent from the
    mapping is an invalid (e.g. vignetted) view. ``kappa_k`` is the horizontal
    scale compensating anisotropy between directional and spatial sampling;
    it multiplies the horizontal component of every view offset.
    """

    views: dict[ViewIndex, View]
    ns: int
    nt: int
    center: ViewIndex
    kappa_k: float = 1.0

    def __post_init__(self):
        if self.ns < 1 or self.nt < 1:
            raise ContractViolation("directional extents must be positive")
        if self.center not in self.views:
            raise ContractViolation("central view must be valid")
        if len(self.views) < 2:
            raise ContractViolation(
                "a light-field needs at least 2 valid views"
            )
        w, h = None, None
        for vi, view in self.views.items():
            if not (0 <= vi.s < self.ns and 0 <= vi.t < self.nt):
                raise ContractViolation(
                    f"view index {vi} outside {self.ns}x{self.nt} grid"
                )
            if w is None:
                w, h = view.width, view.height
            elif (view.width, view.height) != (w, h):
                raise ContractViolation(
                    f"view {vi} is {view.width}x{view.height}, expected {w}x{h}"
                )

    @property
    def width(self) -> int:
        return self.views[self.center].width

    @property
    def height(self) -> int:
        return self.views[self.center].height

    @property
    def center_view(self) -> View:
        return self.views[self.center]

    def is_valid(self, vi: ViewIndex) -> bool:
        return vi in self.views

    def valid_indices(self) -> list[ViewIndex]:
        """All valid view indices in a fixed (t, s) scan order."""
        return sorted(self.views.keys(), key=lambda vi: (vi.t, vi.s))

    def valid_mask(self) -> np.ndarray:
        """(nt, ns) boolean grid of view validity."""
        mask = np.zeros((self.nt, self.ns), dtype=bool)
        for vi in self.views:
            mask[vi.t, vi.s] = True
        return mask


@dataclass(frozen=True)
class DisparityField:
    """Scalar per-pixel disparity, in pixels per unit directional offset."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ContractViolation(f"disparity grid must be 2D, got {v.ndim}D")
        if not np.all(np.isfinite(v)):
            raise ContractViolation("disparity values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def relative_offset(theta_i: ViewIndex, center: ViewIndex, kappa_k: float) -> np.ndarray:
    """Offset of view theta_i from the center, with kappa absorbed.

    Returns ``(kappa_k * (s_i - s_0), t_i - t_0)`` as a float 2-vector; the
    first component scales horizontal (x) displacement, the second vertical
    (y). Every downstream use of a view offset goes through this function.
    """
    return np.array(
        [kappa_k * (theta_i.s - center.s), float(theta_i.t - center.t)],
        dtype=np.float64,
    )


def rgb_to_hsv(view: View) -> View:
    """Convert an RGB view in [0,1] to HSV with all channels in [0,1].

    Hue is rescaled from degrees to [0,1] and treated as a plain linear
    scalar; achromatic pixels (S = 0) get H = 0.
    """
    r = view.channels[:, :, 0]
    g = view.channels[:, :, 1]
    b = view.channels[:, :, 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    delta = maxc - minc

    v = maxc
    s = np.where(maxc > 0.0, delta / np.where(maxc > 0.0, maxc, 1.0), 0.0)

    safe = np.where(delta > 0.0, delta, 1.0)
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    h = np.where(r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = (h / 6.0) % 1.0
    h = np.where(delta > 0.0, h, 0.0)
    return View(np.stack([h, s, v], axis=-1))
