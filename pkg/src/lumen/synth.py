"""Synthetic light-fields with analytic ground-truth disparity.

Scenes are textured with sums of random cosine modes whose frequencies stay
below a cutoff, so every view can be rendered by evaluating the texture
continuously at displaced coordinates: no image resampling is involved and
the generator stays independent of the interpolation code it is used to
test. The modes are mirror-even about the image borders, which makes the
whole-sample reflection used by the resampling code coincide with the
analytic texture continuation; interpolation near borders therefore sees
consistent data and the warp residual is bounded by pure interpolation
error.

Step scenes place two layers with different textures and disparities and
render them with foreground-wins ordering, which creates genuine occlusion:
background content near the edge is visible in some views and hidden in
others. The foreground/background textures also get separated mean levels so
the central view carries a usable guidance edge.

Channel mean levels are staggered (green above blue everywhere) so that
saturation stays bounded away from zero and hue never crosses the 0/1 wrap;
without that, converting low-chroma random textures to HSV turns the hue
channel into amplified noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractViolation, DisparityField, LightField, View, ViewIndex

_N_WAVES = 64

# Per-channel texture statistics: mean gaps exceed the total amplitude, so
# the channel ordering (and with it chroma) is stable across the scene.
_CHANNEL_MEANS = (0.45, 0.70, 0.22)
_CHANNEL_AMP = 0.2
_STEP_FG_MEANS = (0.55, 0.80, 0.32)
_STEP_BG_MEANS = (0.35, 0.60, 0.12)
_STEP_AMP = 0.15


@dataclass(frozen=True)
class Plane:
    disparity: float


@dataclass(frozen=True)
class Step:
    d_left: float
    d_right: float
    edge_column: int


@dataclass(frozen=True)
class Slope:
    d_min: float
    d_max: float


@dataclass(frozen=True)
class SceneSpec:
    scene: Plane | Step | Slope
    width: int
    height: int
    views_s: int = 3
    views_t: int = 3
    center: tuple[int, int] | None = None
    texture_seed: int = 0
    texture_cutoff: float = 0.25
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise ContractViolation("scene must be at least 8x8")
        if self.views_s < 1 or self.views_t < 1:
            raise ContractViolation("view grid extents must be positive")
        if not (0.0 < self.texture_cutoff <= 1.0):
            raise ContractViolation("texture_cutoff must lie in (0, 1]")
        if isinstance(self.scene, Step) and not (0 < self.scene.edge_column < self.width):
            raise ContractViolation("step edge must be a strictly interior column")
        max_disp = self.max_abs_disparity()
        s0, t0 = self.center_index()
        max_off = max(
            np.hypot(s - s0, t - t0)
            for s in range(self.views_s)
            for t in range(self.views_t)
        )
        if max_disp * max_off >= min(self.width, self.height) / 4:
            raise ContractViolation(
                "disparity x view offset too large for this image size"
            )

    def center_index(self) -> tuple[int, int]:
        if self.center is not None:
            return self.center
        return self.views_s // 2, self.views_t // 2

    def max_abs_disparity(self) -> float:
        sc = self.scene
        if isinstance(sc, Plane):
            return abs(sc.disparity)
        if isinstance(sc, Step):
            return max(abs(sc.d_left), abs(sc.d_right))
        return max(abs(sc.d_min), abs(sc.d_max))


class _Texture:
    """Band-limited, mirror-even texture evaluated continuously."""

    def __init__(
        self,
        rng: np.random.Generator,
        cutoff: float,
        mean: float,
        amplitude: float,
        width: int,
        height: int,
    ):
        max_mx = max(1, int(cutoff * (width - 1)))
        max_my = max(1, int(cutoff * (height - 1)))
        mx = rng.integers(0, max_mx + 1, _N_WAVES)
        my = rng.integers(0, max_my + 1, _N_WAVES)
        mx[(mx == 0) & (my == 0)] = 1  # no constant modes
        self.fx = np.pi * mx / (width - 1)
        self.fy = np.pi * my / (height - 1)
        sign = rng.choice(np.array([-1.0, 1.0]), _N_WAVES)
        amp = rng.uniform(0.5, 1.0, _N_WAVES)
        # Roll off amplitude toward the band edge: cubic interpolation error
        # grows like frequency^4, so a flat spectrum would concentrate warp
        # error in the highest modes.
        k_rel = np.hypot(mx / max_mx, my / max_my) / np.sqrt(2.0)
        amp = amp / (1.0 + 60.0 * k_rel**4)
        # Sum of |amplitudes| bounded so values never leave [mean +- amplitude].
        self.amp = sign * amp * (amplitude / amp.sum())
        self.mean = mean

    def __call__(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        out = np.full(np.broadcast(xs, ys).shape, self.mean, dtype=np.float64)
        for k in range(_N_WAVES):
            out += self.amp[k] * np.cos(self.fx[k] * xs) * np.cos(self.fy[k] * ys)
        return out


def _ground_truth(spec: SceneSpec) -> np.ndarray:
    xs = np.arange(spec.width, dtype=np.float64)[None, :]
    sc = spec.scene
    if isinstance(sc, Plane):
        return np.full((spec.height, spec.width), sc.disparity)
    if isinstance(sc, Step):
        row = np.where(xs < sc.edge_column, sc.d_left, sc.d_right)
        return np.broadcast_to(row, (spec.height, spec.width)).copy()
    slope = (sc.d_max - sc.d_min) / (spec.width - 1)
    row = sc.d_min + slope * xs
    return np.broadcast_to(row, (spec.height, spec.width)).copy()


def _render_constant(textures, d, off, xs, ys):
    return [tex(xs - off[0] * d, ys - off[1] * d) for tex in textures]


def _render_slope(textures, sc: Slope, width, off, xs, ys):
    # omega(x0) = a + b*x0; invert x = x0 + off_x * omega(x0) in closed form.
    a = sc.d_min
    b = (sc.d_max - sc.d_min) / (width - 1)
    x0 = (xs - off[0] * a) / (1.0 + off[0] * b)
    y0 = ys - off[1] * (a + b * x0)
    return [tex(x0, y0) for tex in textures]


def _render_step(fg_tex, bg_tex, sc: Step, off, xs, ys):
    if sc.d_left >= sc.d_right:
        d_fg, d_bg, fg_on_left = sc.d_left, sc.d_right, True
    else:
        d_fg, d_bg, fg_on_left = sc.d_right, sc.d_left, False
    x0f = xs - off[0] * d_fg
    y0f = ys - off[1] * d_fg
    in_fg = (x0f < sc.edge_column) if fg_on_left else (x0f >= sc.edge_column)
    x0b = xs - off[0] * d_bg
    y0b = ys - off[1] * d_bg
    channels = []
    for tf, tb in zip(fg_tex, bg_tex):
        channels.append(np.where(in_fg, tf(x0f, y0f), tb(x0b, y0b)))
    return channels


def generate(spec: SceneSpec) -> tuple[LightField, DisparityField]:
    """Render a seeded synthetic light-field and its exact disparity field."""
    rng = np.random.default_rng(spec.texture_seed)
    is_step = isinstance(spec.scene, Step)
    dims = (spec.width, spec.height)
    if is_step:
        fg_tex = [_Texture(rng, spec.texture_cutoff, m, _STEP_AMP, *dims) for m in _STEP_FG_MEANS]
        bg_tex = [_Texture(rng, spec.texture_cutoff, m, _STEP_AMP, *dims) for m in _STEP_BG_MEANS]
    else:
        textures = [_Texture(rng, spec.texture_cutoff, m, _CHANNEL_AMP, *dims) for m in _CHANNEL_MEANS]

    s0, t0 = spec.center_index()
    center = ViewIndex(s0, t0)
    ys, xs = np.mgrid[0 : spec.height, 0 : spec.width].astype(np.float64)

    views: dict[ViewIndex, View] = {}
    for t in range(spec.views_t):
        for s in range(spec.views_s):
            off = (float(s - s0), float(t - t0))
            sc = spec.scene
            if is_step:
                channels = _render_step(fg_tex, bg_tex, sc, off, xs, ys)
            elif isinstance(sc, Plane):
                channels = _render_constant(textures, sc.disparity, off, xs, ys)
            else:
                channels = _render_slope(textures, sc, spec.width, off, xs, ys)
            img = np.stack(channels, axis=-1)
            if spec.noise_sigma > 0.0:
                img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
                img = np.clip(img, 0.0, 1.0)
            views[ViewIndex(s, t)] = View(img)

    lf = LightField(
        views=views, ns=spec.views_s, nt=spec.views_t, center=center, kappa_k=1.0
    )
    return lf, DisparityField(_ground_truth(spec))
