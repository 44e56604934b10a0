import numpy as np
import pytest

from lumen.core import ContractViolation, ViewIndex
from lumen.resample import warp_lightfield
from lumen.synth import Plane, SceneSpec, Slope, Step, generate


def correlation_peak_lag(view, center):
    """Sub-pixel horizontal shift via correlation over a fixed interior
    window plus a parabolic fit around the best integer lag."""
    w = center.shape[1]
    lo, hi = 4, w - 4
    scores = {}
    for lag in range(-3, 4):
        a = view[:, lo + lag : hi + lag]
        b = center[:, lo:hi]
        am, bm = a - a.mean(), b - b.mean()
        scores[lag] = float((am * bm).sum() / np.sqrt((am * am).sum() * (bm * bm).sum()))
    best = max(scores, key=scores.get)
    if best in (-3, 3):
        return float(best)
    y0, y1, y2 = scores[best - 1], scores[best], scores[best + 1]
    return best + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)


class TestSceneSpec:
    def test_rejects_oversized_disparity(self):
        with pytest.raises(ContractViolation):
            SceneSpec(Plane(10.0), 16, 16)

    def test_rejects_non_interior_edge(self):
        with pytest.raises(ContractViolation):
            SceneSpec(Step(0.0, 1.0, 0), 32, 32)

    def test_center_defaults_to_middle(self):
        spec = SceneSpec(Plane(0.1), 16, 16, views_s=5, views_t=3)
        assert spec.center_index() == (2, 1)


class TestGenerate:
    def test_plane_zero_views_identical(self):
        lf, gt = generate(SceneSpec(Plane(0.0), 24, 24, texture_seed=1))
        center = lf.center_view.channels
        for vi in lf.valid_indices():
            assert np.array_equal(lf.views[vi].channels, center)
        assert np.all(gt.values == 0.0)

    def test_plane_disparity_shifts_views(self):
        # view at directional offset (2, 0) with disparity 0.5 is the texture
        # shifted by exactly one pixel
        lf, _ = generate(SceneSpec(Plane(0.5), 48, 48, views_s=5, views_t=3, texture_seed=2))
        view = lf.views[ViewIndex(4, 1)].channels[:, :, 1]
        center = lf.center_view.channels[:, :, 1]
        # exact integer shift: columns line up sample for sample
        assert np.allclose(view[:, 1:], center[:, :-1], atol=1e-12)
        lag = correlation_peak_lag(view, center)
        assert lag == pytest.approx(1.0, abs=0.01)

    def test_seeded_determinism(self):
        spec = SceneSpec(Plane(0.3), 20, 20, texture_seed=11, noise_sigma=0.02)
        lf1, gt1 = generate(spec)
        lf2, gt2 = generate(spec)
        assert np.array_equal(gt1.values, gt2.values)
        for vi in lf1.valid_indices():
            assert np.array_equal(lf1.views[vi].channels, lf2.views[vi].channels)

    def test_ground_truth_matches_scene_analytically(self):
        _, gt = generate(SceneSpec(Step(0.2, 0.8, 10), 32, 24, texture_seed=0))
        assert np.all(gt.values[:, :10] == 0.2)
        assert np.all(gt.values[:, 10:] == 0.8)
        _, gt = generate(SceneSpec(Slope(0.1, 0.9), 33, 16, texture_seed=0))
        assert np.allclose(gt.values[:, 0], 0.1, atol=1e-15)
        assert np.allclose(gt.values[:, -1], 0.9, atol=1e-15)
        assert np.allclose(np.diff(gt.values[0]), 0.8 / 32, atol=1e-12)

    def test_warping_by_truth_cancels_views(self, plane_scene):
        lf, gt = plane_scene
        warped, validity = warp_lightfield(lf, gt)
        center = warped.center_view.channels
        for vi in warped.valid_indices():
            resid = np.abs(warped.views[vi].channels - center)
            assert resid[validity[vi]].max() < 1e-3

    def test_step_scene_has_genuine_occlusion(self):
        lf, gt = generate(SceneSpec(Step(0.0, 1.0, 32), 64, 64, texture_seed=5))
        warped, validity = warp_lightfield(lf, gt)
        center = warped.center_view.channels
        worst_near = 0.0
        worst_far = 0.0
        for vi in warped.valid_indices():
            if vi == warped.center:
                continue
            resid = np.abs(warped.views[vi].channels - center).max(axis=2)
            resid[~validity[vi]] = 0.0
            worst_near = max(worst_near, resid[:, 24:40].max())
            worst_far = max(worst_far, resid[:, :16].max())
        # constancy is violated near the depth edge but holds away from it
        assert worst_near > 0.05
        assert worst_far < 1e-3

    def test_noise_is_additive_and_clipped(self):
        clean, _ = generate(SceneSpec(Plane(0.2), 16, 16, texture_seed=3))
        noisy, _ = generate(SceneSpec(Plane(0.2), 16, 16, texture_seed=3, noise_sigma=0.05))
        diff = noisy.center_view.channels - clean.center_view.channels
        assert diff.std() == pytest.approx(0.05, rel=0.15)
        assert noisy.center_view.channels.min() >= 0.0
        assert noisy.center_view.channels.max() <= 1.0
