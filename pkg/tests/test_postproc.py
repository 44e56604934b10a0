import numpy as np
import pytest

from lumen.core import ContractViolation, DisparityField, View
from lumen.postproc import GuidedMedianConfig, OcclusionMask, detect_occlusion, guided_median


def box_filter_oracle(grid, radius):
    """Normalized box filter with mirrored boundaries, direct evaluation."""
    h, w = grid.shape

    def reflect(i, n):
        period = 2 * n - 2 if n > 1 else 1
        i = abs(i) % period
        return period - i if i >= n else i

    out = np.zeros_like(grid)
    size = 2 * radius + 1
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for di in range(-radius, radius + 1):
                for dj in range(-radius, radius + 1):
                    acc += grid[reflect(i + di, h), reflect(j + dj, w)]
            out[i, j] = acc / size**2
    return out


def weighted_median_oracle(omega, mask, guide, cfg):
    """Independent per-pixel weighted median (same weight formula)."""
    h, w = omega.shape
    out = omega.copy()
    r = cfg.window_radius
    for i in range(h):
        for j in range(w):
            if not mask[i, j]:
                continue
            vals, wts = [], []
            for ii in range(max(0, i - r), min(h, i + r + 1)):
                for jj in range(max(0, j - r), min(w, j + r + 1)):
                    cd2 = float(((guide[ii, jj] - guide[i, j]) ** 2).sum())
                    sd2 = float((ii - i) ** 2 + (jj - j) ** 2)
                    wts.append(
                        np.exp(-cd2 / (2 * cfg.sigma_color**2))
                        * np.exp(-sd2 / (2 * cfg.sigma_spatial**2))
                    )
                    vals.append(omega[ii, jj])
            order = np.argsort(np.asarray(vals), kind="stable")
            v = np.asarray(vals)[order]
            cw = np.cumsum(np.asarray(wts)[order])
            idx = int(np.searchsorted(cw, 0.5 * cw[-1]))
            out[i, j] = v[min(idx, len(v) - 1)]
    return out


def two_region_fixture():
    """Guide with a vertical seam at column 12; estimate misaligned by 1 px."""
    h = w = 24
    guide = np.full((h, w, 3), 0.2)
    guide[:, 12:] = 0.8
    true = np.zeros((h, w))
    true[:, 12:] = 1.0
    est = np.zeros((h, w))
    est[:, 13:] = 1.0  # edge one pixel too far right
    band = np.zeros((h, w), dtype=bool)
    band[:, 9:16] = True
    return View(guide), DisparityField(est), true, band


class TestDetectOcclusion:
    def test_constant_field_empty_mask(self):
        cfg = GuidedMedianConfig()
        mask = detect_occlusion(DisparityField(np.full((20, 20), 0.7)), cfg)
        assert not mask.mask.any()
        assert mask.threshold_used == cfg.occlusion_threshold

    def test_step_band_matches_box_filter_oracle(self):
        cfg = GuidedMedianConfig(box_radius=5)
        grid = np.zeros((24, 40))
        grid[:, 20:] = 1.0
        mask = detect_occlusion(DisparityField(grid), cfg)
        gx = np.zeros_like(grid)
        gx[:, 1:-1] = 0.5 * (grid[:, 2:] - grid[:, :-2])
        response = box_filter_oracle(gx * gx, 5)
        assert np.array_equal(mask.mask, response > cfg.occlusion_threshold)
        # band spans roughly r+1 columns either side of the edge
        cols = np.where(mask.mask.any(axis=0))[0]
        assert cols.min() >= 20 - (5 + 2) and cols.max() <= 19 + (5 + 2)
        assert len(cols) in (2 * 5 + 1, 2 * 5 + 2, 2 * 5 + 3)

    def test_smooth_ramp_below_threshold(self):
        xs = np.arange(30, dtype=float)
        grid = np.tile(0.05 * xs, (30, 1))  # |grad|^2 = 0.0025 < 0.01
        mask = detect_occlusion(DisparityField(grid), GuidedMedianConfig())
        assert not mask.mask.any()


class TestGuidedMedian:
    def test_empty_mask_is_identity(self):
        rng = np.random.default_rng(0)
        omega = DisparityField(rng.normal(size=(12, 12)))
        guide = View(rng.uniform(0, 1, (12, 12, 3)))
        mask = OcclusionMask(np.zeros((12, 12), dtype=bool), 0.01, 5)
        out = guided_median(omega, mask, guide, GuidedMedianConfig())
        assert np.array_equal(out.values, omega.values)

    def test_uniform_guide_reduces_to_plain_median(self):
        # huge spatial sigma: weights become uniform, the filter is an
        # ordinary median over the window
        rng = np.random.default_rng(1)
        vals = rng.normal(size=(9, 9))
        omega = DisparityField(vals.copy())
        guide = View(np.full((9, 9, 3), 0.5))
        mask = np.zeros((9, 9), dtype=bool)
        mask[4, 4] = True
        cfg = GuidedMedianConfig(window_radius=2, sigma_spatial=1e9)
        out = guided_median(omega, OcclusionMask(mask, 0.01, 5), guide, cfg)
        window = vals[2:7, 2:7].ravel()
        assert out.values[4, 4] == np.median(window)

    def test_multiset_example(self):
        # window values {0,0,0,1,1} with a uniform guide: the median is 0
        row = np.array([[0.0, 1.0, 0.0, 1.0, 0.0]])
        omega = DisparityField(row.copy())
        guide = View(np.full((1, 5, 3), 0.5))
        mask = np.zeros((1, 5), dtype=bool)
        mask[0, 2] = True
        cfg = GuidedMedianConfig(window_radius=2)
        out = guided_median(omega, OcclusionMask(mask, 0.01, 5), guide, cfg)
        assert out.values[0, 2] == 0.0

    def test_two_region_edge_realigns_to_guide(self):
        guide, est, true, band = two_region_fixture()
        cfg = GuidedMedianConfig(window_radius=3)
        out = guided_median(est, OcclusionMask(band, 0.01, 5), guide, cfg)
        assert np.array_equal(out.values, true)

    def test_matches_brute_force_oracle_exactly(self):
        guide, est, _, band = two_region_fixture()
        cfg = GuidedMedianConfig(window_radius=3)
        out = guided_median(est, OcclusionMask(band, 0.01, 5), guide, cfg)
        oracle = weighted_median_oracle(est.values, band, guide.channels, cfg)
        assert np.array_equal(out.values, oracle)

    def test_random_fixture_matches_oracle_exactly(self):
        rng = np.random.default_rng(7)
        omega = DisparityField(rng.normal(0.0, 1.0, (14, 14)))
        guide = View(rng.uniform(0, 1, (14, 14, 3)))
        mask = rng.uniform(size=(14, 14)) < 0.3
        cfg = GuidedMedianConfig(window_radius=4)
        out = guided_median(omega, OcclusionMask(mask, 0.01, 5), guide, cfg)
        oracle = weighted_median_oracle(omega.values, mask, guide.channels, cfg)
        assert np.array_equal(out.values, oracle)

    def test_output_values_come_from_input_window(self):
        rng = np.random.default_rng(8)
        omega = DisparityField(rng.normal(size=(10, 10)))
        guide = View(rng.uniform(0, 1, (10, 10, 3)))
        mask = np.ones((10, 10), dtype=bool)
        cfg = GuidedMedianConfig(window_radius=2)
        out = guided_median(omega, OcclusionMask(mask, 0.01, 5), guide, cfg)
        r = cfg.window_radius
        for i in range(10):
            for j in range(10):
                window = omega.values[
                    max(0, i - r) : i + r + 1, max(0, j - r) : j + r + 1
                ]
                assert out.values[i, j] in window

    def test_idempotent_on_two_region_fixture(self):
        guide, est, _, band = two_region_fixture()
        cfg = GuidedMedianConfig(window_radius=3)
        mask = OcclusionMask(band, 0.01, 5)
        once = guided_median(est, mask, guide, cfg)
        twice = guided_median(once, mask, guide, cfg)
        assert np.array_equal(once.values, twice.values)

    def test_dimension_checks(self):
        omega = DisparityField(np.zeros((8, 8)))
        guide = View(np.zeros((9, 8, 3)))
        mask = OcclusionMask(np.zeros((8, 8), dtype=bool), 0.01, 5)
        with pytest.raises(ContractViolation):
            guided_median(omega, mask, guide, GuidedMedianConfig())
