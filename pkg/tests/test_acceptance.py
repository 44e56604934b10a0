"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``)."""

import time

import numpy as np

from lumen.cli import run
from lumen.core import ColorSpace, DisparityField, LightField, View
from lumen.lfio import read_pfm, write_pfm
from lumen.metrics import relative_error_report
from lumen.pipeline import PipelineConfig, estimate
from lumen.postproc import GuidedMedianConfig, OcclusionMask, detect_occlusion, guided_median
from lumen.solver import gauss_seidel_sweep, system_residual
from lumen.synth import Plane, SceneSpec, Slope, Step, generate
from lumen.tensor import accumulate_tensors

from conftest import make_lightfield
from test_postproc import weighted_median_oracle
from test_solver import assemble_dense
from test_tensor import brute_force_tensors

INTERIOR = np.s_[8:-8, 8:-8]


def report(num, ok, detail):
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_tensor_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(10):
        lf = make_lightfield(rng, width=5, height=5)
        validity = {vi: rng.uniform(size=(5, 5)) < 0.85 for vi in lf.views}
        validity[lf.center] = np.ones((5, 5), dtype=bool)
        tf = accumulate_tensors(lf, validity, ColorSpace.RGB)
        jg, jG, count = brute_force_tensors(lf, validity)
        worst = max(
            worst,
            np.abs(tf.jg11 - jg[..., 0]).max(),
            np.abs(tf.jg12 - jg[..., 1]).max(),
            np.abs(tf.jg22 - jg[..., 2]).max(),
            np.abs(tf.jG11 - jG[..., 0]).max(),
            np.abs(tf.jG12 - jG[..., 1]).max(),
            np.abs(tf.jG22 - jG[..., 2]).max(),
            np.abs(tf.view_count - count).max(),
        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    report(1, ok, f"tensor brute-force deviation {worst:.2e} (<=1e-12), {elapsed:.2f}s (<1s)")


def test_criterion_2_solver_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    worst_err = 0.0
    worst_sweeps = 0
    for _ in range(5):
        jbar11 = rng.uniform(0.1, 2.0, (16, 16))
        jbar12 = rng.normal(0.0, 0.02, (16, 16))
        diff = rng.uniform(0.2, 2.0, (16, 16))
        A, b = assemble_dense(jbar11, jbar12, diff, 1.0)
        exact = np.linalg.solve(A, b).reshape(16, 16)
        om = DisparityField(np.zeros((16, 16)))
        sweeps_to_tol = None
        for k in range(1, 3001):
            gauss_seidel_sweep(om, jbar11, jbar12, diff, 1.0, 1.88)
            r = np.max(np.abs(system_residual(om.values, jbar11, jbar12, diff, 1.0)))
            if sweeps_to_tol is None and r < 1e-6:
                sweeps_to_tol = k
            if r < 1e-12:
                break
        worst_err = max(worst_err, np.abs(om.values - exact).max())
        worst_sweeps = max(worst_sweeps, sweeps_to_tol or 9999)
    elapsed = time.perf_counter() - t0
    ok = worst_err <= 1e-8 and worst_sweeps <= 100 and elapsed < 10.0
    report(
        2,
        ok,
        f"dense-solve deviation {worst_err:.2e} (<=1e-8), residual<1e-6 in "
        f"{worst_sweeps} sweeps (<=100) at SOR 1.88, {elapsed:.1f}s (<10s)",
    )


def test_criterion_3_end_to_end_recovery():
    cfg = PipelineConfig(alpha=0.02, gamma=0.5, levels=4)

    t0 = time.perf_counter()
    lf, _ = generate(SceneSpec(Plane(0.5), 64, 64, texture_seed=7))
    om, _ = estimate(lf, cfg)
    plane_mae = float(np.abs(om.values[INTERIOR] - 0.5).mean())
    t_plane = time.perf_counter() - t0

    t0 = time.perf_counter()
    lf, gt = generate(SceneSpec(Slope(0.0, 1.0), 64, 64, texture_seed=3))
    om, _ = estimate(lf, cfg)
    slope_mae = float(np.abs(om.values[INTERIOR] - gt.values[INTERIOR]).mean())
    t_slope = time.perf_counter() - t0

    ok = plane_mae <= 0.05 and slope_mae <= 0.08 and t_plane < 60 and t_slope < 60
    report(
        3,
        ok,
        f"plane MAE {plane_mae:.4f} (<=0.05) in {t_plane:.1f}s; "
        f"slope MAE {slope_mae:.4f} (<=0.08) in {t_slope:.1f}s",
    )


def test_criterion_4_warping_necessity():
    lf, gt = generate(SceneSpec(Plane(3.0), 64, 64, texture_seed=7, texture_cutoff=0.5))
    single, _ = estimate(lf, PipelineConfig(alpha=0.02, gamma=0.5, levels=0))
    single_mae = float(np.abs(single.values[INTERIOR] - 3.0).mean())
    multi, diag = estimate(
        lf, PipelineConfig(alpha=0.02, gamma=0.5, levels=8), ground_truth=gt
    )
    multi_mae = float(np.abs(multi.values[INTERIOR] - 3.0).mean())
    last5 = [r.mae_vs_gt_fullres for r in diag.records[-5:]]
    band_ok = all(b <= a * 1.1 for a, b in zip(last5, last5[1:]))
    ok = single_mae > 1.0 and multi_mae <= 0.1 and band_ok
    report(
        4,
        ok,
        f"single-level MAE {single_mae:.2f} (>1.0); 8-level MAE {multi_mae:.4f} "
        f"(<=0.1); last-5-level errors {['%.4f' % v for v in last5]} "
        f"non-increasing within 10%: {band_ok}",
    )


def test_criterion_5_postprocessing_benefit():
    lf, gt = generate(SceneSpec(Step(0.0, 1.0, 32), 64, 64, texture_seed=5))
    om, _ = estimate(lf, PipelineConfig(alpha=0.02, gamma=0.5, levels=4))
    cfg = GuidedMedianConfig()
    mask = detect_occlusion(om, cfg)
    filt = guided_median(om, mask, lf.center_view, cfg)
    bad_before = float(np.mean(np.abs(om.values[mask.mask] - gt.values[mask.mask]) > 0.05))
    bad_after = float(np.mean(np.abs(filt.values[mask.mask] - gt.values[mask.mask]) > 0.05))

    rng = np.random.default_rng(55)
    oracle_exact = True
    for _ in range(3):
        field = DisparityField(rng.normal(0.0, 1.0, (12, 12)))
        guide = View(rng.uniform(0, 1, (12, 12, 3)))
        m = rng.uniform(size=(12, 12)) < 0.3
        fcfg = GuidedMedianConfig(window_radius=3)
        out = guided_median(field, OcclusionMask(m, 0.01, 5), guide, fcfg)
        oracle = weighted_median_oracle(field.values, m, guide.channels, fcfg)
        oracle_exact &= bool(np.array_equal(out.values, oracle))

    ok = mask.mask.any() and bad_after < bad_before and oracle_exact
    report(
        5,
        ok,
        f"bad fraction in occlusion band {bad_before:.3f} -> {bad_after:.3f} "
        f"(strict decrease); weighted-median oracle exact on 3 fixtures: {oracle_exact}",
    )


def test_criterion_6_color_space_paths():
    maes = {}
    for cs in (ColorSpace.HSV, ColorSpace.RGB):
        lf, _ = generate(SceneSpec(Plane(0.5), 64, 64, texture_seed=7))
        om, _ = estimate(lf, PipelineConfig(alpha=0.02, gamma=0.5, levels=4, color_space=cs))
        maes[cs] = float(np.abs(om.values[INTERIOR] - 0.5).mean())

    # channel-decorrelated noise: one RGB channel carries strong noise
    lf0, _ = generate(SceneSpec(Plane(0.5), 64, 64, texture_seed=9))
    rng = np.random.default_rng(123)
    views = {}
    for vi in lf0.valid_indices():
        ch = lf0.views[vi].channels.copy()
        ch[:, :, 2] = np.clip(ch[:, :, 2] + rng.normal(0.0, 0.02, ch.shape[:2]), 0.0, 1.0)
        views[vi] = View(ch)
    noisy = LightField(views=views, ns=lf0.ns, nt=lf0.nt, center=lf0.center)
    noisy_mae = {}
    for cs in (ColorSpace.HSV, ColorSpace.RGB):
        om, _ = estimate(noisy, PipelineConfig(alpha=0.02, gamma=0.5, levels=4, color_space=cs))
        noisy_mae[cs] = float(np.abs(om.values[INTERIOR] - 0.5).mean())

    both_pass = maes[ColorSpace.HSV] <= 0.05 and maes[ColorSpace.RGB] <= 0.05
    ratio = noisy_mae[ColorSpace.HSV] / noisy_mae[ColorSpace.RGB]
    ok = both_pass and ratio <= 1.1
    report(
        6,
        ok,
        f"clean plane MAE hsv={maes[ColorSpace.HSV]:.4f} rgb={maes[ColorSpace.RGB]:.4f} "
        f"(both <=0.05); noisy-channel MAE ratio hsv/rgb={ratio:.3f} (<=1.1)",
    )


def test_criterion_7_format_bit_exactness(tmp_path):
    rng = np.random.default_rng(77)
    pfm_ok = True
    for i in range(100):
        grid = rng.normal(size=(rng.integers(1, 24), rng.integers(1, 24)))
        path = str(tmp_path / "grid.pfm")
        write_pfm(grid, path)
        pfm_ok &= bool(np.array_equal(read_pfm(path), grid.astype(np.float32)))

    from lumen.lfio import load_lightfield, save_lightfield

    lf = make_lightfield(rng, width=9, height=7, drop={(0, 0)})
    lf = LightField(views=lf.views, ns=lf.ns, nt=lf.nt, center=lf.center, kappa_k=1.25)
    d1, d2 = str(tmp_path / "lf1"), str(tmp_path / "lf2")
    save_lightfield(lf, d1)
    lf2 = load_lightfield(d1)
    save_lightfield(lf2, d2)
    lf3 = load_lightfield(d2)
    samples_ok = all(
        np.array_equal(lf2.views[vi].channels, lf3.views[vi].channels) for vi in lf2.views
    )
    meta_ok = (
        set(lf2.views) == set(lf.views)
        and lf2.center == lf.center
        and lf2.kappa_k == lf.kappa_k
        and np.array_equal(lf2.valid_mask(), lf.valid_mask())
    )
    ok = pfm_ok and samples_ok and meta_ok
    report(
        7,
        ok,
        f"PFM round-trip identity on 100 grids: {pfm_ok}; light-field directory "
        f"round-trip preserves samples/mask/kappa/center: {samples_ok and meta_ok}",
    )


def test_criterion_8_metric_exactness():
    gt = DisparityField(np.full((10, 10), 1.0))
    est = gt.values.copy()
    for i, j in ((0, 0), (1, 3), (2, 7), (4, 4), (5, 9), (7, 1), (9, 9)):
        est[i, j] = 1.01
    rep = relative_error_report(DisparityField(est), gt, 0.002)
    ok = rep.bad_pixel_fraction == 0.07
    report(8, ok, f"bad_pixel_fraction {rep.bad_pixel_fraction} == 0.07 exactly at 0.2%")


def test_criterion_9_determinism(tmp_path):
    scene = str(tmp_path / "scene")
    assert run([
        "generate", "--out", scene, "--scene", "plane", "--disparity", "0.5",
        "--size", "64x64", "--seed", "7",
    ]) == 0
    payloads = []
    for name in ("run_a", "run_b"):
        out = str(tmp_path / name)
        assert run([
            "estimate", "--input", scene, "--out", out,
            "--alpha", "0.02", "--gamma", "0.5", "--levels", "4",
        ]) == 0
        with open(f"{out}/disparity.pfm", "rb") as fh:
            payloads.append(fh.read())
    ok = payloads[0] == payloads[1]
    report(9, ok, f"two estimate runs byte-identical: {ok}")
