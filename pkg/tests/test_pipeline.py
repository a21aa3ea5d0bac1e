"""Reconstruction pipeline: method dispatch, per-method failure isolation,
study wiring, and the CSV renderings."""

import math

import numpy as np
import pytest

from nnscale import (
    RESIZE_METHODS,
    IndivisibleDims,
    UPSCALE_METHODS,
    ImageRaster,
    NotGrayscale,
    SsimConstants,
    apply_method,
    kernel_for,
    metrics_csv,
    metrics_report,
    model_error_study,
    pipeline_csv,
    pipeline_run,
    ssim_windowed,
    study_run,
)


@pytest.fixture(scope="module")
def photo():
    rng = np.random.default_rng(101)
    base = rng.integers(70, 190, size=(24, 24)).astype(float)
    # Smooth it slightly so the reconstructions have structure to recover.
    base = (base + np.roll(base, 1, 0) + np.roll(base, 1, 1)) / 3.0
    return ImageRaster(base.astype(np.uint8))


@pytest.fixture(scope="module")
def color_photo():
    rng = np.random.default_rng(103)
    return ImageRaster(rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8))


class TestMethodTables:
    def test_resize_extends_upscale(self):
        assert set(UPSCALE_METHODS) < set(RESIZE_METHODS)
        assert "nearest-down" in RESIZE_METHODS
        assert "nearest-down" not in UPSCALE_METHODS

    def test_kernel_factory(self):
        assert kernel_for("ramp").family == "ramp"
        assert kernel_for("logistic", 1e-6).epsilon == 1e-6
        with pytest.raises(ValueError):
            kernel_for("gaussian")


class TestApplyMethod:
    def test_nn_returns_n(self, photo):
        out, n = apply_method(photo, "nn-ramp", n=6, r=2.0)
        assert out.data.shape == (48, 48)
        assert n == 6

    def test_baselines_return_no_n(self, photo):
        for method in ("bilinear", "bicubic"):
            out, n = apply_method(photo, method, r=2.0)
            assert out.data.shape == (48, 48)
            assert n is None

    def test_nearest_down(self, photo):
        out, n = apply_method(photo, "nearest-down", factor=2)
        assert out.data.shape == (12, 12)
        assert n is None
        np.testing.assert_array_equal(out.data, photo.data[::2, ::2])

    def test_color_goes_channelwise(self, color_photo):
        out, _ = apply_method(color_photo, "nn-ramp", n=4, r=2.0)
        assert out.data.shape == (32, 32, 3)

    def test_unknown_method(self, photo):
        with pytest.raises(ValueError):
            apply_method(photo, "lanczos")


class TestPipelineRun:
    def test_all_methods_score(self, photo):
        rows = pipeline_run(photo, UPSCALE_METHODS, n=6)
        assert [row.method for row in rows] == list(UPSCALE_METHODS)
        for row in rows:
            assert row.error is None
            assert row.report is not None
            assert row.seconds >= 0.0
            assert 0.0 <= row.report.ssim_windowed <= 1.0
        assert rows[0].n == 6 and rows[1].n == 6
        assert rows[2].n is None and rows[3].n is None

    def test_round_trip_is_downscale_then_upscale(self, photo):
        rows = pipeline_run(photo, ["bilinear"], factor=2)
        from nnscale import downscale_nearest, upscale_bilinear

        expected = upscale_bilinear(downscale_nearest(photo, 2), 2.0)
        assert rows[0].report.mse == pytest.approx(
            metrics_report(photo, expected).mse
        )

    def test_factor_one_reconstruction(self, photo):
        rows = pipeline_run(photo, ["bilinear"], factor=1)
        # Unit scale is the identity for bilinear, so the score is perfect.
        assert rows[0].report.mse == 0.0
        assert rows[0].report.psnr == math.inf

    def test_non_upscale_method_isolated(self, photo):
        rows = pipeline_run(photo, ["nn-ramp", "nearest-down", "bicubic"], n=4)
        assert rows[0].error is None
        assert rows[1].error is not None and rows[1].report is None
        assert rows[2].error is None

    def test_shared_reduction_failure_raises(self):
        # The downscale is shared by every method, so an indivisible input
        # is a run-level error, not a per-method row.
        odd = ImageRaster(np.zeros((15, 15), dtype=np.uint8))
        with pytest.raises(IndivisibleDims):
            pipeline_run(odd, ["nn-ramp"], factor=2)

    def test_empty_methods_rejected(self, photo):
        with pytest.raises(ValueError):
            pipeline_run(photo, [])

    def test_constants_reach_global_ssim(self, photo):
        default = pipeline_run(photo, ["nn-ramp"], n=4)[0].report
        paper = pipeline_run(
            photo, ["nn-ramp"], n=4, constants=SsimConstants.unsquared()
        )[0].report
        assert default.ssim_global != paper.ssim_global
        assert default.ssim_windowed == paper.ssim_windowed

    def test_deterministic_reports(self, photo):
        a = pipeline_run(photo, UPSCALE_METHODS, n=5)
        b = pipeline_run(photo, UPSCALE_METHODS, n=5)
        for ra, rb in zip(a, b):
            assert ra.report == rb.report


class TestPipelineCsv:
    def test_header_and_shape(self, photo):
        rows = pipeline_run(photo, UPSCALE_METHODS, n=5)
        lines = pipeline_csv(rows).strip().split("\n")
        assert lines[0] == "method,n,psnr,s_index,ssim_windowed,ssim_global,mse,seconds"
        assert len(lines) == 5
        assert lines[1].startswith("nn-ramp,5,")
        assert lines[3].startswith("bilinear,,")  # no n for baselines

    def test_failed_rows_skipped(self, photo):
        rows = pipeline_run(photo, ["nearest-down", "bilinear"])
        lines = pipeline_csv(rows).strip().split("\n")
        assert len(lines) == 2
        assert lines[1].startswith("bilinear,")

    def test_infinite_psnr_rendered_as_inf(self, photo):
        rows = pipeline_run(photo, ["bilinear"], factor=1)
        body = pipeline_csv(rows).strip().split("\n")[1]
        assert body.split(",")[2] == "inf"

    def test_stable_modulo_timing(self, photo):
        def strip_seconds(text):
            return [line.rsplit(",", 1)[0] for line in text.strip().split("\n")]

        a = pipeline_csv(pipeline_run(photo, UPSCALE_METHODS, n=5))
        b = pipeline_csv(pipeline_run(photo, UPSCALE_METHODS, n=5))
        assert strip_seconds(a) == strip_seconds(b)

    def test_trailing_newline(self, photo):
        out = pipeline_csv(pipeline_run(photo, ["bilinear"]))
        assert out.endswith("\n") and not out.endswith("\n\n")


class TestMetricsCsv:
    def test_single_line_order(self, photo):
        report = metrics_report(photo, photo)
        line = metrics_csv(report)
        assert line == "0,inf,1,1,1\n"

    def test_nontrivial_values(self, photo):
        shifted = ImageRaster(
            np.clip(photo.data.astype(int) + 5, 0, 255).astype(np.uint8)
        )
        report = metrics_report(photo, shifted)
        fields = metrics_csv(report).strip().split(",")
        assert len(fields) == 5
        assert float(fields[0]) == pytest.approx(report.mse, rel=1e-8)
        assert float(fields[1]) == pytest.approx(report.psnr, rel=1e-8)


class TestStudyRun:
    def test_ramp_reconstruction_hits_floor(self, photo):
        # Exact reconstruction at unit scale: every dissimilarity is zero,
        # so the fit is replaced by the sentinel.
        study = study_run(photo, "bilinear", [3, 5, 7], factor=1)
        assert study.fitted_slope == -math.inf
        assert all(v <= 1e-12 for v in study.errors)

    def test_logistic_dissimilarity_decreases(self, photo):
        study = study_run(photo, "nn-logistic", [2, 6, 18], factor=1)
        assert study.errors[0] >= study.errors[1] >= study.errors[2]
        assert study.n_values == (2, 6, 18)

    def test_values_match_direct_metric(self, photo):
        study = study_run(photo, "nn-logistic", [2, 4, 8], factor=1)
        out, _ = apply_method(photo, "nn-logistic", n=4, r=1.0)
        assert study.errors[1] == pytest.approx(
            1.0 - ssim_windowed(photo, out), abs=1e-15
        )

    def test_unknown_method(self, photo):
        with pytest.raises(ValueError):
            study_run(photo, "nearest-down", [2, 4, 8])


class TestModelErrorStudy:
    def test_errors_decrease_for_ramp(self, photo):
        study = model_error_study(photo, "ramp", [2, 3, 5], p=1.0)
        assert study.errors[0] > study.errors[1] > study.errors[2]
        assert study.fitted_slope < 0.0

    def test_narrow_windows_reproduce_model_exactly(self, photo):
        # At the doubled probe resolution every midpoint sits at least a
        # quarter pixel from a cell boundary. For n >= 7 the compactly
        # supported window spans less than that, so the model is
        # reproduced exactly and the sentinel takes over.
        study = model_error_study(photo, "ramp", [7, 8, 16], p=1.0)
        assert all(e == 0.0 for e in study.errors)
        assert study.fitted_slope == -math.inf

    def test_color_rejected(self, color_photo):
        with pytest.raises(NotGrayscale):
            model_error_study(color_photo, "ramp", [2, 4, 8])

    def test_unknown_family(self, photo):
        with pytest.raises(ValueError):
            model_error_study(photo, "gaussian", [2, 4, 8])
