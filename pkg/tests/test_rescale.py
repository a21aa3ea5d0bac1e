"""Rescaling: image model semantics, nearest-neighbor decimation, the
kernel-operator upscaler against a full-lattice reference, and the
bilinear/bicubic baselines."""

import numpy as np
import pytest

from nnscale import (
    ImageRaster,
    IndivisibleDims,
    NotGrayscale,
    RescaleConfig,
    downscale_nearest,
    image_model,
    logistic_kernel,
    output_dims,
    phi,
    ramp_kernel,
    round_clamp_u8,
    upscale_bicubic,
    upscale_bilinear,
    upscale_nn,
)


def _raster(values):
    return ImageRaster(np.asarray(values, dtype=np.uint8))


class TestImageModel:
    def test_cell_lookup_examples(self):
        model = image_model(_raster([[10, 20], [30, 40]]))
        assert model.evaluate([(0.5, 0.5)])[0] == 10.0
        assert model.evaluate([(1.0, 0.0)])[0] == 30.0
        # Top boundary belongs to the last cell: the model is total on I.
        assert model.evaluate([(2.0, 2.0)])[0] == 40.0

    def test_half_open_cells(self):
        model = image_model(_raster([[10, 20], [30, 40]]))
        assert model.evaluate([(0.999, 0.999)])[0] == 10.0
        assert model.evaluate([(1.0, 1.0)])[0] == 40.0
        assert model.evaluate([(0.0, 1.0)])[0] == 20.0

    def test_domain_is_pixel_extent(self):
        model = image_model(_raster(np.zeros((3, 5))))
        assert model.domain.lo == (0.0, 0.0)
        assert model.domain.hi == (3.0, 5.0)

    def test_color_rejected(self):
        with pytest.raises(NotGrayscale):
            image_model(ImageRaster(np.zeros((2, 2, 3), dtype=np.uint8)))

    def test_field_wrapper_matches_model(self):
        model = image_model(_raster([[1, 2], [3, 4]]))
        field = model.as_field()
        pts = np.array([[0.2, 1.7], [1.9, 0.1]])
        np.testing.assert_array_equal(field.evaluate(pts), model.evaluate(pts))


class TestOutputDims:
    def test_round_half_away(self):
        assert output_dims(2, 2, 2.0) == (4, 4)
        assert output_dims(3, 5, 1.5) == (5, 8)  # 4.5 -> 5, 7.5 -> 8
        assert output_dims(10, 10, 0.35) == (4, 4)

    def test_collapse_raises(self):
        with pytest.raises(ValueError):
            output_dims(2, 2, 0.1)


class TestRoundClamp:
    def test_half_away_from_zero(self):
        vals = np.array([0.5, 1.5, 2.4, 2.5, -0.4, -3.0, 254.5, 255.49, 300.0])
        out = round_clamp_u8(vals)
        np.testing.assert_array_equal(out, [1, 2, 2, 3, 0, 0, 255, 255, 255])
        assert out.dtype == np.uint8


class TestDownscale:
    def test_factor_two_offsets(self):
        data = np.arange(16, dtype=np.uint8).reshape(4, 4)
        top_left = downscale_nearest(_raster(data), 2)
        np.testing.assert_array_equal(top_left.data, [[0, 2], [8, 10]])
        bottom_right = downscale_nearest(_raster(data), 2, offset=1)
        np.testing.assert_array_equal(bottom_right.data, [[5, 7], [13, 15]])

    def test_factor_one_identity(self):
        data = np.arange(9, dtype=np.uint8).reshape(3, 3)
        out = downscale_nearest(_raster(data), 1)
        np.testing.assert_array_equal(out.data, data)

    def test_indivisible(self):
        with pytest.raises(IndivisibleDims):
            downscale_nearest(_raster(np.zeros((5, 4))), 2)
        with pytest.raises(IndivisibleDims):
            downscale_nearest(_raster(np.zeros((4, 6))), 4)

    def test_offset_validation(self):
        raster = _raster(np.zeros((4, 4)))
        with pytest.raises(ValueError):
            downscale_nearest(raster, 2, offset=2)
        with pytest.raises(ValueError):
            downscale_nearest(raster, 2, offset=-1)
        with pytest.raises(ValueError):
            downscale_nearest(raster, 0)

    def test_color_supported(self):
        data = np.arange(48, dtype=np.uint8).reshape(4, 4, 3)
        out = downscale_nearest(ImageRaster(data), 2)
        assert out.data.shape == (2, 2, 3)
        np.testing.assert_array_equal(out.data, data[::2, ::2])


def _bruteforce_nn(raster, n, r, kernel):
    """Full-lattice reference: weight every node individually, no cell
    grouping; same centers, same truncation mask."""
    rows, cols = raster.data.shape
    out_r, out_c = output_dims(rows, cols, r)

    def axis_weights(out_len, cells):
        nodes = n * cells + 1
        w = np.empty((out_len, nodes))
        for u in range(out_len):
            x = (u + 0.5) / r
            for k in range(nodes):
                d = n * x - k
                w[u, k] = float(phi(kernel, d)) if abs(d) <= kernel.truncation_radius else 0.0
        return w

    a1 = axis_weights(out_r, rows)
    a2 = axis_weights(out_c, cols)
    k1 = np.minimum(np.arange(n * rows + 1) // n, rows - 1)
    k2 = np.minimum(np.arange(n * cols + 1) // n, cols - 1)
    node_values = raster.data.astype(float)[np.ix_(k1, k2)]
    num = a1 @ node_values @ a2.T
    den = np.outer(a1.sum(axis=1), a2.sum(axis=1))
    return round_clamp_u8(num / den)


class TestUpscaleNn:
    def test_constant_is_exact(self):
        raster = _raster(np.full((5, 7), 119))
        for kern in (ramp_kernel(), logistic_kernel()):
            out = upscale_nn(raster, RescaleConfig(6, 2.5, kern))
            assert out.data.shape == (13, 18)
            assert np.all(out.data == 119)

    def test_single_pixel_blowup(self):
        out = upscale_nn(_raster([[200]]), RescaleConfig(4, 4.0, ramp_kernel()))
        assert out.data.shape == (4, 4)
        assert np.all(out.data == 200)

    def test_checkerboard_matches_bruteforce(self):
        board = np.indices((8, 8)).sum(axis=0) % 2 * 255
        raster = _raster(board)
        for kern in (ramp_kernel(), logistic_kernel()):
            config = RescaleConfig(10, 2.0, kern)
            fast = upscale_nn(raster, config)
            slow = _bruteforce_nn(raster, 10, 2.0, kern)
            assert np.array_equal(fast.data, slow)

    def test_random_raster_matches_bruteforce(self):
        rng = np.random.default_rng(41)
        raster = _raster(rng.integers(0, 256, size=(6, 9)))
        config = RescaleConfig(7, 1.7, ramp_kernel())
        fast = upscale_nn(raster, config)
        slow = _bruteforce_nn(raster, 7, 1.7, ramp_kernel())
        assert np.array_equal(fast.data, slow)

    def test_output_within_input_range(self):
        rng = np.random.default_rng(43)
        data = rng.integers(40, 200, size=(10, 10))
        raster = _raster(data)
        for kern in (ramp_kernel(), logistic_kernel()):
            out = upscale_nn(raster, RescaleConfig(8, 3.0, kern))
            assert out.data.min() >= data.min()
            assert out.data.max() <= data.max()

    def test_locally_constant_regions_exact(self):
        # Where every node within the truncation window falls in a single
        # model cell per axis, the operator returns that cell value exactly.
        rng = np.random.default_rng(47)
        data = rng.integers(0, 256, size=(8, 8))
        raster = _raster(data)
        n, r = 4, 3.0
        kern = ramp_kernel()
        out = upscale_nn(raster, RescaleConfig(n, r, kern))

        def sole_cell(u, cells):
            x = n * (u + 0.5) / r
            ks = [k for k in range(n * cells + 1) if abs(x - k) <= kern.truncation_radius]
            owners = {min(k // n, cells - 1) for k in ks}
            return owners.pop() if len(owners) == 1 else None

        # Require a healthy number of pinned pixels so the mask is not vacuous.
        checked = 0
        for u in range(out.data.shape[0]):
            cu = sole_cell(u, 8)
            if cu is None:
                continue
            for v in range(out.data.shape[1]):
                cv = sole_cell(v, 8)
                if cv is None:
                    continue
                assert out.data[u, v] == data[cu, cv]
                checked += 1
        assert checked > 50

    def test_threads_argument_ignored(self):
        raster = _raster(np.arange(36).reshape(6, 6))
        config = RescaleConfig(5, 2.0, ramp_kernel())
        a = upscale_nn(raster, config, threads=None)
        b = upscale_nn(raster, config, threads=8)
        assert np.array_equal(a.data, b.data)

    def test_deterministic(self):
        rng = np.random.default_rng(53)
        raster = _raster(rng.integers(0, 256, size=(12, 12)))
        config = RescaleConfig(9, 2.0, logistic_kernel())
        a = upscale_nn(raster, config)
        b = upscale_nn(raster, config)
        assert np.array_equal(a.data, b.data)

    def test_color_rejected(self):
        with pytest.raises(NotGrayscale):
            upscale_nn(
                ImageRaster(np.zeros((2, 2, 3), dtype=np.uint8)),
                RescaleConfig(4, 2.0, ramp_kernel()),
            )

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RescaleConfig(0, 2.0, ramp_kernel())
        with pytest.raises(ValueError):
            RescaleConfig(4, 0.0, ramp_kernel())
        with pytest.raises(ValueError):
            RescaleConfig(4, -1.0, ramp_kernel())


class TestBilinear:
    def test_hand_oracle_row(self):
        out = upscale_bilinear(_raster([[0, 100]]), 2.0)
        np.testing.assert_array_equal(out.data, [[0, 25, 75, 100], [0, 25, 75, 100]])

    def test_identity_at_unit_scale(self):
        rng = np.random.default_rng(59)
        data = rng.integers(0, 256, size=(7, 5), dtype=np.uint8)
        out = upscale_bilinear(_raster(data), 1.0)
        np.testing.assert_array_equal(out.data, data)

    def test_range_preserved(self):
        rng = np.random.default_rng(61)
        data = rng.integers(30, 220, size=(9, 9))
        out = upscale_bilinear(_raster(data), 2.7)
        assert out.data.min() >= data.min()
        assert out.data.max() <= data.max()

    def test_color_planes_independent(self):
        rng = np.random.default_rng(67)
        data = rng.integers(0, 256, size=(4, 4, 3), dtype=np.uint8)
        color = upscale_bilinear(ImageRaster(data), 2.0)
        for c in range(3):
            plane = upscale_bilinear(_raster(data[:, :, c]), 2.0)
            np.testing.assert_array_equal(color.data[:, :, c], plane.data)


class TestBicubic:
    def test_identity_at_unit_scale(self):
        rng = np.random.default_rng(71)
        data = rng.integers(0, 256, size=(6, 8), dtype=np.uint8)
        out = upscale_bicubic(_raster(data), 1.0)
        np.testing.assert_array_equal(out.data, data)

    def test_linear_gradient_reproduced(self):
        # Cubic convolution is exact on linear data away from the clamped
        # edges; rounding allows one gray level of slack.
        column = (8 * np.arange(32)).astype(np.uint8).reshape(-1, 1)
        out = upscale_bicubic(_raster(np.repeat(column, 4, axis=1)), 2.0)
        src = (np.arange(out.data.shape[0]) + 0.5) / 2.0 - 0.5
        interior = (src >= 1.0) & (src <= 30.0)
        expected = 8.0 * src[interior]
        got = out.data[interior, 2].astype(float)
        assert np.abs(got - expected).max() <= 1.0

    def test_output_clamped_to_byte_range(self):
        # Step edges overshoot under cubic convolution; the result must
        # still be a legal raster.
        data = np.zeros((8, 8))
        data[:, 4:] = 255
        out = upscale_bicubic(_raster(data), 3.0)
        assert out.data.min() >= 0 and out.data.max() <= 255
        assert out.data.dtype == np.uint8

    def test_sharper_than_bilinear_on_edge(self):
        # The overshoot shows up as values outside the open interval
        # spanned by bilinear output near a hard edge.
        data = np.zeros((8, 8))
        data[:, 4:] = 200
        cub = upscale_bicubic(_raster(data), 4.0).data.astype(int)
        lin = upscale_bilinear(_raster(data), 4.0).data.astype(int)
        assert cub.max() > lin.max() or cub.min() < lin.min()
