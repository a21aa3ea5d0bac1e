"""HTTP service: route contracts, payload validation, and error mapping."""

import base64
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from nnscale import ImageRaster, logistic_kernel, phi, write_pnm
from nnscale.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _b64_png_like(shape=(16, 16), seed=0):
    rng = np.random.default_rng(seed)
    raster = ImageRaster(rng.integers(0, 256, size=shape, dtype=np.uint8))
    return base64.b64encode(write_pnm(raster)).decode("ascii"), raster


class TestHealth:
    def test_ok(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["version"]


class TestKernel:
    def test_ramp_report(self, client):
        resp = client.post("/v1/kernel", json={"family": "ramp"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["family"] == "ramp"
        assert body["truncation_radius"] == 1.5
        assert body["phi_zero"] == pytest.approx(0.5, abs=1e-12)
        assert body["phi_one"] == pytest.approx(0.25, abs=1e-12)
        assert body["m0_max_deviation"] <= 1e-9

    def test_logistic_phi_one(self, client):
        resp = client.post("/v1/kernel", json={"family": "logistic"})
        body = resp.json()
        assert body["phi_one"] == pytest.approx(
            float(phi(logistic_kernel(), 1.0)), abs=1e-7
        )
        assert body["truncation_radius"] > 10.0

    def test_samples_and_csv(self, client):
        resp = client.post("/v1/kernel", json={"family": "ramp", "sample_count": 7})
        body = resp.json()
        assert len(body["samples"]) == 7
        xs = [s["x"] for s in body["samples"]]
        assert xs == sorted(xs)
        mid = body["samples"][3]
        assert mid["x"] == pytest.approx(0.0, abs=1e-12)
        assert mid["phi"] == pytest.approx(0.5, abs=1e-12)
        lines = body["csv"].strip().split("\n")
        assert lines[0] == "x,phi"
        assert len(lines) == 8

    def test_unknown_family_rejected(self, client):
        resp = client.post("/v1/kernel", json={"family": "gaussian"})
        assert resp.status_code == 422

    def test_bad_epsilon_rejected(self, client):
        resp = client.post("/v1/kernel", json={"family": "logistic", "epsilon": 0.7})
        assert resp.status_code == 400


class TestResize:
    def test_round_trip_dimensions(self, client):
        image, _ = _b64_png_like()
        resp = client.post(
            "/v1/resize", json={"image": image, "method": "nn-ramp", "n": 4, "r": 2.0}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert (body["rows"], body["cols"], body["channels"]) == (32, 32, 1)
        assert body["seconds"] >= 0.0
        from nnscale import read_pnm

        out = read_pnm(base64.b64decode(body["image"]))
        assert out.data.shape == (32, 32)

    def test_downscale_via_factor(self, client):
        image, raster = _b64_png_like()
        resp = client.post(
            "/v1/resize",
            json={"image": image, "method": "nearest-down", "factor": 2},
        )
        assert resp.status_code == 200
        assert resp.json()["rows"] == 8

    def test_invalid_base64(self, client):
        resp = client.post(
            "/v1/resize", json={"image": "@@not-base64@@", "method": "bilinear"}
        )
        assert resp.status_code == 400

    def test_malformed_image_bytes(self, client):
        junk = base64.b64encode(b"GIF89a not a pnm").decode("ascii")
        resp = client.post("/v1/resize", json={"image": junk, "method": "bilinear"})
        assert resp.status_code == 400

    def test_zero_n_rejected_by_schema(self, client):
        image, _ = _b64_png_like()
        resp = client.post(
            "/v1/resize", json={"image": image, "method": "nn-ramp", "n": 0}
        )
        assert resp.status_code == 422

    def test_unknown_method_rejected_by_schema(self, client):
        image, _ = _b64_png_like()
        resp = client.post(
            "/v1/resize", json={"image": image, "method": "lanczos"}
        )
        assert resp.status_code == 422

    def test_unknown_request_field_rejected(self, client):
        image, _ = _b64_png_like()
        resp = client.post(
            "/v1/resize",
            json={"image": image, "method": "bilinear", "sharpen": True},
        )
        assert resp.status_code == 422


class TestMetrics:
    def test_identical_pair(self, client):
        image, _ = _b64_png_like()
        resp = client.post("/v1/metrics", json={"image": image, "reference": image})
        assert resp.status_code == 200
        body = resp.json()
        assert body["mse"] == 0.0
        assert body["psnr"] is None  # +inf is carried as null in JSON
        assert body["ssim_global"] == 1.0
        assert body["csv"].startswith("0,inf,1,")

    def test_distinct_pair(self, client):
        image, _ = _b64_png_like(seed=1)
        reference, _ = _b64_png_like(seed=2)
        resp = client.post(
            "/v1/metrics", json={"image": image, "reference": reference}
        )
        body = resp.json()
        assert body["mse"] > 0.0
        assert isinstance(body["psnr"], float)

    def test_constants_selection(self, client):
        image, _ = _b64_png_like(seed=3)
        reference, _ = _b64_png_like(seed=4)
        squared = client.post(
            "/v1/metrics",
            json={"image": image, "reference": reference, "constants": "squared"},
        ).json()
        paper = client.post(
            "/v1/metrics",
            json={"image": image, "reference": reference, "constants": "paper"},
        ).json()
        assert squared["ssim_global"] != paper["ssim_global"]
        assert squared["ssim_windowed"] == paper["ssim_windowed"]

    def test_size_mismatch(self, client):
        a, _ = _b64_png_like(shape=(16, 16))
        b, _ = _b64_png_like(shape=(12, 16))
        resp = client.post("/v1/metrics", json={"image": a, "reference": b})
        assert resp.status_code == 400


class TestPipeline:
    def test_four_methods(self, client):
        image, _ = _b64_png_like(shape=(24, 24), seed=5)
        resp = client.post(
            "/v1/pipeline",
            json={
                "image": image,
                "methods": ["nn-ramp", "nn-logistic", "bilinear", "bicubic"],
                "n": 5,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert [row["method"] for row in body["rows"]] == [
            "nn-ramp",
            "nn-logistic",
            "bilinear",
            "bicubic",
        ]
        for row in body["rows"]:
            assert row["error"] is None
            assert row["mse"] is not None
        assert body["csv"].startswith("method,n,psnr")

    def test_indivisible_dimensions(self, client):
        image, _ = _b64_png_like(shape=(15, 15), seed=6)
        resp = client.post(
            "/v1/pipeline",
            json={"image": image, "methods": ["nn-ramp"], "factor": 2},
        )
        assert resp.status_code == 400

    def test_bad_method_gets_error_row(self, client):
        image, _ = _b64_png_like(shape=(16, 16), seed=7)
        resp = client.post(
            "/v1/pipeline",
            json={"image": image, "methods": ["bilinear", "nearest-down"]},
        )
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert rows[0]["error"] is None
        assert rows[1]["error"] is not None

    def test_empty_methods_rejected(self, client):
        image, _ = _b64_png_like()
        resp = client.post("/v1/pipeline", json={"image": image, "methods": []})
        assert resp.status_code == 422


class TestStudy:
    def test_floor_series_gives_null_slope(self, client):
        image, _ = _b64_png_like(shape=(16, 16), seed=8)
        resp = client.post(
            "/v1/study",
            json={"image": image, "method": "bilinear", "n_values": [2, 4, 6]},
        )
        assert resp.status_code == 200
        body = resp.json()
        # Unit-scale bilinear reproduces the image: -inf slope -> null.
        assert body["slope"] is None
        assert body["dissimilarities"] == [0.0, 0.0, 0.0]
        assert body["csv"].startswith("n,dissimilarity\n")
        assert body["model_errors"] is None

    def test_logistic_decay(self, client):
        image, _ = _b64_png_like(shape=(16, 16), seed=9)
        resp = client.post(
            "/v1/study",
            json={"image": image, "method": "nn-logistic", "n_values": [2, 5, 12]},
        )
        body = resp.json()
        d = body["dissimilarities"]
        assert d[0] >= d[1] >= d[2]

    def test_error_study_adds_model_fields(self, client):
        image, _ = _b64_png_like(shape=(12, 12), seed=10)
        resp = client.post(
            "/v1/study",
            json={
                "image": image,
                "method": "nn-logistic",
                "n_values": [2, 4, 8],
                "error_study": True,
                "p": 1.0,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["model_errors"] is not None
        assert len(body["model_errors"]) == 3
        assert body["model_errors"][0] > body["model_errors"][2]
        assert body["model_csv"].startswith("n,error\n")
        assert isinstance(body["model_slope"], float)

    def test_error_study_needs_nn_method(self, client):
        image, _ = _b64_png_like(shape=(12, 12), seed=11)
        resp = client.post(
            "/v1/study",
            json={
                "image": image,
                "method": "bilinear",
                "n_values": [2, 4, 8],
                "error_study": True,
            },
        )
        assert resp.status_code == 400

    def test_two_points_rejected_by_schema(self, client):
        image, _ = _b64_png_like()
        resp = client.post(
            "/v1/study",
            json={"image": image, "method": "nn-ramp", "n_values": [2, 4]},
        )
        assert resp.status_code == 422
