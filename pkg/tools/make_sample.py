"""Regenerate data/sample64.pgm, the synthetic test scene shipped with the
repository (public domain, CC0).

The scene mixes the structures the reconstruction pipeline cares about:
flat sky, a dark building with bright windows, a sun disk, a smooth
horizon gradient, periodic fence posts, and mild Gaussian noise. Fully
deterministic: rerunning this script reproduces the file byte for byte.
"""

from __future__ import annotations

import pathlib

import numpy as np

from nnscale import ImageRaster, write_pnm


def build_scene() -> np.ndarray:
    rng = np.random.default_rng(3)
    img = np.full((64, 64), 200.0)
    yy, xx = np.mgrid[0:64, 0:64]
    img[yy >= 40] = 70.0
    img[(yy >= 40)] += (xx[yy >= 40] % 9 < 2) * 60.0
    img[8:26, 6:22] = 40.0
    img[10:24:4, 8:20] = 230.0
    disk = (yy - 14) ** 2 + (xx - 48) ** 2 <= 49
    img[disk] = 250.0
    img[30:40, :] = np.linspace(180, 90, 10)[:, None]
    img += rng.normal(0, 2.0, img.shape)
    return np.clip(np.floor(img + 0.5), 0, 255)


def main() -> None:
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "sample64.pgm"
    out.parent.mkdir(parents=True, exist_ok=True)
    raster = ImageRaster(build_scene().astype(np.uint8))
    out.write_bytes(write_pnm(raster, "P5"))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
