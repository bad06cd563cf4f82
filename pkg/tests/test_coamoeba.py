from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import ndimage
import pytest

from hmskit.coamoeba import (
    coamoeba_raster,
    exact_light_area_fraction,
    interior_components,
    pixels_inside_lifts,
    torus_components,
)


@pytest.fixture(scope="module")
def raster():
    return coamoeba_raster(1, 256)


def test_component_counts(raster):
    assert interior_components(raster.dark) == 6
    assert interior_components(~raster.dark) == 3


def test_area_matches_exact_hexagon_area(raster):
    exact = 1 - exact_light_area_fraction(1)
    assert exact == Fraction(1, 4)
    assert raster.area_fraction == pytest.approx(float(exact), rel=0.02)


def test_dark_pixels_avoid_lifted_zonotopes(raster):
    assert pixels_inside_lifts(raster) == 0


def _argument_oracle(res):
    """Exact membership at pixel centres.

    u_1 u_2 (u_1 + u_2) = -1 has a solution with args (t1, t2) iff
    pi - t1 - t2 is the argument of some positive combination of
    e^{i t1} and e^{i t2}, i.e. lies strictly inside their short arc.
    """
    c = (np.arange(res) + 0.5) * 2 / res * np.pi
    t1, t2 = np.meshgrid(c, c)
    width = np.angle(np.exp(1j * (t2 - t1)))
    offset = np.angle(np.exp(1j * (np.pi - 2 * t1 - t2)))
    return np.where(width >= 0, (offset > 0) & (offset < width), (offset < 0) & (offset > width))


def test_raster_agrees_with_argument_oracle(raster):
    exact = _argument_oracle(raster.resolution)
    assert not (raster.dark & ~exact).any()
    # misses are allowed only within two pixels of the boundary (thin tips)
    pad = np.pad(exact, 2, mode="wrap")
    deep = ndimage.binary_erosion(pad, np.ones((3, 3), bool), iterations=2)[2:-2, 2:-2]
    assert not (deep & ~raster.dark).any()


def test_points_on_the_fiber_satisfy_oracle():
    # numpy's root finder against the argument criterion
    rng = np.random.default_rng(3)
    for _ in range(200):
        u1 = np.exp(rng.uniform(-2, 2) + 1j * rng.uniform(0, 2 * np.pi))
        for u2 in np.roots([u1, u1**2, 1]):
            t1, t2 = np.angle(u1), np.angle(u2)
            width = np.angle(np.exp(1j * (t2 - t1)))
            offset = np.angle(np.exp(1j * (np.pi - 2 * t1 - t2)))
            assert 0 < offset / width < 1


def test_torus_wraparound():
    mask = np.zeros((8, 8), dtype=bool)
    mask[0, 2:4] = mask[7, 2:4] = True
    assert torus_components(mask) == 1
    mask2 = np.zeros((8, 8), dtype=bool)
    mask2[0, 0] = mask2[7, 7] = True
    assert torus_components(mask2) == 2
    assert torus_components(mask2, diagonal=True) == 1


def test_outputs(tmp_path):
    r = coamoeba_raster(1, 64, out=str(tmp_path / "fig"))
    ppm = (tmp_path / "fig.ppm").read_bytes()
    assert ppm.startswith(b"P6\n64 64\n255\n")
    assert len(ppm) == len(b"P6\n64 64\n255\n") + 64 * 64 * 3
    assert (tmp_path / "fig.svg").read_text().startswith("<svg")
    assert len(r.files) == 2


def test_deterministic():
    a = coamoeba_raster(1, 64).dark
    b = coamoeba_raster(1, 64).dark
    assert np.array_equal(a, b)


def test_tiny_and_invalid_resolutions():
    assert coamoeba_raster(1, 1).dark.shape == (1, 1)
    with pytest.raises(ValueError):
        coamoeba_raster(1, 0)
    with pytest.raises(ValueError):
        coamoeba_raster(3, 16)


def test_n2_slice_is_nonempty():
    r = coamoeba_raster(2, 64)
    assert 0 < r.area_fraction < 1
