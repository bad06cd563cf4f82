"""Rasterised coamoebas of the fibre (u_1 + ... + u_{n+1}) u_1 ... u_{n+1} + 1 = 0.

Pixels live on the torus [0, 2)^2 in units of pi: column j covers the
argument of u_1, row i the argument of u_2 (row 0 at the bottom).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .zonotope import lift_zonotopes, polygon_vertices, thimble_point

__all__ = [
    "CoamoebaRaster",
    "coamoeba_raster",
    "torus_components",
    "interior_components",
    "write_ppm",
    "write_svg",
    "exact_light_area_fraction",
    "pixels_inside_lifts",
]

MAX_RESOLUTION = 4096


@dataclass
class CoamoebaRaster:
    n: int
    resolution: int
    dark: np.ndarray  # bool, shape (rows, cols); True where the coamoeba is
    theta3: float | None = None
    files: list = field(default_factory=list)

    @property
    def area_fraction(self) -> float:
        return float(self.dark.mean()) if self.dark.size else 0.0


def _wrap(x: np.ndarray) -> np.ndarray:
    """Angles (units of pi) into [0, 2)."""
    return np.mod(x, 2.0)


def _fill_arcs(dark: np.ndarray, col: int, a: np.ndarray, b: np.ndarray) -> None:
    """Mark row centres lying on the short arc between consecutive samples a -> b."""
    res = dark.shape[0]
    d = np.mod(b - a + 1.0, 2.0) - 1.0  # signed short step in (-1, 1]
    lo = np.where(d >= 0, a, a + d)
    hi = lo + np.abs(d)
    # row r has centre (r + 1/2) * 2 / res; mark centres in [lo, hi] modulo 2
    first = np.ceil(lo * res / 2 - 0.5).astype(int)
    last = np.floor(hi * res / 2 - 0.5).astype(int)
    for f, l in zip(first, last):
        if l >= f:
            rows = np.arange(f, l + 1) % res
            dark[rows, col] = True


def _raster_n1(res: int, log_range: float, samples: int) -> np.ndarray:
    dark = np.zeros((res, res), dtype=bool)
    radii = np.exp(np.linspace(-log_range, log_range, samples))
    for col in range(res):
        phi = (col + 0.5) * 2.0 / res * math.pi
        u1 = radii * np.exp(1j * phi)
        # u1 u2^2 + u1^2 u2 + 1 = 0
        disc = np.sqrt(u1**4 - 4 * u1 + 0j)
        r1 = (-u1**2 + disc) / (2 * u1)
        r2 = (-u1**2 - disc) / (2 * u1)
        # keep the two branches continuous along the radius
        same = np.abs(np.diff(r1)) + np.abs(np.diff(r2))
        cross = np.abs(r1[1:] - r2[:-1]) + np.abs(r2[1:] - r1[:-1])
        parity = np.concatenate(([0], np.cumsum(cross < same) % 2)).astype(bool)
        r1, r2 = np.where(parity, r2, r1), np.where(parity, r1, r2)
        for branch in (r1, r2):
            ang = _wrap(np.angle(branch) / math.pi)
            _fill_arcs(dark, col, ang[:-1], ang[1:])
            _fill_arcs(dark, col, ang, ang)
    return dark


def _raster_n2(res: int, theta3: float, log_range: float, samples: int) -> np.ndarray:
    """Slice of the n = 2 coamoeba at a fixed argument of u_3 (an illustration)."""
    dark = np.zeros((res, res), dtype=bool)
    radii = np.exp(np.linspace(-log_range, log_range, samples))
    r1, r3 = np.meshgrid(radii, radii, indexing="ij")
    u3 = r3 * np.exp(1j * theta3)
    for col in range(res):
        phi = (col + 0.5) * 2.0 / res * math.pi
        u1 = r1 * np.exp(1j * phi)
        # (u1 + u2 + u3) u1 u2 u3 + 1 = 0 is quadratic in u2
        a = u1 * u3
        b = (u1 + u3) * u1 * u3
        disc = np.sqrt(b * b - 4 * a + 0j)
        for root in ((-b + disc) / (2 * a), (-b - disc) / (2 * a)):
            rows = np.floor(_wrap(np.angle(root) / math.pi) * res / 2).astype(int) % res
            dark[np.unique(rows), col] = True
    return dark


def coamoeba_raster(
    n: int,
    resolution: int = 512,
    out: str | None = None,
    theta3: float = 0.3,
    log_range: float = 9.0,
    samples: int | None = None,
) -> CoamoebaRaster:
    """Rasterise the coamoeba; optionally write ``out``.ppm and ``out``.svg."""
    if n not in (1, 2):
        raise ValueError("coamoeba_raster supports n in {1, 2}")
    if not 1 <= resolution <= MAX_RESOLUTION:
        raise ValueError(f"resolution must lie in 1..{MAX_RESOLUTION}")
    if n == 1:
        dark = _raster_n1(resolution, log_range, samples or max(64, 8 * resolution))
        raster = CoamoebaRaster(n, resolution, dark)
    else:
        dark = _raster_n2(resolution, theta3, log_range, samples or 200)
        raster = CoamoebaRaster(n, resolution, dark, theta3)
    if out is not None:
        raster.files.append(write_ppm(raster, out + ".ppm"))
        raster.files.append(write_svg(raster, out + ".svg"))
    return raster


def torus_components(mask: np.ndarray, diagonal: bool = False) -> int:
    """Number of components of ``mask`` on the torus (wrap-around).

    Pixels are joined along edges, and also across corners when ``diagonal``.
    """
    structure = np.ones((3, 3), bool) if diagonal else None
    labels, count = ndimage.label(mask, structure=structure)
    if count == 0:
        return 0
    parent = list(range(count + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    shifts = (-1, 0, 1) if diagonal else (0,)
    for k in shifts:
        for a, b in zip(labels[0, :], np.roll(labels[-1, :], k)):
            union(a, b)
        for a, b in zip(labels[:, 0], np.roll(labels[:, -1], k)):
            union(a, b)
    return len({find(x) for x in range(1, count + 1)})


def interior_components(mask: np.ndarray, depth: int = 2) -> int:
    """Torus components of ``mask`` after peeling ``depth`` pixels off its boundary.

    Regions that only touch at single points (as the triangles and hexagons
    do) get joined by stray pixel bridges; eroding first counts the open
    pieces instead.  What survives is joined across corners too, since a
    sharp tip can thin out to a diagonal chain of pixels.
    """
    if depth <= 0 or mask.size == 0:
        return torus_components(mask, diagonal=True)
    pad = depth + 1
    wrapped = np.pad(mask, pad, mode="wrap")
    eroded = ndimage.binary_erosion(wrapped, structure=np.ones((3, 3), bool), iterations=depth)
    return torus_components(eroded[pad:-pad, pad:-pad], diagonal=True)


def write_ppm(raster: CoamoebaRaster, path: str) -> str:
    res = raster.resolution
    img = np.where(raster.dark[::-1, :, None], 40, 235).astype(np.uint8)
    img = np.repeat(img, 3, axis=2)
    try:
        with open(path, "wb") as fh:
            fh.write(f"P6\n{res} {res}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _svg_point(x: float, y: float, res: int) -> tuple[float, float]:
    return x * res / 2, res - y * res / 2


def write_svg(raster: CoamoebaRaster, path: str) -> str:
    """Outline the lifted zonotopes and mark the thimble points over the raster."""
    res = raster.resolution
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{res}" height="{res}" '
        f'viewBox="0 0 {res} {res}">',
        f'<rect width="{res}" height="{res}" fill="none" stroke="black"/>',
    ]
    if raster.n == 1:
        for Z in lift_zonotopes(1):
            verts = [(float(x), float(y)) for x, y in polygon_vertices(Z)]
            for dx in (-2, 0, 2):
                for dy in (-2, 0, 2):
                    pts = " ".join(
                        "{:.2f},{:.2f}".format(*_svg_point(x + dx, y + dy, res)) for x, y in verts
                    )
                    parts.append(f'<polygon points="{pts}" fill="none" stroke="red" stroke-width="1"/>')
        for i in range(3):
            x, y = (float(v) % 2 for v in thimble_point(1, i))
            cx, cy = _svg_point(x, y, res)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{max(1, res / 128):.2f}" fill="blue"/>')
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def exact_light_area_fraction(n: int = 1) -> Fraction:
    """Total area of the lifted zonotopes over the torus area, exactly."""
    if n != 1:
        raise ValueError("only the planar case is implemented")
    return sum(Z.area() for Z in lift_zonotopes(1)) / 4


def _inside_polygon(verts: list, x: np.ndarray, y: np.ndarray, margin: float) -> np.ndarray:
    """Points at distance > margin inside a convex counter-clockwise polygon."""
    inside = np.ones_like(x, dtype=bool)
    k = len(verts)
    for i in range(k):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % k]
        ex, ey = x1 - x0, y1 - y0
        length = math.hypot(ex, ey)
        cross = (ex * (y - y0) - ey * (x - x0)) / length
        inside &= cross > margin
    return inside


def pixels_inside_lifts(raster: CoamoebaRaster, margin_pixels: float = 1.0) -> int:
    """Dark pixels whose centre lies deeper than the margin inside a lifted zonotope."""
    if raster.n != 1:
        raise ValueError("only the n = 1 raster is checked")
    res = raster.resolution
    rows, cols = np.nonzero(raster.dark)
    x = (cols + 0.5) * 2.0 / res
    y = (rows + 0.5) * 2.0 / res
    margin = margin_pixels * 2.0 / res
    bad = np.zeros_like(x, dtype=bool)
    for Z in lift_zonotopes(1):
        verts = [(float(a), float(b)) for a, b in polygon_vertices(Z)]
        for dx in (-2, 0, 2):
            for dy in (-2, 0, 2):
                bad |= _inside_polygon(verts, x - dx, y - dy, margin)
    return int(bad.sum())
