"""Shape fixtures: regular polygons, rectangles, slabs, stadiums, random bodies."""

from __future__ import annotations

import math

import numpy as np

from .geometry2d import HalfPlanePolygon, convex_project


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 1.0), phase: float = 0.0) -> HalfPlanePolygon:
    """Regular n-gon inscribed in a circle; vertex k sits at angle phase + 2πk/n."""
    k = np.arange(n)
    th = phase + 2.0 * math.pi * k / n
    cx, cy = center
    return HalfPlanePolygon(np.column_stack([cx + radius * np.cos(th), cy + radius * np.sin(th)]))


def disk(n: int = 512, radius: float = 1.0, center=None) -> HalfPlanePolygon:
    """Polygonal disk resting on the floor (bottom vertex at the origin) unless centred elsewhere."""
    if center is None:
        center = (0.0, radius)
    # phase -π/2 puts vertex 0 at the bottom; for n divisible by 4 a vertex sits at the top
    return regular_polygon(n, radius, center, phase=-0.5 * math.pi)


def rectangle(width: float, height: float, x0: float = 0.0, y0: float = 0.0) -> HalfPlanePolygon:
    return HalfPlanePolygon(
        np.array([[x0, y0], [x0 + width, y0], [x0 + width, y0 + height], [x0, y0 + height]])
    )


def unit_square(x0: float = 0.0, y0: float = 0.0) -> HalfPlanePolygon:
    return rectangle(1.0, 1.0, x0, y0)


def equilateral_triangle(side: float = 1.0, x0: float = 0.0) -> HalfPlanePolygon:
    return HalfPlanePolygon(
        np.array([[x0, 0.0], [x0 + side, 0.0], [x0 + 0.5 * side, 0.5 * math.sqrt(3.0) * side]])
    )


def slab(R: float) -> HalfPlanePolygon:
    """Unit-area slab [-R, R] x [0, 1/(2R)]."""
    return rectangle(2.0 * R, 1.0 / (2.0 * R), x0=-R)


def stadium(length: float = 2.0, radius: float = 0.5, n_cap: int = 32, lift: float = 0.0) -> HalfPlanePolygon:
    """Flat-sided stadium lying on the floor: a rectangle capped by two half-disks.

    Shipped only as an exploration fixture for the minimality checks.
    """
    th = np.linspace(-0.5 * math.pi, 0.5 * math.pi, n_cap + 1)
    right = np.column_stack([0.5 * length + radius * np.cos(th), radius + lift + radius * np.sin(th)])
    left = np.column_stack([-0.5 * length - radius * np.cos(th), radius + lift - radius * np.sin(th)])
    return HalfPlanePolygon(np.vstack([right, left]))


def random_convex_polygon(
    rng: np.random.Generator, n_points: int = 12, target_area: float = 1.0, on_floor: bool = True
) -> HalfPlanePolygon:
    """Hull of random points with a random anisotropy, scaled to ``target_area``.

    With ``on_floor`` the lowest part is cut flat at y = 0 so the body has a
    contact segment; otherwise it is lifted off the floor.
    """
    aspect = math.exp(rng.uniform(-0.7, 0.7))
    pts = rng.normal(size=(n_points, 2)) * np.array([aspect, 1.0 / aspect])
    pts -= pts.min(axis=0)
    if on_floor:
        pts[:, 1] -= rng.uniform(0.05, 0.35) * np.ptp(pts[:, 1])
    else:
        pts[:, 1] += 0.5
    P = convex_project(pts)
    s = math.sqrt(target_area / P.area)
    return P.scaled(s)
