"""Convex polygons in the closed upper half-plane H = {y >= 0}.

Every shape in the package is a :class:`HalfPlanePolygon`: a CCW vertex
array whose floor vertices (``|y| <= tol``) form one contiguous run, the
contact segment.  The functions here measure such polygons (area, free and
wetted boundary, contact angles, curvature), compare them (Hausdorff
distance, symmetric difference) and build the two competitor families used
by the minimality checks: cuts by a chord and tangent fills.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .errors import (
    InvalidShapeError,
    NoCrossingError,
    PreconditionError,
    UnsupportedCutError,
    UnsupportedFillError,
)

TOL_GEOM_REL = 1e-12
TOL_CONVEX_REL = 1e-10

Point = Sequence[float]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _angle_between(a: np.ndarray, b: np.ndarray) -> float:
    return float(math.atan2(abs(_cross(a, b)), float(np.dot(a, b))))


def _shoelace(v: np.ndarray) -> float:
    w = np.roll(v, -1, axis=0)
    return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))


def _diameter(v: np.ndarray) -> float:
    return float(pdist(v).max())


@dataclass(frozen=True, eq=False)
class HalfPlanePolygon:
    """Convex body in H stored as a CCW vertex array of shape (n, 2).

    Construction validates the invariants and snaps vertices within
    ``1e-12 * diam`` of the floor to ``y = 0``.  Instances are immutable.
    """

    vertices: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InvalidShapeError("need an (n, 2) vertex array with n >= 3")
        if not np.all(np.isfinite(v)):
            raise InvalidShapeError("non-finite vertex coordinates")
        diam = _diameter(v)
        if diam <= 0.0:
            raise InvalidShapeError("all vertices coincide")
        tol = TOL_GEOM_REL * diam
        if np.any(v[:, 1] < -tol):
            raise InvalidShapeError(f"vertex below the floor (min y = {v[:, 1].min():.3e})")
        v[np.abs(v[:, 1]) <= tol, 1] = 0.0
        a = _shoelace(v)
        if a <= 0.0:
            raise InvalidShapeError(f"non-positive signed area {a:.3e} (not CCW or degenerate)")
        e = np.roll(v, -1, axis=0) - v
        turn = _cross(e, np.roll(e, -1, axis=0))
        if np.any(turn < -TOL_CONVEX_REL * diam * diam):
            raise InvalidShapeError("polygon is not convex")
        floor = v[:, 1] == 0.0
        if np.count_nonzero(floor != np.roll(floor, 1)) > 2:
            raise InvalidShapeError("floor vertices are not contiguous")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_area", a)
        object.__setattr__(self, "_diam", diam)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @property
    def area(self) -> float:
        return self._area

    @property
    def diam(self) -> float:
        return self._diam

    @property
    def tol(self) -> float:
        return TOL_GEOM_REL * self._diam

    @cached_property
    def floor_mask(self) -> np.ndarray:
        return self.vertices[:, 1] == 0.0

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edge_vectors[:, 0], self.edge_vectors[:, 1])

    @cached_property
    def floor_edge_mask(self) -> np.ndarray:
        """Edge i = (v_i, v_{i+1}) lies on the floor."""
        f = self.floor_mask
        return f & np.roll(f, -1)

    @cached_property
    def floor_run(self) -> tuple[int, int] | None:
        """Indices (first, last) of the floor run in CCW order, or None."""
        f = self.floor_mask
        if not f.any():
            return None
        n = self.n
        if f.all():
            raise InvalidShapeError("every vertex on the floor")
        start = next(i for i in range(n) if f[i] and not f[i - 1])
        end = start
        while f[(end + 1) % n]:
            end = (end + 1) % n
        return start, end

    def translated(self, t: Point) -> "HalfPlanePolygon":
        return HalfPlanePolygon(self.vertices + np.asarray(t, dtype=float))

    def scaled(self, s: float, origin: Point = (0.0, 0.0)) -> "HalfPlanePolygon":
        o = np.asarray(origin, dtype=float)
        return HalfPlanePolygon(o + s * (self.vertices - o))


@dataclass(frozen=True)
class ContactData:
    p1: tuple[float, float] | None
    p2: tuple[float, float] | None
    wetted_length: float
    gamma1: float | None
    gamma2: float | None


@dataclass(frozen=True)
class FittedAngles:
    gamma1: float
    gamma2: float
    raw1: float
    raw2: float
    n_used1: int
    n_used2: int
    fallback: bool


@dataclass(frozen=True)
class CutResult:
    polygon: HalfPlanePolygon
    gamma_eps: float
    removed_area: float
    removed_perimeter: float
    chord: tuple[tuple[float, float], tuple[float, float]]


def as_polygon(p: HalfPlanePolygon | np.ndarray | Iterable) -> HalfPlanePolygon:
    return p if isinstance(p, HalfPlanePolygon) else HalfPlanePolygon(np.asarray(p, dtype=float))


# --------------------------------------------------------------------------
# measures


def area(P: HalfPlanePolygon) -> float:
    return P.area


def perimeter(P: HalfPlanePolygon) -> float:
    return float(P.edge_lengths.sum())


def diameter(P: HalfPlanePolygon) -> float:
    return P.diam


def boundary_measures(P: HalfPlanePolygon) -> tuple[float, ContactData]:
    """Free perimeter (length of the boundary above the floor) and contact data."""
    lengths = P.edge_lengths
    on_floor = P.floor_edge_mask
    free = float(lengths[~on_floor].sum())
    wetted = float(lengths[on_floor].sum())
    run = P.floor_run
    if run is None:
        return free, ContactData(None, None, 0.0, None, None)
    v = P.vertices
    a, b = run
    n = P.n
    g1 = _angle_between(np.array([1.0, 0.0]), v[(a - 1) % n] - v[a])
    g2 = _angle_between(np.array([-1.0, 0.0]), v[(b + 1) % n] - v[b])
    return free, ContactData(
        (float(v[a, 0]), 0.0), (float(v[b, 0]), 0.0), wetted, max(g1, 1e-300), max(g2, 1e-300)
    )


def free_perimeter(P: HalfPlanePolygon) -> float:
    return float(P.edge_lengths[~P.floor_edge_mask].sum())


def wetted_length(P: HalfPlanePolygon) -> float:
    return float(P.edge_lengths[P.floor_edge_mask].sum())


def _fit_tangent(origin: np.ndarray, pts: np.ndarray, first: np.ndarray, interior_left: bool):
    """Tangent direction at ``origin`` from a local quadratic through it."""
    t = first / np.linalg.norm(first)
    nrm = np.array([-t[1], t[0]]) if interior_left else np.array([t[1], -t[0]])
    rel = pts - origin
    s = rel @ t
    d = rel @ nrm
    if len(pts) >= 2:
        coef = np.linalg.lstsq(np.column_stack([s, s * s]), d, rcond=None)[0]
        slope = coef[0]
    else:
        slope = d[0] / s[0]
    direction = t + slope * nrm
    return direction / np.linalg.norm(direction)


def contact_angles_fitted(P: HalfPlanePolygon, band: float | None = None) -> FittedAngles:
    """Contact angles from a local fit of the free boundary near each contact point.

    All free vertices within ``band`` (default ``0.05 * diam``) of a contact
    point are fitted by a quadratic through that point in the frame of the
    first free edge; the reported angle is the one between the fitted
    tangent and the floor.  A single vertex in the band gives the line
    through it; an empty band falls back to the first-edge angle and sets
    ``fallback``.
    """
    run = P.floor_run
    if run is None:
        raise PreconditionError("polygon has no contact with the floor")
    if band is None:
        band = 0.05 * P.diam
    if band <= 0:
        raise PreconditionError("band must be positive")
    v = P.vertices
    n = P.n
    a, b = run
    _, contact = boundary_measures(P)
    fallback = False

    # right contact point: walk forward from b
    pts = []
    k = (b + 1) % n
    while not P.floor_mask[k] and np.linalg.norm(v[k] - v[b]) <= band:
        pts.append(v[k])
        k = (k + 1) % n
    first = v[(b + 1) % n] - v[b]
    if not pts:
        fallback = True
        d2 = first / np.linalg.norm(first)
    else:
        d2 = _fit_tangent(v[b], np.array(pts), first, interior_left=True)
    g2 = _angle_between(np.array([-1.0, 0.0]), d2)
    n2 = len(pts)

    pts = []
    k = (a - 1) % n
    while not P.floor_mask[k] and np.linalg.norm(v[k] - v[a]) <= band:
        pts.append(v[k])
        k = (k - 1) % n
    first = v[(a - 1) % n] - v[a]
    if not pts:
        fallback = True
        d1 = first / np.linalg.norm(first)
    else:
        d1 = _fit_tangent(v[a], np.array(pts), first, interior_left=False)
    g1 = _angle_between(np.array([1.0, 0.0]), d1)
    n1 = len(pts)
    if fallback:
        warnings.warn("contact band holds fewer than 2 vertices; using first-edge angle", stacklevel=2)
    return FittedAngles(g1, g2, contact.gamma1, contact.gamma2, n1, n2, fallback)


def discrete_curvature(P: HalfPlanePolygon) -> np.ndarray:
    """Turning angle over mean adjacent edge length; NaN at floor vertices."""
    e = P.edge_vectors
    prev = np.roll(e, 1, axis=0)
    turn = np.arctan2(_cross(prev, e), np.einsum("ij,ij->i", prev, e))
    lens = P.edge_lengths
    k = turn / (0.5 * (lens + np.roll(lens, 1)))
    k[P.floor_mask] = np.nan
    return k


def turning_angles(P: HalfPlanePolygon) -> np.ndarray:
    e = P.edge_vectors
    prev = np.roll(e, 1, axis=0)
    return np.arctan2(_cross(prev, e), np.einsum("ij,ij->i", prev, e))


# --------------------------------------------------------------------------
# hull and clipping


def _strict_hull(pts: np.ndarray, eps: float) -> list[int]:
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))

    def turn(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (pts[a, 1] - pts[o, 1]) * (
            pts[b, 0] - pts[o, 0]
        )

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], i) <= eps:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], i) <= eps:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _dedupe_cyclic(v: np.ndarray, tol: float) -> np.ndarray:
    keep = []
    for p in v:
        if not keep or np.linalg.norm(p - keep[-1]) > tol:
            keep.append(p)
    while len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= tol:
        keep.pop()
    return np.array(keep)


def clip_halfplane(poly: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Sutherland-Hodgman step keeping ``{p : normal . p <= offset}``."""
    if len(poly) == 0:
        return poly
    s = poly @ normal - offset
    nxt = np.roll(poly, -1, axis=0)
    s_nxt = np.roll(s, -1)
    inside = s <= 0.0
    crossing = (s < 0.0) & (s_nxt > 0.0) | (s > 0.0) & (s_nxt < 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = s / (s - s_nxt)
        inter = poly + t[:, None] * (nxt - poly)
    out = np.empty((2 * len(poly), 2))
    mask = np.zeros(2 * len(poly), dtype=bool)
    out[0::2] = poly
    out[1::2] = inter
    mask[0::2] = inside
    mask[1::2] = crossing
    return out[mask]


def convex_intersection(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vertices of A ∩ B for CCW convex vertex arrays (empty array if disjoint)."""
    out = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    nb = len(B)
    for i in range(nb):
        a = B[i]
        e = B[(i + 1) % nb] - a
        normal = np.array([e[1], -e[0]])  # outward for CCW
        out = clip_halfplane(out, normal, float(normal @ a))
        if len(out) < 3:
            return np.zeros((0, 2))
    return out


def convex_project(points: Iterable[Point]) -> HalfPlanePolygon:
    """Convex hull of ``points`` clipped to ``y >= 0``, CCW.

    Boundary points collinear with hull edges are kept so that a convex input
    is returned vertex-for-vertex; the output starts at the hull vertex with
    the smallest input index.  Idempotent.
    """
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise InvalidShapeError("convex_project needs at least 3 planar points")
    scale = float(np.ptp(pts, axis=0).max())
    if scale <= 0:
        raise InvalidShapeError("all points coincide")
    tol = TOL_GEOM_REL * scale
    # exact orientation: a tolerance here can pop a true extreme point when
    # x-sorting disagrees with a nearly collinear neighbour
    hull = _strict_hull(pts, 0.0)
    hull = [i for k, i in enumerate(hull) if np.linalg.norm(pts[i] - pts[hull[k - 1]]) > tol or k == 0]
    if len(hull) > 1 and np.linalg.norm(pts[hull[0]] - pts[hull[-1]]) <= tol:
        hull.pop()
    if len(hull) < 3:
        raise InvalidShapeError("points are collinear; hull is degenerate")
    hv = pts[hull]
    # reinsert boundary points lying on hull edges
    full: list[int] = []
    used = set(hull)
    for k, i in enumerate(hull):
        full.append(i)
        a = hv[k]
        b = hv[(k + 1) % len(hull)]
        e = b - a
        L2 = float(e @ e)
        rel = pts - a
        t = rel @ e / L2
        dist = np.abs(_cross(np.broadcast_to(e, rel.shape), rel)) / math.sqrt(L2)
        on = np.nonzero((dist <= tol) & (t > 0.0) & (t < 1.0))[0]
        on = [j for j in on if j not in used and np.linalg.norm(pts[j] - a) > tol and np.linalg.norm(pts[j] - b) > tol]
        on.sort(key=lambda j: t[j])
        kept: list[int] = []
        for j in on:
            if kept and np.linalg.norm(pts[j] - pts[kept[-1]]) <= tol:
                continue
            kept.append(j)
        used.update(on)
        full.extend(kept)
    start = int(np.argmin(full))
    full = full[start:] + full[:start]
    v = pts[full]
    if v[:, 1].min() < -tol:
        v = clip_halfplane(v, np.array([0.0, -1.0]), 0.0)
        if len(v) < 3:
            raise InvalidShapeError("hull lies below the floor")
        v = _dedupe_cyclic(v, tol)
    v = v.copy()
    v[np.abs(v[:, 1]) <= tol, 1] = 0.0
    if len(v) < 3 or _shoelace(v) <= tol * tol:
        raise InvalidShapeError("projected polygon is degenerate")
    return HalfPlanePolygon(v)


# --------------------------------------------------------------------------
# metrics


def point_polygon_distance(x: np.ndarray, P: HalfPlanePolygon) -> np.ndarray:
    """Distance from points (m, 2) to the convex polygon (0 inside)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = P.vertices
    e = P.edge_vectors
    rel = x[:, None, :] - v[None, :, :]
    L2 = np.einsum("ij,ij->i", e, e)
    t = np.clip(np.einsum("mij,ij->mi", rel, e) / L2, 0.0, 1.0)
    proj = v[None, :, :] + t[..., None] * e[None, :, :]
    d = np.hypot(*(x[:, None, :] - proj).transpose(2, 0, 1)).min(axis=1)
    inside = np.all(_cross(e[None, :, :], rel) >= 0.0, axis=1)
    d[inside] = 0.0
    return d


def hausdorff_distance(P: HalfPlanePolygon, Q: HalfPlanePolygon) -> float:
    return float(
        max(point_polygon_distance(P.vertices, Q).max(), point_polygon_distance(Q.vertices, P).max())
    )


def intersection_area(P: HalfPlanePolygon, Q: HalfPlanePolygon) -> float:
    # clip the larger vertex list by the edges of the smaller one
    A, B = (P.vertices, Q.vertices) if P.n >= Q.n else (Q.vertices, P.vertices)
    inter = convex_intersection(A, B)
    return max(_shoelace(inter), 0.0) if len(inter) >= 3 else 0.0


def symdiff_area(P: HalfPlanePolygon, Q: HalfPlanePolygon) -> float:
    return max(P.area + Q.area - 2.0 * intersection_area(P, Q), 0.0)


# --------------------------------------------------------------------------
# competitors


def _locate_on_boundary(P: HalfPlanePolygon, x: np.ndarray) -> tuple[int, float, float]:
    """(edge index, parameter t in [0, 1], distance) of the closest boundary point."""
    v = P.vertices
    e = P.edge_vectors
    L2 = np.einsum("ij,ij->i", e, e)
    t = np.clip(((x - v) * e).sum(axis=1) / L2, 0.0, 1.0)
    proj = v + t[:, None] * e
    d = np.hypot(*(proj - x).T)
    i = int(np.argmin(d))
    return i, float(t[i]), float(d[i])


def cut_competitor(P: HalfPlanePolygon, x: Point, eps: float) -> CutResult:
    """Body cut by the chord through the two boundary points at distance eps/3 from x."""
    x = np.asarray(x, dtype=float)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    _, _, dist = _locate_on_boundary(P, x)
    if dist > 1e-9 * P.diam:
        raise PreconditionError("x is not on the boundary")
    if x[1] <= P.tol:
        raise PreconditionError("x must lie above the floor")
    r = eps / 3.0
    v = P.vertices
    e = P.edge_vectors
    rel = v - x
    a = np.einsum("ij,ij->i", e, e)
    b = 2.0 * np.einsum("ij,ij->i", rel, e)
    c = np.einsum("ij,ij->i", rel, rel) - r * r
    disc = b * b - 4 * a * c
    hits = []
    for i in np.nonzero(disc >= 0.0)[0]:
        sq = math.sqrt(disc[i])
        for t in ((-b[i] - sq) / (2 * a[i]), (-b[i] + sq) / (2 * a[i])):
            if -1e-12 <= t <= 1 + 1e-12:
                hits.append(v[i] + t * e[i])
    pts: list[np.ndarray] = []
    for p in hits:
        if all(np.linalg.norm(p - q) > 1e-10 * P.diam for q in pts):
            pts.append(p)
    if len(pts) != 2:
        raise PreconditionError(
            f"circle of radius eps/3 meets the boundary in {len(pts)} points, need exactly 2"
        )
    x1, x2 = pts
    chord = x2 - x1
    side_x = float(_cross(chord, x - x1))
    if abs(side_x) <= 1e-12 * P.diam * np.linalg.norm(chord):
        cut = P
    else:
        # unit-free normal pointing towards x; keep {toward . p <= toward . x1}
        toward = np.array([-chord[1], chord[0]]) if side_x > 0 else np.array([chord[1], -chord[0]])
        if P.floor_run is not None:
            fl = v[P.floor_mask]
            if np.any(fl @ toward - toward @ x1 > 1e-12 * P.diam * np.linalg.norm(chord)):
                raise UnsupportedCutError("cut line crosses the contact segment")
        kept = clip_halfplane(v, toward, float(toward @ x1))
        kept = _dedupe_cyclic(kept, 1e-12 * P.diam)
        kept[np.abs(kept[:, 1]) <= P.tol, 1] = 0.0
        cut = HalfPlanePolygon(kept)
    gamma = _angle_between(x - x1, x2 - x1)
    return CutResult(
        polygon=cut,
        gamma_eps=gamma,
        removed_area=max(P.area - cut.area, 0.0),
        removed_perimeter=max(free_perimeter(P) - free_perimeter(cut), 0.0),
        chord=(tuple(map(float, x1)), tuple(map(float, x2))),
    )


def _with_boundary_vertex(P: HalfPlanePolygon, x: np.ndarray) -> np.ndarray:
    """Vertex array of P with x inserted as a (possibly collinear) vertex."""
    i, t, dist = _locate_on_boundary(P, x)
    if dist > 1e-9 * P.diam:
        raise PreconditionError("point is not on the boundary")
    e_len = P.edge_lengths[i]
    if t * e_len <= 1e-12 * P.diam or (1 - t) * e_len <= 1e-12 * P.diam:
        return P.vertices.copy()
    return np.insert(P.vertices, i + 1, P.vertices[i] + t * P.edge_vectors[i], axis=0)


def tangent_fill_competitor(P: HalfPlanePolygon, x_minus: Point, x_plus: Point) -> HalfPlanePolygon:
    """Fill between the boundary arc x_minus -> x_plus and its one-sided tangents.

    The tangent at ``x_minus`` is the supporting line of the edge leaving it
    towards the arc, the tangent at ``x_plus`` the line of the edge entering
    it.  The result is the polygon with the arc replaced by the two tangent
    segments meeting at their crossing point.
    """
    xm = np.asarray(x_minus, dtype=float)
    xp = np.asarray(x_plus, dtype=float)
    v = _with_boundary_vertex(HalfPlanePolygon(_with_boundary_vertex(P, xm)), xp)
    n = len(v)
    a = int(np.argmin(np.hypot(*(v - xm).T)))
    b = int(np.argmin(np.hypot(*(v - xp).T)))
    if a == b:
        raise PreconditionError("x_minus and x_plus coincide")
    arc = [a]
    k = a
    while k != b:
        k = (k + 1) % n
        arc.append(k)
    ys = v[arc, 1]
    on_floor = ys == 0.0
    # an arc edge lying on the floor means the arc passes through the contact set
    if np.any(on_floor[:-1] & on_floor[1:]):
        raise PreconditionError("arc from x_minus to x_plus crosses the contact segment")
    if len(arc) <= 2:
        return HalfPlanePolygon(v)
    da = v[arc[1]] - v[a]
    db = v[b] - v[arc[-2]]
    denom = float(_cross(da, db))
    scale = np.linalg.norm(da) * np.linalg.norm(db)
    inner = v[arc[1:-1]]
    rel = inner - v[a]
    flat = np.all(np.abs(_cross(np.broadcast_to(da, rel.shape), rel)) <= 1e-12 * P.diam * np.linalg.norm(da))
    if flat:
        return HalfPlanePolygon(v)
    if abs(denom) <= 1e-14 * scale:
        raise NoCrossingError("tangent lines are parallel")
    w = v[b] - v[a]
    s = float(_cross(w, db)) / denom
    t = -float(_cross(w, da)) / denom
    if s <= 0.0 or t <= 0.0:
        raise NoCrossingError("tangent lines cross outside the arc")
    c = v[a] + s * da
    if c[1] < -P.tol:
        raise UnsupportedFillError("fill leaves the half-plane")
    c[1] = max(c[1], 0.0)
    keep = [i for i in range(n) if i not in set(arc[1:-1])]
    pos = keep.index(a)
    out = np.insert(v[keep], pos + 1, c, axis=0)
    out = _dedupe_cyclic(out, 1e-12 * P.diam)
    return HalfPlanePolygon(out)


def corner_data(P: HalfPlanePolygon, index: int) -> tuple[float, float]:
    """(interior angle, flat length) at a vertex.

    The flat length is the length of the shorter adjacent edge: the scale up
    to which the body coincides with its tangent cone at that vertex.
    """
    turn = turning_angles(P)[index]
    lens = P.edge_lengths
    return float(math.pi - turn), float(min(lens[index], lens[index - 1]))


# --------------------------------------------------------------------------
# file format


def read_polygon_csv(path: str | Path) -> HalfPlanePolygon:
    rows = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'x,y', got {raw!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return HalfPlanePolygon(np.array(rows, dtype=float).reshape(-1, 2))


def format_polygon_csv(P: HalfPlanePolygon, comment: str | None = None) -> str:
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines += [f"{x:.17g},{y:.17g}" for x, y in P.vertices]
    return "\n".join(lines) + "\n"


def write_polygon_csv(P: HalfPlanePolygon, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_polygon_csv(P, comment), encoding="utf-8")
