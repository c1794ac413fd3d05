import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from shapely.geometry import Point as SPoint
from shapely.geometry import Polygon as SPolygon
from shapely.geometry import box

from chargedrop.capillarity import build_bbeta
from chargedrop.errors import InvalidShapeError, PreconditionError, UnsupportedCutError
from chargedrop.geometry2d import (
    HalfPlanePolygon,
    boundary_measures,
    contact_angles_fitted,
    convex_project,
    cut_competitor,
    discrete_curvature,
    format_polygon_csv,
    hausdorff_distance,
    intersection_area,
    read_polygon_csv,
    symdiff_area,
    tangent_fill_competitor,
)
from chargedrop.shapes import disk, random_convex_polygon, regular_polygon, slab, unit_square


def shp(P: HalfPlanePolygon) -> SPolygon:
    return SPolygon(P.vertices)


point_sets = st.lists(
    st.tuples(st.floats(-3.0, 3.0), st.floats(0.0, 3.0)), min_size=3, max_size=24
)


def hull_or_skip(pts):
    try:
        P = convex_project(pts)
    except InvalidShapeError:
        return None
    return P if P.area > 1e-3 else None


# --- measures -------------------------------------------------------------


def test_unit_square_area():
    assert unit_square().area == 1.0


def test_area_scales_quadratically():
    assert unit_square().scaled(2.0).area == pytest.approx(4.0, abs=1e-14)


def test_regular_1024gon_area():
    n = 1024
    P = regular_polygon(n, center=(0.0, 2.0))
    assert P.area == pytest.approx(0.5 * n * math.sin(2 * math.pi / n), abs=1e-12)
    assert abs(P.area - math.pi) <= 1e-4


def test_square_boundary_measures():
    free, c = boundary_measures(unit_square())
    assert free == 3.0
    assert c.wetted_length == 1.0
    assert c.gamma1 == pytest.approx(math.pi / 2)
    assert c.gamma2 == pytest.approx(math.pi / 2)


def test_lifted_square_has_no_contact():
    free, c = boundary_measures(unit_square(y0=1.0))
    assert free == 4.0
    assert c.wetted_length == 0.0
    assert c.p1 is None


def test_bbeta_half_raw_angles_near_sixty_degrees():
    _, c = boundary_measures(build_bbeta(0.5, 1.0, 512))
    assert c.gamma1 == pytest.approx(math.pi / 3, abs=5e-3)
    assert c.gamma2 == pytest.approx(math.pi / 3, abs=5e-3)


def test_diameters():
    assert unit_square().diam == pytest.approx(math.sqrt(2.0))
    assert slab(10.0).diam == pytest.approx(math.hypot(20.0, 0.05), rel=1e-14)
    assert regular_polygon(64).diam == pytest.approx(2.0)


# --- contact angles -------------------------------------------------------


@pytest.mark.parametrize("beta", [0.0, -0.5, 0.5])
def test_fitted_contact_angles_of_bbeta(beta):
    P = build_bbeta(beta, 1.0, 256)
    fa = contact_angles_fitted(P, 0.05 * P.diam)
    assert not fa.fallback
    assert fa.gamma1 == pytest.approx(math.acos(beta), abs=0.02)
    assert fa.gamma2 == pytest.approx(math.acos(beta), abs=0.02)


@pytest.mark.filterwarnings("ignore:contact band")
def test_fitted_contact_angles_square_exact():
    for band in (0.2, 0.5, 1.0):
        fa = contact_angles_fitted(unit_square(), band)
        assert fa.gamma1 == pytest.approx(math.pi / 2, abs=1e-12)
        assert fa.gamma2 == pytest.approx(math.pi / 2, abs=1e-12)


def test_fitted_angle_fallback_warns():
    with pytest.warns(UserWarning):
        fa = contact_angles_fitted(unit_square(), 0.01)
    assert fa.fallback
    assert fa.gamma1 == pytest.approx(math.pi / 2)


def test_fitted_angle_requires_contact():
    with pytest.raises(PreconditionError):
        contact_angles_fitted(unit_square(y0=0.5))


# --- hull and clipping ----------------------------------------------------


def test_hull_drops_interior_point():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    P = convex_project(pts)
    assert P.n == 4
    assert P.area == pytest.approx(1.0)


def test_hull_clips_below_floor():
    pts = [(0.0, 0.0), (1.0, -0.1), (1.0, 1.0), (0.0, 1.0)]
    P = convex_project(pts)
    oracle = SPolygon(pts).convex_hull.intersection(box(-5, 0, 5, 5)).area
    assert P.area == pytest.approx(oracle, abs=1e-12)
    assert P.vertices[:, 1].min() == 0.0
    assert P.floor_run is not None


def test_convex_project_keeps_convex_input():
    P = disk(64)
    Q = convex_project(P.vertices)
    np.testing.assert_array_equal(Q.vertices, P.vertices)


def test_collinear_points_rejected():
    with pytest.raises(InvalidShapeError):
        convex_project([(0, 0), (1, 1), (2, 2)])


@settings(max_examples=60, deadline=None)
@given(point_sets)
def test_convex_project_idempotent(pts):
    P = hull_or_skip(pts)
    if P is None:
        return
    Q = convex_project(P.vertices)
    np.testing.assert_allclose(Q.vertices, P.vertices, atol=1e-12)


def test_convex_project_keeps_extreme_point_near_collinear_neighbour():
    P = convex_project([(0.0, 0.0), (0.0, 2.0), (4.6e-22, 1.0), (-1.0, 0.0)])
    assert P.area == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(point_sets)
def test_convex_project_matches_shapely_hull(pts):
    P = hull_or_skip(pts)
    if P is None:
        return
    ref = SPolygon(np.array(pts)).convex_hull if len(set(pts)) >= 3 else None
    assert ref is not None
    assert P.area == pytest.approx(ref.intersection(box(-10, 0, 10, 10)).area, rel=1e-9, abs=1e-12)


# --- metrics --------------------------------------------------------------


def test_hausdorff_examples():
    S = unit_square()
    assert hausdorff_distance(S, S.translated((0.1, 0.0))) == pytest.approx(0.1)
    assert hausdorff_distance(S, S) == 0.0
    assert hausdorff_distance(S, S.scaled(2.0)) == pytest.approx(math.sqrt(2.0))


def test_symdiff_examples():
    S = unit_square()
    assert symdiff_area(S, S.translated((0.1, 0.0))) == pytest.approx(0.2)
    assert symdiff_area(S, S.translated((3.0, 0.0))) == pytest.approx(2.0)
    inner = S.scaled(0.5, origin=(0.5, 0.5))
    assert symdiff_area(S, inner) == pytest.approx(0.75)


@settings(max_examples=40, deadline=None)
@given(point_sets, point_sets)
def test_symdiff_and_hausdorff_match_shapely(a, b):
    P, Q = hull_or_skip(a), hull_or_skip(b)
    if P is None or Q is None:
        return
    sp, sq = shp(P), shp(Q)
    assert intersection_area(P, Q) == pytest.approx(sp.intersection(sq).area, abs=1e-9)
    assert symdiff_area(P, Q) == pytest.approx(sp.symmetric_difference(sq).area, abs=1e-9)
    # for convex bodies the Hausdorff distance is attained at a vertex
    oracle = max(
        max(SPoint(p).distance(sq) for p in P.vertices),
        max(SPoint(p).distance(sp) for p in Q.vertices),
    )
    assert hausdorff_distance(P, Q) == pytest.approx(oracle, abs=1e-9)
    assert hausdorff_distance(P, Q) == pytest.approx(hausdorff_distance(Q, P), abs=1e-12)


# --- curvature ------------------------------------------------------------


@pytest.mark.parametrize("n,r", [(32, 1.0), (128, 2.0)])
def test_regular_polygon_curvature(n, r):
    P = regular_polygon(n, r, center=(0.0, 5.0))
    k = discrete_curvature(P)
    exact = (2 * math.pi / n) / (2 * r * math.sin(math.pi / n))
    np.testing.assert_allclose(k, exact, rtol=1e-12)
    assert abs(exact - 1.0 / r) <= 2.0 * (math.pi / n) ** 2 / r


def test_straight_run_has_zero_curvature():
    P = HalfPlanePolygon(np.array([[0, 0], [1, 0], [1, 0.5], [1, 1], [0, 1]], dtype=float))
    assert discrete_curvature(P)[2] == pytest.approx(0.0)


def test_half_disk_curvature():
    P = build_bbeta(0.0, 1.0, 256)
    k = discrete_curvature(P)
    arc = k[~P.floor_mask]
    np.testing.assert_allclose(arc, math.sqrt(math.pi / 2.0), rtol=1e-3)


# --- cut competitor -------------------------------------------------------


def top_vertex(P):
    return P.vertices[int(np.argmax(P.vertices[:, 1]))]


def test_cut_angle_on_circle():
    P = disk(512)
    res = cut_competitor(P, top_vertex(P), 0.3)
    assert res.gamma_eps == pytest.approx(0.05, rel=0.1)
    assert res.polygon.area < P.area


def test_cut_removed_area_scales_cubically():
    P = disk(512)
    x = top_vertex(P)
    a1 = cut_competitor(P, x, 0.3).removed_area
    a2 = cut_competitor(P, x, 0.15).removed_area
    assert a1 / a2 == pytest.approx(8.0, rel=0.15)


@pytest.mark.parametrize("eps", [0.1, 0.03, 0.003])
def test_cut_angle_at_square_corner(eps):
    res = cut_competitor(unit_square(), (1.0, 1.0), eps)
    assert res.gamma_eps == pytest.approx(math.pi / 4, abs=1e-9)
    assert res.removed_area == pytest.approx(0.5 * (eps / 3) ** 2, rel=1e-9)


def test_cut_crossing_floor_rejected():
    with pytest.raises(UnsupportedCutError):
        cut_competitor(unit_square(), (1.0, 0.05), 0.6)


def test_cut_needs_two_crossings():
    with pytest.raises(PreconditionError):
        cut_competitor(unit_square(), (0.5, 1.0), 30.0)


# --- tangent fill ---------------------------------------------------------


def test_tangent_fill_symmetric_on_polygon():
    P = regular_polygon(24, 1.0, center=(0.0, 1.5), phase=0.0)
    top = int(np.argmax(P.vertices[:, 1]))
    i, j = top - 2, top + 2
    xm, xp = P.vertices[i], P.vertices[j]
    F = tangent_fill_competitor(P, xm, xp)
    # independent construction: crossing of the edge lines leaving xm and entering xp
    da = P.vertices[i + 1] - xm
    db = xp - P.vertices[j - 1]
    s = np.linalg.solve(np.column_stack([da, -db]), xp - xm)[0]
    c = xm + s * da
    added = shp(P).union(SPolygon([xm, c, xp])).area - P.area
    assert added > 0.0
    assert F.area - P.area == pytest.approx(added, abs=1e-12)


def test_tangent_fill_adjacent_is_identity():
    P = regular_polygon(24, 1.0, center=(0.0, 1.5))
    F = tangent_fill_competitor(P, P.vertices[5], P.vertices[6])
    assert F.area == pytest.approx(P.area, abs=1e-14)


def test_tangent_fill_flat_arc_is_identity():
    P = HalfPlanePolygon(np.array([[0, 0], [2, 0], [2, 1], [1.5, 1], [1, 1], [0.5, 1], [0, 1]], dtype=float))
    F = tangent_fill_competitor(P, (2.0, 1.0), (0.5, 1.0))
    assert F.area == pytest.approx(P.area, abs=1e-14)


# --- validation and io ----------------------------------------------------


@pytest.mark.parametrize(
    "pts",
    [
        [(0, 0), (1, 0), (1, -0.5), (0, 1)],  # below the floor
        [(0, 0), (0, 1), (1, 1), (1, 0)],  # clockwise
        [(0, 0), (2, 0), (1, 0.2), (2, 1), (0, 1)],  # reflex vertex
        [(0, 0), (1, 0), (2, 0)],  # zero area
    ],
)
def test_invalid_shapes_rejected(pts):
    with pytest.raises(InvalidShapeError):
        HalfPlanePolygon(np.array(pts, dtype=float))


def test_csv_round_trip(tmp_path):
    P = disk(64)
    path = tmp_path / "p.csv"
    path.write_text(format_polygon_csv(P, "fixture"))
    np.testing.assert_array_equal(read_polygon_csv(path).vertices, P.vertices)


def test_malformed_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0\n1,zero\n")
    with pytest.raises(ValueError):
        read_polygon_csv(path)


# --- properties -----------------------------------------------------------

floor_sets = st.lists(
    st.tuples(st.floats(-3.0, 3.0), st.floats(-1.0, 3.0)), min_size=3, max_size=24
)


@settings(max_examples=80, deadline=None)
@given(floor_sets, st.floats(-0.99, 0.99))
def test_perimeter_inequalities(pts, beta):
    P = hull_or_skip(pts)
    if P is None:
        return
    free, c = boundary_measures(P)
    if c.wetted_length > 0.0:
        assert free > c.wetted_length
    total = free + c.wetted_length
    assert total <= 2.0 / (1.0 - beta) * (free - beta * c.wetted_length) + 1e-12
    assert P.diam <= 0.5 * total + 1e-12


@settings(max_examples=30, deadline=None)
@given(point_sets, point_sets, point_sets)
def test_symdiff_is_a_metric(a, b, c):
    P, Q, R = hull_or_skip(a), hull_or_skip(b), hull_or_skip(c)
    if P is None or Q is None or R is None:
        return
    assert symdiff_area(P, Q) == pytest.approx(symdiff_area(Q, P), abs=1e-12)
    assert symdiff_area(P, R) <= symdiff_area(P, Q) + symdiff_area(Q, R) + 1e-9


@settings(max_examples=40, deadline=None)
@given(point_sets, st.floats(-5.0, 5.0))
def test_hausdorff_of_horizontal_translate(pts, t):
    P = hull_or_skip(pts)
    if P is None:
        return
    assert hausdorff_distance(P, P.translated((t, 0.0))) == pytest.approx(abs(t), abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_cut_and_fill_inclusions(seed):
    rng = np.random.default_rng(seed)
    P = random_convex_polygon(rng, 40)
    sp = shp(P)
    top = int(np.argmax(P.vertices[:, 1]))
    res = cut_competitor(P, P.vertices[top], 0.2 * P.diam)
    assert sp.buffer(1e-9).contains(shp(res.polygon))
    i, j = (top - 1) % P.n, (top + 1) % P.n
    F = tangent_fill_competitor(P, P.vertices[i], P.vertices[j])
    assert shp(F).buffer(1e-9).contains(sp)
