import math

import numpy as np
import pytest
from scipy import integrate

from chargedrop import _kernels_py
from chargedrop.capillarity import build_bbeta
from chargedrop.errors import MeshError, PreconditionError, SolverError
from chargedrop.geometry2d import HalfPlanePolygon
from chargedrop.potential import (
    assemble_kernel,
    build_mesh,
    corner_exponent,
    expected_corner_exponent,
    gradient_norm_on_boundary,
    log_energy,
    potential_at,
    riesz_energy_oracle,
    solution_csv,
    solve_augmented,
    solve_equilibrium,
    square_self_energy,
)
from chargedrop.shapes import disk, equilateral_triangle, random_convex_polygon, regular_polygon, unit_square

try:
    from chargedrop import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


@pytest.fixture(scope="module")
def disk_solution():
    m = build_mesh(disk(512), 1024)
    return m, solve_equilibrium(m)


# --- mesh -----------------------------------------------------------------


def test_uniform_mesh_on_square():
    m = build_mesh(unit_square(), 64, grading=1.0)
    assert np.all(m.counts == 16)
    np.testing.assert_allclose(m.lengths, 1.0 / 16, rtol=1e-12)


def test_graded_mesh_on_square():
    m = build_mesh(unit_square(), 64, grading=0.75)
    assert m.perimeter == pytest.approx(4.0, abs=1e-12)
    for e in range(4):
        h = m.lengths[m.edge_id == e]
        assert h.argmin() in (0, len(h) - 1)
        assert h[0] == pytest.approx(h[-1])
        assert h[0] < h[len(h) // 2]


def test_proportional_allocation():
    m = build_mesh(regular_polygon(64), 256)
    assert np.all(m.counts == 4)


def test_too_few_panels():
    with pytest.raises(MeshError):
        build_mesh(regular_polygon(64), 100)


def test_coincident_panels_rejected():
    m = build_mesh(unit_square(), 8, grading=1.0)
    s = np.vstack([m.starts[:1], m.starts[:1]])
    e = np.vstack([m.ends[:1], m.ends[:1]])
    idx = np.array([0, 5])  # far apart in index, same geometry
    with np.errstate(divide="ignore"):
        K, ok = _kernels_py.kernel_block(s, e, idx, s, e, idx, 10)
    assert not ok


# --- kernel ---------------------------------------------------------------


def test_single_panel_self_term():
    s = np.array([[0.0, 0.0]])
    e = np.array([[1.0, 0.0]])
    K, ok = _kernels_py.kernel_block(s, e, np.array([0]), s, e, np.array([0]), 1)
    assert ok
    assert K[0, 0] == pytest.approx(1.5, abs=1e-14)
    exact, _ = integrate.dblquad(lambda t, u: -math.log(abs(u - t)) if u != t else 0.0, 0, 1, 0, 1)
    assert K[0, 0] == pytest.approx(exact, abs=1e-6)


def test_unit_separated_short_panels():
    h = 1e-3
    s = np.array([[0.0, 0.0], [1.0, 0.0]])
    e = np.array([[h, 0.0], [1.0 + h, 0.0]])
    idx = np.array([0, 5])
    K, ok = _kernels_py.kernel_block(s, e, idx, s, e, idx, 10)
    assert ok
    assert K[0, 1] == pytest.approx(0.0, abs=1e-5)


@pytest.mark.skipif(_kernels_c is None, reason="compiled backend not built")
@pytest.mark.parametrize("shape", ["square", "triangle", "random"])
def test_backends_agree(shape):
    P = {
        "square": unit_square(),
        "triangle": equilateral_triangle(),
        "random": random_convex_polygon(np.random.default_rng(3), 14),
    }[shape]
    m = build_mesh(P, 256)
    idx = np.arange(m.n)
    args = (m.starts, m.ends, idx, m.starts, m.ends, idx, m.n)
    Kp, okp = _kernels_py.kernel_block(*args)
    Kc, okc = _kernels_c.kernel_block(*args)
    assert okp and okc
    np.testing.assert_allclose(Kc, Kp, atol=1e-12)
    pts = np.array([[0.3, 0.2], [0.5, 1.7], [-2.0, 0.1]])
    np.testing.assert_allclose(
        _kernels_c.segment_log_average(pts, m.starts, m.ends),
        _kernels_py.segment_log_average(pts, m.starts, m.ends),
        atol=1e-12,
    )


def test_kernel_is_symmetric():
    K = assemble_kernel(build_mesh(random_convex_polygon(np.random.default_rng(4)), 128))
    np.testing.assert_array_equal(K, K.T)


# --- equilibrium ----------------------------------------------------------


def test_disk_robin_and_uniform_density(disk_solution):
    m, sol = disk_solution
    assert abs(sol.robin) <= 1e-3
    assert sol.total_mass == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(sol.densities, 1.0 / (2 * math.pi), rtol=0.01)
    assert not sol.clamped


def test_radius_two_disk():
    assert log_energy(disk(512, radius=2.0), 1024) == pytest.approx(-math.log(2.0), abs=1e-3)


def test_translation_invariance():
    P = random_convex_polygon(np.random.default_rng(5))
    a = log_energy(P, 512)
    b = log_energy(P.translated((5.0, 0.0)), 512)
    assert b == pytest.approx(a, abs=1e-10)


def test_singular_system():
    K = np.ones((3, 3))
    with pytest.raises(SolverError) as info:
        solve_augmented(K)
    assert info.value.condition is not None


def test_potential_at_center(disk_solution):
    m, sol = disk_solution
    assert potential_at(sol, m, np.array([0.0, 1.0])) == pytest.approx(0.0, abs=1e-3)


def test_potential_far_field(disk_solution):
    m, sol = disk_solution
    x = np.array([1e6, 0.0])
    assert potential_at(sol, m, x) == pytest.approx(-math.log(1e6), rel=1e-5)


def test_potential_constant_inside_square():
    m = build_mesh(unit_square(), 512)
    sol = solve_equilibrium(m)
    pts = np.array([[0.5, 0.5], [0.1, 0.9], [0.95, 0.02], [0.3, 0.7]])
    u = potential_at(sol, m, pts)
    np.testing.assert_allclose(u, sol.robin, atol=max(sol.potential_residual, 1e-3))


def test_potential_at_node_rejected(disk_solution):
    m, sol = disk_solution
    with pytest.raises(PreconditionError):
        potential_at(sol, m, m.mids[3])


def test_gradient_norm_on_disks(disk_solution):
    m, sol = disk_solution
    np.testing.assert_allclose(gradient_norm_on_boundary(sol), 1.0, rtol=0.01)
    m2 = build_mesh(disk(512, radius=3.0), 1024)
    np.testing.assert_allclose(gradient_norm_on_boundary(solve_equilibrium(m2, residual=False)), 1.0 / 3.0, rtol=0.01)


def test_square_density_grows_toward_corners():
    m = build_mesh(unit_square(), 512)
    sol = solve_equilibrium(m, residual=False)
    f = sol.densities[m.edge_id == 0]
    half = f[len(f) // 2 :]
    assert np.all(np.diff(half) > 0.0)


def test_solution_csv_header():
    m = build_mesh(unit_square(), 64)
    text = solution_csv(solve_equilibrium(m, residual=False), m)
    assert text.splitlines()[0] == "x,y,length,density,grad_norm"
    assert len(text.splitlines()) == m.n + 1


# --- corner exponents -----------------------------------------------------


def test_expected_exponent_values():
    assert expected_corner_exponent(math.pi / 2) == pytest.approx(-1.0 / 3.0)
    assert expected_corner_exponent(math.pi / 3) == pytest.approx(-0.4)
    assert abs(expected_corner_exponent(math.pi - 1e-6)) < 1e-6


def test_obtuse_corner_exponent():
    # interior angle 150 degrees at the apex of a flat triangle
    h = 0.5 * math.tan(math.radians(15.0))
    P = HalfPlanePolygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, h]]))
    m = build_mesh(P, 1024)
    sol = solve_equilibrium(m, residual=False)
    slope = corner_exponent(sol, m, 2)
    assert slope == pytest.approx(expected_corner_exponent(math.radians(150.0)), abs=0.1)


def test_flat_corner_rejected():
    P = regular_polygon(128)
    m = build_mesh(P, 512)
    with pytest.raises(PreconditionError):
        corner_exponent(solve_equilibrium(m, residual=False), m, 3)


# --- grid oracle ----------------------------------------------------------


def test_square_self_energy_closed_form():
    # mean of -log|x - y| over the unit square
    exact = 25.0 / 12.0 - math.pi / 3.0 - math.log(2.0) / 3.0
    assert square_self_energy(2.0) == pytest.approx(exact, abs=1e-8)


def test_square_self_energy_riesz_cartesian():
    # difference-vector density 4(1-u)(1-v) on [0,1]^2, integrated in Cartesian form
    val, _ = integrate.dblquad(
        lambda v, u: 4 * (1 - u) * (1 - v) * (u * u + v * v) ** -0.5, 0, 1, 0, 1, epsabs=1e-10
    )
    assert square_self_energy(1.0) == pytest.approx(val, rel=1e-6)


def test_oracle_riesz_scaling():
    r1 = riesz_energy_oracle(disk(128), alpha=1.0, grid_n=256)
    r2 = riesz_energy_oracle(disk(128, radius=2.0), alpha=1.0, grid_n=256)
    assert r1 / r2 == pytest.approx(2.0, rel=1e-6)


def test_oracle_disk_coarse():
    assert abs(riesz_energy_oracle(disk(128), 2.0, 256)) <= 5e-2


def test_oracle_rejects_bad_arguments():
    with pytest.raises(PreconditionError):
        riesz_energy_oracle(unit_square(), 2.0, 8)
    with pytest.raises(PreconditionError):
        riesz_energy_oracle(unit_square(), 2.5, 64)


def test_oracle_full_result():
    res = riesz_energy_oracle(build_bbeta(0.0, 1.0, 64), 2.0, 64, full=True)
    assert res.weights.sum() == pytest.approx(1.0)
    assert res.gap >= 0.0


# --- properties -----------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_potential_residual_bound(seed):
    rng = np.random.default_rng(100 + seed)
    P = random_convex_polygon(rng, 12)
    P = P.scaled(rng.uniform(0.5, 4.0) / P.diam)
    sol = solve_equilibrium(build_mesh(P, 1024))
    assert sol.potential_residual <= 5e-3 * (1.0 + abs(sol.robin))
    assert np.all(sol.masses >= 0.0)
    assert sol.total_mass == pytest.approx(1.0, abs=1e-12)


def test_refinement_differences_shrink():
    P = disk(256)
    r = [log_energy(P, n) for n in (512, 1024, 2048)]
    assert abs(r[2] - r[1]) < abs(r[1] - r[0])


def test_oracle_monotone_on_nested_squares():
    outer = riesz_energy_oracle(unit_square(), 2.0, 256)
    inner = riesz_energy_oracle(unit_square().scaled(0.6, (0.5, 0.5)), 2.0, 256)
    assert inner >= outer
