import dataclasses
import math

import numpy as np
import pytest

from chargedrop import optimizer as opt
from chargedrop.capillarity import SessileConfig, build_bbeta, symdiff_to_bbeta, total_energy
from chargedrop.errors import ConfigError, PreconditionError, StagnationError
from chargedrop.geometry2d import HalfPlanePolygon, discrete_curvature, hausdorff_distance
from chargedrop.optimizer import (
    SolverConfig,
    analytic_gradient,
    competitor_margin,
    el_residual,
    fd_gradient_per_length,
    lambda_min_check,
    mesh_tolerance,
    minimize,
    project_convex,
    q_convergence,
    remesh,
    rows_to_csv,
    structure_checks,
    summary,
    young_sweep,
)
from chargedrop.shapes import disk, unit_square

from conftest import solver_config


def test_config_validation():
    with pytest.raises(ConfigError):
        SolverConfig(n_shape_vertices=8)
    with pytest.raises(ConfigError):
        SolverConfig(step_size=0.0)
    with pytest.raises(ConfigError):
        SolverConfig(sessile=SessileConfig(n_panels=64), n_shape_vertices=96)


# --- geometry helpers -----------------------------------------------------


def test_remesh_keeps_contact_points():
    P = build_bbeta(0.3, 1.0, 300)
    Q = remesh(P, 64, 0.05 * P.diam)
    assert Q.n == 64
    run = Q.floor_run
    assert (run[1] - run[0]) % Q.n == 1  # floor is a single edge
    np.testing.assert_allclose(sorted(Q.vertices[Q.floor_mask, 0]), sorted(P.vertices[[0, -1], 0]), atol=1e-12)
    assert Q.area == pytest.approx(P.area, rel=1e-3)


def test_remesh_refines_near_contact():
    P = build_bbeta(0.0, 1.0, 400)
    Q = remesh(P, 80, 0.1 * P.diam)
    L = Q.edge_lengths[~Q.floor_edge_mask]
    assert L[0] < 0.5 * np.median(L)
    assert L[-1] < 0.5 * np.median(L)


def test_project_convex_keeps_vertex_count():
    P = build_bbeta(0.0, 1.0, 64)
    rng = np.random.default_rng(0)
    V = P.vertices + rng.normal(scale=1e-3, size=P.vertices.shape)
    V[:, 1] = np.maximum(V[:, 1], -1e-3)
    Q = project_convex(V)
    assert Q.n >= P.n - 4
    assert Q.area == pytest.approx(P.area, rel=1e-2)


# --- gradients ------------------------------------------------------------


def test_gradient_on_disk_is_curvature():
    cfg = SolverConfig(sessile=SessileConfig(q=0.0, lam=0.0))
    P = disk(64, center=(0.0, 2.0))
    g = analytic_gradient(P, cfg)
    np.testing.assert_allclose(g, discrete_curvature(P), rtol=1e-12)
    f = fd_gradient_per_length(P, cfg)
    np.testing.assert_allclose(f, g, rtol=0.05)


def test_penalty_sign_in_gradient():
    cfg = SolverConfig(sessile=SessileConfig(q=0.0, lam=5.0))
    P = disk(256, radius=1.0 / math.sqrt(math.pi), center=(0.0, 2.0))
    for s, sign in ((1.01, 1.0), (0.99, -1.0)):
        Q = P.scaled(s, (0.0, 2.0))
        assert np.sign(Q.area - 1.0) == sign
        np.testing.assert_allclose(analytic_gradient(Q, cfg) - discrete_curvature(Q), 5.0 * sign)


def test_charged_gradient_matches_fd():
    cfg = solver_config(0.0, 0.3)
    P = build_bbeta(0.0, 1.0, 64)
    a = analytic_gradient(P, cfg)
    f = fd_gradient_per_length(P, cfg)
    free = ~P.floor_mask
    v = P.vertices
    far = np.min([np.hypot(*(v - v[i]).T) for i in np.nonzero(P.floor_mask)[0][[0, -1]]], axis=0) > 0.05 * P.diam
    sel = free & far
    rel = np.abs(a[sel] - f[sel]) / np.abs(f[sel])
    assert np.median(rel) <= 0.05


# --- minimizer ------------------------------------------------------------


def test_q0_minimizer_is_half_disk(minimized):
    P, trace, cfg = minimized(0.0, 0.0)
    e = total_energy(P, cfg.sessile)
    assert e.p_beta == pytest.approx(math.sqrt(2.0 * math.pi), rel=5e-3)
    assert trace.converged
    assert trace.monotone()


def test_bbeta_is_fixed_point():
    cfg = solver_config(0.5, 0.0)
    B = build_bbeta(0.5, 1.0, cfg.n_shape_vertices)
    P, trace = minimize(B, cfg)
    e0 = total_energy(B, cfg.sessile).total
    assert e0 - total_energy(P, cfg.sessile).total <= 1e-4


def test_small_charge_contact_angle(minimized):
    P, trace, cfg = minimized(0.0, 0.1)
    assert abs(P.area - 1.0) <= 1e-3
    g = 0.5 * (trace.records[-1].gamma1 + trace.records[-1].gamma2)
    assert abs(g - math.pi / 2) <= math.radians(3.0)


def test_max_iters_one():
    cfg = dataclasses.replace(solver_config(0.0, 0.0), max_iters=1)
    P, trace = minimize(unit_square(), cfg)
    assert len(trace) == 1
    assert trace.reason == "max_iters reached"
    assert len(trace.to_csv().splitlines()) == 2


def test_minimize_deterministic():
    cfg = dataclasses.replace(solver_config(0.2, 0.05), max_iters=5)
    P1, t1 = minimize(unit_square(), cfg)
    P2, t2 = minimize(unit_square(), cfg)
    np.testing.assert_array_equal(P1.vertices, P2.vertices)
    assert t1.to_csv() == t2.to_csv()


def test_stagnation_carries_trace(monkeypatch):
    real = opt._evaluate
    calls = {"n": 0}

    def worse(P, cfg):
        st = real(P, cfg)
        calls["n"] += 1
        if calls["n"] <= 1:
            return st
        e = dataclasses.replace(st.energy, total=st.energy.total + 1.0)
        return dataclasses.replace(st, energy=e)

    monkeypatch.setattr(opt, "_evaluate", worse)
    cfg = dataclasses.replace(solver_config(0.0, 0.0), max_backtracks=3)
    with pytest.raises(StagnationError) as info:
        minimize(unit_square(), cfg)
    assert info.value.trace is not None
    assert info.value.shape is not None


def test_summary_fields(minimized):
    P, trace, cfg = minimized(0.0, 0.0)
    s = summary(P, trace, cfg)
    assert s["hausdorff_to_bbeta"] <= 0.02
    assert s["energy"]["i2"] is None
    assert s["cos_gamma"] == pytest.approx(0.0, abs=0.05)


# --- experiments ----------------------------------------------------------


def test_sweep_rows_and_csv():
    cfg = dataclasses.replace(solver_config(), max_iters=2, n_shape_vertices=32)
    cfg = dataclasses.replace(cfg, sessile=dataclasses.replace(cfg.sessile, n_panels=256))
    rows = young_sweep([-0.5, 0.0, 0.5], [0.05, 0.1], cfg)
    assert len(rows) == 6
    text = rows_to_csv(rows)
    assert len(text.splitlines()) == 7
    assert text == rows_to_csv(young_sweep([-0.5, 0.0, 0.5], [0.05, 0.1], cfg))


def test_sweep_rejects_large_charge():
    with pytest.raises(PreconditionError):
        young_sweep([0.0], [1.0], SolverConfig())


def test_q_convergence_requires_decreasing():
    with pytest.raises(PreconditionError):
        q_convergence(0.0, [0.1, 0.2], SolverConfig())


def test_el_residual_half_disk():
    cfg = solver_config(0.0, 0.0)
    rep = el_residual(build_bbeta(0.0, 1.0, 128), cfg)
    assert rep.lambda_estimate == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-3)
    assert rep.residual_std_over_mean_curvature <= 0.1


def test_el_residual_warns_when_not_converged():
    with pytest.warns(RuntimeWarning):
        el_residual(build_bbeta(0.0, 1.0, 64), solver_config(), converged=False)


def test_competitor_margin_self_is_zero():
    P = build_bbeta(0.0, 1.0, 64)
    assert competitor_margin(P, P, SessileConfig()) == 0.0


def test_lambda_min_quotas():
    P = build_bbeta(0.0, 1.0, 64)
    rep = lambda_min_check(P, solver_config(), n_samples=20, seed=1)
    assert rep.n_evaluated == 20
    assert set(rep.by_family) == {"cut", "fill", "dilation", "slide"}
    with pytest.raises(PreconditionError):
        lambda_min_check(P, solver_config(), n_samples=5)


def test_structure_half_disk():
    P = build_bbeta(0.0, 1.0, 128)
    rep = structure_checks(P, solver_config())
    assert rep.longest_collinear_run_edges == 1
    assert rep.wetted_length == pytest.approx(2.0 * math.sqrt(2.0 / math.pi), rel=1e-3)
    k = discrete_curvature(P)[~P.floor_mask]
    np.testing.assert_allclose(k, math.sqrt(math.pi / 2.0), rtol=1e-3)


def test_structure_detects_collinear_run():
    v = np.array([[0, 0], [1, 0], [1, 0.25], [1, 0.5], [1, 0.75], [1, 1], [0, 1]], dtype=float)
    rep = structure_checks(HalfPlanePolygon(v), solver_config())
    assert rep.longest_collinear_run_edges == 4


# --- properties -----------------------------------------------------------


@pytest.mark.parametrize("beta", [-0.5, 0.0, 0.5])
def test_bbeta_fixed_point_vertex_motion(beta):
    cfg = solver_config(beta, 0.0)
    B = build_bbeta(beta, 1.0, cfg.n_shape_vertices)
    P, trace = minimize(B, cfg)
    assert hausdorff_distance(P, B) <= 2.0 * mesh_tolerance(B)


def test_q0_symdiff_within_mesh_tolerance(minimized):
    P, trace, cfg = minimized(0.0, 0.0, "bbeta")
    assert symdiff_to_bbeta(P, 0.0) <= 2.0 * mesh_tolerance(P)


@pytest.mark.parametrize("beta", [-0.5, 0.5])
def test_young_upper_bracket(minimized, beta):
    P, trace, cfg = minimized(beta, 0.05, "bbeta")
    g = 0.5 * (trace.records[-1].gamma1 + trace.records[-1].gamma2)
    assert math.cos(g) <= beta + 0.05
    assert trace.monotone()
