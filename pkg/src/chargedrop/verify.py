"""Built-in verification checks run by ``chargedrop verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .capillarity import SessileConfig, bbeta_energy, build_bbeta, hausdorff_to_bbeta, pbeta
from .geometry2d import boundary_measures, convex_project
from .optimizer import SolverConfig, minimize
from .potential import (
    assemble_kernel,
    build_mesh,
    corner_exponent,
    log_energy,
    riesz_energy_oracle,
    solve_equilibrium,
)
from .shapes import disk, equilateral_triangle, random_convex_polygon, unit_square

SQUARE_ROBIN = -math.log(math.gamma(0.25) ** 2 / (4.0 * math.pi ** 1.5))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expected: str
    actual: str


def _close(name: str, actual: float, expected: float, tol: float) -> CheckResult:
    ok = bool(np.isfinite(actual) and abs(actual - expected) <= tol)
    return CheckResult(name, ok, f"{expected:.6g} +/- {tol:.1g}", f"{actual:.6g}")


def _disk(n_panels: int) -> list[CheckResult]:
    nv = n_panels // 2
    r1 = log_energy(disk(nv), n_panels)
    r2 = log_energy(disk(nv, radius=2.0), n_panels)
    return [
        _close("unit disk Robin constant", r1, 0.0, 1e-3),
        _close("radius-2 disk Robin constant", r2, -math.log(2.0), 1e-3),
    ]


def _kernel(n_panels: int) -> list[CheckResult]:
    P = unit_square()
    m = build_mesh(P, 4 * 2, grading=1.0)
    K = assemble_kernel(m)
    # every panel has length 1/2 here, so the diagonal is 3/2 + log 2
    return [_close("kernel self term", float(K[0, 0]), 1.5 + math.log(2.0), 1e-12)]


def _scaling(n_panels: int) -> list[CheckResult]:
    P = random_convex_polygon(np.random.default_rng(0), 10)
    m = build_mesh(P, n_panels)
    base = solve_equilibrium(m, residual=False).robin
    out = []
    for lam in (0.5, 3.0):
        r = solve_equilibrium(m.scaled(lam), residual=False).robin
        out.append(_close(f"scaling law, lambda={lam}", r - base, -math.log(lam), 1e-8))
    shifted = solve_equilibrium(m.moved(m.vertices + np.array([5.0, 0.0])), residual=False).robin
    out.append(_close("translation invariance", shifted - base, 0.0, 1e-10))
    return out


def _geometry(n_panels: int) -> list[CheckResult]:
    S = unit_square()
    free, c = boundary_measures(S)
    P = convex_project(random_convex_polygon(np.random.default_rng(1), 12).vertices)
    idem = float(np.abs(convex_project(P.vertices).vertices - P.vertices).max())
    return [
        _close("unit square free perimeter", free, 3.0, 1e-12),
        _close("unit square wetted length", c.wetted_length, 1.0, 1e-12),
        _close("convex_project idempotence", idem, 0.0, 0.0),
        _close("P_beta of B^0.5(1)", pbeta(build_bbeta(0.5, 1.0, 512), 0.5), bbeta_energy(0.5), 1e-3),
    ]


def _square(n_panels: int) -> list[CheckResult]:
    m = build_mesh(unit_square(), n_panels)
    sol = solve_equilibrium(m)
    return [
        _close("unit square Robin constant", sol.robin, SQUARE_ROBIN, 2e-3),
        _close("square corner exponent", corner_exponent(sol, m, 2), -1.0 / 3.0, 0.1),
    ]


def _triangle(n_panels: int) -> list[CheckResult]:
    T = equilateral_triangle()
    m = build_mesh(T, n_panels)
    sol = solve_equilibrium(m, residual=False)
    return [_close("triangle corner exponent", corner_exponent(sol, m, 2), -0.4, 0.1)]


def _oracle(n_panels: int) -> list[CheckResult]:
    S = unit_square()
    return [_close("grid oracle vs panel solver, square", riesz_energy_oracle(S, 2.0, 1024), log_energy(S, n_panels), 5e-2)]


def _recovery(n_panels: int) -> list[CheckResult]:
    cfg = SolverConfig(sessile=SessileConfig(beta=0.0, q=0.0, n_panels=n_panels))
    P, _ = minimize(unit_square(), cfg)
    return [_close("q=0 minimizer vs half-disk (Hausdorff)", hausdorff_to_bbeta(P, 0.0), 0.0, 0.02)]


QUICK: list[Callable[[int], list[CheckResult]]] = [_kernel, _geometry, _disk, _scaling]
FULL = QUICK + [_square, _triangle, _oracle, _recovery]


def run_checks(level: str = "quick") -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError("level must be quick or full")
    n_panels = 256 if level == "quick" else 1024
    out: list[CheckResult] = []
    for check in QUICK if level == "quick" else FULL:
        try:
            out.extend(check(n_panels))
        except Exception as exc:  # a crashing check is a failed check
            out.append(CheckResult(check.__name__.lstrip("_"), False, "no error", f"{type(exc).__name__}: {exc}"))
    return out
