"""Capillarity perimeter, total charged energy, truncated-ball minimizers and
isoperimetric diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, PreconditionError
from .geometry2d import (
    HalfPlanePolygon,
    boundary_measures,
    hausdorff_distance,
    symdiff_area,
)
from .potential import DEFAULT_GRADING, build_mesh, solve_equilibrium
from .shapes import slab

MAX_SLAB_R = 64.0


@dataclass(frozen=True)
class SessileConfig:
    """Physical parameters of the charged sessile drop.

    ``lam=None`` selects the default volume-penalty weight
    max(10, 4 P_β(B^β(1))).
    """

    beta: float = 0.0
    q: float = 0.0
    lam: float | None = None
    n_panels: int = 1024
    target_area: float = 1.0
    allow_degenerate_beta: bool = False

    def __post_init__(self) -> None:
        check_beta(self.beta, self.allow_degenerate_beta)
        if not (math.isfinite(self.q) and self.q >= 0.0):
            raise ConfigError(f"q must be finite and >= 0, got {self.q}")
        if self.lam is not None and not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ConfigError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.n_panels < 8:
            raise ConfigError("n_panels must be at least 8")
        if not self.target_area > 0.0:
            raise ConfigError("target_area must be positive")

    @property
    def penalty(self) -> float:
        if self.lam is not None:
            return float(self.lam)
        return default_lambda(self.beta)


def check_beta(beta: float, allow_degenerate: bool = False) -> None:
    if not math.isfinite(beta):
        raise ConfigError("beta must be finite")
    if allow_degenerate:
        if abs(beta) > 1.0:
            raise ConfigError(f"beta must lie in [-1, 1], got {beta}")
    elif abs(beta) >= 1.0:
        raise ConfigError(f"beta must lie strictly inside (-1, 1), got {beta}")


def cap_area(beta: float) -> float:
    """|T^β| = arccos β − β√(1−β²): area of the unit-disk slice above height β."""
    return math.acos(beta) - beta * math.sqrt(1.0 - beta * beta)


def bbeta_radius(beta: float, m: float = 1.0) -> float:
    return math.sqrt(m / cap_area(beta))


def bbeta_energy(beta: float, m: float = 1.0) -> float:
    """P_β(B^β(m)) = 2√(m |T^β|) for the smooth truncated disk."""
    return 2.0 * math.sqrt(m * cap_area(beta))


def default_lambda(beta: float) -> float:
    return max(10.0, 4.0 * bbeta_energy(beta, 1.0)) if abs(beta) < 1.0 else 10.0


@dataclass(frozen=True)
class EnergyBreakdown:
    free_perimeter: float
    wetted_length: float
    p_beta: float
    i2: float | None
    volume_penalty: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "EnergyBreakdown":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


def pbeta(P: HalfPlanePolygon, beta: float, allow_degenerate: bool = False) -> float:
    check_beta(beta, allow_degenerate)
    free, contact = boundary_measures(P)
    return free - beta * contact.wetted_length


def robin_constant(P: HalfPlanePolygon, n_panels: int, grading: float = DEFAULT_GRADING) -> float:
    return solve_equilibrium(build_mesh(P, n_panels, grading), residual=False).robin


def total_energy(P: HalfPlanePolygon, cfg: SessileConfig, i2: float | None = None) -> EnergyBreakdown:
    """Breakdown of P_β + q² I₂ + Λ |area − target|.

    I₂ is only solved for when q > 0; otherwise it is reported as None and
    contributes nothing.  A precomputed ``i2`` may be passed in.
    """
    free, contact = boundary_measures(P)
    pb = free - cfg.beta * contact.wetted_length
    if cfg.q > 0.0:
        if i2 is None:
            i2 = robin_constant(P, cfg.n_panels)
        charge = cfg.q * cfg.q * i2
    else:
        i2 = None
        charge = 0.0
    pen = cfg.penalty * abs(P.area - cfg.target_area)
    return EnergyBreakdown(free, contact.wetted_length, pb, i2, pen, pb + charge + pen)


def build_bbeta(beta: float, m: float = 1.0, n_vertices: int = 256, center_x: float = 0.0) -> HalfPlanePolygon:
    """Polygonal truncated disk B^β(m) resting on the floor.

    The unit disk centred at (0, −β) is cut by the floor; its arc is sampled
    uniformly in angle between the two floor corners, which are vertices.
    The polygon is then scaled to have area exactly m.
    """
    check_beta(beta)
    if n_vertices < 16:
        raise PreconditionError("n_vertices must be at least 16")
    if not m > 0.0:
        raise PreconditionError("area must be positive")
    phi0 = math.asin(beta)
    phi = np.linspace(phi0, math.pi - phi0, n_vertices)
    v = np.column_stack([np.cos(phi), np.sin(phi) - beta])
    v[0, 1] = v[-1, 1] = 0.0
    P = HalfPlanePolygon(v)
    P = P.scaled(math.sqrt(m / P.area))
    return P.translated((center_x, 0.0)) if center_x else P


def _horizontal_bracket(P: HalfPlanePolygon, B: HalfPlanePolygon) -> tuple[float, float]:
    return (
        float(P.vertices[:, 0].min() - B.vertices[:, 0].max()),
        float(P.vertices[:, 0].max() - B.vertices[:, 0].min()),
    )


def best_translation(objective, lo: float, hi: float, n_scan: int = 64, xatol: float = 1e-7) -> tuple[float, float]:
    """Minimize a 1D objective: dense scan, then bounded golden-section refinement
    on the neighbouring scan cells (robust if unimodality fails)."""
    t = np.linspace(lo, hi, n_scan)
    vals = np.array([objective(x) for x in t])
    k = int(np.argmin(vals))
    a = t[max(k - 1, 0)]
    b = t[min(k + 1, n_scan - 1)]
    if b <= a:
        return float(t[k]), float(vals[k])
    res = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": xatol})
    if res.fun <= vals[k]:
        return float(res.x), float(res.fun)
    return float(t[k]), float(vals[k])


def fraenkel_asymmetry(P: HalfPlanePolygon, beta: float, n_ref: int = 512, return_shift: bool = False):
    """min over horizontal translates x of |P Δ (B^β(m) + x)| / |B^β(m)|, m = |P|."""
    m = P.area
    B = build_bbeta(beta, m, n_ref)
    lo, hi = _horizontal_bracket(P, B)
    x, val = best_translation(lambda t: symdiff_area(P, B.translated((t, 0.0))), lo, hi)
    alpha = min(max(val / B.area, 0.0), 2.0)
    return (alpha, x) if return_shift else alpha


def symdiff_to_bbeta(P: HalfPlanePolygon, beta: float, m: float = 1.0, n_ref: int = 1024) -> float:
    """Best-translate |P Δ B^β(m)|."""
    B = build_bbeta(beta, m, n_ref)
    lo, hi = _horizontal_bracket(P, B)
    return best_translation(lambda t: symdiff_area(P, B.translated((t, 0.0))), lo, hi)[1]


def hausdorff_to_bbeta(P: HalfPlanePolygon, beta: float, m: float = 1.0, n_ref: int = 1024) -> float:
    """Best-translate Hausdorff distance from P to B^β(m)."""
    B = build_bbeta(beta, m, n_ref)
    lo, hi = _horizontal_bracket(P, B)
    return best_translation(lambda t: hausdorff_distance(P, B.translated((t, 0.0))), lo, hi)[1]


def isoperimetric_deficit(P: HalfPlanePolygon, beta: float) -> float:
    ref = bbeta_energy(beta, P.area)
    return (pbeta(P, beta) - ref) / ref


def quantitative_check(P: HalfPlanePolygon, beta: float, tol: float = 1e-3) -> float:
    """D_β(P) / α_β(P)²; undefined (error) when P is B^β up to ``tol``."""
    a = fraenkel_asymmetry(P, beta)
    if a <= tol:
        raise PreconditionError(f"asymmetry {a:.3e} below tolerance; ratio undefined")
    return isoperimetric_deficit(P, beta) / (a * a)


def slab_family_energy(R: float, cfg: SessileConfig) -> EnergyBreakdown:
    """Energy of the unit-area slab [−R, R] × [0, 1/(2R)]."""
    if not R >= 1.0:
        raise PreconditionError("R must be at least 1")
    if R > MAX_SLAB_R:
        raise PreconditionError(f"R = {R} exceeds the conditioning guard {MAX_SLAB_R:g}")
    return total_energy(slab(R), cfg)
