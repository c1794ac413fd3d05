"""Logarithmic equilibrium measure of a convex polygon by a boundary panel method.

The equilibrium measure of a planar convex body for the kernel
``-log|x - y|`` lives on the boundary.  We discretize it by piecewise
constant densities on a corner-graded panel mesh and solve the augmented
first-kind system

    sum_j K_ij w_j = c   for every panel i,      sum_j w_j = 1,

whose constant ``c`` is the Robin constant I_2(E) (the equilibrium potential
equals I_2(E) on E and I_2(E) = ∫ u dμ).  A grid-based projected-gradient
solver for general Riesz exponents serves as an independent oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy import integrate

from . import _backend
from .errors import MeshError, OracleConvergenceError, PreconditionError, SolverError
from .geometry2d import HalfPlanePolygon, convex_intersection, turning_angles, _shoelace

DEFAULT_GRADING = 0.75
CORNER_TURN = 0.15  # radians of turning above which a vertex is graded as a corner
MAX_GROWTH_STEPS = 12


@dataclass(frozen=True, eq=False)
class PanelMesh:
    """Boundary panels in CCW order.

    Each panel is the parameter interval [t0, t1] of polygon edge
    ``edge_id``; :meth:`moved` re-evaluates the same parametrization on new
    vertex positions, which keeps panel topology fixed under small shape
    perturbations.
    """

    vertices: np.ndarray
    edge_id: np.ndarray
    t0: np.ndarray
    t1: np.ndarray
    is_corner: np.ndarray
    grading: float
    starts: np.ndarray = field(init=False)
    ends: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        v = self.vertices
        a = v[self.edge_id]
        b = v[(self.edge_id + 1) % len(v)]
        e = b - a
        object.__setattr__(self, "starts", a + self.t0[:, None] * e)
        object.__setattr__(self, "ends", a + self.t1[:, None] * e)

    @property
    def n(self) -> int:
        return len(self.t0)

    @property
    def mids(self) -> np.ndarray:
        return 0.5 * (self.starts + self.ends)

    @property
    def lengths(self) -> np.ndarray:
        d = self.ends - self.starts
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def normals(self) -> np.ndarray:
        d = self.ends - self.starts
        return np.column_stack([d[:, 1], -d[:, 0]]) / self.lengths[:, None]

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.edge_id, minlength=len(self.vertices))

    @property
    def corner_dist(self) -> np.ndarray:
        """Distance from each panel midpoint to the nearest graded corner of its edge."""
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        L = np.hypot(e[:, 0], e[:, 1])[self.edge_id]
        tm = 0.5 * (self.t0 + self.t1)
        n = len(v)
        d = np.full(self.n, np.inf)
        start_c = self.is_corner[self.edge_id]
        end_c = self.is_corner[(self.edge_id + 1) % n]
        d = np.where(start_c, tm * L, d)
        d = np.where(end_c, np.minimum(d, (1.0 - tm) * L), d)
        return d

    @property
    def perimeter(self) -> float:
        return float(self.lengths.sum())

    def moved(self, vertices: np.ndarray) -> "PanelMesh":
        return PanelMesh(np.asarray(vertices, dtype=float), self.edge_id, self.t0, self.t1, self.is_corner, self.grading)

    def scaled(self, s: float) -> "PanelMesh":
        return self.moved(s * self.vertices)


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    masses: np.ndarray
    densities: np.ndarray
    robin: float
    potential_residual: float
    clamped: bool = False
    condition: float | None = None

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


def allocate_panels(lengths: np.ndarray, n_panels: int, minimum: int = 2) -> np.ndarray:
    """Panels per edge proportional to length, at least ``minimum``, summing to n_panels."""
    ideal = n_panels * lengths / lengths.sum()
    counts = np.maximum(np.floor(ideal).astype(int), minimum)
    while counts.sum() < n_panels:
        counts[int(np.argmax(ideal - counts))] += 1
    while counts.sum() > n_panels:
        excess = np.where(counts > minimum, counts - ideal, -np.inf)
        counts[int(np.argmax(excess))] -= 1
    return counts


def _graded_fractions(m: int, start_corner: bool, end_corner: bool, ratio: float) -> np.ndarray:
    k = np.arange(m)
    steps = np.full(m, MAX_GROWTH_STEPS)
    if start_corner:
        steps = np.minimum(steps, k)
    if end_corner:
        steps = np.minimum(steps, m - 1 - k)
    if not (start_corner or end_corner) or ratio >= 1.0:
        w = np.ones(m)
    else:
        w = ratio ** (-steps.astype(float))
    return np.concatenate([[0.0], np.cumsum(w) / w.sum()])


def build_mesh(
    P: HalfPlanePolygon,
    n_panels: int,
    grading: float = DEFAULT_GRADING,
    counts: np.ndarray | None = None,
    corners: np.ndarray | None = None,
) -> PanelMesh:
    """Corner-graded panel mesh of the polygon boundary.

    Panels are allotted to edges proportionally to length (minimum 2 per
    edge).  On each edge, panel lengths grow geometrically by ``1/grading``
    away from every endpoint that is a corner (turning angle above
    ``CORNER_TURN``), up to a growth factor ``grading**-12``.
    """
    if not 0.0 < grading <= 1.0:
        raise PreconditionError("grading ratio must lie in (0, 1]")
    nv = P.n
    if counts is None:
        if n_panels < 2 * nv:
            raise MeshError(f"n_panels={n_panels} is below 2 panels for each of {nv} edges")
        counts = allocate_panels(P.edge_lengths, n_panels)
    counts = np.asarray(counts, dtype=int)
    if corners is None:
        corners = np.abs(turning_angles(P)) > CORNER_TURN
    edge_id, t0, t1 = [], [], []
    for i in range(nv):
        f = _graded_fractions(int(counts[i]), bool(corners[i]), bool(corners[(i + 1) % nv]), grading)
        edge_id.append(np.full(len(f) - 1, i))
        t0.append(f[:-1])
        t1.append(f[1:])
    return PanelMesh(
        np.array(P.vertices),
        np.concatenate(edge_id),
        np.concatenate(t0),
        np.concatenate(t1),
        np.asarray(corners, dtype=bool),
        grading,
    )


def kernel_rows(mesh: PanelMesh, rows: np.ndarray) -> np.ndarray:
    """Rows of the kernel matrix for the given panel indices."""
    idx = np.arange(mesh.n)
    K, ok = _backend.kernel_block(
        mesh.starts[rows], mesh.ends[rows], idx[rows], mesh.starts, mesh.ends, idx, mesh.n
    )
    if not ok:
        raise MeshError("two panels share a midpoint")
    return K


def assemble_kernel(mesh: PanelMesh) -> np.ndarray:
    """Symmetric matrix of panel-pair averaged ``-log|x - y|``."""
    idx = np.arange(mesh.n)
    K, ok = _backend.kernel_block(mesh.starts, mesh.ends, idx, mesh.starts, mesh.ends, idx, mesh.n)
    if not ok:
        raise MeshError("two panels share a midpoint")
    return 0.5 * (K + K.T)


def solve_augmented(K: np.ndarray) -> tuple[np.ndarray, float]:
    """Weights w and constant c with K w = c, sum(w) = 1 (symmetric indefinite solve)."""
    n = K.shape[0]
    A = np.empty((n + 1, n + 1))
    A[:n, :n] = K
    A[:n, n] = 1.0
    A[n, :n] = 1.0
    A[n, n] = 0.0
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            x = scipy.linalg.solve(A, rhs, assume_a="sym", check_finite=False)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
            cond = float(np.linalg.cond(A))
            raise SolverError(f"augmented system is singular ({exc})", condition=cond) from None
    if not np.all(np.isfinite(x)):
        raise SolverError("non-finite solution", condition=float(np.linalg.cond(A)))
    return x[:n], -float(x[n])


def solve_equilibrium(
    mesh: PanelMesh,
    K: np.ndarray | None = None,
    tol_density: float = 1e-6,
    residual: bool = True,
) -> EquilibriumSolution:
    """Equilibrium weights, densities and Robin constant on a panel mesh.

    Negative densities below ``-tol_density * max f`` trigger a warning;
    all negative weights are clamped to zero and the rest renormalized.
    The potential residual is measured at panel endpoints, which are not
    collocation nodes.
    """
    if K is None:
        K = assemble_kernel(mesh)
    w, c = solve_augmented(K)
    h = mesh.lengths
    f = w / h
    clamped = False
    if np.any(f < 0.0):
        if np.any(f < -tol_density * f.max()):
            warnings.warn(
                f"negative equilibrium density {f.min():.3e}; clamping and renormalizing",
                RuntimeWarning,
                stacklevel=2,
            )
            clamped = True
        w = np.maximum(w, 0.0)
        w /= w.sum()
        f = w / h
    sol = EquilibriumSolution(w, f, c, float("nan"), clamped)
    if residual:
        u = potential_at(sol, mesh, mesh.starts)
        sol = EquilibriumSolution(w, f, c, float(np.max(np.abs(u - c))), clamped)
    return sol


def log_energy(P: HalfPlanePolygon, n_panels: int = 1024, grading: float = DEFAULT_GRADING) -> float:
    """Robin constant I_2(P) (logarithmic energy of the equilibrium measure)."""
    mesh = build_mesh(P, n_panels, grading)
    return solve_equilibrium(mesh, residual=False).robin


def potential_at(sol: EquilibriumSolution, mesh: PanelMesh, x) -> np.ndarray | float:
    """Equilibrium potential u(x) = Σ w_j (-log|x - m_j|), refined near panels.

    Panels closer than twice their length to x are integrated exactly.
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    mids = mesh.mids
    h = mesh.lengths
    scale = max(float(np.ptp(mesh.vertices, axis=0).max()), 1e-300)
    d = pts[:, None, :] - mids[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r <= 1e-14 * scale):
        raise PreconditionError("evaluation point coincides with a panel node")
    vals = -np.log(r)
    # distance to the panel segment
    s = mesh.starts
    e = mesh.ends - s
    L2 = h * h
    t = np.clip(((pts[:, None, :] - s[None]) * e[None]).sum(axis=2) / L2, 0.0, 1.0)
    proj = s[None] + t[..., None] * e[None]
    dseg = np.hypot(*(pts[:, None, :] - proj).transpose(2, 0, 1))
    near = dseg < 2.0 * h[None, :]
    if near.any():
        rows, cols = np.nonzero(near)
        for i in np.unique(rows):
            c = cols[rows == i]
            vals[i, c] = _backend.segment_log_average(pts[i : i + 1], mesh.starts[c], mesh.ends[c])[0]
    u = vals @ sol.masses
    return float(u[0]) if np.ndim(x) == 1 else u


def gradient_norm_on_boundary(sol: EquilibriumSolution) -> np.ndarray:
    """|∇u| on each panel, from μ = |∇u| / 2π · H¹ on the boundary."""
    return 2.0 * math.pi * sol.densities


def corner_exponent(sol: EquilibriumSolution, mesh: PanelMesh, corner_index: int) -> float:
    """Log-log slope of the density against distance to a polygon corner.

    Fit window: distances in [4 h_min, 0.1 * shorter adjacent edge], h_min
    the smallest panel on the two adjacent edges.  For interior angle γ the
    expected slope is -(π - γ)/(2π - γ).
    """
    v = mesh.vertices
    n = len(v)
    turn = turning_angles(HalfPlanePolygon(v))[corner_index]
    gamma = math.pi - turn
    if gamma >= math.pi - 0.05:
        raise PreconditionError("corner is too flat for an exponent fit")
    edges = [(corner_index - 1) % n, corner_index]
    sel = np.isin(mesh.edge_id, edges)
    elen = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    h_min = mesh.lengths[sel].min()
    dist = np.hypot(*(mesh.mids - v[corner_index]).T)
    hi = 0.1 * min(elen[edges[0]], elen[edges[1]])
    win = sel & (dist >= 4.0 * h_min) & (dist <= hi)
    if np.count_nonzero(win) < 8:
        raise PreconditionError(f"only {np.count_nonzero(win)} panels in the corner fit window (need 8)")
    slope = np.polyfit(np.log(dist[win]), np.log(sol.densities[win]), 1)[0]
    return float(slope)


def expected_corner_exponent(gamma: float) -> float:
    return -(math.pi - gamma) / (2.0 * math.pi - gamma)


def solution_csv(sol: EquilibriumSolution, mesh: PanelMesh) -> str:
    g = gradient_norm_on_boundary(sol)
    lines = ["x,y,length,density,grad_norm"]
    for (x, y), h, f, gn in zip(mesh.mids, mesh.lengths, sol.densities, g):
        lines.append(f"{x:.17g},{y:.17g},{h:.17g},{f:.17g},{gn:.17g}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# grid oracle


@lru_cache(maxsize=None)
def square_self_energy(alpha: float) -> float:
    """Mean kernel value over pairs of points in the unit square.

    The kernel is -log r for alpha = 2 and r**-(2 - alpha) otherwise.
    Computed from the difference-vector density 4(1-u)(1-v) in polar form.
    """
    s = 2.0 - alpha

    def k(r):
        return -math.log(r) if alpha == 2.0 else r ** (-s)

    def inner(theta):
        rmax = 1.0 / math.cos(theta)
        val, _ = integrate.quad(
            lambda r: (1 - r * math.cos(theta)) * (1 - r * math.sin(theta)) * k(r) * r, 0.0, rmax, limit=200
        )
        return val

    val, _ = integrate.quad(inner, 0.0, 0.25 * math.pi, limit=200)
    return 8.0 * val


def _grid_cells(P: HalfPlanePolygon, grid_n: int):
    v = P.vertices
    lo = v.min(axis=0)
    span = float(np.ptp(v, axis=0).max())
    k = int(math.isqrt(grid_n))
    s = span / k
    ii, jj = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    x0 = lo[0] + ii.ravel() * s
    y0 = lo[1] + jj.ravel() * s
    corners = np.stack(
        [np.column_stack([x0 + dx * s, y0 + dy * s]) for dx, dy in ((0, 0), (1, 0), (1, 1), (0, 1))], axis=1
    )
    # signed distance of every cell corner to every edge line (inside: all >= 0)
    e = np.roll(v, -1, axis=0) - v
    rel = corners[:, :, None, :] - v[None, None, :, :]
    side = e[None, None, :, 0] * rel[..., 1] - e[None, None, :, 1] * rel[..., 0]
    inside = np.all(side >= 0.0, axis=(1, 2))
    cents = list(corners[inside].mean(axis=1))
    areas = [s * s] * int(inside.sum())
    for c in np.nonzero(~inside)[0]:
        poly = convex_intersection(corners[c], v)
        if len(poly) < 3:
            continue
        a = _shoelace(poly)
        if a <= 1e-9 * s * s:
            continue
        w = np.roll(poly, -1, axis=0)
        cr = poly[:, 0] * w[:, 1] - w[:, 0] * poly[:, 1]
        cents.append(((poly + w) * cr[:, None]).sum(axis=0) / (6.0 * a))
        areas.append(a)
    return np.array(cents), np.array(areas), s


def _project_simplex(c: np.ndarray) -> np.ndarray:
    u = np.sort(c)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(c) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(c - css[rho] / (rho + 1.0), 0.0)


@dataclass(frozen=True)
class OracleResult:
    energy: float
    weights: np.ndarray
    centroids: np.ndarray
    iterations: int
    gap: float


def riesz_energy_oracle(
    P: HalfPlanePolygon,
    alpha: float = 2.0,
    grid_n: int = 1024,
    tol: float = 1e-6,
    max_iter: int = 50000,
    full: bool = False,
):
    """Brute-force Riesz / logarithmic energy on a grid of cells clipped to P.

    Minimizes wᵀAw over probability weights on the cells by accelerated
    projected gradient onto the simplex; A holds the kernel between cell
    centroids and the exact square-cell self energy on the diagonal (cells
    cut by the boundary use the square of equal area).  Stops when the
    Frank-Wolfe duality gap falls below ``tol * max(1, |energy|)``.
    """
    if not 0.0 < alpha <= 2.0:
        raise PreconditionError("alpha must lie in (0, 2]")
    if grid_n > 4096 or grid_n < 16:
        raise PreconditionError("grid_n must lie in [16, 4096]")
    cents, areas, _ = _grid_cells(P, grid_n)
    side = np.sqrt(areas)
    d = cents[:, None, :] - cents[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    np.fill_diagonal(r, 1.0)
    if alpha == 2.0:
        A = -np.log(r)
        np.fill_diagonal(A, square_self_energy(2.0) - np.log(side))
    else:
        A = r ** (-(2.0 - alpha))
        np.fill_diagonal(A, square_self_energy(alpha) * side ** (-(2.0 - alpha)))
    m = len(areas)
    # Lipschitz constant of the gradient on the simplex tangent space
    rng = np.random.default_rng(0)
    z = rng.normal(size=m)
    lam = 1.0
    for _ in range(100):
        z -= z.mean()
        y = A @ z
        y -= y.mean()
        lam = float(np.linalg.norm(y))
        z = y / lam
    L = 2.0 * lam * 1.05
    w = areas / areas.sum()
    Aw = A @ w
    energy = float(w @ Aw)
    y, Ay = w, Aw
    tk = 1.0
    gap = np.inf
    for it in range(1, max_iter + 1):
        w_new = _project_simplex(y - 2.0 * Ay / L)
        Aw_new = A @ w_new
        e_new = float(w_new @ Aw_new)
        if e_new > energy:  # adaptive restart
            y, Ay = w_new, Aw_new
            tk = 1.0
        else:
            t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
            mom = (tk - 1.0) / t_new
            y = w_new + mom * (w_new - w)
            Ay = Aw_new + mom * (Aw_new - Aw)
            tk = t_new
        w, Aw, energy = w_new, Aw_new, e_new
        if it % 10 == 0:
            gw = 2.0 * Aw
            gap = float(gw @ w - gw.min())
            if gap <= tol * max(1.0, abs(energy)):
                res = OracleResult(energy, w, cents, it, gap)
                return res if full else energy
    raise OracleConvergenceError(f"grid oracle did not converge, duality gap {gap:.3e}", gap)
