"""Projected shape descent for the charged capillarity energy, and the
verification experiments built on it.

Shape degrees of freedom are the outward normal displacements of free
boundary vertices and the horizontal positions of the two contact points.
Each iteration:

1. evaluates the total energy (one equilibrium solve when q > 0);
2. differentiates P_β + q² I₂ by central finite differences, one degree of
   freedom at a time.  The charge part re-evaluates only the kernel rows of
   the panels on the two edges touching the moved vertex and uses the
   stationarity of I₂ = min wᵀKw (Σw = 1), so no re-solve is needed;
3. preconditions the gradient with a discrete H¹ metric along the free
   boundary and removes its first-order area change;
4. steps, projects onto convex bodies in H, and restores the area by a
   dilation about the contact midpoint;
5. backtracks on the total energy (Armijo), and periodically resamples the
   free boundary by arclength with refinement near the contact points.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .capillarity import (
    SessileConfig,
    EnergyBreakdown,
    build_bbeta,
    hausdorff_to_bbeta,
    symdiff_to_bbeta,
    fraenkel_asymmetry,
    total_energy,
)
from .errors import (
    ChargeDropError,
    ConfigError,
    PreconditionError,
    SolverError,
    StagnationError,
)
from .geometry2d import (
    HalfPlanePolygon,
    boundary_measures,
    contact_angles_fitted,
    convex_project,
    cut_competitor,
    discrete_curvature,
    symdiff_area,
    tangent_fill_competitor,
    turning_angles,
)
from .potential import PanelMesh, assemble_kernel, build_mesh, kernel_rows, solve_augmented

ARMIJO = 1e-4
MAX_MOVE = 0.05  # largest vertex displacement per step, as a fraction of diam


@dataclass(frozen=True)
class SolverConfig:
    sessile: SessileConfig = field(default_factory=SessileConfig)
    n_shape_vertices: int = 96
    fd_step: float | None = None  # None: 1e-4 * diam
    step_size: float = 0.05
    max_iters: int = 500
    tol_energy: float = 1e-7
    remesh_every: int = 10
    contact_band: float = 0.05
    seed: int = 0
    smoothing: float = 0.1  # H¹ preconditioner length, fraction of diam
    max_backtracks: int = 40

    def __post_init__(self) -> None:
        if self.n_shape_vertices < 16:
            raise ConfigError("n_shape_vertices must be at least 16")
        for name in ("step_size", "tol_energy", "contact_band", "smoothing"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.fd_step is not None and not self.fd_step > 0.0:
            raise ConfigError("fd_step must be positive")
        if self.max_iters < 1 or self.remesh_every < 1 or self.max_backtracks < 1:
            raise ConfigError("iteration counts must be positive")
        if 2 * self.n_shape_vertices > self.sessile.n_panels:
            raise ConfigError("n_panels must be at least twice n_shape_vertices")

    def with_sessile(self, **kw) -> "SolverConfig":
        return replace(self, sessile=replace(self.sessile, **kw))


# --------------------------------------------------------------------------
# energy evaluation


@dataclass(frozen=True, eq=False)
class _State:
    P: HalfPlanePolygon
    energy: EnergyBreakdown
    mesh: PanelMesh | None = None
    K: np.ndarray | None = None
    w: np.ndarray | None = None


def _evaluate(P: HalfPlanePolygon, cfg: SolverConfig) -> _State:
    s = cfg.sessile
    if s.q > 0.0:
        mesh = build_mesh(P, s.n_panels)
        K = assemble_kernel(mesh)
        w, c = solve_augmented(K)
        return _State(P, total_energy(P, s, i2=c), mesh, K, w)
    return _State(P, total_energy(P, s))


# --------------------------------------------------------------------------
# degrees of freedom


@dataclass(frozen=True, eq=False)
class _Dofs:
    index: np.ndarray  # vertex index per dof, in boundary path order
    direction: np.ndarray  # unit displacement direction per dof
    dual: np.ndarray  # dual length per dof
    closed: bool
    path_edges: np.ndarray  # lengths between consecutive dofs along the path


def _vertex_normals(v: np.ndarray) -> np.ndarray:
    e = np.roll(v, -1, axis=0) - v
    nrm = np.column_stack([e[:, 1], -e[:, 0]])
    nrm /= np.hypot(nrm[:, 0], nrm[:, 1])[:, None]
    b = nrm + np.roll(nrm, 1, axis=0)
    return b / np.hypot(b[:, 0], b[:, 1])[:, None]


def _dofs(P: HalfPlanePolygon) -> _Dofs:
    v = P.vertices
    n = P.n
    L = P.edge_lengths
    normals = _vertex_normals(v)
    run = P.floor_run
    if run is None or run[0] == run[1]:
        idx = np.arange(n)
        dirs = normals
        dual = 0.5 * (L + np.roll(L, 1))
        return _Dofs(idx, dirs, dual, True, L.copy())
    a, b = run
    m = (a - b) % n + 1
    idx = (b + np.arange(m)) % n
    dirs = normals[idx].copy()
    dirs[0] = (1.0, 0.0)
    dirs[-1] = (-1.0, 0.0)
    path = L[idx[:-1]]
    dual = np.empty(m)
    dual[1:-1] = 0.5 * (path[:-1] + path[1:])
    dual[0] = 0.5 * path[0]
    dual[-1] = 0.5 * path[-1]
    return _Dofs(idx, dirs, dual, False, path)


def _area_gradient(v: np.ndarray, d: _Dofs) -> np.ndarray:
    nxt = np.roll(v, -1, axis=0)[d.index]
    prv = np.roll(v, 1, axis=0)[d.index]
    gA = 0.5 * np.column_stack([nxt[:, 1] - prv[:, 1], prv[:, 0] - nxt[:, 0]])
    return np.einsum("ij,ij->i", gA, d.direction)


def _sobolev_matrix(d: _Dofs, sigma: float) -> np.ndarray:
    m = len(d.index)
    M = np.diag(d.dual.astype(float))
    k = 1.0 / d.path_edges
    s2 = sigma * sigma
    for j in range(len(k) if d.closed else m - 1):
        p, q = j, (j + 1) % m
        M[p, p] += s2 * k[j]
        M[q, q] += s2 * k[j]
        M[p, q] -= s2 * k[j]
        M[q, p] -= s2 * k[j]
    return M


# --------------------------------------------------------------------------
# gradients


def _pbeta_local(v: np.ndarray, i: int, floor_edge: np.ndarray, beta: float) -> float:
    n = len(v)
    tot = 0.0
    for e in ((i - 1) % n, i):
        L = math.hypot(*(v[(e + 1) % n] - v[e]))
        tot += -beta * L if floor_edge[e] else L
    return tot


def fd_gradient(state: _State, cfg: SolverConfig, dofs: _Dofs | None = None) -> np.ndarray:
    """Central-difference derivative of P_β + q² I₂ for each degree of freedom."""
    P = state.P
    d = dofs or _dofs(P)
    h = cfg.fd_step if cfg.fd_step is not None else 1e-4 * P.diam
    v = P.vertices
    beta = cfg.sessile.beta
    q2 = cfg.sessile.q ** 2
    floor_edge = P.floor_edge_mask
    mesh = state.mesh
    g = np.empty(len(d.index))
    for k, (i, u) in enumerate(zip(d.index, d.direction)):
        if q2 > 0.0:
            rows = np.nonzero((mesh.edge_id == (i - 1) % P.n) | (mesh.edge_id == i))[0]
            wS = state.w[rows]
        diff = 0.0
        for sgn in (1.0, -1.0):
            vv = v.copy()
            vv[i] += sgn * h * u
            dE = _pbeta_local(vv, i, floor_edge, beta)
            if q2 > 0.0:
                dK = kernel_rows(mesh.moved(vv), rows) - state.K[rows]
                dE += q2 * (2.0 * wS @ (dK @ state.w) - wS @ (dK[:, rows] @ wS))
            diff += sgn * dE
        g[k] = diff / (2.0 * h)
    return g


def _vertex_densities(mesh: PanelMesh, w: np.ndarray) -> np.ndarray:
    """Density at each polygon vertex: mean of the two panels meeting there."""
    f = w / mesh.lengths
    nv = len(mesh.vertices)
    first = np.searchsorted(mesh.edge_id, np.arange(nv), side="left")
    last = np.searchsorted(mesh.edge_id, np.arange(nv), side="right") - 1
    return 0.5 * (f[first] + f[np.roll(last, 1)])


def analytic_gradient(P: HalfPlanePolygon, cfg: SolverConfig) -> np.ndarray:
    """First variation per unit normal velocity at each vertex.

    Free vertices: κ_i − 2π q² f_i² + Λ sign(|P| − target).  Contact points:
    the horizontal derivative cos γ − β.  Interior floor vertices: NaN.
    """
    s = cfg.sessile
    kappa = discrete_curvature(P)
    g = kappa.copy()
    if s.q > 0.0:
        mesh = build_mesh(P, s.n_panels)
        w, _ = solve_augmented(assemble_kernel(mesh))
        f = _vertex_densities(mesh, w)
        g = g - 2.0 * math.pi * s.q ** 2 * f * f
    g = g + s.penalty * float(np.sign(P.area - s.target_area))
    run = P.floor_run
    if run is not None and run[0] != run[1]:
        _, c = boundary_measures(P)
        g[P.floor_mask] = np.nan
        g[run[0]] = math.cos(c.gamma1) - s.beta
        g[run[1]] = math.cos(c.gamma2) - s.beta
    return g


def fd_gradient_per_length(P: HalfPlanePolygon, cfg: SolverConfig) -> np.ndarray:
    """Finite-difference first variation of the full energy per unit normal velocity.

    Normalized by the area derivative at free vertices so it is directly
    comparable with :func:`analytic_gradient`; contact points are left as
    the raw horizontal derivative.
    """
    state = _evaluate(P, cfg)
    d = _dofs(P)
    g = fd_gradient(state, cfg, d)
    a = _area_gradient(P.vertices, d)
    pen = cfg.sessile.penalty * float(np.sign(P.area - cfg.sessile.target_area))
    out = np.full(P.n, np.nan)
    per = g / a + pen
    if not d.closed:
        per[0] = g[0]
        per[-1] = g[-1]
    out[d.index] = per
    return out


# --------------------------------------------------------------------------
# shape updates


def _nearest_on_boundary(x: np.ndarray, H: HalfPlanePolygon) -> np.ndarray:
    v = H.vertices
    e = H.edge_vectors
    rel = x[:, None, :] - v[None, :, :]
    t = np.clip(np.einsum("mij,ij->mi", rel, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    proj = v[None, :, :] + t[..., None] * e[None, :, :]
    dist = np.hypot(*(x[:, None, :] - proj).transpose(2, 0, 1))
    return proj[np.arange(len(x)), np.argmin(dist, axis=1)]


def project_convex(V: np.ndarray) -> HalfPlanePolygon:
    """Convex body in H closest in spirit to the vertex list V.

    Vertices that fall inside the hull (reflex after a step) or below the
    floor are moved to the nearest hull boundary point instead of being
    dropped, so the vertex count is preserved up to coincident points.
    """
    H = convex_project(V)
    return convex_project(_nearest_on_boundary(np.asarray(V, dtype=float), H))


def _restore_area(P: HalfPlanePolygon, target: float) -> HalfPlanePolygon:
    run = P.floor_run
    if run is None:
        cx = float(P.vertices[np.argmin(P.vertices[:, 1]), 0])
    else:
        cx = 0.5 * float(P.vertices[run[0], 0] + P.vertices[run[1], 0])
    return P.scaled(math.sqrt(target / P.area), origin=(cx, 0.0))


def remesh(P: HalfPlanePolygon, n_vertices: int, band: float, refine: float = 3.0) -> HalfPlanePolygon:
    """Resample the free boundary by arclength.

    Point density is ``refine`` times higher within ``band`` (arclength)
    of either contact point.  The two contact points are kept and the floor
    becomes a single edge.  Bodies without a contact segment are resampled
    uniformly.
    """
    v = P.vertices
    n = P.n
    run = P.floor_run
    if run is None or run[0] == run[1]:
        start = int(np.argmin(v[:, 1])) if run is None else run[0]
        path = np.vstack([np.roll(v, -start, axis=0), v[start]])
        seg = np.hypot(*np.diff(path, axis=0).T)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        t = np.linspace(0.0, s[-1], n_vertices + 1)[:-1]
        pts = np.column_stack([np.interp(t, s, path[:, 0]), np.interp(t, s, path[:, 1])])
        return convex_project(pts)
    a, b = run
    m = (a - b) % n + 1
    path = v[(b + np.arange(m)) % n]
    seg = np.hypot(*np.diff(path, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    # cumulative weight of the piecewise-constant density
    bw = min(band, 0.5 * total)
    knots = np.array([0.0, bw, total - bw, total])
    dens = np.array([refine, 1.0, refine])
    W = np.concatenate([[0.0], np.cumsum(np.diff(knots) * dens)])
    n_free = n_vertices - 2
    targets = np.linspace(0.0, W[-1], n_free + 2)[1:-1]
    t = np.interp(targets, W, knots)
    pts = np.column_stack([np.interp(t, s, path[:, 0]), np.interp(t, s, path[:, 1])])
    new = np.vstack([v[a], v[b], pts[::-1][::-1]])
    return convex_project(new)


# --------------------------------------------------------------------------
# trace


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    remeshed: bool
    energy_start: float
    total: float
    p_beta: float
    i2: float | None
    area_err: float
    gamma1: float
    gamma2: float
    max_disp: float
    step: float
    backtracks: int


TRACE_COLUMNS = [f for f in TraceRecord.__dataclass_fields__]


@dataclass
class OptimTrace:
    records: list[TraceRecord] = field(default_factory=list)
    converged: bool = False
    reason: str = ""

    def __len__(self) -> int:
        return len(self.records)

    @property
    def totals(self) -> np.ndarray:
        return np.array([r.total for r in self.records])

    def monotone(self, slack: float = 0.0) -> bool:
        """Energy never increases across an accepted step."""
        return all(r.total <= r.energy_start + slack for r in self.records) and all(
            nxt.energy_start <= cur.total + slack
            for cur, nxt in zip(self.records, self.records[1:])
            if not nxt.remeshed
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(TRACE_COLUMNS)
        for r in self.records:
            wr.writerow([_fmt(getattr(r, c)) for c in TRACE_COLUMNS])
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _angles(P: HalfPlanePolygon, cfg: SolverConfig) -> tuple[float, float]:
    run = P.floor_run
    if run is None or run[0] == run[1]:
        return float("nan"), float("nan")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fa = contact_angles_fitted(P, cfg.contact_band * P.diam)
    return fa.gamma1, fa.gamma2


# --------------------------------------------------------------------------
# main loop


def minimize(init: HalfPlanePolygon, cfg: SolverConfig) -> tuple[HalfPlanePolygon, OptimTrace]:
    """Minimize P_β + q² I₂ + Λ |area − target| over convex bodies in H."""
    target = cfg.sessile.target_area
    trace = OptimTrace()
    P = _restore_area(remesh(init, cfg.n_shape_vertices, cfg.contact_band * init.diam), target)
    tau = cfg.step_size
    state = _evaluate(P, cfg)
    for it in range(cfg.max_iters):
        remeshed = it > 0 and it % cfg.remesh_every == 0
        try:
            if remeshed:
                P = _restore_area(remesh(P, cfg.n_shape_vertices, cfg.contact_band * P.diam), target)
                state = _evaluate(P, cfg)
            F0 = state.energy.total
            d = _dofs(P)
            g = fd_gradient(state, cfg, d)
            M = _sobolev_matrix(d, cfg.smoothing * P.diam)
            a = _area_gradient(P.vertices, d)
            Mg = np.linalg.solve(M, g)
            Ma = np.linalg.solve(M, a)
            direction = -(Mg - (a @ Mg) / (a @ Ma) * Ma)
            slope = -float(g @ direction)
            dmax = float(np.abs(direction).max())
            if slope <= 0.0 or dmax == 0.0:
                trace.converged, trace.reason = True, "zero descent slope"
                break
            tau = min(tau, MAX_MOVE * P.diam / dmax)
            accepted = None
            for bt in range(cfg.max_backtracks):
                V = P.vertices.copy()
                V[d.index] += tau * direction[:, None] * d.direction
                try:
                    trial = _restore_area(project_convex(V), target)
                    st = _evaluate(trial, cfg)
                except SolverError:
                    raise
                except ChargeDropError:
                    st = None
                if st is not None and st.energy.total <= F0 - ARMIJO * tau * slope:
                    accepted = st
                    break
                tau *= 0.5
            if accepted is None:
                trace.reason = "line search failed"
                raise StagnationError(
                    f"line search failed {cfg.max_backtracks} times at iteration {it}", trace=trace, shape=P
                )
        except SolverError as exc:
            raise SolverError(f"iteration {it}: {exc}", condition=exc.condition) from exc
        disp = tau * dmax
        P, state = accepted.P, accepted
        e = state.energy
        g1, g2 = _angles(P, cfg)
        trace.records.append(
            TraceRecord(it, remeshed, F0, e.total, e.p_beta, e.i2, P.area - target, g1, g2, disp, tau, bt)
        )
        rel = (F0 - e.total) / max(abs(F0), 1.0)
        tau = min(2.0 * tau, 1e3 * cfg.step_size)
        if rel < cfg.tol_energy and not remeshed:
            trace.converged, trace.reason = True, "relative energy decrease below tolerance"
            break
    else:
        trace.reason = "max_iters reached"
    return P, trace


# --------------------------------------------------------------------------
# experiments


SWEEP_COLUMNS = [
    "beta",
    "q",
    "iters",
    "total",
    "p_beta",
    "i2",
    "area_err",
    "gamma1",
    "gamma2",
    "cos_gamma_minus_beta",
    "hausdorff_to_bbeta",
    "symdiff_to_bbeta",
    "errors",
]


def _sweep_cell(beta: float, q: float, cfg: SolverConfig) -> dict:
    row = {c: "" for c in SWEEP_COLUMNS}
    row.update(beta=beta, q=q)
    try:
        c = cfg.with_sessile(beta=beta, q=q)
        P, trace = minimize(build_bbeta(beta, c.sessile.target_area, c.n_shape_vertices), c)
        e = total_energy(P, c.sessile)
        g1, g2 = _angles(P, c)
        gamma = 0.5 * (g1 + g2)
        row.update(
            iters=len(trace),
            total=e.total,
            p_beta=e.p_beta,
            i2=e.i2,
            area_err=P.area - c.sessile.target_area,
            gamma1=g1,
            gamma2=g2,
            cos_gamma_minus_beta=math.cos(gamma) - beta,
            hausdorff_to_bbeta=hausdorff_to_bbeta(P, beta, c.sessile.target_area),
            symdiff_to_bbeta=symdiff_to_bbeta(P, beta, c.sessile.target_area),
        )
        if not trace.converged:
            row["errors"] = "not converged"
    except ChargeDropError as exc:
        row["errors"] = f"{type(exc).__name__}: {exc}"
    return row


def young_sweep(betas, qs, cfg: SolverConfig) -> list[dict]:
    """Minimize from B^β(1) for every (β, q) cell and record the contact data."""
    for q in qs:
        if q > 0.5:
            raise PreconditionError("young_sweep expects small charges (q <= 0.5)")
    return [_sweep_cell(float(b), float(q), cfg) for b in betas for q in qs]


def rows_to_csv(rows: list[dict], columns: list[str] = SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for r in rows:
        wr.writerow([r[c] if isinstance(r[c], str) else _fmt(r[c]) for c in columns])
    return buf.getvalue()


@dataclass(frozen=True)
class QConvergenceReport:
    qs: np.ndarray
    symdiff: np.ndarray
    hausdorff: np.ndarray
    iters: np.ndarray
    constant: float  # smallest C with symdiff <= C q
    exponent: float  # log-log slope of symdiff against q
    fit_residual: float

    def rows(self) -> list[dict]:
        return [
            dict(q=q, symdiff=s, hausdorff=h, iters=int(n))
            for q, s, h, n in zip(self.qs, self.symdiff, self.hausdorff, self.iters)
        ]


def q_convergence(beta: float, qs, cfg: SolverConfig) -> QConvergenceReport:
    """Distance of minimizers to B^β(1) as the charge decreases."""
    qs = np.asarray(qs, dtype=float)
    if np.any(np.diff(qs) >= 0.0):
        raise PreconditionError("qs must be strictly decreasing")
    sd, hd, its = [], [], []
    for q in qs:
        c = cfg.with_sessile(beta=beta, q=float(q))
        P, trace = minimize(build_bbeta(beta, c.sessile.target_area, c.n_shape_vertices), c)
        sd.append(symdiff_to_bbeta(P, beta, c.sessile.target_area))
        hd.append(hausdorff_to_bbeta(P, beta, c.sessile.target_area))
        its.append(len(trace))
    sd = np.array(sd)
    pos = qs > 0.0
    if np.count_nonzero(pos) >= 2:
        x, y = np.log(qs[pos]), np.log(np.maximum(sd[pos], 1e-300))
        slope, icpt = np.polyfit(x, y, 1)
        resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
        C = float(np.max(sd[pos] / qs[pos]))
    else:
        slope, resid, C = float("nan"), float("nan"), float("nan")
    return QConvergenceReport(qs, sd, np.array(hd), np.array(its), C, float(slope), resid)


@dataclass(frozen=True)
class ELReport:
    lambda_estimate: float
    residuals: np.ndarray  # NaN at excluded and floor vertices
    excluded: np.ndarray  # vertices inside the contact bands
    residual_std: float
    residual_std_over_lambda: float
    residual_std_over_mean_curvature: float
    converged: bool = True


def el_residual(P: HalfPlanePolygon, cfg: SolverConfig, converged: bool = True) -> ELReport:
    """Euler-Lagrange residual κ_i − 2π q² f_i² at free vertices.

    λ is the median residual.  Vertices within contact_band·diam of a
    contact point are excluded since the density is singular there.
    """
    if not converged:
        warnings.warn("el_residual called on a non-converged shape", RuntimeWarning, stacklevel=2)
    s = cfg.sessile
    v = P.vertices
    kappa = discrete_curvature(P)
    r = kappa.copy()
    if s.q > 0.0:
        mesh = build_mesh(P, s.n_panels)
        w, _ = solve_augmented(assemble_kernel(mesh))
        f = _vertex_densities(mesh, w)
        r = r - 2.0 * math.pi * s.q ** 2 * f * f
    excluded = np.zeros(P.n, dtype=bool)
    run = P.floor_run
    if run is not None:
        band = cfg.contact_band * P.diam
        for c in (v[run[0]], v[run[1]]):
            excluded |= np.hypot(*(v - c).T) <= band
    keep = ~excluded & ~P.floor_mask
    r = np.where(keep, r, np.nan)
    vals = r[keep]
    lam = float(np.median(vals))
    std = float(np.std(vals))
    mean_k = float(np.mean(kappa[keep]))
    return ELReport(
        lam,
        r,
        excluded,
        std,
        std / abs(lam) if lam else float("inf"),
        std / abs(mean_k) if mean_k else float("inf"),
        converged,
    )


@dataclass(frozen=True)
class LambdaMinReport:
    worst_margin: float
    worst_family: str
    n_evaluated: int
    n_failed: int
    by_family: dict
    penalty: float

    @property
    def violated(self) -> bool:
        return self.worst_margin < 0.0


def _smooth_energy(P: HalfPlanePolygon, s: SessileConfig) -> float:
    e = total_energy(P, s)
    return e.p_beta + (s.q ** 2 * e.i2 if e.i2 is not None else 0.0)


def competitor_margin(E: HalfPlanePolygon, F: HalfPlanePolygon, s: SessileConfig, base: float | None = None) -> float:
    """F(F) + Λ|E Δ F| − F(E); negative means F beats E at penalty Λ."""
    if base is None:
        base = _smooth_energy(E, s)
    return _smooth_energy(F, s) + s.penalty * symdiff_area(E, F) - base


def _free_boundary_point(P: HalfPlanePolygon, rng: np.random.Generator) -> np.ndarray:
    v = P.vertices
    free_edges = np.nonzero(~P.floor_edge_mask)[0]
    if rng.random() < 0.3:
        # vertices, weighted by turning angle so sharp corners are probed
        cand = np.nonzero(~P.floor_mask)[0]
        wt = np.abs(turning_angles(P)[cand]) + 1e-12
        return v[rng.choice(cand, p=wt / wt.sum())]
    L = P.edge_lengths[free_edges]
    e = rng.choice(free_edges, p=L / L.sum())
    t = rng.uniform(0.05, 0.95)
    return v[e] + t * (v[(e + 1) % P.n] - v[e])


def lambda_min_check(P: HalfPlanePolygon, cfg: SolverConfig, n_samples: int = 200, seed: int | None = None) -> LambdaMinReport:
    """Search for competitors violating Λ-minimality of P.

    Families: cuts at random free-boundary points (30% at vertices, drawn
    with probability proportional to their turning angle) with
    ε ∈ [0.01, 0.3]·diam, tangent fills between free vertices 2 to 8 apart,
    dilations by λ ∈ [0.9, 1.1] about the contact midpoint, and horizontal
    slides by up to 0.1·diam.  Construction failures are skipped and counted.
    """
    if n_samples < 10:
        raise PreconditionError("n_samples must be at least 10")
    s = cfg.sessile
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    base = _smooth_energy(P, s)
    quota = {
        "cut": n_samples - 3 * (n_samples // 5),
        "fill": n_samples // 5,
        "dilation": n_samples // 5,
        "slide": n_samples // 5,
    }
    margins: dict[str, list[float]] = {k: [] for k in quota}
    failed = 0
    free_idx = np.nonzero(~P.floor_mask)[0]
    run = P.floor_run
    cx = 0.0 if run is None else 0.5 * float(P.vertices[run[0], 0] + P.vertices[run[1], 0])
    for fam, want in quota.items():
        attempts = 0
        while len(margins[fam]) < want and attempts < 20 * want:
            attempts += 1
            try:
                if fam == "cut":
                    x = _free_boundary_point(P, rng)
                    eps = P.diam * 10.0 ** rng.uniform(-2.0, math.log10(0.3))
                    F = cut_competitor(P, x, eps).polygon
                elif fam == "fill":
                    k = int(rng.integers(2, 9))
                    i = int(rng.choice(free_idx))
                    j = (i + k) % P.n
                    if P.floor_mask[j] or np.any(P.floor_mask[(i + np.arange(k + 1)) % P.n]):
                        raise PreconditionError("fill arc touches the floor")
                    F = tangent_fill_competitor(P, P.vertices[i], P.vertices[j])
                elif fam == "dilation":
                    F = P.scaled(rng.uniform(0.9, 1.1), origin=(cx, 0.0))
                else:
                    F = P.translated((rng.uniform(-0.1, 0.1) * P.diam, 0.0))
                margins[fam].append(competitor_margin(P, F, s, base))
            except (PreconditionError, ValueError):
                failed += 1
    worst = {k: (min(m) if m else float("inf")) for k, m in margins.items()}
    fam = min(worst, key=worst.get)
    n_eval = sum(len(m) for m in margins.values())
    return LambdaMinReport(worst[fam], fam, n_eval, failed, worst, s.penalty)


def perturbed_shape(P: HalfPlanePolygon, amount: float = 0.1) -> HalfPlanePolygon:
    """Push the topmost vertex outward by amount·diam and re-convexify (an off-optimal fixture)."""
    v = P.vertices.copy()
    i = int(np.argmax(v[:, 1]))
    v[i] += amount * P.diam * _vertex_normals(v)[i]
    return convex_project(v)


@dataclass(frozen=True)
class StructureReport:
    longest_collinear_run_edges: int
    longest_collinear_run_length: float
    run_over_diam: float
    mean_free_edge: float
    wetted_length: float
    curvature_hist: tuple
    min_positive_curvature: float
    note: str = (
        "local coincidence with the tangent cone is not decidable below mesh scale; "
        "corner angles are reported, not classified"
    )


def structure_checks(P: HalfPlanePolygon, cfg: SolverConfig, collinear_tol: float = 1e-4) -> StructureReport:
    """Collinear runs, contact length and curvature gap of a converged shape."""
    turn = turning_angles(P)
    free_e = ~P.floor_edge_mask
    L = P.edge_lengths
    n = P.n
    best_k, best_len = 0, 0.0
    # walk free edges; a run continues across a vertex with negligible turning
    for start in range(n):
        if not free_e[start] or (free_e[start - 1] and abs(turn[start]) < collinear_tol):
            continue
        k, length, e = 1, L[start], start
        while k < n:
            nxt = (e + 1) % n
            if not free_e[nxt] or abs(turn[nxt]) >= collinear_tol:
                break
            e = nxt
            k += 1
            length += L[e]
        if k > best_k or (k == best_k and length > best_len):
            best_k, best_len = k, length
    kappa = discrete_curvature(P)
    pos = kappa[np.isfinite(kappa) & (kappa > 0.0)]
    hist = np.histogram(pos, bins=10) if len(pos) else (np.zeros(0), np.zeros(0))
    _, contact = boundary_measures(P)
    return StructureReport(
        best_k,
        float(best_len),
        float(best_len / P.diam),
        float(L[free_e].mean()),
        contact.wetted_length,
        (hist[0].tolist(), hist[1].tolist()),
        float(pos.min()) if len(pos) else 0.0,
    )


def mesh_tolerance(P: HalfPlanePolygon) -> float:
    """Sagitta scale h²/diam of the longest free edge: the geometric resolution of P."""
    h = float(P.edge_lengths[~P.floor_edge_mask].max())
    return h * h / P.diam


def summary(P: HalfPlanePolygon, trace: OptimTrace, cfg: SolverConfig) -> dict:
    s = cfg.sessile
    e = total_energy(P, s)
    g1, g2 = _angles(P, cfg)
    out = dict(
        energy=e.to_dict(),
        area=P.area,
        n_vertices=P.n,
        iterations=len(trace),
        converged=trace.converged,
        reason=trace.reason,
        gamma1=g1,
        gamma2=g2,
        cos_gamma=math.cos(0.5 * (g1 + g2)) if math.isfinite(g1) else None,
        hausdorff_to_bbeta=hausdorff_to_bbeta(P, s.beta, s.target_area),
        symdiff_to_bbeta=symdiff_to_bbeta(P, s.beta, s.target_area),
        fraenkel_asymmetry=fraenkel_asymmetry(P, s.beta),
    )
    return out
