"""Command-line entry point: energy, minimize, sweep, verify, slab.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 solver error,
4 optimizer stagnation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .capillarity import SessileConfig, slab_family_energy, total_energy
from .errors import (
    ChargeDropError,
    MeshError,
    OracleConvergenceError,
    SolverError,
    StagnationError,
)
from .geometry2d import format_polygon_csv, read_polygon_csv
from .optimizer import (
    SolverConfig,
    minimize,
    q_convergence,
    rows_to_csv,
    summary,
    young_sweep,
)
from .shapes import unit_square

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER, EXIT_STAGNATION = 0, 1, 2, 3, 4

DEFAULTS = {
    "beta": 0.0,
    "q": 0.0,
    "lambda": None,
    "n_panels": 1024,
    "n_shape_vertices": 96,
    "fd_step": None,
    "step_size": 0.05,
    "max_iters": 500,
    "tol_energy": 1e-7,
    "remesh_every": 10,
    "contact_band": 0.05,
    "seed": 0,
    "allow_degenerate_beta": False,
    "beta_list": [0.0],
    "q_list": [0.0],
    "R_list": [1.0, 2.0, 4.0, 8.0, 16.0],
    "sweep": "young",
}

# flag dest -> config key
FLAG_KEYS = {
    "beta": "beta",
    "q": "q",
    "lam": "lambda",
    "panels": "n_panels",
    "vertices": "n_shape_vertices",
    "seed": "seed",
    "max_iters": "max_iters",
    "allow_degenerate_beta": "allow_degenerate_beta",
    "betas": "beta_list",
    "qs": "q_list",
    "R": "R_list",
    "sweep": "sweep",
}


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    values: dict

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        vals = dict(DEFAULTS)
        if getattr(args, "config", None):
            try:
                loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read config {args.config}: {exc}") from None
            if not isinstance(loaded, dict):
                raise InputError("config file must hold a JSON object")
            unknown = sorted(set(loaded) - set(DEFAULTS))
            if unknown:
                raise InputError(f"unknown config keys: {', '.join(unknown)}")
            vals.update(loaded)
        for dest, key in FLAG_KEYS.items():
            v = getattr(args, dest, None)
            if v is not None and v is not False:
                vals[key] = v
        return cls(vals)

    def sessile(self, **over) -> SessileConfig:
        v = {**self.values, **over}
        return SessileConfig(
            beta=float(v["beta"]),
            q=float(v["q"]),
            lam=None if v["lambda"] is None else float(v["lambda"]),
            n_panels=int(v["n_panels"]),
            allow_degenerate_beta=bool(v["allow_degenerate_beta"]),
        )

    def solver(self) -> SolverConfig:
        v = self.values
        return SolverConfig(
            sessile=self.sessile(),
            n_shape_vertices=int(v["n_shape_vertices"]),
            fd_step=None if v["fd_step"] is None else float(v["fd_step"]),
            step_size=float(v["step_size"]),
            max_iters=int(v["max_iters"]),
            tol_energy=float(v["tol_energy"]),
            remesh_every=int(v["remesh_every"]),
            contact_band=float(v["contact_band"]),
            seed=int(v["seed"]),
        )

    def dump(self) -> str:
        return json.dumps(self.values, indent=2, sort_keys=True) + "\n"


def _out_dir(args) -> Path | None:
    if not getattr(args, "out", None):
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        (out / name).write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


# --------------------------------------------------------------------------
# commands


def cmd_energy(args) -> int:
    rc = RunConfig.from_args(args)
    out = _out_dir(args)
    P = read_polygon_csv(args.shape)
    e = total_energy(P, rc.sessile())
    text = e.to_json() + "\n"
    sys.stdout.write(text)
    _write(out, "energy.json", text)
    _write(out, "config.json", rc.dump())
    return EXIT_OK


def cmd_minimize(args) -> int:
    rc = RunConfig.from_args(args)
    cfg = rc.solver()
    out = _out_dir(args)
    _write(out, "config.json", rc.dump())
    init = read_polygon_csv(args.init) if args.init else unit_square()
    try:
        P, trace = minimize(init, cfg)
    except StagnationError as exc:
        if exc.trace is not None:
            _write(out, "trace.csv", exc.trace.to_csv())
        if exc.shape is not None:
            _write(out, "shape.csv", format_polygon_csv(exc.shape))
        raise
    summ = summary(P, trace, cfg)
    _write(out, "shape.csv", format_polygon_csv(P))
    _write(out, "trace.csv", trace.to_csv())
    _write(out, "summary.json", _json(summ))
    sys.stdout.write(_json(summ))
    return EXIT_OK


def cmd_sweep(args) -> int:
    rc = RunConfig.from_args(args)
    cfg = rc.solver()
    out = _out_dir(args)
    _write(out, "config.json", rc.dump())
    v = rc.values
    qs = [float(q) for q in v["q_list"]]
    if v["sweep"] == "young":
        text = rows_to_csv(young_sweep([float(b) for b in v["beta_list"]], qs, cfg))
        _write(out, "sweep.csv", text)
    elif v["sweep"] == "qconv":
        rep = q_convergence(float(v["beta"]), qs, cfg)
        text = rows_to_csv(rep.rows(), ["q", "symdiff", "hausdorff", "iters"])
        _write(out, "qconv.csv", text)
        _write(out, "qconv.json", _json(dict(constant=rep.constant, exponent=rep.exponent, fit_residual=rep.fit_residual)))
    else:
        raise InputError(f"unknown sweep kind {v['sweep']!r} (young or qconv)")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_slab(args) -> int:
    rc = RunConfig.from_args(args)
    out = _out_dir(args)
    s = rc.sessile()
    rows = []
    for R in rc.values["R_list"]:
        e = slab_family_energy(float(R), s)
        rows.append(dict(R=float(R), p_beta=e.p_beta, i2=e.i2, total=e.total))
    text = rows_to_csv(rows, ["R", "p_beta", "i2", "total"])
    sys.stdout.write(text)
    _write(out, "slab.csv", text)
    _write(out, "config.json", rc.dump())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    rc = RunConfig.from_args(args)
    out = _out_dir(args)
    results = run_checks(args.level)
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: expected {r.expected}, actual {r.actual}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _write(out, "verify.txt", text)
    _write(out, "config.json", rc.dump())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--beta", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--lambda", dest="lam", type=float, help="volume-penalty weight")
    p.add_argument("--panels", type=int, help="boundary panels for the potential solve")
    p.add_argument("--vertices", type=int, help="shape vertices for the optimizer")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--allow-degenerate-beta", action="store_true", help="permit |beta| = 1 (slab demo)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chargedrop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", help="energy breakdown of a polygon CSV")
    p.add_argument("shape")
    _common(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("minimize", help="minimize the energy from an initial shape")
    p.add_argument("--init", help="initial polygon CSV (default: unit square)")
    p.add_argument("--max-iters", type=int)
    _common(p)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("sweep", help="Young's-law sweep or charge-convergence table")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--qs", type=float, nargs="+")
    p.add_argument("--sweep", choices=["young", "qconv"])
    p.add_argument("--max-iters", type=int)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the built-in verification checks")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("slab", help="energies of the unit-area slab family")
    p.add_argument("--R", type=float, nargs="+")
    _common(p)
    p.set_defaults(func=cmd_slab)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except StagnationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGNATION
    except (SolverError, MeshError, OracleConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InputError, ChargeDropError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
