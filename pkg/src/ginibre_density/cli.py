"""Batch front end: predict / simulate / compare / boundary / rate / diagnose.

Every run writes its artifacts plus a manifest.json holding the fully
resolved configuration; re-running with --from-manifest reproduces the CSV
outputs byte for byte. Exit codes: 0 success, 2 configuration error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .density import predict_field
from .diagnostics import DiagnosticsParams, check_conditions, decay_rates
from .ensembles import EnsembleSpec, build_deformation
from .errors import GinibreDensityError
from .grids import FLOAT_FMT, DensityField, GridSpec
from .montecarlo import (
    McConfig,
    RadialBump,
    empirical_density,
    rate_experiment,
)
from .spectral import domain_verdict, trace_boundary

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    """Bad or missing configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    """Fully resolved options for one subcommand invocation."""

    subcommand: str
    out: str
    ensemble: str = "zero"
    n: int = 64
    atoms: str = ""
    eigenvalue: str = "0"
    ensemble_seed: int = 0
    matrix_file: str = ""
    window: tuple | None = None
    res: int = 0
    mode: str = "limit"
    eps: str = "auto"
    eps_ladder: str = ""
    samples: int = 50
    seed: int = 0
    workers: int = 0          # 0 -> all available cores
    n_ladder: str = "64,128,256,512"
    bump_radius: float = 0.8
    bump_power: int = 4
    bump_center: str = "0"
    probe_window: tuple | None = None
    probe_res: int = 21
    boundary_tol: float = 1e-8
    c3_eps: float = 0.2
    c4_eps0: float = 0.2
    c4_rho0: float = 0.1
    c5_kappa: float = 0.25
    extras: dict = field(default_factory=dict)

    def as_manifest(self) -> dict:
        d = asdict(self)
        d.pop("extras")
        d["window"] = list(self.window) if self.window else None
        d["probe_window"] = list(self.probe_window) if self.probe_window else None
        return {"tool": "ginibre-density", "version": __version__,
                "subcommand": self.subcommand, "params": d}


# -- option plumbing -----------------------------------------------------------

_FIELDS = {f for f in RunConfig.__dataclass_fields__} - {"subcommand", "extras"}


def _add_options(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI config file ([common] plus per-subcommand sections)")
    p.add_argument("--from-manifest", help="re-run from a manifest.json (flags other than --out ignored)")
    p.add_argument("--out", help="output directory (fallback: $GDL_OUTPUT_DIR)")
    p.add_argument("--ensemble", choices=("zero", "diagonal", "jordan", "wigner", "ginibre", "file"))
    p.add_argument("--n", type=int)
    p.add_argument("--atoms", help="diagonal atoms, e.g. '1*2,-1*2' (complex*multiplicity)")
    p.add_argument("--eigenvalue", help="jordan cell eigenvalue (complex literal)")
    p.add_argument("--ensemble-seed", type=int, dest="ensemble_seed")
    p.add_argument("--matrix-file", dest="matrix_file")
    p.add_argument("--window", nargs=4, type=float, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p.add_argument("--res", type=int, help="nodes per axis")
    p.add_argument("--mode", choices=("limit", "eps"))
    p.add_argument("--eps", help="'auto' (= n^-1/2) or a positive float")
    p.add_argument("--eps-ladder", dest="eps_ladder", help="comma list of eps values (predict only)")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--n-ladder", dest="n_ladder", help="comma list of sizes")
    p.add_argument("--bump-radius", type=float, dest="bump_radius")
    p.add_argument("--bump-power", type=int, dest="bump_power")
    p.add_argument("--bump-center", dest="bump_center")
    p.add_argument("--probe-window", nargs=4, type=float, dest="probe_window")
    p.add_argument("--probe-res", type=int, dest="probe_res")
    p.add_argument("--boundary-tol", type=float, dest="boundary_tol")
    p.add_argument("--c3-eps", type=float, dest="c3_eps")
    p.add_argument("--c4-eps0", type=float, dest="c4_eps0")
    p.add_argument("--c4-rho0", type=float, dest="c4_rho0")
    p.add_argument("--c5-kappa", type=float, dest="c5_kappa")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginibre-density",
        description="Predicted and Monte Carlo spectral densities of deformed Ginibre matrices")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, desc in (
        ("predict", "evaluate the predicted density on a grid"),
        ("simulate", "Monte Carlo empirical density on a grid"),
        ("compare", "prediction vs Monte Carlo field distances"),
        ("boundary", "trace the support-region boundary curve"),
        ("rate", "n^{-1/2} convergence-rate experiment"),
        ("diagnose", "measure the convergence-condition quantities"),
    ):
        _add_options(sub.add_parser(name, help=desc))
    return parser


def _coerce(name: str, raw):
    kind = RunConfig.__dataclass_fields__[name].type
    if raw is None:
        return None
    if name in ("window", "probe_window"):
        if isinstance(raw, str):
            raw = raw.replace(",", " ").split()
        vals = tuple(float(v) for v in raw)
        if len(vals) != 4:
            raise ConfigError(f"{name} needs 4 numbers, got {raw!r}")
        return vals
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return str(raw)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    sub = args.subcommand
    resolved: dict = {}

    if getattr(args, "from_manifest", None):
        manifest = json.loads(Path(args.from_manifest).read_text())
        params = dict(manifest.get("params", {}))
        sub = manifest.get("subcommand", sub)
        params.pop("subcommand", None)
        for key, val in params.items():
            if key in _FIELDS and val is not None:
                resolved[key] = _coerce(key, val)
    else:
        if getattr(args, "config", None):
            ini = configparser.ConfigParser()
            if not ini.read(args.config):
                raise ConfigError(f"config file not found: {args.config}")
            for section in ("common", sub):
                if ini.has_section(section):
                    for key, val in ini.items(section):
                        key = key.replace("-", "_")
                        if key not in _FIELDS:
                            raise ConfigError(f"unknown config key {key!r} in [{section}]")
                        resolved[key] = _coerce(key, val)
        for key in _FIELDS:
            val = getattr(args, key, None)
            if val is not None:
                resolved[key] = _coerce(key, val)

    if getattr(args, "out", None):
        resolved["out"] = args.out
    if "out" not in resolved or not resolved["out"]:
        env = os.environ.get("GDL_OUTPUT_DIR")
        if not env:
            raise ConfigError("missing required option: --out (or $GDL_OUTPUT_DIR)")
        resolved["out"] = env
    return RunConfig(subcommand=sub, **resolved)


# -- resolved-value helpers ------------------------------------------------------


def _parse_complex(text: str, what: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"bad complex literal for {what}: {text!r}") from exc


def ensemble_spec(cfg: RunConfig) -> EnsembleSpec:
    kind = cfg.ensemble
    try:
        if kind == "diagonal":
            if not cfg.atoms:
                raise ConfigError("missing required option: --atoms")
            atoms, mults = [], []
            for part in cfg.atoms.split(","):
                val, _, mult = part.partition("*")
                atoms.append(_parse_complex(val, "--atoms"))
                mults.append(int(mult) if mult else 1)
            return EnsembleSpec(kind=kind, n=cfg.n, atoms=tuple(atoms),
                                multiplicities=tuple(mults))
        if kind == "jordan":
            return EnsembleSpec(kind=kind, n=cfg.n,
                                eigenvalue=_parse_complex(cfg.eigenvalue, "--eigenvalue"))
        if kind in ("wigner", "ginibre"):
            return EnsembleSpec(kind=kind, n=cfg.n, seed=cfg.ensemble_seed)
        if kind == "file":
            if not cfg.matrix_file:
                raise ConfigError("missing required option: --matrix-file")
            return EnsembleSpec(kind=kind, n=cfg.n, path=cfg.matrix_file)
        return EnsembleSpec(kind="zero", n=cfg.n)
    except GinibreDensityError as exc:
        raise ConfigError(str(exc)) from exc


def grid_spec(cfg: RunConfig) -> GridSpec:
    if cfg.window is None:
        raise ConfigError("missing required option: --window")
    if cfg.res < 8:
        raise ConfigError("missing or too-small option: --res (need >= 8 nodes per axis)")
    try:
        return GridSpec(cfg.window, cfg.res, cfg.res)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolved_eps(cfg: RunConfig) -> float:
    if cfg.eps == "auto" or cfg.eps == "":
        return cfg.n ** -0.5
    try:
        val = float(cfg.eps)
    except ValueError as exc:
        raise ConfigError(f"--eps must be 'auto' or a float, got {cfg.eps!r}") from exc
    if val <= 0:
        raise ConfigError("--eps must be positive")
    return val


def _workers(cfg: RunConfig) -> int:
    return cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)


def _ladder(text: str, what: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {what}: {text!r}") from exc
    if not vals:
        raise ConfigError(f"empty {what}")
    return vals


def _write_atomic(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict):
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit_field(outdir: Path, stem: str, fld: DensityField, cfg: RunConfig, **extra):
    csv_path = outdir / f"{stem}.csv"
    fld.to_csv(csv_path.with_name(csv_path.name + ".tmp"))
    os.replace(csv_path.with_name(csv_path.name + ".tmp"), csv_path)
    _write_json(outdir / f"{stem}.json",
                fld.sidecar(n=cfg.n, ensemble=cfg.ensemble, code_version=__version__,
                            tolerances={"saddle_residual": 1e-10,
                                        "boundary_tol": cfg.boundary_tol},
                            **extra))


# -- subcommands -----------------------------------------------------------------


def cmd_predict(cfg: RunConfig) -> int:
    a = build_deformation(ensemble_spec(cfg))
    grid = grid_spec(cfg)
    workers = _workers(cfg)
    if cfg.mode == "eps" and cfg.eps_ladder:
        values = [float(v) for v in cfg.eps_ladder.split(",") if v.strip()]
        if not values or any(v <= 0 for v in values):
            raise ConfigError(f"bad --eps-ladder: {cfg.eps_ladder!r}")
        for k, eps in enumerate(values):
            fld = predict_field(a, grid, mode="eps", eps=eps, workers=workers)
            _emit_field(Path(cfg.out), f"field_eps{k}", fld, cfg)
        return EXIT_OK
    if cfg.mode == "eps":
        fld = predict_field(a, grid, mode="eps", eps=resolved_eps(cfg), workers=workers)
    else:
        fld = predict_field(a, grid, mode="limit", workers=workers)
    _emit_field(Path(cfg.out), "field", fld, cfg)
    return EXIT_OK


def _mc_config(cfg: RunConfig) -> McConfig:
    return McConfig(n=cfg.n, samples=cfg.samples, grid=grid_spec(cfg),
                    eps=resolved_eps(cfg), seed=cfg.seed, workers=_workers(cfg))


def cmd_simulate(cfg: RunConfig) -> int:
    a = build_deformation(ensemble_spec(cfg))
    fld = empirical_density(a, _mc_config(cfg))
    _emit_field(Path(cfg.out), "field", fld, cfg)
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    a = build_deformation(ensemble_spec(cfg))
    mc = _mc_config(cfg)
    emp = empirical_density(a, mc)
    pred = predict_field(a, emp.grid, mode="eps", eps=mc.resolved_eps,
                         workers=_workers(cfg))
    diff = np.abs(emp.values - pred.values)
    cell = emp.grid.h ** 2
    in_d = np.zeros_like(diff, dtype=bool)
    zs = emp.grid.nodes()
    for iy in range(emp.grid.ny):
        for ix in range(emp.grid.nx):
            in_d[iy, ix] = domain_verdict(a, complex(zs[iy, ix])).in_D
    cap_bound = 1.05 / (math.pi * mc.resolved_eps ** 2)
    report = {
        "eps": mc.resolved_eps, "samples": cfg.samples, "n": cfg.n,
        "l1": float(diff.sum() * cell),
        "linf": float(diff.max()),
        "predicted_mass": pred.mass(),
        "empirical_mass": emp.mass(),
        "l1_over_predicted_mass": float(diff.sum() * cell / pred.mass()),
        "regions": {
            "inside_D": {"nodes": int(in_d.sum()),
                         "l1": float(diff[in_d].sum() * cell),
                         "linf": float(diff[in_d].max()) if in_d.any() else 0.0},
            "outside_D": {"nodes": int((~in_d).sum()),
                          "l1": float(diff[~in_d].sum() * cell),
                          "linf": float(diff[~in_d].max()) if (~in_d).any() else 0.0},
        },
        "cap": {"max_empirical": float(emp.values.max()),
                "bound": cap_bound,
                "ok": bool(emp.values.max() <= cap_bound)},
    }
    outdir = Path(cfg.out)
    _emit_field(outdir, "emp_field", emp, cfg)
    _emit_field(outdir, "pred_field", pred, cfg)
    _write_json(outdir / "compare.json", report)
    return EXIT_OK


def cmd_boundary(cfg: RunConfig) -> int:
    a = build_deformation(ensemble_spec(cfg))
    if cfg.window is None:
        raise ConfigError("missing required option: --window")
    if cfg.res < 16:
        raise ConfigError("missing or too-small option: --res (need >= 16 cells)")
    poly = trace_boundary(a, cfg.window, cfg.res, boundary_tol=cfg.boundary_tol)
    outdir = Path(cfg.out)
    tmp = outdir / "boundary.csv.tmp"
    poly.to_csv(tmp)
    os.replace(tmp, outdir / "boundary.csv")
    _write_json(outdir / "boundary.json", poly.metadata())
    return EXIT_OK


def cmd_rate(cfg: RunConfig) -> int:
    spec = ensemble_spec(cfg)
    bump = RadialBump(center=_parse_complex(cfg.bump_center, "--bump-center"),
                      radius=cfg.bump_radius, power=cfg.bump_power)
    ladder = _ladder(cfg.n_ladder, "--n-ladder")
    eps = None if cfg.eps in ("auto", "") else float(cfg.eps)
    mc = McConfig(n=ladder[0], samples=cfg.samples, grid=grid_spec(cfg),
                  eps=eps, seed=cfg.seed, workers=_workers(cfg))
    table = rate_experiment(spec, bump, ladder, mc)
    lines = ["n,error,std_error,slope_running"]
    for row in table.rows:
        lines.append(f"{row.n},{row.error:{FLOAT_FMT}},{row.std_error:{FLOAT_FMT}},"
                     f"{row.slope_running:{FLOAT_FMT}}")
    outdir = Path(cfg.out)
    _write_atomic(outdir / "rate.csv", "\n".join(lines) + "\n")
    _write_json(outdir / "rate.json",
                {"slope": table.slope, "h_id": table.h_id,
                 "references": list(table.references),
                 "estimates": list(table.estimates),
                 "n_ladder": ladder, "samples": cfg.samples,
                 "eps_policy": cfg.eps or "auto"})
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig) -> int:
    spec = ensemble_spec(cfg)
    ladder = _ladder(cfg.n_ladder, "--n-ladder")
    if len(ladder) < 2:
        raise ConfigError("--n-ladder needs at least two sizes")
    window = cfg.probe_window or cfg.window
    if window is None:
        raise ConfigError("missing required option: --probe-window")
    probes = GridSpec(window, cfg.probe_res, cfg.probe_res)
    params = DiagnosticsParams(eps=cfg.c3_eps, eps0=cfg.c4_eps0,
                               rho0=cfg.c4_rho0, kappa=cfg.c5_kappa)
    reports = check_conditions(spec, ladder, probes, params)
    rates = decay_rates(reports)
    lines = ["n,c2_norm,c3_sup,c4_inf,c5_sup"]
    for r in reports:
        lines.append(f"{r.n},{r.c2_norm:{FLOAT_FMT}},{r.c3_sup:{FLOAT_FMT}},"
                     f"{r.c4_inf:{FLOAT_FMT}},{r.c5_sup:{FLOAT_FMT}}")
    outdir = Path(cfg.out)
    _write_atomic(outdir / "conditions.csv", "\n".join(lines) + "\n")
    _write_json(outdir / "conditions.json",
                {"reports": [asdict(r) for r in reports], "decay_rates": rates})
    return EXIT_OK


_COMMANDS = {
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "boundary": cmd_boundary,
    "rate": cmd_rate,
    "diagnose": cmd_diagnose,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        code = _COMMANDS[cfg.subcommand](cfg)
        _write_json(outdir / "manifest.json", cfg.as_manifest())
        return code
    except (ConfigError, ValueError) as exc:
        print(f"ginibre-density: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GinibreDensityError as exc:
        print(f"ginibre-density: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as exc:  # never a raw traceback exit
        print(f"ginibre-density: numeric failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
