"""Command-line harness: validated JSON configs in, hashed artifact dirs out.

One run owns one artifact directory holding the resolved config, every CSV
and snapshot it produced, and a manifest of content hashes.  Identical
config and seed reproduce identical CSV bytes because every CSV cell is
rounded to 12 significant digits on the way out.

Exit codes: 0 success, 2 config error (message names the offending field),
3 numerical failure (partial artifacts retained).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .evolution import (
    EvolutionConfig,
    evolve,
    snapshot_writer,
    write_timeseries,
)
from .fields import gaussian_field, rescale_mass, smooth_random_field
from .functionals import FunctionalReport, dilated, galilean_boost
from .grid import Field3D, GridSpec, make_grid, read_snapshot
from .ground_state import (
    SolverOptions,
    load_ground_state,
    minimize_weinstein,
    save_ground_state,
)
from .kernel import DipoleParams, Regime, classify_regime
from .threshold import CurveOptions, build_curve, mass_raise, write_curve
from .virial import (
    localized_weight,
    quadratic_weight,
    radius_covering_mass,
    virial_series,
    write_virial_series,
)

COMMANDS = ("GroundState", "ThresholdCurve", "Evolve", "Virial", "Verify")
_CLI_TO_COMMAND = {
    "ground-state": "GroundState",
    "threshold-curve": "ThresholdCurve",
    "evolve": "Evolve",
    "virial": "Virial",
    "verify": "Verify",
}


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NumericalFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# config loading, overrides, validation


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return doc


def _parse_override_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(doc: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError("override", f"expected key=value, got {assignment!r}")
    dotted, raw = assignment.split("=", 1)
    keys = dotted.split(".")
    node = doc
    for k in keys[:-1]:
        nxt = node.get(k)
        if nxt is None:
            nxt = {}
            node[k] = nxt
        if not isinstance(nxt, dict):
            raise ConfigError(dotted, "path passes through a non-object value")
        node = nxt
    node[keys[-1]] = _parse_override_value(raw)


def _require(params: dict, field: str, kinds, where: str):
    if field not in params:
        raise ConfigError(f"{where}.{field}", "missing required field")
    val = params[field]
    if not isinstance(val, kinds):
        raise ConfigError(f"{where}.{field}",
                          f"expected {getattr(kinds, '__name__', kinds)}, got {type(val).__name__}")
    return val


def _optional(params: dict, field: str, kinds, default, where: str):
    if field not in params or params[field] is None:
        return default
    val = params[field]
    if kinds is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, kinds):
        raise ConfigError(f"{where}.{field}",
                          f"expected {getattr(kinds, '__name__', kinds)}, got {type(val).__name__}")
    return val


_NUM = (int, float)


def _grid_from(params: dict, where: str) -> GridSpec:
    g = _require(params, "grid", dict, where)
    n = _require(g, "n", int, f"{where}.grid")
    box = _require(g, "box", _NUM, f"{where}.grid")
    try:
        return make_grid(n, float(box))
    except ValueError as exc:
        raise ConfigError(f"{where}.grid", str(exc)) from exc


def _params_from(params: dict, where: str) -> DipoleParams:
    lam1 = _require(params, "lam1", _NUM, where)
    lam2 = _require(params, "lam2", _NUM, where)
    return DipoleParams(float(lam1), float(lam2))


def _dataclass_overrides(cls, doc: dict, where: str):
    import dataclasses

    fields = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for k, v in doc.items():
        if k not in fields:
            raise ConfigError(f"{where}.{k}", "unknown option")
        kwargs[k] = v
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# initial-condition descriptors


def init_field(desc: dict, grid: Optional[GridSpec], seed: int,
               p: DipoleParams, where: str = "parameters.init") -> Field3D:
    """Realize an initial-condition descriptor.

    Descriptor types: gaussian (widths, amplitude, offset, boost), random
    (seeded band-limited noise), snapshot (binary field file), ground_state
    (saved solver output), dilated (wraps another descriptor with the
    mass-preserving u^s rescale), mass_raise (wraps an I = 0 descriptor to
    a larger mass).  Any descriptor may carry trailing "boost" and
    "rescale_mass" keys, applied in that order.
    """
    if not isinstance(desc, dict):
        raise ConfigError(where, "descriptor must be an object")
    kind = _require(desc, "type", str, where)
    known = {"gaussian", "random", "snapshot", "ground_state", "dilated", "mass_raise"}
    if kind not in known:
        raise ConfigError(f"{where}.type", f"unknown type {kind!r}; expected one of {sorted(known)}")

    if kind == "gaussian":
        if grid is None:
            raise ConfigError(f"{where}", "gaussian descriptor needs parameters.grid")
        widths = _require(desc, "widths", list, where)
        if len(widths) != 3:
            raise ConfigError(f"{where}.widths", "expected three per-axis widths")
        amp = _optional(desc, "amplitude", _NUM, 1.0, where)
        offset = _optional(desc, "offset", list, [0.0, 0.0, 0.0], where)
        boost = _optional(desc, "boost", list, [0.0, 0.0, 0.0], where)
        fld = gaussian_field(grid, widths=tuple(float(w) for w in widths),
                             amplitude=float(amp),
                             center=tuple(float(c) for c in offset),
                             boost=tuple(float(b) for b in boost))
    elif kind == "random":
        if grid is None:
            raise ConfigError(f"{where}", "random descriptor needs parameters.grid")
        sub_seed = _optional(desc, "seed", int, seed, where)
        corr = _optional(desc, "corr_length", _NUM, grid.box_length / 9.0, where)
        env = _optional(desc, "envelope_width", _NUM, grid.box_length / 7.0, where)
        amp = _optional(desc, "amplitude", _NUM, 1.0, where)
        cplx = _optional(desc, "complex", bool, False, where)
        fld = smooth_random_field(grid, seed=sub_seed, corr_length=float(corr),
                                  envelope_width=float(env), amplitude=float(amp),
                                  complex_valued=cplx)
    elif kind == "snapshot":
        path = _require(desc, "path", str, where)
        try:
            fld, _t = read_snapshot(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"{where}.path", str(exc)) from exc
        if grid is not None and fld.grid != grid:
            raise ConfigError(
                f"{where}.path",
                f"snapshot grid (n={fld.grid.n_points_per_axis}, "
                f"box={fld.grid.box_length}) does not match configured grid "
                f"(n={grid.n_points_per_axis}, box={grid.box_length})")
    elif kind == "ground_state":
        path = _require(desc, "path", str, where)
        try:
            gs = load_ground_state(path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"{where}.path", str(exc)) from exc
        fld = gs.field
        if grid is not None and fld.grid != grid:
            raise ConfigError(
                f"{where}.path",
                f"ground-state grid (n={fld.grid.n_points_per_axis}, "
                f"box={fld.grid.box_length}) does not match configured grid "
                f"(n={grid.n_points_per_axis}, box={grid.box_length})")
    elif kind == "dilated":
        inner = _require(desc, "inner", dict, where)
        s = _require(desc, "s", _NUM, where)
        fld = dilated(init_field(inner, grid, seed, p, f"{where}.inner"), float(s))
    else:  # mass_raise
        inner = _require(desc, "inner", dict, where)
        target = _require(desc, "mass_target", _NUM, where)
        base = init_field(inner, grid, seed, p, f"{where}.inner")
        try:
            fld, _info = mass_raise(base, p, float(target))
        except ValueError as exc:
            raise ConfigError(f"{where}.mass_target", str(exc)) from exc

    if kind not in ("gaussian",) and "boost" in desc:
        boost = _require(desc, "boost", list, where)
        fld = galilean_boost(fld, np.asarray([float(b) for b in boost]))
    if "rescale_mass" in desc:
        target = _require(desc, "rescale_mass", _NUM, where)
        fld = rescale_mass(fld, float(target))
    return fld


# ---------------------------------------------------------------------------
# artifact plumbing


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _functionals_csv(path: Path, rep: FunctionalReport) -> None:
    lines = [",".join(FunctionalReport.CSV_COLUMNS),
             ",".join(f"{v:.11e}" for v in rep.csv_row())]
    path.write_text("\n".join(lines) + "\n")


def write_manifest(outdir: Path, command: str, complete: bool = True) -> dict:
    """Hash every artifact file; complete=False marks a failed run's leftovers
    so downstream consumers can refuse them."""
    files = {}
    for f in sorted(outdir.rglob("*")):
        if f.is_file() and f.name != "manifest.json":
            rel = f.relative_to(outdir).as_posix()
            files[rel] = hashlib.sha256(f.read_bytes()).hexdigest()
    manifest = {
        "command": command,
        "complete": complete,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "files": files,
    }
    _write_json(outdir / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# command implementations


def _run_ground_state(params: dict, seed: int, outdir: Path) -> None:
    p = _params_from(params, "parameters")
    alpha = _optional(params, "alpha", _NUM, 1.0, "parameters")
    solver_doc = _optional(params, "solver", dict, {}, "parameters")
    try:
        opts = _dataclass_overrides(SolverOptions, solver_doc, "parameters.solver")
    except TypeError as exc:
        raise ConfigError("parameters.solver", str(exc)) from exc
    if classify_regime(p) != Regime.UNSTABLE:
        raise ConfigError("parameters.lam1",
                          "ground states need an unstable (focusing) coupling pair")
    gs = minimize_weinstein(p, float(alpha), options=opts)
    save_ground_state(gs, outdir / "ground_state")
    _functionals_csv(outdir / "functionals.csv", gs.report)
    _write_json(outdir / "summary.json", {
        "alpha": gs.alpha,
        "omega": gs.omega,
        "c_alpha": gs.c_alpha,
        "gamma": gs.report.gamma,
        "pohozaev_residuals": list(gs.pohozaev_residuals),
        "elliptic_residual": gs.elliptic_residual,
        "diagnostics": {k: v for k, v in gs.diagnostics.items() if k != "w_history"},
    })


def _run_threshold_curve(params: dict, seed: int, outdir: Path) -> None:
    p = _params_from(params, "parameters")
    solver_doc = _optional(params, "solver", dict, {}, "parameters")
    curve_doc = _optional(params, "curve", dict, {}, "parameters")
    try:
        sopts = _dataclass_overrides(SolverOptions, solver_doc, "parameters.solver")
    except TypeError as exc:
        raise ConfigError("parameters.solver", str(exc)) from exc
    curve_doc = dict(curve_doc)
    curve_doc.setdefault("seed", seed)
    try:
        copts = _dataclass_overrides(CurveOptions, curve_doc, "parameters.curve")
    except TypeError as exc:
        raise ConfigError("parameters.curve", str(exc)) from exc
    if classify_regime(p) != Regime.UNSTABLE:
        raise ConfigError("parameters.lam1",
                          "the threshold curve needs an unstable coupling pair")
    gs = minimize_weinstein(p, 1.0, options=sopts)
    save_ground_state(gs, outdir / "ground_state")
    curve = build_curve(gs, copts)
    write_curve(curve, outdir)


def _evolution_config(params: dict) -> EvolutionConfig:
    if "dt" not in params:
        raise ConfigError("parameters.dt", "missing required field")
    dt = _require(params, "dt", _NUM, "parameters")
    t_final = _require(params, "t_final", _NUM, "parameters")
    stride = _optional(params, "output_stride", int, 1, "parameters")
    snap_stride = _optional(params, "snapshot_stride", int, None, "parameters")
    try:
        return EvolutionConfig(dt=float(dt), t_final=float(t_final),
                               output_stride=stride, snapshot_stride=snap_stride)
    except ValueError as exc:
        raise ConfigError("parameters.dt", str(exc)) from exc


def _run_evolve(params: dict, seed: int, outdir: Path) -> None:
    p = _params_from(params, "parameters")
    grid = _grid_from(params, "parameters") if "grid" in params else None
    cfg = _evolution_config(params)
    desc = _require(params, "init", dict, "parameters")
    u0 = init_field(desc, grid, seed, p)
    sink = snapshot_writer(outdir / "snapshots") if cfg.snapshot_stride else None
    warnings: list[str] = []
    traj = evolve(u0, cfg, p, snapshot_sink=sink, warn=warnings.append)
    write_timeseries(traj, outdir / "timeseries.csv")
    _write_json(outdir / "summary.json", {
        "classification": traj.classification.value,
        "aborted": traj.aborted,
        "mass_drift": traj.mass_drift,
        "energy_drift": traj.energy_drift,
        "momentum_drift": list(traj.momentum_drift),
        "trusted_until": traj.trusted_until,
        "warnings": warnings,
    })
    if traj.aborted:
        raise NumericalFailure("trajectory aborted on NaN/overflow; "
                               f"classified {traj.classification.value}")


def _run_virial(params: dict, seed: int, outdir: Path) -> None:
    p = _params_from(params, "parameters")
    grid = _grid_from(params, "parameters") if "grid" in params else None
    cfg = _evolution_config(params)
    desc = _require(params, "init", dict, "parameters")
    u0 = init_field(desc, grid, seed, p)
    wdoc = _optional(params, "weight", dict, {"kind": "quadratic"}, "parameters")
    wkind = _require(wdoc, "kind", str, "parameters.weight")
    if wkind == "quadratic":
        weight = quadratic_weight(u0.grid)
    elif wkind == "localized":
        if "radius" in wdoc:
            radius = float(_require(wdoc, "radius", _NUM, "parameters.weight"))
        else:
            frac = _optional(wdoc, "mass_fraction", _NUM, 0.99999, "parameters.weight")
            radius = radius_covering_mass(u0, float(frac))
        try:
            weight = localized_weight(u0.grid, radius)
        except ValueError as exc:
            raise ConfigError("parameters.weight.radius", str(exc)) from exc
    else:
        raise ConfigError("parameters.weight.kind",
                          f"expected quadratic or localized, got {wkind!r}")
    warnings: list[str] = []
    series = virial_series(u0, cfg, p, weight, warn=warnings.append)
    write_virial_series(series, outdir / "virial.csv")
    _write_json(outdir / "summary.json", {
        "weight_kind": wkind,
        "weight_radius": weight.radius,
        "warnings": warnings,
    })


def _run_verify(params: dict, seed: int, outdir: Path) -> None:
    from .acceptance import run_acceptance
    names = params.get("criteria")
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    try:
        results = run_acceptance(printer=print, names=names)
    except KeyError as exc:
        raise ConfigError("parameters.criteria", str(exc))
    _write_json(outdir / "verify_report.json", {
        "results": [
            {"criterion": r.criterion, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    })
    failed = [r.criterion for r in results if not r.passed]
    if failed:
        raise NumericalFailure("acceptance criteria failed: " + ", ".join(failed))
    if not all(r.passed for r in results):
        raise NumericalFailure("acceptance criteria failed")


_RUNNERS = {
    "GroundState": _run_ground_state,
    "ThresholdCurve": _run_threshold_curve,
    "Evolve": _run_evolve,
    "Virial": _run_virial,
    "Verify": _run_verify,
}


# ---------------------------------------------------------------------------
# entry points


def run(command: str, config_path: Optional[str], out: Optional[str],
        seed: Optional[int], overrides=()) -> int:
    try:
        if config_path is not None:
            doc = load_config(config_path)
        else:
            if command != "Verify":
                raise ConfigError("config", "--config is required for this command")
            doc = {"command": "Verify", "parameters": {}}
        for assignment in overrides:
            apply_override(doc, assignment)
        cfg_command = doc.get("command", command)
        if cfg_command not in COMMANDS:
            raise ConfigError("command",
                              f"unknown command {cfg_command!r}; expected one of {list(COMMANDS)}")
        if cfg_command != command:
            raise ConfigError("command",
                              f"config says {cfg_command!r} but the CLI invoked {command!r}")
        params = doc.get("parameters", {})
        if not isinstance(params, dict):
            raise ConfigError("parameters", "must be an object")
        run_seed = seed if seed is not None else doc.get("seed", 0)
        if not isinstance(run_seed, int) or run_seed < 0:
            raise ConfigError("seed", "must be a nonnegative integer")
        out_dir = Path(out) if out else Path(params.get("output_dir", f"dnls-{command.lower()}"))
        out_dir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    # no output path in the resolved doc: identical config and seed must
    # hash identically no matter where the artifacts land
    resolved = {"command": command, "seed": run_seed, "parameters": params}
    _write_json(out_dir / "resolved_config.json", resolved)
    try:
        _RUNNERS[command](params, run_seed, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        write_manifest(out_dir, command, complete=False)
        print(f"partial artifacts: {out_dir}", file=sys.stderr)
        return 3
    write_manifest(out_dir, command)
    print(f"artifacts: {out_dir}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnls",
        description="Spectral simulator and variational toolkit for the "
                    "energy-critical dipolar NLS on a periodic box.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for cli_name, canonical in _CLI_TO_COMMAND.items():
        sp = sub.add_parser(cli_name, help=f"{canonical} run")
        sp.add_argument("--config", default=None,
                        help="path to the JSON run configuration")
        sp.add_argument("--out", default=None, help="artifact directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the stochastic seed")
        sp.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="dotted-path config override, repeatable")
    args = parser.parse_args(argv)
    command = _CLI_TO_COMMAND[args.subcommand]
    if args.config is None and command != "Verify":
        print("config error: config: --config is required for this command",
              file=sys.stderr)
        return 2
    return run(command, args.config, args.out, args.seed, args.override)


if __name__ == "__main__":
    sys.exit(main())
