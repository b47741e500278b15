"""Synthetic artifact directories shaped like the solver's real output.

The plot layer only ever sees files, so the fixtures write files: same
headers, same cell format, same manifest schema as a finished run.
"""

import hashlib
import json
from pathlib import Path

import numpy as np
import pytest


def write_manifest(outdir: Path, command: str = "Evolve",
                   complete: bool = True) -> dict:
    files = {}
    for f in sorted(outdir.rglob("*")):
        if f.is_file() and f.name != "manifest.json":
            rel = f.relative_to(outdir).as_posix()
            files[rel] = hashlib.sha256(f.read_bytes()).hexdigest()
    manifest = {
        "command": command,
        "complete": complete,
        "created": "2026-08-15T00:00:00+00:00",
        "files": files,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{c:.11e}" if np.isfinite(c) else
                              ("inf" if c > 0 else ("-inf" if c < 0 else "nan"))
                              for c in row))
    path.write_text("\n".join(lines) + "\n")


def make_curve_artifacts(outdir: Path, complete: bool = True) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [
        (3.0, float("inf"), 0.0, 3.0),          # infeasible probe at low mass
        (7.698, 1.453, 1.0, 2.0),
        (8.1, 1.271, 1.0, 2.0),
        (8.7, 1.051, 1.0, 2.0),
        (9.4, 0.571, 1.0, 2.0),
        (9.85, 0.167, 1.0, 2.0),
        (10.0, 0.004, 1.0, 2.0),
    ]
    _csv(outdir / "curve.csv", "m,script_e,feasible_flag,restarts_used", rows)
    meta = {
        "mass_q1": 10.0,
        "mass_s": 7.698,
        "energy_s": 1.453,
        "eps_curve": 0.02,
        "gauge": {"alpha": 1.0, "lam1": -1.0, "lam2": 0.5},
    }
    (outdir / "curve_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    write_manifest(outdir, command="ThresholdCurve", complete=complete)
    return outdir


_TS_HEADER = ("time,mass,grad_squared,quartic,dipolar,sextic,energy,"
              "momentum_1,momentum_2,momentum_3,n_value,i_value,gamma,"
              "linf,l6_sixth,variance,outside_fraction")


def make_evolve_artifacts(outdir: Path, complete: bool = True,
                          drop_column: str | None = None) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(5)
    rows = []
    for k in range(12):
        t = 0.05 * k
        # keep the wiggle above the CSV's 12-digit resolution
        mass = 5.0 * (1.0 + 3e-10 * rng.standard_normal())
        energy = 2.4 * (1.0 + 1e-9 * rng.standard_normal())
        mom = 1e-14 * rng.standard_normal(3)
        i_val = 6.0 - 0.12 * k + 0.01 * np.sin(3 * t)
        rows.append((t, mass, 4.8, 1.1, 0.2, 0.9, energy,
                     mom[0], mom[1], mom[2], 1.2, i_val, 0.19,
                     1.3, 0.9, 11.0 + 0.5 * k, 1e-9))
    header = _TS_HEADER
    if drop_column is not None:
        cols = header.split(",")
        idx = cols.index(drop_column)
        cols.pop(idx)
        header = ",".join(cols)
        rows = [tuple(c for j, c in enumerate(r) if j != idx) for r in rows]
    _csv(outdir / "timeseries.csv", header, rows)
    summary = {
        "classification": "DispersingLike",
        "aborted": False,
        "mass_drift": 3e-13,
        "energy_drift": 8e-12,
        "momentum_drift": [1e-14, 2e-14, 1e-14],
        "trusted_until": 0.45,
        "warnings": [],
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    write_manifest(outdir, command="Evolve", complete=complete)
    return outdir


def make_virial_artifacts(outdir: Path, complete: bool = True,
                          drop_column: str | None = None) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    n = 15
    for k in range(n):
        t = 0.02 * k
        v = 30.0 + 50.0 * t * t
        vp = 100.0 * t
        vpp = 100.0 + 2.0 * np.cos(t)
        fd = float("nan") if k in (0, n - 1) else vpp * (1 + 2e-5)
        rows.append((t, v, vp, vpp, fd, vpp / 8.0))
    header = "time,v,vp,vpp_direct,vpp_fd,i_value"
    if drop_column is not None:
        cols = header.split(",")
        idx = cols.index(drop_column)
        cols.pop(idx)
        header = ",".join(cols)
        rows = [tuple(c for j, c in enumerate(r) if j != idx) for r in rows]
    _csv(outdir / "virial.csv", header, rows)
    (outdir / "summary.json").write_text(json.dumps(
        {"weight_kind": "quadratic", "weight_radius": None,
         "warnings": []}, indent=2) + "\n")
    write_manifest(outdir, command="Virial", complete=complete)
    return outdir


@pytest.fixture
def curve_dir(tmp_path):
    return make_curve_artifacts(tmp_path / "curve_run")


@pytest.fixture
def evolve_dir(tmp_path):
    return make_evolve_artifacts(tmp_path / "evolve_run")


@pytest.fixture
def virial_dir(tmp_path):
    return make_virial_artifacts(tmp_path / "virial_run")
