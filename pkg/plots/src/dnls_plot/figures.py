"""The four figure kinds and their renderer.

Everything is drawn from persisted CSV/JSON values. No physics is
recomputed here; the only arithmetic is axis bookkeeping (relative drifts,
the 8*I reference line, interpolation between curve samples).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import ArtifactDir, ArtifactError, open_artifacts

KINDS = ("MassEnergyPlane", "ConservationDrift", "VirialOverlay", "ITrace")

_RC = {
    "font.family": "DejaVu Sans",
    "mathtext.fontset": "dejavusans",
    "svg.hashsalt": "dnls-plot",
    "axes.grid": True,
    "grid.alpha": 0.3,
}


@dataclass(frozen=True)
class StyleOptions:
    dpi: int = 150
    figsize: tuple[float, float] = (7.2, 4.6)
    font_size: float = 10.0
    title: str | None = None


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: an artifact directory, a kind, and an output path."""

    artifacts: Path
    kind: str
    out: Path
    style: StyleOptions = field(default_factory=StyleOptions)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected "
                             f"one of {', '.join(KINDS)}")


def k_region_upper(m_dense: np.ndarray, m_samples: np.ndarray,
                   e_samples: np.ndarray, mass_s: float,
                   top: float) -> np.ndarray:
    """Upper boundary of the scattering region over a dense mass grid.

    Below M(S) the threshold is infinite, so the boundary is the axis top
    (the vertical-asymptote branch); from M(S) on it is the interpolated
    curve, floored at zero.
    """
    curve = np.clip(np.interp(m_dense, m_samples, e_samples), 0.0, None)
    return np.where(m_dense < mass_s, top, curve)


def _finish(ax, style: StyleOptions, default_title: str) -> None:
    ax.set_title(style.title if style.title is not None else default_title)
    ax.legend(loc="best", fontsize=style.font_size * 0.9)


def _fig_mass_energy_plane(art: ArtifactDir, style: StyleOptions):
    curve = art.read_csv("curve.csv", ("m", "script_e", "feasible_flag"))
    meta = art.read_json("curve_meta.json", ("mass_s", "mass_q1"))
    mass_s = float(meta["mass_s"])
    mass_q1 = float(meta["mass_q1"])

    feas = (curve["feasible_flag"] > 0.5) & np.isfinite(curve["script_e"])
    if int(feas.sum()) < 2:
        raise ArtifactError(
            "curve.csv has fewer than two feasible samples; nothing to draw")
    order = np.argsort(curve["m"][feas])
    m_f = curve["m"][feas][order]
    e_f = curve["script_e"][feas][order]
    m_inf = curve["m"][~feas]

    top = 1.25 * max(float(e_f.max()), 1e-12)
    m_dense = np.linspace(0.0, mass_q1, 481)
    upper = k_region_upper(m_dense, m_f, e_f, mass_s, top)

    fig, ax = plt.subplots(figsize=style.figsize)
    ax.fill_between(m_dense, 0.0, upper, where=upper > 0, color="tab:blue",
                    alpha=0.22, lw=0, label=r"region $\mathcal{K}$")
    ax.plot(m_f, e_f, "o-", color="tab:blue", ms=4,
            label="minimal energy curve")
    if m_inf.size:
        ax.plot(m_inf, np.full(m_inf.shape, 0.97 * top), "^",
                color="tab:red", ms=7,
                label="infeasible probe (threshold $=+\\infty$)")

    ax.axvline(mass_s, color="0.35", ls="--", lw=1.2,
               label="vertical asymptote at M(S)")
    ax.annotate("M(S)", xy=(mass_s, top), xytext=(mass_s, 1.02 * top),
                ha="center", fontsize=style.font_size)
    ax.axvline(mass_q1, color="0.6", ls=":", lw=1.2)
    ax.plot([mass_q1], [max(0.0, float(e_f[-1]))], "s", color="k", ms=6)
    ax.annotate("M(Q1)", xy=(mass_q1, top), xytext=(mass_q1, 1.02 * top),
                ha="center", fontsize=style.font_size)

    ax.set_xlim(0.0, 1.06 * mass_q1)
    ax.set_ylim(min(0.0, float(e_f.min())) - 0.05 * top, 1.1 * top)
    ax.set_xlabel("mass")
    ax.set_ylabel("energy")
    _finish(ax, style, "minimal energy over mass")
    info = {"m_dense": m_dense, "k_upper": upper,
            "anchors": ("M(S)", "M(Q1)"), "mass_s": mass_s,
            "mass_q1": mass_q1, "n_feasible": int(feas.sum()),
            "n_infeasible": int(m_inf.size), "top": top}
    return fig, info


def _rel_dev(series: np.ndarray, denom: float) -> np.ndarray:
    dev = np.abs(series - series[0]) / denom
    return np.where(dev > 0, dev, np.nan)     # keep the log axis happy


def _fig_conservation_drift(art: ArtifactDir, style: StyleOptions):
    ts = art.read_csv("timeseries.csv",
                      ("time", "mass", "energy",
                       "momentum_1", "momentum_2", "momentum_3"))
    t = ts["time"]
    mass0 = float(ts["mass"][0])
    e0 = float(ts["energy"][0])
    denom_m = abs(mass0) if mass0 != 0 else 1.0
    denom_e = abs(e0) if e0 != 0 else 1.0

    p = np.stack([ts["momentum_1"], ts["momentum_2"], ts["momentum_3"]])
    p_dev = np.linalg.norm(p - p[:, :1], axis=0) / max(denom_m, 1e-300)
    p_dev = np.where(p_dev > 0, p_dev, np.nan)

    fig, ax = plt.subplots(figsize=style.figsize)
    ax.plot(t, _rel_dev(ts["mass"], denom_m), label="mass")
    ax.plot(t, _rel_dev(ts["energy"], denom_e), label="energy")
    ax.plot(t, p_dev, label="momentum (per unit mass)")
    ax.set_yscale("log")
    ax.set_xlabel("time")
    ax.set_ylabel("relative deviation from t = 0")
    _finish(ax, style, "conservation drift")
    info = {"worst_mass": float(np.nanmax(_rel_dev(ts["mass"], denom_m),
                                          initial=0.0)),
            "worst_energy": float(np.nanmax(_rel_dev(ts["energy"], denom_e),
                                            initial=0.0)),
            "worst_momentum": float(np.nanmax(p_dev, initial=0.0))}
    return fig, info


def _fig_itrace(art: ArtifactDir, style: StyleOptions):
    ts = art.read_csv("timeseries.csv", ("time", "i_value"))
    t = ts["time"]
    i_vals = ts["i_value"]
    i0 = float(i_vals[0])

    fig, ax = plt.subplots(figsize=style.figsize)
    ax.plot(t, i_vals, color="tab:green", label="I(u(t))")
    ax.axhline(0.0, color="0.3", lw=1.0)
    ax.axhline(i0, color="tab:green", ls=":", lw=1.0, label="initial value")
    ax.axhline(0.5 * i0, color="tab:orange", ls="--", lw=1.0,
               label="half the initial value")
    if art.has("summary.json"):
        summary = art.read_json("summary.json")
        trusted = summary.get("trusted_until")
        if isinstance(trusted, (int, float)) and np.isfinite(trusted) \
                and trusted < float(t[-1]):
            ax.axvline(float(trusted), color="0.5", ls="-.", lw=1.0,
                       label="conservation trusted until here")
    ax.set_xlabel("time")
    ax.set_ylabel("virial functional I")
    _finish(ax, style, "virial functional along the flow")
    ratio = float(np.min(i_vals) / i0) if i0 > 0 else float("nan")
    return fig, {"i0": i0, "min_ratio": ratio}


def _fig_virial_overlay(art: ArtifactDir, style: StyleOptions):
    vs = art.read_csv("virial.csv",
                      ("time", "v", "vp", "vpp_direct", "vpp_fd", "i_value"))
    t = vs["time"]

    fig, ax = plt.subplots(figsize=style.figsize)
    ax.plot(t, vs["vpp_direct"], color="tab:blue", label="V'' direct")
    ax.plot(t, vs["vpp_fd"], ls="none", marker="o", ms=4,
            color="tab:orange", label="V'' finite difference")
    ax.plot(t, 8.0 * vs["i_value"], ls="--", color="tab:green",
            label=r"$8\,I(u(t))$")
    ax.set_xlabel("time")
    ax.set_ylabel("second virial derivative")
    _finish(ax, style, "virial identity overlay")
    n_fd = int(np.isfinite(vs["vpp_fd"]).sum())
    return fig, {"n_points": int(t.size), "n_fd_points": n_fd}


_BUILDERS = {
    "MassEnergyPlane": _fig_mass_energy_plane,
    "ConservationDrift": _fig_conservation_drift,
    "VirialOverlay": _fig_virial_overlay,
    "ITrace": _fig_itrace,
}


def build_figure(artifacts, kind: str, style: StyleOptions | None = None):
    """Construct the figure for one kind; returns (figure, info dict).

    `artifacts` is a directory path or an already opened ArtifactDir.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; expected one of "
                         f"{', '.join(KINDS)}")
    art = artifacts if isinstance(artifacts, ArtifactDir) \
        else open_artifacts(artifacts)
    style = style or StyleOptions()
    with plt.rc_context({**_RC, "font.size": style.font_size}):
        return _BUILDERS[kind](art, style)


def render(spec: FigureSpec) -> Path:
    """Draw spec.kind from spec.artifacts and write spec.out."""
    fig, _info = build_figure(spec.artifacts, spec.kind, spec.style)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_kwargs: dict = {"dpi": spec.style.dpi}
    suffix = out.suffix.lower()
    # pin the writer metadata so byte-identical inputs give byte-identical
    # files (PNG text chunks and PDF timestamps are the only varying parts)
    if suffix == ".png":
        save_kwargs["metadata"] = {"Software": "dnls-plot"}
    elif suffix == ".pdf":
        save_kwargs["metadata"] = {"CreationDate": None}
    elif suffix == ".svg":
        save_kwargs["metadata"] = {"Date": None}
    try:
        fig.savefig(out, **save_kwargs)
    finally:
        plt.close(fig)
    return out
