"""Static SVG line charts drawn from the emitted CSV tables.

SVG output is made reproducible by fixing the hash salt and dropping the
date metadata, so figures can sit inside a byte-identical bundle.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from mcqdisent.report import read_csv  # noqa: E402

STYLE = {
    "svg.hashsalt": "mcqdisent",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.3,
}

GOLDEN = (math.sqrt(5) - 1) / 2

MEASURE_LABEL = {"bm": r"$S_\mathrm{BM}$", "chsh": r"$S_\mathrm{CHSH}$", "bprv": r"$S_\mathrm{BPRV}$"}
MEASURE_BOUND = {"bm": 1.0, "chsh": 2.0, "bprv": 7.0}


def new_figure(width: float = 5.0, nrows: int = 1, ncols: int = 1):
    with plt.rc_context(STYLE):
        return plt.subplots(nrows, ncols, figsize=(width * ncols, width * GOLDEN * nrows), squeeze=False)


def save(fig, path: Path) -> Path:
    with plt.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_coherence(csv_path: Path, out: Path) -> Path:
    d = read_csv(csv_path)
    fig, ax = new_figure()
    ax = ax[0, 0]
    x = d["t_over_tauE"]
    ax.plot(x, d["c_exact"], label="exact")
    ax.plot(x, d["c_gauss"], "--", label="Gaussian")
    if "c_numerical" in d:
        ax.plot(x[::8], d["c_numerical"][::8], "o", ms=3, mfc="none", label="numerical")
    ax.set_xlabel(r"$t/\tau_E$")
    ax.set_ylabel(r"$c(t)$")
    ax.legend(frameon=False)
    return save(fig, out)


def plot_correlations(csv_path: Path, out: Path, measures, models) -> Path:
    d = read_csv(csv_path)
    fig, axes = new_figure(4.0, 1, len(measures))
    for ax, m in zip(axes[0], measures):
        for model in models:
            key = f"S_{m.upper()}_{model}"
            if key in d:
                ax.plot(d["t_over_tauE"], d[key], label=model)
        ax.axhline(MEASURE_BOUND[m], color="0.5", lw=0.8, ls=":")
        ax.set_xlabel(r"$t/\tau_E$")
        ax.set_ylabel(MEASURE_LABEL[m])
    axes[0, 0].legend(frameon=False)
    return save(fig, out)


def plot_histogram(csv_path: Path, out: Path) -> Path:
    d = read_csv(csv_path)
    fig, ax = new_figure()
    ax = ax[0, 0]
    c = d["bin_center_eV"]
    width = float(c[1] - c[0]) if c.size > 1 else 1.0
    ax.bar(c, d["count"], width=width, color="0.75", edgecolor="0.4", lw=0.4)
    ax.plot(c, d["fit_value"], "-", color="C3", label="Gaussian fit")
    ax.set_xlabel(r"$E^\mathrm{flip}$ (eV)")
    ax.set_ylabel("count")
    ax.legend(frameon=False)
    return save(fig, out)


def plot_linearized(csv_path: Path, out: Path) -> Path:
    d = read_csv(csv_path)
    ok = d["valid"] > 0
    fig, ax = new_figure()
    ax = ax[0, 0]
    ax.plot(d["ln_t"][ok], d["ln_neg_ln_f"][ok], ".", ms=3, label="data")
    ax.plot(d["ln_t"][ok], d["reference_slope2"][ok], "-", color="C0", alpha=0.6, label="slope 2 (Gaussian)")
    ax.set_xlabel(r"$\ln t$")
    ax.set_ylabel(r"$\ln(-\ln f)$")
    ax.legend(frameon=False)
    return save(fig, out)


def plot_scatter(csv_path: Path, line_path: Path, out: Path) -> Path:
    d = read_csv(csv_path)
    ref = read_csv(line_path)
    fig, ax = new_figure()
    ax = ax[0, 0]
    for i, r in enumerate(np.unique(d["ratio"])):
        sel = d["ratio"] == r
        ax.plot(d["tau_geo_fs"][sel], d["tau_e_fs"][sel], "o", ms=3, color=f"C{i}", label=rf"$R_A/R_B = {r:g}$")
    ax.plot(ref["tau_geo_fs"], ref["tau_e_fs"], "k-", lw=0.8, label=r"$\tau_E = \tau/\sqrt{2}$")
    ax.set_xlabel(r"$\tau$ (fs)")
    ax.set_ylabel(r"$\tau_E$ (fs)")
    ax.legend(frameon=False)
    return save(fig, out)


def plot_collapse(curves, out: Path, scale_label: str, measure: str = "bm") -> Path:
    """``curves``: list of (ratio, scaled_times, values)."""
    fig, ax = new_figure()
    ax = ax[0, 0]
    ratios = sorted({r for r, _, _ in curves})
    for r, t, v in curves:
        ax.plot(t, v, color=f"C{ratios.index(r)}", lw=0.8, alpha=0.8)
    for i, r in enumerate(ratios):
        ax.plot([], [], color=f"C{i}", label=rf"$R_A/R_B = {r:g}$")
    ax.axhline(MEASURE_BOUND[measure], color="0.5", lw=0.8, ls=":")
    ax.set_xlabel(scale_label)
    ax.set_ylabel(MEASURE_LABEL[measure])
    ax.legend(frameon=False)
    return save(fig, out)
