"""Figure rendering for the CLI report paths.

Every function writes a PNG next to the delimited outputs and returns the
path.  matplotlib is imported lazily with the Agg backend so library use
never drags a display in.
"""

from __future__ import annotations

import math

import numpy as np


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def warp_figure(profiles, path) -> str:
    """sigma, sigma', sigma'' panels for one or more profiles."""
    plt = _plt()
    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    rr = np.linspace(0.0, math.pi / 2, 4001)
    for prof in profiles:
        lbl = f"n={prof.n}"
        axes[0].plot(rr, prof.sigma(rr), label=lbl)
        axes[1].plot(rr, prof.sigma(rr, 1), label=lbl)
        axes[2].plot(rr[1:-1], prof.sigma(rr[1:-1], 2), label=lbl)
    axes[0].plot(rr, np.sin(rr), "k:", lw=0.8, label="sin r")
    axes[0].set_ylabel(r"$\sigma$")
    axes[1].set_ylabel(r"$\sigma'$")
    axes[2].set_ylabel(r"$\sigma''$")
    axes[2].set_xlabel("r")
    for ax in axes:
        ax.legend(loc="best", fontsize=8)
        ax.grid(alpha=0.3)
    fig.suptitle("warping profiles")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def curvature_figure(report, path) -> str:
    """Principal curvatures vs radius (log scale: the dive spikes are real)."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    ax.semilogy(report.r, report.K23, label=r"$K_{23}$")
    ax.semilogy(report.r, report.K13, label=r"$K_{13}$")
    ax.semilogy(report.r, report.K12, label=r"$K_{12}$")
    ax.axhline(1.0, color="k", lw=0.6, ls=":")
    ax.axvspan(report.rho, math.pi / 2 - report.rho, color="0.92",
               label="round band")
    ax.annotate(f"min = {report.min_curvature:.4g}",
                xy=(report.argmin_r, report.min_curvature),
                xytext=(0.55, 0.1), textcoords="axes fraction",
                arrowprops=dict(arrowstyle="->", lw=0.7), fontsize=9)
    ax.set_xlabel("r")
    ax.set_ylabel("sectional curvature")
    ax.set_title(f"principal curvatures, (m, n) = ({report.m}, {report.n}), "
                 f"rho = {report.rho:g}")
    ax.legend(loc="upper center", fontsize=8, ncol=4)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def curve_figure(curve, path, label="") -> str:
    """Solid-torus picture of a closed curve plus its flat-torus winding."""
    from .quotient import embed_curve
    plt = _plt()
    fig = plt.figure(figsize=(10, 4.5))
    ax3 = fig.add_subplot(1, 2, 1, projection="3d")
    xyz = embed_curve(curve)
    ax3.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], lw=1.0)
    ax3.set_title(f"solid-torus picture {label}")
    ax3.set_box_aspect((1, 1, 0.5))
    ax2 = fig.add_subplot(1, 2, 2)
    ax2.plot(np.mod(curve.t, 2 * np.pi), np.mod(curve.theta, 2 * np.pi),
             ".", ms=1.0)
    ax2.set_xlim(0, 2 * np.pi)
    ax2.set_ylim(0, 2 * np.pi)
    ax2.set_xlabel("t mod 2*pi")
    ax2.set_ylabel("theta mod 2*pi")
    ax2.set_title("winding on the torus")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def census_figure(metric, rows, path) -> str:
    """Slope profile nu(r) with the targets and radii the census found."""
    from .geodesic import SLOPE_DELTA, torus_slope
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    rr = np.linspace(SLOPE_DELTA * 2, math.pi / 2 - SLOPE_DELTA * 2, 4001)
    ax.plot(rr, torus_slope(metric, rr), lw=1.2, label=r"$\nu(r)$")
    seen = set()
    for row in rows:
        tgt = row.get("target")
        if tgt is None or tgt in seen or not np.isfinite(tgt):
            continue
        seen.add(tgt)
        ax.axhline(tgt, color="0.75", lw=0.5)
        for r0 in row.get("radii", []):
            ax.plot([r0], [tgt], "rx", ms=6)
        band = row.get("band")
        if band:
            ax.plot(band, [tgt, tgt], "g-", lw=2.5, alpha=0.7)
    ax.set_xlabel("r")
    ax.set_ylabel("balanced slope")
    ax.set_title(f"constant-radius geodesic census, (m, n) = "
                 f"({metric.m}, {metric.n})")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def trajectory_figure(curve, report, path) -> str:
    """Coordinate histories and step statistics of an integrated geodesic."""
    plt = _plt()
    fig, axes = plt.subplots(2, 1, figsize=(7.5, 6), sharex=True)
    axes[0].plot(curve.s, curve.r, label="r")
    axes[0].set_ylabel("r")
    axes[0].grid(alpha=0.3)
    axes[1].plot(curve.s, curve.theta, label="theta (unwrapped)")
    axes[1].plot(curve.s, curve.t, label="t (unwrapped)")
    axes[1].set_xlabel("arclength")
    axes[1].legend(fontsize=8)
    axes[1].grid(alpha=0.3)
    axes[0].set_title(
        f"geodesic trajectory  (steps: {report.n_steps}, "
        f"max drift: {report.max_drift:.2e})")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)
