"""Headless figure rendering for report outputs.

Figures are written next to the delimited tables they summarize: burned-area
and lost-cells boxplots over seeds, incumbent-evolution line plots from the
search traces, the cluster-vs-scattered pattern comparison, and burn-count
maps for simulate runs.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .landscape import Landscape  # noqa: E402

ALGO_COLORS = {"ga": "tab:blue", "grasp": "tab:orange",
               "random": "tab:green", "greedy": "tab:red"}
DPI = 150


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _grouped_boxplot(ax, report, metric: str):
    algorithms = sorted({r.algorithm for r in report.rows})
    alphas = sorted({r.alpha for r in report.rows})
    n = len(algorithms)
    for i, algo in enumerate(algorithms):
        data, positions = [], []
        for k, alpha in enumerate(alphas):
            vals = [getattr(r, metric) for r in report.rows_for(algo, alpha)
                    if getattr(r, metric) is not None]
            if vals:
                data.append(vals)
                positions.append(k * (n + 1) + i)
        if not data:
            continue
        bp = ax.boxplot(data, positions=positions, widths=0.8, patch_artist=True)
        color = ALGO_COLORS.get(algo, "gray")
        for box in bp["boxes"]:
            box.set_facecolor(color)
            box.set_alpha(0.6)
        for med in bp["medians"]:
            med.set_color("black")
        ax.plot([], [], color=color, label=algo)
    ax.set_xticks([k * (n + 1) + (n - 1) / 2 for k in range(len(alphas))])
    ax.set_xticklabels([f"{a * 100:g}%" for a in alphas])
    ax.set_xlabel("treated fraction")
    ax.legend()
    ax.grid(axis="y", alpha=0.3)


def render_comparison_figures(figures_dir: Path, report) -> list[Path]:
    """Boxplots of final results plus per-alpha evolution plots."""
    figures_dir = Path(figures_dir)
    out: list[Path] = []

    fig, ax = plt.subplots(figsize=(8, 4.5))
    _grouped_boxplot(ax, report, "percent_burned")
    ax.set_ylabel("burned area (% of flammable cells)")
    out.append(_save(fig, figures_dir / "burned_boxplot.png"))

    fig, ax = plt.subplots(figsize=(8, 4.5))
    _grouped_boxplot(ax, report, "lost_percent")
    ax.set_ylabel("lost cells incl. treatment (% of flammable cells)")
    out.append(_save(fig, figures_dir / "lost_boxplot.png"))

    from .optimizers import read_trace
    alphas = sorted({r.alpha for r in report.rows})
    for alpha in alphas:
        traced = [r for r in report.rows
                  if r.alpha == alpha and r.trace_file is not None]
        if not traced:
            continue
        fig, ax = plt.subplots(figsize=(7, 4))
        for row in traced:
            trace = read_trace(row.trace_file)
            xs = [p.elapsed_s for p in trace.points]
            ys = [p.mean_loss for p in trace.points]
            ax.step(xs, ys, where="post", color=ALGO_COLORS.get(row.algorithm, "gray"),
                    alpha=0.7, label=f"{row.algorithm} seed {row.seed}")
        ax.set_xlabel("elapsed (s)")
        ax.set_ylabel("incumbent mean loss (cells)")
        ax.set_title(f"evolution at {alpha * 100:g}% treatment")
        ax.legend(fontsize=7)
        ax.grid(alpha=0.3)
        token = f"{alpha:g}".replace(".", "p")
        out.append(_save(fig, figures_dir / f"evolution_a{token}.png"))
    return out


def render_pattern_figure(out_dir: Path, report) -> Path:
    """Cluster vs scattered mean burned percent across the alpha grid."""
    fig, ax = plt.subplots(figsize=(7, 4))
    alphas = report.alphas
    x = [a * 100 for a in alphas]
    for name, data, color in (("cluster", report.cluster, "tab:blue"),
                              ("scattered", report.scattered, "tab:orange")):
        means = [float(np.mean(data[a])) for a in alphas]
        ax.plot(x, means, "-o", color=color, label=f"{name} (mean)")
        for i, a in enumerate(alphas):
            ax.scatter([x[i]] * len(data[a]), data[a], color=color, s=12, alpha=0.45)
    ax.set_xlabel("treated fraction (%)")
    ax.set_ylabel("burned area (% of flammable cells)")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, Path(out_dir) / "pattern_comparison.png")


def render_burn_map(path: Path, landscape: Landscape, burn_counts: np.ndarray,
                    firebreaks=None, replications: int = 1) -> Path:
    """Burn-frequency map with firebreaks and non-fuel cells overlaid."""
    h, w = landscape.height, landscape.width
    freq = (burn_counts / max(replications, 1)).reshape(h, w)
    fig, ax = plt.subplots(figsize=(6, 6 * h / w))
    img = ax.imshow(freq, cmap="YlOrRd", vmin=0.0, vmax=1.0, interpolation="nearest")
    overlay = np.zeros((h, w, 4))
    overlay[~landscape.flammable.reshape(h, w)] = (0.5, 0.5, 0.5, 1.0)
    if firebreaks is not None and len(firebreaks):
        idx = np.asarray(sorted(int(j) for j in firebreaks))
        rows, cols = idx // w, idx % w
        overlay[rows, cols] = (0.0, 0.0, 0.0, 1.0)
    ax.imshow(overlay, interpolation="nearest")
    fig.colorbar(img, ax=ax, shrink=0.8,
                 label="burn frequency" if replications > 1 else "burned")
    ax.set_xticks([])
    ax.set_yticks([])
    return _save(fig, Path(path))
