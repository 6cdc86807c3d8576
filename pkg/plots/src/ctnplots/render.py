"""Render the six figure kinds from simulator CSV files."""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import (EmptyDataError, SchemaError, fit_line, growth_rates,
                   load_fidelities, load_trajectories, mean_curve, page_bound)

KINDS = ("regimes", "compare_k", "depth", "angles", "slopes", "fidelity")


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    out: str
    n: list = field(default_factory=list)
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise EmptyDataError("no input CSVs given")


def render(spec: PlotSpec):
    """Render the figure, write it to spec.out, and return it."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    if spec.kind == "regimes":
        _render_regimes(spec, ax)
    elif spec.kind in ("compare_k", "depth"):
        _render_methods(spec, ax)
    elif spec.kind == "angles":
        _render_angles(spec, ax)
    elif spec.kind == "slopes":
        _render_slopes(spec, ax)
    else:
        _render_fidelity(spec, ax)
    fig.tight_layout()
    fig.savefig(spec.out)
    plt.close(fig)
    return fig


def _sizes_for(spec):
    if len(spec.n) != len(spec.inputs):
        raise SchemaError(
            f"need one --n per input CSV ({len(spec.inputs)} inputs, "
            f"{len(spec.n)} sizes)")
    return [int(v) for v in spec.n]


def _render_regimes(spec, ax):
    sizes = _sizes_for(spec)
    for path, n in sorted(zip(spec.inputs, sizes), key=lambda p: p[1]):
        run = load_trajectories(path)
        steps, mean, sem = mean_curve(run)
        x = steps / n if spec.normalize else steps
        ax.plot(x, mean / (n / 2), marker="o", ms=2.5, label=f"N={n}")
        ax.errorbar(x, mean / (n / 2), yerr=sem / (n / 2), fmt="none",
                    elinewidth=0.8, capsize=1.5)
        ax.axhline(page_bound(n), linestyle="--", linewidth=0.9,
                   color=ax.lines[-1].get_color())
    ax.set_xlabel("T / N" if spec.normalize else "T")
    ax.set_ylabel("max S / (N/2)")
    ax.legend(loc="lower right", fontsize=8)


def _render_methods(spec, ax):
    for path in spec.inputs:
        run = load_trajectories(path)
        for method in np.unique(run.method):
            steps, mean, sem = mean_curve(run, run.method == method)
            ax.errorbar(steps, mean, yerr=sem, marker="o", ms=2.5,
                        capsize=2, label=method)
    ax.set_xlabel("T")
    ax.set_ylabel("max S")
    ax.legend(fontsize=8)


def _render_angles(spec, ax):
    for path in spec.inputs:
        run = load_trajectories(path)
        for theta in np.unique(run.theta):
            steps, mean, _ = mean_curve(run, np.abs(run.theta - theta) < 1e-12)
            ax.plot(steps, mean, marker="o", ms=2.5,
                    label=rf"$\theta$ = {theta:.4f}")
    ax.set_xlabel("rotation count")
    ax.set_ylabel("max S")
    ax.legend(fontsize=8)


def _render_slopes(spec, ax):
    sizes = _sizes_for(spec)
    annotations = []
    for path, n in zip(spec.inputs, sizes):
        run = load_trajectories(path)
        rates = growth_rates(run, n)
        thetas = sorted(rates)
        alphas = [rates[t][0] for t in thetas]
        sems = [rates[t][1] for t in thetas]
        slope, intercept, r2 = fit_line(thetas, alphas)
        ax.errorbar(thetas, alphas, yerr=sems, fmt="o", ms=4, capsize=2,
                    label=f"N={n}")
        grid = np.linspace(0, max(thetas) * 1.05, 50)
        ax.plot(grid, slope * grid + intercept, linewidth=0.9)
        annotations.append(f"N={n}: slope={slope:.4f}, $R^2$={r2:.3f}")
        ax.figure._slope_fits = getattr(ax.figure, "_slope_fits", {})
        ax.figure._slope_fits[n] = (slope, intercept, r2)
    ax.text(0.03, 0.97, "\n".join(annotations), transform=ax.transAxes,
            va="top", fontsize=8)
    ax.set_xlabel(r"rotation angle $\theta$")
    ax.set_ylabel(r"entropy per gate $\alpha$")
    ax.legend(loc="lower right", fontsize=8)


def _render_fidelity(spec, ax):
    for path in spec.inputs:
        data = load_fidelities(path)
        for n in np.unique(data["n"]):
            for seed in np.unique(data["seed"][data["n"] == n]):
                sel = (data["n"] == n) & (data["seed"] == seed)
                order = np.argsort(data["inv_chi"][sel])
                ax.plot(data["inv_chi"][sel][order], data["fidelity"][sel][order],
                        marker="o", ms=3, label=f"N={n}, seed={seed}")
    ax.set_xlabel(r"1 / $\chi$")
    ax.set_ylabel("F")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=7)
