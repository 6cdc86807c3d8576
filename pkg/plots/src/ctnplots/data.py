"""CSV parsing and derived quantities for the figure renderer.

This package talks to the simulator only through its public CSV schemas:

    trajectory: seed,step,t_count,theta,max_entropy,mean_entropy,max_chi,
                method,exact_ok,wall_ms
    fidelity:   seed,n,t_count,chi,inv_chi,fidelity

Entropy-per-gate slopes and the finite-size Haar entropy bound are
recomputed here from the file contents alone.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

TRAJECTORY_COLUMNS = ["seed", "step", "t_count", "theta", "max_entropy",
                      "mean_entropy", "max_chi", "method", "exact_ok", "wall_ms"]
FIDELITY_COLUMNS = ["seed", "n", "t_count", "chi", "inv_chi", "fidelity"]


class SchemaError(ValueError):
    """CSV columns do not match the expected schema."""


class EmptyDataError(ValueError):
    """CSV contains a header but no rows."""


@dataclass
class Run:
    """Rows of one trajectory CSV, columnized."""

    seed: np.ndarray
    t_count: np.ndarray
    theta: np.ndarray
    max_entropy: np.ndarray
    mean_entropy: np.ndarray
    max_chi: np.ndarray
    method: np.ndarray


def _read_rows(path, expected):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected columns {expected}")
        if header != expected:
            raise SchemaError(f"{path}: columns {header} do not match {expected}")
        rows = list(reader)
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    return rows


def load_trajectories(path) -> Run:
    rows = _read_rows(path, TRAJECTORY_COLUMNS)
    cols = list(zip(*rows))
    return Run(seed=np.array(cols[0], dtype=int),
               t_count=np.array(cols[2], dtype=int),
               theta=np.array(cols[3], dtype=float),
               max_entropy=np.array(cols[4], dtype=float),
               mean_entropy=np.array(cols[5], dtype=float),
               max_chi=np.array(cols[6], dtype=int),
               method=np.array(cols[7]))


def load_fidelities(path):
    rows = _read_rows(path, FIDELITY_COLUMNS)
    cols = list(zip(*rows))
    return {"seed": np.array(cols[0], dtype=int),
            "n": np.array(cols[1], dtype=int),
            "chi": np.array(cols[3], dtype=int),
            "inv_chi": np.array(cols[4], dtype=float),
            "fidelity": np.array(cols[5], dtype=float)}


def page_bound(n: int) -> float:
    """Finite-size Haar half-cut entropy bound, 1 - 1/(n ln 2)."""
    return 1.0 - 1.0 / (n * math.log(2))


def mean_curve(run: Run, mask=None):
    """(steps, mean, sem) of max_entropy, optionally restricted by mask."""
    sel = np.ones(run.t_count.size, dtype=bool) if mask is None else mask
    steps = np.unique(run.t_count[sel])
    mean = np.empty(steps.size)
    sem = np.empty(steps.size)
    for i, t in enumerate(steps):
        vals = run.max_entropy[sel & (run.t_count == t)]
        mean[i] = vals.mean()
        sem[i] = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else 0.0
    return steps, mean, sem


def growth_rates(run: Run, n: int):
    """Per-theta entropy slope (S(2n) - S(n))/n with ensemble mean and SE."""
    out = {}
    for theta in np.unique(run.theta):
        alphas = []
        sel = np.abs(run.theta - theta) < 1e-12
        for seed in np.unique(run.seed[sel]):
            rows = sel & (run.seed == seed)
            s_at = {int(t): s for t, s in
                    zip(run.t_count[rows], run.max_entropy[rows])}
            if n not in s_at or 2 * n not in s_at:
                raise EmptyDataError(f"trajectory {seed} lacks the [{n},{2 * n}] window")
            alphas.append((s_at[2 * n] - s_at[n]) / n)
        alphas = np.array(alphas)
        sem = alphas.std(ddof=1) / math.sqrt(alphas.size) if alphas.size > 1 else 0.0
        out[float(theta)] = (float(alphas.mean()), float(sem), alphas.size)
    return out


def fit_line(xs, ys):
    """Ordinary least squares; returns slope, intercept, r_squared."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(((y - yhat) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
