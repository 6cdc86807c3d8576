"""Doped-circuit ensembles, metrics, and CSV emission.

A doped run interleaves exactly-uniform global random Cliffords with
single-site Z rotations: T gates (theta = pi/4) for the plain doped kind,
or a configured R_Z angle for angle scans. One trajectory record is logged
per non-Clifford gate. Per-realization RNG streams derive from
``master_seed * 1000 + realization`` so cooler comparisons are seed-matched.

CSV column order is fixed: seed, step, t_count, theta, max_entropy,
mean_entropy, max_chi, method, exact_ok, wall_ms. wall_ms is 0 unless
timing is enabled, keeping default output byte-identical for a given
config and seed.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gateclasses
from .ctn import CTNState, CoolingPolicy
from .exceptions import ValidationError
from .mps import TruncationPolicy
from .tableau import random_clifford

_KINDS = ("doped_t", "compare_k", "depth_scan", "angle_scan", "fidelity_scan",
          "verify_theorem")

CSV_COLUMNS = ("seed", "step", "t_count", "theta", "max_entropy",
               "mean_entropy", "max_chi", "method", "exact_ok", "wall_ms")

FIDELITY_COLUMNS = ("seed", "n", "t_count", "chi", "inv_chi", "fidelity")


@dataclass
class ExperimentConfig:
    kind: str
    n: int = 12
    t_max: int = 24
    theta: tuple = (np.pi / 4,)
    realizations: int = 1
    cooling: str = "exact+heuristic:k=2,d=2"
    chi_max: int = 64
    cutoff: float = 1e-12
    seed: int = 1
    k_values: tuple = (2, 3)
    depths: tuple = (1, 5)
    chi_list: tuple = ()
    timing: bool = False

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown experiment kind {self.kind!r}")
        if self.realizations < 1 or self.realizations > 1000:
            raise ValidationError("realizations must be in [1, 1000]")
        if self.t_max < 0:
            raise ValidationError("t_max must be >= 0")
        CoolingPolicy.parse(self.cooling)

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(chi_max=self.chi_max, cutoff=self.cutoff)


@dataclass
class TrajectoryRecord:
    seed: int
    step: int
    t_count: int
    theta: float
    max_entropy: float
    mean_entropy: float
    max_chi: int
    method: str
    exact_ok: Optional[bool]
    wall_ms: float = 0.0
    entropies: Optional[np.ndarray] = None  # per-cut profile; not serialized


def realization_seed(master: int, r: int) -> int:
    return master * 1000 + r


def _tables_for(cooling: str) -> dict:
    policy = CoolingPolicy.parse(cooling)
    if policy.heuristic_k is None:
        return {}
    return {policy.heuristic_k: gateclasses.get_table(policy.heuristic_k)}


def run_trajectory(n: int, t_max: int, theta: float, cooling: str, trunc: TruncationPolicy,
                   seed: int, tables: dict = None, timing: bool = False):
    """One doped-circuit realization; returns (records, final CTNState)."""
    rng = np.random.default_rng(seed)
    policy = CoolingPolicy.parse(cooling)
    table = (tables or {}).get(policy.heuristic_k)
    st = CTNState(n, trunc)
    records = []
    for t in range(1, t_max + 1):
        st.apply_clifford(random_clifford(n, rng))
        site = int(rng.integers(n))
        t0 = time.perf_counter()
        rep = st.apply_rotation(theta, "Z", site, policy, table)
        wall = (time.perf_counter() - t0) * 1e3 if timing else 0.0
        prof = rep.entropies_after
        records.append(TrajectoryRecord(
            seed=seed, step=t, t_count=t, theta=theta,
            max_entropy=float(prof.max()), mean_entropy=float(prof.mean()),
            max_chi=st.mps.max_chi, method=cooling, exact_ok=rep.succeeded,
            wall_ms=wall, entropies=prof))
    return records, st


def _run_trajectory_task(args):
    n, t_max, theta, cooling, trunc, seed, timing = args
    records, _ = run_trajectory(n, t_max, theta, cooling, trunc,
                                seed, _TASK_TABLES, timing)
    return records


_TASK_TABLES: dict = {}


def _worker_count() -> int:
    env = os.environ.get("CTNSIM_WORKERS")
    if env is not None:
        return max(1, int(env))
    return min(2, os.cpu_count() or 1)


def _run_ensemble(tasks, tables):
    """Run trajectory tasks, forking workers when it pays off."""
    global _TASK_TABLES
    _TASK_TABLES = tables
    nworkers = _worker_count()
    if nworkers > 1 and len(tasks) > 1:
        import multiprocessing as mp
        ctx = mp.get_context("fork")
        with ctx.Pool(nworkers) as pool:
            out = pool.map(_run_trajectory_task, tasks)
    else:
        out = [_run_trajectory_task(t) for t in tasks]
    return [rec for batch in out for rec in batch]


def run_doped_circuit(cfg: ExperimentConfig):
    """Ensemble records for doped_t / angle_scan kinds."""
    if cfg.kind not in ("doped_t", "angle_scan"):
        raise ValidationError(f"run_doped_circuit got kind {cfg.kind!r}")
    thetas = tuple(cfg.theta) if cfg.kind == "angle_scan" else (np.pi / 4,)
    tables = _tables_for(cfg.cooling)
    tasks = []
    for theta in thetas:
        for r in range(cfg.realizations):
            tasks.append((cfg.n, cfg.t_max, float(theta), cfg.cooling, cfg.policy(),
                          realization_seed(cfg.seed, r), cfg.timing))
    return _run_ensemble(tasks, tables)


def compare_coolers(cfg: ExperimentConfig):
    """Matched-seed ensembles differing only in the cooler.

    Returns (records, summary) with summary[method] = (steps, mean, sem)
    arrays of the per-step ensemble max-entropy.
    """
    if cfg.kind == "compare_k":
        base = CoolingPolicy.parse(cfg.cooling)
        depth = base.depth if base.heuristic_k is not None else 1
        methods = [f"heuristic:k={k},d={depth}" for k in cfg.k_values]
    elif cfg.kind == "depth_scan":
        methods = [f"heuristic:k=2,d={d}" for d in cfg.depths]
    else:
        raise ValidationError(f"compare_coolers got kind {cfg.kind!r}")
    tables = {}
    for m in methods:
        tables.update(_tables_for(m))
    records = []
    for method in methods:
        tasks = [(cfg.n, cfg.t_max, np.pi / 4, method, cfg.policy(),
                  realization_seed(cfg.seed, r), cfg.timing)
                 for r in range(cfg.realizations)]
        records.extend(_run_ensemble(tasks, tables))
    return records, summarize_by_method(records)


def summarize_by_method(records):
    """Per-step mean and standard error sigma/sqrt(m) of max_entropy."""
    out = {}
    methods = sorted({r.method for r in records})
    for method in methods:
        rows = [r for r in records if r.method == method]
        steps = sorted({r.t_count for r in rows})
        mean = np.empty(len(steps))
        sem = np.empty(len(steps))
        for i, t in enumerate(steps):
            vals = np.array([r.max_entropy for r in rows if r.t_count == t])
            mean[i] = vals.mean()
            sem[i] = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        out[method] = (np.array(steps), mean, sem)
    return out


def page_bound(n: int) -> float:
    """Haar-state half-cut entropy bound per n/2 qubits: 1 - 1/(n ln 2)."""
    if n < 2:
        raise ValidationError("page_bound needs n >= 2")
    return 1.0 - 1.0 / (n * math.log(2))


def growth_rate(records, n: int, seed: int = None, theta: float = None) -> float:
    """alpha = (S(T=2n) - S(T=n)) / n for one trajectory's records."""
    rows = [r for r in records
            if (seed is None or r.seed == seed)
            and (theta is None or abs(r.theta - theta) < 1e-12)]
    by_t = {r.t_count: r.max_entropy for r in rows}
    if n not in by_t or 2 * n not in by_t:
        raise ValidationError(f"records do not cover the window [{n}, {2 * n}]")
    return (by_t[2 * n] - by_t[n]) / n


def ensemble_growth_rates(records, n: int):
    """Per-theta (mean alpha, sem, count) over the trajectories present."""
    out = {}
    thetas = sorted({r.theta for r in records})
    for theta in thetas:
        seeds = sorted({r.seed for r in records if abs(r.theta - theta) < 1e-12})
        alphas = np.array([growth_rate(records, n, seed=s, theta=theta) for s in seeds])
        sem = alphas.std(ddof=1) / math.sqrt(len(alphas)) if len(alphas) > 1 else 0.0
        out[theta] = (float(alphas.mean()), float(sem), len(alphas))
    return out


def fit_alpha_line(thetas, alphas):
    """Ordinary least-squares line through alpha(theta).

    Returns (slope, intercept, r_squared, intercept_se) with the intercept's
    standard error taken from the residual scatter (the textbook OLS sigma).
    """
    x = np.asarray(thetas, dtype=float)
    y = np.asarray(alphas, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(((y - yhat) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = max(x.size - 2, 1)
    s2 = ss_res / dof
    sxx = float(((x - x.mean()) ** 2).sum())
    intercept_se = float(np.sqrt(s2 * (1.0 / x.size + x.mean() ** 2 / sxx)))
    return float(slope), float(intercept), r2, intercept_se


def fidelity_scan(cfg: ExperimentConfig):
    """Physical-state fidelity versus bond-dimension cap.

    Builds an untruncated reference trajectory (cutoff 0, chi = 2^(n//2)),
    replays the same circuit at each capped chi, and compares final
    statevectors. Returns rows (seed, n, t_count, chi, 1/chi, fidelity).
    """
    if cfg.kind != "fidelity_scan":
        raise ValidationError(f"fidelity_scan got kind {cfg.kind!r}")
    if cfg.n > 12:
        raise ValidationError("fidelity_scan needs n <= 12 for the exact reference")
    chi_exact = 2 ** (cfg.n // 2)
    chis = tuple(cfg.chi_list) or tuple(2**j for j in range(cfg.n // 2 + 1))
    tables = _tables_for(cfg.cooling)
    rows = []
    for r in range(cfg.realizations):
        seed = realization_seed(cfg.seed, r)
        _, ref = run_trajectory(cfg.n, cfg.t_max, np.pi / 4, cfg.cooling,
                                TruncationPolicy(chi_exact, 0.0), seed, tables)
        ref_vec = ref.to_statevector()
        for chi in chis:
            trunc = TruncationPolicy(int(chi), cfg.cutoff)
            _, st = run_trajectory(cfg.n, cfg.t_max, np.pi / 4, cfg.cooling,
                                   trunc, seed, tables)
            f = float(abs(np.vdot(ref_vec, st.to_statevector())) ** 2)
            rows.append((seed, cfg.n, cfg.t_max, int(chi), 1.0 / chi, f))
    return rows


# -- circuit files --------------------------------------------------------------


def run_circuit(circuit: dict, cooling: str, trunc: TruncationPolicy, seed: int,
                timing: bool = False):
    """Execute a circuit JSON document; returns (records, final CTNState).

    Gate vocabulary: the Clifford kinds (H, S, Sdg, X, Y, Z, CX, CZ, SWAP,
    CP), RZ {q, theta}, RP {pauli, theta}, and RANDOM_CLIFFORD. Rotations
    use the gate-angle convention R_P(theta) = exp(-i theta/2 P).
    """
    from .pauli import pauli_parse
    from .tableau import CliffordGate

    try:
        n = int(circuit["n"])
        gates = circuit["gates"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"circuit document needs 'n' and 'gates': {exc}") from exc
    rng = np.random.default_rng(seed)
    policy = CoolingPolicy.parse(cooling)
    tables = _tables_for(cooling)
    table = tables.get(policy.heuristic_k)
    st = CTNState(n, trunc)
    records = []
    t_count = 0
    for i, g in enumerate(gates):
        kind = g.get("type")
        if kind is None:
            raise ValidationError(f"gate {i}: missing 'type'")
        t0 = time.perf_counter()
        if kind == "RANDOM_CLIFFORD":
            st.apply_clifford(random_clifford(n, rng))
            continue
        if kind in ("RZ", "RP"):
            theta = float(g["theta"])
            if kind == "RZ":
                rep = st.apply_rotation(theta, "Z", int(g["q"][0]), policy, table)
            else:
                rep = st.apply_pauli_rotation_gate(theta, pauli_parse(g["pauli"]),
                                                   policy, table)
            t_count += 1
            wall = (time.perf_counter() - t0) * 1e3 if timing else 0.0
            prof = rep.entropies_after
            records.append(TrajectoryRecord(
                seed=seed, step=t_count, t_count=t_count, theta=theta,
                max_entropy=float(prof.max()), mean_entropy=float(prof.mean()),
                max_chi=st.mps.max_chi, method=cooling, exact_ok=rep.succeeded,
                wall_ms=wall))
            continue
        try:
            st.apply_clifford(CliffordGate.from_json(g))
        except (KeyError, ValidationError) as exc:
            raise ValidationError(f"gate {i}: {exc}") from exc
    return records, st


# -- CSV ----------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    return str(value)


def emit_csv(records, path):
    """Trajectory records with the fixed column order; deterministic bytes."""
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in records:
                writer.writerow([_fmt(v) for v in (
                    r.seed, r.step, r.t_count, r.theta, r.max_entropy,
                    r.mean_entropy, r.max_chi, r.method, r.exact_ok, r.wall_ms)])
    except OSError as exc:
        raise ValidationError(f"cannot write CSV to {path}: {exc}") from exc


def emit_fidelity_csv(rows, path):
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(FIDELITY_COLUMNS)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise ValidationError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path):
    """Parse an emit_csv file back into TrajectoryRecords."""
    records = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ValidationError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            records.append(TrajectoryRecord(
                seed=int(row["seed"]), step=int(row["step"]),
                t_count=int(row["t_count"]), theta=float(row["theta"]),
                max_entropy=float(row["max_entropy"]),
                mean_entropy=float(row["mean_entropy"]),
                max_chi=int(row["max_chi"]), method=row["method"],
                exact_ok=None if row["exact_ok"] == "" else row["exact_ok"] == "1",
                wall_ms=float(row["wall_ms"])))
    return records
