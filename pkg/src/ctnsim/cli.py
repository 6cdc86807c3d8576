"""Command-line harness: circuit runs, paper-style experiments, class tables,
and the no-go theorem verifier.

    ctn run --circuit c.json --cool exact+heuristic:k=2,d=2 --out t.csv
    ctn experiment doped --n 12 --t-max 36 --realizations 50 --out doped.csv
    ctn classes --k 3 --out classes3.bin
    ctn verify theorem --samples 1000 --seed 7 --report report.json

Exit status is 0 on success and nonzero with a message on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments, gateclasses, theory
from .exceptions import CtnError

_EXPERIMENT_KINDS = {
    "doped": "doped_t",
    "compare-k": "compare_k",
    "depth": "depth_scan",
    "angles": "angle_scan",
    "fidelity": "fidelity_scan",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctn",
        description="Clifford-augmented MPS simulator with entanglement cooling")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a circuit JSON file")
    run.add_argument("--circuit", required=True, help="path to the circuit document")
    _common_sim_args(run)
    run.add_argument("--out", help="trajectory CSV output path")
    run.add_argument("--dump-state", help="write the final MPS snapshot here")
    run.set_defaults(func=_cmd_run)

    exp = sub.add_parser("experiment", help="run a doped-circuit ensemble")
    exp.add_argument("kind", choices=sorted(_EXPERIMENT_KINDS))
    exp.add_argument("--n", type=int, default=12)
    exp.add_argument("--t-max", type=int, default=24)
    exp.add_argument("--realizations", type=int, default=10)
    exp.add_argument("--theta", type=float, nargs="+", default=[np.pi / 4],
                     help="rotation angle list (angles kind)")
    exp.add_argument("--k-values", type=int, nargs="+", default=[2, 3])
    exp.add_argument("--depths", type=int, nargs="+", default=[1, 5])
    exp.add_argument("--chi-list", type=int, nargs="+", default=[])
    _common_sim_args(exp)
    exp.add_argument("--out", required=True, help="records CSV output path")
    exp.set_defaults(func=_cmd_experiment)

    cls = sub.add_parser("classes", help="build a k-local entangling-class table")
    cls.add_argument("--k", type=int, choices=(2, 3), required=True)
    cls.add_argument("--out", required=True)
    cls.set_defaults(func=_cmd_classes)

    ver = sub.add_parser("verify", help="numeric verification suites")
    ver.add_argument("target", choices=["theorem"])
    ver.add_argument("--samples", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=1)
    ver.add_argument("--exhaustive", type=int, default=0,
                     help="also brute-force this many 2-qubit instances")
    ver.add_argument("--report", help="write the JSON report here")
    ver.set_defaults(func=_cmd_verify)
    return parser


def _common_sim_args(p):
    p.add_argument("--cool", default="exact+heuristic:k=2,d=2",
                   help="none | exact | heuristic:k=K,d=D | exact+heuristic:k=K,d=D")
    p.add_argument("--chi-max", type=int, default=256)
    p.add_argument("--cutoff", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--timing", action="store_true",
                   help="record wall_ms (breaks byte-level determinism)")


def _cmd_run(args) -> int:
    with open(args.circuit) as f:
        circuit = json.load(f)
    from .mps import TruncationPolicy
    trunc = TruncationPolicy(chi_max=args.chi_max, cutoff=args.cutoff)
    records, state = experiments.run_circuit(circuit, args.cool, trunc,
                                             args.seed, args.timing)
    if args.out:
        experiments.emit_csv(records, args.out)
    if args.dump_state:
        state.mps.save(args.dump_state)
    prof = state.entropy_profile()
    print(f"n={state.n} rotations={len(records)} max_entropy="
          f"{prof.max() if prof.size else 0:.6f} max_chi={state.mps.max_chi}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = experiments.ExperimentConfig(
        kind=_EXPERIMENT_KINDS[args.kind], n=args.n, t_max=args.t_max,
        theta=tuple(args.theta), realizations=args.realizations,
        cooling=args.cool, chi_max=args.chi_max, cutoff=args.cutoff,
        seed=args.seed, k_values=tuple(args.k_values), depths=tuple(args.depths),
        chi_list=tuple(args.chi_list), timing=args.timing)
    if cfg.kind in ("doped_t", "angle_scan"):
        records = experiments.run_doped_circuit(cfg)
        experiments.emit_csv(records, args.out)
    elif cfg.kind in ("compare_k", "depth_scan"):
        records, summary = experiments.compare_coolers(cfg)
        experiments.emit_csv(records, args.out)
        for method, (steps, mean, sem) in summary.items():
            print(f"{method}: final mean max_entropy = {mean[-1]:.4f} +- {sem[-1]:.4f}")
    else:
        rows = experiments.fidelity_scan(cfg)
        experiments.emit_fidelity_csv(rows, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_classes(args) -> int:
    table = gateclasses.double_coset_classes(args.k)
    table.save(args.out)
    print(f"k={args.k}: {table.class_count} classes in {table.build_seconds:.1f}s "
          f"-> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    report = theory.verify_theorem_report(args.samples, args.seed, args.exhaustive)
    if args.report:
        with open(args.report, "w") as f:
            json.dump(report, f, indent=2)
    for key, value in report.items():
        print(f"{key}: {value}")
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CtnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
