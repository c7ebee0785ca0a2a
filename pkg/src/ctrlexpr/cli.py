"""Command-line front end.

Usage::

    ctrlexpr test SPEC [--oracle] [--seed N] [--json PATH] [--trace]
    ctrlexpr specs

Exit codes: 0 controllable, 1 not controllable, 2 inconclusive,
64 usage error, 65 invalid spec file, 66 missing input, 74 I/O error.
A spec path that does not exist but names one of the bundled files
(for example ``examples/psc_controllable.spec``) resolves to the copy
shipped with the package.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, kernels
from .circuit import TestType
from .controllability import TrialScan, Verdict, initial_state_vector, run_test
from .lie_oracle import density_matrix, generate_algebra, pure_state_rank
from .specfile import SpecError, SystemSpec, bundled_specs, load_spec, spec_to_dict

__all__ = ["SCHEMA_VERSION", "build_report", "dumps_report", "run_spec", "main"]

SCHEMA_VERSION = 1

EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66
EX_IOERR = 74


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctrlexpr", description="Controllability tests via dimensional expressivity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    test = sub.add_parser("test", help="run a controllability test on a spec file")
    test.add_argument("spec", help="path to a system spec file")
    test.add_argument("--oracle", action="store_true", help="cross-check with the Lie-algebra rank condition")
    test.add_argument("--seed", type=int, help="override the seed from the spec file")
    test.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    test.add_argument("--trace", action="store_true", help="print the per-slot rank trace")
    sub.add_parser("specs", help="list the bundled spec files")
    return parser


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = bundled_specs().get(p.name)
    if bundled is not None:
        print(f"note: {path} not found, using bundled {bundled}", file=sys.stderr)
        return bundled
    raise FileNotFoundError(path)


def _scan_record(trial: TrialScan) -> dict:
    s = trial.scan
    return {
        "layers": trial.layers,
        "resample": trial.resample,
        "expressivity": s.expressivity,
        "before_last_layer": trial.before_last_layer,
        "independent_slots": list(s.independent_slots),
        "rank_trace": list(s.rank_trace),
        "saturation_slot": s.saturation_slot,
        "theta": list(s.theta),
    }


def _oracle(spec: SystemSpec) -> dict:
    system = spec.control_system()
    algebra = generate_algebra(system)
    d = system.dim
    if spec.test.test_type is TestType.OC:
        return {
            "kind": "operator",
            "algebra_dim": algebra.dim,
            "target": d * d - 1,
            "controllable": algebra.dim == d * d - 1,
        }
    rank = pure_state_rank(system, density_matrix(initial_state_vector(spec.test, d)), algebra=algebra)
    return {
        "kind": "pure-state",
        "algebra_dim": algebra.dim,
        "orbit_dim": rank,
        "target": 2 * d - 2,
        "controllable": rank == 2 * d - 2,
    }


def build_report(spec: SystemSpec, verdict: Verdict, oracle: dict | None = None,
                 timings: dict | None = None) -> dict:
    """Report document; everything except ``timings`` is deterministic."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": spec_to_dict(spec),
        "verdict": {
            "outcome": verdict.outcome.value,
            "algorithm_code": verdict.outcome.algorithm_code,
            "exit_code": verdict.outcome.exit_code,
            "expressivity_target": verdict.expressivity_target,
            "best_expressivity": verdict.best_expressivity,
            "layers_initial": verdict.layers_initial,
            "layers_used": verdict.layers_used,
            "params_per_layer": verdict.params_per_layer,
            "saturation_slot": verdict.saturation_slot,
            "saturation_layer": verdict.saturation_layer,
            "seed": verdict.seed,
            "aux_frequencies": None if verdict.aux_frequencies is None else list(verdict.aux_frequencies),
        },
        "scans": [_scan_record(t) for t in verdict.scans],
        "resample_history": [_scan_record(t) for t in verdict.resample_history],
    }
    if oracle is not None:
        oracle = dict(oracle)
        if verdict.outcome.algorithm_code != 2:
            oracle["agrees"] = oracle["controllable"] == (verdict.outcome.algorithm_code == 1)
        else:
            oracle["agrees"] = None
        report["oracle"] = oracle
    report["timings"] = dict(timings or {})
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run_spec(spec: SystemSpec, oracle: bool = False) -> dict:
    """Run the test described by ``spec`` and return its report."""
    t0 = time.perf_counter()
    verdict = run_test(spec.control_system(), spec.test, spec.aux_frequencies)
    t1 = time.perf_counter()
    timings = {"test_seconds": t1 - t0}
    check = None
    if oracle:
        check = _oracle(spec)
        timings["oracle_seconds"] = time.perf_counter() - t1
    timings["backend"] = kernels.BACKEND
    return build_report(spec, verdict, check, timings)


def _print_summary(spec: SystemSpec, report: dict, trace: bool, out) -> None:
    v = report["verdict"]
    target = v["expressivity_target"]
    cfg = spec.test
    print(f"ctrlexpr {__version__}: {cfg.test_type.value} test, {spec.qubits} qubits, "
          f"{len(spec.controls)} controls, seed {cfg.seed}", file=out)
    for rec in report["scans"]:
        print(f"layers {rec['layers']}: expressivity {rec['expressivity']}/{target} "
              f"(before last layer {rec['before_last_layer']})", file=out)
        if trace:
            for slot, rank in enumerate(rec["rank_trace"]):
                mark = " *" if slot in rec["independent_slots"] else ""
                print(f"  slot {slot:3d} layer {slot // v['params_per_layer'] + 1:3d} rank {rank:3d}{mark}", file=out)
    for rec in report["resample_history"]:
        print(f"  resample {rec['resample']} at {rec['layers']} layers: expressivity "
              f"{rec['expressivity']}/{target} (before last layer {rec['before_last_layer']})", file=out)
    print(f"verdict: {v['outcome']}, expressivity {v['best_expressivity']}/{target}, "
          f"{v['layers_used']} layers, saturation at layer {v['saturation_layer']}", file=out)
    oracle = report.get("oracle")
    if oracle is not None:
        if oracle["kind"] == "operator":
            detail = f"dim L = {oracle['algebra_dim']}/{oracle['target']}"
        else:
            detail = f"dim L = {oracle['algebra_dim']}, orbit dimension {oracle['orbit_dim']}/{oracle['target']}"
        agree = {True: "agrees", False: "DISAGREES", None: "no verdict to compare"}[oracle["agrees"]]
        print(f"oracle: {detail}, controllable={oracle['controllable']} ({agree})", file=out)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EX_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "specs":
        for name, path in sorted(bundled_specs().items()):
            print(f"{name}\t{path}")
        return 0

    try:
        spec = load_spec(_resolve(args.spec))
    except FileNotFoundError:
        print(f"ctrlexpr: no such spec file: {args.spec}", file=sys.stderr)
        return EX_NOINPUT
    except SpecError as exc:
        print(f"ctrlexpr: {exc}", file=sys.stderr)
        return EX_DATAERR
    except (OSError, UnicodeDecodeError) as exc:
        print(f"ctrlexpr: cannot read {args.spec}: {exc}", file=sys.stderr)
        return EX_IOERR
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("ctrlexpr: --seed must be an unsigned 64-bit integer", file=sys.stderr)
            return EX_USAGE
        spec = dataclasses.replace(spec, test=dataclasses.replace(spec.test, seed=args.seed))

    try:
        report = run_spec(spec, oracle=args.oracle)
    except ValueError as exc:
        print(f"ctrlexpr: {exc}", file=sys.stderr)
        return EX_DATAERR

    to_stdout = args.json == "-"
    _print_summary(spec, report, args.trace, sys.stderr if to_stdout else sys.stdout)
    if args.json:
        text = dumps_report(report)
        if to_stdout:
            sys.stdout.write(text)
        else:
            try:
                Path(args.json).write_text(text, encoding="utf-8")
            except OSError as exc:
                print(f"ctrlexpr: cannot write {args.json}: {exc}", file=sys.stderr)
                return EX_IOERR
    return report["verdict"]["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
