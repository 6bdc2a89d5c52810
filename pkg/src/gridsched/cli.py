"""Batch command-line front end.

Subcommands: validate, solve, evaluate, export, compare.  Progress goes to
stderr; stdout carries only the machine-readable summary lines.  Exit
codes: 0 success, 1 invalid instance / infeasible model / failed check,
2 I/O failure, 3 solver limit without an incumbent, 64 usage error.

``GRIDSCHED_THREADS`` caps solver workers (both engines run
single-threaded, so any value above 1 is accepted and ignored);
``GRIDSCHED_ENGINE`` overrides the engine selection (simplex|highs|auto).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .domain import validate
from .evaluate import check_feasibility
from .formulation import CaseConfig, build
from .io import (
    InstanceJsonError,
    InstanceSchemaError,
    InstanceValidationError,
    export_mps,
    read_instance,
    read_result_bundle,
    write_results,
)
from .milp import SolverConfig
from .run import CASE_MODES, SolveError, compare_cases, solve_case

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2
EXIT_LIMIT = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"usage error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _config(args) -> SolverConfig:
    kw = {}
    if getattr(args, "gap", None) is not None:
        kw["rel_gap"] = args.gap
    if getattr(args, "node_limit", None) is not None:
        kw["node_limit"] = args.node_limit
    engine = os.environ.get("GRIDSCHED_ENGINE", "").strip()
    if engine:
        kw["engine"] = engine
    threads = os.environ.get("GRIDSCHED_THREADS", "").strip()
    if threads:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            _log(f"ignoring invalid GRIDSCHED_THREADS={threads!r}")
        else:
            if int(threads) > 1:
                _log("GRIDSCHED_THREADS > 1 requested; engines run single-threaded")
    return SolverConfig(**kw)


def _load(path: str):
    try:
        return read_instance(path), EXIT_OK
    except OSError as e:
        _log(f"cannot read {path}: {e}")
        return None, EXIT_IO
    except (InstanceJsonError, InstanceSchemaError, InstanceValidationError) as e:
        return e, EXIT_FAIL


def cmd_validate(args) -> int:
    try:
        text = Path(args.instance).read_text(encoding="utf-8")
    except OSError as e:
        _log(f"cannot read {args.instance}: {e}")
        return EXIT_IO
    del text
    loaded, code = _load(args.instance)
    if code == EXIT_IO:
        return EXIT_IO
    if code == EXIT_OK:
        return EXIT_OK
    err = loaded
    if isinstance(err, InstanceValidationError):
        for v in err.violations:
            print(str(v))
    elif isinstance(err, InstanceSchemaError):
        for e in err.errors:
            print(f"SCHEMA at {e}")
    else:
        print(f"MALFORMED_JSON: {err}")
    return EXIT_FAIL


def cmd_solve(args) -> int:
    loaded, code = _load(args.instance)
    if code != EXIT_OK:
        if code == EXIT_FAIL:
            _log(f"invalid instance: {loaded}")
        return code
    instance = loaded
    cfg = _config(args)
    t0 = time.monotonic()
    try:
        result = solve_case(instance, args.case, cfg)
    except SolveError as e:
        _log(str(e))
        return EXIT_FAIL if e.kind == "infeasible" else EXIT_LIMIT
    wall = time.monotonic() - t0
    try:
        write_results(
            result.solution, result.report, args.out,
            instance=instance, case=result.case, response=result.response,
            config=cfg, runtime_seconds=wall, case_label=f"case{args.case}",
        )
    except OSError as e:
        _log(f"cannot write {args.out}: {e}")
        return EXIT_IO
    print(
        f"case={args.case} objective={result.report.total:.6f} "
        f"gap={result.mip.gap:.3e} nodes={result.mip.node_count} "
        f"wall_s={wall:.2f}"
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    loaded, code = _load(args.instance)
    if code != EXIT_OK:
        if code == EXIT_FAIL:
            _log(f"invalid instance: {loaded}")
        return code
    instance = loaded
    cfg = _config(args)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        _log(f"cannot write {args.out}: {e}")
        return EXIT_IO
    results = []
    for c in (1, 2, 3):
        t0 = time.monotonic()
        try:
            res = solve_case(instance, c, cfg)
        except SolveError as e:
            _log(str(e))
            return EXIT_FAIL if e.kind == "infeasible" else EXIT_LIMIT
        wall = time.monotonic() - t0
        write_results(
            res.solution, res.report, out / f"case{c}",
            instance=instance, case=res.case, response=res.response,
            config=cfg, runtime_seconds=wall, case_label=f"case{c}",
        )
        results.append(res)
        _log(f"case {c} done: total={res.report.total:.2f} wall={wall:.1f}s")
    cols = ("production", "startup", "shutdown", "unserved", "spillage",
            "post_contingency_unserved", "frequency", "pev_capacity",
            "pev_deployment")
    lines = ["case," + ",".join(cols) + ",total"]
    for res in results:
        rep = res.report
        vals = [f"{getattr(rep, c):.9g}" for c in cols]
        lines.append(f"case{res.case_number}," + ",".join(vals) + f",{rep.total:.9g}")
    (out / "comparison.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for res in results:
        print(
            f"case={res.case_number} objective={res.report.total:.6f} "
            f"gap={res.mip.gap:.3e} nodes={res.mip.node_count} "
            f"wall_s={res.runtime_seconds:.2f}"
        )
    return EXIT_OK


def cmd_export(args) -> int:
    if args.format != "mps":
        print(f"usage error: unknown format {args.format!r}", file=sys.stderr)
        return EXIT_USAGE
    loaded, code = _load(args.instance)
    if code != EXIT_OK:
        if code == EXIT_FAIL:
            _log(f"invalid instance: {loaded}")
        return code
    instance = loaded
    model, _ = build(instance, CaseConfig(mode=CASE_MODES[args.case]))
    try:
        export_mps(model, args.out)
    except OSError as e:
        _log(f"cannot write {args.out}: {e}")
        return EXIT_IO
    _log(f"wrote {model.n_rows} rows / {model.n_cols} columns to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    loaded, code = _load(args.instance)
    if code != EXIT_OK:
        if code == EXIT_FAIL:
            _log(f"invalid instance: {loaded}")
        return code
    instance = loaded
    try:
        schedule, response, report, meta = read_result_bundle(instance, args.results)
    except OSError as e:
        _log(f"cannot read bundle {args.results}: {e}")
        return EXIT_IO
    label = str(meta.get("case", "case3"))
    number = {"case1": 1, "case2": 2, "case3": 3}.get(label)
    if number is None:
        mode = next((m for m in CASE_MODES.values() if m.value == label), None)
        case = CaseConfig(mode=mode) if mode else CaseConfig(mode=CASE_MODES[3])
    else:
        case = CaseConfig(mode=CASE_MODES[number])
    if response is None:
        case = CaseConfig(mode=CASE_MODES[1])
    violations = check_feasibility(instance, case, schedule, response)
    for v in violations:
        print(str(v))
    return EXIT_OK if not violations else EXIT_FAIL


def main(argv=None) -> int:
    parser = _Parser(prog="gridsched",
                     description="Day-ahead scheduling with EV frequency reserve")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("--instance", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("solve", help="solve one study case")
    p.add_argument("--instance", required=True)
    p.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gap", type=float, default=None)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the pipeline is deterministic")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("compare", help="run all three cases and tabulate costs")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gap", type=float, default=None)
    p.add_argument("--node-limit", type=int, default=None)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("export", help="write the model in MPS format")
    p.add_argument("--instance", required=True)
    p.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--format", default="mps")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("evaluate", help="re-check a result bundle offline")
    p.add_argument("--instance", required=True)
    p.add_argument("--results", required=True)
    p.set_defaults(fn=cmd_evaluate)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
