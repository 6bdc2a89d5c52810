"""External formats: instance JSON, result bundles, and MPS model export.

The instance document and the bundle CSV headers are normative and
versioned (``format_version`` "1.0").  Floats in CSV files carry 9
significant digits; instance JSON round-trips exactly (Python's shortest
round-trip float formatting).
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from .domain import (
    Bus,
    Consumer,
    Contingency,
    ConventionalUnit,
    Instance,
    Line,
    PevGroup,
    RenewableUnit,
    SystemParams,
    validate,
)
from .evaluate import (
    ContingencyResponse,
    CostReport,
    Schedule,
    derive_base_soc,
)
from .formulation import CaseConfig, CaseMode, Solution
from .milp import MilpModel, SENSE_EQ, SENSE_GE, SENSE_LE, SolverConfig

FORMAT_VERSION = "1.0"

__all__ = [
    "FORMAT_VERSION",
    "InstanceJsonError",
    "InstanceSchemaError",
    "InstanceValidationError",
    "read_instance",
    "write_instance",
    "instance_to_dict",
    "instance_from_dict",
    "write_results",
    "read_result_bundle",
    "export_mps",
    "read_mps",
    "INSTANCE_SCHEMA",
]


class InstanceJsonError(ValueError):
    """The file is not well-formed JSON."""


class InstanceSchemaError(ValueError):
    """The document does not match the instance schema."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class InstanceValidationError(ValueError):
    """The parsed instance violates a domain invariant."""

    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


_ID = {"type": "string", "pattern": "^[A-Za-z0-9][A-Za-z0-9_.@-]*$"}
_NUM = {"type": "number"}
_VEC = {"type": "array", "items": {"type": "number"}}

INSTANCE_SCHEMA: dict = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format_version", "system", "buses", "lines", "conventional_units",
                 "renewable_units", "consumers", "pev_groups", "contingencies"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"type": "string"},
        "system": {
            "type": "object",
            "required": ["n_periods"],
            "additionalProperties": False,
            "properties": {
                "n_periods": {"type": "integer", "minimum": 1},
                "period_length": _NUM,
                "currency": {"type": "string"},
                "c_unserved": _NUM,
                "c_spill": _NUM,
                "c_freq": _NUM,
                "delta_f_max": _NUM,
                "d_pr": _NUM,
            },
        },
        "buses": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "additionalProperties": False,
                "properties": {"id": _ID, "is_slack": {"type": "boolean"}},
            },
        },
        "lines": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "from_bus", "to_bus", "reactance", "capacity"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID, "from_bus": _ID, "to_bus": _ID,
                    "reactance": _NUM, "capacity": _VEC,
                },
            },
        },
        "conventional_units": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "bus", "cost", "p_max", "p_min", "p0", "u0",
                             "su_cost", "sd_cost", "ramp_up", "ramp_down",
                             "min_up", "min_down", "init_must_run",
                             "init_must_stop", "droop"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID, "bus": _ID, "cost": _NUM, "p_max": _NUM,
                    "p_min": _NUM, "p0": _NUM, "u0": {"type": "boolean"},
                    "su_cost": _NUM, "sd_cost": _NUM, "ramp_up": _NUM,
                    "ramp_down": _NUM, "min_up": {"type": "integer"},
                    "min_down": {"type": "integer"},
                    "init_must_run": {"type": "integer"},
                    "init_must_stop": {"type": "integer"}, "droop": _NUM,
                },
            },
        },
        "renewable_units": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "bus", "cost", "p_max", "availability"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID, "bus": _ID, "cost": _NUM, "p_max": _NUM,
                    "availability": _VEC,
                },
            },
        },
        "consumers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "bus", "demand"],
                "additionalProperties": False,
                "properties": {"id": _ID, "bus": _ID, "demand": _VEC},
            },
        },
        "pev_groups": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "counts", "e_max", "e_min", "e_initial",
                             "e_final", "p_max", "efficiency", "window_start",
                             "window_end", "droop", "capacity_offer",
                             "deployment_offer"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "counts": {"type": "object",
                               "additionalProperties": {"type": "integer"}},
                    "e_max": _NUM, "e_min": _NUM, "e_initial": _NUM,
                    "e_final": _NUM, "p_max": _NUM, "efficiency": _NUM,
                    "window_start": {"type": "integer"},
                    "window_end": {"type": "integer"},
                    "droop": _NUM, "capacity_offer": _NUM,
                    "deployment_offer": _NUM,
                    "capacity_offer_profile": _VEC,
                    "deployment_offer_profile": _VEC,
                },
            },
        },
        "contingencies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "outaged_units"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "outaged_units": {"type": "array", "items": _ID, "minItems": 1},
                },
            },
        },
    },
}


def instance_from_dict(doc: dict) -> Instance:
    """Build an Instance from a schema-valid document (no domain checks)."""
    sysd = doc["system"]
    params = SystemParams(
        c_unserved=float(sysd.get("c_unserved", 10000.0)),
        c_spill=float(sysd.get("c_spill", 0.0)),
        c_freq=float(sysd.get("c_freq", 0.0)),
        delta_f_max=float(sysd.get("delta_f_max", 1.0)),
        d_pr=float(sysd.get("d_pr", 0.25)),
        n_periods=int(sysd["n_periods"]),
        period_length=float(sysd.get("period_length", 1.0)),
        currency=sysd.get("currency", "BRL"),
    )
    return Instance(
        buses=tuple(Bus(b["id"], bool(b.get("is_slack", False))) for b in doc["buses"]),
        lines=tuple(
            Line(l["id"], l["from_bus"], l["to_bus"], float(l["reactance"]),
                 tuple(float(x) for x in l["capacity"]))
            for l in doc["lines"]
        ),
        conventional_units=tuple(
            ConventionalUnit(
                g["id"], g["bus"], float(g["cost"]), float(g["p_max"]),
                float(g["p_min"]), float(g["p0"]), bool(g["u0"]),
                float(g["su_cost"]), float(g["sd_cost"]), float(g["ramp_up"]),
                float(g["ramp_down"]), int(g["min_up"]), int(g["min_down"]),
                int(g["init_must_run"]), int(g["init_must_stop"]), float(g["droop"]),
            )
            for g in doc["conventional_units"]
        ),
        renewable_units=tuple(
            RenewableUnit(g["id"], g["bus"], float(g["cost"]), float(g["p_max"]),
                          tuple(float(x) for x in g["availability"]))
            for g in doc["renewable_units"]
        ),
        consumers=tuple(
            Consumer(d["id"], d["bus"], tuple(float(x) for x in d["demand"]))
            for d in doc["consumers"]
        ),
        pev_groups=tuple(
            PevGroup(
                v["id"], dict(v["counts"]), float(v["e_max"]), float(v["e_min"]),
                float(v["e_initial"]), float(v["e_final"]), float(v["p_max"]),
                float(v["efficiency"]), int(v["window_start"]), int(v["window_end"]),
                float(v["droop"]), float(v["capacity_offer"]),
                float(v["deployment_offer"]),
                tuple(float(x) for x in v["capacity_offer_profile"])
                if "capacity_offer_profile" in v else None,
                tuple(float(x) for x in v["deployment_offer_profile"])
                if "deployment_offer_profile" in v else None,
            )
            for v in doc["pev_groups"]
        ),
        contingencies=tuple(
            Contingency(k["id"], tuple(k["outaged_units"])) for k in doc["contingencies"]
        ),
        params=params,
    )


def instance_to_dict(instance: Instance) -> dict:
    p = instance.params
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "system": {
            "n_periods": p.n_periods,
            "period_length": p.period_length,
            "currency": p.currency,
            "c_unserved": p.c_unserved,
            "c_spill": p.c_spill,
            "c_freq": p.c_freq,
            "delta_f_max": p.delta_f_max,
            "d_pr": p.d_pr,
        },
        "buses": [{"id": b.id, "is_slack": b.is_slack} for b in instance.buses],
        "lines": [
            {"id": l.id, "from_bus": l.from_bus, "to_bus": l.to_bus,
             "reactance": l.reactance, "capacity": list(l.capacity)}
            for l in instance.lines
        ],
        "conventional_units": [
            {"id": g.id, "bus": g.bus, "cost": g.cost, "p_max": g.p_max,
             "p_min": g.p_min, "p0": g.p0, "u0": g.u0, "su_cost": g.su_cost,
             "sd_cost": g.sd_cost, "ramp_up": g.ramp_up, "ramp_down": g.ramp_down,
             "min_up": g.min_up, "min_down": g.min_down,
             "init_must_run": g.init_must_run, "init_must_stop": g.init_must_stop,
             "droop": g.droop}
            for g in instance.conventional_units
        ],
        "renewable_units": [
            {"id": g.id, "bus": g.bus, "cost": g.cost, "p_max": g.p_max,
             "availability": list(g.availability)}
            for g in instance.renewable_units
        ],
        "consumers": [
            {"id": d.id, "bus": d.bus, "demand": list(d.demand)}
            for d in instance.consumers
        ],
        "pev_groups": [],
        "contingencies": [
            {"id": k.id, "outaged_units": list(k.outaged_units)}
            for k in instance.contingencies
        ],
    }
    for v in instance.pev_groups:
        entry = {
            "id": v.id, "counts": {n: v.counts[n] for n in sorted(v.counts)},
            "e_max": v.e_max, "e_min": v.e_min, "e_initial": v.e_initial,
            "e_final": v.e_final, "p_max": v.p_max, "efficiency": v.efficiency,
            "window_start": v.window_start, "window_end": v.window_end,
            "droop": v.droop, "capacity_offer": v.capacity_offer,
            "deployment_offer": v.deployment_offer,
        }
        if v.capacity_offer_profile is not None:
            entry["capacity_offer_profile"] = list(v.capacity_offer_profile)
        if v.deployment_offer_profile is not None:
            entry["deployment_offer_profile"] = list(v.deployment_offer_profile)
        doc["pev_groups"].append(entry)
    return doc


def read_instance(path: str | os.PathLike) -> Instance:
    """Parse, schema-check and domain-validate an instance document.

    Raises InstanceJsonError / InstanceSchemaError / InstanceValidationError
    for the three distinct failure kinds; error messages carry JSON
    pointers.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceJsonError(f"malformed JSON: {e}") from e
    validator = jsonschema.Draft7Validator(INSTANCE_SCHEMA)
    errors = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        errors.append(f"{pointer}: {err.message}")
    if errors:
        raise InstanceSchemaError(errors)
    instance = instance_from_dict(doc)
    violations = validate(instance)
    if violations:
        raise InstanceValidationError(violations)
    return instance


def write_instance(instance: Instance, path: str | os.PathLike) -> None:
    Path(path).write_text(
        json.dumps(instance_to_dict(instance), indent=2) + "\n", encoding="utf-8"
    )


# -- result bundles -----------------------------------------------------------


def _f(x: float) -> str:
    return f"{float(x):.9g}"


def _write_csv(path: Path, header: str, rows) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_results(
    solution: Solution,
    report: CostReport,
    path: str | os.PathLike,
    *,
    instance: Instance,
    case: CaseConfig,
    response: Optional[ContingencyResponse] = None,
    config: Optional[SolverConfig] = None,
    runtime_seconds: Optional[float] = None,
    case_label: str = "",
) -> Path:
    """Write the result bundle directory (overwrites existing files).

    Bundle contents: schedule.csv, pev.csv, pfr.csv, freq.csv,
    unserved.csv, flows.csv, angles.csv, costs.json, meta.json, plus
    pev_response.csv and reserve_capacity.csv when reserve data exists.
    Together with the instance document they are sufficient to re-run the
    feasibility oracle offline.
    """
    from .evaluate import extract_response, extract_schedule  # cycle-free

    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    inst = instance
    sched = extract_schedule(inst, solution)
    if response is None:
        response = extract_response(inst, solution)
    T = inst.params.n_periods

    rows = []
    for g in inst.conventional_units:
        for t in range(1, T + 1):
            rows.append((g.id, str(t), _f(sched.power[(g.id, t)]),
                         _f(sched.commit[(g.id, t)])))
    for g in inst.renewable_units:
        for t in range(1, T + 1):
            rows.append((g.id, str(t), _f(sched.power[(g.id, t)]), _f(1.0)))
    _write_csv(out / "schedule.csv", "g,t,p,u", rows)

    rows = []
    for v, n in inst.pev_pairs():
        for t in range(1, T + 1):
            rows.append((v.id, n, str(t), _f(sched.ev_charge[(v.id, n, t)]),
                         _f(sched.ev_discharge[(v.id, n, t)])))
    _write_csv(out / "pev.csv", "v,n,t,e_charge,e_discharge", rows)

    rows = []
    if response is not None:
        for k in inst.contingencies:
            for t in range(1, T + 1):
                for g in list(inst.conventional_units) + list(inst.renewable_units):
                    rows.append((k.id, str(t), g.id,
                                 _f(response.gen_pfr[(g.id, t, k.id)])))
                for v, n in inst.pev_pairs():
                    if t in v.window():
                        rows.append((k.id, str(t), f"{v.id}@{n}",
                                     _f(response.ev_pfr[(v.id, n, t, k.id)])))
    _write_csv(out / "pfr.csv", "k,t,g_or_group,response", rows)

    rows = []
    if response is not None:
        for k in inst.contingencies:
            for t in range(1, T + 1):
                rows.append((k.id, str(t), _f(response.freq_dev[(t, k.id)])))
    _write_csv(out / "freq.csv", "k,t,delta_f", rows)

    rows = []
    for d in inst.consumers:
        for t in range(1, T + 1):
            rows.append((d.id, str(t), "pre", _f(sched.unserved[(d.id, t)])))
    if response is not None:
        for k in inst.contingencies:
            for d in inst.consumers:
                for t in range(1, T + 1):
                    rows.append((d.id, str(t), k.id,
                                 _f(response.unserved_pfr[(d.id, t, k.id)])))
    _write_csv(out / "unserved.csv", "d,t,k_or_pre,value", rows)

    _write_csv(out / "flows.csv", "l,t,flow",
               [(l.id, str(t), _f(sched.flow[(l.id, t)]))
                for l in inst.lines for t in range(1, T + 1)])
    _write_csv(out / "angles.csv", "n,t,angle",
               [(n.id, str(t), _f(sched.angle[(n.id, t)]))
                for n in inst.buses for t in range(1, T + 1)])

    if response is not None and inst.contingencies:
        rows = []
        for k in inst.contingencies:
            for v, n in inst.pev_pairs():
                for t in v.window():
                    key = (v.id, n, t, k.id)
                    rows.append((k.id, v.id, n, str(t),
                                 _f(response.ev_pfr_charge[key]),
                                 _f(response.ev_pfr_discharge[key]),
                                 _f(response.charge_cut_energy[key]),
                                 _f(response.discharge_energy[key]),
                                 _f(response.soc[key])))
        _write_csv(out / "pev_response.csv",
                   "k,v,n,t,p_charge_reduction,p_discharge_add,e_charge_cut,"
                   "e_discharge,soc", rows)
    if sched.pfr_capacity:
        _write_csv(out / "reserve_capacity.csv", "v,n,t,capacity",
                   [(v.id, n, str(t), _f(sched.pfr_capacity[(v.id, n, t)]))
                    for v, n in inst.pev_pairs() for t in range(1, T + 1)])

    costs = report.to_dict()
    costs["currency"] = inst.params.currency
    (out / "costs.json").write_text(json.dumps(costs, indent=2) + "\n",
                                    encoding="utf-8")
    cfg = config or SolverConfig()
    meta = {
        "format_version": FORMAT_VERSION,
        "case": case_label or case.mode.value,
        "solver": {
            "engine": cfg.engine,
            "rel_gap": cfg.rel_gap,
            "abs_gap": cfg.abs_gap,
            "int_tol": cfg.int_tol,
            "feas_tol": cfg.feas_tol,
            "node_limit": cfg.node_limit,
            "time_limit": cfg.time_limit,
            "branch_rule": cfg.branch_rule,
            "node_order": cfg.node_order,
        },
        "status": solution.status,
        "objective": solution.objective,
        "bound": solution.bound,
        "gap": solution.gap,
        "node_count": solution.node_count,
        "runtime_seconds": runtime_seconds,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return out


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:] if ln]


def read_result_bundle(
    instance: Instance, path: str | os.PathLike
) -> tuple[Schedule, Optional[ContingencyResponse], CostReport, dict]:
    """Load a bundle back into oracle-checkable structures.

    Spill and the pre-contingency battery path are reconstructed from the
    stored schedule (they are pinned by equalities given the stored
    values).
    """
    out = Path(path)
    inst = instance
    _, rows = _read_csv(out / "schedule.csv")
    power, commit = {}, {}
    conv_ids = {g.id for g in inst.conventional_units}
    for g, t, p, u in rows:
        power[(g, int(t))] = float(p)
        if g in conv_ids:
            commit[(g, int(t))] = float(u)
    spill = {}
    for g in inst.renewable_units:
        for t in inst.periods():
            spill[(g.id, t)] = g.p_max * g.availability[t - 1] - power[(g.id, t)]
    _, rows = _read_csv(out / "pev.csv")
    ev_charge, ev_discharge = {}, {}
    for v, n, t, ec, ed in rows:
        ev_charge[(v, n, int(t))] = float(ec)
        ev_discharge[(v, n, int(t))] = float(ed)
    _, rows = _read_csv(out / "unserved.csv")
    unserved, unserved_pfr = {}, {}
    for d, t, kp, val in rows:
        if kp == "pre":
            unserved[(d, int(t))] = float(val)
        else:
            unserved_pfr[(d, int(t), kp)] = float(val)
    _, rows = _read_csv(out / "flows.csv")
    flow = {(l, int(t)): float(x) for l, t, x in rows}
    _, rows = _read_csv(out / "angles.csv")
    angle = {(n, int(t)): float(x) for n, t, x in rows}
    sched = Schedule(
        power=power, commit=commit, spill=spill, unserved=unserved,
        flow=flow, angle=angle, ev_charge=ev_charge, ev_discharge=ev_discharge,
    )
    sched.base_soc = derive_base_soc(inst, sched)
    cap_path = out / "reserve_capacity.csv"
    if cap_path.exists():
        _, rows = _read_csv(cap_path)
        sched.pfr_capacity = {(v, n, int(t)): float(c) for v, n, t, c in rows}

    response = None
    _, rows = _read_csv(out / "freq.csv")
    if rows:
        freq_dev = {(int(t), k): float(x) for k, t, x in rows}
        _, rows = _read_csv(out / "pfr.csv")
        gen_pfr, ev_pfr = {}, {}
        for k, t, gog, x in rows:
            if "@" in gog:
                v, n = gog.split("@", 1)
                ev_pfr[(v, n, int(t), k)] = float(x)
            else:
                gen_pfr[(gog, int(t), k)] = float(x)
        prc, prd, ecpr, edpr, soc = {}, {}, {}, {}, {}
        pr_path = out / "pev_response.csv"
        if pr_path.exists():
            _, rows = _read_csv(pr_path)
            for k, v, n, t, a, b, c, d, e in rows:
                key = (v, n, int(t), k)
                prc[key] = float(a)
                prd[key] = float(b)
                ecpr[key] = float(c)
                edpr[key] = float(d)
                soc[key] = float(e)
        response = ContingencyResponse(
            freq_dev=freq_dev, gen_pfr=gen_pfr, unserved_pfr=unserved_pfr,
            ev_pfr=ev_pfr, ev_pfr_charge=prc, ev_pfr_discharge=prd,
            charge_cut_energy=ecpr, discharge_energy=edpr, soc=soc,
        )
    costs = json.loads((out / "costs.json").read_text(encoding="utf-8"))
    report = CostReport(**{c: costs[c] for c in CostReport.COMPONENTS})
    meta = json.loads((out / "meta.json").read_text(encoding="utf-8"))
    return sched, response, report, meta


# -- MPS ------------------------------------------------------------------------


def _mps_num(x: float) -> str:
    return f"{x:.12g}"


def export_mps(model: MilpModel, path: str | os.PathLike) -> None:
    """Free-format MPS with deterministic, collision-checked names.

    Binaries are declared through BV bounds.  The RANGES section is always
    present (empty: the formulation encodes two-sided activities as row
    pairs).
    """
    names = set(model.row_names)
    if len(names) != model.n_rows:
        raise AssertionError("duplicate row names in model")
    names |= set(model.col_names)
    if len(names) != model.n_rows + model.n_cols:
        raise AssertionError("row/column name collision")

    lines = [f"NAME {model.name}", "ROWS", " N OBJ"]
    sense_char = {SENSE_LE: "L", SENSE_GE: "G", SENSE_EQ: "E"}
    for i in range(model.n_rows):
        lines.append(f" {sense_char[model.row_sense[i]]} {model.row_names[i]}")
    lines.append("COLUMNS")
    by_col: list[list[tuple[str, float]]] = [[] for _ in range(model.n_cols)]
    for i in range(model.n_rows):
        for c, vv in zip(model.row_cols[i], model.row_vals[i]):
            by_col[int(c)].append((model.row_names[i], float(vv)))
    for j in range(model.n_cols):
        name = model.col_names[j]
        entries = []
        if model.col_obj[j] != 0.0:
            entries.append(("OBJ", model.col_obj[j]))
        entries.extend(by_col[j])
        for rname, vv in entries:
            lines.append(f" {name} {rname} {_mps_num(vv)}")
    lines.append("RHS")
    for i in range(model.n_rows):
        if model.row_rhs[i] != 0.0:
            lines.append(f" RHS {model.row_names[i]} {_mps_num(model.row_rhs[i])}")
    lines.append("RANGES")
    lines.append("BOUNDS")
    for j in range(model.n_cols):
        name = model.col_names[j]
        lo, up = model.col_lower[j], model.col_upper[j]
        if model.col_binary[j] and lo == 0.0 and up == 1.0:
            lines.append(f" BV BND {name}")
        elif lo == up:
            lines.append(f" FX BND {name} {_mps_num(lo)}")
        elif model.col_binary[j]:
            raise AssertionError(f"binary column {name} with bounds [{lo}, {up}]")
        elif math.isinf(lo) and math.isinf(up):
            lines.append(f" FR BND {name}")
        elif math.isinf(lo):
            lines.append(f" MI BND {name}")
            lines.append(f" UP BND {name} {_mps_num(up)}")
        else:
            if lo != 0.0:
                lines.append(f" LO BND {name} {_mps_num(lo)}")
            if not math.isinf(up):
                lines.append(f" UP BND {name} {_mps_num(up)}")
    lines.append("ENDATA")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_mps(path: str | os.PathLike) -> MilpModel:
    """Minimal free-format MPS reader (covers this package's exports)."""
    model = MilpModel(Path(path).stem)
    section = None
    rows: dict[str, tuple[str, int]] = {}
    row_entries: dict[str, list[tuple[int, float]]] = {}
    row_rhs: dict[str, float] = {}
    cols: dict[str, int] = {}
    col_bounds: dict[str, list[float]] = {}
    col_binary: dict[str, bool] = {}
    col_obj: dict[str, float] = {}
    obj_row = None
    order: list[str] = []
    sense_map = {"L": SENSE_LE, "G": SENSE_GE, "E": SENSE_EQ}

    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0].upper()
            if section == "NAME" and len(head) > 1:
                model.name = head[1]
            continue
        tok = raw.split()
        if section == "ROWS":
            kind, name = tok[0].upper(), tok[1]
            if kind == "N":
                if obj_row is None:
                    obj_row = name
                continue
            rows[name] = (sense_map[kind], len(order))
            order.append(name)
            row_entries[name] = []
        elif section == "COLUMNS":
            cname = tok[0]
            if cname not in cols:
                cols[cname] = len(cols)
                col_bounds[cname] = [0.0, math.inf]
                col_binary[cname] = False
                col_obj[cname] = 0.0
            for rname, val in zip(tok[1::2], tok[2::2]):
                if rname == obj_row:
                    col_obj[cname] += float(val)
                else:
                    row_entries[rname].append((cols[cname], float(val)))
        elif section == "RHS":
            for rname, val in zip(tok[1::2], tok[2::2]):
                row_rhs[rname] = float(val)
        elif section == "RANGES":
            raise NotImplementedError("RANGES entries are not supported")
        elif section == "BOUNDS":
            btype, cname = tok[0].upper(), tok[2]
            if btype == "BV":
                col_binary[cname] = True
                col_bounds[cname] = [0.0, 1.0]
            elif btype == "FX":
                col_bounds[cname] = [float(tok[3]), float(tok[3])]
            elif btype == "FR":
                col_bounds[cname] = [-math.inf, math.inf]
            elif btype == "MI":
                col_bounds[cname][0] = -math.inf
            elif btype == "PL":
                col_bounds[cname][1] = math.inf
            elif btype == "UP":
                col_bounds[cname][1] = float(tok[3])
            elif btype == "LO":
                col_bounds[cname][0] = float(tok[3])
            else:
                raise NotImplementedError(f"bound type {btype}")
        elif section == "ENDATA":
            break

    for cname, j in cols.items():
        lo, up = col_bounds[cname]
        model.add_col(cname, lo, up, col_obj[cname], col_binary[cname])
    for rname in order:
        sense, _ = rows[rname]
        entries = row_entries[rname]
        model.add_row([c for c, _ in entries], [v for _, v in entries],
                      sense, row_rhs.get(rname, 0.0), name=rname)
    return model
