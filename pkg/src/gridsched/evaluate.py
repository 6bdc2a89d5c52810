"""Independent verification and reporting.

``check_feasibility`` recomputes every in-case equation straight from the
instance and the solution values; it never looks at the rows the builder
generated, so it catches transcription faults in the formulation layer as
well as solver defects.  ``evaluate_ex_post`` replays contingencies
against a reserve-blind schedule; ``brute_force_commitment`` is the
enumeration oracle for the branch-and-bound solver.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import Instance, PevGroup, validate
from .formulation import (
    CaseConfig,
    CaseMode,
    Solution,
    VariableCatalog,
    build,
)
from .milp import (
    LpStatus,
    MipSolution,
    MipStatus,
    SolverConfig,
    fix_binaries,
    solve_lp,
)

RESIDUAL_TOL = 1e-6  # absolute, after scaling each relation by its largest coefficient

__all__ = [
    "Schedule",
    "ContingencyResponse",
    "CostReport",
    "EquationViolation",
    "extract_schedule",
    "extract_response",
    "check_feasibility",
    "evaluate_ex_post",
    "cost_report",
    "brute_force_commitment",
]


@dataclass
class Schedule:
    """Pre-contingency decision values keyed like the variable catalog."""

    power: dict  # (g, t) -> MW
    commit: dict  # (g, t) -> 0/1, conventional units
    spill: dict  # (g, t) -> MW, renewable units
    unserved: dict  # (d, t) -> MW
    flow: dict  # (l, t) -> MW
    angle: dict  # (n, t) -> rad
    ev_charge: dict  # (v, n, t) -> MWh
    ev_discharge: dict  # (v, n, t) -> MWh
    base_soc: dict = field(default_factory=dict)  # (v, n, t) -> MWh
    startup_cost: dict = field(default_factory=dict)  # (g, t) -> currency
    shutdown_cost: dict = field(default_factory=dict)
    pfr_capacity: dict = field(default_factory=dict)  # (v, n, t) -> MW (reserve cases)


@dataclass
class ContingencyResponse:
    """Post-contingency recourse values for every built contingency."""

    freq_dev: dict  # (t, k) -> Hz (<= 0)
    gen_pfr: dict  # (g, t, k) -> MW
    unserved_pfr: dict  # (d, t, k) -> MW
    ev_pfr: dict  # (v, n, t, k) -> MW
    ev_pfr_charge: dict  # (v, n, t, k) -> MW  (charging reduction share)
    ev_pfr_discharge: dict  # (v, n, t, k) -> MW (extra discharge share)
    charge_cut_energy: dict  # (v, n, t, k) -> MWh
    discharge_energy: dict  # (v, n, t, k) -> MWh
    soc: dict  # (v, n, t, k) -> MWh


@dataclass
class CostReport:
    """Objective decomposition; ``total`` is always the exact component sum."""

    production: float = 0.0
    startup: float = 0.0
    shutdown: float = 0.0
    unserved: float = 0.0
    spillage: float = 0.0
    post_contingency_unserved: float = 0.0
    frequency: float = 0.0
    pev_capacity: float = 0.0
    pev_deployment: float = 0.0

    COMPONENTS = (
        "production", "startup", "shutdown", "unserved", "spillage",
        "post_contingency_unserved", "frequency", "pev_capacity",
        "pev_deployment",
    )

    @property
    def total(self) -> float:
        return float(sum(getattr(self, c) for c in self.COMPONENTS))

    def to_dict(self) -> dict:
        out = {c: getattr(self, c) for c in self.COMPONENTS}
        out["total"] = self.total
        return out


@dataclass(frozen=True)
class EquationViolation:
    equation: str
    indices: tuple
    residual: float

    def __str__(self) -> str:
        idx = ",".join(str(i) for i in self.indices)
        return f"{self.equation}[{idx}] residual {self.residual:.3e}"


# -- extraction --------------------------------------------------------------


def extract_schedule(instance: Instance, solution: Solution) -> Schedule:
    fam = solution.family_values
    return Schedule(
        power=fam("power"),
        commit=fam("commit"),
        spill=fam("spill"),
        unserved=fam("unserved"),
        flow=fam("flow"),
        angle=fam("angle"),
        ev_charge=fam("ev_charge"),
        ev_discharge=fam("ev_discharge"),
        base_soc=fam("ev_soc_pre"),
        startup_cost=fam("startup_cost"),
        shutdown_cost=fam("shutdown_cost"),
        pfr_capacity=fam("pfr_capacity"),
    )


def extract_response(instance: Instance, solution: Solution) -> Optional[ContingencyResponse]:
    if not getattr(solution.catalog, "freq_dev"):
        return None
    fam = solution.family_values
    return ContingencyResponse(
        freq_dev=fam("freq_dev"),
        gen_pfr=fam("gen_pfr"),
        unserved_pfr=fam("unserved_pfr"),
        ev_pfr=fam("ev_pfr"),
        ev_pfr_charge=fam("pfr_from_charging"),
        ev_pfr_discharge=fam("pfr_from_discharging"),
        charge_cut_energy=fam("pfr_charge_cut"),
        discharge_energy=fam("pfr_discharge"),
        soc=fam("ev_soc"),
    )


def derive_base_soc(instance: Instance, schedule: Schedule) -> dict:
    """Pre-contingency battery path implied by the charge/discharge plan."""
    out = {}
    for v, n in instance.pev_pairs():
        soc = v.counts[n] * v.e_initial
        if v.window_start > 1:
            out[(v.id, n, v.window_start - 1)] = soc
        for t in v.window():
            soc = (
                soc
                + v.efficiency * schedule.ev_charge.get((v.id, n, t), 0.0)
                - schedule.ev_discharge.get((v.id, n, t), 0.0) / v.efficiency
            )
            out[(v.id, n, t)] = soc
    return out


# -- feasibility oracle --------------------------------------------------------


class _Checker:
    def __init__(self, instance: Instance):
        self.inst = instance
        self.out: list[EquationViolation] = []

    def res(self, equation, indices, lhs, sense, rhs, scale=1.0):
        gap = lhs - rhs
        if sense == "<=":
            r = max(0.0, gap)
        elif sense == ">=":
            r = max(0.0, -gap)
        else:
            r = abs(gap)
        r /= max(1.0, scale)
        if r > RESIDUAL_TOL:
            self.out.append(EquationViolation(equation, tuple(indices), r))

    def within(self, equation, indices, value, lo, hi, scale=1.0):
        self.res(equation, indices, value, ">=", lo, scale)
        self.res(equation, indices, value, "<=", hi, scale)


def check_feasibility(
    instance: Instance,
    case: CaseConfig,
    schedule: Schedule,
    response: Optional[ContingencyResponse] = None,
) -> list[EquationViolation]:
    """Recompute every in-case relation from the instance; list violations.

    Residuals are absolute after dividing each relation by its largest
    coefficient magnitude; anything above 1e-6 is reported.  ``response``
    is required whenever the case builds reserve constraints and the
    instance has contingencies (pass the ex-post response for reserve-blind
    schedules evaluated after the fact).
    """
    inst = instance
    T = inst.params.n_periods
    dt = inst.params.period_length
    ck = _Checker(inst)
    pairs = inst.pev_pairs()

    conv = {g.id: g for g in inst.conventional_units}
    renew = {g.id: g for g in inst.renewable_units}

    # Eq2 energy balance per (n, t)
    for n in inst.buses:
        for t in range(1, T + 1):
            lhs = 0.0
            scale = 1.0
            for g in itertools.chain(inst.conventional_units, inst.renewable_units):
                if g.bus == n.id:
                    lhs += schedule.power[(g.id, t)]
            for ln in inst.lines:
                if ln.to_bus == n.id:
                    lhs += schedule.flow[(ln.id, t)]
                if ln.from_bus == n.id:
                    lhs -= schedule.flow[(ln.id, t)]
            for v, nb in pairs:
                if nb == n.id:
                    lhs += (
                        schedule.ev_discharge.get((v.id, nb, t), 0.0)
                        - schedule.ev_charge.get((v.id, nb, t), 0.0)
                    ) / dt
                    scale = max(scale, 1.0 / dt)
            rhs = 0.0
            for d in inst.consumers:
                if d.bus == n.id:
                    rhs += d.demand[t - 1] - schedule.unserved[(d.id, t)]
            ck.res("Eq2", (n.id, t), lhs, "=", rhs, scale)

    # Eq3 line limits / Eq4 flow definition
    for ln in inst.lines:
        coef = 1.0 / ln.reactance
        for t in range(1, T + 1):
            f = schedule.flow[(ln.id, t)]
            cap = ln.capacity[t - 1]
            ck.within("Eq3", (ln.id, t), f, -cap, cap)
            dtheta = schedule.angle[(ln.from_bus, t)] - schedule.angle[(ln.to_bus, t)]
            ck.res("Eq4", (ln.id, t), f, "=", coef * dtheta, max(1.0, coef))
    slack = inst.slack_bus().id
    for t in range(1, T + 1):
        ck.res("SlackAngle", (slack, t), schedule.angle[(slack, t)], "=", 0.0)

    # Eq5/Eq6 output limits, binary integrality
    for g in inst.conventional_units:
        for t in range(1, T + 1):
            u = schedule.commit[(g.id, t)]
            p = schedule.power[(g.id, t)]
            ck.res("Binary", (g.id, t), abs(u - round(u)), "<=", 1e-5)
            ck.res("Eq5", (g.id, t), g.p_min * u, "<=", p, max(1.0, g.p_min))
            ck.res("Eq5", (g.id, t), p, "<=", g.p_max * u, max(1.0, g.p_max))
    for g in inst.renewable_units:
        for t in range(1, T + 1):
            p = schedule.power[(g.id, t)]
            s = schedule.spill.get((g.id, t))
            if s is None:
                s = g.p_max * g.availability[t - 1] - p
            ck.res("NonNeg", (g.id, t, "spill"), s, ">=", 0.0)
            ck.res("NonNeg", (g.id, t, "power"), p, ">=", 0.0)
            ck.res("Eq6", (g.id, t), p + s, "=", g.p_max * g.availability[t - 1],
                   max(1.0, g.p_max))

    # Eq7/Eq8 ramps
    for g in inst.conventional_units:
        for t in range(1, T + 1):
            prev = g.p0 if t == 1 else schedule.power[(g.id, t - 1)]
            p = schedule.power[(g.id, t)]
            ck.res("Eq7", (g.id, t), p - prev, "<=", g.ramp_up)
            ck.res("Eq8", (g.id, t), prev - p, "<=", g.ramp_down)

    # Eq9-Eq11 transition costs (derived when the schedule omits them)
    for g in inst.conventional_units:
        for t in range(1, T + 1):
            u_prev = (1.0 if g.u0 else 0.0) if t == 1 else schedule.commit[(g.id, t - 1)]
            du = schedule.commit[(g.id, t)] - u_prev
            csu = schedule.startup_cost.get((g.id, t), max(0.0, g.su_cost * du))
            csd = schedule.shutdown_cost.get((g.id, t), max(0.0, -g.sd_cost * du))
            sc = max(1.0, g.su_cost)
            ck.res("Eq9", (g.id, t), csu, ">=", g.su_cost * du, sc)
            ck.res("Eq10", (g.id, t), csd, ">=", -g.sd_cost * du, max(1.0, g.sd_cost))
            ck.res("Eq11", (g.id, t), min(csu, csd), ">=", 0.0, 1.0)

    # Eq12-Eq17 commitment logic
    for g in inst.conventional_units:
        u = {t: schedule.commit[(g.id, t)] for t in range(1, T + 1)}
        u[0] = 1.0 if g.u0 else 0.0
        _check_commitment_logic(ck, g, u, T)

    # pre-contingency storage path
    base = schedule.base_soc or derive_base_soc(inst, schedule)
    for v, n in pairs:
        cnt = v.counts[n]
        rate = cnt * v.p_max * dt
        for t in range(1, T + 1):
            ec = schedule.ev_charge.get((v.id, n, t), 0.0)
            ed = schedule.ev_discharge.get((v.id, n, t), 0.0)
            if t in v.window():
                ck.within("Eq27", (v.id, n, t, "charge"), ec, 0.0, rate, max(1.0, rate))
                ck.within("Eq27", (v.id, n, t, "discharge"), ed, 0.0, rate, max(1.0, rate))
            else:
                ck.res("Eq36", (v.id, n, t, "charge"), abs(ec), "<=", 0.0)
                ck.res("Eq36", (v.id, n, t, "discharge"), abs(ed), "<=", 0.0)
        prev = cnt * v.e_initial
        if v.window_start > 1:
            ck.res("Eq23Pre", (v.id, n), base[(v.id, n, v.window_start - 1)], "=",
                   prev, max(1.0, prev))
            prev = base[(v.id, n, v.window_start - 1)]
        for t in v.window():
            ec = schedule.ev_charge.get((v.id, n, t), 0.0)
            ed = schedule.ev_discharge.get((v.id, n, t), 0.0)
            soc = base[(v.id, n, t)]
            ck.res("Eq25Pre", (v.id, n, t), soc, "=",
                   prev + v.efficiency * ec - ed / v.efficiency,
                   max(1.0, 1.0 / v.efficiency))
            ck.within("Eq26Pre", (v.id, n, t), soc, cnt * v.e_min, cnt * v.e_max,
                      max(1.0, cnt * v.e_max))
            prev = soc
        ck.res("Eq24Pre", (v.id, n), base[(v.id, n, v.window_end)], ">=",
               cnt * v.e_final, max(1.0, cnt * v.e_final))

    if not inst.contingencies:
        return ck.out
    if response is None:
        if case.with_reserve:
            raise ValueError("reserve case requires a ContingencyResponse")
        return ck.out  # reserve-blind schedule checked without its recourse

    # Eq18-Eq21 generator response, Eq22 balance, unserved window
    for k in inst.contingencies:
        down = set(k.outaged_units)
        for t in range(1, T + 1):
            df = response.freq_dev[(t, k.id)]
            ck.within("DfDomain", (t, k.id), df, -inst.params.delta_f_max, 0.0)
            total = 0.0
            for g in itertools.chain(inst.conventional_units, inst.renewable_units):
                ppr = response.gen_pfr[(g.id, t, k.id)]
                total += ppr
                if g.id in down:
                    ck.res("Eq21", (g.id, t, k.id), ppr, "=",
                           -schedule.power[(g.id, t)])
                elif g.id in conv:
                    ck.res("Eq18", (g.id, t, k.id), ppr, ">=", 0.0)
                    ck.res("Eq18", (g.id, t, k.id), ppr, "<=", -df / g.droop,
                           max(1.0, 1.0 / g.droop))
                    ck.res("Eq19", (g.id, t, k.id),
                           ppr + schedule.power[(g.id, t)], "<=",
                           g.p_max * schedule.commit[(g.id, t)], max(1.0, g.p_max))
                else:
                    ck.res("Eq20", (g.id, t, k.id), ppr, "=", 0.0)
            for d in inst.consumers:
                pudpr = response.unserved_pfr[(d.id, t, k.id)]
                total += pudpr
                ck.res("NonNeg", (d.id, t, k.id, "unserved_pfr"), pudpr, ">=", 0.0)
                served_gap = schedule.unserved[(d.id, t)] + pudpr
                ck.res("UDPR", (d.id, t, k.id), served_gap, ">=", 0.0)
                if case.with_reserve:
                    # the ex-post recourse drops the upper window
                    ck.res("UDPR", (d.id, t, k.id), served_gap, "<=",
                           d.demand[t - 1], max(1.0, d.demand[t - 1]))
            for v, n in pairs:
                if t in v.window():
                    total += response.ev_pfr[(v.id, n, t, k.id)]
            ck.res("Eq22", (t, k.id), total, "=", 0.0)

    # Eq23-Eq26 contingency storage paths; Eq28-Eq37 PEV response coupling
    dpr = inst.params.d_pr
    for k in inst.contingencies:
        for v, n in pairs:
            cnt = v.counts[n]
            prev = cnt * v.e_initial
            if v.window_start > 1:
                ck.res("Eq23", (v.id, n, k.id),
                       response.soc[(v.id, n, v.window_start - 1, k.id)], "=", prev,
                       max(1.0, prev))
                prev = response.soc[(v.id, n, v.window_start - 1, k.id)]
            for t in v.window():
                key = (v.id, n, t, k.id)
                ec = schedule.ev_charge.get((v.id, n, t), 0.0)
                ed = schedule.ev_discharge.get((v.id, n, t), 0.0)
                ecpr = response.charge_cut_energy[key]
                edpr = response.discharge_energy[key]
                soc = response.soc[key]
                ck.res("Eq25", key, soc, "=",
                       prev + v.efficiency * (ec - ecpr) - (ed + edpr) / v.efficiency,
                       max(1.0, 1.0 / v.efficiency))
                ck.within("Eq26", key, soc, cnt * v.e_min, cnt * v.e_max,
                          max(1.0, cnt * v.e_max))
                prev = soc
                prc = response.ev_pfr_charge[key]
                prd = response.ev_pfr_discharge[key]
                pvpr = response.ev_pfr[key]
                rate = cnt * v.p_max
                ck.res("Eq28", key, ecpr, "=", dpr * prc)
                ck.res("Eq29", key, dpr * prc, "<=", ec)
                ck.res("Eq30", key, edpr, "=", dpr * prd)
                ck.res("Eq31", key, ed + dpr * prd, "<=", rate * dt, max(1.0, rate))
                ck.within("Eq32", key, prc, 0.0, rate, max(1.0, rate))
                ck.within("Eq33", key, prd, 0.0, rate, max(1.0, rate))
                ck.res("Eq34", key, pvpr, "=", prc + prd)
                df = response.freq_dev[(t, k.id)]
                ck.res("Eq35", key, pvpr, ">=", 0.0)
                ck.res("Eq35", key, pvpr, "<=", -df / v.droop, max(1.0, 1.0 / v.droop))
                if schedule.pfr_capacity:
                    cap = schedule.pfr_capacity.get((v.id, n, t), 0.0)
                    ck.res("Eq37", key, pvpr, "<=", cap)
                    ck.res("Eq37", key, cap, ">=", 0.0)
            ck.res("Eq24", (v.id, n, k.id),
                   response.soc[(v.id, n, v.window_end, k.id)], ">=", cnt * v.e_final,
                   max(1.0, cnt * v.e_final))
    return ck.out


def _check_commitment_logic(ck: _Checker, g, u: dict, T: int) -> None:
    tg = min(g.init_must_run, T)
    tc = min(g.init_must_stop, T)
    for t in range(1, tg + 1):
        ck.res("Eq12", (g.id, t), u[t], "=", 1.0)
    for t in range(1, tc + 1):
        ck.res("Eq15", (g.id, t), u[t], "=", 0.0)
    ut, dt_ = g.min_up, g.min_down
    for t in range(tg + 1, T - ut + 2):
        lhs = sum(u[tau] for tau in range(t, t + ut))
        ck.res("Eq13", (g.id, t), lhs, ">=", ut * (u[t] - u[t - 1]), max(1.0, ut))
    for t in range(max(1, T - ut + 2), T + 1):
        lhs = sum(u[tau] - (u[t] - u[t - 1]) for tau in range(t, T + 1))
        ck.res("Eq14", (g.id, t), lhs, ">=", 0.0, max(1.0, T - t + 1))
    for t in range(tc + 1, T - dt_ + 2):
        lhs = sum(1.0 - u[tau] for tau in range(t, t + dt_))
        ck.res("Eq16", (g.id, t), lhs, ">=", dt_ * (u[t - 1] - u[t]), max(1.0, dt_))
    for t in range(max(1, T - dt_ + 2), T + 1):
        lhs = sum(1.0 - u[tau] - (u[t - 1] - u[t]) for tau in range(t, T + 1))
        ck.res("Eq17", (g.id, t), lhs, ">=", 0.0, max(1.0, T - t + 1))


# -- ex-post contingency evaluation ---------------------------------------------


def evaluate_ex_post(
    instance: Instance,
    schedule: Schedule,
    config: Optional[SolverConfig] = None,
    enable_pev_pfr: bool = False,
) -> tuple[ContingencyResponse, CostReport]:
    """Contingency consequences of a reserve-blind schedule.

    Rebuilds the reserve constraint set, pins every day-ahead variable to
    the given schedule and lets only the contingency-indexed recourse move,
    minimizing the contingency cost terms.  PEV response stays switched off
    (capacity offers pinned to zero) unless ``enable_pev_pfr`` is set, so
    the result isolates what reserve-blind day-ahead planning costs.
    """
    cfg = config or SolverConfig()
    mode = CaseMode.GENERATORS_AND_PEVS if enable_pev_pfr else CaseMode.GENERATORS_ONLY
    case = CaseConfig(mode=mode)
    model, catalog = build(instance, case, unserved_response_cap=False)
    lower = model.lower_array()
    upper = model.upper_array()

    def pin(family: str, values: dict, default=None):
        for key, col in getattr(catalog, family).items():
            if key in values:
                val = values[key]
            elif default is not None:
                val = default
            else:
                raise KeyError(f"schedule missing {family}{key}")
            lower[col] = val
            upper[col] = val

    base = schedule.base_soc or derive_base_soc(instance, schedule)
    pin("power", schedule.power)
    pin("commit", {k: round(v) for k, v in schedule.commit.items()})
    pin("spill", schedule.spill)
    pin("unserved", schedule.unserved)
    pin("flow", schedule.flow)
    pin("angle", schedule.angle)
    pin("ev_charge", schedule.ev_charge)
    pin("ev_discharge", schedule.ev_discharge)
    pin("ev_soc_pre", base)
    derived_su = {}
    derived_sd = {}
    for g in instance.conventional_units:
        for t in instance.periods():
            u_prev = (1.0 if g.u0 else 0.0) if t == 1 else round(
                schedule.commit[(g.id, t - 1)]
            )
            du = round(schedule.commit[(g.id, t)]) - u_prev
            derived_su[(g.id, t)] = max(0.0, g.su_cost * du)
            derived_sd[(g.id, t)] = max(0.0, -g.sd_cost * du)
    pin("startup_cost", schedule.startup_cost or derived_su)
    pin("shutdown_cost", schedule.shutdown_cost or derived_sd)

    sol = solve_lp(model.copy_with_bounds(lower, upper), cfg)
    if sol.status != LpStatus.OPTIMAL:
        raise RuntimeError(f"ex-post evaluation failed: {sol.status.name} {sol.message}")
    solution = Solution(
        catalog=catalog,
        x=sol.x,
        objective=sol.objective,
        bound=sol.objective,
        gap=0.0,
        status="optimal",
    )
    response = extract_response(instance, solution)
    if response is None:  # no contingencies declared: empty response
        response = ContingencyResponse({}, {}, {}, {}, {}, {}, {}, {}, {})
    report = cost_report(instance, case, solution, response=response)
    return response, report


# -- cost decomposition ----------------------------------------------------------


def cost_report(
    instance: Instance,
    case: CaseConfig,
    solution: Solution,
    response: Optional[ContingencyResponse] = None,
) -> CostReport:
    """Term-by-term objective decomposition from solution values.

    For reserve cases the total matches the solver objective (same
    coefficients); for a reserve-blind solve the contingency components
    come from the ``response`` computed ex post, so the total is the
    day-ahead objective plus those components.
    """
    inst = instance
    dt = inst.params.period_length
    rep = CostReport()
    sched = extract_schedule(inst, solution)
    for g in itertools.chain(inst.conventional_units, inst.renewable_units):
        for t in inst.periods():
            rep.production += g.cost * dt * sched.power[(g.id, t)]
    rep.startup = sum(sched.startup_cost.values())
    rep.shutdown = sum(sched.shutdown_cost.values())
    rep.unserved = inst.params.c_unserved * dt * sum(sched.unserved.values())
    rep.spillage = inst.params.c_spill * dt * sum(sched.spill.values())
    if response is None:
        response = extract_response(inst, solution)
    if response is not None:
        rep.post_contingency_unserved = inst.params.c_unserved * sum(
            response.unserved_pfr.values()
        )
        mult = float(len(inst.consumers)) if case.per_consumer_freq_penalty else 1.0
        rep.frequency = -inst.params.c_freq * mult * sum(response.freq_dev.values())
        deploy_scale = 1.0 if case.literal_deployment_cost else inst.params.d_pr
        groups = {v.id: v for v in inst.pev_groups}
        for (vid, n, t, k), val in response.ev_pfr.items():
            rep.pev_deployment += groups[vid].deployment_offer_at(t) * deploy_scale * val
    if sched.pfr_capacity:
        groups = {v.id: v for v in inst.pev_groups}
        for (vid, n, t), val in sched.pfr_capacity.items():
            rep.pev_capacity += groups[vid].capacity_offer_at(t) * val
    return rep


# -- brute-force commitment oracle -------------------------------------------------


def brute_force_commitment(
    instance: Instance,
    case: CaseConfig,
    max_patterns: int = 2 ** 14,
    config: Optional[SolverConfig] = None,
) -> MipSolution:
    """Enumerate every commitment pattern; LP-evaluate the logic-feasible ones.

    The enumeration is exhaustive over the binary columns, so the best
    value found is the global optimum; patterns that violate the pure
    commitment logic (initial windows, minimum up/down times) are
    discarded without an LP solve.  Guarded by ``max_patterns``.
    """
    cfg = config or SolverConfig()
    model, catalog = build(instance, case)
    units = [g for g in instance.conventional_units]
    T = instance.params.n_periods
    n_bits = len(units) * T
    if 2 ** n_bits > max_patterns:
        raise ValueError(
            f"{2 ** n_bits} commitment patterns exceed the guard ({max_patterns})"
        )
    best_obj = math.inf
    best_x = None
    patterns = 0
    for bits in itertools.product((0, 1), repeat=n_bits):
        patterns += 1
        pattern = {}
        ok = True
        for gi, g in enumerate(units):
            u = {t: float(bits[gi * T + (t - 1)]) for t in range(1, T + 1)}
            u[0] = 1.0 if g.u0 else 0.0
            if not _pattern_ok(g, u, T):
                ok = False
                break
            for t in range(1, T + 1):
                pattern[catalog.commit[(g.id, t)]] = int(u[t])
        if not ok:
            continue
        sol = solve_lp(fix_binaries(model, pattern), cfg)
        if sol.status != LpStatus.OPTIMAL:
            continue
        if sol.objective < best_obj - 1e-12:
            best_obj = sol.objective
            best_x = sol.x
    if best_x is None:
        return MipSolution(status=MipStatus.INFEASIBLE, node_count=patterns,
                           message="no feasible commitment pattern")
    return MipSolution(
        status=MipStatus.OPTIMAL,
        x=best_x,
        objective=best_obj,
        bound=best_obj,
        gap=0.0,
        node_count=patterns,
    )


def _pattern_ok(g, u: dict, T: int) -> bool:
    """Pure commitment-logic screen (initial windows, min up/down)."""
    for t in range(1, min(g.init_must_run, T) + 1):
        if u[t] != 1.0:
            return False
    for t in range(1, min(g.init_must_stop, T) + 1):
        if u[t] != 0.0:
            return False
    tg, tc = min(g.init_must_run, T), min(g.init_must_stop, T)
    for t in range(tg + 1, T - g.min_up + 2):
        if sum(u[tau] for tau in range(t, t + g.min_up)) < g.min_up * (u[t] - u[t - 1]):
            return False
    for t in range(max(1, T - g.min_up + 2), T + 1):
        if sum(u[tau] - (u[t] - u[t - 1]) for tau in range(t, T + 1)) < 0:
            return False
    for t in range(tc + 1, T - g.min_down + 2):
        if sum(1 - u[tau] for tau in range(t, t + g.min_down)) < g.min_down * (u[t - 1] - u[t]):
            return False
    for t in range(max(1, T - g.min_down + 2), T + 1):
        if sum(1 - u[tau] - (u[t - 1] - u[t]) for tau in range(t, T + 1)) < 0:
            return False
    return True
