"""Compile a scheduling instance into a tagged, auditable MILP.

Every generated row carries a :class:`ConstraintTag` naming the constraint
family (``Eq2`` .. ``Eq37`` in the model's equation catalog, see
``docs/formulation_map.md``) and the index tuple that produced it, so any
row can be explained and the family cardinalities can be counted in closed
form.  Families realized purely through variable bounds (line limits,
battery energy windows, rate caps, off-window pins) generate no rows; the
map document lists them alongside the row families.

Case selection:

* ``NO_RESERVE`` drops every contingency-indexed variable and row and all
  reserve objective terms, keeping the pre-contingency storage recursion
  so fleet schedules stay physically consistent.
* ``GENERATORS_ONLY`` builds the full model, then pins the PEV reserve
  capacity columns to zero (their droop rows then force zero PEV
  response).
* ``GENERATORS_AND_PEVS`` builds the full model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .domain import Instance, PevGroup, validate
from .milp import MilpModel, SENSE_EQ, SENSE_GE, SENSE_LE

__all__ = [
    "CaseMode",
    "CaseConfig",
    "ConstraintTag",
    "VariableCatalog",
    "FormulationError",
    "UnknownRowError",
    "Solution",
    "build",
    "explain",
]


class CaseMode(Enum):
    NO_RESERVE = "no_reserve"
    GENERATORS_ONLY = "generators_only"
    GENERATORS_AND_PEVS = "generators_and_pevs"


@dataclass(frozen=True)
class CaseConfig:
    """Which constraint set to compile, plus literal-transcription toggles.

    ``per_consumer_freq_penalty`` multiplies the frequency-deviation
    penalty by the number of consumers (the literal reading of the
    objective); off by default.  ``literal_deployment_cost`` prices
    deployed PEV response per MW instead of per MWh of sustained response.
    """

    mode: CaseMode
    per_consumer_freq_penalty: bool = False
    literal_deployment_cost: bool = False

    @property
    def with_reserve(self) -> bool:
        return self.mode is not CaseMode.NO_RESERVE


class FormulationError(ValueError):
    """Instance rejected by the builder (runs validate first)."""


class UnknownRowError(KeyError):
    """explain() called with a row id outside the model."""


@dataclass(frozen=True)
class ConstraintTag:
    """Provenance of one generated row: family id plus index tuple."""

    equation: str
    indices: tuple[tuple[str, object], ...]
    part: str = ""  # distinguishes sibling rows of one family member (lo/up)

    def name(self) -> str:
        bits = [self.equation.upper()]
        bits += [f"{dim}{val}" for dim, val in self.indices]
        if self.part:
            bits.append(self.part)
        return "_".join(bits)

    def __str__(self) -> str:
        idx = ", ".join(f"{d}={v}" for d, v in self.indices)
        return f"{self.equation}({idx})" + (f"[{self.part}]" if self.part else "")


class VariableCatalog:
    """Bidirectional map between decision-variable families and columns.

    Keys are index tuples: ``(unit, t)``, ``(line, t)``, ``(bus, t)``,
    ``(consumer, t)``, ``(unit, t, k)``, ``(group, bus, t)`` or
    ``(group, bus, t, k)`` with 1-based periods and ids as in the
    instance.  Every model column belongs to exactly one family.
    """

    FAMILIES = (
        "power",            # p[g,t], all units
        "spill",            # s[g,t], renewable units
        "commit",           # u[g,t], conventional units (binary)
        "startup_cost",     # cSU[g,t]
        "shutdown_cost",    # cSD[g,t]
        "flow",             # pL[l,t]
        "angle",            # theta[n,t]
        "unserved",         # pUD[d,t]
        "gen_pfr",          # pPR[g,t,k]
        "unserved_pfr",     # pUDPR[d,t,k]
        "freq_dev",         # df[t,k]  (<= 0)
        "ev_charge",        # eC[v,n,t]
        "ev_discharge",     # eD[v,n,t]
        "ev_soc_pre",       # eV[v,n,t] pre-contingency path
        "ev_soc",           # eV[v,n,t,k]
        "pfr_charge_cut",   # eCPR[v,n,t,k]
        "pfr_discharge",    # eDPR[v,n,t,k]
        "pfr_from_charging",     # pVPRC[v,n,t,k]
        "pfr_from_discharging",  # pVPRD[v,n,t,k]
        "ev_pfr",           # pVPR[v,n,t,k]
        "pfr_capacity",     # cVPR[v,n,t]
    )

    def __init__(self):
        for fam in self.FAMILIES:
            setattr(self, fam, {})
        self._col_owner: list[tuple[str, tuple]] = []

    def register(self, family: str, key: tuple, col: int) -> None:
        d = getattr(self, family)
        if key in d:
            raise FormulationError(f"duplicate catalog key {family}{key}")
        d[key] = col
        assert col == len(self._col_owner), "columns must be registered in order"
        self._col_owner.append((family, key))

    def owner(self, col: int) -> tuple[str, tuple]:
        return self._col_owner[col]

    @property
    def n_cols(self) -> int:
        return len(self._col_owner)

    def value(self, x: np.ndarray, family: str, key: tuple) -> float:
        return float(x[getattr(self, family)[key]])


@dataclass
class Solution:
    """Catalog-addressable values plus the solver certificate."""

    catalog: VariableCatalog
    x: np.ndarray
    objective: float
    bound: float
    gap: float
    status: str
    node_count: int = 0

    def value(self, family: str, key: tuple) -> float:
        return self.catalog.value(self.x, family, key)

    def family_values(self, family: str) -> dict:
        d = getattr(self.catalog, family)
        return {k: float(self.x[c]) for k, c in d.items()}


def _name(prefix: str, *parts) -> str:
    return "_".join([prefix] + [str(p) for p in parts])


class FormulationBuilder:
    """Stateful one-shot builder; use :func:`build` for the public API."""

    def __init__(self, instance: Instance, case: CaseConfig,
                 unserved_response_cap: bool = True):
        problems = validate(instance)
        if problems:
            raise FormulationError(
                "instance failed validation: " + "; ".join(str(v) for v in problems[:5])
            )
        self.inst = instance
        self.case = case
        self.unserved_response_cap = unserved_response_cap
        self.model = MilpModel("gridsched")
        self.catalog = VariableCatalog()
        self.T = instance.params.n_periods
        self.dt = instance.params.period_length
        self.pairs = instance.pev_pairs()  # [(group, bus_id)]

    # -- column helpers ----------------------------------------------------

    def _col(self, family: str, key: tuple, name: str, lb: float, ub: float,
             obj: float = 0.0, binary: bool = False) -> int:
        col = self.model.add_col(name, lb, ub, obj, binary)
        self.catalog.register(family, key, col)
        return col

    def _row(self, tag: ConstraintTag, cols, vals, sense: str, rhs: float) -> int:
        return self.model.add_row(cols, vals, sense, rhs, name=tag.name(), tag=tag)

    def soc_periods(self, v: PevGroup) -> list[int]:
        """Window periods plus the seeded boundary period (when it exists)."""
        ts = list(v.window())
        if v.window_start > 1:
            ts.insert(0, v.window_start - 1)
        return ts

    # -- variables ----------------------------------------------------------

    def add_variables(self) -> None:
        inst, T, cat = self.inst, self.T, self.catalog
        prm = inst.params
        for g in inst.conventional_units:
            for t in range(1, T + 1):
                self._col("power", (g.id, t), _name("P", g.id, f"t{t}"), 0.0, g.p_max)
        for g in inst.renewable_units:
            for t in range(1, T + 1):
                self._col("power", (g.id, t), _name("P", g.id, f"t{t}"), 0.0, g.p_max)
                self._col("spill", (g.id, t), _name("SP", g.id, f"t{t}"), 0.0, math.inf)
        for g in inst.conventional_units:
            for t in range(1, T + 1):
                self._col("commit", (g.id, t), _name("U", g.id, f"t{t}"), 0.0, 1.0,
                          binary=True)
                self._col("startup_cost", (g.id, t), _name("CSU", g.id, f"t{t}"),
                          0.0, math.inf)
                self._col("shutdown_cost", (g.id, t), _name("CSD", g.id, f"t{t}"),
                          0.0, math.inf)
        for ln in inst.lines:
            for t in range(1, T + 1):
                cap = ln.capacity[t - 1]
                self._col("flow", (ln.id, t), _name("PL", ln.id, f"t{t}"), -cap, cap)
        slack = inst.slack_bus().id
        for n in inst.buses:
            for t in range(1, T + 1):
                if n.id == slack:
                    self._col("angle", (n.id, t), _name("TH", n.id, f"t{t}"), 0.0, 0.0)
                else:
                    self._col("angle", (n.id, t), _name("TH", n.id, f"t{t}"),
                              -math.inf, math.inf)
        for d in inst.consumers:
            for t in range(1, T + 1):
                self._col("unserved", (d.id, t), _name("PUD", d.id, f"t{t}"),
                          0.0, d.demand[t - 1])
        # PEV pre-contingency schedule: charge/discharge exist over the full
        # horizon; off-window periods are pinned to zero (family Eq36)
        for v, n in self.pairs:
            cnt = v.counts[n]
            rate = cnt * v.p_max * self.dt
            for t in range(1, T + 1):
                ub = rate if t in v.window() else 0.0
                self._col("ev_charge", (v.id, n, t), _name("EC", v.id, n, f"t{t}"),
                          0.0, ub)
                self._col("ev_discharge", (v.id, n, t), _name("ED", v.id, n, f"t{t}"),
                          0.0, ub)
            for t in self.soc_periods(v):
                if t == v.window_start - 1:
                    lb, ub = 0.0, math.inf
                else:
                    lb, ub = cnt * v.e_min, cnt * v.e_max
                self._col("ev_soc_pre", (v.id, n, t), _name("EVP", v.id, n, f"t{t}"),
                          lb, ub)
        if not self.case.with_reserve:
            return
        # contingency-indexed families
        outaged = {k.id: set(k.outaged_units) for k in inst.contingencies}
        for k in inst.contingencies:
            for t in range(1, T + 1):
                self._col("freq_dev", (t, k.id), _name("DF", f"t{t}", f"k{k.id}"),
                          -prm.delta_f_max, 0.0)
        for k in inst.contingencies:
            down = outaged[k.id]
            for g in list(inst.conventional_units) + list(inst.renewable_units):
                for t in range(1, T + 1):
                    if g.id in down:
                        lb, ub = -math.inf, 0.0
                    else:
                        lb, ub = 0.0, math.inf
                    self._col("gen_pfr", (g.id, t, k.id),
                              _name("PPR", g.id, f"t{t}", f"k{k.id}"), lb, ub)
            for d in inst.consumers:
                for t in range(1, T + 1):
                    # nonnegative: restoring shed load post-contingency would
                    # otherwise earn the unserved penalty once per contingency
                    self._col("unserved_pfr", (d.id, t, k.id),
                              _name("PUDPR", d.id, f"t{t}", f"k{k.id}"),
                              0.0, math.inf)
            for v, n in self.pairs:
                cnt = v.counts[n]
                for t in self.soc_periods(v):
                    if t == v.window_start - 1:
                        lb, ub = 0.0, math.inf
                    else:
                        lb, ub = cnt * v.e_min, cnt * v.e_max
                    self._col("ev_soc", (v.id, n, t, k.id),
                              _name("EV", v.id, n, f"t{t}", f"k{k.id}"), lb, ub)
                for t in v.window():
                    key = (v.id, n, t, k.id)
                    sfx = (v.id, n, f"t{t}", f"k{k.id}")
                    self._col("pfr_charge_cut", key, _name("ECPR", *sfx), 0.0, math.inf)
                    self._col("pfr_discharge", key, _name("EDPR", *sfx), 0.0, math.inf)
                    self._col("pfr_from_charging", key, _name("PVPRC", *sfx),
                              0.0, cnt * v.p_max)
                    self._col("pfr_from_discharging", key, _name("PVPRD", *sfx),
                              0.0, cnt * v.p_max)
                    self._col("ev_pfr", key, _name("PVPR", *sfx), 0.0, math.inf)
        for v, n in self.pairs:
            cap = 0.0 if self.case.mode is CaseMode.GENERATORS_ONLY else math.inf
            for t in range(1, T + 1):
                self._col("pfr_capacity", (v.id, n, t), _name("CVPR", v.id, n, f"t{t}"),
                          0.0, cap)

    # -- constraint families -------------------------------------------------

    def add_energy_balance(self) -> None:
        """Family Eq2: per-bus power balance, one equality per (bus, period)."""
        inst, cat = self.inst, self.catalog
        units_at = {}
        for g in list(inst.conventional_units) + list(inst.renewable_units):
            units_at.setdefault(g.bus, []).append(g.id)
        lines_in = {}
        lines_out = {}
        for ln in inst.lines:
            lines_in.setdefault(ln.to_bus, []).append(ln.id)
            lines_out.setdefault(ln.from_bus, []).append(ln.id)
        cons_at = {}
        for d in inst.consumers:
            cons_at.setdefault(d.bus, []).append(d)
        pev_at = {}
        for v, n in self.pairs:
            pev_at.setdefault(n, []).append(v)
        inv_dt = 1.0 / self.dt
        for n in inst.buses:
            for t in range(1, self.T + 1):
                cols, vals = [], []
                for gid in units_at.get(n.id, ()):
                    cols.append(cat.power[(gid, t)])
                    vals.append(1.0)
                for lid in lines_in.get(n.id, ()):
                    cols.append(cat.flow[(lid, t)])
                    vals.append(1.0)
                for lid in lines_out.get(n.id, ()):
                    cols.append(cat.flow[(lid, t)])
                    vals.append(-1.0)
                for v in pev_at.get(n.id, ()):
                    cols.append(cat.ev_discharge[(v.id, n.id, t)])
                    vals.append(inv_dt)
                    cols.append(cat.ev_charge[(v.id, n.id, t)])
                    vals.append(-inv_dt)
                rhs = 0.0
                for d in cons_at.get(n.id, ()):
                    rhs += d.demand[t - 1]
                    cols.append(cat.unserved[(d.id, t)])
                    vals.append(1.0)
                tag = ConstraintTag("Eq2", (("n", n.id), ("t", t)))
                self._row(tag, cols, vals, SENSE_EQ, rhs)

    def add_network(self) -> None:
        """Family Eq4: flow = angle difference / reactance.

        Line limits (family Eq3) are the flow-column bounds; the slack-bus
        angle is pinned to zero through its column bounds.
        """
        cat = self.catalog
        for ln in self.inst.lines:
            coef = 1.0 / ln.reactance
            for t in range(1, self.T + 1):
                tag = ConstraintTag("Eq4", (("l", ln.id), ("t", t)))
                self._row(
                    tag,
                    [cat.flow[(ln.id, t)], cat.angle[(ln.from_bus, t)],
                     cat.angle[(ln.to_bus, t)]],
                    [1.0, -coef, coef],
                    SENSE_EQ,
                    0.0,
                )

    def add_unit_limits(self) -> None:
        """Families Eq5 (commitment-linked limits) and Eq6 (availability)."""
        cat = self.catalog
        for g in self.inst.conventional_units:
            for t in range(1, self.T + 1):
                p = cat.power[(g.id, t)]
                u = cat.commit[(g.id, t)]
                self._row(ConstraintTag("Eq5", (("g", g.id), ("t", t)), "lo"),
                          [p, u], [1.0, -g.p_min], SENSE_GE, 0.0)
                self._row(ConstraintTag("Eq5", (("g", g.id), ("t", t)), "up"),
                          [p, u], [1.0, -g.p_max], SENSE_LE, 0.0)
        for g in self.inst.renewable_units:
            for t in range(1, self.T + 1):
                tag = ConstraintTag("Eq6", (("g", g.id), ("t", t)))
                self._row(tag, [cat.power[(g.id, t)], cat.spill[(g.id, t)]],
                          [1.0, 1.0], SENSE_EQ, g.p_max * g.availability[t - 1])

    def add_ramps(self) -> None:
        """Families Eq7 (up) and Eq8 (down); period 1 ramps from p0."""
        cat = self.catalog
        for g in self.inst.conventional_units:
            for t in range(1, self.T + 1):
                p = cat.power[(g.id, t)]
                if t == 1:
                    self._row(ConstraintTag("Eq7", (("g", g.id), ("t", t))),
                              [p], [1.0], SENSE_LE, g.ramp_up + g.p0)
                    self._row(ConstraintTag("Eq8", (("g", g.id), ("t", t))),
                              [p], [-1.0], SENSE_LE, g.ramp_down - g.p0)
                else:
                    prev = cat.power[(g.id, t - 1)]
                    self._row(ConstraintTag("Eq7", (("g", g.id), ("t", t))),
                              [p, prev], [1.0, -1.0], SENSE_LE, g.ramp_up)
                    self._row(ConstraintTag("Eq8", (("g", g.id), ("t", t))),
                              [p, prev], [-1.0, 1.0], SENSE_LE, g.ramp_down)

    def add_commitment_logic(self) -> None:
        """Families Eq9-Eq10 (transition costs) and Eq12-Eq17 (up/down time).

        Nonnegativity of the transition-cost columns (family Eq11) is a
        column bound.  Initial windows (Eq12/Eq15) clip to the horizon.
        """
        cat, T = self.catalog, self.T
        for g in self.inst.conventional_units:
            u0 = 1.0 if g.u0 else 0.0
            u = {t: cat.commit[(g.id, t)] for t in range(1, T + 1)}
            for t in range(1, T + 1):
                csu = cat.startup_cost[(g.id, t)]
                csd = cat.shutdown_cost[(g.id, t)]
                if t == 1:
                    self._row(ConstraintTag("Eq9", (("g", g.id), ("t", t))),
                              [csu, u[1]], [1.0, -g.su_cost], SENSE_GE, -g.su_cost * u0)
                    self._row(ConstraintTag("Eq10", (("g", g.id), ("t", t))),
                              [csd, u[1]], [1.0, g.sd_cost], SENSE_GE, g.sd_cost * u0)
                else:
                    self._row(ConstraintTag("Eq9", (("g", g.id), ("t", t))),
                              [csu, u[t], u[t - 1]], [1.0, -g.su_cost, g.su_cost],
                              SENSE_GE, 0.0)
                    self._row(ConstraintTag("Eq10", (("g", g.id), ("t", t))),
                              [csd, u[t], u[t - 1]], [1.0, g.sd_cost, -g.sd_cost],
                              SENSE_GE, 0.0)
            tg = min(g.init_must_run, T)
            tc = min(g.init_must_stop, T)
            if tg >= 1:
                self._row(ConstraintTag("Eq12", (("g", g.id),)),
                          [u[t] for t in range(1, tg + 1)], [1.0] * tg,
                          SENSE_EQ, float(tg))
            if tc >= 1:
                self._row(ConstraintTag("Eq15", (("g", g.id),)),
                          [u[t] for t in range(1, tc + 1)], [1.0] * tc,
                          SENSE_EQ, 0.0)
            ut, dt_ = g.min_up, g.min_down
            # rolling windows
            for t in range(tg + 1, T - ut + 2):
                win = list(range(t, t + ut))
                cols = [u[tau] for tau in win]
                vals = [1.0] * len(win)
                rhs = 0.0
                _merge(cols, vals, u[t], -float(ut))
                if t == 1:
                    rhs = -float(ut) * u0
                else:
                    _merge(cols, vals, u[t - 1], float(ut))
                self._row(ConstraintTag("Eq13", (("g", g.id), ("t", t))),
                          cols, vals, SENSE_GE, rhs)
            for t in range(max(1, T - ut + 2), T + 1):
                span = T - t + 1
                cols = [u[tau] for tau in range(t, T + 1)]
                vals = [1.0] * span
                rhs = 0.0
                _merge(cols, vals, u[t], -float(span))
                if t == 1:
                    rhs = -float(span) * u0
                else:
                    _merge(cols, vals, u[t - 1], float(span))
                self._row(ConstraintTag("Eq14", (("g", g.id), ("t", t))),
                          cols, vals, SENSE_GE, rhs)
            for t in range(tc + 1, T - dt_ + 2):
                win = list(range(t, t + dt_))
                cols = [u[tau] for tau in win]
                vals = [-1.0] * len(win)
                rhs = -float(dt_)
                _merge(cols, vals, u[t], float(dt_))
                if t == 1:
                    rhs += float(dt_) * u0
                else:
                    _merge(cols, vals, u[t - 1], -float(dt_))
                self._row(ConstraintTag("Eq16", (("g", g.id), ("t", t))),
                          cols, vals, SENSE_GE, rhs)
            for t in range(max(1, T - dt_ + 2), T + 1):
                span = T - t + 1
                cols = [u[tau] for tau in range(t, T + 1)]
                vals = [-1.0] * span
                rhs = -float(span)
                _merge(cols, vals, u[t], float(span))
                if t == 1:
                    rhs += float(span) * u0
                else:
                    _merge(cols, vals, u[t - 1], -float(span))
                self._row(ConstraintTag("Eq17", (("g", g.id), ("t", t))),
                          cols, vals, SENSE_GE, rhs)

    def add_generator_pfr(self) -> None:
        """Families Eq18-Eq21: droop cap, headroom, and outage response."""
        inst, cat = self.inst, self.catalog
        for k in inst.contingencies:
            down = set(k.outaged_units)
            for g in inst.conventional_units:
                for t in range(1, self.T + 1):
                    ppr = cat.gen_pfr[(g.id, t, k.id)]
                    if g.id in down:
                        continue
                    self._row(ConstraintTag("Eq18", (("g", g.id), ("t", t), ("k", k.id))),
                              [ppr, cat.freq_dev[(t, k.id)]], [1.0, 1.0 / g.droop],
                              SENSE_LE, 0.0)
                    self._row(ConstraintTag("Eq19", (("g", g.id), ("t", t), ("k", k.id))),
                              [ppr, cat.power[(g.id, t)], cat.commit[(g.id, t)]],
                              [1.0, 1.0, -g.p_max], SENSE_LE, 0.0)
            for g in inst.renewable_units:
                if g.id in down:
                    continue
                for t in range(1, self.T + 1):
                    self._row(ConstraintTag("Eq20", (("g", g.id), ("t", t), ("k", k.id))),
                              [cat.gen_pfr[(g.id, t, k.id)]], [1.0], SENSE_EQ, 0.0)
            for g in list(inst.conventional_units) + list(inst.renewable_units):
                if g.id not in down:
                    continue
                for t in range(1, self.T + 1):
                    self._row(ConstraintTag("Eq21", (("g", g.id), ("t", t), ("k", k.id))),
                              [cat.gen_pfr[(g.id, t, k.id)], cat.power[(g.id, t)]],
                              [1.0, 1.0], SENSE_EQ, 0.0)

    def add_pfr_balance(self) -> None:
        """Family Eq22 plus the post-contingency unserved-demand window.

        The window rows (UDPRLO/UDPRUP) keep served-after-response demand
        between zero and the consumer's demand; the base model leaves the
        response share of unserved demand unbounded.
        """
        inst, cat = self.inst, self.catalog
        for k in inst.contingencies:
            for t in range(1, self.T + 1):
                cols, vals = [], []
                for d in inst.consumers:
                    cols.append(cat.unserved_pfr[(d.id, t, k.id)])
                    vals.append(1.0)
                for g in list(inst.conventional_units) + list(inst.renewable_units):
                    cols.append(cat.gen_pfr[(g.id, t, k.id)])
                    vals.append(1.0)
                for v, n in self.pairs:
                    if t in v.window():
                        cols.append(cat.ev_pfr[(v.id, n, t, k.id)])
                        vals.append(1.0)
                self._row(ConstraintTag("Eq22", (("t", t), ("k", k.id))),
                          cols, vals, SENSE_EQ, 0.0)
            for d in inst.consumers:
                for t in range(1, self.T + 1):
                    pud = cat.unserved[(d.id, t)]
                    pudpr = cat.unserved_pfr[(d.id, t, k.id)]
                    self._row(ConstraintTag("UDPR", (("d", d.id), ("t", t), ("k", k.id)), "lo"),
                              [pud, pudpr], [1.0, 1.0], SENSE_GE, 0.0)
                    if self.unserved_response_cap:
                        self._row(ConstraintTag("UDPR", (("d", d.id), ("t", t), ("k", k.id)), "up"),
                                  [pud, pudpr], [1.0, 1.0], SENSE_LE, d.demand[t - 1])

    def _soc_recursion(self, v: PevGroup, n: str, k_id: Optional[str]) -> None:
        cat = self.catalog
        cnt = v.counts[n]
        eta = v.efficiency
        soc = cat.ev_soc if k_id is not None else cat.ev_soc_pre
        suffix = "" if k_id is None else "k"

        def soc_key(t):
            return (v.id, n, t, k_id) if k_id is not None else (v.id, n, t)

        eqname = lambda base: base + ("Pre" if k_id is None else "")
        kidx = (("k", k_id),) if k_id is not None else ()
        if v.window_start > 1:
            t0 = v.window_start - 1
            self._row(ConstraintTag(eqname("Eq23"), (("v", v.id), ("n", n)) + kidx),
                      [soc[soc_key(t0)]], [1.0], SENSE_EQ, cnt * v.e_initial)
        self._row(ConstraintTag(eqname("Eq24"), (("v", v.id), ("n", n)) + kidx),
                  [soc[soc_key(v.window_end)]], [1.0], SENSE_GE, cnt * v.e_final)
        for t in v.window():
            cols = [soc[soc_key(t)],
                    cat.ev_charge[(v.id, n, t)],
                    cat.ev_discharge[(v.id, n, t)]]
            vals = [1.0, -eta, 1.0 / eta]
            rhs = 0.0
            if t == v.window_start and v.window_start == 1:
                rhs = cnt * v.e_initial  # seeded boundary, no t=0 column
            else:
                cols.append(soc[soc_key(t - 1)])
                vals.append(-1.0)
            if k_id is not None:
                cols.append(cat.pfr_charge_cut[(v.id, n, t, k_id)])
                vals.append(eta)
                cols.append(cat.pfr_discharge[(v.id, n, t, k_id)])
                vals.append(1.0 / eta)
            self._row(ConstraintTag(eqname("Eq25"), (("v", v.id), ("n", n), ("t", t)) + kidx),
                      cols, vals, SENSE_EQ, rhs)

    def add_pev_storage(self) -> None:
        """Families Eq23-Eq25 per contingency plus the pre-contingency path.

        Energy windows (Eq26) and charge/discharge rate caps (Eq27) are
        column bounds.  The pre-contingency path (Eq23Pre-Eq25Pre) pins the
        day-ahead fleet schedule to a physically consistent battery state;
        it is the entire storage model when no contingencies are built.
        """
        for v, n in self.pairs:
            self._soc_recursion(v, n, None)
        if not self.case.with_reserve:
            return
        for k in self.inst.contingencies:
            for v, n in self.pairs:
                self._soc_recursion(v, n, k.id)

    def add_pev_pfr(self) -> None:
        """Families Eq28-Eq31, Eq34, Eq35, Eq37 on window periods.

        Response-rate bounds (Eq32/Eq33) and off-window pins (Eq36) are
        column bounds; outside the window the capacity column keeps only
        its nonnegativity bound.
        """
        if not self.case.with_reserve:
            return
        inst, cat = self.inst, self.catalog
        dpr = inst.params.d_pr
        for k in inst.contingencies:
            for v, n in self.pairs:
                cnt = v.counts[n]
                for t in v.window():
                    key = (v.id, n, t, k.id)
                    idx = (("v", v.id), ("n", n), ("t", t), ("k", k.id))
                    ec = cat.ev_charge[(v.id, n, t)]
                    ed = cat.ev_discharge[(v.id, n, t)]
                    self._row(ConstraintTag("Eq28", idx),
                              [cat.pfr_charge_cut[key], cat.pfr_from_charging[key]],
                              [1.0, -dpr], SENSE_EQ, 0.0)
                    self._row(ConstraintTag("Eq29", idx),
                              [cat.pfr_from_charging[key], ec], [dpr, -1.0],
                              SENSE_LE, 0.0)
                    self._row(ConstraintTag("Eq30", idx),
                              [cat.pfr_discharge[key], cat.pfr_from_discharging[key]],
                              [1.0, -dpr], SENSE_EQ, 0.0)
                    self._row(ConstraintTag("Eq31", idx),
                              [ed, cat.pfr_from_discharging[key]], [1.0, dpr],
                              SENSE_LE, cnt * v.p_max * self.dt)
                    self._row(ConstraintTag("Eq34", idx),
                              [cat.ev_pfr[key], cat.pfr_from_charging[key],
                               cat.pfr_from_discharging[key]],
                              [1.0, -1.0, -1.0], SENSE_EQ, 0.0)
                    self._row(ConstraintTag("Eq35", idx),
                              [cat.ev_pfr[key], cat.freq_dev[(t, k.id)]],
                              [1.0, 1.0 / v.droop], SENSE_LE, 0.0)
                    self._row(ConstraintTag("Eq37", idx),
                              [cat.ev_pfr[key], cat.pfr_capacity[(v.id, n, t)]],
                              [1.0, -1.0], SENSE_LE, 0.0)

    def build_objective(self) -> None:
        """Objective terms per case; see the formulation map for units."""
        inst, cat, model = self.inst, self.catalog, self.model
        prm = inst.params
        dt = self.dt
        for g in list(inst.conventional_units) + list(inst.renewable_units):
            for t in range(1, self.T + 1):
                model.col_obj[cat.power[(g.id, t)]] = g.cost * dt
        for g in inst.conventional_units:
            for t in range(1, self.T + 1):
                model.col_obj[cat.startup_cost[(g.id, t)]] = 1.0
                model.col_obj[cat.shutdown_cost[(g.id, t)]] = 1.0
        for g in inst.renewable_units:
            for t in range(1, self.T + 1):
                model.col_obj[cat.spill[(g.id, t)]] = prm.c_spill * dt
        for d in inst.consumers:
            for t in range(1, self.T + 1):
                model.col_obj[cat.unserved[(d.id, t)]] = prm.c_unserved * dt
        if not self.case.with_reserve:
            return
        freq_mult = float(len(inst.consumers)) if self.case.per_consumer_freq_penalty else 1.0
        for (t, kid), col in cat.freq_dev.items():
            model.col_obj[col] = -prm.c_freq * freq_mult
        for (did, t, kid), col in cat.unserved_pfr.items():
            model.col_obj[col] = prm.c_unserved
        for (vid, n, t), col in cat.pfr_capacity.items():
            v = next(g for g in inst.pev_groups if g.id == vid)
            model.col_obj[col] = v.capacity_offer_at(t)
        deploy_scale = 1.0 if self.case.literal_deployment_cost else prm.d_pr
        for (vid, n, t, kid), col in cat.ev_pfr.items():
            v = next(g for g in inst.pev_groups if g.id == vid)
            model.col_obj[col] = v.deployment_offer_at(t) * deploy_scale

    def run(self) -> tuple[MilpModel, VariableCatalog]:
        self.add_variables()
        self.add_energy_balance()
        self.add_network()
        self.add_unit_limits()
        self.add_ramps()
        self.add_commitment_logic()
        if self.case.with_reserve:
            self.add_generator_pfr()
            self.add_pfr_balance()
        self.add_pev_storage()
        self.add_pev_pfr()
        self.build_objective()
        self.model._matrix_cache = None
        return self.model, self.catalog


def _merge(cols: list, vals: list, col: int, add: float) -> None:
    """Accumulate a coefficient, collapsing duplicate column entries."""
    try:
        i = cols.index(col)
    except ValueError:
        cols.append(col)
        vals.append(add)
        return
    vals[i] += add


def build(instance: Instance, case: CaseConfig, *,
          unserved_response_cap: bool = True) -> tuple[MilpModel, VariableCatalog]:
    """Compile ``instance`` under ``case`` into a model plus its catalog.

    ``unserved_response_cap`` keeps the UDPR upper rows (post-contingency
    shedding cannot exceed the served load).  The ex-post recourse drops
    them so an unabsorbable outage shows up as (penalized) excess shedding
    instead of an infeasible evaluation.
    """
    return FormulationBuilder(instance, case, unserved_response_cap).run()


def explain(model: MilpModel, row: int) -> ConstraintTag:
    """Constraint provenance of ``row``; raises UnknownRowError (UNKNOWN_ROW)."""
    if not isinstance(row, int) or row < 0 or row >= model.n_rows:
        raise UnknownRowError(f"UNKNOWN_ROW: {row}")
    tag = model.row_tags[row]
    if tag is None:
        raise UnknownRowError(f"UNKNOWN_ROW: row {row} carries no tag")
    return tag
