"""Typed, validated description of a day-ahead scheduling instance.

An :class:`Instance` is immutable after construction (all collections are
tuples), so it can be shared freely across tasks.  ``validate`` is a pure
function returning machine-readable violations instead of raising; an
instance with an empty violation list is accepted by every model builder.

Units: power in MW, energy in MWh, droop in Hz/MW, costs in an opaque
currency (per MWh / per MW / per Hz as noted per field).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

__all__ = [
    "Bus",
    "Line",
    "ConventionalUnit",
    "RenewableUnit",
    "Consumer",
    "PevGroup",
    "Contingency",
    "SystemParams",
    "Instance",
    "Violation",
    "validate",
    "total_demand",
]


@dataclass(frozen=True)
class Bus:
    id: str
    is_slack: bool = False


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    reactance: float  # per-unit, > 0
    capacity: tuple[float, ...]  # MW per period


@dataclass(frozen=True)
class ConventionalUnit:
    id: str
    bus: str
    cost: float  # currency/MWh
    p_max: float  # MW
    p_min: float  # MW
    p0: float  # MW output before period 1
    u0: bool  # committed before period 1
    su_cost: float  # currency per startup
    sd_cost: float  # currency per shutdown
    ramp_up: float  # MW per period
    ramp_down: float  # MW per period
    min_up: int  # periods
    min_down: int  # periods
    init_must_run: int  # remaining must-run periods at t=1
    init_must_stop: int  # remaining must-stay-off periods at t=1
    droop: float  # Hz/MW, > 0


@dataclass(frozen=True)
class RenewableUnit:
    id: str
    bus: str
    cost: float  # currency/MWh, normally 0
    p_max: float  # MW
    availability: tuple[float, ...]  # fraction of p_max per period, in [0, 1]


@dataclass(frozen=True)
class Consumer:
    id: str
    bus: str
    demand: tuple[float, ...]  # MW per period


@dataclass(frozen=True)
class PevGroup:
    id: str
    counts: Mapping[str, int]  # bus id -> number of vehicles
    e_max: float  # MWh per vehicle
    e_min: float  # MWh per vehicle
    e_initial: float  # MWh per vehicle at window start
    e_final: float  # MWh per vehicle required at window end
    p_max: float  # MW per vehicle (charge and discharge rate)
    efficiency: float  # (0, 1]
    window_start: int  # first grid-connected period
    window_end: int  # last grid-connected period
    droop: float  # Hz/MW, > 0
    capacity_offer: float  # currency/MW of scheduled reserve
    deployment_offer: float  # currency/MWh of deployed reserve energy
    capacity_offer_profile: Optional[tuple[float, ...]] = None  # per-period override
    deployment_offer_profile: Optional[tuple[float, ...]] = None

    def window(self) -> range:
        """Periods (1-based, inclusive) in which the fleet is connected."""
        return range(self.window_start, self.window_end + 1)

    def capacity_offer_at(self, t: int) -> float:
        if self.capacity_offer_profile is not None:
            return self.capacity_offer_profile[t - 1]
        return self.capacity_offer

    def deployment_offer_at(self, t: int) -> float:
        if self.deployment_offer_profile is not None:
            return self.deployment_offer_profile[t - 1]
        return self.deployment_offer


@dataclass(frozen=True)
class Contingency:
    id: str
    outaged_units: tuple[str, ...]


@dataclass(frozen=True)
class SystemParams:
    c_unserved: float = 10000.0  # currency/MWh
    c_spill: float = 0.0  # currency/MWh
    c_freq: float = 0.0  # currency/Hz
    delta_f_max: float = 1.0  # Hz, > 0
    d_pr: float = 0.25  # hours of sustained frequency response
    n_periods: int = 24
    period_length: float = 1.0  # hours
    currency: str = "BRL"


@dataclass(frozen=True)
class Instance:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    conventional_units: tuple[ConventionalUnit, ...]
    renewable_units: tuple[RenewableUnit, ...]
    consumers: tuple[Consumer, ...]
    pev_groups: tuple[PevGroup, ...]
    contingencies: tuple[Contingency, ...]
    params: SystemParams = field(default_factory=SystemParams)

    # -- lookups (cheap; instances are small) ---------------------------

    def bus_ids(self) -> set[str]:
        return {b.id for b in self.buses}

    def slack_bus(self) -> Bus:
        return next(b for b in self.buses if b.is_slack)

    def unit_ids(self) -> set[str]:
        return {g.id for g in self.conventional_units} | {
            g.id for g in self.renewable_units
        }

    def periods(self) -> range:
        return range(1, self.params.n_periods + 1)

    def pev_pairs(self) -> list[tuple[PevGroup, str]]:
        """Active (group, bus) pairs: at least one vehicle present."""
        pairs = []
        for v in self.pev_groups:
            for n in sorted(v.counts):
                if v.counts[n] >= 1:
                    pairs.append((v, n))
        return pairs


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    path: str  # JSON-pointer-like location within the instance document

    def __str__(self) -> str:
        return f"{self.code} at {self.path}: {self.message}"


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def validate(instance: Instance) -> list[Violation]:
    """Check every structural invariant; returns all violations found.

    Never raises on a structurally well-formed instance.  An empty result
    guarantees the formulation builders accept the instance and produce a
    bounded model.
    """
    out: list[Violation] = []
    add = lambda code, msg, path: out.append(Violation(code, msg, path))
    T = instance.params.n_periods

    # system parameters
    p = instance.params
    if not isinstance(T, int) or T < 1:
        add("BAD_HORIZON", f"n_periods must be a positive integer, got {T!r}", "/system/n_periods")
        return out  # everything else depends on T
    if not _finite(p.period_length) or p.period_length <= 0:
        add("BAD_PERIOD_LENGTH", "period_length must be > 0", "/system/period_length")
    for name in ("c_unserved", "c_spill", "c_freq"):
        v = getattr(p, name)
        if not _finite(v) or v < 0:
            add("NEG_PENALTY", f"{name} must be >= 0", f"/system/{name}")
    if not _finite(p.delta_f_max) or p.delta_f_max <= 0:
        add("NONPOS_DELTA_F_MAX", "delta_f_max must be > 0", "/system/delta_f_max")
    if not _finite(p.d_pr) or not (0 < p.d_pr <= p.period_length):
        add("BAD_DPR", "d_pr must satisfy 0 < d_pr <= period_length", "/system/d_pr")

    # buses
    seen: set[str] = set()
    slack_count = 0
    for i, b in enumerate(instance.buses):
        if b.id in seen:
            add("DUP_BUS_ID", f"duplicate bus id {b.id!r}", f"/buses/{i}/id")
        seen.add(b.id)
        if b.is_slack:
            slack_count += 1
    if slack_count == 0:
        add("NO_SLACK", "exactly one slack bus required, found none", "/buses")
    elif slack_count > 1:
        add("DUP_SLACK", f"exactly one slack bus required, found {slack_count}", "/buses")
    buses = instance.bus_ids()

    def check_vector(vec, n, what, path, lo=None, hi=None, code=None):
        if len(vec) != n:
            add("BAD_VECTOR_LEN", f"{what} must have length {n}, got {len(vec)}", path)
            return
        for t, x in enumerate(vec):
            if not _finite(x):
                add("NONFINITE_VALUE", f"{what}[{t}] is not a finite number", f"{path}/{t}")
            elif lo is not None and x < lo:
                add(code or "VALUE_RANGE", f"{what}[{t}] = {x} below {lo}", f"{path}/{t}")
            elif hi is not None and x > hi:
                add(code or "VALUE_RANGE", f"{what}[{t}] = {x} above {hi}", f"{path}/{t}")

    # lines
    seen = set()
    for i, ln in enumerate(instance.lines):
        path = f"/lines/{i}"
        if ln.id in seen:
            add("DUP_LINE_ID", f"duplicate line id {ln.id!r}", f"{path}/id")
        seen.add(ln.id)
        if ln.from_bus == ln.to_bus:
            add("LINE_SELF_LOOP", "from_bus equals to_bus", path)
        for end, attr in ((ln.from_bus, "from_bus"), (ln.to_bus, "to_bus")):
            if end not in buses:
                add("UNKNOWN_BUS", f"line references unknown bus {end!r}", f"{path}/{attr}")
        if not _finite(ln.reactance) or ln.reactance <= 0:
            add("NONPOS_REACTANCE", "reactance must be > 0", f"{path}/reactance")
        check_vector(ln.capacity, T, "capacity", f"{path}/capacity", lo=0.0, code="NEG_CAPACITY")

    # units (ids must be unique across both families: contingencies refer to them)
    seen = set()
    for i, g in enumerate(instance.conventional_units):
        path = f"/conventional_units/{i}"
        if g.id in seen:
            add("DUP_UNIT_ID", f"duplicate unit id {g.id!r}", f"{path}/id")
        seen.add(g.id)
        if g.bus not in buses:
            add("UNKNOWN_BUS", f"unit on unknown bus {g.bus!r}", f"{path}/bus")
        if not (_finite(g.p_min) and _finite(g.p_max) and 0 <= g.p_min <= g.p_max):
            add("P_RANGE", f"need 0 <= p_min <= p_max, got [{g.p_min}, {g.p_max}]", path)
        if not _finite(g.ramp_up) or g.ramp_up < 0 or not _finite(g.ramp_down) or g.ramp_down < 0:
            add("NEG_RAMP", "ramp limits must be >= 0", path)
        if g.min_up < 1 or g.min_down < 1:
            add("BAD_MIN_TIME", "min_up and min_down must be >= 1", path)
        if g.init_must_run < 0 or g.init_must_stop < 0:
            add("BAD_INIT_WINDOW", "initial must-run/stop periods must be >= 0", path)
        if not g.u0 and g.init_must_run != 0:
            add("BAD_INIT_WINDOW", "init_must_run must be 0 for an offline unit", f"{path}/init_must_run")
        if g.u0 and g.init_must_stop != 0:
            add("BAD_INIT_WINDOW", "init_must_stop must be 0 for an online unit", f"{path}/init_must_stop")
        if g.u0:
            if not (g.p_min <= g.p0 <= g.p_max):
                add("P0_RANGE", f"p0 = {g.p0} outside [{g.p_min}, {g.p_max}]", f"{path}/p0")
        elif g.p0 != 0:
            add("P0_RANGE", "p0 must be 0 for an offline unit", f"{path}/p0")
        if not _finite(g.droop) or g.droop <= 0:
            add("NONPOS_DROOP", "droop must be > 0", f"{path}/droop")

    for i, g in enumerate(instance.renewable_units):
        path = f"/renewable_units/{i}"
        if g.id in seen:
            add("DUP_UNIT_ID", f"duplicate unit id {g.id!r}", f"{path}/id")
        seen.add(g.id)
        if g.bus not in buses:
            add("UNKNOWN_BUS", f"unit on unknown bus {g.bus!r}", f"{path}/bus")
        if not _finite(g.p_max) or g.p_max < 0:
            add("P_RANGE", "p_max must be >= 0", f"{path}/p_max")
        check_vector(g.availability, T, "availability", f"{path}/availability",
                     lo=0.0, hi=1.0, code="AVAIL_RANGE")
    units = instance.unit_ids()

    # consumers
    seen = set()
    for i, d in enumerate(instance.consumers):
        path = f"/consumers/{i}"
        if d.id in seen:
            add("DUP_CONSUMER_ID", f"duplicate consumer id {d.id!r}", f"{path}/id")
        seen.add(d.id)
        if d.bus not in buses:
            add("UNKNOWN_BUS", f"consumer on unknown bus {d.bus!r}", f"{path}/bus")
        check_vector(d.demand, T, "demand", f"{path}/demand", lo=0.0, code="NEG_DEMAND")

    # PEV groups
    seen = set()
    for i, v in enumerate(instance.pev_groups):
        path = f"/pev_groups/{i}"
        if v.id in seen:
            add("DUP_PEV_ID", f"duplicate PEV group id {v.id!r}", f"{path}/id")
        seen.add(v.id)
        for n, cnt in v.counts.items():
            if n not in buses:
                add("UNKNOWN_BUS", f"PEV count on unknown bus {n!r}", f"{path}/counts/{n}")
            if not isinstance(cnt, int) or cnt < 0:
                add("PEV_NEG_COUNT", f"vehicle count must be an integer >= 0, got {cnt!r}",
                    f"{path}/counts/{n}")
        if not (0 <= v.e_min <= v.e_initial <= v.e_max):
            add("PEV_ENERGY_ORDER", "need 0 <= e_min <= e_initial <= e_max", path)
        if not (v.e_min <= v.e_final <= v.e_max):
            add("PEV_ENERGY_ORDER", "need e_min <= e_final <= e_max", path)
        if not (0 < v.efficiency <= 1):
            add("PEV_EFFICIENCY", "efficiency must be in (0, 1]", f"{path}/efficiency")
        if not (1 <= v.window_start <= v.window_end <= T):
            add("PEV_WINDOW", f"need 1 <= window_start <= window_end <= {T}", path)
        elif 0 < v.efficiency <= 1 and _finite(v.p_max) and v.p_max >= 0:
            # the required end-of-window energy must be chargeable at all
            wlen = v.window_end - v.window_start + 1
            reach = v.e_initial + v.efficiency * v.p_max * instance.params.period_length * wlen
            if _finite(reach) and v.e_final > reach + 1e-12:
                add("PEV_UNREACHABLE_TARGET",
                    f"e_final {v.e_final} not reachable from e_initial {v.e_initial} "
                    f"within the {wlen}-period window", path)
        if not _finite(v.p_max) or v.p_max < 0:
            add("P_RANGE", "per-vehicle p_max must be >= 0", f"{path}/p_max")
        if not _finite(v.droop) or v.droop <= 0:
            add("NONPOS_DROOP", "droop must be > 0", f"{path}/droop")
        if v.capacity_offer < 0 or v.deployment_offer < 0:
            add("NEG_OFFER", "reserve offers must be >= 0 (negative offers unbound the model)",
                path)
        for name, prof in (("capacity_offer_profile", v.capacity_offer_profile),
                           ("deployment_offer_profile", v.deployment_offer_profile)):
            if prof is not None:
                check_vector(prof, T, name, f"{path}/{name}", lo=0.0, code="NEG_OFFER")

    # contingencies (generating-unit outages only)
    seen = set()
    for i, k in enumerate(instance.contingencies):
        path = f"/contingencies/{i}"
        if k.id in seen:
            add("DUP_CONTINGENCY_ID", f"duplicate contingency id {k.id!r}", f"{path}/id")
        seen.add(k.id)
        if len(k.outaged_units) == 0:
            add("EMPTY_CONTINGENCY", "outage set must be non-empty", f"{path}/outaged_units")
        for j, gid in enumerate(k.outaged_units):
            if gid not in units:
                add("UNKNOWN_UNIT", f"contingency outages unknown unit {gid!r} "
                    "(only generating-unit outages are supported)",
                    f"{path}/outaged_units/{j}")
    return out


def total_demand(instance: Instance, t: int) -> float:
    """System demand (MW) at period ``t`` (1-based)."""
    if not 1 <= t <= instance.params.n_periods:
        raise ValueError(f"period {t} outside 1..{instance.params.n_periods}")
    return sum(d.demand[t - 1] for d in instance.consumers)
