"""Seeded generators for solver verification.

``random_bounded_lp`` produces dense LPs that are feasible and bounded by
construction (an interior point is drawn first; every variable gets finite
bounds).  ``random_small_instance`` produces valid desk-size scheduling
instances for the enumeration-vs-search oracle corpus.
"""

from __future__ import annotations

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
from .milp import MilpModel, SENSE_EQ, SENSE_GE, SENSE_LE

__all__ = ["random_bounded_lp", "random_small_instance"]


def random_bounded_lp(seed: int, n_max: int = 30, m_max: int = 20) -> MilpModel:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    x0 = rng.uniform(-5.0, 5.0, n)
    model = MilpModel(f"randlp{seed}")
    for j in range(n):
        lo = x0[j] - rng.uniform(0.1, 4.0)
        up = x0[j] + rng.uniform(0.1, 4.0)
        model.add_col(f"x{j}", lo, up, float(rng.normal()))
    for i in range(m):
        a = rng.normal(size=n)
        a[rng.random(n) < 0.3] = 0.0
        if not np.any(a):
            a[int(rng.integers(0, n))] = 1.0
        act = float(a @ x0)
        sense = (SENSE_LE, SENSE_GE, SENSE_EQ)[int(rng.integers(0, 3))]
        if sense == SENSE_LE:
            rhs = act + rng.uniform(0.0, 2.0)
        elif sense == SENSE_GE:
            rhs = act - rng.uniform(0.0, 2.0)
        else:
            rhs = act
        model.add_row(list(range(n)), a, sense, rhs)
    return model


def _round(x, nd=5):
    return float(np.round(x, nd))


def random_small_instance(seed: int) -> Instance:
    """Valid instance with <=3 buses, <=2 conventional units, <=6 periods,
    <=2 contingencies and <=1 PEV group."""
    rng = np.random.default_rng(seed)
    T = int(rng.integers(2, 7))
    n_bus = int(rng.integers(1, 4))
    buses = tuple(Bus(f"b{i+1}", is_slack=(i == 0)) for i in range(n_bus))
    lines = []
    for i in range(1, n_bus):
        parent = int(rng.integers(0, i))
        cap = _round(rng.uniform(0.3, 2.0), 3)
        lines.append(Line(f"l{i}", f"b{parent+1}", f"b{i+1}",
                          _round(rng.uniform(0.05, 0.3), 4), (cap,) * T))

    n_conv = int(rng.integers(1, 3))
    conv = []
    for gi in range(n_conv):
        p_max = _round(rng.uniform(0.4, 1.0), 3)
        p_min = _round(p_max * rng.uniform(0.1, 0.3), 3)
        u0 = bool(rng.random() < 0.6)
        ramp_down = _round(p_max * rng.uniform(0.4, 1.0), 3)
        # keep p0 within one down-ramp of p_min so startup state cannot
        # force more generation than the system can absorb
        p0 = _round(min(rng.uniform(p_min, p_max), p_min + 0.9 * ramp_down), 3) if u0 else 0.0
        min_up = int(rng.integers(1, min(3, T) + 1))
        min_down = int(rng.integers(1, min(3, T) + 1))
        tg = int(rng.integers(0, min(2, T) + 1)) if u0 else 0
        tc = 0 if u0 else int(rng.integers(0, min(2, T) + 1))
        conv.append(ConventionalUnit(
            id=f"g{gi+1}", bus=f"b{int(rng.integers(0, n_bus))+1}",
            cost=_round(rng.uniform(200.0, 600.0), 2),
            p_max=p_max, p_min=p_min, p0=p0, u0=u0,
            su_cost=_round(rng.uniform(50.0, 900.0), 2),
            sd_cost=_round(rng.uniform(1.0, 20.0), 2),
            ramp_up=_round(p_max * rng.uniform(0.4, 1.0), 3),
            ramp_down=ramp_down,
            min_up=min_up, min_down=min_down,
            init_must_run=tg, init_must_stop=tc,
            droop=_round(rng.uniform(1.0, 4.0), 3),
        ))

    renew = []
    if rng.random() < 0.6:
        renew.append(RenewableUnit(
            id="r1", bus=f"b{int(rng.integers(0, n_bus))+1}", cost=0.0,
            p_max=_round(rng.uniform(0.2, 0.8), 3),
            availability=tuple(_round(rng.uniform(0.0, 1.0), 3) for _ in range(T)),
        ))

    n_cons = int(rng.integers(1, 4))
    total_cap = sum(g.p_max for g in conv)
    demands = [
        [_round(rng.uniform(0.05, 0.5) * total_cap / n_cons, 4) for _ in range(T)]
        for _ in range(n_cons)
    ]
    # forced-minimum generation of initially-online units must be absorbable
    for t in range(1, T + 1):
        floor = sum(g.p_min for g in conv if g.u0 and t <= max(g.init_must_run, 1))
        tot = sum(d[t - 1] for d in demands)
        if tot < floor + 0.02:
            bump = (floor + 0.02 - tot) / n_cons
            for d in demands:
                d[t - 1] = _round(d[t - 1] + bump, 4)
    consumers = tuple(
        Consumer(f"d{i+1}", f"b{int(rng.integers(0, n_bus))+1}", tuple(demands[i]))
        for i in range(n_cons)
    )

    pev = []
    if rng.random() < 0.7:
        width = int(rng.integers(min(2, T), T + 1))
        start = int(rng.integers(1, T - width + 2))
        eff = _round(rng.uniform(0.85, 1.0), 3)
        e_max = _round(rng.uniform(0.02, 0.1), 4)
        e_min = _round(0.1 * e_max, 5)
        e_init = _round(rng.uniform(e_min, e_max), 5)
        p_max = _round(rng.uniform(0.005, 0.05), 4)
        # keep the target strictly inside what the window can charge
        e_final = _round(min(e_max, e_init + 0.35 * (e_max - e_init),
                             e_init + 0.6 * eff * p_max * width), 5)
        n_pts = int(rng.integers(1, min(2, n_bus) + 1))
        pts = rng.choice(n_bus, size=n_pts, replace=False)
        pev.append(PevGroup(
            id="ev1",
            counts={f"b{int(i)+1}": int(rng.integers(1, 6)) for i in pts},
            e_max=e_max, e_min=e_min, e_initial=e_init, e_final=e_final,
            p_max=p_max, efficiency=eff, window_start=start,
            window_end=start + width - 1,
            droop=_round(rng.uniform(1.0, 5.0), 3),
            capacity_offer=float(rng.choice([0.0, 20.0, 50.0])),
            deployment_offer=float(rng.choice([0.0, 100.0, 300.0])),
        ))

    all_units = [g.id for g in conv] + [r.id for r in renew]
    n_k = int(rng.integers(0, 3))
    picked = list(rng.choice(len(all_units), size=min(n_k, len(all_units)),
                             replace=False))
    contingencies = tuple(
        Contingency(f"k{j+1}", (all_units[int(i)],)) for j, i in enumerate(picked)
    )

    inst = Instance(
        buses=buses,
        lines=tuple(lines),
        conventional_units=tuple(conv),
        renewable_units=tuple(renew),
        consumers=consumers,
        pev_groups=tuple(pev),
        contingencies=contingencies,
        params=SystemParams(
            c_unserved=float(rng.choice([1000.0, 5000.0, 10000.0])),
            c_spill=float(rng.choice([0.0, 50.0, 150.0])),
            c_freq=float(rng.choice([0.0, 1.0, 3.0])),
            delta_f_max=_round(rng.uniform(0.5, 1.0), 2),
            d_pr=0.25,
            n_periods=T,
            period_length=1.0,
        ),
    )
    problems = validate(inst)
    assert not problems, f"generator produced invalid instance: {problems[:3]}"
    return inst
