#!/usr/bin/env python3
"""Regenerate the bundled 64-bus campus instance (deterministic).

Shape: 64 buses on three radial feeders, 63 lines, 32 consumers, three
dispatchable units, two solar units, three PEV groups at six charging
points, five single-unit contingencies, 24 hourly periods.  Demand and
availability profiles are synthetic; the dispatchable/intermittent unit
parameters and the PEV battery/offer numbers follow the published campus
study this instance mimics.

Run:  python3 tools/make_unifap_instance.py [out.json]
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gridsched.domain import (  # noqa: E402
    Bus, Consumer, Contingency, ConventionalUnit, Instance, Line, PevGroup,
    RenewableUnit, SystemParams, validate,
)
from gridsched.io import instance_to_dict  # noqa: E402

# system demand profile, MW (t=1 is 12 am)
DEMAND = [0.62, 0.58, 0.55, 0.54, 0.56, 0.60, 0.72, 0.85,
          0.96, 1.03, 1.07, 1.09, 1.06, 1.03, 1.01, 1.05,
          1.11, 1.22, 1.32, 1.38, 1.28, 1.05, 0.84, 0.70]
# solar availability factor (1.0 only at t=14)
AVAIL = [0.00, 0.00, 0.00, 0.00, 0.00, 0.05, 0.15, 0.32,
         0.52, 0.70, 0.85, 0.95, 0.99, 1.00, 0.97, 0.88,
         0.72, 0.50, 0.25, 0.05, 0.00, 0.00, 0.00, 0.00]

T = 24
CHARGE_BUSES = ["b10", "b15", "b30", "b35", "b50", "b55"]


def build_instance() -> Instance:
    rng = np.random.default_rng(20210914)

    buses = [Bus("b01", is_slack=True)] + [Bus(f"b{i:02d}") for i in range(2, 65)]

    # b02..b06 are generation spurs off the hub; three feeders carry load
    lines = []

    def link(i, a, b, cap):
        lines.append(Line(f"l{i:02d}", a, b,
                          float(np.round(rng.uniform(0.06, 0.18), 4)),
                          (cap,) * T))

    li = 1
    for spur in ("b02", "b03", "b04", "b05", "b06"):
        link(li, "b01", spur, 2.5)
        li += 1
    feeders = [[f"b{i:02d}" for i in range(7, 27)],
               [f"b{i:02d}" for i in range(27, 47)],
               [f"b{i:02d}" for i in range(47, 65)]]
    for chain in feeders:
        prev = "b01"
        for bus in chain:
            link(li, prev, bus, 2.0)
            li += 1
            prev = bus
    assert li - 1 == 63

    conv = [
        ConventionalUnit(
            id=f"g{i}", bus=bus, cost=505.0, p_max=0.60, p_min=0.12, p0=0.30,
            u0=True, su_cost=909.00, sd_cost=9.09, ramp_up=0.15, ramp_down=0.15,
            min_up=3, min_down=2, init_must_run=0, init_must_stop=0, droop=6.0,
        )
        for i, bus in ((1, "b02"), (2, "b03"), (3, "b04"))
    ]
    renew = [
        RenewableUnit("g4", "b05", 0.0, 0.554, tuple(AVAIL)),
        RenewableUnit("g5", "b06", 0.0, 0.720, tuple(AVAIL)),
    ]

    # 32 consumers spread over the feeder buses with seeded weights
    load_buses = [b for chain in feeders for b in chain]
    picked = sorted(rng.choice(len(load_buses), size=32, replace=False))
    weights = rng.uniform(0.4, 1.6, size=32)
    weights /= weights.sum()
    consumers = []
    for idx, (pos, w) in enumerate(zip(picked, weights), start=1):
        profile = tuple(float(np.round(DEMAND[t] * w, 5)) for t in range(T))
        consumers.append(Consumer(f"d{idx:02d}", load_buses[int(pos)], profile))

    pev = [
        PevGroup(
            id="ev1",
            counts={b: 5 for b in CHARGE_BUSES},
            e_max=0.052, e_min=0.0052, e_initial=0.026, e_final=0.0442,
            p_max=0.0036, efficiency=0.95, window_start=9, window_end=22,
            droop=2.5, capacity_offer=50.0, deployment_offer=300.0,
        ),
        PevGroup(
            id="ev2",
            counts={b: c for b, c in zip(CHARGE_BUSES, (7, 7, 7, 7, 6, 6))},
            e_max=0.066, e_min=0.0066, e_initial=0.033, e_final=0.0561,
            p_max=0.0036, efficiency=0.95, window_start=9, window_end=22,
            droop=2.5, capacity_offer=50.0, deployment_offer=300.0,
        ),
        PevGroup(
            id="ev3",
            counts={b: 1 for b in CHARGE_BUSES},
            e_max=0.324, e_min=0.0324, e_initial=0.162, e_final=0.2592,
            p_max=0.044, efficiency=0.95, window_start=10, window_end=16,
            droop=2.5, capacity_offer=50.0, deployment_offer=300.0,
        ),
    ]

    contingencies = [Contingency(f"k{i}", (f"g{i}",)) for i in range(1, 6)]

    inst = Instance(
        buses=tuple(buses),
        lines=tuple(lines),
        conventional_units=tuple(conv),
        renewable_units=tuple(renew),
        consumers=tuple(consumers),
        pev_groups=tuple(pev),
        contingencies=tuple(contingencies),
        params=SystemParams(
            c_unserved=10000.0, c_spill=150.0, c_freq=2.0,
            delta_f_max=1.0, d_pr=0.25, n_periods=T, period_length=1.0,
            currency="BRL",
        ),
    )
    problems = validate(inst)
    assert not problems, problems[:5]
    return inst


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "gridsched" / "data"
        / "unifap_synthetic.json"
    )
    inst = build_instance()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n",
                   encoding="utf-8")
    total = sum(sum(c.demand) for c in inst.consumers)
    print(f"wrote {out} (total demand {total:.3f} MWh/day)")


if __name__ == "__main__":
    main()
