import dataclasses

import pytest

from gridsched import (
    Bus,
    Consumer,
    Contingency,
    ConventionalUnit,
    Instance,
    Line,
    PevGroup,
    RenewableUnit,
    SystemParams,
    bundled_instance_path,
    read_instance,
)


def table1_unit(uid="g1", bus="b1", **overrides) -> ConventionalUnit:
    """Dispatchable unit with the published campus-study parameters."""
    base = dict(
        id=uid, bus=bus, cost=505.0, p_max=0.60, p_min=0.12, p0=0.30, u0=True,
        su_cost=909.00, sd_cost=9.09, ramp_up=0.15, ramp_down=0.15,
        min_up=3, min_down=2, init_must_run=0, init_must_stop=0, droop=2.0,
    )
    base.update(overrides)
    return ConventionalUnit(**base)


def group1_pev(vid="ev1", counts=None, T=24, **overrides) -> PevGroup:
    base = dict(
        id=vid, counts=counts or {"b1": 10}, e_max=0.052, e_min=0.0052,
        e_initial=0.026, e_final=0.0442, p_max=0.0072, efficiency=0.95,
        window_start=1, window_end=T, droop=2.5,
        capacity_offer=50.0, deployment_offer=300.0,
    )
    base.update(overrides)
    return PevGroup(**base)


def single_bus_instance(T=1, demand=1.0, with_pev=False, contingencies=(),
                        params=None, unit_kwargs=None) -> Instance:
    unit = table1_unit(min_up=1, min_down=1, **(unit_kwargs or {}))
    return Instance(
        buses=(Bus("b1", is_slack=True),),
        lines=(),
        conventional_units=(unit,),
        renewable_units=(),
        consumers=(Consumer("d1", "b1", (demand,) * T),),
        pev_groups=(group1_pev(T=T, counts={"b1": 2}),) if with_pev else (),
        contingencies=tuple(contingencies),
        params=params or SystemParams(n_periods=T, c_unserved=10000.0),
    )


def replace_params(instance: Instance, **kw) -> Instance:
    return dataclasses.replace(instance, params=dataclasses.replace(instance.params, **kw))


@pytest.fixture(scope="session")
def bundled():
    return read_instance(bundled_instance_path())
