"""SciPy/HiGHS backend behind the same model and solution contracts.

Used for models too large for the dense built-in kernel (the ``auto``
engine switches over above ``SolverConfig.auto_size_limit`` rows+columns).
Single-threaded and deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog
from scipy.optimize import milp as scipy_milp

from .model import (
    LpSolution,
    LpStatus,
    MilpModel,
    MipSolution,
    MipStatus,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    SolverConfig,
)


def _row_bounds(model: MilpModel) -> tuple[np.ndarray, np.ndarray]:
    lb = np.full(model.n_rows, -np.inf)
    ub = np.full(model.n_rows, np.inf)
    rhs = model.rhs_array()
    for i, sense in enumerate(model.row_sense):
        if sense == SENSE_LE:
            ub[i] = rhs[i]
        elif sense == SENSE_GE:
            lb[i] = rhs[i]
        else:
            lb[i] = rhs[i]
            ub[i] = rhs[i]
    return lb, ub


def highs_solve_lp(model: MilpModel, config: Optional[SolverConfig] = None) -> LpSolution:
    """Continuous relaxation via ``scipy.optimize.linprog`` (HiGHS)."""
    cfg = config or SolverConfig()
    model.check()
    A = model.matrix()
    rhs = model.rhs_array()
    senses = np.asarray([{SENSE_LE: 0, SENSE_EQ: 1, SENSE_GE: 2}[s] for s in model.row_sense])
    le_rows = np.flatnonzero(senses == 0)
    ge_rows = np.flatnonzero(senses == 2)
    eq_rows = np.flatnonzero(senses == 1)
    ineq_rows = np.concatenate([le_rows, ge_rows])
    sign = np.concatenate([np.ones(le_rows.size), -np.ones(ge_rows.size)])
    A_ub = sp.diags(sign) @ A[ineq_rows] if ineq_rows.size else None
    b_ub = sign * rhs[ineq_rows] if ineq_rows.size else None
    A_eq = A[eq_rows] if eq_rows.size else None
    b_eq = rhs[eq_rows] if eq_rows.size else None
    res = linprog(
        model.obj_array(),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=np.column_stack([model.lower_array(), model.upper_array()]),
        method="highs",
    )
    if res.status == 2:
        return LpSolution(status=LpStatus.INFEASIBLE, message=res.message)
    if res.status == 3:
        return LpSolution(status=LpStatus.UNBOUNDED, message=res.message)
    if not res.success:
        return LpSolution(status=LpStatus.NUMERICAL_FAILURE, message=res.message)
    duals = np.zeros(model.n_rows)
    if ineq_rows.size:
        duals[ineq_rows] = sign * res.ineqlin.marginals
    if eq_rows.size:
        duals[eq_rows] = res.eqlin.marginals
    x = np.asarray(res.x, dtype=float)
    reduced = model.obj_array() - (A.T @ duals if model.n_rows else 0.0)
    pivots = int(np.sum(res.nit)) if np.ndim(res.nit) else int(res.nit)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=x,
        objective=float(res.fun),
        duals=duals,
        reduced_costs=reduced,
        pivots=pivots,
    )


def highs_solve_mip(model: MilpModel, config: Optional[SolverConfig] = None) -> MipSolution:
    """Binary MILP via ``scipy.optimize.milp`` (HiGHS branch and bound)."""
    cfg = config or SolverConfig()
    model.check()
    integrality = np.asarray([1 if b else 0 for b in model.col_binary])
    lb, ub = _row_bounds(model)
    constraints = (
        LinearConstraint(model.matrix(), lb, ub) if model.n_rows else ()
    )
    options: dict = {"mip_rel_gap": cfg.rel_gap, "presolve": cfg.presolve}
    if cfg.time_limit is not None:
        options["time_limit"] = cfg.time_limit
    if cfg.node_limit is not None:
        options["node_limit"] = cfg.node_limit
    res = scipy_milp(
        c=model.obj_array(),
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(model.lower_array(), model.upper_array()),
        options=options,
    )
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.status == 2:
        return MipSolution(status=MipStatus.INFEASIBLE, node_count=nodes,
                           message=res.message)
    if res.x is None:
        status = MipStatus.NODE_LIMIT if cfg.node_limit is not None else MipStatus.GAP_LIMIT
        return MipSolution(status=status, node_count=nodes,
                           message="limit reached without incumbent")
    x = np.asarray(res.x, dtype=float)
    for j in model.binary_cols():
        if abs(x[j] - round(x[j])) <= 1e-9:
            x[j] = round(x[j])
    objective = float(res.fun)
    bound = float(getattr(res, "mip_dual_bound", objective))
    bound = min(bound, objective)
    gap = max(0.0, objective - bound)
    if res.status == 0:
        status = MipStatus.OPTIMAL
    elif res.status == 1:
        status = MipStatus.NODE_LIMIT if cfg.node_limit is not None else MipStatus.GAP_LIMIT
    else:
        status = MipStatus.FEASIBLE
    return MipSolution(
        status=status,
        x=x,
        objective=objective,
        bound=bound,
        gap=gap,
        node_count=nodes,
        bound_history=[bound],
    )
