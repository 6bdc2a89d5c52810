"""Self-contained MILP kernel: bounded-variable simplex, branch and bound,
and a HiGHS-backed engine for larger instances behind the same contracts.
"""

from __future__ import annotations

from typing import Optional

from .model import (
    LpSolution,
    LpStatus,
    MilpModel,
    MipSolution,
    MipStatus,
    ModelError,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    SolverConfig,
    fix_binaries,
)
from .simplex import dual_objective, farkas_gap, simplex_solve
from . import branch_and_bound as _bnb
from . import highs as _highs


def _pick_engine(model: MilpModel, config: SolverConfig) -> str:
    if config.engine != "auto":
        return config.engine
    if model.n_rows + model.n_cols <= config.auto_size_limit:
        return "simplex"
    return "highs"


def solve_lp(model: MilpModel, config: Optional[SolverConfig] = None) -> LpSolution:
    """Solve the continuous relaxation of ``model`` (binaries relaxed)."""
    cfg = config or SolverConfig()
    if _pick_engine(model, cfg) == "simplex":
        return simplex_solve(model, cfg)
    return _highs.highs_solve_lp(model, cfg)


def solve_mip(model: MilpModel, config: Optional[SolverConfig] = None) -> MipSolution:
    """Minimize ``model`` with its binary columns integral."""
    cfg = config or SolverConfig()
    if _pick_engine(model, cfg) == "simplex":
        return _bnb.solve_mip(model, cfg, lp_solver=simplex_solve)
    return _highs.highs_solve_mip(model, cfg)


__all__ = [
    "LpSolution",
    "LpStatus",
    "MilpModel",
    "MipSolution",
    "MipStatus",
    "ModelError",
    "SENSE_EQ",
    "SENSE_GE",
    "SENSE_LE",
    "SolverConfig",
    "dual_objective",
    "farkas_gap",
    "fix_binaries",
    "simplex_solve",
    "solve_lp",
    "solve_mip",
]
