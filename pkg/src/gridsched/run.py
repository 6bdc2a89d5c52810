"""End-to-end solve pipeline shared by the CLI, demos and tests."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .domain import Instance
from .evaluate import (
    ContingencyResponse,
    CostReport,
    Schedule,
    cost_report,
    evaluate_ex_post,
    extract_response,
    extract_schedule,
)
from .formulation import CaseConfig, CaseMode, Solution, VariableCatalog, build
from .milp import MilpModel, MipSolution, MipStatus, SolverConfig, solve_mip

CASE_MODES = {
    1: CaseMode.NO_RESERVE,
    2: CaseMode.GENERATORS_ONLY,
    3: CaseMode.GENERATORS_AND_PEVS,
}

__all__ = ["CASE_MODES", "CaseResult", "SolveError", "solve_case", "compare_cases"]


class SolveError(RuntimeError):
    """Raised when a case cannot produce a usable schedule."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # "infeasible" | "limit"


@dataclass
class CaseResult:
    case_number: int
    case: CaseConfig
    model: MilpModel
    catalog: VariableCatalog
    mip: MipSolution
    solution: Solution
    schedule: Schedule
    response: Optional[ContingencyResponse]
    report: CostReport
    runtime_seconds: float


def solve_case(
    instance: Instance,
    case_number: int,
    config: Optional[SolverConfig] = None,
    case_config: Optional[CaseConfig] = None,
) -> CaseResult:
    """Solve one study case end to end.

    Case 1 solves the reserve-blind model and always follows up with the
    ex-post contingency evaluation, so its cost report is comparable with
    the reserve-aware cases.
    """
    if case_number not in CASE_MODES:
        raise ValueError(f"case must be 1, 2 or 3, got {case_number}")
    cfg = config or SolverConfig()
    case = case_config or CaseConfig(mode=CASE_MODES[case_number])
    t0 = time.monotonic()
    model, catalog = build(instance, case)
    mip = solve_mip(model, cfg)
    if mip.status == MipStatus.INFEASIBLE:
        raise SolveError("infeasible", f"case {case_number}: model infeasible")
    if mip.x is None:
        raise SolveError("limit", f"case {case_number}: {mip.message}")
    solution = Solution(
        catalog=catalog,
        x=mip.x,
        objective=mip.objective,
        bound=mip.bound,
        gap=mip.gap,
        status=mip.status.value,
        node_count=mip.node_count,
    )
    schedule = extract_schedule(instance, solution)
    if case.mode is CaseMode.NO_RESERVE:
        if instance.contingencies:
            response, report = evaluate_ex_post(instance, schedule, cfg)
        else:
            response = None
            report = cost_report(instance, case, solution)
    else:
        response = extract_response(instance, solution)
        report = cost_report(instance, case, solution, response=response)
    return CaseResult(
        case_number=case_number,
        case=case,
        model=model,
        catalog=catalog,
        mip=mip,
        solution=solution,
        schedule=schedule,
        response=response,
        report=report,
        runtime_seconds=time.monotonic() - t0,
    )


def compare_cases(
    instance: Instance, config: Optional[SolverConfig] = None
) -> list[CaseResult]:
    return [solve_case(instance, c, config) for c in (1, 2, 3)]
