"""Day-ahead unit-commitment scheduling with electric-vehicle fleets
providing droop-based primary frequency reserve.

The package is organized as: ``domain`` (typed instances and validation),
``formulation`` (instance -> tagged MILP), ``milp`` (self-contained LP/MIP
kernel plus a HiGHS backend), ``evaluate`` (independent feasibility oracle,
ex-post contingency evaluation, cost reports, enumeration oracle), ``io``
(instance JSON, result bundles, MPS) and ``cli`` (batch front end).
"""

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
    Violation,
    total_demand,
    validate,
)
from .formulation import (
    CaseConfig,
    CaseMode,
    ConstraintTag,
    Solution,
    VariableCatalog,
    build,
    explain,
)
from .milp import (
    LpSolution,
    LpStatus,
    MilpModel,
    MipSolution,
    MipStatus,
    SolverConfig,
    fix_binaries,
    solve_lp,
    solve_mip,
)
from .evaluate import (
    ContingencyResponse,
    CostReport,
    Schedule,
    brute_force_commitment,
    check_feasibility,
    cost_report,
    evaluate_ex_post,
    extract_response,
    extract_schedule,
)
from .io import (
    export_mps,
    read_instance,
    read_mps,
    read_result_bundle,
    write_instance,
    write_results,
)
from .run import CASE_MODES, CaseResult, SolveError, compare_cases, solve_case

__version__ = "0.1.0"

BUNDLED_INSTANCE = "unifap_synthetic.json"


def bundled_instance_path() -> str:
    """Filesystem path of the packaged 64-bus synthetic instance."""
    from importlib.resources import files

    return str(files("gridsched").joinpath("data", BUNDLED_INSTANCE))
