"""Sparse MILP container shared by the solver engines and the exporters.

A model is a plain column/row store: columns carry bounds, an objective
coefficient and an optional binary flag; rows carry a sparse coefficient
list, a sense and a right-hand side.  The objective sense is always
minimize.  Rows may carry an opaque ``tag`` payload (the formulation layer
attaches constraint provenance there) which the solvers ignore.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

SENSE_LE = "<="
SENSE_EQ = "="
SENSE_GE = ">="
_SENSES = (SENSE_LE, SENSE_EQ, SENSE_GE)


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


class MipStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    GAP_LIMIT = "gap_limit"
    NODE_LIMIT = "node_limit"


class ModelError(ValueError):
    """Raised when a model violates its structural invariants."""


class MilpModel:
    """Minimization MILP with bounded columns and {<=, =, >=} rows."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.col_names: list[str] = []
        self.col_lower: list[float] = []
        self.col_upper: list[float] = []
        self.col_obj: list[float] = []
        self.col_binary: list[bool] = []
        self.row_names: list[str] = []
        self.row_cols: list[np.ndarray] = []
        self.row_vals: list[np.ndarray] = []
        self.row_sense: list[str] = []
        self.row_rhs: list[float] = []
        self.row_tags: list[Any] = []
        self._matrix_cache: Optional[sp.csr_matrix] = None

    # -- construction -----------------------------------------------------

    def add_col(
        self,
        name: Optional[str] = None,
        lower: float = 0.0,
        upper: float = math.inf,
        obj: float = 0.0,
        binary: bool = False,
    ) -> int:
        if name is None:
            name = f"C{len(self.col_names)}"
        if math.isnan(lower) or math.isnan(upper) or not math.isfinite(obj):
            raise ModelError(f"column {name}: non-finite objective or NaN bound")
        if lower > upper:
            raise ModelError(f"column {name}: lower bound {lower} > upper bound {upper}")
        if binary and (lower < 0.0 or upper > 1.0):
            raise ModelError(f"binary column {name}: bounds outside [0, 1]")
        self.col_names.append(name)
        self.col_lower.append(float(lower))
        self.col_upper.append(float(upper))
        self.col_obj.append(float(obj))
        self.col_binary.append(bool(binary))
        self._matrix_cache = None
        return len(self.col_names) - 1

    def add_row(
        self,
        cols: Sequence[int],
        vals: Sequence[float],
        sense: str,
        rhs: float,
        name: Optional[str] = None,
        tag: Any = None,
    ) -> int:
        if sense not in _SENSES:
            raise ModelError(f"unknown row sense {sense!r}")
        if len(cols) != len(vals):
            raise ModelError("row coefficient lists have mismatched lengths")
        n = len(self.col_names)
        cols_arr = np.asarray(cols, dtype=np.int64)
        vals_arr = np.asarray(vals, dtype=np.float64)
        if cols_arr.size and (cols_arr.min() < 0 or cols_arr.max() >= n):
            raise ModelError("row references an unknown column id")
        if not np.all(np.isfinite(vals_arr)):
            raise ModelError("row has NaN or infinite coefficients")
        if not math.isfinite(rhs):
            raise ModelError("row has non-finite right-hand side")
        if name is None:
            name = f"R{len(self.row_names)}"
        self.row_names.append(name)
        self.row_cols.append(cols_arr)
        self.row_vals.append(vals_arr)
        self.row_sense.append(sense)
        self.row_rhs.append(float(rhs))
        self.row_tags.append(tag)
        self._matrix_cache = None
        return len(self.row_names) - 1

    # -- inspection -------------------------------------------------------

    @property
    def n_cols(self) -> int:
        return len(self.col_names)

    @property
    def n_rows(self) -> int:
        return len(self.row_names)

    def binary_cols(self) -> list[int]:
        return [j for j, b in enumerate(self.col_binary) if b]

    def matrix(self) -> sp.csr_matrix:
        """Row-major sparse coefficient matrix (cached)."""
        if self._matrix_cache is None:
            indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
            for i, c in enumerate(self.row_cols):
                indptr[i + 1] = indptr[i] + c.size
            indices = (
                np.concatenate(self.row_cols)
                if self.row_cols
                else np.zeros(0, dtype=np.int64)
            )
            data = (
                np.concatenate(self.row_vals)
                if self.row_vals
                else np.zeros(0, dtype=np.float64)
            )
            self._matrix_cache = sp.csr_matrix(
                (data, indices, indptr), shape=(self.n_rows, self.n_cols)
            )
        return self._matrix_cache

    def lower_array(self) -> np.ndarray:
        return np.asarray(self.col_lower, dtype=np.float64)

    def upper_array(self) -> np.ndarray:
        return np.asarray(self.col_upper, dtype=np.float64)

    def obj_array(self) -> np.ndarray:
        return np.asarray(self.col_obj, dtype=np.float64)

    def rhs_array(self) -> np.ndarray:
        return np.asarray(self.row_rhs, dtype=np.float64)

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.obj_array() @ np.asarray(x, dtype=np.float64))

    def check(self) -> None:
        """Re-validate the structural invariants; raises ModelError."""
        n = self.n_cols
        for j in range(n):
            if self.col_lower[j] > self.col_upper[j]:
                raise ModelError(f"column {self.col_names[j]}: crossed bounds")
            if self.col_binary[j] and (
                self.col_lower[j] < -0.0 or self.col_upper[j] > 1.0
            ):
                raise ModelError(f"binary column {self.col_names[j]}: bounds outside [0, 1]")
        for i in range(self.n_rows):
            if self.row_cols[i].size and self.row_cols[i].max() >= n:
                raise ModelError(f"row {self.row_names[i]}: unknown column id")
            if not np.all(np.isfinite(self.row_vals[i])):
                raise ModelError(f"row {self.row_names[i]}: non-finite coefficient")

    def copy_with_bounds(
        self, lower: Optional[np.ndarray] = None, upper: Optional[np.ndarray] = None
    ) -> "MilpModel":
        """Shallow copy sharing row structure, with replaced bound arrays."""
        m = MilpModel(self.name)
        m.col_names = self.col_names
        m.col_obj = self.col_obj
        m.col_binary = self.col_binary
        m.col_lower = list(lower) if lower is not None else list(self.col_lower)
        m.col_upper = list(upper) if upper is not None else list(self.col_upper)
        m.row_names = self.row_names
        m.row_cols = self.row_cols
        m.row_vals = self.row_vals
        m.row_sense = self.row_sense
        m.row_rhs = self.row_rhs
        m.row_tags = self.row_tags
        m._matrix_cache = self._matrix_cache
        return m


def fix_binaries(model: MilpModel, assignment: dict[int, int]) -> MilpModel:
    """Return a copy of ``model`` with the given binary columns pinned.

    ``assignment`` maps column index to 0 or 1.  The original model is left
    untouched.  Pinning a non-binary column is an error.
    """
    lower = model.lower_array()
    upper = model.upper_array()
    for col, val in assignment.items():
        if col < 0 or col >= model.n_cols or not model.col_binary[col]:
            raise ModelError(f"column {col} is not a binary column")
        if val not in (0, 1):
            raise ModelError(f"binary column {col}: assignment {val} not in {{0, 1}}")
        lower[col] = float(val)
        upper[col] = float(val)
    return model.copy_with_bounds(lower, upper)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and strategy knobs for the LP and MIP solvers.

    Tolerances are applied after row scaling (each row is divided by its
    largest absolute coefficient when that exceeds 1), so they act
    relative to the row norms.  ``engine`` selects the LP/MIP backend:
    ``"simplex"`` is the built-in kernel, ``"highs"`` delegates to SciPy's
    HiGHS bindings, and ``"auto"`` picks the kernel for models up to
    ``auto_size_limit`` rows+columns and HiGHS above it.
    """

    rel_gap: float = 1e-6
    abs_gap: float = 1e-6
    int_tol: float = 1e-5
    feas_tol: float = 1e-8
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    branch_rule: str = "most_fractional"  # or "first_fractional"
    node_order: str = "best_bound"  # or "depth_first"
    engine: str = "auto"  # "simplex" | "highs" | "auto"
    presolve: bool = True
    bland_trigger: int = 1000
    max_pivots: int = 200_000
    refactor_every: int = 120
    auto_size_limit: int = 2500

    def __post_init__(self):
        for name in ("rel_gap", "abs_gap", "int_tol", "feas_tol"):
            if getattr(self, name) <= 0:
                raise ModelError(f"config {name} must be positive")
        if self.branch_rule not in ("most_fractional", "first_fractional"):
            raise ModelError(f"unknown branch rule {self.branch_rule!r}")
        if self.node_order not in ("best_bound", "depth_first"):
            raise ModelError(f"unknown node order {self.node_order!r}")
        if self.engine not in ("auto", "simplex", "highs"):
            raise ModelError(f"unknown engine {self.engine!r}")


@dataclass
class LpSolution:
    """Result of a continuous solve.

    ``duals`` follow the convention d(objective)/d(rhs); ``reduced_costs``
    are objective coefficients minus ``A^T y`` for the structural columns.
    ``certificate`` holds a Farkas-style row vector when infeasible and an
    improving ray over the columns when unbounded.
    """

    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    pivots: int = 0
    certificate: Optional[np.ndarray] = None
    message: str = ""


@dataclass
class MipSolution:
    """Result of a branch-and-bound solve."""

    status: MipStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    bound: float = -math.inf
    gap: float = math.inf
    node_count: int = 0
    bound_history: list[float] = field(default_factory=list)
    pivots: int = 0
    message: str = ""
