"""Deterministic branch-and-bound over declared binary columns.

Node relaxations are solved with the bounded-simplex kernel (or HiGHS for
large models, per the engine setting).  Branching picks the most
fractional binary (ties by lowest column index); node selection is
best-bound with a depth-first tie-break, older node first on full ties.
With no time limit set the search is a pure function of (model, config):
identical inputs give identical trees, incumbents and bounds.
"""

from __future__ import annotations

import heapq
import math
import time
from typing import Callable, Optional

import numpy as np

from .model import (
    LpSolution,
    LpStatus,
    MilpModel,
    MipSolution,
    MipStatus,
    ModelError,
    SolverConfig,
)


class _NodeStore:
    """Open-node pool ordered by the configured selection rule."""

    def __init__(self, order: str):
        self.order = order
        self.heap: list[tuple] = []
        self.payload: dict[int, tuple[np.ndarray, np.ndarray, float, int]] = {}
        self.seq = 0

    def push(self, bound: float, depth: int, lo: np.ndarray, up: np.ndarray) -> None:
        if self.order == "best_bound":
            key = (bound, -depth, self.seq)
        else:  # depth_first: deepest, then most recently created
            key = (-depth, -self.seq)
        heapq.heappush(self.heap, key + (self.seq,))
        self.payload[self.seq] = (lo, up, bound, depth)
        self.seq += 1

    def pop(self) -> tuple[np.ndarray, np.ndarray, float, int]:
        entry = heapq.heappop(self.heap)
        return self.payload.pop(entry[-1])

    def min_bound(self) -> float:
        if not self.payload:
            return math.inf
        return min(p[2] for p in self.payload.values())

    def __len__(self) -> int:
        return len(self.payload)


def solve_mip(
    model: MilpModel,
    config: Optional[SolverConfig] = None,
    lp_solver: Optional[Callable[[MilpModel, SolverConfig], LpSolution]] = None,
) -> MipSolution:
    """Minimize ``model`` subject to integrality of its binary columns.

    Returns OPTIMAL once the incumbent-vs-bound gap is within
    ``max(abs_gap, rel_gap * |incumbent|)`` or the tree is exhausted;
    NODE_LIMIT / GAP_LIMIT report the best incumbent when the node or the
    time limit cuts the search short.  ``bound_history`` records the
    proven lower bound each time a node is expanded (non-decreasing under
    best-bound selection).
    """
    cfg = config or SolverConfig()
    if lp_solver is None:
        from . import solve_lp as lp_solver  # default engine dispatch

    model.check()
    binaries = model.binary_cols()
    start = time.monotonic()

    incumbent_x: Optional[np.ndarray] = None
    incumbent_obj = math.inf
    node_count = 0
    pivots = 0
    bound_history: list[float] = []

    store = _NodeStore(cfg.node_order)
    store.push(-math.inf, 0, model.lower_array(), model.upper_array())

    status: Optional[MipStatus] = None
    global_bound = -math.inf

    while len(store):
        lo, up, parent_bound, depth = store.pop()
        global_bound = min(parent_bound, store.min_bound())
        if incumbent_x is not None:
            global_bound = min(global_bound, incumbent_obj)
        if math.isfinite(global_bound):
            bound_history.append(global_bound)
        if incumbent_x is not None:
            gap = incumbent_obj - global_bound
            if gap <= max(cfg.abs_gap, cfg.rel_gap * abs(incumbent_obj)):
                status = MipStatus.OPTIMAL
                break
            if parent_bound >= incumbent_obj - 1e-12:
                continue  # cannot improve; pruned without an LP solve
        if cfg.node_limit is not None and node_count >= cfg.node_limit:
            status = MipStatus.NODE_LIMIT
            break
        if cfg.time_limit is not None and time.monotonic() - start > cfg.time_limit:
            status = MipStatus.GAP_LIMIT
            break

        rel = lp_solver(model.copy_with_bounds(lo, up), cfg)
        node_count += 1
        pivots += rel.pivots
        if rel.status == LpStatus.INFEASIBLE:
            continue
        if rel.status == LpStatus.UNBOUNDED:
            raise ModelError("MIP relaxation is unbounded")
        if rel.status != LpStatus.OPTIMAL:
            raise ModelError(f"node relaxation failed: {rel.message}")
        if incumbent_x is not None and rel.objective >= incumbent_obj - 1e-12:
            continue

        if binaries:
            vals = rel.x[binaries]
            frac = np.minimum(vals - np.floor(vals), np.ceil(vals) - vals)
        else:
            frac = np.zeros(0)
        if frac.size == 0 or float(np.max(frac)) <= cfg.int_tol:
            x = rel.x.copy()
            for j in binaries:
                # snap numerical noise only; larger deviations stay as the
                # vertex values so row residuals are untouched
                if abs(x[j] - round(x[j])) <= 1e-9:
                    x[j] = round(x[j])
            incumbent_x = x
            incumbent_obj = rel.objective
            continue

        if cfg.branch_rule == "most_fractional":
            pick = int(np.argmax(frac))
        else:  # first_fractional
            pick = int(np.flatnonzero(frac > cfg.int_tol)[0])
        col = binaries[pick]
        up_dn = up.copy()
        up_dn[col] = 0.0
        lo_up = lo.copy()
        lo_up[col] = 1.0
        store.push(rel.objective, depth + 1, lo, up_dn)
        store.push(rel.objective, depth + 1, lo_up, up)

    if status is None:  # open set exhausted
        if incumbent_x is None:
            return MipSolution(
                status=MipStatus.INFEASIBLE,
                node_count=node_count,
                pivots=pivots,
                bound_history=bound_history,
                message="no feasible assignment of the binary columns",
            )
        status = MipStatus.OPTIMAL
        global_bound = incumbent_obj
        bound_history.append(global_bound)

    if incumbent_x is None:
        return MipSolution(
            status=status,
            node_count=node_count,
            pivots=pivots,
            bound_history=bound_history,
            message="limit reached without incumbent",
        )
    bound = min(global_bound, incumbent_obj)
    return MipSolution(
        status=status,
        x=incumbent_x,
        objective=incumbent_obj,
        bound=bound,
        gap=max(0.0, incumbent_obj - bound),
        node_count=node_count,
        bound_history=bound_history,
        pivots=pivots,
    )
