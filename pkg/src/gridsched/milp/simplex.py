"""Bounded-variable revised simplex with deterministic pivoting.

Rows ``a x {<=,=,>=} b`` are turned into ``a x + s = b`` with sign-bounded
slacks, so every variable (structural or slack) carries a lower/upper
bound and nonbasic variables rest on one of them.  Feasibility is reached
with a phase-1 artificial objective; phase 2 prices with Dantzig's rule
and falls back to Bland's rule after a run of degenerate pivots, which
guarantees termination.  All tie-breaks are by lowest column index, so a
given (model, config) pair always produces the same pivot sequence.

The basis inverse is kept explicitly and refreshed from scratch every
``refactor_every`` pivots; models beyond a few thousand rows should go
through the HiGHS backend instead (see ``gridsched.milp.highs``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import (
    LpSolution,
    LpStatus,
    MilpModel,
    ModelError,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    SolverConfig,
)

_STALL_TOL = 1e-12
_PIVOT_TOL = 1e-9
_TIE_TOL = 1e-9


def slack_bounds(sense: str) -> tuple[float, float]:
    if sense == SENSE_LE:
        return 0.0, math.inf
    if sense == SENSE_GE:
        return -math.inf, 0.0
    if sense == SENSE_EQ:
        return 0.0, 0.0
    raise ModelError(f"unknown sense {sense!r}")


@dataclass
class _Presolved:
    keep_cols: np.ndarray  # original indices of surviving columns
    keep_rows: np.ndarray
    fixed_value: np.ndarray  # per original column; NaN when not fixed
    rhs: np.ndarray  # adjusted rhs over kept rows
    infeasible_row: Optional[int] = None  # original row index, if detected
    infeasible_resid: float = 0.0


def _presolve(model: MilpModel, enabled: bool, feas_tol: float) -> _Presolved:
    """Fixed-column substitution and empty-row removal (nothing more)."""
    n, m = model.n_cols, model.n_rows
    lower = model.lower_array()
    upper = model.upper_array()
    fixed_value = np.full(n, np.nan)
    if enabled:
        fixed = upper - lower <= 0.0
        fixed_value[fixed] = lower[fixed]
    keep_cols = np.flatnonzero(np.isnan(fixed_value))
    rhs = model.rhs_array().copy()
    keep_rows_list = []
    infeasible_row = None
    infeasible_resid = 0.0
    for i in range(m):
        cols, vals = model.row_cols[i], model.row_vals[i]
        live = 0
        for c, v in zip(cols, vals):
            if np.isnan(fixed_value[c]):
                live += 1
            else:
                rhs[i] -= v * fixed_value[c]
        if live == 0 and enabled:
            resid = rhs[i]
            sense = model.row_sense[i]
            scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
            bad = (
                (sense == SENSE_LE and resid < -feas_tol * scale)
                or (sense == SENSE_GE and resid > feas_tol * scale)
                or (sense == SENSE_EQ and abs(resid) > feas_tol * scale)
            )
            if bad and infeasible_row is None:
                infeasible_row = i
                infeasible_resid = resid
        else:
            keep_rows_list.append(i)
    keep_rows = np.asarray(keep_rows_list, dtype=np.int64)
    return _Presolved(
        keep_cols=keep_cols,
        keep_rows=keep_rows,
        fixed_value=fixed_value,
        rhs=rhs[keep_rows] if keep_rows.size else np.zeros(0),
        infeasible_row=infeasible_row,
        infeasible_resid=infeasible_resid,
    )


class _Kernel:
    """Simplex state over the dense working matrix [A | I | artificials]."""

    BASIC, AT_LOWER, AT_UPPER, FREE_NB = 0, 1, 2, 3

    def __init__(
        self,
        A: np.ndarray,
        b: np.ndarray,
        c: np.ndarray,
        lower: np.ndarray,
        upper: np.ndarray,
        config: SolverConfig,
    ):
        self.m, self.n_struct = A.shape
        self.cfg = config
        self.b = b
        m = self.m
        self.A = np.concatenate([A, np.eye(m)], axis=1) if m else A.copy()
        self.lower = np.concatenate([lower, np.zeros(m)])
        self.upper = np.concatenate([upper, np.zeros(m)])
        self.c2 = np.concatenate([c, np.zeros(m)])
        self.pivots = 0
        self.n_art = 0

    def set_slack_bounds(self, senses: list[str]) -> None:
        for i, sense in enumerate(senses):
            lo, up = slack_bounds(sense)
            self.lower[self.n_struct + i] = lo
            self.upper[self.n_struct + i] = up

    # -- initial point ----------------------------------------------------

    def initialize(self) -> None:
        nf = self.A.shape[1]
        self.x = np.zeros(nf)
        self.vstat = np.full(nf, self.AT_LOWER, dtype=np.int8)
        for j in range(nf):
            lo, up = self.lower[j], self.upper[j]
            if math.isfinite(lo):
                self.x[j], self.vstat[j] = lo, self.AT_LOWER
            elif math.isfinite(up):
                self.x[j], self.vstat[j] = up, self.AT_UPPER
            else:
                self.x[j], self.vstat[j] = 0.0, self.FREE_NB
        m = self.m
        resid = self.b - self.A[:, : self.n_struct] @ self.x[: self.n_struct]
        basis = np.zeros(m, dtype=np.int64)
        art_sign, art_val, art_row = [], [], []
        for i in range(m):
            sj = self.n_struct + i
            lo, up = self.lower[sj], self.upper[sj]
            if lo - 1e-11 <= resid[i] <= up + 1e-11:
                basis[i] = sj
                self.x[sj] = resid[i]
                self.vstat[sj] = self.BASIC
            else:
                sbar = min(max(resid[i], lo), up)
                self.x[sj] = sbar
                self.vstat[sj] = self.AT_LOWER if sbar == lo else self.AT_UPPER
                gap = resid[i] - sbar
                art_row.append(i)
                art_sign.append(1.0 if gap > 0 else -1.0)
                art_val.append(abs(gap))
        self.n_art = len(art_row)
        if self.n_art:
            Aart = np.zeros((m, self.n_art))
            for k, (i, s) in enumerate(zip(art_row, art_sign)):
                Aart[i, k] = s
                basis[i] = nf + k
            self.A = np.concatenate([self.A, Aart], axis=1)
            self.lower = np.concatenate([self.lower, np.zeros(self.n_art)])
            self.upper = np.concatenate([self.upper, np.full(self.n_art, np.inf)])
            self.c2 = np.concatenate([self.c2, np.zeros(self.n_art)])
            self.x = np.concatenate([self.x, np.asarray(art_val)])
            self.vstat = np.concatenate(
                [self.vstat, np.zeros(self.n_art, dtype=np.int8)]
            )
        self.basis = basis
        self.vstat[basis] = self.BASIC
        self.Binv = np.eye(m)
        self.refactorize()

    # -- linear algebra ---------------------------------------------------

    def refactorize(self) -> bool:
        m = self.m
        if m == 0:
            return True
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return False
        nb = np.flatnonzero(self.vstat != self.BASIC)
        rhs = self.b - self.A[:, nb] @ self.x[nb]
        self.x[self.basis] = self.Binv @ rhs
        return True

    def duals(self, cvec: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return np.zeros(0)
        return self.Binv.T @ cvec[self.basis]

    # -- one phase of the simplex -----------------------------------------

    def run_phase(self, cvec: np.ndarray, phase: int) -> str:
        """Iterate to optimality of ``cvec``; returns one of
        "optimal", "unbounded", "numfail", "pivot_limit"."""
        cfg = self.cfg
        cmax = float(np.max(np.abs(cvec))) if cvec.size else 0.0
        dual_tol = 1e-9 * (1.0 + cmax)
        bland = False
        stall = 0
        cleanups = 0
        since_refactor = 0
        while True:
            if self.pivots > cfg.max_pivots:
                return "pivot_limit"
            y = self.duals(cvec)
            d = cvec - self.A.T @ y if self.m else cvec.copy()
            movable = self.upper - self.lower > 0.0
            nonbasic = self.vstat != self.BASIC
            elig_lo = (self.vstat == self.AT_LOWER) & (d < -dual_tol)
            elig_up = (self.vstat == self.AT_UPPER) & (d > dual_tol)
            elig_fr = (self.vstat == self.FREE_NB) & (np.abs(d) > dual_tol)
            eligible = (elig_lo | elig_up | elig_fr) & movable & nonbasic
            if not np.any(eligible):
                # re-verify with a fresh factorization before declaring optimal
                if since_refactor > 0 and cleanups < 3 and self.m:
                    if not self.refactorize():
                        return "numfail"
                    since_refactor = 0
                    cleanups += 1
                    continue
                return "optimal"
            if bland:
                q = int(np.flatnonzero(eligible)[0])
            else:
                score = np.where(elig_lo, -d, np.where(elig_up, d, np.abs(d)))
                score[~eligible] = -np.inf
                q = int(np.argmax(score))
            sigma = 1.0 if (self.vstat[q] == self.AT_LOWER or d[q] < 0) else -1.0
            w = self.Binv @ self.A[:, q] if self.m else np.zeros(0)
            step, r = self._ratio_test(q, sigma, w)
            if step is None:
                if phase == 1:
                    return "numfail"
                self._ray = (q, sigma, w)
                return "unbounded"
            if step <= _STALL_TOL:
                stall += 1
                if stall >= cfg.bland_trigger:
                    bland = True
            else:
                stall = 0
                bland = False
            self._apply_step(q, sigma, w, step, r)
            self.pivots += 1
            since_refactor += 1
            if r is not None and since_refactor >= cfg.refactor_every:
                if not self.refactorize():
                    return "numfail"
                since_refactor = 0

    def _ratio_test(self, q: int, sigma: float, w: np.ndarray):
        """Smallest blocking step; returns (step, leaving_row or None)."""
        xB = self.x[self.basis]
        eff = sigma * w
        lo_b = self.lower[self.basis]
        up_b = self.upper[self.basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            dec = eff > _PIVOT_TOL
            inc = eff < -_PIVOT_TOL
            ratios = np.full(self.m, np.inf)
            ratios[dec] = (xB[dec] - lo_b[dec]) / eff[dec]
            ratios[inc] = (xB[inc] - up_b[inc]) / eff[inc]
        ratios[np.isnan(ratios)] = np.inf
        np.maximum(ratios, 0.0, out=ratios)
        row_step = float(np.min(ratios)) if self.m else math.inf
        flip_step = self.upper[q] - self.lower[q]
        if not math.isfinite(flip_step):
            flip_step = math.inf
        if min(row_step, flip_step) == math.inf:
            return None, None
        if flip_step <= row_step:
            return flip_step, None
        ties = np.flatnonzero(ratios <= row_step + _TIE_TOL * (1.0 + row_step))
        # lowest entering-column index among ties; switch to the largest
        # pivot magnitude only if the preferred pivot is numerically unsafe
        order = ties[np.argsort(self.basis[ties], kind="stable")]
        r = int(order[0])
        if abs(eff[r]) < 1e-7:
            mags = np.abs(eff[ties])
            best = ties[int(np.argmax(mags))]
            if abs(eff[best]) >= 10.0 * abs(eff[r]):
                r = int(best)
        return row_step, r

    def _apply_step(self, q, sigma, w, step, r):
        if self.m:
            self.x[self.basis] -= step * sigma * w
        self.x[q] += sigma * step
        if r is None:  # bound flip
            self.vstat[q] = (
                self.AT_UPPER if self.vstat[q] == self.AT_LOWER else self.AT_LOWER
            )
            if self.vstat[q] == self.AT_UPPER:
                self.x[q] = self.upper[q]
            else:
                self.x[q] = self.lower[q]
            return
        leaving = self.basis[r]
        if sigma * w[r] > 0:
            self.x[leaving] = self.lower[leaving]
            self.vstat[leaving] = self.AT_LOWER
        else:
            self.x[leaving] = self.upper[leaving]
            self.vstat[leaving] = self.AT_UPPER
        self.basis[r] = q
        self.vstat[q] = self.BASIC
        alpha = w[r]
        self.Binv[r, :] /= alpha
        wmask = w.copy()
        wmask[r] = 0.0
        self.Binv -= np.outer(wmask, self.Binv[r, :])

    def snap_nonbasics(self) -> None:
        at_lo = self.vstat == self.AT_LOWER
        at_up = self.vstat == self.AT_UPPER
        self.x[at_lo] = self.lower[at_lo]
        self.x[at_up] = self.upper[at_up]


def simplex_solve(model: MilpModel, config: Optional[SolverConfig] = None) -> LpSolution:
    """Solve the continuous relaxation of ``model`` with the built-in kernel.

    Binary markers are ignored (columns keep their bounds).  Statuses:
    ``OPTIMAL`` with primal/dual vectors, ``INFEASIBLE`` with a Farkas-style
    row certificate, ``UNBOUNDED`` with an improving ray over the columns,
    or ``NUMERICAL_FAILURE`` (explicit, never a silent wrong answer).
    """
    cfg = config or SolverConfig()
    model.check()
    n, m = model.n_cols, model.n_rows
    pre = _presolve(model, cfg.presolve, cfg.feas_tol)
    if pre.infeasible_row is not None:
        cert = np.zeros(m)
        i = pre.infeasible_row
        if model.row_sense[i] == SENSE_EQ:
            cert[i] = math.copysign(1.0, pre.infeasible_resid)
        else:
            cert[i] = 1.0 if model.row_sense[i] == SENSE_GE else -1.0
        return LpSolution(
            status=LpStatus.INFEASIBLE,
            certificate=cert,
            message=f"row {model.row_names[i]} infeasible after substitution",
        )
    keep_cols, keep_rows = pre.keep_cols, pre.keep_rows
    nk, mk = keep_cols.size, keep_rows.size

    lower = model.lower_array()
    upper = model.upper_array()
    cost = model.obj_array()
    fixed_contrib = 0.0
    if nk < n:
        fixed_mask = ~np.isnan(pre.fixed_value)
        fixed_contrib = float(cost[fixed_mask] @ pre.fixed_value[fixed_mask])

    # infeasible fixed bounds (lower > upper) are caught by model.check()

    A = np.zeros((mk, nk))
    col_pos = np.full(n, -1, dtype=np.int64)
    col_pos[keep_cols] = np.arange(nk)
    scales = np.ones(mk)
    senses = []
    for ii, i in enumerate(keep_rows):
        cols, vals = model.row_cols[i], model.row_vals[i]
        for c, v in zip(cols, vals):
            p = col_pos[c]
            if p >= 0:
                A[ii, p] += v
        smax = np.max(np.abs(A[ii])) if nk else 1.0
        scales[ii] = max(1.0, smax)
        A[ii] /= scales[ii]
        senses.append(model.row_sense[i])
    b = pre.rhs / scales if mk else np.zeros(0)

    kern = _Kernel(A, b, cost[keep_cols], lower[keep_cols], upper[keep_cols], cfg)
    kern.set_slack_bounds(senses)
    kern.initialize()

    def _unscale_duals(y: np.ndarray) -> np.ndarray:
        full = np.zeros(m)
        if mk:
            full[keep_rows] = y / scales
        return full

    if kern.n_art:
        c1 = np.zeros(kern.A.shape[1])
        c1[-kern.n_art :] = 1.0
        outcome = kern.run_phase(c1, phase=1)
        if outcome == "pivot_limit":
            return LpSolution(status=LpStatus.NUMERICAL_FAILURE, pivots=kern.pivots,
                              message="pivot limit reached in phase 1")
        if outcome != "optimal":
            return LpSolution(status=LpStatus.NUMERICAL_FAILURE, pivots=kern.pivots,
                              message=f"phase 1 ended with {outcome}")
        art_sum = float(np.sum(kern.x[-kern.n_art :]))
        if art_sum > max(1e-9, cfg.feas_tol):
            y1 = _unscale_duals(kern.duals(c1))
            return LpSolution(
                status=LpStatus.INFEASIBLE,
                certificate=y1,
                pivots=kern.pivots,
                message=f"phase 1 infeasibility {art_sum:.3e}",
            )
        # pin artificials at zero for phase 2
        art_lo = kern.A.shape[1] - kern.n_art
        kern.upper[art_lo:] = 0.0

    c2 = np.zeros(kern.A.shape[1])
    c2[:nk] = cost[keep_cols]
    outcome = kern.run_phase(c2, phase=2)
    if outcome == "pivot_limit":
        return LpSolution(status=LpStatus.NUMERICAL_FAILURE, pivots=kern.pivots,
                          message="pivot limit reached in phase 2")
    if outcome == "numfail":
        return LpSolution(status=LpStatus.NUMERICAL_FAILURE, pivots=kern.pivots,
                          message="singular basis or stalled ratio test")
    if outcome == "unbounded":
        q, sigma, w = kern._ray
        ray = np.zeros(n)
        if q < nk:
            ray[keep_cols[q]] = sigma
        for pos, col in enumerate(kern.basis):
            if col < nk:
                ray[keep_cols[col]] = -sigma * w[pos]
        return LpSolution(
            status=LpStatus.UNBOUNDED,
            certificate=ray,
            pivots=kern.pivots,
            message="improving ray found",
        )

    # polish: exact bounds for nonbasics, refreshed basics, exact duals
    kern.snap_nonbasics()
    if not kern.refactorize():
        return LpSolution(status=LpStatus.NUMERICAL_FAILURE, pivots=kern.pivots,
                          message="singular basis at optimum")
    kern.snap_nonbasics()

    x = np.where(np.isnan(pre.fixed_value), 0.0, pre.fixed_value)
    x[keep_cols] = kern.x[:nk]
    y = _unscale_duals(kern.duals(c2))
    reduced = cost - (model.matrix().T @ y if m else 0.0)
    objective = float(cost @ x)

    resid = _residuals(model, x)
    if resid > max(1e-7, 10 * cfg.feas_tol):
        return LpSolution(
            status=LpStatus.NUMERICAL_FAILURE,
            pivots=kern.pivots,
            message=f"optimal claim failed residual check ({resid:.3e})",
        )
    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=x,
        objective=objective,
        duals=y,
        reduced_costs=reduced,
        pivots=kern.pivots,
    )


def _residuals(model: MilpModel, x: np.ndarray) -> float:
    """Largest row violation after scaling each row by its coefficient norm."""
    worst = 0.0
    act = model.matrix() @ x
    for i in range(model.n_rows):
        scale = max(1.0, float(np.max(np.abs(model.row_vals[i]))) if model.row_vals[i].size else 1.0)
        gap = act[i] - model.row_rhs[i]
        sense = model.row_sense[i]
        if sense == SENSE_LE:
            v = max(0.0, gap)
        elif sense == SENSE_GE:
            v = max(0.0, -gap)
        else:
            v = abs(gap)
        worst = max(worst, v / scale)
    return worst


def dual_objective(model: MilpModel, sol: LpSolution) -> float:
    """Bound-aware dual objective for an OPTIMAL solution.

    Recomputed from scratch (y and the model only):
    ``y^T b + sum_j d_j * x_bound_j`` where each nonbasic-style term picks
    the lower bound when the recomputed reduced cost is positive and the
    upper bound when negative.  Serves as an independent optimality oracle
    via strong duality.
    """
    y = sol.duals
    cost = model.obj_array()
    d = cost - model.matrix().T @ y
    lower = model.lower_array()
    upper = model.upper_array()
    total = float(y @ model.rhs_array())
    for i in range(model.n_rows):  # slack contribution: d_slack = -y_i
        lo, up = slack_bounds(model.row_sense[i])
        v = -y[i]
        if v > 0 and math.isfinite(lo):
            total += v * lo
        elif v < 0 and math.isfinite(up):
            total += v * up
    for j in range(model.n_cols):
        if d[j] > 0 and math.isfinite(lower[j]):
            total += d[j] * lower[j]
        elif d[j] < 0 and math.isfinite(upper[j]):
            total += d[j] * upper[j]
    return total


def farkas_gap(model: MilpModel, cert: np.ndarray) -> float:
    """Strictly positive value certifies infeasibility of the row system.

    For any x within bounds and slack s within sense bounds,
    ``cert @ (A x + s)`` must equal ``cert @ b``; the returned gap is
    ``cert @ b`` minus the supremum of the left side, so a positive gap
    means no feasible point exists.
    """
    y = np.asarray(cert, dtype=float)
    lower = model.lower_array()
    upper = model.upper_array()
    yA = model.matrix().T @ y
    total = float(y @ model.rhs_array())
    for j in range(model.n_cols):
        v = yA[j]
        if abs(v) <= 1e-12:
            continue
        cap = v * upper[j] if v > 0 else v * lower[j]
        if not math.isfinite(cap):
            return -math.inf
        total -= cap
    for i in range(model.n_rows):
        v = y[i]
        if abs(v) <= 1e-12:
            continue
        lo, up = slack_bounds(model.row_sense[i])
        cap = v * up if v > 0 else v * lo
        if not math.isfinite(cap):
            return -math.inf
        total -= cap
    return total
