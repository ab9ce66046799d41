"""LP relaxation solving with optional customer fixings.

This is the engine behind the greedy randomized construction and the
branch-and-bound bounds.  The constraint arrays are assembled once per
model and cached; each solve only swaps variable bounds, so repeated
re-solves under changing fixings stay cheap.  The numerical kernel is the
HiGHS solver available through scipy, which is deterministic for a given
input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .model import Model

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"

FEAS_TOL = 1e-7   # row residual tolerance asserted on returned points
BOUND_SNAP = 1e-9  # values this close to a bound are snapped onto it


@dataclass
class LpSolution:
    objective: float
    values: np.ndarray | None
    status: str

    def customer_value(self, model: Model, cid: int) -> float:
        return float(self.values[model.customer_col[cid]])


class _Arrays:
    def __init__(self, model: Model):
        n = model.n_cols
        self.c = -np.array([col.objective for col in model.columns])  # minimize
        eq_rows = [r for r in model.rows if r.sense == "E"]
        ub_rows = [r for r in model.rows if r.sense == "L"]
        self.A_eq = _matrix(eq_rows, n)
        self.b_eq = np.array([r.rhs for r in eq_rows])
        self.A_ub = _matrix(ub_rows, n)
        self.b_ub = np.array([r.rhs for r in ub_rows])
        self.lower = np.array([col.lower for col in model.columns])
        self.upper = np.array([col.upper for col in model.columns])


def _matrix(rows, n_cols) -> sparse.csr_matrix | None:
    if not rows:
        return None
    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, coef in row.coeffs.items():
            ri.append(i)
            ci.append(j)
            data.append(coef)
    return sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n_cols))


class RelaxationSolver:
    """Solver context for one model; independent contexts may run in
    parallel workers."""

    def __init__(self, model: Model):
        self.model = model
        self.arrays = _Arrays(model)
        self.solve_count = 0

    def solve(self, fixings: dict[int, int] | None = None) -> LpSolution:
        """Solve the relaxation with customer variables clamped per
        ``fixings`` (customer id -> 0 or 1)."""
        arr = self.arrays
        lower = arr.lower
        upper = arr.upper
        if fixings:
            lower = lower.copy()
            upper = upper.copy()
            for cid, val in fixings.items():
                j = self.model.customer_col[cid]
                lower[j] = max(lower[j], float(val))
                upper[j] = min(upper[j], float(val))
            if np.any(lower > upper):
                return LpSolution(float("-inf"), None, INFEASIBLE)
        self.solve_count += 1
        if self.model.n_cols == 0:
            return LpSolution(0.0, np.zeros(0), OPTIMAL)
        res = linprog(arr.c, A_ub=arr.A_ub, b_ub=arr.b_ub, A_eq=arr.A_eq,
                      b_eq=arr.b_eq, bounds=np.column_stack([lower, upper]),
                      method="highs")
        if res.status == 2:
            return LpSolution(float("-inf"), None, INFEASIBLE)
        if res.status != 0:
            bound = -res.fun if res.fun is not None else float("inf")
            return LpSolution(bound, None, ITERATION_LIMIT)
        values = np.asarray(res.x, dtype=float)
        snap_lo = np.abs(values - lower) <= BOUND_SNAP
        snap_hi = np.abs(values - upper) <= BOUND_SNAP
        values = np.where(snap_lo, lower, values)
        values = np.where(snap_hi, upper, values)
        return LpSolution(-res.fun, values, OPTIMAL)

    def residuals(self, values: np.ndarray) -> float:
        """Largest constraint violation of a candidate point."""
        arr = self.arrays
        worst = 0.0
        if arr.A_eq is not None:
            worst = max(worst, float(np.max(np.abs(arr.A_eq @ values - arr.b_eq))))
        if arr.A_ub is not None and arr.A_ub.shape[0]:
            worst = max(worst, float(np.max(arr.A_ub @ values - arr.b_ub)))
        worst = max(worst, float(np.max(arr.lower - values, initial=0.0)))
        worst = max(worst, float(np.max(values - arr.upper, initial=0.0)))
        return worst


def solve_relaxation(model: Model, fixings: dict[int, int] | None = None) -> LpSolution:
    """One-shot relaxation solve; reuses a context cached on the model."""
    solver = getattr(model, "_lp_context", None)
    if solver is None:
        solver = RelaxationSolver(model)
        model._lp_context = solver  # type: ignore[attr-defined]
    return solver.solve(fixings)
