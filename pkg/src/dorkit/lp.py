"""Linear-program representation and solving on top of scipy's HiGHS backend."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

LE, EQ, GE = "<=", "==", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
FAILED = "failed"

FEASIBILITY_TOL = 1e-7


class LpError(Exception):
    pass


class SolverFailure(LpError):
    """Numerical failure inside the backend; never reported as infeasible."""


@dataclass(frozen=True)
class Constraint:
    coeffs: dict[str, float]
    op: str
    rhs: float
    label: str = ""

    def violation(self, point: dict[str, float]) -> float:
        lhs = sum(c * point[v] for v, c in self.coeffs.items())
        if self.op == LE:
            return max(0.0, lhs - self.rhs)
        if self.op == GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


class ConstraintSystem:
    """A set of named variables plus linear constraints over them.

    Shared by the model systems (normalization + monotonicity) and the
    preference systems; a LinearProgram is such a system plus an objective.
    """

    def __init__(self):
        self.lower: dict[str, float | None] = {}
        self.upper: dict[str, float | None] = {}
        self.constraints: list[Constraint] = []

    def add_variable(self, name, lb=None, ub=None):
        if name in self.lower:
            raise LpError(f"duplicate variable {name!r}")
        self.lower[name] = lb
        self.upper[name] = ub
        return name

    @property
    def variables(self):
        return list(self.lower)

    def require(self, name):
        if name not in self.lower:
            raise LpError(f"unknown variable {name!r}")

    def add(self, coeffs, op, rhs, label=""):
        coeffs = {v: float(c) for v, c in coeffs.items() if c != 0.0}
        for v in coeffs:
            self.require(v)
        for c in coeffs.values():
            if not np.isfinite(c):
                raise LpError(f"non-finite coefficient in constraint {label!r}")
        if not np.isfinite(rhs):
            raise LpError(f"non-finite rhs in constraint {label!r}")
        self.constraints.append(Constraint(coeffs, op, float(rhs), label))

    def extend(self, other):
        """Merge another system; shared variable names must carry equal bounds."""
        for name in other.lower:
            if name in self.lower:
                if (self.lower[name], self.upper[name]) != (other.lower[name], other.upper[name]):
                    raise LpError(f"conflicting bounds for shared variable {name!r}")
            else:
                self.add_variable(name, other.lower[name], other.upper[name])
        self.constraints.extend(other.constraints)

    def copy(self):
        out = ConstraintSystem()
        out.lower = dict(self.lower)
        out.upper = dict(self.upper)
        out.constraints = list(self.constraints)
        return out

    def violations(self, point, tol=FEASIBILITY_TOL):
        """Replay a full assignment; returns constraints violated beyond tol."""
        out = []
        for con in self.constraints:
            v = con.violation(point)
            if v > tol:
                out.append((con, v))
        for name in self.lower:
            x = point[name]
            lb, ub = self.lower[name], self.upper[name]
            if lb is not None and x < lb - tol:
                out.append((Constraint({name: 1.0}, GE, lb, f"lb({name})"), lb - x))
            if ub is not None and x > ub + tol:
                out.append((Constraint({name: 1.0}, LE, ub, f"ub({name})"), x - ub))
        return out

    def max_violation(self, point):
        return max((v for _, v in self.violations(point, tol=-1.0)), default=0.0)

    def to_matrices(self, order=None):
        """Dense (A_ub, b_ub, A_eq, b_eq, bounds, order) with bounds folded into A_ub.

        Bounds are emitted as rows rather than scipy bounds so that callers doing
        their own geometry (null-space reduction, HAR) see every facet.
        """
        order = list(order) if order is not None else self.variables
        idx = {v: i for i, v in enumerate(order)}
        n = len(order)
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for con in self.constraints:
            row = np.zeros(n)
            for v, c in con.coeffs.items():
                row[idx[v]] = c
            if con.op == EQ:
                A_eq.append(row)
                b_eq.append(con.rhs)
            elif con.op == LE:
                A_ub.append(row)
                b_ub.append(con.rhs)
            else:
                A_ub.append(-row)
                b_ub.append(-con.rhs)
        for v in order:
            lb, ub = self.lower[v], self.upper[v]
            if lb is not None:
                row = np.zeros(n)
                row[idx[v]] = -1.0
                A_ub.append(row)
                b_ub.append(-lb)
            if ub is not None:
                row = np.zeros(n)
                row[idx[v]] = 1.0
                A_ub.append(row)
                b_ub.append(ub)
        A_ub = np.array(A_ub) if A_ub else np.zeros((0, n))
        A_eq = np.array(A_eq) if A_eq else np.zeros((0, n))
        return A_ub, np.array(b_ub, float), A_eq, np.array(b_eq, float), order

    def to_lp_text(self, objective=None, sense="min"):
        """Export in the conventional LP text format for external debugging."""
        def term(v, c):
            return f"{'+' if c >= 0 else '-'} {abs(c):.12g} {v}"

        lines = ["Minimize" if sense == "min" else "Maximize"]
        obj = objective or {}
        lines.append(" obj: " + (" ".join(term(v, c) for v, c in obj.items()) or "0"))
        lines.append("Subject To")
        for i, con in enumerate(self.constraints):
            op = {LE: "<=", GE: ">=", EQ: "="}[con.op]
            body = " ".join(term(v, c) for v, c in con.coeffs.items())
            lines.append(f" c{i}{'_' + con.label if con.label else ''}: {body} {op} {con.rhs:.12g}")
        lines.append("Bounds")
        for v in self.variables:
            lb, ub = self.lower[v], self.upper[v]
            lo = f"{lb:.12g}" if lb is not None else "-inf"
            hi = f"{ub:.12g}" if ub is not None else "+inf"
            lines.append(f" {lo} <= {v} <= {hi}")
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: str
    objective: float | None
    assignment: dict[str, float] = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == OPTIMAL

    def __getitem__(self, name):
        return self.assignment[name]


def _method():
    # DORKIT_SOLVER: "highs" (default), "highs-ds", "highs-ipm"
    return os.environ.get("DORKIT_SOLVER", "highs")


def solve_lp(system: ConstraintSystem, objective, sense="min") -> LpSolution:
    """Solve min/max objective over the system. Distinguishes infeasible,
    unbounded and numerical failure; an optimal assignment replays within
    FEASIBILITY_TOL by construction."""
    for v in objective:
        system.require(v)
    order = system.variables
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    c = np.zeros(n)
    for v, coef in objective.items():
        c[idx[v]] = coef
    if sense == "max":
        c = -c
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for con in system.constraints:
        row = np.zeros(n)
        for v, coef in con.coeffs.items():
            row[idx[v]] = coef
        if con.op == EQ:
            A_eq.append(row)
            b_eq.append(con.rhs)
        elif con.op == LE:
            A_ub.append(row)
            b_ub.append(con.rhs)
        else:
            A_ub.append(-row)
            b_ub.append(-con.rhs)
    bounds = [(system.lower[v], system.upper[v]) for v in order]
    res = linprog(
        c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method=_method(),
    )
    if res.status == 0:
        obj = float(res.fun) if sense == "min" else -float(res.fun)
        return LpSolution(OPTIMAL, obj, {v: float(res.x[idx[v]]) for v in order})
    if res.status == 2:
        return LpSolution(INFEASIBLE, None)
    if res.status == 3:
        return LpSolution(UNBOUNDED, None)
    return LpSolution(FAILED, None)


def solve_or_raise(system, objective, sense="min"):
    sol = solve_lp(system, objective, sense)
    if sol.status == FAILED:
        raise SolverFailure("LP backend reported numerical failure")
    return sol


def nullspace(A, rtol=1e-10):
    """Orthonormal basis of the null space of A (columns)."""
    if A.size == 0:
        return np.eye(A.shape[1])
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * max(1.0, s[0])))
    return vt[rank:].T


def affine_reduce(A_ub, b_ub, A_eq, b_eq):
    """Eliminate equalities: x = x0 + N y, returning the y-space inequality
    system (A', b', x0, N). Raises if the equalities are inconsistent."""
    if A_eq.shape[0]:
        x0, residual, *_ = np.linalg.lstsq(A_eq, b_eq, rcond=None)
        if np.linalg.norm(A_eq @ x0 - b_eq) > 1e-6 * max(1.0, np.linalg.norm(b_eq)):
            raise LpError("inconsistent equality constraints")
        N = nullspace(A_eq)
    else:
        x0 = np.zeros(A_ub.shape[1])
        N = np.eye(A_ub.shape[1])
    return A_ub @ N, b_ub - A_ub @ x0, x0, N


def chebyshev_center(A_ub, b_ub, A_eq=None, b_eq=None):
    """Center and radius of the largest ball inscribed in the polytope after
    equality elimination. Returns (center_in_x_space, radius, x0, N)."""
    A_eq = np.zeros((0, A_ub.shape[1])) if A_eq is None else A_eq
    b_eq = np.zeros(0) if b_eq is None else b_eq
    A, b, x0, N = affine_reduce(A_ub, b_ub, A_eq, b_eq)
    d = A.shape[1]
    if d == 0:
        # fully pinned by equalities
        if np.any(A_ub @ x0 - b_ub > FEASIBILITY_TOL):
            raise LpError("equality-pinned point violates inequalities")
        return x0, 0.0, x0, N
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-14
    c = np.zeros(d + 1)
    c[-1] = -1.0
    Ac = np.hstack([A[keep], norms[keep, None]])
    res = linprog(c, A_ub=Ac, b_ub=b[keep], bounds=[(None, None)] * d + [(0, None)], method=_method())
    if res.status == 2:
        raise LpError("empty polytope")
    if res.status != 0:
        raise SolverFailure("chebyshev center LP failed")
    y = res.x[:d]
    radius = float(res.x[-1])
    return x0 + N @ y, radius, x0, N
