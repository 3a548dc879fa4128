"""The four value-function families: weighted sum, piecewise linear, general
additive, and the 2-additive Choquet integral in Mobius form.

Each family is affine in its parameter vector, so every evaluation can also be
produced as a linear expression over named parameter variables; the model
constraint set (normalization + monotonicity) is linear in the same variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .core import ROOT_CODE, PerformanceTable, ValidationError

WEIGHTED_SUM = "ws"
PIECEWISE = "pl"
GENERAL_ADDITIVE = "ga"
CHOQUET2 = "choquet2"

KINDS = (WEIGHTED_SUM, PIECEWISE, GENERAL_ADDITIVE, CHOQUET2)


def weight_var(leaf):
    return f"w[{leaf}]"


def marginal_var(leaf, q):
    return f"u[{leaf}][{q}]"


def mobius_var(*leaves):
    if len(leaves) == 1:
        return f"m[{leaves[0]}]"
    a, b = sorted(leaves)
    return f"m[{a}|{b}]"


@dataclass
class ValueModelSpec:
    kind: str
    hierarchy: "CriterionHierarchy"
    breakpoints: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if self.kind in (PIECEWISE, GENERAL_ADDITIVE):
            for leaf in self.leaves:
                pts = np.asarray(self.breakpoints.get(leaf, ()), dtype=float)
                if pts.size < 2:
                    raise ValidationError(f"leaf {leaf!r} needs at least two breakpoints")
                if np.any(np.diff(pts) <= 0):
                    raise ValidationError(f"breakpoints for {leaf!r} must strictly increase")
                self.breakpoints[leaf] = pts

    @property
    def leaves(self):
        return self.hierarchy.leaves

    @classmethod
    def weighted_sum(cls, hierarchy):
        return cls(WEIGHTED_SUM, hierarchy)

    @classmethod
    def choquet2(cls, hierarchy):
        return cls(CHOQUET2, hierarchy)

    @classmethod
    def general_additive(cls, hierarchy, table: PerformanceTable):
        bps = {leaf: table.domain(leaf) for leaf in hierarchy.leaves}
        return cls(GENERAL_ADDITIVE, hierarchy, bps)

    @classmethod
    def piecewise(cls, hierarchy, table: PerformanceTable, segments=4, breakpoints=None):
        """Equal-width segments per leaf by default; explicit breakpoints win."""
        if breakpoints is None:
            breakpoints = {}
            for leaf in hierarchy.leaves:
                dom = table.domain(leaf)
                lo, hi = dom[0], dom[-1]
                if hi <= lo:
                    hi = lo + 1.0
                breakpoints[leaf] = np.linspace(lo, hi, segments + 1)
        return cls(PIECEWISE, hierarchy, dict(breakpoints))

    def parameter_names(self):
        if self.kind == WEIGHTED_SUM:
            return [weight_var(t) for t in self.leaves]
        if self.kind in (PIECEWISE, GENERAL_ADDITIVE):
            return [
                marginal_var(t, q)
                for t in self.leaves
                for q in range(len(self.breakpoints[t]))
            ]
        singles = [mobius_var(t) for t in self.leaves]
        pairs = [mobius_var(a, b) for a, b in itertools.combinations(self.leaves, 2)]
        return singles + pairs

    def node_leaves(self, node):
        return self.hierarchy.subtree_leaves(node)

    def linear_value_expression(self, row: dict[str, float], node=ROOT_CODE):
        """Coefficients over parameter variables whose dot product with any
        feasible parameter vector equals the node value of the row."""
        leaves = self.node_leaves(node)
        for t in leaves:
            if t not in row:
                raise ValidationError(f"row is missing leaf {t!r}")
        expr: dict[str, float] = {}
        if self.kind == WEIGHTED_SUM:
            for t in leaves:
                expr[weight_var(t)] = row[t]
        elif self.kind == GENERAL_ADDITIVE:
            for t in leaves:
                pts = self.breakpoints[t]
                j = int(np.searchsorted(pts, row[t]))
                if j >= len(pts) or not np.isclose(pts[j], row[t], rtol=0, atol=1e-12):
                    raise ValidationError(
                        f"value {row[t]} not in the observed domain of {t!r}"
                    )
                expr[marginal_var(t, j)] = expr.get(marginal_var(t, j), 0.0) + 1.0
        elif self.kind == PIECEWISE:
            for t in leaves:
                pts = self.breakpoints[t]
                x = row[t]
                if x < pts[0] - 1e-12 or x > pts[-1] + 1e-12:
                    raise ValidationError(
                        f"value {x} outside breakpoint range of {t!r} [{pts[0]}, {pts[-1]}]"
                    )
                q = int(np.clip(np.searchsorted(pts, x, side="right"), 1, len(pts) - 1))
                y0, y1 = pts[q - 1], pts[q]
                frac = (x - y0) / (y1 - y0)
                expr[marginal_var(t, q - 1)] = expr.get(marginal_var(t, q - 1), 0.0) + (1 - frac)
                expr[marginal_var(t, q)] = expr.get(marginal_var(t, q), 0.0) + frac
        else:
            for t in leaves:
                expr[mobius_var(t)] = row[t]
            for a, b in itertools.combinations(leaves, 2):
                expr[mobius_var(a, b)] = min(row[a], row[b])
        return expr

    def expression_for(self, table: PerformanceTable, alternative, node=ROOT_CODE):
        row = {t: table.value(alternative, t) for t in self.node_leaves(node)}
        return self.linear_value_expression(row, node)

    def emit_model_constraints(self) -> lp.ConstraintSystem:
        """E_Model: normalization plus monotonicity for the family."""
        sys_ = lp.ConstraintSystem()
        if self.kind == WEIGHTED_SUM:
            for t in self.leaves:
                sys_.add_variable(weight_var(t), lb=0.0)
            sys_.add({weight_var(t): 1.0 for t in self.leaves}, lp.EQ, 1.0, "norm")
        elif self.kind in (PIECEWISE, GENERAL_ADDITIVE):
            for t in self.leaves:
                for q in range(len(self.breakpoints[t])):
                    sys_.add_variable(marginal_var(t, q), lb=0.0)
            for t in self.leaves:
                npts = len(self.breakpoints[t])
                sys_.add({marginal_var(t, 0): 1.0}, lp.EQ, 0.0, f"anchor[{t}]")
                for q in range(1, npts):
                    sys_.add(
                        {marginal_var(t, q - 1): 1.0, marginal_var(t, q): -1.0},
                        lp.LE,
                        0.0,
                        f"mono[{t}][{q}]",
                    )
            sys_.add(
                {marginal_var(t, len(self.breakpoints[t]) - 1): 1.0 for t in self.leaves},
                lp.EQ,
                1.0,
                "norm",
            )
        else:
            leaves = self.leaves
            for t in leaves:
                sys_.add_variable(mobius_var(t))
            for a, b in itertools.combinations(leaves, 2):
                sys_.add_variable(mobius_var(a, b))
            norm = {mobius_var(t): 1.0 for t in leaves}
            norm.update({mobius_var(a, b): 1.0 for a, b in itertools.combinations(leaves, 2)})
            sys_.add(norm, lp.EQ, 1.0, "norm")
            # 2-additive monotonicity: m({i}) + sum_{j in T} m({i,j}) >= 0
            # for every leaf i and every T subset of the other leaves
            for i in leaves:
                others = [t for t in leaves if t != i]
                for size in range(len(others) + 1):
                    for T in itertools.combinations(others, size):
                        coeffs = {mobius_var(i): 1.0}
                        for j in T:
                            coeffs[mobius_var(i, j)] = 1.0
                        sys_.add(coeffs, lp.GE, 0.0, f"mono[{i}|{','.join(T)}]")
        return sys_


@dataclass
class ModelParameters:
    kind: str
    values: dict[str, float]

    def __getitem__(self, name):
        return self.values[name]

    def vector(self, names):
        return np.array([self.values[n] for n in names])

    def validate(self, spec: ValueModelSpec, tol=1e-7):
        system = spec.emit_model_constraints()
        point = dict(self.values)
        bad = system.violations(point, tol=tol)
        if bad:
            worst = max(bad, key=lambda cv: cv[1])
            raise ValidationError(
                f"parameters violate {worst[0].label or 'a model constraint'} "
                f"by {worst[1]:.3g}"
            )

    def to_json(self):
        return {"kind": self.kind, "values": self.values}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], {k: float(v) for k, v in data["values"].items()})

    @classmethod
    def from_solution(cls, spec: ValueModelSpec, assignment):
        return cls(spec.kind, {n: assignment[n] for n in spec.parameter_names()})


def evaluate(spec: ValueModelSpec, params: ModelParameters, row, node=ROOT_CODE):
    """U_node of a row (mapping leaf -> value). Affine in the parameters."""
    expr = spec.linear_value_expression(row, node)
    return float(sum(c * params[v] for v, c in expr.items()))


def evaluate_alternative(spec, params, table, alternative, node=ROOT_CODE):
    row = {t: table.value(alternative, t) for t in spec.node_leaves(node)}
    return evaluate(spec, params, row, node)


def score_all(spec, params, table, node=ROOT_CODE):
    return {a: evaluate_alternative(spec, params, table, a, node) for a in table.alternatives}


def choquet_capacity_value(spec, params, subset):
    """mu(T) = sum of Mobius masses of subsets of T (2-additive)."""
    total = 0.0
    subset = list(subset)
    for t in subset:
        total += params[mobius_var(t)]
    for a, b in itertools.combinations(subset, 2):
        total += params[mobius_var(a, b)]
    return total
