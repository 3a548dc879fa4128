"""Robust ordinal regression: the compatible-function space (budgeted
deviations, card value at least epsilon) and the necessary / possible
preference relations computed from pairwise epsilon-maximizing programs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .core import ROOT_CODE, PerformanceTable
from .imprecise import EPS_VAR, attach_node_constraints
from .models import ValueModelSpec
from .regression import ZERO_TOL, build_dm_system, sigma_objective

POSITIVE_TOL = ZERO_TOL


@dataclass
class CompatibleSpace:
    """All value functions compatible with the (relaxed) preference
    information: the constraint system carries model parameters, card values,
    deviations and implied values, plus the shared epsilon variable bounded
    above by every card value."""

    system: lp.ConstraintSystem
    spec: ValueModelSpec
    table: PerformanceTable
    k_vars: list[str]
    sigma_vars: list[str]
    sigma_bar: float
    eta: float

    def expression(self, alternative, node=ROOT_CODE):
        return self.spec.expression_for(self.table, alternative, node)

    def with_comparison(self, better, worse, node, strict_eps=False):
        """Copy of the system with U(better) >= U(worse) (+ eps if strict)."""
        system = self.system.copy()
        coeffs = dict(self.expression(better, node))
        for v, c in self.expression(worse, node).items():
            coeffs[v] = coeffs.get(v, 0.0) - c
        if strict_eps:
            coeffs[EPS_VAR] = coeffs.get(EPS_VAR, 0.0) - 1.0
        system.add(coeffs, lp.GE, 0.0, f"cmp[{better}>={worse}]")
        return system

    def sampling_system(self, eps_floor=1e-6):
        """The polytope sampled by SMAA: epsilon pinned to a small floor."""
        system = self.system.copy()
        if EPS_VAR in system.lower:
            system.add({EPS_VAR: 1.0}, lp.EQ, eps_floor, "eps_pin")
        return system

    def feasible_with_positive_eps(self):
        sol = lp.solve_or_raise(self.system, {EPS_VAR: 1.0}, "max")
        return sol.optimal and sol.objective > POSITIVE_TOL


def _finish_space(system, k_vars, spec, table, sigma_vars, sigma_bar, eta):
    system.add(sigma_objective_from(sigma_vars), lp.LE, sigma_bar + eta, "budget")
    system.add_variable(EPS_VAR)
    for kv in k_vars:
        system.add({kv: 1.0, EPS_VAR: -1.0}, lp.GE, 0.0, f"floor[{kv}]")
    return CompatibleSpace(system, spec, table, k_vars, sigma_vars, sigma_bar, eta)


def sigma_objective_from(sigma_vars):
    return {v: 1.0 for v in sigma_vars}


def space_from_regression(prefs, spec, nu, table, sigma_bar, eta=0.0):
    system, _ = build_dm_system(prefs, spec, nu, table)
    refs = prefs.reference_set
    sigma_vars = [f"sp[{a}]" for a in refs] + [f"sm[{a}]" for a in refs]
    return _finish_space(system, ["k"], spec, table, sigma_vars, sigma_bar, eta)


def space_from_imprecise(prefs, spec, table, sigma_bar, eta=0.0):
    system = spec.emit_model_constraints()
    names = attach_node_constraints(system, prefs, spec, table, "flat")
    return _finish_space(system, [names["k"]], spec, table, names["sigma"], sigma_bar, eta)


def space_from_mchp(hp, spec, table, sigma_bar, eta=0.0):
    from .mchp import build_mchp_system

    system, names = build_mchp_system(hp, spec, table)
    k_vars = [names[c]["k"] for c in hp.nodes]
    sigma_vars = [v for c in hp.nodes for v in names[c]["sigma"]]
    return _finish_space(system, k_vars, spec, table, sigma_vars, sigma_bar, eta)


def possible_preference(space: CompatibleSpace, a, b, node=ROOT_CODE) -> bool:
    """True iff some compatible function rates a at least as good as b."""
    if a == b:
        return True
    system = space.with_comparison(a, b, node)
    sol = lp.solve_or_raise(system, {EPS_VAR: 1.0}, "max")
    return bool(sol.optimal and sol.objective > POSITIVE_TOL)


def necessary_preference(space: CompatibleSpace, a, b, node=ROOT_CODE) -> bool:
    """True iff no compatible function rates b strictly better than a."""
    if a == b:
        return True
    system = space.with_comparison(b, a, node, strict_eps=True)
    sol = lp.solve_or_raise(system, {EPS_VAR: 1.0}, "max")
    return bool(not sol.optimal or sol.objective <= POSITIVE_TOL)


@dataclass
class PreferenceRelationMatrix:
    alternatives: list[str]
    necessary: np.ndarray
    possible: np.ndarray
    node: str = ROOT_CODE

    def n(self, a, b):
        i, j = self.alternatives.index(a), self.alternatives.index(b)
        return bool(self.necessary[i, j])

    def p(self, a, b):
        i, j = self.alternatives.index(a), self.alternatives.index(b)
        return bool(self.possible[i, j])

    def to_csv(self, which="necessary"):
        import csv as _csv
        import io as _io

        m = self.necessary if which == "necessary" else self.possible
        buf = _io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["id"] + self.alternatives)
        for a, row in zip(self.alternatives, m):
            w.writerow([a] + [int(x) for x in row])
        return buf.getvalue()

    def to_json(self):
        return {
            "node": self.node,
            "alternatives": self.alternatives,
            "necessary": self.necessary.astype(int).tolist(),
            "possible": self.possible.astype(int).tolist(),
        }


def relation_matrices(space: CompatibleSpace, node=ROOT_CODE,
                      alternatives=None) -> PreferenceRelationMatrix:
    """Both relations over all ordered pairs. Both LPs are solved per pair and
    the N(a,b) <-> not P(b,a) duality is verified rather than assumed, so a
    solver wobble on a near-degenerate space surfaces as a diagnostic."""
    alts = list(alternatives) if alternatives is not None else space.table.alternatives
    n = len(alts)
    N = np.zeros((n, n), dtype=bool)
    P = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(alts):
        for j, b in enumerate(alts):
            P[i, j] = possible_preference(space, a, b, node)
            N[i, j] = necessary_preference(space, a, b, node)
    for i in range(n):
        for j in range(n):
            if i != j and N[i, j] != (not P[j, i]):
                raise lp.SolverFailure(
                    f"necessary/possible duality violated for ({alts[i]}, {alts[j]}); "
                    "the space is numerically degenerate"
                )
    if np.any(N & ~P):
        raise lp.SolverFailure("necessary relation escaped the possible relation")
    return PreferenceRelationMatrix(alts, N, P, node)
