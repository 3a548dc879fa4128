"""Hierarchical fitting: one shared parameter vector, per-node blank-card
information on any subset of non-leaf criteria, aggregate deviation
minimization and the epsilon maximization that keeps every node's card value
positive."""

from __future__ import annotations

from dataclasses import dataclass

from . import lp, models
from .core import PerformanceTable, PreferenceStructure, ValidationError
from .imprecise import EPS_VAR, attach_node_constraints, fitted_cards
from .models import ModelParameters, ValueModelSpec
from .regression import ZERO_TOL, classify_outcome


class HierarchicalPreferences:
    """Per-node preference structures keyed by criterion code; only non-leaf
    nodes can be assessed and the DM may leave any of them out."""

    def __init__(self, per_node: dict[str, PreferenceStructure], hierarchy):
        if not per_node:
            raise ValidationError("no assessed nodes")
        for code, prefs in per_node.items():
            if code not in hierarchy:
                raise ValidationError(f"unknown node {code!r}")
            if hierarchy.is_leaf(code):
                raise ValidationError(f"node {code!r} is elementary; assess its parent")
            if prefs.node_code != code:
                raise ValidationError(f"preference structure for {prefs.node_code!r} keyed as {code!r}")
        self.per_node = dict(per_node)
        self.hierarchy = hierarchy

    def validate_against(self, table):
        for prefs in self.per_node.values():
            prefs.validate_against(table)

    @property
    def nodes(self):
        return list(self.per_node)

    def to_json(self):
        return {code: prefs.to_json() for code, prefs in self.per_node.items()}

    @classmethod
    def from_json(cls, data, hierarchy):
        return cls({c: PreferenceStructure.from_json(p) for c, p in data.items()}, hierarchy)


@dataclass
class MchpFitResult:
    params: ModelParameters
    k: dict[str, float]
    deviations: dict[str, dict[str, tuple[float, float]]]
    sigma_bar: float
    epsilon_star: float
    eta_used: float
    nu_hat: dict[str, dict[str, float]]
    cards: dict[str, list[float]]
    case: str

    def to_json(self):
        return {
            "params": self.params.to_json(),
            "k": self.k,
            "deviations": {
                n: {a: list(d) for a, d in devs.items()} for n, devs in self.deviations.items()
            },
            "sigma_bar": self.sigma_bar,
            "epsilon_star": self.epsilon_star,
            "eta_used": self.eta_used,
            "nu_hat": self.nu_hat,
            "cards": self.cards,
            "case": self.case,
        }


def build_mchp_system(hp: HierarchicalPreferences, spec: ValueModelSpec,
                      table: PerformanceTable):
    """E_Model plus one preference block per assessed node (exact cards are
    the degenerate equality case of the same block)."""
    system = spec.emit_model_constraints()
    names = {}
    for code, prefs in hp.per_node.items():
        names[code] = attach_node_constraints(system, prefs, spec, table, code)
    return system, names


def _sigma_obj(names):
    obj = {}
    for node_names in names.values():
        for v in node_names["sigma"]:
            obj[v] = 1.0
    return obj


def solve_mchp(hp: HierarchicalPreferences, spec: ValueModelSpec,
               table: PerformanceTable, eta_step=0.01, eta_cap=1.0) -> MchpFitResult:
    hp.validate_against(table)
    system, names = build_mchp_system(hp, spec, table)
    obj = _sigma_obj(names)
    sol = lp.solve_or_raise(system, obj, "min")
    if sol.status == lp.INFEASIBLE:
        blocked = _per_node_diagnosis(hp, spec, table)
        raise ValidationError(f"infeasible node constraints: {blocked}")
    sigma_bar = sol.objective

    eta = 0.0
    best = None
    while True:
        system, names = build_mchp_system(hp, spec, table)
        system.add_variable(EPS_VAR)
        for code in hp.nodes:
            system.add({names[code]["k"]: 1.0, EPS_VAR: -1.0}, lp.GE, 0.0, f"k_floor[{code}]")
        system.add(_sigma_obj(names), lp.LE, sigma_bar + eta, "budget")
        sol = lp.solve_or_raise(system, {EPS_VAR: 1.0}, "max")
        if sol.optimal:
            best = (sol, eta)
            if sol.objective > ZERO_TOL:
                break
        if eta >= eta_cap:
            break
        eta = round(eta + eta_step, 10)
    if best is None:
        raise lp.SolverFailure("epsilon stage infeasible at every eta")
    sol, eta = best
    params = ModelParameters.from_solution(spec, sol.assignment)
    k = {code: sol[names[code]["k"]] for code in hp.nodes}
    nu_hat = {
        code: {a: sol[f"nuhat[{code}][{a}]"] for a in hp.per_node[code].reference_set}
        for code in hp.nodes
    }
    deviations = {
        code: {
            a: (sol[f"sp[{code}][{a}]"], sol[f"sm[{code}][{a}]"])
            for a in hp.per_node[code].reference_set
        }
        for code in hp.nodes
    }
    sigma_now = sum(sp + sm for devs in deviations.values() for sp, sm in devs.values())
    return MchpFitResult(
        params=params,
        k=k,
        deviations=deviations,
        sigma_bar=sigma_bar,
        epsilon_star=sol.objective,
        eta_used=eta,
        nu_hat=nu_hat,
        cards={code: fitted_cards(hp.per_node[code], nu_hat[code], k[code]) for code in hp.nodes},
        case=classify_outcome(sigma_now, min(k.values())),
    )


def _per_node_diagnosis(hp, spec, table):
    bad = []
    for code, prefs in hp.per_node.items():
        system = spec.emit_model_constraints()
        names = attach_node_constraints(system, prefs, spec, table, code)
        sol = lp.solve_lp(system, {v: 1.0 for v in names["sigma"]}, "min")
        if sol.status == lp.INFEASIBLE:
            bad.append(code)
    return bad or ["interaction between nodes"]


def node_values(result: MchpFitResult, spec: ValueModelSpec, table: PerformanceTable,
                node) -> dict[str, float]:
    """Value of every alternative at a hierarchy node under the fitted
    parameters; for additive families a parent's value is the sum of its
    children's values."""
    return {
        a: models.evaluate_alternative(spec, result.params, table, a, node)
        for a in table.alternatives
    }
