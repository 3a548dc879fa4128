"""Deck-of-cards ordinal regression for a single criterion node: the
deviation-minimizing fit, the blank-card-value maximization with its
deterioration schedule, the four-case outcome classification, and the weaker
difference-based and ratio-based readings of the card counts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import lp, models
from .core import INTERVAL, RATIO, PerformanceTable, PreferenceStructure, ValidationError
from .models import ModelParameters, ValueModelSpec
from .scaling import DcmAssignment

ZERO_TOL = 1e-7

CASE1, CASE2, CASE3, CASE4 = "Case1", "Case2", "Case3", "Case4"


class InfeasiblePreferences(ValidationError):
    """The ranking concordance constraints admit no model at all (typically a
    dominated alternative ranked strictly above its dominator)."""


def classify_outcome(sigma_bar, k, tol=ZERO_TOL):
    """Four-way outcome: a zero total deviation and a positive card value is
    the clean representation; zero card value means the fit cannot
    discriminate alternatives regardless of deviations."""
    zero_sigma = sigma_bar <= tol
    zero_k = k <= tol
    if zero_sigma:
        return CASE2 if zero_k else CASE1
    return CASE4 if zero_k else CASE3


@dataclass
class RegressionResult:
    params: ModelParameters
    k: float
    h: float | None
    deviations: dict[str, tuple[float, float]]
    sigma_bar: float
    eta_used: float
    case: str
    fitted: dict[str, float]
    nu: dict[str, float]
    scale: str
    k_unbounded: bool = False

    @property
    def sigma_total(self):
        return sum(sp + sm for sp, sm in self.deviations.values())

    def to_json(self):
        return {
            "params": self.params.to_json(),
            "k": self.k,
            "h": self.h,
            "deviations": {a: list(d) for a, d in self.deviations.items()},
            "sigma_bar": self.sigma_bar,
            "eta_used": self.eta_used,
            "case": self.case,
            "fitted": self.fitted,
            "nu": self.nu,
            "scale": self.scale,
        }

    def fitted_table_csv(self):
        import csv as _csv
        import io as _io

        buf = _io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["alternative", "U", "nu", "target", "sigma_plus", "sigma_minus"])
        for a, u in self.fitted.items():
            target = self.k * self.nu[a] + (self.h or 0.0)
            sp, sm = self.deviations[a]
            w.writerow([a, u, self.nu[a], target, sp, sm])
        return buf.getvalue()


def sigma_objective(refs):
    obj = {f"sp[{a}]": 1.0 for a in refs}
    obj.update({f"sm[{a}]": 1.0 for a in refs})
    return obj


def build_dm_system(prefs: PreferenceStructure, spec: ValueModelSpec,
                    nu: DcmAssignment, table: PerformanceTable):
    """E_DM for problem-style fits: model constraints, ranking concordance,
    and the proportionality equalities (affine variant for interval scales)."""
    if set(nu.nu) != set(prefs.reference_set):
        raise ValidationError("nu assignment does not cover the reference set")
    system = spec.emit_model_constraints()
    system.add_variable("k", lb=0.0)
    interval = prefs.scale == INTERVAL
    if interval:
        system.add_variable("h")
    refs = prefs.reference_set
    for a in refs:
        system.add_variable(f"sp[{a}]", lb=0.0)
        system.add_variable(f"sm[{a}]", lb=0.0)
    exprs = {a: spec.expression_for(table, a, prefs.node_code) for a in refs}
    for a, b in itertools.permutations(refs, 2):
        if nu.nu[a] >= nu.nu[b]:
            coeffs = dict(exprs[a])
            for v, c in exprs[b].items():
                coeffs[v] = coeffs.get(v, 0.0) - c
            system.add(coeffs, lp.GE, 0.0, f"rank[{a}>={b}]")
    for a in refs:
        coeffs = dict(exprs[a])
        coeffs[f"sp[{a}]"] = -1.0
        coeffs[f"sm[{a}]"] = 1.0
        coeffs["k"] = -nu.nu[a]
        if interval:
            coeffs["h"] = -1.0
        system.add(coeffs, lp.EQ, 0.0, f"prop[{a}]")
    return system, exprs


def _result_from(sol, prefs, spec, nu, sigma_bar, eta_used, table):
    refs = prefs.reference_set
    params = ModelParameters.from_solution(spec, sol.assignment)
    k = sol["k"]
    h = sol.assignment.get("h") if prefs.scale == INTERVAL else None
    fitted = {
        a: models.evaluate_alternative(spec, params, table, a, prefs.node_code) for a in refs
    }
    deviations = {a: (sol[f"sp[{a}]"], sol[f"sm[{a}]"]) for a in refs}
    return RegressionResult(
        params=params,
        k=k,
        h=h,
        deviations=deviations,
        sigma_bar=sigma_bar,
        eta_used=eta_used,
        case=classify_outcome(sigma_bar, k),
        fitted=fitted,
        nu=dict(nu.nu),
        scale=prefs.scale,
    )


def solve_dor(prefs: PreferenceStructure, spec: ValueModelSpec,
              nu: DcmAssignment, table: PerformanceTable) -> RegressionResult:
    """Stage one: minimize the total deviation between the model values and
    the card-implied targets."""
    if not prefs.reference_set:
        raise ValidationError("empty reference set")
    system, _ = build_dm_system(prefs, spec, nu, table)
    sol = lp.solve_or_raise(system, sigma_objective(prefs.reference_set), "min")
    if sol.status == lp.INFEASIBLE:
        raise InfeasiblePreferences(
            "ranking concordance admits no model" + _dominance_conflict(prefs, nu, table)
        )
    if not sol.optimal:
        raise lp.SolverFailure(f"deviation-minimization LP {sol.status}")
    return _result_from(sol, prefs, spec, nu, sol.objective, 0.0, table)


def _dominance_conflict(prefs, nu, table):
    from .core import dominates

    hierarchy = table.hierarchy
    for a in prefs.reference_set:
        for b in prefs.reference_set:
            if nu.nu[a] > nu.nu[b] and dominates(table, b, a, prefs.node_code, hierarchy):
                return f"; {b!r} dominates {a!r} but is ranked below it"
    return ""


def maximize_k(prefs, spec, nu, table, sigma_bar, eta_step=0.01, eta_cap=1.0):
    """Stage two: maximize the blank-card value subject to a deviation budget
    sigma_bar + eta, raising eta in fixed increments until k comes out
    strictly positive or the cap is hit."""
    refs = prefs.reference_set
    eta = 0.0
    best = None
    while True:
        system, _ = build_dm_system(prefs, spec, nu, table)
        system.add(sigma_objective(refs), lp.LE, sigma_bar + eta, "budget")
        sol = lp.solve_or_raise(system, {"k": 1.0}, "max")
        unbounded = sol.status == lp.UNBOUNDED
        if unbounded:
            # k appears in no binding constraint (nu identically zero, say):
            # cap it and flag rather than fail
            system.add({"k": 1.0}, lp.LE, 1e6, "k_box")
            sol = lp.solve_or_raise(system, {"k": 1.0}, "max")
        if sol.optimal:
            best = _result_from(sol, prefs, spec, nu, 0.0, eta, table)
            best.sigma_bar = sum(sol[f"sp[{a}]"] + sol[f"sm[{a}]"] for a in refs)
            best.case = classify_outcome(best.sigma_bar, best.k)
            best.k_unbounded = unbounded
            if best.k > ZERO_TOL:
                return best
        if eta >= eta_cap:
            if best is None:
                raise lp.SolverFailure("k-maximization infeasible at every eta")
            return best
        eta = round(eta + eta_step, 10)


@dataclass
class OrdinalFitResult:
    params: ModelParameters
    adjusted: dict[str, float]
    gaps: list[float] | None
    ratios: list[float] | None
    gamma: float
    sigma_bar: float
    converged: bool = True
    deviations: dict[str, tuple[float, float]] = field(default_factory=dict)


def _ordinal_base(prefs, spec, table, with_uprime=True):
    """Shared scaffolding for the two weaker models: model constraints,
    adjacent-level concordance on U, and adjusted values U'."""
    system = spec.emit_model_constraints()
    refs = prefs.reference_set
    for a in refs:
        system.add_variable(f"sp[{a}]", lb=0.0)
        system.add_variable(f"sm[{a}]", lb=0.0)
    exprs = {a: spec.expression_for(table, a, prefs.node_code) for a in refs}
    for h in range(prefs.s - 1):
        for a in prefs.levels[h + 1]:
            for b in prefs.levels[h]:
                coeffs = dict(exprs[a])
                for v, c in exprs[b].items():
                    coeffs[v] = coeffs.get(v, 0.0) - c
                system.add(coeffs, lp.GE, 0.0, f"conc[{a}>={b}]")
    def uprime(a):
        coeffs = dict(exprs[a])
        coeffs[f"sp[{a}]"] = coeffs.get(f"sp[{a}]", 0.0) - 1.0
        coeffs[f"sm[{a}]"] = coeffs.get(f"sm[{a}]", 0.0) + 1.0
        return coeffs
    return system, exprs, uprime


def _minus(a, b):
    out = dict(a)
    for v, c in b.items():
        out[v] = out.get(v, 0.0) - c
    return out


def solve_difference_based(prefs: PreferenceStructure, spec: ValueModelSpec,
                           table: PerformanceTable) -> OrdinalFitResult:
    """Cards read as ordinal information on value differences: equal counts
    mean equal level gaps, larger counts mean larger gaps, and the second
    stage spreads strictly-larger gaps by a maximal margin gamma.

    The gap family includes the zero level (delta_0 is the value of the worst
    level itself, anchored at U'(a_0) = 0).
    """
    cards = prefs.exact_cards()
    s = prefs.s

    def add_gap_structure(system, uprime):
        for h in range(s):
            system.add_variable(f"delta[{h}]")
        for h in range(s):
            members = prefs.levels[h]
            rep = members[0]
            for a in members[1:]:
                system.add(_minus(uprime(a), uprime(rep)), lp.EQ, 0.0, f"tie[{a}]")
            coeffs = uprime(rep) if h == 0 else _minus(uprime(rep), uprime(prefs.levels[h - 1][0]))
            coeffs[f"delta[{h}]"] = coeffs.get(f"delta[{h}]", 0.0) - 1.0
            system.add(coeffs, lp.EQ, 0.0, f"gap[{h}]")

    def add_weak_family(system):
        for h, hp in itertools.permutations(range(s), 2):
            if cards[h] >= cards[hp]:
                system.add({f"delta[{hp}]": 1.0, f"delta[{h}]": -1.0}, lp.LE, 0.0,
                           f"weak[{h}>={hp}]")

    system, _, uprime = _ordinal_base(prefs, spec, table)
    add_gap_structure(system, uprime)
    add_weak_family(system)
    sol = lp.solve_or_raise(system, sigma_objective(prefs.reference_set), "min")
    if not sol.optimal:
        raise lp.SolverFailure(f"difference-based stage one {sol.status}")
    sigma_bar = sol.objective

    system, _, uprime = _ordinal_base(prefs, spec, table)
    add_gap_structure(system, uprime)
    add_weak_family(system)
    system.add_variable("gamma")
    strict = [(h, hp) for h, hp in itertools.permutations(range(s), 2) if cards[h] > cards[hp]]
    for h, hp in strict:
        system.add({f"delta[{h}]": -1.0, f"delta[{hp}]": 1.0, "gamma": 1.0}, lp.LE, 0.0,
                   f"margin[{h}>{hp}]")
    system.add(sigma_objective(prefs.reference_set), lp.LE, sigma_bar, "budget")
    if strict:
        sol = lp.solve_or_raise(system, {"gamma": 1.0}, "max")
        if not sol.optimal:
            raise lp.SolverFailure(f"difference-based stage two {sol.status}")
        gamma = sol.objective
    else:
        # no strictly larger card count anywhere: gamma is vacuous
        system.add({"gamma": 1.0}, lp.EQ, 0.0, "gamma_vacuous")
        sol = lp.solve_or_raise(system, sigma_objective(prefs.reference_set), "min")
        gamma = 0.0

    params = ModelParameters.from_solution(spec, sol.assignment)
    refs = prefs.reference_set
    adjusted = {}
    for a in refs:
        u = models.evaluate_alternative(spec, params, table, a, prefs.node_code)
        adjusted[a] = u - sol[f"sp[{a}]"] + sol[f"sm[{a}]"]
    return OrdinalFitResult(
        params=params,
        adjusted=adjusted,
        gaps=[sol[f"delta[{h}]"] for h in range(s)],
        ratios=None,
        gamma=gamma,
        sigma_bar=sigma_bar,
        deviations={a: (sol[f"sp[{a}]"], sol[f"sm[{a}]"]) for a in refs},
    )


def _ratio_inner(prefs, spec, table, phis, floor=1e-6):
    """For fixed level ratios, the system is linear: minimize total deviation."""
    system, _, uprime = _ordinal_base(prefs, spec, table)
    for h in range(prefs.s):
        rep = prefs.levels[h][0]
        for a in prefs.levels[h][1:]:
            system.add(_minus(uprime(a), uprime(rep)), lp.EQ, 0.0, f"tie[{a}]")
    for h in range(1, prefs.s):
        above = uprime(prefs.levels[h][0])
        below = uprime(prefs.levels[h - 1][0])
        coeffs = dict(above)
        for v, c in below.items():
            coeffs[v] = coeffs.get(v, 0.0) - phis[h - 1] * c
        system.add(coeffs, lp.EQ, 0.0, f"chain[{h}]")
    system.add(uprime(prefs.levels[0][0]), lp.GE, floor, "floor")
    sol = lp.solve_lp(system, sigma_objective(prefs.reference_set), "min")
    if sol.status == lp.FAILED:
        raise lp.SolverFailure("ratio inner LP failed")
    return sol


def solve_ratio_based(prefs: PreferenceStructure, spec: ValueModelSpec,
                      table: PerformanceTable, restarts=20, seed=0,
                      max_inner=500) -> OrdinalFitResult:
    """Cards read as ordinal information on value ratios. The chained-ratio
    system is bilinear, so the ratios are searched derivative-free (one free
    ratio per distinct card count keeps equal counts exactly tied) with a
    deviation-minimizing LP inside; the best incumbent found is reported."""
    cards = prefs.exact_cards()
    s = prefs.s
    inner_counts = cards[1:]  # gaps between consecutive reference levels
    classes = sorted(set(inner_counts))
    cls_index = {e: i for i, e in enumerate(classes)}
    strict_pairs = [
        (i, j) for i in range(len(classes)) for j in range(len(classes)) if classes[i] > classes[j]
    ]
    rng = np.random.default_rng(seed)
    budget = {"inner": 0}

    def phis_of(z):
        vals = np.exp(z)
        return [vals[cls_index[e]] for e in inner_counts]

    def gamma_of(z):
        if not strict_pairs:
            return 0.0
        return float(min(np.exp(z[i] - z[j]) for i, j in strict_pairs))

    def inner_sigma(z):
        if budget["inner"] >= max_inner:
            return None
        budget["inner"] += 1
        # class monotonicity: larger card count never gets the smaller ratio
        for i, j in strict_pairs:
            if z[i] < z[j]:
                return np.inf
        sol = _ratio_inner(prefs, spec, table, phis_of(z))
        if not sol.optimal:
            return np.inf
        return sol.objective

    # stage one: drive the total deviation down
    def stage1_obj(z):
        v = inner_sigma(z)
        return 1e9 if v is None else v

    best_z, best_sigma = None, np.inf
    for r in range(restarts):
        z0 = rng.normal(0.15, 0.25, size=len(classes)) if r else np.full(len(classes), 0.2)
        z0 = np.sort(z0)  # respect class order
        res = minimize(stage1_obj, z0, method="Nelder-Mead",
                       options={"maxiter": 200, "xatol": 1e-9, "fatol": 1e-12})
        if res.fun < best_sigma:
            best_sigma, best_z = res.fun, res.x
    if best_z is None or not np.isfinite(best_sigma):
        raise ValidationError("no feasible ratio assignment found within budget")
    sigma_bar = float(best_sigma)

    # stage two: maximize the margin gamma without worsening the deviation
    feas_tol = max(1e-9, 1e-6 * max(1.0, sigma_bar))
    def stage2_obj(z):
        v = inner_sigma(z)
        if v is None:
            return 1e9
        excess = max(0.0, v - sigma_bar - feas_tol)
        if excess > 0:
            return 1e3 + 1e4 * min(excess, 1e3)
        return -gamma_of(z)

    budget["inner"] = 0
    best2_z, best2_val = best_z, stage2_obj(best_z)
    converged = np.isfinite(best2_val) and best2_val <= 0
    if strict_pairs:
        for r in range(restarts):
            z0 = best_z + rng.normal(0, 0.2, size=len(classes)) if r else best_z
            res = minimize(stage2_obj, z0, method="Nelder-Mead",
                           options={"maxiter": 300, "xatol": 1e-10, "fatol": 1e-12})
            if res.fun < best2_val:
                best2_val, best2_z = res.fun, res.x
        converged = best2_val <= 0
    phis = phis_of(best2_z)
    sol = _ratio_inner(prefs, spec, table, phis)
    params = ModelParameters.from_solution(spec, sol.assignment)
    refs = prefs.reference_set
    adjusted = {
        a: models.evaluate_alternative(spec, params, table, a, prefs.node_code)
        - sol[f"sp[{a}]"] + sol[f"sm[{a}]"]
        for a in refs
    }
    return OrdinalFitResult(
        params=params,
        adjusted=adjusted,
        gaps=None,
        ratios=[float(p) for p in phis],
        gamma=gamma_of(best2_z),
        sigma_bar=float(sol.objective),
        converged=bool(converged),
        deviations={a: (sol[f"sp[{a}]"], sol[f"sm[{a}]"]) for a in refs},
    )
