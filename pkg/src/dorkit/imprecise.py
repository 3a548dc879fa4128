"""Blank-card information that is exact, interval-bounded, half-bounded or
missing: constraint generation per level pair and the two-stage fit (deviation
minimization, then epsilon maximization under the deterioration schedule)."""

from __future__ import annotations

from dataclasses import dataclass

from . import lp, models
from .core import BlankCard, PerformanceTable, PreferenceStructure, ValidationError
from .models import ModelParameters, ValueModelSpec
from .regression import ZERO_TOL, sigma_objective

EPS_VAR = "eps"


def blank_card_constraints(card: BlankCard, above_var, below_var, k_var):
    """Linear constraints tying the implied values of two consecutive levels
    to the card information; below_var None means the zero level.

    Returns (coeffs, op, rhs) triples over {above_var, below_var, k_var}:
    an exact count pins the gap to (e+1)k, bounds become one-sided gap bounds,
    and a missing lower bound still implies the one-step minimum gap k.
    """
    def gap(kcoef):
        coeffs = {above_var: 1.0, k_var: kcoef}
        if below_var is not None:
            coeffs[below_var] = -1.0
        return coeffs

    case = card.case
    out = []
    if case == "A":
        out.append((gap(-(card.lo + 1)), lp.EQ, 0.0))
    elif case == "B":
        out.append((gap(-(card.lo + 1)), lp.GE, 0.0))
        out.append((gap(-(card.hi + 1)), lp.LE, 0.0))
    elif case == "C":
        out.append((gap(-(card.lo + 1)), lp.GE, 0.0))
    elif case == "D":
        out.append((gap(-1.0), lp.GE, 0.0))
        out.append((gap(-(card.hi + 1)), lp.LE, 0.0))
    else:  # E: nothing known beyond the one-step minimum
        out.append((gap(-1.0), lp.GE, 0.0))
    return out


def attach_node_constraints(system, prefs: PreferenceStructure, spec: ValueModelSpec,
                            table: PerformanceTable, tag):
    """Add one node's preference block: deviations, implied values, ranking
    concordance and the case constraints. Returns the variable names used."""
    refs = prefs.reference_set
    k_var = f"k[{tag}]"
    system.add_variable(k_var, lb=0.0)
    nuhat = {}
    for a in refs:
        system.add_variable(f"sp[{tag}][{a}]", lb=0.0)
        system.add_variable(f"sm[{tag}][{a}]", lb=0.0)
        nuhat[a] = system.add_variable(f"nuhat[{tag}][{a}]")
    exprs = {a: spec.expression_for(table, a, prefs.node_code) for a in refs}
    for h_hi in range(prefs.s):
        for h_lo in range(h_hi + 1):
            for a in prefs.levels[h_hi]:
                for b in prefs.levels[h_lo]:
                    if a == b:
                        continue
                    coeffs = dict(exprs[a])
                    for v, c in exprs[b].items():
                        coeffs[v] = coeffs.get(v, 0.0) - c
                    system.add(coeffs, lp.GE, 0.0, f"rank[{tag}][{a}>={b}]")
    for a in refs:
        coeffs = dict(exprs[a])
        coeffs[f"sp[{tag}][{a}]"] = -1.0
        coeffs[f"sm[{tag}][{a}]"] = 1.0
        coeffs[nuhat[a]] = -1.0
        system.add(coeffs, lp.EQ, 0.0, f"imp[{tag}][{a}]")
    for h, card in enumerate(prefs.blank_cards):
        above = prefs.levels[h]
        below = prefs.levels[h - 1] if h > 0 else [None]
        for a in above:
            for b in below:
                below_var = nuhat[b] if b is not None else None
                for coeffs, op, rhs in blank_card_constraints(card, nuhat[a], below_var, k_var):
                    system.add(coeffs, op, rhs, f"card[{tag}][{h}][{a}]")
    return {
        "k": k_var,
        "nuhat": nuhat,
        "sigma": [f"sp[{tag}][{a}]" for a in refs] + [f"sm[{tag}][{a}]" for a in refs],
        "exprs": exprs,
    }


def fitted_cards(prefs, nuhat_values, k):
    """Recover e_h implied by a solution: gap divided by k, minus one."""
    if k <= 0:
        return [None] * prefs.s
    out = []
    prev = 0.0
    for h in range(prefs.s):
        level_vals = [nuhat_values[a] for a in prefs.levels[h]]
        cur = sum(level_vals) / len(level_vals)
        out.append((cur - prev) / k - 1.0)
        prev = cur
    return out


@dataclass
class ImpreciseFitResult:
    params: ModelParameters
    k: float
    nu_hat: dict[str, float]
    deviations: dict[str, tuple[float, float]]
    sigma_bar: float
    epsilon_star: float
    eta_used: float
    cards: list[float]
    case: str

    def to_json(self):
        return {
            "params": self.params.to_json(),
            "k": self.k,
            "nu_hat": self.nu_hat,
            "deviations": {a: list(d) for a, d in self.deviations.items()},
            "sigma_bar": self.sigma_bar,
            "epsilon_star": self.epsilon_star,
            "eta_used": self.eta_used,
            "cards": self.cards,
            "case": self.case,
        }


def _diagnose_infeasibility(prefs, spec, table):
    """Identify a level pair whose card constraints block feasibility by
    re-solving with one pair's block removed at a time."""
    for drop in range(prefs.s):
        system = spec.emit_model_constraints()
        probe = prefs.__class__(
            prefs.node_code,
            prefs.levels,
            [BlankCard.unknown() if h == drop else c for h, c in enumerate(prefs.blank_cards)],
            prefs.scale,
            prefs.intensity,
        )
        names = attach_node_constraints(system, probe, spec, table, "probe")
        sol = lp.solve_lp(system, {names["k"]: 1.0}, "max")
        if sol.status != lp.INFEASIBLE:
            lo = "zero level" if drop == 0 else f"level {drop}"
            return f"cards between {lo} and level {drop + 1}"
    return "no single level pair"


def solve_imprecise(prefs: PreferenceStructure, spec: ValueModelSpec,
                    table: PerformanceTable, eta_step=0.01, eta_cap=1.0) -> ImpreciseFitResult:
    """Stage one minimizes the total deviation over the case-constraint
    system; stage two maximizes epsilon with k >= epsilon under the
    deviation budget, raising eta by fixed steps until epsilon comes out
    positive."""
    if not prefs.levels:
        raise ValidationError("no levels")
    refs = prefs.reference_set

    def build():
        system = spec.emit_model_constraints()
        names = attach_node_constraints(system, prefs, spec, table, "flat")
        return system, names

    system, names = build()
    obj = {v: 1.0 for v in names["sigma"]}
    sol = lp.solve_or_raise(system, obj, "min")
    if sol.status == lp.INFEASIBLE:
        raise ValidationError(
            "imprecise card system infeasible; offending pair: "
            + _diagnose_infeasibility(prefs, spec, table)
        )
    sigma_bar = sol.objective

    eta = 0.0
    best = None
    while True:
        system, names = build()
        system.add_variable(EPS_VAR)
        system.add({names["k"]: 1.0, EPS_VAR: -1.0}, lp.GE, 0.0, "k_floor")
        system.add(obj, lp.LE, sigma_bar + eta, "budget")
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
    nu_hat = {a: sol[f"nuhat[flat][{a}]"] for a in refs}
    k = sol[names["k"]]
    sigma_now = sum(sol[f"sp[flat][{a}]"] + sol[f"sm[flat][{a}]"] for a in refs)
    from .regression import classify_outcome

    return ImpreciseFitResult(
        params=params,
        k=k,
        nu_hat=nu_hat,
        deviations={a: (sol[f"sp[flat][{a}]"], sol[f"sm[flat][{a}]"]) for a in refs},
        sigma_bar=sigma_bar,
        epsilon_star=sol.objective,
        eta_used=eta,
        cards=fitted_cards(prefs, nu_hat, k),
        case=classify_outcome(sigma_now, k),
    )
