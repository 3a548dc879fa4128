"""Turning elicitation artifacts into overall evaluations of the reference
alternatives: deck-of-cards counts, AHP pairwise-comparison matrices, and
MACBETH qualitative judgment matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import lp
from .core import INTERVAL, RATIO, PreferenceStructure, ValidationError


@dataclass
class DcmAssignment:
    nu: dict[str, float]
    scale: str

    def value(self, alternative):
        return self.nu[alternative]


def dcm_values(prefs: PreferenceStructure) -> DcmAssignment:
    """nu(a) for exact card counts: the cumulative sum of (e_p + 1) from the
    zero level, so nu(a) for a in L_h is sum_{p<h}(e_p + 1).

    On an interval scale the zero-level count is redundant (the regression's
    affine constant absorbs any shift of nu), so a non-exact zero-level card
    is tolerated there and counted as zero.
    """
    cards = list(prefs.blank_cards)
    if prefs.scale == INTERVAL and not cards[0].is_exact:
        cards[0] = cards[0].exact(0)
    if not all(c.is_exact for c in cards):
        raise ValidationError("preference structure has non-exact blank cards")
    nu: dict[str, float] = {}
    level_value = 0.0
    for h, level in enumerate(prefs.levels):
        level_value += cards[h].lo + 1
        for a in level:
            nu[a] = level_value
    return DcmAssignment(nu, prefs.scale)


@dataclass
class AhpResult:
    priorities: dict[str, float]
    lambda_max: float


def _check_reciprocal(matrix, atol=1e-9):
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValidationError("comparison matrix must be square")
    if np.any(matrix <= 0):
        raise ValidationError("comparison matrix entries must be positive")
    if not np.allclose(np.diag(matrix), 1.0, atol=atol):
        raise ValidationError("comparison matrix diagonal must be 1")
    if not np.allclose(matrix * matrix.T, 1.0, atol=1e-6):
        raise ValidationError("comparison matrix is not reciprocal")


def ahp_priorities(matrix, alternatives=None, tol=1e-12, max_iter=10000) -> AhpResult:
    """Principal eigenvector of a positive reciprocal matrix by power
    iteration, normalized to sum 1."""
    C = np.asarray(matrix, dtype=float)
    _check_reciprocal(C)
    n = C.shape[0]
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = C @ v
        w /= w.sum()
        if np.max(np.abs(w - v)) < tol:
            v = w
            break
        v = w
    lam = float(np.mean((C @ v) / v))
    names = list(alternatives) if alternatives is not None else list(range(n))
    return AhpResult({a: float(x) for a, x in zip(names, v)}, lam)


@dataclass
class MacbethResult:
    nu: dict[str, float]
    thresholds: list[float]
    gamma: float
    sigma_bar: float


def _sigma_vars(system, names):
    for a in names:
        system.add_variable(f"sp[{a}]", lb=0.0)
        system.add_variable(f"sm[{a}]", lb=0.0)


def _macbeth_system(judgments, alternatives, best, worst):
    system = lp.ConstraintSystem()
    for a in alternatives:
        system.add_variable(f"nu[{a}]")
    for e in range(1, 7):
        system.add_variable(f"delta[{e}]")
    system.add_variable("gamma")
    _sigma_vars(system, alternatives)
    system.add({f"nu[{best}]": 1.0}, lp.EQ, 100.0, "anchor_best")
    system.add({f"nu[{worst}]": 1.0}, lp.EQ, 0.0, "anchor_worst")
    for (a, b), e in judgments.items():
        coeffs = {
            f"nu[{a}]": 1.0, f"sp[{a}]": -1.0, f"sm[{a}]": 1.0,
            f"nu[{b}]": -1.0, f"sp[{b}]": 1.0, f"sm[{b}]": -1.0,
        }
        if e == 0:
            system.add(coeffs, lp.EQ, 0.0, f"cat0[{a},{b}]")
        else:
            coeffs[f"delta[{e}]"] = -1.0
            system.add(coeffs, lp.EQ, 0.0, f"cat{e}[{a},{b}]")
    # threshold ladder; delta_0 = 0 gives the gamma gap below delta_1,
    # keeping the gamma maximization bounded
    system.add({"delta[1]": -1.0, "gamma": 1.0}, lp.LE, 0.0, "ladder0")
    for e in range(1, 6):
        system.add(
            {f"delta[{e}]": 1.0, f"delta[{e+1}]": -1.0, "gamma": 1.0},
            lp.LE, 0.0, f"ladder{e}",
        )
    return system


def macbeth_values(judgments, alternatives, epsilon=1e-6) -> MacbethResult:
    """Two-stage MACBETH-style scale construction on 0-100.

    judgments: mapping (a, b) -> category 0..6 with a weakly preferred to b;
    the unique best and worst alternatives are read off the judgments, and a
    tie for either anchor is an error.
    """
    alternatives = list(alternatives)
    if len(alternatives) < 2:
        raise ValidationError("need at least two alternatives")
    beaten = set()
    winners = set()
    for (a, b), e in judgments.items():
        if a not in alternatives or b not in alternatives:
            raise ValidationError(f"judgment references unknown alternative {(a, b)}")
        if not (0 <= int(e) <= 6):
            raise ValidationError(f"category {e!r} outside 0..6")
        if e > 0:
            beaten.add(b)
            winners.add(a)
    candidates_best = [a for a in alternatives if a not in beaten]
    candidates_worst = [a for a in alternatives if a not in winners]
    if len(candidates_best) != 1:
        raise ValidationError(f"no unique best alternative among {candidates_best}")
    if len(candidates_worst) != 1:
        raise ValidationError(f"no unique worst alternative among {candidates_worst}")
    best, worst = candidates_best[0], candidates_worst[0]

    # auxiliary stage: smallest total deviation compatible with gamma >= eps
    aux = _macbeth_system(judgments, alternatives, best, worst)
    aux.add({"gamma": 1.0}, lp.GE, epsilon, "gamma_floor")
    sigma_obj = {f"sp[{a}]": 1.0 for a in alternatives}
    sigma_obj.update({f"sm[{a}]": 1.0 for a in alternatives})
    sol_aux = lp.solve_or_raise(aux, sigma_obj, "min")
    if not sol_aux.optimal:
        raise ValidationError("MACBETH anchors admit no positive gamma")
    sigma_bar = sol_aux.objective

    main = _macbeth_system(judgments, alternatives, best, worst)
    main.add(sigma_obj, lp.LE, sigma_bar, "sigma_budget")
    sol = lp.solve_or_raise(main, {"gamma": 1.0}, "max")
    if not sol.optimal or sol.objective <= 0:
        raise ValidationError("no positive gamma attainable")
    adjusted = {
        a: sol[f"nu[{a}]"] - sol[f"sp[{a}]"] + sol[f"sm[{a}]"] for a in alternatives
    }
    return MacbethResult(
        nu=adjusted,
        thresholds=[sol[f"delta[{e}]"] for e in range(1, 7)],
        gamma=sol.objective,
        sigma_bar=sigma_bar,
    )


def comparison_matrix_from_csv(text):
    """Square matrix with alternative ids as header and row labels; blank
    cells in the lower triangle are mirrored (AHP) or ignored (MACBETH)."""
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader)][1:]
    cells = {}
    for line in reader:
        if not line:
            continue
        a = line[0].strip()
        for b, cell in zip(header, line[1:]):
            cell = cell.strip()
            if cell:
                cells[(a, b)] = float(cell)
    return header, cells


def ahp_matrix_from_csv(text):
    names, cells = comparison_matrix_from_csv(text)
    n = len(names)
    C = np.ones((n, n))
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if (a, b) in cells:
                C[i, j] = cells[(a, b)]
            elif (b, a) in cells:
                C[i, j] = 1.0 / cells[(b, a)]
    return names, C


def macbeth_judgments_from_csv(text):
    """Upper-triangular categories; diagonal and blanks ignored."""
    names, cells = comparison_matrix_from_csv(text)
    order = {a: i for i, a in enumerate(names)}
    judgments = {}
    for (a, b), value in cells.items():
        if a == b:
            continue
        if order[a] < order[b]:
            judgments[(a, b)] = int(value)
    return names, judgments
