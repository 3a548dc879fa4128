"""Stochastic analysis over the compatible space: uniform Hit-And-Run
sampling of the constraint polytope, rank acceptability and pairwise winning
indices, expected ranking, and the barycenter ranking."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .core import ROOT_CODE
from .models import ModelParameters
from .ror import CompatibleSpace

BOX_LIMIT = 1e6


@dataclass
class SamplerConfig:
    sample_count: int = 100_000
    burn_in: int = 1000
    thinning: int = 5
    seed: int = 0
    eps_floor: float = 1e-6
    precondition_rounds: int = 4
    pilot_size: int = 8000

    def __post_init__(self):
        if self.sample_count <= 0 or self.burn_in < 0 or self.thinning <= 0:
            raise ValueError("counts must be positive")


@dataclass
class SampleSet:
    variables: list[str]
    matrix: np.ndarray  # samples x variables
    box_clip_active: bool = False

    def column(self, name):
        return self.matrix[:, self.variables.index(name)]

    def assignment(self, i):
        return dict(zip(self.variables, self.matrix[i]))

    def __len__(self):
        return len(self.matrix)


def _implicit_equalities(A, b, tol=1e-6):
    """Indices of inequality rows that are tight over the whole polytope.

    A zero Chebyshev radius means the polytope lives inside some facets; a
    row is flagged tight when no feasible point gives it slack beyond tol,
    probed as a feasibility LP with that row's rhs pulled in. The probe must
    sit above the backend's own feasibility tolerance, so directions thinner
    than tol are deliberately collapsed to equalities.
    """
    from scipy.optimize import linprog

    d = A.shape[1]
    zero = np.zeros(d)
    tight = []
    for i in range(A.shape[0]):
        delta = max(tol, tol * abs(b[i]))
        b2 = b.copy()
        b2[i] -= delta
        res = linprog(zero, A_ub=A, b_ub=b2, bounds=[(None, None)] * d, method="highs")
        if res.status in (2, 3):
            # infeasible: tight everywhere; "unbounded" cannot occur with a
            # zero objective, so both map to no-slack-found
            tight.append(i)
        elif res.status != 0:
            raise lp.SolverFailure(f"implicit-equality probe failed (status {res.status})")
    return tight


def _variable_boxes(system, order):
    """Synthetic bound rows for variables without declared finite bounds.

    Each range is measured over the polytope itself and padded, so the rows
    stay inactive unless the direction is genuinely unbounded, in which case
    the wide fallback box applies and clipping is possible.
    """
    rows, rhs = [], []
    clipped = []
    n = len(order)
    idx = {v: j for j, v in enumerate(order)}
    for v in order:
        lo_missing = system.lower[v] is None
        hi_missing = system.upper[v] is None
        if not (lo_missing or hi_missing):
            continue
        lo_sol = lp.solve_lp(system, {v: 1.0}, "min") if lo_missing else None
        hi_sol = lp.solve_lp(system, {v: 1.0}, "max") if hi_missing else None
        span = 1.0
        if lo_sol is not None and lo_sol.optimal and hi_sol is not None and hi_sol.optimal:
            span = max(1.0, abs(hi_sol.objective - lo_sol.objective))
        if lo_missing:
            row = np.zeros(n)
            row[idx[v]] = -1.0
            if lo_sol.optimal:
                rows.append(row)
                rhs.append(-(lo_sol.objective - 0.5 * span))
            else:
                rows.append(row)
                rhs.append(BOX_LIMIT)
                clipped.append(v)
        if hi_missing:
            row = np.zeros(n)
            row[idx[v]] = 1.0
            if hi_sol.optimal:
                rows.append(row)
                rhs.append(hi_sol.objective + 0.5 * span)
            else:
                rows.append(row)
                rhs.append(BOX_LIMIT)
                clipped.append(v)
    return rows, np.array(rhs, float), clipped


def _chord_step(A, b, y, u, rng, synthetic_mask):
    Au = A @ u
    slack = b - A @ y
    slack = np.maximum(slack, 0.0)
    pos = Au > 1e-13
    neg = Au < -1e-13
    tmax, tmin = np.inf, -np.inf
    max_row = min_row = -1
    if pos.any():
        ratios = slack[pos] / Au[pos]
        idx = np.argmin(ratios)
        tmax = ratios[idx]
        max_row = np.flatnonzero(pos)[idx]
    if neg.any():
        ratios = slack[neg] / Au[neg]
        idx = np.argmax(ratios)
        tmin = ratios[idx]
        min_row = np.flatnonzero(neg)[idx]
    if not (np.isfinite(tmin) and np.isfinite(tmax)):
        raise lp.SolverFailure("unbounded chord; polytope box failed")
    clip = (max_row >= 0 and synthetic_mask[max_row]) or (min_row >= 0 and synthetic_mask[min_row])
    if tmax < tmin:
        tmax = tmin = 0.0
    return y + rng.uniform(tmin, tmax) * u, clip


def _run_chain(A, b, y0, count, rng, burn, thin, synthetic_mask):
    d = len(y0)
    out = np.empty((count, d))
    y = y0.copy()
    clip_seen = False
    produced = steps = stuck = 0
    while produced < count:
        u = rng.normal(size=d)
        u /= np.linalg.norm(u)
        y2, clip = _chord_step(A, b, y, u, rng, synthetic_mask)
        if np.array_equal(y2, y):
            stuck += 1
            if stuck >= 200:
                slack = b - A @ y
                worst = int(np.argmin(slack))
                raise lp.SolverFailure(
                    f"chain stuck: no positive chord found for 200 directions; "
                    f"most binding constraint row {worst} (slack {slack[worst]:.2e})"
                )
        else:
            stuck = 0
        y = y2
        clip_seen = clip_seen or clip
        steps += 1
        if steps > burn and steps % thin == 0:
            out[produced] = y
            produced += 1
    return out, clip_seen


def har_sample(space: CompatibleSpace, config: SamplerConfig) -> SampleSet:
    """Uniform samples from the compatible polytope.

    Equalities are eliminated by null-space parameterization; inequality rows
    that are tight everywhere (pinned deviations, say) are promoted to
    equalities and eliminated too. The chain starts at the Chebyshev center
    of the reduced polytope and is preconditioned by a few covariance-rounding
    passes, which uniformity survives because the target measure is affine
    invariant. Unbounded directions are capped by a wide synthetic box and the
    result is flagged whenever that box actually clips a chord.
    """
    system = space.sampling_system(config.eps_floor)
    order = system.variables
    # synthetic boxes keep unbounded directions finite; snug ranges computed
    # per variable keep the row scales comparable for the solver and the chain
    box_rows, box_rhs, truly_clipped = _variable_boxes(system, order)
    A_ub, b_ub, A_eq, b_eq, order = system.to_matrices(order)
    synthetic_from = A_ub.shape[0]
    if box_rows:
        A_ub = np.vstack([A_ub, box_rows])
        b_ub = np.concatenate([b_ub, box_rhs])

    rng = np.random.default_rng(config.seed)
    A_eq_cur, b_eq_cur = A_eq, b_eq
    for _ in range(len(order) + 1):
        A, b, x0, N = lp.affine_reduce(A_ub, b_ub, A_eq_cur, b_eq_cur)
        if A.shape[1] == 0:
            # polytope is a single point
            if np.any(A_ub @ x0 - b_ub > lp.FEASIBILITY_TOL):
                raise lp.LpError("degenerate space: pinned point is infeasible")
            matrix = np.tile(x0, (config.sample_count, 1))
            return SampleSet(order, matrix, False)
        norms = np.linalg.norm(A, axis=1)
        keep = norms > 1e-12
        y0, radius, _, _ = _cheb(A[keep], b[keep])
        if radius > 1e-9:
            break
        tight = _implicit_equalities(A[keep], b[keep])
        if not tight:
            raise lp.LpError("empty interior: compatible space is degenerate")
        rows = np.flatnonzero(keep)[tight]
        A_eq_cur = np.vstack([A_eq_cur, A_ub[rows]]) if A_eq_cur.size else A_ub[rows]
        b_eq_cur = np.concatenate([b_eq_cur, b_ub[rows]])
    else:
        raise lp.LpError("could not isolate the polytope's affine hull")

    A, b = A[keep], b[keep]
    synthetic_mask = np.zeros(len(b), dtype=bool)
    ub_keep = np.flatnonzero(keep)
    synthetic_mask[np.isin(ub_keep, np.arange(synthetic_from, A_ub.shape[0]))] = True

    clip_seen = False
    T = np.eye(A.shape[1])
    z0 = y0
    At = A
    for _ in range(config.precondition_rounds):
        pilot, clip = _run_chain(At, b, z0, config.pilot_size, rng, 1000, 3, synthetic_mask)
        clip_seen = clip_seen or clip
        C = np.cov(pilot.T)
        C = np.atleast_2d(C) + 1e-13 * np.eye(At.shape[1])
        L = np.linalg.cholesky(C)
        At = At @ L
        T = T @ L
        z0 = np.linalg.solve(L, pilot.mean(axis=0))
    Z, clip = _run_chain(At, b, z0, config.sample_count, rng, config.burn_in,
                         config.thinning, synthetic_mask)
    clip_seen = clip_seen or clip
    Y = Z @ T.T
    matrix = x0 + Y @ N.T
    return SampleSet(order, matrix, clip_seen)


def _cheb(A, b):
    from scipy.optimize import linprog

    d = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status == 2:
        raise lp.LpError("empty polytope")
    if res.status != 0:
        raise lp.SolverFailure("chebyshev LP failed")
    return res.x[:d], float(res.x[-1]), A, b


def check_samples(space: CompatibleSpace, samples: SampleSet, config: SamplerConfig,
                  tol=lp.FEASIBILITY_TOL):
    """Replay every sample through the constraint system, vectorized."""
    system = space.sampling_system(config.eps_floor)
    A_ub, b_ub, A_eq, b_eq, order = system.to_matrices(samples.variables)
    X = samples.matrix
    worst = 0.0
    if len(A_ub):
        worst = max(worst, float(np.max(A_ub @ X.T - b_ub[:, None])))
    if len(A_eq):
        worst = max(worst, float(np.max(np.abs(A_eq @ X.T - b_eq[:, None]))))
    return worst <= tol, worst


@dataclass
class SmaaReport:
    node: str
    alternatives: list[str]
    rai: np.ndarray          # alternatives x ranks, percent
    pwi: np.ndarray          # alternatives x alternatives, percent
    expected_rank: dict[str, float]
    expected_order: list[str]
    barycenter: ModelParameters
    barycenter_scores: dict[str, float]
    barycenter_order: list[str]
    eta: float = 0.0
    box_clip_active: bool = False
    tie_flags: list[tuple[str, str]] = field(default_factory=list)

    @property
    def expected_rank_normalized(self):
        return {a: v / 100.0 for a, v in self.expected_rank.items()}

    def rai_csv(self):
        import csv as _csv
        import io as _io

        buf = _io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["id"] + [f"rank{v}" for v in range(1, len(self.alternatives) + 1)])
        for a, row in zip(self.alternatives, self.rai):
            w.writerow([a] + [f"{x:.4f}" for x in row])
        return buf.getvalue()

    def pwi_csv(self):
        import csv as _csv
        import io as _io

        buf = _io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["id"] + self.alternatives)
        for a, row in zip(self.alternatives, self.pwi):
            w.writerow([a] + [f"{x:.4f}" for x in row])
        return buf.getvalue()

    def to_json(self):
        return {
            "node": self.node,
            "alternatives": self.alternatives,
            "rai": self.rai.tolist(),
            "pwi": self.pwi.tolist(),
            "expected_rank": self.expected_rank,
            "expected_rank_normalized": self.expected_rank_normalized,
            "expected_order": self.expected_order,
            "barycenter": self.barycenter.to_json(),
            "barycenter_scores": self.barycenter_scores,
            "barycenter_order": self.barycenter_order,
            "eta": self.eta,
            "box_clip_active": bool(self.box_clip_active),
        }


def _score_matrix(space: CompatibleSpace, samples: SampleSet, node):
    alts = space.table.alternatives
    names = space.spec.parameter_names()
    cols = [samples.variables.index(v) for v in names]
    P = samples.matrix[:, cols]
    E = np.zeros((len(alts), len(names)))
    idx = {v: j for j, v in enumerate(names)}
    for i, a in enumerate(alts):
        for v, c in space.expression(a, node).items():
            E[i, idx[v]] = c
    return alts, E @ P.T  # alternatives x samples


def smaa_indices(space: CompatibleSpace, samples: SampleSet, node=ROOT_CODE):
    """Rank-acceptability and pairwise-winning frequencies in percent.

    Competition ranking: tied alternatives share the better rank; ties count
    toward neither side of the pairwise index.
    """
    alts, U = _score_matrix(space, samples, node)
    n, m = U.shape
    rai = np.zeros((n, n))
    pwi = np.zeros((n, n))
    chunk = max(1, int(2_000_000 // (n * n)))
    for start in range(0, m, chunk):
        block = U[:, start:start + chunk]  # n x c
        wins = (block[:, None, :] > block[None, :, :])
        pwi += wins.sum(axis=2)
        ranks = 1 + wins.sum(axis=0)  # rank of each alternative per sample
        for i in range(n):
            rai[i] += np.bincount(ranks[i] - 1, minlength=n)
    rai = rai / m * 100.0
    pwi = pwi / m * 100.0
    return alts, rai, pwi


def expected_ranking(alternatives, rai):
    """ER(a) = sum_v v * rai_percent(a, v); ascending is better. Ties are
    broken lexicographically and flagged."""
    er = {a: float(np.dot(np.arange(1, len(alternatives) + 1), rai[i]))
          for i, a in enumerate(alternatives)}
    order = sorted(alternatives, key=lambda a: (er[a], a))
    flags = [
        (order[i], order[i + 1])
        for i in range(len(order) - 1)
        if abs(er[order[i]] - er[order[i + 1]]) < 1e-9
    ]
    return er, order, flags


def barycenter_ranking(space: CompatibleSpace, samples: SampleSet, node=ROOT_CODE):
    """Componentwise mean of the sampled parameter vectors (valid by convexity)
    and the ranking it induces."""
    names = space.spec.parameter_names()
    cols = [samples.variables.index(v) for v in names]
    mean = samples.matrix[:, cols].mean(axis=0)
    params = ModelParameters(space.spec.kind, dict(zip(names, mean)))
    from . import models

    scores = {
        a: models.evaluate_alternative(space.spec, params, space.table, a, node)
        for a in space.table.alternatives
    }
    order = sorted(scores, key=lambda a: (-scores[a], a))
    return params, scores, order


def smaa_report(space: CompatibleSpace, config: SamplerConfig, node=ROOT_CODE,
                samples: SampleSet | None = None) -> SmaaReport:
    if samples is None:
        samples = har_sample(space, config)
    alts, rai, pwi = smaa_indices(space, samples, node)
    er, order, flags = expected_ranking(alts, rai)
    params, scores, border = barycenter_ranking(space, samples, node)
    return SmaaReport(
        node=node,
        alternatives=alts,
        rai=rai,
        pwi=pwi,
        expected_rank=er,
        expected_order=order,
        barycenter=params,
        barycenter_scores=scores,
        barycenter_order=border,
        eta=space.eta,
        box_clip_active=samples.box_clip_active,
        tie_flags=flags,
    )
