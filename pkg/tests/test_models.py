import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dorkit import lp
from dorkit.core import CriterionHierarchy, PerformanceTable, ValidationError
from dorkit.models import (
    CHOQUET2,
    GENERAL_ADDITIVE,
    PIECEWISE,
    WEIGHTED_SUM,
    ModelParameters,
    ValueModelSpec,
    choquet_capacity_value,
    evaluate,
    evaluate_alternative,
    mobius_var,
    weight_var,
)


@pytest.fixture(scope="module")
def flat3():
    h = CriterionHierarchy.flat(["g1", "g2", "g3"])
    t = PerformanceTable(
        ["R1", "R2", "R3", "R4"], ["g1", "g2", "g3"],
        [[90, 100, 80], [100, 70, 40], [30, 50, 60], [20, 40, 40]], h,
    )
    return h, t


def random_feasible(spec, rng):
    """A random parameter vector satisfying the family's constraints, built
    constructively per family."""
    if spec.kind == WEIGHTED_SUM:
        w = rng.dirichlet(np.ones(len(spec.leaves)))
        return ModelParameters(spec.kind, {weight_var(t): w[i] for i, t in enumerate(spec.leaves)})
    if spec.kind in (PIECEWISE, GENERAL_ADDITIVE):
        tops = rng.dirichlet(np.ones(len(spec.leaves)))
        values = {}
        for i, t in enumerate(spec.leaves):
            npts = len(spec.breakpoints[t])
            steps = rng.dirichlet(np.ones(npts - 1)) * tops[i]
            vals = np.concatenate([[0.0], np.cumsum(steps)])
            for q in range(npts):
                values[f"u[{t}][{q}]"] = vals[q]
        return ModelParameters(spec.kind, values)
    # choquet: rejection sample mobius vectors against the monotonicity system
    system = spec.emit_model_constraints()
    names = spec.parameter_names()
    while True:
        singles = rng.dirichlet(np.ones(len(spec.leaves))) * 1.4
        pairs = rng.normal(0, 0.08, size=len(names) - len(spec.leaves))
        vec = np.concatenate([singles, pairs])
        vec *= 1.0 / vec.sum()
        params = ModelParameters(spec.kind, dict(zip(names, vec)))
        if system.max_violation(params.values) < 1e-12:
            return params


def specs_for(hierarchy, table):
    return [
        ValueModelSpec.weighted_sum(hierarchy),
        ValueModelSpec.piecewise(hierarchy, table, segments=3),
        ValueModelSpec.general_additive(hierarchy, table),
        ValueModelSpec.choquet2(hierarchy),
    ]


class TestEvaluate:
    def test_ws_table2_score(self, flat3):
        h, t = flat3
        spec = ValueModelSpec.weighted_sum(h)
        params = ModelParameters(WEIGHTED_SUM, {
            "w[g1]": 8 / 17, "w[g2]": 3 / 17, "w[g3]": 6 / 17,
        })
        assert evaluate_alternative(spec, params, t, "R1") == pytest.approx(88.24, abs=0.01)

    def test_choquet_zero_pairs_equals_ws(self, flat3):
        h, t = flat3
        rng = np.random.default_rng(0)
        w = rng.dirichlet(np.ones(3))
        ch = ValueModelSpec.choquet2(h)
        ws = ValueModelSpec.weighted_sum(h)
        p_ch = ModelParameters(CHOQUET2, {
            mobius_var("g1"): w[0], mobius_var("g2"): w[1], mobius_var("g3"): w[2],
            mobius_var("g1", "g2"): 0.0, mobius_var("g1", "g3"): 0.0, mobius_var("g2", "g3"): 0.0,
        })
        p_ws = ModelParameters(WEIGHTED_SUM, {weight_var(c): w[i] for i, c in enumerate(h.leaves)})
        for a in t.alternatives:
            assert evaluate_alternative(ch, p_ch, t, a) == pytest.approx(
                evaluate_alternative(ws, p_ws, t, a), abs=1e-12)

    def test_barycenter_choquet_lombardy_g3(self, grins_hierarchy, grins_table):
        sub = CriterionHierarchy.flat(["g31", "g32", "g33"])
        spec = ValueModelSpec.choquet2(sub)
        params = ModelParameters(CHOQUET2, {
            mobius_var("g31"): 0.0918, mobius_var("g32"): 0.3540, mobius_var("g33"): 0.7306,
            mobius_var("g31", "g32"): 0.0768, mobius_var("g31", "g33"): -0.0100,
            mobius_var("g32", "g33"): -0.2432,
        })
        row = {c: grins_table.value("Lombardy", c) for c in ("g31", "g32", "g33")}
        assert evaluate(spec, params, row) == pytest.approx(0.882, abs=0.005)

    def test_ga_errors_on_unseen_value(self, flat3):
        h, t = flat3
        spec = ValueModelSpec.general_additive(h, t)
        params = random_feasible(spec, np.random.default_rng(1))
        with pytest.raises(ValidationError, match="domain"):
            evaluate(spec, params, {"g1": 55.0, "g2": 70.0, "g3": 40.0})

    def test_pl_errors_outside_range(self, flat3):
        h, t = flat3
        spec = ValueModelSpec.piecewise(h, t)
        params = random_feasible(spec, np.random.default_rng(2))
        with pytest.raises(ValidationError, match="outside"):
            evaluate(spec, params, {"g1": 500.0, "g2": 70.0, "g3": 40.0})


class TestLinearExpression:
    def test_ws_direct_expansion(self, flat3):
        h, _ = flat3
        spec = ValueModelSpec.weighted_sum(h)
        expr = spec.linear_value_expression({"g1": 90, "g2": 100, "g3": 80})
        assert expr == {"w[g1]": 90, "w[g2]": 100, "w[g3]": 80}

    def test_pl_two_point_coefficients(self, flat3):
        h, t = flat3
        spec = ValueModelSpec.piecewise(h, t, breakpoints={
            "g1": np.array([20.0, 60.0, 100.0]),
            "g2": np.array([40.0, 100.0]),
            "g3": np.array([40.0, 80.0]),
        })
        expr = spec.linear_value_expression({"g1": 30.0, "g2": 40.0, "g3": 40.0})
        # 30 sits a quarter of the way from 20 to 60
        assert expr["u[g1][0]"] == pytest.approx(0.75)
        assert expr["u[g1][1]"] == pytest.approx(0.25)

    @pytest.mark.parametrize("kind", [WEIGHTED_SUM, PIECEWISE, GENERAL_ADDITIVE, CHOQUET2])
    def test_expression_matches_evaluate(self, flat3, kind):
        h, t = flat3
        spec = [s for s in specs_for(h, t) if s.kind == kind][0]
        rng = np.random.default_rng(7)
        for _ in range(20):
            params = random_feasible(spec, rng)
            a = t.alternatives[rng.integers(len(t.alternatives))]
            expr = spec.expression_for(t, a)
            direct = evaluate_alternative(spec, params, t, a)
            via_expr = sum(c * params[v] for v, c in expr.items())
            assert via_expr == pytest.approx(direct, abs=1e-12)


class TestModelConstraints:
    def test_ws_counts(self, flat3):
        h, _ = flat3
        system = ValueModelSpec.weighted_sum(h).emit_model_constraints()
        eqs = [c for c in system.constraints if c.op == lp.EQ]
        assert len(eqs) == 1
        assert all(system.lower[weight_var(t)] == 0.0 for t in h.leaves)

    def test_ga_example_chains(self):
        h = CriterionHierarchy.flat(["g1", "g2"])
        t = PerformanceTable(["a", "b", "c"], ["g1", "g2"],
                             [[0.3, 0.7], [0.4, 0.6], [0.8, 1.0]], h)
        spec = ValueModelSpec.general_additive(h, t)
        system = spec.emit_model_constraints()
        labels = {c.label for c in system.constraints}
        assert {"anchor[g1]", "anchor[g2]", "norm"} <= labels
        assert "mono[g1][1]" in labels and "mono[g2][2]" in labels
        # anchors: u at the lowest breakpoint is zero, tops sum to one
        params = ModelParameters(GENERAL_ADDITIVE, {
            "u[g1][0]": 0.0, "u[g1][1]": 0.4118, "u[g1][2]": 0.4118,
            "u[g2][0]": 0.0, "u[g2][1]": 0.5882, "u[g2][2]": 0.5882,
        })
        params.validate(spec)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_choquet_constraint_count(self, n):
        """2 normalization-ish equalities collapse to 1 here plus n * 2^(n-1)
        monotonicity rows, verified by direct enumeration."""
        h = CriterionHierarchy.flat([f"c{i}" for i in range(n)])
        system = ValueModelSpec.choquet2(h).emit_model_constraints()
        mono = [c for c in system.constraints if c.op == lp.GE]
        assert len(mono) == n * 2 ** (n - 1)
        eqs = [c for c in system.constraints if c.op == lp.EQ]
        assert len(eqs) == 1

    def test_infeasible_params_rejected(self, flat3):
        h, _ = flat3
        spec = ValueModelSpec.weighted_sum(h)
        bad = ModelParameters(WEIGHTED_SUM, {"w[g1]": 0.9, "w[g2]": 0.9, "w[g3]": -0.8})
        with pytest.raises(ValidationError):
            bad.validate(spec)


class TestFamilyProperties:
    @pytest.mark.parametrize("kind", [WEIGHTED_SUM, PIECEWISE, GENERAL_ADDITIVE, CHOQUET2])
    def test_affinity(self, flat3, kind):
        h, t = flat3
        spec = [s for s in specs_for(h, t) if s.kind == kind][0]
        rng = np.random.default_rng(13)
        names = spec.parameter_names()
        for _ in range(40):
            p1, p2 = random_feasible(spec, rng), random_feasible(spec, rng)
            alpha = rng.uniform()
            mix = ModelParameters(kind, {
                v: alpha * p1[v] + (1 - alpha) * p2[v] for v in names
            })
            for a in t.alternatives:
                lhs = evaluate_alternative(spec, mix, t, a)
                rhs = (alpha * evaluate_alternative(spec, p1, t, a)
                       + (1 - alpha) * evaluate_alternative(spec, p2, t, a))
                assert lhs == pytest.approx(rhs, abs=1e-10)

    @pytest.mark.parametrize("kind", [WEIGHTED_SUM, PIECEWISE, GENERAL_ADDITIVE, CHOQUET2])
    def test_monotonicity(self, flat3, kind):
        h, t = flat3
        spec = [s for s in specs_for(h, t) if s.kind == kind][0]
        rng = np.random.default_rng(17)
        rows = t.values
        for _ in range(40):
            params = random_feasible(spec, rng)
            for i, j in itertools.permutations(range(len(rows)), 2):
                if np.all(rows[i] >= rows[j]):
                    ui = evaluate_alternative(spec, params, t, t.alternatives[i])
                    uj = evaluate_alternative(spec, params, t, t.alternatives[j])
                    assert ui >= uj - 1e-10

    def test_choquet_mobius_equals_capacity_form(self):
        """Pairwise-Mobius evaluation equals the sort-and-telescope Choquet
        integral computed from mu(T) = sum of Mobius masses, brute force."""
        h = CriterionHierarchy.flat(["a", "b", "c"])
        t = PerformanceTable(["x1", "x2", "x3", "x4"], ["a", "b", "c"],
                             [[0.2, 0.8, 0.5], [0.9, 0.1, 0.4], [0.3, 0.3, 0.3], [0.0, 1.0, 0.6]], h)
        spec = ValueModelSpec.choquet2(h)
        rng = np.random.default_rng(23)
        for _ in range(50):
            params = random_feasible(spec, rng)
            for alt in t.alternatives:
                row = {c: t.value(alt, c) for c in h.leaves}
                # telescope form: sort values ascending, weight increments by
                # the capacity of the upper set (ties broken by leaf index)
                order = sorted(h.leaves, key=lambda c: (row[c], h.leaves.index(c)))
                total, prev = 0.0, 0.0
                for i, c in enumerate(order):
                    upper = order[i:]
                    total += (row[c] - prev) * choquet_capacity_value(spec, params, upper)
                    prev = row[c]
                assert total == pytest.approx(
                    evaluate_alternative(spec, params, t, alt), abs=1e-10)

    def test_node_evaluation_uses_only_subtree(self, grins_hierarchy, grins_table):
        spec = ValueModelSpec.weighted_sum(grins_hierarchy)
        rng = np.random.default_rng(29)
        params = random_feasible(spec, rng)
        u_root = evaluate_alternative(spec, params, grins_table, "Veneto", "0")
        parts = [
            evaluate_alternative(spec, params, grins_table, "Veneto", m)
            for m in ("g1", "g2", "g3")
        ]
        assert u_root == pytest.approx(sum(parts), abs=1e-12)

    def test_table23_weights_veneto_g2(self, grins_hierarchy, grins_table):
        spec = ValueModelSpec.weighted_sum(grins_hierarchy)
        weights = dict(zip(
            ["w[g11]", "w[g12]", "w[g13]", "w[g21]", "w[g22]", "w[g23]",
             "w[g31]", "w[g32]", "w[g33]"],
            [0.097, 0.119, 0, 0.385, 0.047, 0.01, 0.033, 0.159, 0.149],
        ))
        params = ModelParameters(WEIGHTED_SUM, weights)
        v = evaluate_alternative(spec, params, grins_table, "Veneto", "g2")
        assert v == pytest.approx(0.288, abs=0.003)
