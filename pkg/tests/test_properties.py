import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dorkit.core import BlankCard, CriterionHierarchy, PerformanceTable, PreferenceStructure, dominates
from dorkit.regression import CASE1, CASE2, CASE3, CASE4, classify_outcome
from dorkit.scaling import dcm_values

cards = st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=8)


@given(cards)
def test_dcm_matches_prefix_sums(es):
    prefs = PreferenceStructure(
        "0", [[f"x{i}"] for i in range(len(es))], [BlankCard.exact(e) for e in es],
    )
    nu = dcm_values(prefs)
    acc = 0
    for i, e in enumerate(es):
        acc += e + 1
        assert nu.nu[f"x{i}"] == acc


@given(cards)
def test_dcm_gaps_follow_cards(es):
    prefs = PreferenceStructure(
        "0", [[f"x{i}"] for i in range(len(es))], [BlankCard.exact(e) for e in es],
    )
    nu = dcm_values(prefs)
    for h in range(1, len(es)):
        assert nu.nu[f"x{h}"] - nu.nu[f"x{h-1}"] == es[h] + 1


@given(
    st.one_of(
        st.tuples(st.integers(0, 50)).map(lambda t: BlankCard.exact(t[0])),
        st.tuples(st.integers(0, 50), st.integers(0, 50)).map(
            lambda t: BlankCard.between(min(t), max(t))),
        st.integers(0, 50).map(BlankCard.at_least),
        st.integers(0, 50).map(BlankCard.at_most),
        st.just(BlankCard.unknown()),
    )
)
def test_blank_card_json_round_trip(card):
    assert BlankCard.from_json(card.to_json()) == card


matrices = st.lists(
    st.lists(st.floats(0, 1, allow_nan=False, width=32), min_size=3, max_size=3),
    min_size=2, max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_dominance_is_a_strict_partial_order(rows):
    names = [f"a{i}" for i in range(len(rows))]
    h = CriterionHierarchy.flat(["x", "y", "z"])
    t = PerformanceTable(names, ["x", "y", "z"], rows, h)
    rel = {(a, b): dominates(t, a, b, "0") for a in names for b in names}
    for a in names:
        assert not rel[(a, a)]
        for b in names:
            if rel[(a, b)]:
                assert not rel[(b, a)]
            for c in names:
                if rel[(a, b)] and rel[(b, c)]:
                    assert rel[(a, c)]


@given(st.floats(0, 10, allow_nan=False), st.floats(0, 10, allow_nan=False))
def test_classification_covers_the_plane(sigma, k):
    case = classify_outcome(sigma, k)
    assert case in (CASE1, CASE2, CASE3, CASE4)
    if sigma <= 1e-7:
        assert case in (CASE1, CASE2)
    if k <= 1e-7:
        assert case in (CASE2, CASE4)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=3, max_size=3),
    st.integers(0, 2 ** 31 - 1),
)
def test_lp_optimum_replays_through_evaluator(obj, seed):
    from dorkit import lp

    rng = np.random.default_rng(seed)
    system = lp.ConstraintSystem()
    for i in range(3):
        system.add_variable(f"x{i}", lb=0.0, ub=2.0)
    for _ in range(5):
        system.add({f"x{i}": float(rng.normal()) for i in range(3)},
                   lp.LE, float(rng.uniform(0.5, 2.0)))
    sol = lp.solve_lp(system, {f"x{i}": c for i, c in enumerate(obj)}, "min")
    if sol.optimal:
        assert not system.violations(sol.assignment)
