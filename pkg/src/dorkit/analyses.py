"""Analysis execution shared by the CLI and the HTTP service: fit, robust
relations, and stochastic indices over a project's stored inputs."""

from __future__ import annotations

import numpy as np

from .core import ROOT_CODE, CriterionHierarchy, PerformanceTable, PreferenceStructure
from .mchp import HierarchicalPreferences, solve_mchp
from .models import ValueModelSpec
from .project import Project
from .regression import maximize_k, solve_dor
from .imprecise import solve_imprecise
from .ror import relation_matrices, space_from_imprecise, space_from_mchp, space_from_regression
from .scaling import dcm_values
from .smaa import SamplerConfig, smaa_report


class InfeasibleModel(ValueError):
    """The fit cannot discriminate alternatives (zero blank-card value)."""


def _standalone(node, hierarchy, table, kind, options):
    """A single non-root node is fit as its own model over E(node)."""
    leaves = hierarchy.subtree_leaves(node)
    sub_h = CriterionHierarchy.flat(list(leaves))
    sub_t = PerformanceTable(
        table.alternatives, list(leaves),
        np.column_stack([table.column(c) for c in leaves]), sub_h,
    )
    return sub_h, sub_t, _spec_for(kind, sub_h, sub_t, options)


def _spec_for(kind, hierarchy, table, options):
    if kind == "ws":
        return ValueModelSpec.weighted_sum(hierarchy)
    if kind == "choquet2":
        return ValueModelSpec.choquet2(hierarchy)
    if kind == "ga":
        return ValueModelSpec.general_additive(hierarchy, table)
    if kind == "pl":
        return ValueModelSpec.piecewise(hierarchy, table,
                                        segments=int(options.get("segments", 4)))
    raise ValueError(f"unknown model kind {kind!r}")


class FittedSetup:
    """Everything downstream analyses need: the fitted objective and a
    builder for the compatible space."""

    def __init__(self, kind, sigma_bar, eta, result_json, space_builder, table, nodes):
        self.kind = kind
        self.sigma_bar = sigma_bar
        self.eta = eta
        self.result_json = result_json
        self.space_builder = space_builder
        self.table = table
        self.nodes = nodes


def prepare(project: Project, options=None) -> FittedSetup:
    options = options or {}
    hierarchy = project.hierarchy()
    table = project.table()
    hp = project.preferences()
    model = project.model_json()
    kind = options.get("model", model["kind"])
    eta_cap = float(options.get("eta_cap", 1.0))

    if len(hp.per_node) == 1:
        node, prefs = next(iter(hp.per_node.items()))
        if node == ROOT_CODE:
            fit_h, fit_t = hierarchy, table
            spec = _spec_for(kind, hierarchy, table, model["options"] | options)
        else:
            fit_h, fit_t, spec = _standalone(node, hierarchy, table, kind,
                                             model["options"] | options)
        flat = PreferenceStructure(ROOT_CODE, prefs.levels, prefs.blank_cards,
                                   options.get("scale", prefs.scale), prefs.intensity)
        if flat.intensity != "cardinal":
            from .regression import solve_difference_based, solve_ratio_based

            if not flat.all_exact:
                raise ValueError("ordinal card readings need exact counts")
            solver = (solve_difference_based if flat.intensity == "difference_ordinal"
                      else solve_ratio_based)
            res = solver(flat, spec, fit_t)
            result = {
                "model": kind,
                "intensity": flat.intensity,
                "sigma_bar": res.sigma_bar,
                "gamma": res.gamma,
                "gaps": res.gaps,
                "ratios": res.ratios,
                "adjusted": res.adjusted,
                "params": res.params.to_json(),
            }

            def no_space(eta):
                raise ValueError(
                    "robust and stochastic analyses need cardinal intensity")

            return FittedSetup(kind, res.sigma_bar, 0.0, result, no_space, fit_t, [node])
        if flat.all_exact:
            nu = dcm_values(flat)
            stage1 = solve_dor(flat, spec, nu, fit_t)
            stage2 = maximize_k(flat, spec, nu, fit_t, stage1.sigma_bar, eta_cap=eta_cap)
            result = stage2.to_json()
            result["stage1_sigma_bar"] = stage1.sigma_bar
            builder = lambda eta: space_from_regression(
                flat, spec, nu, fit_t, stage1.sigma_bar, eta)
            return FittedSetup(kind, stage1.sigma_bar, stage2.eta_used, result,
                               builder, fit_t, [node])
        res = solve_imprecise(flat, spec, fit_t, eta_cap=eta_cap)
        builder = lambda eta: space_from_imprecise(flat, spec, fit_t, res.sigma_bar, eta)
        return FittedSetup(kind, res.sigma_bar, res.eta_used, res.to_json(),
                           builder, fit_t, [node])

    spec = _spec_for(kind, hierarchy, table, model["options"] | options)
    res = solve_mchp(hp, spec, table, eta_cap=eta_cap)
    builder = lambda eta: space_from_mchp(hp, spec, table, res.sigma_bar, eta)
    return FittedSetup(kind, res.sigma_bar, res.eta_used, res.to_json(),
                       builder, table, list(hp.per_node))


def run_fit(project: Project, options=None):
    setup = prepare(project, options)
    result = dict(setup.result_json)
    result["model"] = setup.kind
    case = result.get("case")
    if case in ("Case2", "Case4"):
        raise InfeasibleModel(
            f"fit classified as {case}: the blank-card value is zero "
            f"(sigma_bar={setup.sigma_bar:.6g})"
        )
    return result, {}


def _space_for(setup: FittedSetup, options):
    eta = float(options.get("eta", setup.eta))
    return setup.space_builder(eta)


def _analysis_node(setup: FittedSetup, options):
    node = options.get("node")
    if node is None:
        return ROOT_CODE
    if len(setup.nodes) == 1 and setup.nodes[0] != ROOT_CODE:
        # standalone sub-model: only its own subtree exists
        return ROOT_CODE if node == setup.nodes[0] else node
    return node


def run_ror(project: Project, options=None):
    options = options or {}
    setup = prepare(project, options)
    space = _space_for(setup, options)
    node = _analysis_node(setup, options)
    matrices = relation_matrices(space, node)
    files = {
        "necessary.csv": matrices.to_csv("necessary"),
        "possible.csv": matrices.to_csv("possible"),
    }
    return matrices.to_json(), files


def run_smaa(project: Project, options=None):
    options = options or {}
    setup = prepare(project, options)
    space = _space_for(setup, options)
    config = SamplerConfig(
        sample_count=int(options.get("samples", 100_000)),
        seed=int(options.get("seed", 0)),
        burn_in=int(options.get("burn_in", 1000)),
        thinning=int(options.get("thinning", 5)),
        eps_floor=float(options.get("epsilon", 1e-6)),
    )
    from .smaa import har_sample

    samples = har_sample(space, config)
    nodes = options.get("nodes")
    if nodes is None:
        if options.get("node") is None and len(setup.nodes) > 1:
            nodes = setup.nodes  # hierarchical run: report every assessed node
        else:
            nodes = [_analysis_node(setup, options)]
    out = {}
    files = {}
    for node in nodes:
        report = smaa_report(space, config, node, samples=samples)
        out[node] = report.to_json()
        files[f"rai_{node}.csv"] = report.rai_csv()
        files[f"pwi_{node}.csv"] = report.pwi_csv()
    return {"seed": config.seed, "samples": config.sample_count, "nodes": out}, files


RUNNERS = {"fit": run_fit, "ror": run_ror, "smaa": run_smaa}


def execute(project: Project, kind, options=None):
    if kind not in RUNNERS:
        raise ValueError(f"unknown analysis kind {kind!r}")
    return RUNNERS[kind](project, options or {})
