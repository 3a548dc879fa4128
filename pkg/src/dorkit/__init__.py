"""Deck-of-cards ordinal regression toolkit: value-function fitting from
card-based preference information, robust preference relations, and
stochastic acceptability analysis over flat or hierarchical criteria."""

from .core import (
    BlankCard,
    CriterionHierarchy,
    CriterionNode,
    PerformanceTable,
    PreferenceStructure,
    build_hierarchy,
    dominates,
)
from .models import ModelParameters, ValueModelSpec, evaluate, evaluate_alternative
from .regression import (
    OrdinalFitResult,
    RegressionResult,
    classify_outcome,
    maximize_k,
    solve_difference_based,
    solve_dor,
    solve_ratio_based,
)
from .imprecise import ImpreciseFitResult, blank_card_constraints, solve_imprecise
from .mchp import HierarchicalPreferences, MchpFitResult, node_values, solve_mchp
from .ror import (
    CompatibleSpace,
    PreferenceRelationMatrix,
    necessary_preference,
    possible_preference,
    relation_matrices,
    space_from_imprecise,
    space_from_mchp,
    space_from_regression,
)
from .scaling import AhpResult, DcmAssignment, MacbethResult, ahp_priorities, dcm_values, macbeth_values
from .smaa import SamplerConfig, SmaaReport, barycenter_ranking, expected_ranking, har_sample, smaa_indices, smaa_report

__version__ = "0.1.0"
