"""Extremes of common-neighbour counts in dense random regular graphs.

Exact enumeration oracles at tiny n, limit-theory formulas, a switch-chain
sampler, level couplings through switchings, dependent-event coefficient
estimators, and a reproducible experiment harness on top.
"""

from .coupling import (
    BipartiteMetaGraph,
    CoupleReport,
    CouplingOutcome,
    SwitchingTriple,
    apply_switching,
    complete_meta_graph,
    couple,
    couple_step,
    couple_to_h,
    count_h_switchings,
    example_meta_graph,
    good_sets,
    h_switchings,
    mean_switching_degree,
    sample_h_switching,
)
from .enumeration import (
    ExactDistribution,
    count_graphs,
    enumerate_graphs,
    exact_common_neighbour_dist,
    exact_edge_prob,
    exact_neighbourhood_prob,
    mckay_asymptotic_count,
    mckay_log_count,
)
from .events import (
    Coefficients,
    EventSystem,
    SyntheticEventSystem,
    empirical_F_vs_Fhat,
    estimate_deltas,
    estimate_phi,
    event_system_common_neighbours,
    extremal_bound,
    joint_ratio_estimate,
    overlap_dependency_graph,
)
from .experiments import ExperimentConfig, Report, run_experiment
from .graphs import (
    DegreeSequence,
    LabelledGraph,
    RegularityParams,
    common_neighbour_profile,
    common_neighbours,
    double_edge_switch,
)
from .sampling import (
    ChainConfig,
    SwitchChain,
    initial_regular_graph,
    sample_binomial_max,
    sample_conditional,
    sample_uniform,
)
from .stats import chi_square, ks_distance, ks_two_sample
from .theory import (
    binom_approx_params,
    binom_max_constants,
    gumbel_cdf,
    joint_limit_cdf,
    local_limit_prob,
    scaling_constants,
    tail_prob_asymptotic,
)

__version__ = "0.1.0"
