"""Erasure-resilient property testers with exact oracles and a seeded harness."""

from .core import (
    ACCEPT,
    ERASED,
    REJECT,
    BudgetExhausted,
    ConfigError,
    Domain,
    ErasedFunction,
    GenerationFailed,
    InvalidField,
    PreconditionViolated,
    QueryOracle,
    SizeLimit,
    Verdict,
    erased_fraction,
    is_erased,
    restrict_to_line,
)
from .rng import derive_seed, make_rng
from .line import (
    INF,
    LineBoundingPair,
    bdp_line_budget,
    check_line_certificate,
    convex_line_budget,
    monotone_line_budget,
    test_bdp_line,
    test_convex_line,
    test_monotone_line,
)
from .hypergrid import (
    BoundingFamily,
    bdp_hypergrid_budget,
    check_grid_certificate,
    monotone_hypergrid_budget,
    test_bdp_hypergrid,
    test_monotone_hypergrid,
)
from .transforms import (
    POTSpec,
    Poset,
    UniformTesterSpec,
    erasure_resilient_extendable,
    erasure_resilient_pot_run,
    low_degree_pot,
    poset_monotone_uniform_spec,
    pot_amplify,
    test_k_runs,
    tester_from_distance_approx,
)
from .oracles import (
    DistanceReport,
    PropertySpec,
    compute_distance,
    distance_to_bdp_line,
    distance_to_convex_line,
    distance_to_k_runs,
    distance_to_low_degree,
    distance_to_monotone_grid_exact,
    distance_to_monotone_line,
    is_restorable,
    verify_report,
)
from .adversary import (
    InstanceSpec,
    certify_distance,
    erase_binary_search_pivots,
    erase_random,
    generate_far_instance,
    generate_member_instance,
    hypercube_middle_layer,
    middle_layer_matching,
)
from .harness import (
    TESTERS,
    ExperimentConfig,
    TrialSummary,
    emit_report,
    run_experiment,
    summaries_from_json,
)
from .fileio import load_bounds, load_function, load_poset, save_bounds, save_function, save_poset

__all__ = [
    "ACCEPT",
    "ERASED",
    "INF",
    "REJECT",
    "TESTERS",
    "BoundingFamily",
    "BudgetExhausted",
    "ConfigError",
    "DistanceReport",
    "Domain",
    "ErasedFunction",
    "ExperimentConfig",
    "GenerationFailed",
    "InstanceSpec",
    "InvalidField",
    "LineBoundingPair",
    "POTSpec",
    "Poset",
    "PreconditionViolated",
    "PropertySpec",
    "QueryOracle",
    "SizeLimit",
    "TrialSummary",
    "UniformTesterSpec",
    "Verdict",
    "bdp_hypergrid_budget",
    "bdp_line_budget",
    "certify_distance",
    "check_grid_certificate",
    "check_line_certificate",
    "compute_distance",
    "convex_line_budget",
    "derive_seed",
    "distance_to_bdp_line",
    "distance_to_convex_line",
    "distance_to_k_runs",
    "distance_to_low_degree",
    "distance_to_monotone_grid_exact",
    "distance_to_monotone_line",
    "emit_report",
    "erase_binary_search_pivots",
    "erase_random",
    "erased_fraction",
    "erasure_resilient_extendable",
    "erasure_resilient_pot_run",
    "generate_far_instance",
    "generate_member_instance",
    "hypercube_middle_layer",
    "is_erased",
    "is_restorable",
    "load_bounds",
    "load_function",
    "load_poset",
    "low_degree_pot",
    "make_rng",
    "middle_layer_matching",
    "monotone_hypergrid_budget",
    "monotone_line_budget",
    "poset_monotone_uniform_spec",
    "pot_amplify",
    "restrict_to_line",
    "run_experiment",
    "save_bounds",
    "save_function",
    "save_poset",
    "summaries_from_json",
    "test_bdp_hypergrid",
    "test_bdp_line",
    "test_convex_line",
    "test_k_runs",
    "test_monotone_hypergrid",
    "test_monotone_line",
    "tester_from_distance_approx",
    "verify_report",
]

__version__ = "0.1.0"
