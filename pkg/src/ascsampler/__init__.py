"""Samplers, exact probabilities, and mixing diagnostics for abstract
simplicial complexes on a fixed vertex set."""

from .core import (
    LabeledComplex,
    LevelLayout,
    NodeSets,
    build_layout,
    complete_state,
    empty_state,
    format_state,
    level_census,
    mask_string,
    parse_state,
    prune_cofaces,
    read_state,
    unconstrained_sets,
    validate_closure,
    write_state,
)
from .diagnostics import (
    AutocorrReport,
    DisplacementSeries,
    autocorr_report,
    autocovariance,
    displacement_series,
    gcm_cutoff,
    multiplicity_residuals,
    unique_states_curve,
)
from .enumeration import (
    EnumerationResult,
    brute_force_labeled,
    enumerate_labeled,
    exact_distribution,
    iter_labeled,
    uniformity_test,
)
from .isomorphism import GeometricKey, bin_samples, canonical_key, orbit_masks
from .samplers import (
    KahleParams,
    ProbabilityTrace,
    balanced_level_prob,
    balanced_log_prob_labeled,
    balanced_min_prob_estimate,
    balanced_prob_exact,
    balanced_sample,
    balanced_trace_of,
    geometric_prob,
    geometric_prob_exact,
    kahle_log_prob,
    kahle_min_prob,
    kahle_min_prob_exact,
    kahle_sample,
)
from .walk import (
    Proposal,
    WalkConfig,
    WalkTransition,
    central_start,
    corner_start,
    metropolis_step,
    mixture_step,
    propose,
)

__version__ = "0.1.0"
