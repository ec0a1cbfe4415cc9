"""Optimal deception mechanisms for finite defender-user games.

A solver library for two-stage signaling games where a defender who knows
the state designs a signal distribution (generator), a utility transfer
(modulator), and initial beliefs (manipulator) against a user with a
private type.  The optimal generator is a linear program over incentive-
compatible security policies; for two-state games it coincides with the
concave closure of the defender's prior utility.
"""

from .errors import (
    DecmechError,
    DegenerateDenominator,
    DegenerateFitWarning,
    EmptyGrid,
    InconsistentSupport,
    InvalidParams,
    IoError,
    NotCredible,
    NumericalFailure,
    OffSupportSignalWarning,
    ParseError,
    PreconditionViolated,
    SpaceTooLarge,
    UnknownFigure,
    UnsupportedDimension,
    ValidationError,
    ZeroProbabilitySignal,
)
from .model import (
    BasicGame,
    BeliefProfile,
    Generator,
    Modulator,
    bayes_update,
    best_response,
    expected_posterior_belief,
    expected_posterior_utility,
    modulated_utilities,
    prior_utility,
)
from .policies import (
    ICViolation,
    PolicySpace,
    SecurityPolicy,
    check_ic,
    enforceable_policies,
    enumerate_policies,
)
from .lp import (
    LinearProgram,
    LPSolution,
    SolveReport,
    design_capacity_bounds,
    joint_belief_lp,
    optimal_generator,
    solve_lp,
)
from .geometry import (
    Alignment,
    AlignmentReport,
    BeliefPartition,
    Manageability,
    ManipulationResult,
    PWLFunction,
    SamplePartitionResult,
    belief_partition,
    chi_bound,
    classify_alignment,
    concave_closure,
    concavify,
    identifiable_region,
    manageability,
    max_trust_margin,
    optimal_manipulation,
    prior_utility_pwl,
    region_measure,
    sample_partition,
    trust_margin,
)
from .design import (
    EquivalenceReport,
    GMMDesign,
    best_covert_report,
    covert_design,
    design_gmm,
    design_modulator,
    verify_equivalence,
)
from .insider import (
    BENCHMARK,
    HeadlineStats,
    InsiderParams,
    decision_thresholds,
    deterrence_threshold,
    figure_data,
    headline_stats,
    insider_game,
    motive_threshold,
)
from .gamespec import (
    load_game_spec,
    parse_game_spec,
    serialize_game_spec,
    write_game_spec,
)
from .tables import Table, emit_csv, format_csv, parse_csv

__version__ = "0.1.0"
