"""Canonical solutions of truncated multidimensional moment problems.

Typical use::

    from canonical_moments import MomentSequence, triangular, solve_moments

    result = solve_moments(MomentSequence(triangular(2, 2), values))
    result.outcome.status, result.measure
"""

from .extension import (
    ExtendedMoments,
    ExtensionError,
    canonical_from_extension,
    check_bijection,
    extend_via_solution,
)
from .hilbert import (
    AssociatedSpace,
    ConditionViolation,
    OperatorBlocks,
    build_space,
    is_completely_selfadjoint,
    is_dimensionally_stable,
    multiplication_matrix,
    operator_blocks,
)
from .moments import (
    AtomicMeasure,
    MomentError,
    MomentSequence,
    gram_matrix,
    localized_matrices,
    moments_of_measure,
    necessary_conditions,
)
from .multiindex import (
    AdmissibleSet,
    MultiIndex,
    border,
    close_extension,
    ext_border_condition,
    is_admissible,
    minkowski_double,
    omega,
    rectangular,
    triangular,
)
from .pipeline import PipelineResult, solve_moments
from .problem import ProblemParseError, parse_problem
from .solver import (
    HermitianPair,
    SolveOutcome,
    Status,
    commutation_residuals,
    necessary_block_checks,
    normalize_commutator,
    solve_canonical,
    solve_flat,
    solve_is1,
    solve_is2,
)
from .spectral import extract_measure, joint_diagonalize, verify_solution

__version__ = "0.1.0"
