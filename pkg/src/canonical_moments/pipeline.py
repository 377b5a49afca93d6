"""The full check, build, solve, extract and verify chain for one problem."""

from __future__ import annotations

from dataclasses import dataclass

from . import tolerances
from .hilbert import AssociatedSpace, OperatorBlocks, build_space, operator_blocks
from .moments import AtomicMeasure, MomentSequence, NecessaryReport, necessary_conditions
from .solver import SolveOutcome, solve_canonical
from .spectral import VerificationReport, extract_measure, joint_diagonalize, verify_solution


@dataclass
class PipelineResult:
    moments: MomentSequence
    necessary: NecessaryReport
    space: AssociatedSpace | None = None
    blocks: OperatorBlocks | None = None
    outcome: SolveOutcome | None = None
    measure: AtomicMeasure | None = None
    verification: VerificationReport | None = None


def solve_moments(
    S: MomentSequence,
    tol_rank: float = tolerances.RANK,
    tol_solve: float = tolerances.SOLVE,
    verify_tol: float = 1e-8,
) -> PipelineResult:
    """Run every stage; stops early when the necessary conditions fail."""
    result = PipelineResult(S, necessary_conditions(S, tol_rank))
    if not result.necessary.ok:
        return result
    result.space = build_space(S, tol_rank)
    result.blocks = operator_blocks(result.space, S)
    result.outcome = solve_canonical(result.space, result.blocks, tol_solve)
    if result.outcome.solved:
        spectrum = joint_diagonalize(result.outcome.extensions, tol_solve)
        result.measure = extract_measure(spectrum, result.space.unit_coordinates())
        result.verification = verify_solution(result.measure, S, verify_tol)
    return result
