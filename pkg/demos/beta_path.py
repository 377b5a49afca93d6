"""An index-two instance that only the ``c = beta g`` family solves.

Eight atoms on ``K_3``; the second coordinate of the last atom is tuned by
root finding until the commutator of the B blocks vanishes, which makes
all four coordinate branches of the solver inconsistent.
"""

import numpy as np
from scipy.optimize import brentq

from canonical_moments import (
    AtomicMeasure,
    MomentSequence,
    build_space,
    operator_blocks,
    solve_canonical,
    triangular,
    verify_solution,
)
from canonical_moments.spectral import extract_measure, joint_diagonalize


def instance() -> MomentSequence:
    K = triangular(2, 3)
    rng = np.random.default_rng(7)
    base, w = rng.uniform(-1, 1, (8, 2)), rng.uniform(0.5, 1.5, 8)

    def moments(t):
        p = base.copy()
        p[7, 1] = t
        return MomentSequence.from_measure(AtomicMeasure(p, w), K)

    def off_diagonal(t):
        S = moments(t)
        b = operator_blocks(build_space(S), S)
        return (b.B[1] @ b.B[0].T - b.B[0] @ b.B[1].T)[0, 1].real

    return moments(brentq(off_diagonal, -0.45, -0.40, xtol=1e-16))


if __name__ == "__main__":
    S = instance()
    space = build_space(S)
    out = solve_canonical(space, operator_blocks(space, S))
    print(f"i_s = {space.i_s}")
    print("\n".join(out.trace))
    print("status:", out.status.value, *out.diagnostics)
    mu = extract_measure(joint_diagonalize(out.extensions), space.unit_coordinates())
    print(f"{len(mu)} atoms, moment residual {verify_solution(mu, S).max_deviation:.1e}")
