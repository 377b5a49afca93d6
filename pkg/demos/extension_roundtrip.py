"""Canonical solutions versus dimensionally stable extensions.

A canonical solution is mapped to moments over ``Ext K + Ext K``; the
extension is flat, and solving it returns the same measure.  Two distinct
solutions of one problem give distinct extensions.
"""

import numpy as np

from canonical_moments import (
    AtomicMeasure,
    MomentSequence,
    build_space,
    canonical_from_extension,
    check_bijection,
    extend_via_solution,
    solve_moments,
    triangular,
)

if __name__ == "__main__":
    mu = AtomicMeasure([[-0.5, 0.2], [0.7, 0.6], [0.1, -0.8]], [1.0, 2.0, 0.5])
    S = MomentSequence.from_measure(mu, triangular(2, 1))
    sol = solve_moments(S).measure
    ext = extend_via_solution(sol, S.K, S)
    print(f"|K| = {len(S.K)}, |Ext K| = {len(ext.extK)}, i_s of extension = "
          f"{build_space(ext.sequence, 1e-8).i_s}")
    back = canonical_from_extension(ext)
    print("recovered atoms:")
    for point, mass in back.atoms():
        print(f"  {np.round(point, 9)} mass {mass:.9g}")

    # the generating measure has three atoms too, so it is a second canonical solution
    report = check_bijection(S, [sol, mu])
    print("stable:", report.stable, "injective:", report.injective)
    for i, j, witness in report.witnesses:
        print(f"solutions {i} and {j}: {'identical' if witness is None else f'differ at moment {witness}'}")
