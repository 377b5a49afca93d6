"""Solve the two worked examples and print every intermediate object.

Run with ``python3 demos/golden_examples.py``.
"""

from pathlib import Path

import numpy as np

from canonical_moments import gram_matrix, parse_problem, solve_moments

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def show(name: str) -> None:
    S = parse_problem((DATA / name).read_text()).sequence()
    res = solve_moments(S)
    space, blocks, out = res.space, res.blocks, res.outcome
    print(f"== {name}")
    print("Gram matrix:\n", gram_matrix(S).astype(int))
    print(f"dim H = {space.dim_H}, dim H0 = {space.dim_H0}, i_s = {space.i_s}")
    for k, (A, B) in enumerate(zip(blocks.A, blocks.B), start=1):
        print(f"A{k} =\n{np.round(A.real, 6)}\nB{k} =\n{np.round(B.real, 6)}")
    print("status:", out.status.value, *out.diagnostics)
    for point, mass in res.measure.atoms():
        print(f"  atom {np.round(point, 9) + 0.0} mass {mass:.9g}")
    print(f"moment residual {res.verification.max_deviation:.1e}\n")


if __name__ == "__main__":
    np.set_printoptions(suppress=True)
    show("example1.txt")
    show("example2.txt")
