import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canonical_moments import MomentSequence, build_space, operator_blocks, triangular
from canonical_moments.hilbert import OperatorBlocks
from canonical_moments.solver import (
    Status,
    commutation_residuals,
    necessary_block_checks,
    normalize_commutator,
    quadratic_root,
    solve_canonical,
    solve_flat,
    solve_is1,
    solve_is2,
)

from conftest import beta_path_instance, random_measure

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def blocks_of(S):
    space = build_space(S)
    return space, operator_blocks(space, S)


def make_blocks(A1, A2, B1, B2):
    c = lambda m: np.atleast_2d(np.asarray(m, dtype=complex))
    return OperatorBlocks([c(A1), c(A2)], [c(B1), c(B2)], [])


def perturbed_instance(seed=0, delta=0.3):
    """Three atoms on K_2 with s_(4,0) raised: i_s = 1 and no solution."""
    mu = random_measure(np.random.default_rng(seed), atoms=3)
    S = MomentSequence.from_measure(mu, triangular(2, 2))
    values = dict(S.values)
    values[(4, 0)] += delta
    return MomentSequence(S.K, values)


def rotated_parts(x):
    a, b, d, f, c1, c2, g1, g2 = x
    return a, b, d, f, c1 + 1j * c2, g1 + 1j * g2


# --------------------------------------------------------------------------
# necessary checks and residuals


@pytest.mark.parametrize("fixture", ["example1", "example2"])
def test_examples_pass_block_checks(fixture, request):
    _, b = blocks_of(request.getfixturevalue(fixture))
    assert necessary_block_checks(b)
    zero = np.zeros((b.i_s, b.i_s))
    assert commutation_residuals(b, zero, zero) == pytest.approx((0, 0, 0), abs=1e-14)


def test_trace_violation_detected():
    b = make_blocks(np.zeros((3, 3)), np.zeros((3, 3)), [[1, 0, 0]], [[1j, 0, 0]])
    assert not necessary_block_checks(b)


def test_residuals_reduce_to_commutator_when_flat():
    A1 = np.diag([1.0, 2.0])
    A2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = OperatorBlocks([A1, A2], [np.zeros((0, 2)), np.zeros((0, 2))], [])
    e = np.zeros((0, 0))
    r16, r18, r20 = commutation_residuals(b, e, e)
    assert r16 == pytest.approx(np.linalg.norm(A1 @ A2 - A2 @ A1))
    assert r18 == r20 == 0


def test_residuals_dimension_mismatch(example1):
    _, b = blocks_of(example1)
    with pytest.raises(ValueError):
        commutation_residuals(b, np.zeros((2, 2)), np.zeros((2, 2)))


# --------------------------------------------------------------------------
# i_s = 0


def test_flat_three_atoms():
    mu = random_measure(np.random.default_rng(5), atoms=3)
    space, b = blocks_of(MomentSequence.from_measure(mu, triangular(2, 2)))
    assert space.i_s == 0
    out = solve_flat(b)
    assert out.status is Status.SOLVED
    assert out.residuals[0] < 1e-9


def test_flat_single_atom():
    from canonical_moments import AtomicMeasure

    S = MomentSequence.from_measure(AtomicMeasure([[0.25, -0.75]], [3.0]), triangular(2, 2))
    _, b = blocks_of(S)
    out = solve_flat(b)
    assert out.solved
    np.testing.assert_allclose([R[0, 0].real for R in out.extensions], [0.25, -0.75], atol=1e-14)


def test_flat_non_commuting():
    b = OperatorBlocks([SIGMA_X, SIGMA_Y], [np.zeros((0, 2))] * 2, [])
    out = solve_flat(b)
    assert out.status is Status.NO_SOLUTION
    assert "do not commute" in out.diagnostics[0]


def test_flat_rejects_nonzero_index(example1):
    _, b = blocks_of(example1)
    with pytest.raises(ValueError):
        solve_flat(b)


# --------------------------------------------------------------------------
# i_s = 1


def test_is1_example1_zero_corners(example1):
    _, b = blocks_of(example1)
    out = solve_is1(b)
    assert out.solved
    assert abs(out.corners.C1[0, 0]) < 1e-12 and abs(out.corners.C2[0, 0]) < 1e-12


def test_is1_homogeneous_free_unknowns():
    A = np.diag([1.0, -1.0])
    b = make_blocks(A, np.zeros((2, 2)), [[0, 0]], [[0, 0]])
    out = solve_is1(b)
    assert out.solved
    assert "free parameters 2" in out.trace[-1]
    np.testing.assert_allclose([out.corners.C1[0, 0], out.corners.C2[0, 0]], 0)


def test_is1_inconsistent_linear_system():
    # B_1 = 0, B_2 = (1, 0): c_1 B_2^* must equal A_1 B_2^* = (1, 1)^T
    b = make_blocks([[1.0, 1.0], [1.0, 0.0]], np.zeros((2, 2)), [[0, 0]], [[1, 0]])
    out = solve_is1(b)
    assert out.status is Status.NO_SOLUTION
    assert "inconsistent" in out.trace[-1]


@pytest.mark.parametrize("seed", range(5))
def test_is1_perturbed_instance_unsolvable(seed):
    S = perturbed_instance(seed)
    space, b = blocks_of(S)
    assert space.i_s == 1
    out = solve_canonical(space, b)
    assert out.status is Status.NO_SOLUTION
    # independent least squares on the real 2-unknown system
    A1, A2 = b.A
    B1, B2 = b.B
    M = np.column_stack([B2.conj().T.ravel(), -B1.conj().T.ravel()])
    M = np.vstack([M.real, M.imag])
    rhs = (A1 @ B2.conj().T - A2 @ B1.conj().T).ravel()
    rhs = np.concatenate([rhs.real, rhs.imag])
    x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    assert np.linalg.norm(M @ x - rhs) > 1e-4


# --------------------------------------------------------------------------
# commutator normal form


def test_normalize_example2(example2):
    _, b = blocks_of(example2)
    U, r = normalize_commutator(b)
    assert r == 0
    np.testing.assert_array_equal(U, np.eye(2))


@pytest.mark.parametrize(
    "B2, r_expected",
    [
        (np.diag([0.5j, -0.5j]), 1.0),
        (np.array([[0, 1], [0, 0]], dtype=complex), 1.0),
    ],
)
def test_normalize_reproduces_commutator(B2, r_expected):
    b = make_blocks(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), B2)
    U, r = normalize_commutator(b)
    D = B2 - B2.conj().T
    assert r == pytest.approx(r_expected)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(U @ np.diag([1j * r, -1j * r]) @ U.conj().T, D, atol=1e-10)


def test_normalize_diagonal_form_keeps_identity():
    b = make_blocks(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), np.diag([0.5j, -0.5j]))
    U, _ = normalize_commutator(b)
    np.testing.assert_allclose(U, np.eye(2), atol=1e-12)


def test_normalize_rotation_generator():
    b = make_blocks(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), [[0, 1], [0, 0]])
    U, _ = normalize_commutator(b)
    # columns proportional to (1, i)/sqrt 2 and (1, -i)/sqrt 2
    for col, v in zip(U.T, [np.array([1, 1j]), np.array([1, -1j])]):
        assert abs(np.vdot(v / np.sqrt(2), col)) == pytest.approx(1.0)


def test_normalize_trace_violation():
    b = make_blocks(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), np.diag([0.5j, 0.5j]))
    with pytest.raises(ValueError, match="trace"):
        normalize_commutator(b)


# --------------------------------------------------------------------------
# i_s = 2


def check_is2_solution(out, b):
    assert out.solved
    a, bb, d, f, c, g = rotated_parts([out.corners.params[k] for k in ("a", "b", "d", "f", "c'", "c''", "g'", "g''")])
    r = out.corners.r
    assert c.imag * g.real - c.real * g.imag == pytest.approx(r / 2, abs=1e-8)
    assert abs(c * (f - d) + g * (a - bb)) < 1e-8
    if r > 1e-8:
        assert abs(a - bb) < 1e-8 and abs(f - d) < 1e-8
    U = out.corners.U
    rot1 = np.array([[a, c], [np.conj(c), bb]])
    rot2 = np.array([[d, g], [np.conj(g), f]])
    np.testing.assert_allclose(U @ rot1 @ U.conj().T, out.corners.C1, atol=1e-9)
    np.testing.assert_allclose(U @ rot2 @ U.conj().T, out.corners.C2, atol=1e-9)
    # un-rotated equations
    assert max(commutation_residuals(b, out.corners.C1, out.corners.C2)) < 1e-8
    for R in out.extensions:
        np.testing.assert_allclose(R, R.conj().T, atol=1e-10)
    R1, R2 = out.extensions
    assert np.linalg.norm(R1 @ R2 - R2 @ R1) < 1e-8
    for R, A, B in zip(out.extensions, b.A, b.B):
        d1 = A.shape[0]
        assert np.array_equal(R[:d1, :d1], A)
        assert np.array_equal(R[d1:, :d1], B)


def test_is2_example2(example2):
    _, b = blocks_of(example2)
    out = solve_is2(b)
    check_is2_solution(out, b)
    assert out.diagnostics == ["branch: g = 0, c = 0"]
    np.testing.assert_allclose(out.corners.C1, 0, atol=1e-12)
    np.testing.assert_allclose(out.corners.C2, 0, atol=1e-12)


def test_is2_homogeneous_linear_part():
    # A = 0 gives a zero right-hand side; r = 1 comes from B alone
    b = make_blocks(np.zeros((1, 1)), np.zeros((1, 1)), [[1], [0]], [[0], [1j]])
    assert necessary_block_checks(b)
    out = solve_is2(b)
    assert out.corners.r == pytest.approx(1.0)
    check_is2_solution(out, b)


def test_is2_forced_diagonal_corners_unsolvable():
    rng = np.random.default_rng(2)
    B1, B2 = rng.normal(size=(2, 5)), rng.normal(size=(2, 5))
    # scalar A_k make C_k = a_k I the only solution of the linear part
    b = make_blocks(0.7 * np.eye(5), -0.4 * np.eye(5), B1, B2)
    U, r = normalize_commutator(b)
    assert r > 0.1
    out = solve_is2(b)
    assert out.status is Status.NO_SOLUTION


@pytest.mark.parametrize("seed", range(5))
def test_is2_case_r_nonzero_oracle(seed):
    mu = random_measure(np.random.default_rng(seed), atoms=3)
    space, b = blocks_of(MomentSequence.from_measure(mu, triangular(2, 1)))
    assert space.i_s == 2
    out = solve_canonical(space, b)
    assert out.corners.r > 0
    check_is2_solution(out, b)


def test_is2_beta_path():
    S = beta_path_instance()
    space, b = blocks_of(S)
    assert space.i_s == 2
    out = solve_canonical(space, b)
    check_is2_solution(out, b)
    assert out.corners.r == 0
    assert out.corners.beta is not None
    assert any(t.startswith("beta path: candidate roots") for t in out.trace)
    for label in ("g = 0, c = 0", "g = 0, f = d", "c = 0, g = 0", "c = 0, a = b"):
        assert f"{label}: linear system inconsistent" in out.trace
    p = out.corners.params
    assert p["c'"] == pytest.approx(out.corners.beta * p["g'"], abs=1e-9)


def test_solve_canonical_undecided_for_index_three():
    mu = random_measure(np.random.default_rng(1), atoms=6)
    space, b = blocks_of(MomentSequence.from_measure(mu, triangular(2, 2)))
    assert space.i_s == 3
    out = solve_canonical(space, b)
    assert out.status is Status.UNDECIDED
    assert "index exceeds implemented case analysis" in out.diagnostics[0]


def test_solve_canonical_requires_triangular():
    from canonical_moments import rectangular

    mu = random_measure(np.random.default_rng(0), atoms=4)
    S = MomentSequence.from_measure(mu, rectangular(1, 1))
    space, b = blocks_of(S)
    if space.i_s == 0:
        pytest.skip("instance happened to be flat")
    with pytest.raises(ValueError):
        solve_canonical(space, b)


def test_minimum_norm_selects_zero_corners(example1, example2):
    for S in (example1, example2):
        space, b = blocks_of(S)
        out = solve_canonical(space, b)
        assert np.linalg.norm(out.corners.C1) + np.linalg.norm(out.corners.C2) < 1e-12


# --------------------------------------------------------------------------
# quadratic equations


@pytest.mark.parametrize(
    "Q, L, c, solvable",
    [
        ([[1.0]], [0.0], 1.0, False),
        ([[1.0]], [0.0], -4.0, True),
        ([[0.0]], [2.0], 3.0, True),
        ([[0.0]], [0.0], 1.0, False),
        (np.eye(2), [0, 0], 1.0, False),
        (np.eye(2), [2, 0], 0.5, True),
        (np.diag([1.0, -1.0]), [0, 0], 5.0, True),
        (np.diag([1.0, 0.0]), [0, 1.0], 7.0, True),
        (np.eye(4), np.zeros(4), 0.1, False),
        (np.diag([1, 1, 1, -1e-3]), np.zeros(4), 0.1, True),
        (-np.eye(3), np.zeros(3), -2.0, False),
    ],
)
def test_quadratic_root_decision(Q, L, c, solvable):
    z = quadratic_root(np.asarray(Q, dtype=float), np.asarray(L, dtype=float), c)
    if not solvable:
        assert z is None
    else:
        Q, L = np.asarray(Q, dtype=float), np.asarray(L, dtype=float)
        assert abs(z @ Q @ z + L @ z + c) < 1e-8


@settings(max_examples=60, deadline=None)
@given(p=st.integers(1, 5), seed=st.integers(0, 10_000))
def test_quadratic_root_random(p, seed):
    rng = np.random.default_rng(seed)
    Q = rng.normal(size=(p, p))
    Q = (Q + Q.T) / 2
    L = rng.normal(size=p)
    c = float(rng.normal())
    z = quadratic_root(Q, L, c)
    w = np.linalg.eigvalsh(Q)
    if w.min() < -1e-9 and w.max() > 1e-9:
        assert z is not None
    if z is not None:
        assert abs(z @ Q @ z + L @ z + c) < 1e-8 * (1 + abs(c))
    else:
        # definite with no crossing: the extremum has the sign of c
        sign = np.sign(w[0])
        z_star = np.linalg.solve(Q, -L / 2)
        assert sign * (z_star @ Q @ z_star + L @ z_star + c) > 0


# --------------------------------------------------------------------------
# equation forms


def _matrix_form(C1, C2, r):
    return np.linalg.norm(C1 @ C2 - C2 @ C1 - np.diag([1j * r, -1j * r])) <= 1e-10


def _complex_form(a, b, d, f, c, g, r):
    return abs(c * np.conj(g) - np.conj(c) * g - 1j * r) <= 1e-10 and abs(
        c * (f - d) + g * (a - b)
    ) <= 1e-10


def _real_form(a, b, d, f, c, g, r):
    return (
        abs(c.imag * g.real - c.real * g.imag - r / 2) <= 1e-10
        and abs(c.real * (f - d) + g.real * (a - b)) <= 1e-10
        and abs(c.imag * (f - d) + g.imag * (a - b)) <= 1e-10
    )


def random_pair(rng, kind):
    a, b, d, f = rng.normal(size=4)
    c, g = rng.normal(size=2) + 1j * rng.normal(size=2)
    r = float(rng.normal())
    if kind == "case1":
        b, f = a, d
        r = 2 * (c.imag * g.real - c.real * g.imag)
    elif kind == "case2":
        beta = float(rng.normal())
        c = beta * g
        b = a + beta * (f - d)
        r = 0.0
    elif kind == "near":
        b, f = a, d
        r = 2 * (c.imag * g.real - c.real * g.imag) + 1e-6
    return a, b, d, f, c, g, r


def test_equation_forms_equivalent():
    rng = np.random.default_rng(2024)
    kinds = ["random", "case1", "case2", "near"]
    agree = {k: 0 for k in kinds}
    for i in range(500):
        kind = kinds[i % 4]
        a, b, d, f, c, g, r = random_pair(rng, kind)
        C1 = np.array([[a, c], [np.conj(c), b]])
        C2 = np.array([[d, g], [np.conj(g), f]])
        lhs = _complex_form(a, b, d, f, c, g, r)
        assert lhs == _real_form(a, b, d, f, c, g, r)
        assert lhs == _matrix_form(C1, C2, r)
        agree[kind] += lhs
    assert agree["random"] == 0 and agree["near"] == 0
    assert agree["case1"] == agree["case2"] == 125
