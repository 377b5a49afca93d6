import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canonical_moments.moments import (
    AtomicMeasure,
    MomentError,
    MomentSequence,
    gram_matrix,
    localized_matrices,
    moments_of_measure,
    necessary_conditions,
)
from canonical_moments.multiindex import AdmissibleSet, minkowski_double, omega, triangular

from conftest import random_measure

GAMMA_1 = np.array(
    [
        [9, -1, 0, 1, 0, 2],
        [-1, 1, 0, -1, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [1, -1, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [2, 0, 0, 0, 0, 2],
    ]
)
GAMMA_2 = np.array(
    [
        [8, 0, 0, 2, 0, 2],
        [0, 2, 0, 0, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [2, 0, 0, 2, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [2, 0, 0, 0, 0, 2],
    ]
)


def test_gram_matrices_of_examples(example1, example2):
    assert np.array_equal(gram_matrix(example1), GAMMA_1)
    assert np.array_equal(gram_matrix(example2), GAMMA_2)


def test_gram_of_single_moment():
    S = MomentSequence(AdmissibleSet(((0, 0),)), {(0, 0): 5.0})
    assert np.array_equal(gram_matrix(S), [[5.0]])


def test_localized_example1(example1):
    g, gh = localized_matrices(example1, 1)
    assert np.array_equal(g, [[9, -1, 0], [-1, 1, 0], [0, 0, 2]])
    assert np.array_equal(gh, [[1, -1, 0], [-1, 1, 0], [0, 0, 0]])


def test_localized_example2(example2):
    g, gh = localized_matrices(example2, 2)
    assert np.array_equal(g, np.diag([8, 2, 2]))
    assert np.array_equal(gh, np.diag([2, 0, 2]))


def test_localized_empty_omega():
    S = MomentSequence(AdmissibleSet(((0, 0),)), {(0, 0): 1.0})
    g, gh = localized_matrices(S, 1)
    assert g.shape == gh.shape == (0, 0)
    with pytest.raises(ValueError):
        localized_matrices(S, 3)


def test_localized_on_omega0_is_principal_block(example1):
    idx = omega(example1.K, 0)
    g, _ = localized_matrices(example1, 1)
    assert np.array_equal(g, gram_matrix(example1)[np.ix_(idx, idx)])


@pytest.mark.parametrize("fixture", ["example1", "example2"])
def test_examples_pass_necessary_conditions(fixture, request):
    report = necessary_conditions(request.getfixturevalue(fixture))
    assert report.ok
    assert all(type(v) is bool for v in report.kernel_ok.values())


def test_kernel_condition_failure():
    # s_(2,0) = 0 puts [t_1] in the kernel of Gamma_1 but s_(4,0) != 0
    K = triangular(1, 2)
    values = {(0,): 1.0, (1,): 0.0, (2,): 0.0, (3,): 0.0, (4,): 1.0}
    report = necessary_conditions(MomentSequence(K, values))
    assert report.psd_ok
    assert not report.kernel_ok[1]
    assert not report.ok


def test_not_psd_is_reported():
    K = triangular(1, 1)
    report = necessary_conditions(MomentSequence(K, {(0,): 1.0, (1,): 2.0, (2,): 1.0}))
    assert not report.psd_ok
    assert report.min_eigenvalue < 0


class TestMomentSequenceValidation:
    def values(self):
        mu = AtomicMeasure([[0.5, -0.5]], [2.0])
        return moments_of_measure(mu, minkowski_double(triangular(2, 2)))

    def test_missing_moment_named(self):
        values = self.values()
        del values[(4, 0)]
        with pytest.raises(MomentError, match=r"moment \(4,0\) required by K\+K missing"):
            MomentSequence(triangular(2, 2), values)

    def test_extra_moment(self):
        values = self.values()
        values[(5, 0)] = 1.0
        with pytest.raises(MomentError, match="not in K"):
            MomentSequence(triangular(2, 2), values)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), 1j])
    def test_non_finite_or_complex(self, bad):
        values = self.values()
        values[(1, 1)] = bad
        with pytest.raises(MomentError):
            MomentSequence(triangular(2, 2), values)

    def test_negative_mass(self):
        values = self.values()
        values[(0, 0)] = -1.0
        with pytest.raises(MomentError):
            MomentSequence(triangular(2, 2), values)


class TestAtomicMeasure:
    def test_merges_close_atoms_and_drops_zero_mass(self):
        mu = AtomicMeasure([[1, 0], [1 + 1e-10, 0], [2, 2]], [1.0, 2.0, 0.0])
        assert len(mu) == 1
        assert mu.total_mass == pytest.approx(3.0)

    def test_sorted_lexicographically(self):
        mu = AtomicMeasure([[1, 0], [-1, 5], [-1, 2]], [1, 1, 1])
        assert [p for p, _ in mu.atoms()] == [(-1, 2), (-1, 5), (1, 0)]

    def test_rejects_negative_mass(self):
        with pytest.raises(ValueError):
            AtomicMeasure([[0, 0]], [-1.0])


def test_moments_of_single_atom_at_origin():
    out = moments_of_measure(AtomicMeasure([[0, 0]], [3.0]), minkowski_double(triangular(2, 2)))
    assert out[(0, 0)] == 3.0
    assert all(v == 0 for k, v in out.items() if k != (0, 0))


def test_moments_of_symmetric_pair():
    mu = AtomicMeasure([[1, 0], [-1, 0]], [2.0, 2.0])
    out = moments_of_measure(mu, minkowski_double(triangular(2, 2)))
    assert out[(0, 0)] == 4 and out[(2, 0)] == 4 and out[(1, 0)] == 0
    assert all(out[(0, k)] == 0 for k in range(1, 5))


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(1, 3),
    atoms=st.integers(1, 6),
    r=st.integers(1, 2),
    seed=st.integers(0, 2**32 - 1),
)
def test_oracle_moments_satisfy_necessary_conditions(n, atoms, r, seed):
    mu = random_measure(np.random.default_rng(seed), n=n, atoms=atoms)
    S = MomentSequence.from_measure(mu, triangular(n, r))
    gamma = gram_matrix(S)
    assert np.array_equal(gamma, gamma.T)
    assert necessary_conditions(S).ok
