"""The finite-dimensional Hilbert space attached to a moment sequence.

Classes ``[t^{k_j}]`` are represented by coefficient vectors over the
monomials of ``K``; the inner product of two coefficient vectors ``u, w`` is
``w^H Gamma u``.  An orthonormal basis ``g_0, g_1, ...`` is stored as the rows
of ``basis_coeffs``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .moments import MomentSequence, gram_matrix, shifted_gram
from .multiindex import AdmissibleSet, omega

__all__ = [
    "ConditionViolation",
    "AssociatedSpace",
    "OperatorBlocks",
    "build_space",
    "operator_blocks",
    "multiplication_matrix",
    "is_dimensionally_stable",
    "is_completely_selfadjoint",
]


class ConditionViolation(ValueError):
    """The moments violate a necessary solvability condition."""


@dataclass(frozen=True)
class AssociatedSpace:
    K: AdmissibleSet
    gram: np.ndarray
    basis_coeffs: np.ndarray
    pivot_indices: tuple[int, ...]
    omega0: tuple[int, ...]
    dim_H0: int

    @property
    def dim_H(self) -> int:
        return self.basis_coeffs.shape[0]

    @property
    def i_s(self) -> int:
        return self.dim_H - self.dim_H0

    @property
    def d(self) -> int:
        return self.dim_H0 - 1

    def coordinates(self, coeffs: np.ndarray) -> np.ndarray:
        """Basis coordinates ``(x, g_i)`` of the class with ``coeffs``."""
        return self.basis_coeffs.conj() @ self.gram @ np.asarray(coeffs)

    def unit_coordinates(self) -> np.ndarray:
        """Coordinates of ``[1]``, the class of the constant polynomial."""
        e = np.zeros(len(self.K))
        e[0] = 1.0
        return self.coordinates(e)


def _gram_schmidt(gram, order, tol):
    """Gram-Schmidt in the ``gram`` inner product, skipping dependent vectors.

    Two projection passes per vector keep the basis orthonormal when
    ``gram`` is ill-conditioned.
    """
    size = gram.shape[0]
    basis: list[np.ndarray] = []
    pivots: list[int] = []
    for j in order:
        v = np.zeros(size)
        v[j] = 1.0
        for _ in range(2):
            for q in basis:
                v = v - (q @ gram @ v) * q
        res = float(v @ gram @ v)
        # rounding bound of the quadratic form: large projection
        # coefficients make residuals near zero unresolvable
        noise = 64 * np.finfo(float).eps * float(np.abs(v) @ np.abs(gram) @ np.abs(v))
        scale = tol * (1.0 + gram[j, j]) + noise
        if res < -scale:
            raise ConditionViolation(
                f"negative Gram-Schmidt residual {res:.3e} at index {j}: Gamma is not PSD"
            )
        if res <= scale:
            continue
        basis.append(v / np.sqrt(res))
        pivots.append(j)
    return np.array(basis).reshape(len(basis), size), pivots


def build_space(S: MomentSequence, tol: float = tolerances.RANK) -> AssociatedSpace:
    """Orthonormalize the monomial classes of ``S``.

    Indices of ``Omega_0`` are processed first (in increasing order) and the
    rest afterwards, so the leading ``dim_H0`` basis vectors span ``H_0``.
    For triangular truncations this is plain index order.
    """
    gamma = gram_matrix(S)
    lam = np.linalg.eigvalsh(gamma)
    norm = float(np.max(np.abs(lam)))
    if lam[0] < -tolerances.PSD * (1.0 + norm):
        raise ConditionViolation(
            f"Gamma is not positive semidefinite (min eigenvalue {lam[0]:.3e})"
        )
    om0 = omega(S.K, 0)
    rest = [j for j in range(len(S.K)) if j not in set(om0)]
    coeffs, pivots = _gram_schmidt(gamma, om0 + rest, tol)
    dim_h0 = sum(1 for j in pivots if j in set(om0))
    return AssociatedSpace(S.K, gamma, coeffs, tuple(pivots), tuple(om0), dim_h0)


@dataclass(frozen=True)
class OperatorBlocks:
    """Known blocks of the multiplication operators on ``H_0``.

    ``A[k]`` is ``((M_k g_l, g_j))`` for ``j, l <= d`` and ``B[k]`` the rows
    ``j = d+1, ..., d+i_s``.  Lists are indexed by axis ``k - 1``.
    """

    A: list[np.ndarray]
    B: list[np.ndarray]
    shift_table: list[np.ndarray]

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def d1(self) -> int:
        return self.A[0].shape[0]

    @property
    def i_s(self) -> int:
        return self.B[0].shape[0]


def operator_blocks(space: AssociatedSpace, S: MomentSequence) -> OperatorBlocks:
    om0 = list(space.omega0)
    q = space.basis_coeffs
    q0 = q[: space.dim_H0][:, om0]
    if space.dim_H0 and np.any(q[: space.dim_H0][:, [j for j in range(len(S.K)) if j not in set(om0)]]):
        raise AssertionError("H_0 basis vectors leave Lin{x_j : j in Omega_0}")
    A, B, table = [], [], []
    for k in range(1, S.dimension + 1):
        # coordinates of [t^{k_j + e_k}], j in Omega_0
        shifted = q @ shifted_gram(S, k, om0)
        full = shifted @ q0.T
        A.append(full[: space.dim_H0].astype(complex))
        B.append(full[space.dim_H0 :].astype(complex))
        table.append(shifted)
    return OperatorBlocks(A, B, table)


def multiplication_matrix(space: AssociatedSpace, S: MomentSequence, l: int) -> np.ndarray | None:
    """Full matrix of ``M_l`` in the basis, or ``None`` if ``D(M_l) != H``."""
    idx = omega(S.K, l)
    sub = space.gram[np.ix_(idx, idx)]
    local, _ = _gram_schmidt(sub, range(len(idx)), tolerances.RANK)
    if local.shape[0] != space.dim_H:
        return None
    f = np.zeros((local.shape[0], len(S.K)))
    f[:, idx] = local
    # T[i, a] = (f_a, g_i); unitary since both are orthonormal bases of H
    T = space.basis_coeffs @ space.gram @ f.T
    mf = space.basis_coeffs @ shifted_gram(S, l, idx) @ local.T
    return mf @ T.conj().T


def is_dimensionally_stable(space: AssociatedSpace) -> bool:
    return space.i_s == 0


def is_completely_selfadjoint(
    space: AssociatedSpace, data: MomentSequence | OperatorBlocks, tol: float = 1e-8
) -> bool:
    """Every ``M_l`` is defined on all of ``H`` and they pairwise commute.

    ``M_l`` is symmetric, so being everywhere defined makes it self-adjoint.

    Parameters
    ----------
    space
        The associated space.
    data
        With :class:`OperatorBlocks` the test is ``i_s == 0`` plus commuting
        ``A_l``.  With the moment sequence each ``M_l`` is built on its own
        domain, which also covers spaces where ``D(M_l) = H`` although
        ``H_0 != H``.
    """
    if isinstance(data, OperatorBlocks):
        if space.i_s != 0:
            return False
        mats = data.A
    else:
        mats = [multiplication_matrix(space, data, l) for l in range(1, data.dimension + 1)]
        if any(m is None for m in mats):
            return False
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            if np.linalg.norm(comm, 2) > tol:
                return False
    return True
