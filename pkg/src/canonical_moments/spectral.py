"""Joint spectral decomposition and extraction of the atomic measure."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .moments import AtomicMeasure, MomentSequence, minkowski_double, moments_of_measure

__all__ = [
    "JointSpectrum",
    "joint_diagonalize",
    "extract_measure",
    "VerificationReport",
    "verify_solution",
]


@dataclass
class JointSpectrum:
    """Distinct eigenvalues and spectral projections of each operator.

    ``eigenvalues[l]`` and ``projections[l]`` belong to axis ``l + 1``.
    ``blocks`` are orthonormal bases of the joint eigenspaces.
    """

    eigenvalues: list[np.ndarray]
    projections: list[list[np.ndarray]]
    blocks: list[np.ndarray]

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def _clusters(values: np.ndarray, eps: float) -> list[np.ndarray]:
    """Group sorted-order indices of ``values`` separated by gaps above ``eps``."""
    order = np.argsort(values)
    groups, current = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] > eps:
            groups.append(np.array(current))
            current = []
        current.append(b)
    groups.append(np.array(current))
    return groups


def joint_diagonalize(mats, tol: float = tolerances.SOLVE, eig_tol: float = tolerances.EIG):
    """Simultaneous eigen-decomposition of commuting Hermitian matrices.

    The first operator is diagonalized; each of its eigenvalue clusters is
    then split by the compression of the next operator, and so on.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ValueError("need at least one operator")
    size = mats[0].shape[0]
    for m in mats:
        if m.shape != (size, size):
            raise ValueError("operators of different shape")
        if np.linalg.norm(m - m.conj().T) > tol * (1 + np.linalg.norm(m)):
            raise ValueError("operator is not Hermitian")
    for a, b in itertools.combinations(range(len(mats)), 2):
        comm = np.linalg.norm(mats[a] @ mats[b] - mats[b] @ mats[a])
        if comm > tol * (1 + np.linalg.norm(mats[a]) * np.linalg.norm(mats[b])):
            raise ValueError(f"operators {a + 1} and {b + 1} do not commute ({comm:.3e})")
    eps = [eig_tol * (1 + np.linalg.norm(m, 2)) for m in mats]

    def split(V, level):
        if level == len(mats) or V.shape[1] == 0:
            return [V]
        sub = V.conj().T @ mats[level] @ V
        w, X = np.linalg.eigh((sub + sub.conj().T) / 2)
        out = []
        for idx in _clusters(w, eps[level]):
            out.extend(split(V @ X[:, idx], level + 1))
        return out

    blocks = split(np.eye(size, dtype=complex), 0) if size else []
    eigenvalues, projections = [], []
    for l, m in enumerate(mats):
        vals = np.array([np.trace(G.conj().T @ m @ G).real / G.shape[1] for G in blocks])
        dims = np.array([G.shape[1] for G in blocks])
        lam, proj = [], []
        for idx in _clusters(vals, eps[l]) if len(vals) else []:
            lam.append(float(np.dot(vals[idx], dims[idx]) / dims[idx].sum()))
            proj.append(sum(blocks[i] @ blocks[i].conj().T for i in idx))
        eigenvalues.append(np.array(lam))
        projections.append(proj)
    return JointSpectrum(eigenvalues, projections, blocks)


def extract_measure(spectrum: JointSpectrum, e0: np.ndarray) -> AtomicMeasure:
    """Atoms at eigenvalue tuples, masses ``(P_{1;j_1} ... P_{n;j_n} e0, e0)``.

    ``e0`` holds the coordinates of the class of the constant ``1``.
    """
    e0 = np.asarray(e0, dtype=complex)
    s0 = float(np.vdot(e0, e0).real)
    points, masses = [], []
    ranges = [range(len(lam)) for lam in spectrum.eigenvalues]
    for combo in itertools.product(*ranges):
        v = e0
        for l in reversed(range(spectrum.n)):
            v = spectrum.projections[l][combo[l]] @ v
        mass = np.vdot(e0, v)
        if mass.real < -1e-8 * s0 or abs(mass.imag) > 1e-8 * s0:
            raise ValueError(
                f"invalid mass {mass:.3e} at {combo}: spectrum not commuting or corrupted"
            )
        if mass.real > tolerances.MASS * s0:
            points.append([spectrum.eigenvalues[l][j] for l, j in enumerate(combo)])
            masses.append(mass.real)
    return AtomicMeasure(np.array(points).reshape(len(points), spectrum.n), np.array(masses))


@dataclass
class VerificationReport:
    max_deviation: float
    threshold: float
    worst_index: tuple | None

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.threshold


def verify_solution(mu: AtomicMeasure, S: MomentSequence, tol: float = 1e-8) -> VerificationReport:
    """Compare the moments of ``mu`` with ``S`` over ``K + K``."""
    computed = moments_of_measure(mu, minkowski_double(S.K))
    where = max(computed, key=lambda k: abs(computed[k] - S.values[k]))
    worst = abs(computed[where] - S.values[where])
    scale = 1.0 + max(abs(v) for v in S.values.values())
    return VerificationReport(worst, tol * scale, tuple(where))
