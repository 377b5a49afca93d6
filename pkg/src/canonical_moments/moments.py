"""Moment sequences, their Gram matrices and atomic measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import tolerances
from .multiindex import (
    AdmissibleSet,
    MultiIndex,
    minkowski_double,
    omega,
    sorted_indices,
    unit,
)

__all__ = [
    "MomentSequence",
    "AtomicMeasure",
    "NecessaryReport",
    "gram_matrix",
    "localized_matrices",
    "shifted_gram",
    "necessary_conditions",
    "moments_of_measure",
]


class MomentError(ValueError):
    """Malformed moment data."""


@dataclass(frozen=True)
class MomentSequence:
    """Real moments ``s_k`` indexed by ``K + K``."""

    K: AdmissibleSet
    values: Mapping[MultiIndex, float]

    def __post_init__(self):
        clean = {}
        for k, v in self.values.items():
            if isinstance(v, complex) or np.iscomplexobj(v):
                raise MomentError(f"moment {tuple(k)} is complex; only real moments are accepted")
            v = float(v)
            if not math.isfinite(v):
                raise MomentError(f"moment {tuple(k)} is not finite")
            clean[MultiIndex(k)] = v
        domain = minkowski_double(self.K)
        missing = domain - clean.keys()
        if missing:
            k = sorted_indices(missing)[0]
            raise MomentError(f"moment {_fmt(k)} required by K+K missing")
        extra = clean.keys() - domain
        if extra:
            k = sorted_indices(extra)[0]
            raise MomentError(f"moment {_fmt(k)} is not in K+K")
        if clean[MultiIndex((0,) * self.K.dimension)] < 0:
            raise MomentError("s_0 must be non-negative")
        object.__setattr__(self, "values", clean)

    @property
    def dimension(self) -> int:
        return self.K.dimension

    @property
    def mass(self) -> float:
        return self.values[MultiIndex((0,) * self.dimension)]

    def __getitem__(self, k: Sequence[int]) -> float:
        return self.values[tuple(k)]

    @classmethod
    def from_measure(cls, mu: "AtomicMeasure", K: AdmissibleSet) -> "MomentSequence":
        return cls(K, moments_of_measure(mu, minkowski_double(K)))


def _fmt(k) -> str:
    return "(" + ",".join(str(c) for c in k) + ")"


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms in ``R^n`` with positive masses.

    Atoms closer than ``tolerances.ATOM`` are merged and exact zero masses
    dropped on construction; atoms are kept in lexicographic order.
    """

    points: np.ndarray
    masses: np.ndarray
    merge_tol: float = field(default=tolerances.ATOM, repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[-1] if pts.ndim == 2 else 0)
        if len(pts) != len(w):
            raise ValueError("points and masses differ in length")
        if np.any(w < 0):
            raise ValueError("atom masses must be non-negative")
        keep = w > 0
        pts, w = pts[keep], w[keep]
        merged_p: list[np.ndarray] = []
        merged_w: list[float] = []
        for p, m in zip(pts, w):
            for i, q in enumerate(merged_p):
                if np.max(np.abs(p - q)) <= self.merge_tol:
                    merged_w[i] += m
                    break
            else:
                merged_p.append(p)
                merged_w.append(m)
        n = pts.shape[1]
        pts = np.array(merged_p, dtype=float).reshape(-1, n)
        w = np.array(merged_w, dtype=float)
        order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
        object.__setattr__(self, "points", pts[order])
        object.__setattr__(self, "masses", w[order])

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return len(self.masses)

    def atoms(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(p.tolist()), float(m)) for p, m in zip(self.points, self.masses)]


def moments_of_measure(mu: AtomicMeasure, indices: Iterable[Sequence[int]]) -> dict:
    """Brute-force ``sum_i m_i * a_i**k`` for every requested ``k``."""
    out = {}
    for k in indices:
        k = MultiIndex(k)
        mono = np.prod(mu.points ** np.asarray(k, dtype=float), axis=1)
        out[k] = float(np.dot(mu.masses, mono))
    return out


def _pair_matrix(S: MomentSequence, rows, cols, offset=None) -> np.ndarray:
    K = S.K
    out = np.empty((len(rows), len(cols)))
    for a, m in enumerate(rows):
        for b, j in enumerate(cols):
            k = K[j] + K[m]
            if offset is not None:
                k = k + offset
            out[a, b] = S.values[k]
    return out


def gram_matrix(S: MomentSequence) -> np.ndarray:
    """``Gamma[m, j] = s_{k_j + k_m}``; exactly symmetric."""
    idx = range(len(S.K))
    return _pair_matrix(S, idx, idx)


def localized_matrices(S: MomentSequence, l: int) -> tuple[np.ndarray, np.ndarray]:
    """``(Gamma_l, hat Gamma_l)`` on ``Omega_l`` for axis ``l >= 1``."""
    n = S.dimension
    if not 1 <= l <= n:
        raise ValueError(f"axis {l} out of range 1..{n}")
    idx = omega(S.K, l)
    e = unit(n, l)
    return _pair_matrix(S, idx, idx), _pair_matrix(S, idx, idx, e + e)


def shifted_gram(S: MomentSequence, l: int, cols: Sequence[int]) -> np.ndarray:
    """``G[m, j] = s_{k_m + k_j + e_l}`` for all ``m`` and ``j`` in ``cols``.

    These are the inner products ``([t^{k_j + e_l}], [t^{k_m}])``.
    """
    return _pair_matrix(S, range(len(S.K)), cols, unit(S.dimension, l))


@dataclass
class NecessaryReport:
    psd_ok: bool
    kernel_ok: dict[int, bool]
    min_eigenvalue: float
    kernel_residual: dict[int, float]

    @property
    def ok(self) -> bool:
        return self.psd_ok and all(self.kernel_ok.values())


def necessary_conditions(
    S: MomentSequence, tol: float = tolerances.PSD, kernel_tol: float | None = None
) -> NecessaryReport:
    """Check ``Gamma >= 0`` and ``Ker Gamma_l`` inside ``Ker hat Gamma_l``.

    A near-null eigenvector with eigenvalue ``lam`` only has
    ``||hat Gamma_l v|| = O(sqrt(lam))``, so the kernel test uses
    ``sqrt(tol)`` unless ``kernel_tol`` is given.
    """
    if kernel_tol is None:
        kernel_tol = math.sqrt(tol)
    gamma = gram_matrix(S)
    lam = np.linalg.eigvalsh(gamma)
    norm = float(np.max(np.abs(lam))) if lam.size else 0.0
    min_eig = float(lam[0])
    psd_ok = min_eig >= -tol * (1.0 + norm)

    kernel_ok, kernel_res = {}, {}
    for l in range(1, S.dimension + 1):
        g, gh = localized_matrices(S, l)
        if g.size == 0:
            kernel_ok[l], kernel_res[l] = True, 0.0
            continue
        w, v = np.linalg.eigh(g)
        cutoff = tolerances.RANK * max(1.0, float(np.max(np.abs(w))))
        null = v[:, np.abs(w) <= cutoff]
        res = float(np.max(np.linalg.norm(gh @ null, axis=0))) if null.shape[1] else 0.0
        kernel_res[l] = res
        kernel_ok[l] = bool(res <= kernel_tol * (1.0 + np.linalg.norm(gh, 2)))
    return NecessaryReport(psd_ok, kernel_ok, min_eig, kernel_res)
