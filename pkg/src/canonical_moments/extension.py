"""Moments over the close extension and the canonical solutions they encode.

A canonical solution ``mu`` of the problem over ``K`` determines moments on
``Ext K + Ext K`` whose associated space is dimensionally stable; conversely a
dimensionally stable extension yields commuting self-adjoint operators and
hence an atomic measure.  The two maps are :func:`extend_via_solution` and
:func:`canonical_from_extension`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import tolerances
from .hilbert import ConditionViolation, build_space, operator_blocks
from .moments import (
    AtomicMeasure,
    MomentSequence,
    gram_matrix,
    moments_of_measure,
    necessary_conditions,
)
from .multiindex import (
    AdmissibleSet,
    MultiIndex,
    close_extension,
    ext_border_condition,
    minkowski_double,
    sorted_indices,
)
from .spectral import extract_measure, joint_diagonalize, verify_solution

__all__ = [
    "ExtensionError",
    "ExtendedMoments",
    "BijectionReport",
    "extend_via_solution",
    "canonical_from_extension",
    "check_bijection",
    "base_gram_block",
]


class ExtensionError(ValueError):
    """An extension cannot be turned into a canonical solution."""


@dataclass(frozen=True)
class ExtendedMoments:
    """Moments over ``Ext K + Ext K`` that agree with ``base`` on ``K + K``."""

    base: MomentSequence
    extK: AdmissibleSet
    values: Mapping[MultiIndex, float]

    def __post_init__(self):
        K = self.base.K
        if self.extK.elements[: len(K)] != K.elements:
            raise ValueError("extension must keep the indexation of K as a prefix")
        if self.extK.as_set() != close_extension(K).as_set():
            raise ValueError("extK is not the close extension of K")
        values = {MultiIndex(k): float(v) for k, v in self.values.items()}
        if values.keys() != minkowski_double(self.extK):
            raise ValueError("extended moments must cover exactly Ext K + Ext K")
        for k, v in self.base.values.items():
            if values[k] != v:
                raise ValueError(f"extension disagrees with the base moment at {tuple(k)}")
        object.__setattr__(self, "values", values)

    @property
    def sequence(self) -> MomentSequence:
        """The extension as an ordinary moment sequence over ``Ext K``."""
        return MomentSequence(self.extK, self.values)


def extend_via_solution(
    mu: AtomicMeasure,
    K: AdmissibleSet,
    base: MomentSequence | None = None,
    extK: AdmissibleSet | None = None,
) -> ExtendedMoments:
    """All moments of ``mu`` over ``Ext K + Ext K``.

    Parameters
    ----------
    mu
        A canonical solution of the problem over ``K``.
    K
        The base index set.
    base
        The prescribed moments.  Values on ``K + K`` are taken from it, so
        the extension restricts to ``base`` exactly; by default the moments
        of ``mu`` itself are used.
    extK
        A continuation of the indexation of ``K``; defaults to
        :func:`close_extension`.
    """
    if base is None:
        base = MomentSequence.from_measure(mu, K)
    elif base.K != K:
        raise ValueError("base moments are indexed by a different K")
    if extK is None:
        extK = close_extension(K)
    values = moments_of_measure(mu, minkowski_double(extK))
    values.update(base.values)
    return ExtendedMoments(base, extK, values)


def canonical_from_extension(
    ext: ExtendedMoments, tol_rank: float = tolerances.RANK, tol: float = 1e-8
) -> AtomicMeasure:
    """The atomic measure generated by a dimensionally stable extension.

    Raises
    ------
    ExtensionError
        If the border condition fails for ``K``, the extension violates the
        necessary conditions, is not dimensionally stable, or the measure
        does not reproduce the base moments within ``tol``.
    """
    K = ext.base.K
    if not ext_border_condition(K):
        raise ExtensionError("border condition fails: (Ext K) \\ K is not inside the border of Ext K")
    S = ext.sequence
    report = necessary_conditions(S, tol_rank)
    if not report.ok:
        raise ExtensionError(
            f"extension violates the necessary conditions (min eigenvalue {report.min_eigenvalue:.3e})"
        )
    try:
        space = build_space(S, tol_rank)
    except ConditionViolation as exc:
        raise ExtensionError(str(exc)) from exc
    if space.i_s != 0:
        raise ExtensionError(f"extension is not dimensionally stable (i_s = {space.i_s})")
    blocks = operator_blocks(space, S)
    try:
        spectrum = joint_diagonalize(blocks.A, tolerances.SOLVE)
    except ValueError as exc:
        raise ExtensionError(f"operators of the extension: {exc}") from exc
    mu = extract_measure(spectrum, space.unit_coordinates())
    check = verify_solution(mu, ext.base, tol)
    if not check.passed:
        raise ExtensionError(
            f"measure misses the base moment {check.worst_index} by {check.max_deviation:.3e}"
        )
    return mu


def _distinct(mu: AtomicMeasure, nu: AtomicMeasure, tol: float) -> bool:
    if len(mu) != len(nu):
        return True
    return bool(
        np.max(np.abs(mu.points - nu.points), initial=0.0) > tol
        or np.max(np.abs(mu.masses - nu.masses), initial=0.0) > tol
    )


@dataclass
class BijectionReport:
    stable: list[bool] = field(default_factory=list)
    roundtrip_residuals: list[float] = field(default_factory=list)
    # (i, j, witness index) for every pair of distinct input measures
    witnesses: list[tuple[int, int, tuple | None]] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    tol: float = 1e-7

    @property
    def all_stable(self) -> bool:
        return all(self.stable)

    @property
    def roundtrip_ok(self) -> bool:
        return all(r <= self.tol for r in self.roundtrip_residuals)

    @property
    def injective(self) -> bool:
        return all(w is not None for _, _, w in self.witnesses)

    @property
    def passed(self) -> bool:
        return not self.errors and self.all_stable and self.roundtrip_ok and self.injective


def check_bijection(
    S: MomentSequence, solutions: Sequence[AtomicMeasure], tol: float = 1e-7
) -> BijectionReport:
    """Send each solution to its extension and back.

    Records whether each extension is dimensionally stable, the worst
    moment deviation of the round trip over ``Ext K + Ext K``, and for every
    pair of distinct solutions an index where their extensions differ.
    """
    report = BijectionReport(tol=tol)
    extensions = []
    for i, mu in enumerate(solutions):
        ext = extend_via_solution(mu, S.K, S)
        extensions.append(ext)
        space = build_space(ext.sequence, 1e-8)
        report.stable.append(space.i_s == 0)
        try:
            back = canonical_from_extension(ext)
        except ExtensionError as exc:
            report.errors.append(f"solution {i}: {exc}")
            report.roundtrip_residuals.append(float("inf"))
            continue
        again = moments_of_measure(back, ext.values)
        report.roundtrip_residuals.append(max(abs(again[k] - ext.values[k]) for k in ext.values))
    for i, j in itertools.combinations(range(len(solutions)), 2):
        if not _distinct(solutions[i], solutions[j], tol):
            continue
        a, b = extensions[i].values, extensions[j].values
        where = [k for k in sorted_indices(a) if abs(a[k] - b[k]) > tol * (1 + abs(a[k]))]
        report.witnesses.append((i, j, tuple(where[0]) if where else None))
    return report


def base_gram_block(ext: ExtendedMoments) -> np.ndarray:
    """Leading block of the extension's Gram matrix over the elements of ``K``."""
    n = len(ext.base.K)
    return gram_matrix(ext.sequence)[:n, :n]
