"""Line-oriented problem files.

A problem file lists the dimension, the truncation and one moment per line::

    # comments and blank lines are ignored
    dimension 2
    truncation triangular 2
    moment 0 0 9
    moment 1 0 -1
    ...

``truncation`` is ``triangular R``, ``rectangular D1 ... Dn`` or
``explicit``; the latter is followed by ``element k1 ... kn`` lines giving
the elements of ``K`` in index order.  Exponents are integers and values
decimal literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .moments import AtomicMeasure, MomentSequence, moments_of_measure
from .multiindex import (
    AdmissibleSet,
    MultiIndex,
    minkowski_double,
    rectangular,
    sorted_indices,
    triangular,
)

__all__ = [
    "ProblemParseError",
    "ProblemDocument",
    "parse_problem",
    "format_problem",
    "oracle_problem",
]


class ProblemParseError(ValueError):
    """Malformed problem file; the message names the offending line."""


@dataclass
class ProblemDocument:
    n: int
    truncation: tuple
    moments: dict[MultiIndex, float]
    K: AdmissibleSet

    def sequence(self) -> MomentSequence:
        return MomentSequence(self.K, self.moments)


def _ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ProblemParseError(f"line {lineno}: {what} must be integers") from None


def parse_problem(text: str) -> ProblemDocument:
    n = None
    truncation = None
    elements: list[MultiIndex] = []
    moments: dict[MultiIndex, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "dimension":
            if n is not None:
                raise ProblemParseError(f"line {lineno}: dimension given twice")
            if len(rest) != 1:
                raise ProblemParseError(f"line {lineno}: expected 'dimension N'")
            (n,) = _ints(rest, lineno, "dimension")
            if n < 1:
                raise ProblemParseError(f"line {lineno}: dimension must be positive")
            continue
        if n is None:
            raise ProblemParseError(f"line {lineno}: '{key}' before 'dimension'")
        if key == "truncation":
            if truncation is not None:
                raise ProblemParseError(f"line {lineno}: truncation given twice")
            if not rest:
                raise ProblemParseError(f"line {lineno}: truncation kind missing")
            kind, args = rest[0], _ints(rest[1:], lineno, "truncation parameters")
            if kind == "triangular" and len(args) == 1 and args[0] >= 0:
                truncation = ("triangular", args[0])
            elif kind == "rectangular" and len(args) == n and min(args) >= 0:
                truncation = ("rectangular", *args)
            elif kind == "explicit" and not args:
                truncation = ("explicit",)
            else:
                raise ProblemParseError(f"line {lineno}: bad truncation '{' '.join(rest)}'")
        elif key == "element":
            if truncation != ("explicit",):
                raise ProblemParseError(f"line {lineno}: 'element' needs 'truncation explicit'")
            k = _ints(rest, lineno, "element exponents")
            if len(k) != n or min(k) < 0:
                raise ProblemParseError(f"line {lineno}: element needs {n} non-negative exponents")
            elements.append(MultiIndex(k))
        elif key == "moment":
            if len(rest) != n + 1:
                raise ProblemParseError(f"line {lineno}: moment needs {n} exponents and a value")
            k = MultiIndex(_ints(rest[:n], lineno, "moment exponents"))
            if min(k) < 0:
                raise ProblemParseError(f"line {lineno}: negative exponent")
            try:
                value = float(rest[n])
            except ValueError:
                raise ProblemParseError(f"line {lineno}: bad moment value '{rest[n]}'") from None
            if k in moments:
                raise ProblemParseError(f"line {lineno}: duplicate moment {tuple(k)}")
            moments[k] = value
        else:
            raise ProblemParseError(f"line {lineno}: unknown key '{key}'")
    if n is None:
        raise ProblemParseError("missing 'dimension' line")
    if truncation is None:
        raise ProblemParseError("missing 'truncation' line")
    if truncation[0] == "triangular":
        K = triangular(n, truncation[1])
    elif truncation[0] == "rectangular":
        K = rectangular(*truncation[1:])
    else:
        try:
            K = AdmissibleSet(tuple(elements))
        except ValueError as exc:
            raise ProblemParseError(f"explicit truncation: {exc}") from None
    return ProblemDocument(n, truncation, moments, K)


def format_problem(
    K: AdmissibleSet,
    truncation: tuple,
    values: dict,
    comments: Iterable[str] = (),
) -> str:
    """Render a problem file; moment values keep full double precision."""
    lines = [f"# {c}" for c in comments]
    lines.append(f"dimension {K.dimension}")
    lines.append("truncation " + " ".join(str(t) for t in truncation))
    if truncation[0] == "explicit":
        lines.extend("element " + " ".join(map(str, k)) for k in K)
    for k in sorted_indices(values):
        lines.append("moment " + " ".join(map(str, k)) + f" {float(values[k])!r}")
    return "\n".join(lines) + "\n"


def oracle_problem(mu: AtomicMeasure, K: AdmissibleSet, truncation: tuple) -> str:
    """Problem file with the moments of ``mu``; atoms go into comments."""
    comments = ["oracle instance; ground-truth measure:"]
    comments += [
        "atom " + " ".join(repr(float(x)) for x in p) + f" mass {float(m)!r}" for p, m in mu.atoms()
    ]
    return format_problem(K, truncation, moments_of_measure(mu, minkowski_double(K)), comments)
