"""Search for commuting self-adjoint extensions of the multiplication operators.

With the orthonormal basis split as ``H_0`` plus its complement, the
extension of ``M_k`` has the block matrix ``R_k = [[A_k, B_k^*], [B_k, C_k]]``
and only the Hermitian corner ``C_k`` is unknown.  ``R_1`` and ``R_2``
commute iff

* ``A_1 A_2 + B_1^* B_2 = A_2 A_1 + B_2^* B_1``            (given data)
* ``B_2^* C_1 - B_1^* C_2 = A_1 B_2^* - A_2 B_1^*``        (linear in C)
* ``C_1 C_2 - C_2 C_1 = B_2 B_1^* - B_1 B_2^*``            (quadratic in C)

``solve_is1`` and ``solve_is2`` decide solvability for corners of size one
and two.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import tolerances
from .hilbert import AssociatedSpace, OperatorBlocks
from .multiindex import triangular

__all__ = [
    "Status",
    "HermitianPair",
    "SolveOutcome",
    "necessary_block_checks",
    "commutation_residuals",
    "solve_flat",
    "solve_is1",
    "normalize_commutator",
    "solve_is2",
    "solve_canonical",
    "quadratic_root",
]

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    SOLVED = "Solved"
    NO_SOLUTION = "NoCanonicalSolution"
    UNDECIDED = "Undecided"


@dataclass
class HermitianPair:
    C1: np.ndarray
    C2: np.ndarray
    U: np.ndarray | None = None
    r: float | None = None
    beta: float | None = None
    # a, b, d, f, c, g of the rotated corners (size-2 case only)
    params: dict | None = None


@dataclass
class SolveOutcome:
    status: Status
    extensions: list[np.ndarray] | None = None
    corners: HermitianPair | None = None
    diagnostics: list[str] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    residuals: tuple[float, ...] | None = None

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


def _H(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _scale(blocks: OperatorBlocks) -> float:
    return 1.0 + max(
        max(np.linalg.norm(a) for a in blocks.A),
        max((np.linalg.norm(b) for b in blocks.B), default=0.0),
    )


def _require_pair(blocks: OperatorBlocks):
    if blocks.n != 2:
        raise ValueError(f"block analysis needs n = 2, got n = {blocks.n}")


def necessary_block_checks(blocks: OperatorBlocks, tol: float = tolerances.SOLVE) -> bool:
    """Data-only commutation condition and the trace condition."""
    _require_pair(blocks)
    A1, A2 = blocks.A
    B1, B2 = blocks.B
    top = A1 @ A2 + _H(B1) @ B2 - A2 @ A1 - _H(B2) @ B1
    trace = np.trace(B2 @ _H(B1) - B1 @ _H(B2))
    s = tol * _scale(blocks)
    return bool(np.linalg.norm(top) <= s and abs(trace) <= s)


def commutation_residuals(blocks: OperatorBlocks, C1, C2) -> tuple[float, float, float]:
    _require_pair(blocks)
    A1, A2 = blocks.A
    B1, B2 = blocks.B
    C1 = np.atleast_2d(np.asarray(C1, dtype=complex))
    C2 = np.atleast_2d(np.asarray(C2, dtype=complex))
    if C1.shape != (blocks.i_s, blocks.i_s) or C2.shape != C1.shape:
        raise ValueError(
            f"corner blocks must be {blocks.i_s}x{blocks.i_s}, got {C1.shape} and {C2.shape}"
        )
    r16 = A1 @ A2 + _H(B1) @ B2 - A2 @ A1 - _H(B2) @ B1
    r18 = _H(B2) @ C1 - _H(B1) @ C2 - A1 @ _H(B2) + A2 @ _H(B1)
    r20 = C1 @ C2 - C2 @ C1 - B2 @ _H(B1) + B1 @ _H(B2)
    return tuple(float(np.linalg.norm(r)) for r in (r16, r18, r20))


def assemble(blocks: OperatorBlocks, corners: list[np.ndarray]) -> list[np.ndarray]:
    return [np.block([[A, _H(B)], [B, C]]) for A, B, C in zip(blocks.A, blocks.B, corners)]


def _finish(blocks, pair: HermitianPair, tol, trace, diagnostics=()) -> SolveOutcome | None:
    """Assemble the extensions and check the commutation equations."""
    res = commutation_residuals(blocks, pair.C1, pair.C2)
    if max(res) > tol * _scale(blocks) ** 2:
        trace.append(f"candidate rejected, residuals {res}")
        return None
    R = assemble(blocks, [pair.C1, pair.C2])
    return SolveOutcome(Status.SOLVED, R, pair, list(diagnostics), trace, res)


def solve_flat(blocks: OperatorBlocks, tol: float = tolerances.SOLVE) -> SolveOutcome:
    """``i_s = 0``: the operators are already defined on all of ``H``."""
    if blocks.i_s != 0:
        raise ValueError(f"solve_flat needs i_s = 0, got {blocks.i_s}")
    worst = 0.0
    for a in range(blocks.n):
        for b in range(a + 1, blocks.n):
            comm = blocks.A[a] @ blocks.A[b] - blocks.A[b] @ blocks.A[a]
            worst = max(worst, float(np.linalg.norm(comm)))
    trace = [f"flat: max commutator {worst:.3e}"]
    if worst > tol * _scale(blocks) ** 2:
        return SolveOutcome(
            Status.NO_SOLUTION,
            diagnostics=[f"operators do not commute: ||[A_a, A_b]|| = {worst:.3e}"],
            trace=trace,
        )
    empty = np.zeros((0, 0), dtype=complex)
    R = [a.copy() for a in blocks.A]
    pair = HermitianPair(empty, empty)
    res = (worst, 0.0, 0.0)
    return SolveOutcome(Status.SOLVED, R, pair, [], trace, res)


# ---------------------------------------------------------------------------
# real linear systems


def _affine_solve(M, h, tol=tolerances.SOLVE, rank_tol=tolerances.LINEAR):
    """Solutions of ``M x = h`` as ``(x_p, N)`` with ``x_p`` of minimum norm.

    Returns ``None`` when the least-squares residual exceeds
    ``tol * (1 + ||h||)``.
    """
    M = np.asarray(M, dtype=float)
    h = np.asarray(h, dtype=float)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.zeros(cols), np.eye(cols)
    U, s, Vt = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rank_tol * max(smax, 1.0)))
    x = Vt[:rank].T @ ((U[:, :rank].T @ h) / s[:rank])
    if np.linalg.norm(M @ x - h) > tol * (1.0 + np.linalg.norm(h)):
        return None
    return x, Vt[rank:].T


def _real_system(linear_map, n_unknowns):
    """Matrix and right-hand side of the real-linear map ``x -> F(x) - F0``."""
    f0 = linear_map(np.zeros(n_unknowns))
    cols = [linear_map(e) - f0 for e in np.eye(n_unknowns)]
    M = np.column_stack([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in cols])
    h = -np.concatenate([f0.real.ravel(), f0.imag.ravel()])
    return M, h


def solve_is1(blocks: OperatorBlocks, tol: float = tolerances.SOLVE) -> SolveOutcome:
    """Corners of size one: real scalars ``c_1, c_2``."""
    _require_pair(blocks)
    if blocks.i_s != 1:
        raise ValueError(f"solve_is1 needs i_s = 1, got {blocks.i_s}")
    A1, A2 = blocks.A
    B1, B2 = blocks.B
    trace = []
    scale = _scale(blocks)
    comm = B2 @ _H(B1) - B1 @ _H(B2)
    if np.linalg.norm(comm) > tol * scale**2:
        trace.append(f"B_2 B_1^* - B_1 B_2^* = {comm[0, 0]:.3e} != 0")
        return SolveOutcome(
            Status.NO_SOLUTION,
            diagnostics=["scalar corners commute but B_2 B_1^* != B_1 B_2^*"],
            trace=trace,
        )
    rhs = A1 @ _H(B2) - A2 @ _H(B1)

    def linear_map(x):
        return _H(B2) * x[0] - _H(B1) * x[1] - rhs

    M, h = _real_system(linear_map, 2)
    sol = _affine_solve(M, h, tol * scale**2)
    if sol is None:
        trace.append("linear system for (c_1, c_2) inconsistent")
        return SolveOutcome(
            Status.NO_SOLUTION,
            diagnostics=["no real c_1, c_2 satisfy the linear commutation equation"],
            trace=trace,
        )
    x, null = sol
    trace.append(f"c_1 = {x[0]:.6g}, c_2 = {x[1]:.6g}, free parameters {null.shape[1]}")
    pair = HermitianPair(np.array([[x[0]]], dtype=complex), np.array([[x[1]]], dtype=complex))
    out = _finish(blocks, pair, tol, trace)
    if out is None:
        return SolveOutcome(Status.NO_SOLUTION, diagnostics=["verification failed"], trace=trace)
    return out


# ---------------------------------------------------------------------------
# corners of size two


def normalize_commutator(blocks: OperatorBlocks, tol: float = tolerances.SOLVE):
    """``B_2 B_1^* - B_1 B_2^* = U diag(ir, -ir) U^{-1}`` with ``r >= 0``.

    Eigenvector phases are fixed so the first largest component of each
    column is real and positive; for ``r`` below tolerance ``U`` is the
    identity.
    """
    _require_pair(blocks)
    if blocks.i_s != 2:
        raise ValueError(f"normalize_commutator needs i_s = 2, got {blocks.i_s}")
    B1, B2 = blocks.B
    D = B2 @ _H(B1) - B1 @ _H(B2)
    return _normalize(D, tol)


def _normalize(D, tol=tolerances.SOLVE):
    D = np.asarray(D, dtype=complex)
    herm = -1j * D
    herm = (herm + _H(herm)) / 2
    mu, V = np.linalg.eigh(herm)
    scale = 1.0 + np.linalg.norm(D)
    if abs(mu[0] + mu[1]) > tol * scale:
        raise ValueError(f"trace condition violated: eigenvalues {1j * mu}")
    r = float((mu[1] - mu[0]) / 2)
    if r <= tol * scale:
        return np.eye(2, dtype=complex), 0.0
    U = V[:, ::-1].copy()
    for j in range(2):
        mag = np.abs(U[:, j])
        i = int(np.flatnonzero(mag >= mag.max() - 1e-12)[0])
        U[:, j] *= np.conj(U[i, j]) / mag[i]
    return U, r


# unknown vector x = (a, b, d, f, c', c'', g', g'')
_NAMES = ("a", "b", "d", "f", "c'", "c''", "g'", "g''")
_WEIGHT = np.array([1, 1, 1, 1, np.sqrt(2), np.sqrt(2), np.sqrt(2), np.sqrt(2)])


def _corners(x):
    a, b, d, f, c1, c2, g1, g2 = x
    c, g = c1 + 1j * c2, g1 + 1j * g2
    return (
        np.array([[a, c], [np.conj(c), b]], dtype=complex),
        np.array([[d, g], [np.conj(g), f]], dtype=complex),
    )


def _rows(*pairs):
    """Constraint rows from ``{name: coefficient}`` dicts."""
    out = np.zeros((len(pairs), 8))
    for i, coeffs in enumerate(pairs):
        for name, value in coeffs.items():
            out[i, _NAMES.index(name)] = value
    return out


def quadratic_root(Q, L, c, tol=tolerances.SOLVE, starts=200, seed=0):
    """A real zero of ``z^T Q z + L^T z + c`` of small norm, or ``None``.

    Existence is decided exactly from the eigen-decomposition of ``Q``: an
    indefinite form or an unbounded linear direction always has zeros; a
    semidefinite form has zeros iff its extremum crosses zero.  Among zeros
    the one of least norm is searched for; the constructive zero is the
    fallback.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    L = np.atleast_1d(np.asarray(L, dtype=float))
    p = L.size
    scale = 1.0 + np.abs(Q).max(initial=0.0) + np.abs(L).max(initial=0.0) + abs(c)

    def q(z):
        return float(z @ Q @ z + L @ z + c)

    if abs(c) <= tol * scale:
        return np.zeros(p)
    if p == 0:
        return None

    lam, V = np.linalg.eigh((Q + Q.T) / 2)
    ell = V.T @ L
    eps = 1e-12 * scale
    sign = 1.0
    if np.any(lam > eps) and np.any(lam < -eps):
        # indefinite: walk from 0 along a direction that changes the sign of q
        i = int(np.argmin(lam)) if c > 0 else int(np.argmax(lam))
        w = _axis_root(lam[i], ell[i], c)
        base = V[:, i] * w
    else:
        if np.any(lam < -eps):
            sign = -1.0
        lam_s, ell_s, c_s = sign * lam, sign * ell, sign * c
        flat = np.abs(lam_s) <= eps
        free = flat & (np.abs(ell_s) > eps)
        if np.any(free):
            i = int(np.flatnonzero(free)[np.argmax(np.abs(ell_s[free]))])
            base = V[:, i] * (-c_s / ell_s[i])
        else:
            pos = ~flat
            w = np.zeros(p)
            w[pos] = -ell_s[pos] / (2 * lam_s[pos])
            minimum = c_s - float(np.sum(ell_s[pos] ** 2 / (4 * lam_s[pos])))
            if minimum > tol * scale:
                return None
            if minimum < 0 and np.any(pos):
                i = int(np.flatnonzero(pos)[0])
                w[i] += np.sqrt(-minimum / lam_s[i])
            base = V @ w

    best = base if abs(q(base)) <= tol * scale else None
    # least-norm zero: scan directions, then polish
    rng = np.random.default_rng(seed)
    if p == 1:
        dirs = np.array([[1.0]])
    elif p == 2:
        th = np.linspace(0, np.pi, 721)[:-1]
        dirs = np.column_stack([np.cos(th), np.sin(th)])
    else:
        dirs = rng.standard_normal((starts, p))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    for u in dirs:
        for rho in _line_roots(u @ Q @ u, L @ u, c):
            z = rho * u
            if abs(q(z)) <= tol * scale and (best is None or z @ z < best @ best):
                best = z
    if best is None:
        return None
    if p >= 2:
        res = optimize.minimize(
            lambda z: z @ z,
            best,
            jac=lambda z: 2 * z,
            constraints=[{"type": "eq", "fun": q, "jac": lambda z: (Q + Q.T) @ z + L}],
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 200},
        )
        if res.success and abs(q(res.x)) <= tol * scale and res.x @ res.x < best @ best:
            best = res.x
    # Newton steps along the gradient push |q| to rounding level
    for _ in range(4):
        grad = (Q + Q.T) @ best + L
        gg = grad @ grad
        if gg == 0 or q(best) == 0:
            break
        best = best - q(best) * grad / gg
    return best


def _axis_root(lam, ell, c):
    roots = _line_roots(lam, ell, c)
    return min(roots, key=abs)


def _line_roots(a, b, c):
    if abs(a) <= 1e-14 * (1 + abs(b) + abs(c)):
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = np.sqrt(disc)
    # stable form avoids cancellation
    t = -(b + np.copysign(sq, b)) / 2
    roots = [t / a]
    if t != 0:
        roots.append(c / t)
    return roots


def solve_is2(blocks: OperatorBlocks, tol: float = tolerances.SOLVE) -> SolveOutcome:
    """Corners of size two, after rotating the commutator to ``diag(ir, -ir)``."""
    _require_pair(blocks)
    if blocks.i_s != 2:
        raise ValueError(f"solve_is2 needs i_s = 2, got {blocks.i_s}")
    A1, A2 = blocks.A
    B1, B2 = blocks.B
    scale = _scale(blocks)
    U, r = normalize_commutator(blocks, tol)
    calB1, calB2 = _H(B1) @ U, _H(B2) @ U
    calD = (A1 @ _H(B2) - A2 @ _H(B1)) @ U

    def linear_map(x):
        C1, C2 = _corners(x)
        return calB2 @ C1 - calB1 @ C2 - calD

    M0, h0 = _real_system(linear_map, 8)
    stol = tol * scale**2
    trace = [f"r = {r:.6g}"]

    def attempt(label, extra_rows, beta=None):
        M = np.vstack([M0, extra_rows]) if len(extra_rows) else M0
        h = np.concatenate([h0, np.zeros(len(extra_rows))])
        sol = _affine_solve(M / _WEIGHT, h, stol)
        if sol is None:
            trace.append(f"{label}: linear system inconsistent")
            return None
        x = sol[0] / _WEIGHT
        trace.append(f"{label}: consistent, {sol[1].shape[1]} free parameters")
        return _make(x, label, beta)

    def _make(x, label, beta=None):
        K1, K2 = _corners(x)
        C1, C2 = U @ K1 @ _H(U), U @ K2 @ _H(U)
        pair = HermitianPair(
            (C1 + _H(C1)) / 2, (C2 + _H(C2)) / 2, U=U, r=r, beta=beta,
            params=dict(zip(_NAMES, map(float, x))),
        )
        return _finish(blocks, pair, tol, trace, [f"branch: {label}"])

    if r > 0:
        rows = _rows({"a": 1, "b": -1}, {"f": 1, "d": -1})
        M = np.vstack([M0, rows]) / _WEIGHT
        h = np.concatenate([h0, np.zeros(2)])
        sol = _affine_solve(M, h, stol)
        if sol is None:
            trace.append("case r != 0: linear system with a = b, f = d inconsistent")
            return SolveOutcome(
                Status.NO_SOLUTION,
                diagnostics=["linear part inconsistent (case r != 0)"],
                trace=trace,
            )
        yp, N = sol
        # c''g' - c'g'' - r/2 in the weighted unknowns y = W x
        Qx = np.zeros((8, 8))
        Qx[5, 6] = Qx[6, 5] = 0.5
        Qx[4, 7] = Qx[7, 4] = -0.5
        Qy = Qx / np.outer(_WEIGHT, _WEIGHT)
        Qz = N.T @ Qy @ N
        Lz = 2 * N.T @ Qy @ yp
        cz = float(yp @ Qy @ yp) - r / 2
        p = N.shape[1]
        trace.append(f"case r != 0: quadratic in {p} unknowns")
        z = quadratic_root(Qz, Lz, cz, tol=stol)
        if z is None:
            msg = "c''g' - c'g'' = r/2 has no real solution on the affine solution set"
            trace.append(msg)
            return SolveOutcome(Status.NO_SOLUTION, diagnostics=[msg], trace=trace)
        out = _make((yp + N @ z) / _WEIGHT, f"case r != 0, quadratic in {p} unknowns")
        if out is None:
            return SolveOutcome(
                Status.UNDECIDED,
                diagnostics=["quadratic root found but verification failed"],
                trace=trace,
            )
        return out

    branches = [
        ("g = 0, c = 0", _rows({"g'": 1}, {"g''": 1}, {"c'": 1}, {"c''": 1})),
        ("g = 0, f = d", _rows({"g'": 1}, {"g''": 1}, {"f": 1, "d": -1})),
        ("c = 0, g = 0", _rows({"c'": 1}, {"c''": 1}, {"g'": 1}, {"g''": 1})),
        ("c = 0, a = b", _rows({"c'": 1}, {"c''": 1}, {"a": 1, "b": -1})),
    ]
    for label, rows in branches:
        out = attempt(label, rows)
        if out is not None:
            return out

    for beta in _beta_candidates(M0, h0, stol, trace):
        out = attempt(f"c = beta g, beta = {beta:.12g}", _beta_rows(beta), beta)
        if out is not None:
            return out
    trace.append("all branches exhausted")
    return SolveOutcome(
        Status.NO_SOLUTION, diagnostics=["no branch of case r = 0 is consistent"], trace=trace
    )


def _beta_rows(beta):
    return _rows(
        {"c'": 1, "g'": -beta},
        {"c''": 1, "g''": -beta},
        {"a": 1, "b": -1, "f": beta, "d": -beta},
    )


def _beta_system(M0, h0, beta):
    M = np.vstack([M0, _beta_rows(beta)]) / _WEIGHT
    h = np.concatenate([h0, np.zeros(3)])
    return M, h


def _beta_candidates(M0, h0, tol, trace, seed=0):
    """Values of ``beta`` at which the parametric system may be consistent.

    If it is consistent for generic ``beta``, the least-norm solution is
    minimized over ``beta``.  Otherwise consistency needs a rank drop of the
    augmented matrix, i.e. a common root of its maximal minors; a random
    projection of those minors is a polynomial in ``beta`` recovered by
    interpolation, and its real roots are the candidates.
    """
    rng = np.random.default_rng(seed)
    samples = rng.uniform(-3, 3, size=3)

    def ranks(beta):
        M, h = _beta_system(M0, h0, beta)
        aug = np.column_stack([M, h])
        rt = tolerances.LINEAR * max(1.0, np.linalg.norm(aug, 2))
        return np.linalg.matrix_rank(M, rt), np.linalg.matrix_rank(aug, rt)

    rM, rMh = map(max, zip(*(ranks(b) for b in samples)))
    if rM == rMh:
        def size(beta):
            M, h = _beta_system(M0, h0, beta)
            sol = _affine_solve(M, h, tol)
            return np.inf if sol is None else float(sol[0] @ sol[0])

        grid = np.linspace(-10, 10, 401)
        vals = np.array([size(b) for b in grid])
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        res = optimize.minimize_scalar(size, bounds=(lo, hi), method="bounded")
        best = res.x if res.fun <= vals[i] else grid[i]
        trace.append(f"beta path: consistent for generic beta, chose beta = {best:.6g}")
        return [float(best)]

    M, h = _beta_system(M0, h0, 0.0)
    P = rng.standard_normal((M.shape[0], rMh))
    Qp = rng.standard_normal((M.shape[1] + 1, rMh))

    def minor(beta):
        Mb, hb = _beta_system(M0, h0, beta)
        return np.linalg.det(P.T @ np.column_stack([Mb, hb]) @ Qp)

    deg = rMh
    nodes = 2.0 * np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    coeffs = np.polynomial.polynomial.polyfit(nodes, [minor(b) for b in nodes], deg)
    if np.max(np.abs(coeffs)) == 0:
        trace.append("beta path: minor polynomial vanishes identically")
        return []
    coeffs = np.trim_zeros(coeffs / np.max(np.abs(coeffs)), "b")
    roots = np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.array([])
    real = sorted(float(z.real) for z in roots if abs(z.imag) <= 1e-6 * (1 + abs(z)))

    def sigma(beta):
        Mb, hb = _beta_system(M0, h0, beta)
        s = np.linalg.svd(np.column_stack([Mb, hb]), compute_uv=False)
        return s[rMh - 1]

    polished = []
    for b0 in real:
        width = 1e-3 * (1 + abs(b0))
        res = optimize.minimize_scalar(
            sigma, bounds=(b0 - width, b0 + width), method="bounded",
            options={"xatol": 1e-14 * (1 + abs(b0))},
        )
        polished.append(float(res.x) if res.fun <= sigma(b0) else b0)
    trace.append(f"beta path: candidate roots {[round(b, 10) for b in polished]}")
    return polished


# ---------------------------------------------------------------------------


def _is_triangular_pair(space: AssociatedSpace) -> bool:
    K = space.K
    if K.dimension != 2:
        return False
    r = max(k.degree for k in K)
    if K.as_set() != triangular(2, r).as_set():
        return False
    # K_{r-1} must come first
    return all(k.degree < r for k in K.elements[: len(triangular(2, r - 1))]) if r else True


def solve_canonical(
    space: AssociatedSpace, blocks: OperatorBlocks, tol: float = tolerances.SOLVE
) -> SolveOutcome:
    """Dispatch on the index ``i_s`` and verify the assembled extensions."""
    if space.i_s == 0:
        out = solve_flat(blocks, tol)
    else:
        if not _is_triangular_pair(space):
            raise ValueError(
                "canonical search for i_s > 0 is implemented for n = 2 triangular truncations only"
            )
        if space.i_s >= 3:
            return SolveOutcome(
                Status.UNDECIDED,
                diagnostics=[f"i_s = {space.i_s}: index exceeds implemented case analysis"],
            )
        if not necessary_block_checks(blocks, tol):
            return SolveOutcome(
                Status.NO_SOLUTION,
                diagnostics=["necessary block conditions fail (data commutator or trace)"],
            )
        out = solve_is1(blocks, tol) if space.i_s == 1 else solve_is2(blocks, tol)
    if out.solved:
        R = out.extensions
        for Rk in R:
            if np.linalg.norm(Rk - _H(Rk)) > 1e-10 * (1 + np.linalg.norm(Rk)):
                raise AssertionError("assembled extension is not Hermitian")
        for a in range(len(R)):
            for b in range(a + 1, len(R)):
                comm = np.linalg.norm(R[a] @ R[b] - R[b] @ R[a])
                if comm > tol * (1 + np.linalg.norm(R[a]) * np.linalg.norm(R[b])):
                    log.warning("extensions commute only to %.3e", comm)
                    return SolveOutcome(
                        Status.UNDECIDED,
                        diagnostics=[f"extensions fail final commutation check ({comm:.3e})"],
                        trace=out.trace,
                    )
    return out
