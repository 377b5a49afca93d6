"""Command-line front end.

Subcommands ``check``, ``solve``, ``oracle`` and ``roundtrip``.  Exit codes:
0 success or Solved, 1 parse or schema error, 2 necessary-condition failure,
3 no canonical solution, 4 undecided.

Besides problem files, ``check`` and ``solve`` accept a JSON document of
operator blocks::

    {"blocks": {"A1": [[...]], "A2": [[...]], "B1": [[...]], "B2": [[...]]}}

with complex entries written as ``[re, im]``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import tolerances
from .extension import ExtensionError, canonical_from_extension, extend_via_solution
from .hilbert import ConditionViolation, OperatorBlocks, build_space, operator_blocks
from .moments import AtomicMeasure, MomentError, moments_of_measure, necessary_conditions
from .multiindex import rectangular, triangular
from .problem import ProblemParseError, oracle_problem, parse_problem
from .solver import (
    Status,
    SolveOutcome,
    necessary_block_checks,
    solve_canonical,
    solve_flat,
    solve_is1,
    solve_is2,
)
from .spectral import extract_measure, joint_diagonalize, verify_solution

EXIT_OK, EXIT_PARSE, EXIT_NECESSARY, EXIT_NO_SOLUTION, EXIT_UNDECIDED = 0, 1, 2, 3, 4
_STATUS_EXIT = {
    Status.SOLVED: EXIT_OK,
    Status.NO_SOLUTION: EXIT_NO_SOLUTION,
    Status.UNDECIDED: EXIT_UNDECIDED,
}


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# deterministic formatting


def _num(x: float) -> float:
    """12 significant digits; magnitudes below 1e-12 print as 0."""
    x = float(x)
    if abs(x) < 1e-12:
        return 0.0
    return float(f"{x:.12g}")


def _matrix(m) -> dict | list:
    m = np.asarray(m, dtype=complex)
    re = [[_num(v) for v in row] for row in m.real]
    im = [[_num(v) for v in row] for row in m.imag]
    if not any(v for row in im for v in row):
        return re
    return {"re": re, "im": im}


def _measure(mu: AtomicMeasure) -> list[dict]:
    return [{"point": [_num(x) for x in p], "mass": _num(m)} for p, m in mu.atoms()]


def _text(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if value is not None else "none"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, list):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)


def render(doc: dict, fmt: str) -> str:
    if fmt == "machine":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = []
    for key, value in doc.items():
        if key == "measure" and isinstance(value, list):
            lines.append("measure:")
            for atom in value:
                coords = " ".join(f"{x:.12g}" for x in atom["point"])
                lines.append(f"  atom {coords} mass {atom['mass']:.12g}")
        elif key in ("trace", "diagnostics") and isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  {v}" for v in value)
        else:
            lines.append(f"{key}: {_text(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# input


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _parse_entry(v):
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def parse_blocks(text: str) -> OperatorBlocks:
    try:
        doc = json.loads(text)["blocks"]
        mats = {}
        for name in ("A1", "A2", "B1", "B2"):
            mats[name] = np.array(
                [[_parse_entry(v) for v in row] for row in doc[name]], dtype=complex
            ).reshape(len(doc[name]), -1)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad blocks document: {exc}") from None
    A1, A2, B1, B2 = mats["A1"], mats["A2"], mats["B1"], mats["B2"]
    d1 = A1.shape[0]
    if A1.shape != (d1, d1) or A2.shape != (d1, d1):
        raise InputError("A1 and A2 must be square of equal size")
    if B1.shape != B2.shape or (B1.size and B1.shape[1] != d1):
        raise InputError(f"B1 and B2 must both have {d1} columns")
    B1 = B1.reshape(-1, d1)
    B2 = B2.reshape(-1, d1)
    return OperatorBlocks([A1, A2], [B1, B2], [])


def _is_blocks(text: str) -> bool:
    return text.lstrip().startswith("{")


# ---------------------------------------------------------------------------
# commands


def _tolerances(args) -> dict:
    return {"tol_rank": args.tol_rank, "tol_solve": args.tol_solve}


def _block_report(blocks: OperatorBlocks, tol: float) -> dict:
    A1, A2 = blocks.A
    B1, B2 = blocks.B
    top = A1 @ A2 + B1.conj().T @ B2 - A2 @ A1 - B2.conj().T @ B1
    tr = np.trace(B2 @ B1.conj().T - B1 @ B2.conj().T)
    return {
        "data_commutator": _num(np.linalg.norm(top)),
        "trace": _num(abs(tr)),
        "block_checks_ok": necessary_block_checks(blocks, tol),
    }


def _check_moments(text: str, args) -> tuple[dict, int, tuple]:
    doc = parse_problem(text)
    S = doc.sequence()
    nec = necessary_conditions(S, args.tol_rank)
    report = {
        "gram_size": len(S.K),
        "psd_ok": nec.psd_ok,
        "min_eigenvalue": _num(nec.min_eigenvalue),
        "kernel_ok": {str(l): v for l, v in nec.kernel_ok.items()},
    }
    ok = nec.ok
    space = blocks = None
    if nec.psd_ok:
        try:
            space = build_space(S, args.tol_rank)
        except ConditionViolation as exc:
            report["psd_ok"] = ok = False
            report["diagnostics"] = [str(exc)]
    if space is not None:
        blocks = operator_blocks(space, S)
        report.update(dim_H=space.dim_H, dim_H0=space.dim_H0, i_s=space.i_s)
        if S.dimension == 2 and space.i_s > 0:
            checks = _block_report(blocks, args.tol_solve)
            report.update(checks)
            ok = ok and checks["block_checks_ok"]
    report["necessary_ok"] = ok
    return report, (EXIT_OK if ok else EXIT_NECESSARY), (S, space, blocks)


def _check_blocks(text: str, args) -> tuple[dict, int, OperatorBlocks]:
    blocks = parse_blocks(text)
    report = {"d1": blocks.d1, "i_s": blocks.i_s}
    report.update(_block_report(blocks, args.tol_solve))
    ok = report["block_checks_ok"]
    report["necessary_ok"] = ok
    return report, (EXIT_OK if ok else EXIT_NECESSARY), blocks


def cmd_check(args) -> tuple[dict, int]:
    text = _read(args.file)
    if _is_blocks(text):
        report, code, _ = _check_blocks(text, args)
    else:
        report, code, _ = _check_moments(text, args)
    report["tolerances"] = _tolerances(args)
    return report, code


def _outcome_report(out: SolveOutcome, trace: bool) -> dict:
    report = {"status": out.status.value}
    if out.diagnostics:
        report["diagnostics"] = list(out.diagnostics)
    if out.solved:
        report["C1"] = _matrix(out.corners.C1)
        report["C2"] = _matrix(out.corners.C2)
        report["R"] = [_matrix(R) for R in out.extensions]
        report["commutation_residuals"] = [_num(r) for r in out.residuals]
    if trace:
        report["trace"] = list(out.trace)
    return report


def _solve_blocks(blocks: OperatorBlocks, tol: float) -> SolveOutcome:
    if blocks.i_s == 0:
        return solve_flat(blocks, tol)
    if blocks.i_s == 1:
        return solve_is1(blocks, tol)
    if blocks.i_s == 2:
        return solve_is2(blocks, tol)
    return SolveOutcome(
        Status.UNDECIDED, diagnostics=[f"i_s = {blocks.i_s}: index exceeds implemented case analysis"]
    )


def _run_solve(text: str, args):
    """Shared by ``solve`` and ``roundtrip``; returns (report, code, S, outcome, measure)."""
    check, code, (S, space, blocks) = _check_moments(text, args)
    if code != EXIT_OK:
        check["status"] = "NecessaryConditionFailure"
        return check, code, S, None, None
    try:
        out = solve_canonical(space, blocks, args.tol_solve)
    except ValueError as exc:
        out = SolveOutcome(Status.UNDECIDED, diagnostics=[str(exc)])
    report = {"i_s": space.i_s}
    report.update(_outcome_report(out, args.trace_branches))
    mu = None
    if out.solved:
        spectrum = joint_diagonalize(out.extensions, args.tol_solve)
        mu = extract_measure(spectrum, space.unit_coordinates())
        ver = verify_solution(mu, S)
        report["measure"] = _measure(mu)
        report["total_mass"] = _num(mu.total_mass)
        report["verification_residual"] = _num(ver.max_deviation)
        report["verified"] = ver.passed
    return report, _STATUS_EXIT[out.status], S, out, mu


def cmd_solve(args) -> tuple[dict, int]:
    text = _read(args.file)
    if _is_blocks(text):
        check, code, blocks = _check_blocks(text, args)
        if code != EXIT_OK:
            check["status"] = "NecessaryConditionFailure"
            report = check
        else:
            out = _solve_blocks(blocks, args.tol_solve)
            report = {"i_s": blocks.i_s, **_outcome_report(out, args.trace_branches)}
            code = _STATUS_EXIT[out.status]
    else:
        report, code, *_ = _run_solve(text, args)
    report["tolerances"] = _tolerances(args)
    return report, code


def cmd_roundtrip(args) -> tuple[dict, int]:
    report, code, S, out, mu = _run_solve(_read(args.file), args)
    if mu is None:
        reason = "no canonical solution" if code == EXIT_NO_SOLUTION else "not solved"
        rt = {"status": report.get("status"), "roundtrip": f"{reason}; round trip skipped"}
        rt["tolerances"] = _tolerances(args)
        return rt, code
    ext = extend_via_solution(mu, S.K, S)
    space = build_space(ext.sequence, 1e-8)
    rt = {
        "status": report["status"],
        "extension_size": len(ext.extK),
        "extension_i_s": space.i_s,
        "extension_stable": space.i_s == 0,
    }
    try:
        back = canonical_from_extension(ext, args.tol_rank)
    except ExtensionError as exc:
        rt["roundtrip"] = f"failed: {exc}"
        rt["tolerances"] = _tolerances(args)
        return rt, EXIT_UNDECIDED
    again = moments_of_measure(back, ext.values)
    residual = max(abs(again[k] - ext.values[k]) for k in ext.values)
    rt["roundtrip_residual"] = _num(residual)
    rt["roundtrip_ok"] = bool(residual <= 1e-7)
    rt["measure"] = _measure(back)
    rt["tolerances"] = _tolerances(args)
    return rt, EXIT_OK


def _truncation(spec: list[str], n: int):
    kind, *params = spec
    try:
        params = [int(p) for p in params]
    except ValueError:
        raise InputError("truncation parameters must be integers") from None
    if kind == "triangular" and len(params) == 1:
        return triangular(n, params[0]), ("triangular", params[0])
    if kind == "rectangular" and len(params) == n:
        return rectangular(*params), ("rectangular", *params)
    raise InputError(f"bad truncation {' '.join(spec)!r}")


def cmd_oracle(args) -> tuple[str, int]:
    n = args.dimension
    K, trunc = _truncation(args.truncation, n)
    if args.atom:
        rows = np.array(args.atom, dtype=float)
        if rows.shape[1] != n + 1:
            raise InputError(f"--atom needs {n} coordinates and a mass")
        points, masses = rows[:, :n], rows[:, n]
        if np.any(masses <= 0) or not np.all(np.isfinite(rows)):
            raise InputError("atoms must be finite with positive masses")
    else:
        rng = np.random.default_rng(args.seed)
        points = rng.uniform(-1.0, 1.0, (args.atoms, n))
        masses = rng.uniform(0.5, 2.0, args.atoms)
    mu = AtomicMeasure(points, masses)
    if args.truth:
        atoms = [{"point": list(p), "mass": m} for p, m in mu.atoms()]
        Path(args.truth).write_text(json.dumps({"measure": atoms}, indent=2) + "\n")
    return oracle_problem(mu, K, trunc), EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=tolerances.RANK)
    common.add_argument("--tol-solve", type=float, default=tolerances.SOLVE)
    common.add_argument("--trace-branches", action="store_true", help="include the solver trace")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = argparse.ArgumentParser(
        prog="canonical-moments",
        description="Canonical solutions of truncated multidimensional moment problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("check", "necessary conditions and space dimensions"),
        ("solve", "search for a canonical solution and extract its measure"),
        ("roundtrip", "solve, extend to Ext K and recover the measure"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file", help="problem file, blocks JSON, or - for stdin")
    p = sub.add_parser("oracle", parents=[common], help="problem file from an atomic measure")
    p.add_argument("--dimension", "-n", type=int, default=2)
    p.add_argument("--truncation", nargs="+", default=["triangular", "2"], metavar="SPEC")
    p.add_argument("--atom", action="append", nargs="+", type=float, metavar="X",
                   help="coordinates followed by the mass; repeatable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atoms", type=int, default=3, help="number of random atoms")
    p.add_argument("--truth", help="also write the measure as JSON here")
    return parser


_COMMANDS = {"check": cmd_check, "solve": cmd_solve, "roundtrip": cmd_roundtrip, "oracle": cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result, code = _COMMANDS[args.command](args)
    except (ProblemParseError, MomentError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = result if isinstance(result, str) else render(result, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
