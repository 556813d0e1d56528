"""Command-line surface: read matrices from files, run operations, emit reports.

Matrix files are JSON objects ``{"n": int, "entries": [[[re, im], ...]], "name": str?}``
with every entry a two-element [re, im] pair; files ending in ``.csv`` are
read as real-valued CSV instead (each cell x becomes x + 0i).  Reports are
emitted on stdout as JSON (``--json``, default) or as aligned text
(``--pretty``); diagnostics go to stderr.

Exit status contract:

- 0: success (inverse exists / order holds / axioms verified)
- 1: clean mathematical negative (not invertible, not ordered, axioms violated)
- 2: input error (malformed file, bad dimensions, unknown flag)
- 3: numerical diagnostic failure (route disagreement, borderline split,
     indeterminate order verdict)

The environment variable ``MINKINV_TOL`` overrides the default residual
tolerance; the ``--tol`` flag wins over the environment.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import decomp, ginv, order, verify
from .errors import (
    DiagnosticError,
    DimensionMismatchError,
    MinkinvError,
    NotInvertibleError,
)
from .numlin import MinkowskiMetric, Tolerances, minkowski_adjoint

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

KIND_ALIASES = {
    "minkowski": ginv.InverseKind.minkowski,
    "group": ginv.InverseKind.group,
    "drazin": ginv.InverseKind.drazin,
    "core-ep": ginv.InverseKind.core_ep,
    "m-core": ginv.InverseKind.m_core,
    "m-core-ep": ginv.InverseKind.m_core_ep,
}


class InputError(Exception):
    """Anything wrong with the user's files or flags (exit status 2)."""


def read_matrix(path: str) -> tuple[str, np.ndarray]:
    """Read a matrix file (JSON pairs, or real CSV for .csv paths)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc}") from exc

    name = os.path.splitext(os.path.basename(path))[0]
    if path.lower().endswith(".csv"):
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                rows.append([float(cell) for cell in stripped.split(",")])
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from exc
        if not rows:
            raise InputError(f"{path}: empty CSV matrix")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InputError(f"{path}: ragged CSV rows")
        return name, np.array(rows, dtype=complex)

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise InputError(f"{path}: expected a JSON object with 'n' and 'entries'")
    try:
        n = int(payload["n"])
        entries = payload["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: missing or invalid 'n'/'entries': {exc}") from exc
    if not isinstance(entries, list) or len(entries) != n:
        raise InputError(f"{path}: 'entries' must be a list of exactly n={n} rows")
    matrix = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"{path}: row {i} must hold exactly n={n} entries")
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(v, (int, float)) for v in cell)
            ):
                raise InputError(
                    f"{path}: entry ({i},{j}) must be a two-element [re, im] pair"
                )
            matrix[i, j] = complex(cell[0], cell[1])
    if not np.all(np.isfinite(matrix.real)) or not np.all(np.isfinite(matrix.imag)):
        raise InputError(f"{path}: entries must be finite")
    return str(payload.get("name", name)), matrix


def matrix_to_entries(matrix: np.ndarray) -> list:
    """Encode a complex matrix as nested [re, im] pairs (bit-exact round trip)."""
    return [[[float(v.real), float(v.imag)] for v in row] for row in matrix]


def _round_map(values: dict[str, float]) -> dict[str, float]:
    return {key: float(values[key]) for key in sorted(values)}


def _base_report(command: str, inputs: list[str], tol: Tolerances) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "tolerances": {
            "rank_tol_factor": tol.rank_tol_factor,
            "residual_tol": tol.residual_tol,
            "eig_zero_factor": tol.eig_zero_factor,
        },
        "diagnostics": [],
    }


def _emit(report: dict, pretty: bool) -> None:
    if not pretty:
        print(json.dumps(report, sort_keys=True))
        return
    print(f"command: {report['command']}   inputs: {', '.join(report['inputs'])}")
    for key in sorted(report):
        if key in ("schema", "command", "inputs", "result", "diagnostics") or key.endswith(
            "residuals"
        ):
            continue
        print(f"{key}: {report[key]}")
    for key in sorted(k for k in report if k.endswith("residuals")):
        print(f"{key}:")
        for label in sorted(report[key]):
            print(f"  {label:28s} {report[key][label]:.6e}")
    if report.get("result") is not None:
        print("result:")
        for row in np.array(
            [[complex(re, im) for re, im in r] for r in report["result"]]
        ):
            print("  " + "  ".join(f"{v.real:+.12g}{v.imag:+.12g}j" for v in row))
    for note in report.get("diagnostics", []):
        print(f"note: {note}", file=sys.stderr)


def _run_adjoint(args, tol: Tolerances) -> tuple[int, dict]:
    name, matrix = read_matrix(args.file)
    metric = MinkowskiMetric(matrix.shape[0])
    adj = minkowski_adjoint(matrix, metric)
    report = _base_report("adjoint", [name], tol)
    report["exists"] = True
    report["result"] = matrix_to_entries(adj)
    report["residuals"] = _round_map(
        {"(A~)~=A": float(np.linalg.norm(minkowski_adjoint(adj, metric) - matrix))}
    )
    return EXIT_OK, report


def _run_inverse(args, tol: Tolerances) -> tuple[int, dict]:
    name, matrix = read_matrix(args.file)
    metric = MinkowskiMetric(matrix.shape[0])
    kind = KIND_ALIASES[args.kind]
    route = args.route
    if route != "block" and kind is not ginv.InverseKind.m_core_ep:
        raise InputError(f"--route {route} is only available for --kind m-core-ep")

    report = _base_report("inverse", [name], tol)
    report["kind"] = args.kind
    try:
        if kind is ginv.InverseKind.minkowski:
            result = ginv.minkowski_inverse(matrix, metric, tol)
        elif kind is ginv.InverseKind.group:
            result = ginv.group_inverse(matrix, tol, metric)
        elif kind is ginv.InverseKind.drazin:
            result = ginv.drazin_inverse(matrix, tol, metric)
        elif kind is ginv.InverseKind.core_ep:
            result = ginv.core_ep_inverse(matrix, tol, metric)
        elif kind is ginv.InverseKind.m_core:
            result = ginv.m_core_inverse(matrix, metric, tol)
        elif route == "block":
            result = ginv.m_core_ep_inverse(matrix, metric, tol, seed=args.seed)
        elif route == "drazin":
            result = ginv.m_core_ep_via_drazin(matrix, metric, tol)
        elif route == "parts":
            result = ginv.m_core_ep_via_parts(matrix, metric, tol)
        else:  # oracle
            x = verify.oracle_m_core_ep(matrix, metric, tol)
            result = ginv.InverseReport(
                kind=ginv.InverseKind.m_core_ep,
                X=x,
                exists=True,
                residuals=verify.check_axioms(matrix, x, "m_core_ep", metric, tol),
                route="oracle-least-squares",
            )
    except NotInvertibleError as exc:
        report["exists"] = False
        report["result"] = None
        failed = exc.report
        report["residuals"] = _round_map(failed.residuals if failed else {})
        report["diagnostics"] = list(failed.diagnostics) if failed else [str(exc)]
        report["route"] = failed.route if failed else "existence-test"
        return EXIT_NEGATIVE, report

    report["exists"] = True
    report["route"] = result.route
    report["result"] = matrix_to_entries(result.X)
    report["residuals"] = _round_map(result.residuals)
    report["diagnostics"] = list(result.diagnostics)
    return EXIT_OK, report


def _run_decompose(args, tol: Tolerances) -> tuple[int, dict]:
    name, matrix = read_matrix(args.file)
    metric = MinkowskiMetric(matrix.shape[0])
    d = decomp.core_ep_decompose(matrix, tol, seed=args.seed)
    mb = decomp.metric_blocks(d, metric, tol)
    a1, a2 = decomp.extract_parts(d)
    report = _base_report("decompose", [name], tol)
    report["exists"] = True
    report["rank_of_core"] = d.r
    report["index"] = d.k
    report["g1_invertible"] = mb.g1_invertible
    report["g1_condition"] = mb.g1_condition
    report["decomposition"] = {
        "A1": matrix_to_entries(a1),
        "A2": matrix_to_entries(a2),
        "G1": matrix_to_entries(mb.G1),
        "G2": matrix_to_entries(mb.G2),
        "G3": matrix_to_entries(mb.G3),
        "G4": matrix_to_entries(mb.G4),
    }
    report["residuals"] = _round_map(
        {"A=A1+A2": float(np.linalg.norm(a1 + a2 - matrix))}
    )
    report["result"] = None
    return EXIT_OK, report


def _run_m_decompose(args, tol: Tolerances) -> tuple[int, dict]:
    name, matrix = read_matrix(args.file)
    metric = MinkowskiMetric(matrix.shape[0])
    report = _base_report("m-decompose", [name], tol)
    try:
        parts = decomp.m_core_ep_decompose(matrix, metric, tol, seed=args.seed)
    except NotInvertibleError as exc:
        report["exists"] = False
        report["result"] = None
        report["residuals"] = {}
        report["diagnostics"] = [str(exc)]
        return EXIT_NEGATIVE, report
    report["exists"] = True
    report["index"] = parts.k
    report["decomposition"] = {
        "A1hat": matrix_to_entries(parts.A1hat),
        "A2hat": matrix_to_entries(parts.A2hat),
    }
    report["residuals"] = _round_map(
        {"A=A1hat+A2hat": float(np.linalg.norm(parts.A1hat + parts.A2hat - matrix))}
    )
    report["result"] = None
    return EXIT_OK, report


def _run_order(args, tol: Tolerances) -> tuple[int, dict]:
    name_a, matrix_a = read_matrix(args.file_a)
    name_b, matrix_b = read_matrix(args.file_b)
    if matrix_a.shape != matrix_b.shape:
        raise InputError(
            f"{args.file_a} and {args.file_b} have different shapes "
            f"{matrix_a.shape} vs {matrix_b.shape}"
        )
    metric = MinkowskiMetric(matrix_a.shape[0])
    relation = args.relation
    report = _base_report("order", [name_a, name_b], tol)
    report["relation"] = relation
    try:
        if relation == "m-core":
            verdict = order.m_core_leq(matrix_a, matrix_b, metric, tol)
        else:
            verdict = order.m_core_ep_leq(matrix_a, matrix_b, metric, tol)
    except NotInvertibleError as exc:
        report["exists"] = False
        report["holds"] = False
        report["result"] = None
        report["residuals"] = {}
        report["diagnostics"] = [str(exc)]
        return EXIT_NEGATIVE, report
    report["exists"] = True
    report["holds"] = verdict.holds
    report["agree"] = verdict.agree
    report["indeterminate"] = verdict.indeterminate
    report["def_residuals"] = _round_map(verdict.def_residuals)
    report["char_residuals"] = _round_map(verdict.char_residuals)
    report["transfer_residuals"] = _round_map(verdict.transfer_residuals)
    if verdict.transfer_holds is not None:
        report["transfer_holds"] = verdict.transfer_holds
    report["threshold"] = verdict.threshold
    report["unmet_hypotheses"] = list(verdict.unmet_hypotheses)
    report["diagnostics"] = list(verdict.diagnostics)
    report["result"] = None
    if verdict.indeterminate:
        return EXIT_NUMERICAL, report
    return EXIT_OK if verdict.holds else EXIT_NEGATIVE, report


def _run_exists(args, tol: Tolerances) -> tuple[int, dict]:
    name, matrix = read_matrix(args.file)
    metric = MinkowskiMetric(matrix.shape[0])
    kind = KIND_ALIASES[args.kind]
    report = _base_report("exists", [name], tol)
    report["kind"] = args.kind
    diagnostics: list[str] = []
    if kind in (ginv.InverseKind.drazin, ginv.InverseKind.core_ep):
        exists = True
    elif kind is ginv.InverseKind.m_core_ep:
        d = decomp.core_ep_decompose(matrix, tol)
        mb = decomp.metric_blocks(d, metric, tol)
        exists = ginv.m_core_ep_exists(matrix, metric, tol)
        if not exists:
            diagnostics.append("G1 singular")
        diagnostics.append(f"G1 condition number {mb.g1_condition:.6e}")
    else:
        try:
            if kind is ginv.InverseKind.minkowski:
                ginv.minkowski_inverse(matrix, metric, tol)
            elif kind is ginv.InverseKind.group:
                ginv.group_inverse(matrix, tol, metric)
            else:
                ginv.m_core_inverse(matrix, metric, tol)
            exists = True
        except NotInvertibleError as exc:
            exists = False
            diagnostics = list(exc.report.diagnostics) if exc.report else [str(exc)]
    report["exists"] = exists
    report["result"] = None
    report["residuals"] = {}
    report["diagnostics"] = diagnostics
    return (EXIT_OK if exists else EXIT_NEGATIVE), report


def _run_verify(args, tol: Tolerances) -> tuple[int, dict]:
    name_a, matrix_a = read_matrix(args.file_a)
    name_x, matrix_x = read_matrix(args.file_x)
    if matrix_a.shape != matrix_x.shape:
        raise InputError("A and X must share a shape")
    metric = MinkowskiMetric(matrix_a.shape[0])
    kind = KIND_ALIASES[args.kind]
    residuals = verify.check_axioms(matrix_a, matrix_x, kind.value, metric, tol)
    bound = tol.residual_tol * verify.residual_scale(matrix_a, matrix_x)
    ok = all(value <= bound for value in residuals.values())
    report = _base_report("verify", [name_a, name_x], tol)
    report["kind"] = args.kind
    report["exists"] = ok
    report["result"] = None
    report["residuals"] = _round_map(residuals)
    report["threshold"] = bound
    return (EXIT_OK if ok else EXIT_NEGATIVE), report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minkinv",
        description="Generalized inverses, decompositions, and orders in Minkowski space.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance")
    common.add_argument(
        "--json", dest="pretty", action="store_false", default=False, help="JSON output (default)"
    )
    common.add_argument("--pretty", dest="pretty", action="store_true", help="aligned text output")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized diagnostics")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("adjoint", parents=[common], help="metric adjoint G A* G")
    p.add_argument("file")
    p.set_defaults(handler=_run_adjoint)

    p = sub.add_parser("inverse", parents=[common], help="compute a generalized inverse")
    p.add_argument("--kind", required=True, choices=sorted(KIND_ALIASES))
    p.add_argument(
        "--route",
        choices=("block", "drazin", "parts", "oracle"),
        default="block",
        help="computation route (m-core-ep only)",
    )
    p.add_argument("file")
    p.set_defaults(handler=_run_inverse)

    p = sub.add_parser(
        "decompose", parents=[common], help="index/rank split with metric blocks"
    )
    p.add_argument("file")
    p.set_defaults(handler=_run_decompose)

    p = sub.add_parser(
        "m-decompose", parents=[common], help="metric-adapted splitting A1hat + A2hat"
    )
    p.add_argument("file")
    p.set_defaults(handler=_run_m_decompose)

    p = sub.add_parser("order", parents=[common], help="decide an order relation")
    p.add_argument("--relation", required=True, choices=("m-core", "m-core-ep"))
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(handler=_run_order)

    p = sub.add_parser("exists", parents=[common], help="existence test only")
    p.add_argument("--kind", required=True, choices=sorted(KIND_ALIASES))
    p.add_argument("file")
    p.set_defaults(handler=_run_exists)

    p = sub.add_parser(
        "verify", parents=[common], help="score a candidate inverse against the axioms"
    )
    p.add_argument("--kind", required=True, choices=sorted(KIND_ALIASES))
    p.add_argument("file_a")
    p.add_argument("file_x")
    p.set_defaults(handler=_run_verify)
    return parser


def _resolve_tol(args) -> Tolerances:
    residual = args.tol
    if residual is None:
        env = os.environ.get("MINKINV_TOL")
        if env is not None:
            try:
                residual = float(env)
            except ValueError as exc:
                raise InputError(f"MINKINV_TOL is not a float: {env!r}") from exc
    if residual is None:
        return Tolerances()
    try:
        return Tolerances(residual_tol=residual)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _resolve_tol(args)
        status, report = args.handler(args, tol)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DimensionMismatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DiagnosticError as exc:
        print(f"numerical diagnostic: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MinkinvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(report, args.pretty)
    return status


if __name__ == "__main__":
    sys.exit(main())
