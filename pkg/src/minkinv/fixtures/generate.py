"""Regenerate the bundled matrix files from their closed forms.

Each matrix is defined by a unitary U and an upper-triangular middle R with
A = U R U*; the entrywise closed forms (in square roots) are evaluated too
and must match the assembled product before anything is written.  Entries
are stored as [re, im] pairs at full double precision (repr round-trips).

Run as ``python -m minkinv.fixtures.generate``.
"""
from __future__ import annotations

import json
import math
import pathlib

import numpy as np

S2 = math.sqrt(2.0)
S3 = math.sqrt(3.0)
S5 = math.sqrt(5.0)
S6 = math.sqrt(6.0)


def _ex1():
    u = np.array(
        [
            [1 / S2, -1 / S3, 1 / S6],
            [0.0, 1 / S3, 2 / S6],
            [1 / S2, 1 / S3, -1 / S6],
        ]
    )
    mid = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    closed = np.array(
        [
            [(3 - S6 + S3 - S2) / 6, (S6 + 2 * S3 - 2 * S2) / 6, (3 + S6 - S3 + S2) / 6],
            [1 / (3 * S2), 2 / (3 * S2), -1 / (3 * S2)],
            [(3 - S6 + S3 + S2) / 6, (S6 + 2 * S3 + 2 * S2) / 6, (3 + S6 - S3 - S2) / 6],
        ]
    )
    return u, mid, closed


def _ex2():
    u = np.array([[2.0, 1.0, -2.0], [1.0, 2.0, 2.0], [-2.0, 2.0, -1.0]]) / 3.0
    mid = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    closed = np.array(
        [
            [0.0, 4 / 3, -1 / 3],
            [-1 / 3, 1.0, -1 / 3],
            [-2 / 3, -2 / 3, 0.0],
        ]
    )
    return u, mid, closed


def _ex3():
    u = np.array(
        [
            [2 / S5, 2 / (3 * S5), 1 / 3],
            [-1 / S5, 4 / (3 * S5), 2 / 3],
            [0.0, 5 / (3 * S5), -2 / 3],
        ]
    )
    mid = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]])
    closed = np.array(
        [
            [(16 + 4 * S5) / 15, (2 + 8 * S5) / 15, (10 - 8 * S5) / 15],
            [(-8 + 3 * S5) / 15, (-1 + 6 * S5) / 15, (-5 - 6 * S5) / 15],
            [S5 / 3, 2 * S5 / 3, -2 * S5 / 3],
        ]
    )
    return u, mid, closed


def build_all() -> dict[str, np.ndarray]:
    matrices: dict[str, np.ndarray] = {}
    for name, builder in (("ex1", _ex1), ("ex2", _ex2), ("ex3", _ex3)):
        u, mid, closed = builder()
        assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-14), f"{name}: U not unitary"
        assembled = u @ mid @ u.conj().T
        assert np.allclose(assembled, closed, atol=1e-13), f"{name}: closed form mismatch"
        matrices[name] = closed
    matrices["ex4a"] = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    matrices["ex4b"] = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    # Metric sanity: the leading 1x1 block of U* G U for the three index-2
    # cases must be 0, -1/9, and 3/5 respectively (first Schur vector = the
    # unit eigenvector of the eigenvalue 1, so u1* G u1 is U-independent).
    g = np.diag([1.0, -1.0, -1.0])
    for name, expected in (("ex1", 0.0), ("ex2", -1 / 9), ("ex3", 3 / 5)):
        u, _, _ = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3}[name]()
        g1 = (u.T @ g @ u)[0, 0]
        assert abs(g1 - expected) < 1e-13, f"{name}: G1 = {g1}, expected {expected}"
    return matrices


def write_all(target_dir: pathlib.Path | None = None) -> None:
    target = target_dir or pathlib.Path(__file__).resolve().parent
    for name, matrix in build_all().items():
        payload = {
            "n": matrix.shape[0],
            "name": name,
            "entries": [[[float(v), 0.0] for v in row] for row in matrix],
        }
        path = target / f"{name}.json"
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    write_all()
