"""Bundled demonstration matrices.

Five small real matrices exercising the interesting regimes of the library:

- ``ex1``: index 2, the leading metric block G1 is exactly 0, so the metric
  core-EP inverse does not exist.
- ``ex2``: index 2, G1 = -1/9, metric core-EP invertible; its core-EP and
  metric core-EP inverses differ.
- ``ex3``: index 2, G1 = 3/5; its plain and metric-adapted splittings have
  different index <= 1 parts but the same inverse.
- ``ex4a`` / ``ex4b``: a pair ordered both ways in the metric core-EP order
  while being distinct (the order is not antisymmetric).

The JSON files are regenerated by ``python -m minkinv.fixtures.generate``,
which evaluates the closed forms and checks their algebraic identities
before writing.
"""
from __future__ import annotations

import json
from importlib import resources

import numpy as np

NAMES = ("ex1", "ex2", "ex3", "ex4a", "ex4b")


def fixture_path(name: str):
    """Filesystem path of a bundled matrix file (context-manager-free for
    an installed package; the files ship inside the package directory)."""
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__) / f"{name}.json"


def load(name: str) -> np.ndarray:
    """Load a bundled matrix as a complex array."""
    with fixture_path(name).open("r", encoding="utf-8") as handle:
        payload = json.load(handle)
    entries = np.array(
        [[complex(re, im) for re, im in row] for row in payload["entries"]]
    )
    return entries
