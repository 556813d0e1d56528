"""Dense complex matrix kernel: metric, adjoint, numerical rank, and index.

All matrices are plain ``numpy`` arrays of ``complex128``.  Every function
treats its arguments as read-only and returns fresh arrays; no function keeps
internal state, so concurrent use on shared inputs is safe.

The ambient space is C^n equipped with the indefinite metric

    G = diag(1, -1, ..., -1),      G* = G,  G^2 = I,

and the adjoint of a square matrix with respect to it is A~ = G A* G.  The
adjoint is an involution and an anti-homomorphism: (A~)~ = A and
(AB)~ = B~ A~.  Multiplication by G is realized as an exact sign flip of
rows/columns, so adjoint residuals are bit-identical to the triple-product
definition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

EPS = float(np.finfo(np.float64).eps)

# Noise floor for matrices obtained as floating-point products: rounding
# scatters exact zeros to a few eps times the product of the factor norms,
# while every genuinely nonzero singular value this library works with sits
# many orders above eps^(2/3) times that scale.
PRODUCT_NOISE_FLOOR = EPS ** (2.0 / 3.0)

__all__ = [
    "EPS",
    "PRODUCT_NOISE_FLOOR",
    "Tolerances",
    "MinkowskiMetric",
    "as_matrix",
    "as_square",
    "fnorm",
    "minkowski_adjoint",
    "numerical_rank",
    "power_rank",
    "matrix_index",
    "random_unitary",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs shared by every module.

    ``rank_tol_factor`` scales the SVD rank cutoff
    ``max(m, n) * eps * sigma_max``; ``residual_tol`` bounds accepted
    defining-equation residuals; ``eig_zero_factor`` scales the floor below
    which no eigenvalue may be classified as part of the invertible block.
    """

    rank_tol_factor: float = 1.0
    residual_tol: float = 1e-8
    eig_zero_factor: float = 1.0

    def __post_init__(self):
        for name in ("rank_tol_factor", "residual_tol", "eig_zero_factor"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class MinkowskiMetric:
    """The metric diag(1, -I_{n-1}) on C^n."""

    n: int

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 0):
            raise ValueError(f"metric dimension must be a nonnegative integer, got {self.n!r}")

    def materialize(self) -> np.ndarray:
        """Return G as a dense complex array: diag(1, -1, ..., -1)."""
        g = -np.eye(self.n, dtype=complex)
        if self.n:
            g[0, 0] = 1.0
        return g

    def mul_left(self, a: np.ndarray) -> np.ndarray:
        """G @ a, computed exactly by flipping the sign of rows 1..n-1."""
        if a.shape[0] != self.n:
            raise DimensionMismatchError(
                f"metric of size {self.n} cannot left-multiply shape {a.shape}"
            )
        out = a.copy()
        out[1:, :] = -out[1:, :]
        return out

    def mul_right(self, a: np.ndarray) -> np.ndarray:
        """a @ G, computed exactly by flipping the sign of columns 1..n-1."""
        if a.shape[1] != self.n:
            raise DimensionMismatchError(
                f"metric of size {self.n} cannot right-multiply shape {a.shape}"
            )
        out = a.copy()
        out[:, 1:] = -out[:, 1:]
        return out


def as_matrix(a) -> np.ndarray:
    """Validate and convert input to a finite complex128 2-d array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d matrix, got ndim={arr.ndim}")
    if arr.size and not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return arr


def as_square(a) -> np.ndarray:
    """Like :func:`as_matrix` but additionally require a square shape."""
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def fnorm(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a))


def minkowski_adjoint(a, metric: MinkowskiMetric) -> np.ndarray:
    """Adjoint with respect to the indefinite metric: G A* G.

    Applying it twice gives back A, and (AB)~ = B~ A~ for conformable
    products.  The two multiplications by G are exact sign flips.
    """
    arr = as_square(a)
    if arr.shape[0] != metric.n:
        raise DimensionMismatchError(
            f"matrix of shape {arr.shape} does not match metric dimension {metric.n}"
        )
    return metric.mul_right(metric.mul_left(arr.conj().T))


def numerical_rank(a, tol: Tolerances | None = None, scale: float | None = None) -> int:
    """Number of singular values above rank_tol_factor * max(m,n) * eps * sigma_max.

    The zero matrix (and the empty matrix) has rank 0.  For a matrix that
    was *computed* as a product, its entries carry rounding noise on the
    scale of the product of the factor norms rather than of its own largest
    singular value; pass that scale via ``scale`` and the cutoff is floored
    at eps^(2/3) times it, so a should-be-zero product does not read as
    full rank on its own noise.
    """
    tol = tol or Tolerances()
    arr = as_matrix(a)
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    level = EPS * float(s[0])
    if scale is not None:
        level = max(level, PRODUCT_NOISE_FLOOR * scale)
    if level == 0.0:
        return 0
    cutoff = tol.rank_tol_factor * max(arr.shape) * level
    return int(np.count_nonzero(s > cutoff))


def power_rank(a, k: int, tol: Tolerances | None = None) -> int:
    """rank(A^k) with the cutoff floored at the noise scale ||A||_2^k of the
    computed power (A^0 = I)."""
    tol = tol or Tolerances()
    arr = as_square(a)
    if arr.shape[0] == 0:
        return 0
    norm2 = float(np.linalg.norm(arr, 2))
    return numerical_rank(np.linalg.matrix_power(arr, k), tol, scale=norm2**k)


def clean_power(a, k: int, tol: Tolerances | None = None) -> np.ndarray:
    """A^k, flushed to exact zero when the power is zero at its noise scale.

    Formulas built from powers of a nilpotent-at-k matrix must see an exact
    zero, not the rounding residue of the product, or downstream rank and
    inversion decisions act on noise.
    """
    arr = as_square(a)
    p = np.linalg.matrix_power(arr, k)
    if power_rank(arr, k, tol) == 0:
        return np.zeros_like(p)
    return p


def matrix_index(a, tol: Tolerances | None = None) -> int:
    """Smallest k >= 0 with rank(A^(k+1)) = rank(A^k), taking A^0 = I.

    Invertible matrices have index 0; a matrix with rank(A^2) = rank(A) has
    index <= 1.  The result is at most n because the rank of the powers
    strictly decreases until it stabilizes.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    n = arr.shape[0]
    if n == 0:
        return 0
    norm2 = float(np.linalg.norm(arr, 2))
    power = np.eye(n, dtype=complex)
    rank_prev = n
    for k in range(n + 1):
        power = power @ arr
        rank = numerical_rank(power, tol, scale=norm2 ** (k + 1))
        if rank == rank_prev:
            return k
        rank_prev = rank
    return n


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian with the R diagonal
    phase-normalized, so results are reproducible from (seed, n)."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))
