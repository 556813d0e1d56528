"""Independent oracles and the shared axiom-residual checker.

The oracles here never touch the block formulas: the metric core-EP inverse
is recovered by solving its defining equations directly as a least-squares
problem, and random test matrices are built by running the decomposition in
reverse (choose U, T, S, N, assemble A).  Agreement between an oracle and a
block-formula result is the executable form of the uniqueness theorems.

Equation labels used in residual maps are exported as module constants so
reports and tests spell them identically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError, DimensionMismatchError
from .numlin import (
    EPS,
    PRODUCT_NOISE_FLOOR,
    MinkowskiMetric,
    Tolerances,
    as_matrix,
    as_square,
    fnorm,
    matrix_index,
    minkowski_adjoint,
    numerical_rank,
    power_rank,
    random_unitary,
)

__all__ = [
    "CanonicalCaseSpec",
    "generate_case",
    "oracle_m_core_ep",
    "oracle_minkowski",
    "check_axioms",
    "residual_scale",
    "AXIOM_LABELS",
]

# Equation labels, one per defining condition.
L_AXA = "AXA=A"
L_XAX = "XAX=X"
L_AX_MSYM = "(AX)~=AX"
L_XA_MSYM = "(XA)~=XA"
L_AXX = "AX^2=X"
L_AKXA = "A^kXA=A^k"
L_COMMUTE = "AX=XA"
L_XAK1 = "XA^(k+1)=A^k"
L_AX_HSYM = "(AX)*=AX"
L_RANGE = "range(X)<=range(A^k)"

AXIOM_LABELS = {
    "minkowski": (L_AXA, L_XAX, L_AX_MSYM, L_XA_MSYM),
    "group": (L_AKXA, L_XAX, L_COMMUTE),
    "drazin": (L_AKXA, L_XAX, L_COMMUTE),
    "core_ep": (L_XAK1, L_XAX, L_AX_HSYM, L_RANGE),
    "m_core": (L_AXA, L_AXX, L_AX_MSYM),
    "m_core_ep": (L_XAX, L_XAK1, L_AX_MSYM, L_RANGE),
}


def residual_scale(a: np.ndarray, x: np.ndarray) -> float:
    """(1 + |A|_F)(1 + |X|_F), the scale residuals are compared against."""
    return (1.0 + fnorm(a)) * (1.0 + fnorm(x))


@dataclass(frozen=True)
class CanonicalCaseSpec:
    """Recipe for one random test matrix assembled from canonical blocks.

    ``r`` is the rank of A^k and ``k`` the target index; ``r = n`` forces an
    invertible matrix (index 0), otherwise 1 <= k <= n - r since the
    nilpotent block of size n - r carries the index.  ``t_condition_cap``
    caps the diagonal spread of T (moduli drawn from [1/cap, 1]).
    """

    n: int
    r: int
    k: int
    seed: int
    t_condition_cap: float = 10.0

    def __post_init__(self):
        if not (0 <= self.r <= self.n):
            raise ValueError(f"need 0 <= r <= n, got r={self.r}, n={self.n}")
        if self.r == self.n:
            if self.k != 0:
                raise ValueError("r = n forces an invertible matrix, which has index 0")
        elif not (1 <= self.k <= self.n - self.r):
            raise ValueError(
                f"need 1 <= k <= n - r = {self.n - self.r} for r < n, got k={self.k}"
            )
        if not self.t_condition_cap >= 1.0:
            raise ValueError("t_condition_cap must be >= 1")


def _random_triangular_core(rng: np.random.Generator, r: int, cap: float) -> np.ndarray:
    t = 0.5 * np.triu(
        rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)), 1
    ).astype(complex)
    moduli = rng.uniform(1.0 / cap, 1.0, size=r)
    phases = np.exp(2j * np.pi * rng.uniform(size=r))
    t[np.diag_indices(r)] = moduli * phases
    return t


def _random_nilpotent(rng: np.random.Generator, m: int, k: int) -> np.ndarray:
    """m x m nilpotent with nilpotency index exactly k (1 <= k <= m).

    Built block-strictly-upper over a partition of m into k groups, with a
    deterministic chain through the group leaders so the (k-1)-th power is
    nonzero.
    """
    nil = np.zeros((m, m), dtype=complex)
    if k == 1:
        return nil
    sizes = [m // k + (1 if i < m % k else 0) for i in range(k)]
    starts = np.cumsum([0] + sizes)
    for i in range(k):
        for j in range(i + 1, k):
            block = rng.standard_normal((sizes[i], sizes[j])) + 1j * rng.standard_normal(
                (sizes[i], sizes[j])
            )
            nil[starts[i] : starts[i + 1], starts[j] : starts[j + 1]] = 0.5 * block
    for i in range(k - 1):
        nil[starts[i], starts[i + 1]] = 1.0
    return nil


def generate_case(
    spec: CanonicalCaseSpec,
    metric: MinkowskiMetric,
    tol: Tolerances | None = None,
    resample_budget: int = 64,
) -> np.ndarray:
    """Assemble A = U [[T, S], [0, N]] U* from random seeded blocks.

    The unitary is resampled until the leading r x r block of U* G U has
    condition number below 1e6, which guarantees the metric core-EP inverse
    of the result exists; the realized index and rank are re-measured and
    resampled on mismatch.  Exhausting the budget raises with the seed so
    the failure is reproducible.
    """
    tol = tol or Tolerances()
    if metric.n != spec.n:
        raise DimensionMismatchError(
            f"metric dimension {metric.n} does not match spec n={spec.n}"
        )
    rng = np.random.default_rng(spec.seed)
    n, r = spec.n, spec.r
    k_target = 0 if r == n else spec.k
    g = metric.materialize()
    for _ in range(resample_budget):
        t = _random_triangular_core(rng, r, spec.t_condition_cap)
        nil = _random_nilpotent(rng, n - r, spec.k) if r < n else np.zeros((0, 0), complex)
        s = rng.standard_normal((r, n - r)) + 1j * rng.standard_normal((r, n - r))
        u = random_unitary(n, rng)
        if r > 0:
            g1 = (u.conj().T @ g @ u)[:r, :r]
            sv = np.linalg.svd(g1, compute_uv=False)
            # smallest singular value floored well above the product-noise
            # level; this keeps the condition number far below 1e6
            if sv[-1] <= 1e-3 or sv[0] / sv[-1] >= 1e6:
                continue
        middle = np.zeros((n, n), dtype=complex)
        middle[:r, :r] = t
        middle[:r, r:] = s
        middle[r:, r:] = nil
        a = u @ middle @ u.conj().T
        if matrix_index(a, tol) != k_target:
            continue
        if power_rank(a, k_target, tol) != r:
            continue
        return a
    raise DiagnosticError(
        f"could not realize a case for n={n}, r={r}, k={spec.k} within "
        f"{resample_budget} resamples (seed {spec.seed})"
    )


def _transpose_perm(n: int) -> np.ndarray:
    """Permutation p with vec(Z^T) = vec(Z)[p] under column-major vec."""
    return np.arange(n * n).reshape((n, n), order="F").T.flatten(order="F")


def _real_stacked_lstsq(blocks, n_unknowns: int) -> np.ndarray:
    """Least-squares solve for complex z from equations  M z + C conj(z) = b.

    Each block is a triple (M, C, b) with M, C complex matrices (either may
    be None) acting on z in C^{n_unknowns}.  The system is stacked over the
    real and imaginary parts and solved with numpy's lstsq.
    """
    tops, bots, rhs_top, rhs_bot = [], [], [], []
    for m_op, c_op, b in blocks:
        rows = b.shape[0]
        zr = np.zeros((rows, n_unknowns))
        mr, mi = (m_op.real, m_op.imag) if m_op is not None else (zr, zr)
        cr, ci = (c_op.real, c_op.imag) if c_op is not None else (zr, zr)
        tops.append(np.hstack([mr + cr, -mi + ci]))
        bots.append(np.hstack([mi + ci, mr - cr]))
        rhs_top.append(b.real)
        rhs_bot.append(b.imag)
    system = np.vstack(tops + bots)
    rhs = np.concatenate(rhs_top + rhs_bot)
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return solution[:n_unknowns] + 1j * solution[n_unknowns:]


def _vec(a: np.ndarray) -> np.ndarray:
    return a.flatten(order="F")


def _unvec(v: np.ndarray, shape) -> np.ndarray:
    return v.reshape(shape, order="F")


def _msym_condition(left: np.ndarray, right: np.ndarray, g: np.ndarray, perm: np.ndarray):
    """Operator block for the condition (L Z R)~ = L Z R, i.e.

        G R* Z* L* G - L Z R = 0,

    returned as (M, C) with M acting on vec(Z) and C on conj(vec(Z))."""
    m_op = -np.kron(right.T, left)
    c_op = np.kron((left.conj().T @ g).T, g @ right.conj().T)[:, perm]
    return m_op, c_op


def oracle_m_core_ep(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> np.ndarray:
    """Solve the defining equations of the metric core-EP inverse directly.

    The range condition is enforced by construction (X = A^k Z), the two
    linear conditions X A^{k+1} = A^k and (AX)~ = AX become one stacked
    real least-squares system in the entries of Z, and the remaining
    nonlinear condition X A X = X is verified on the solution.  Any residual
    above tolerance (including the inconsistency produced by a matrix whose
    inverse does not exist) raises :class:`DiagnosticError`.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    if metric.n != arr.shape[0]:
        raise DimensionMismatchError("metric dimension does not match matrix size")
    n = arr.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    g = metric.materialize()
    perm = _transpose_perm(n)
    k = matrix_index(arr, tol)
    ak = np.linalg.matrix_power(arr, k)
    ak1 = ak @ arr
    eye = np.eye(n, dtype=complex)

    # A^k Z A^{k+1} = A^k  (complex-linear in Z)
    block_power = (np.kron(ak1.T, ak), None, _vec(ak))
    # (A * A^k Z)~ = A^{k+1} Z   (conjugate-linear)
    m_op, c_op = _msym_condition(ak1, eye, g, perm)
    block_sym = (m_op, c_op, np.zeros(n * n, dtype=complex))

    z = _unvec(_real_stacked_lstsq([block_power, block_sym], n * n), (n, n))
    x = ak @ z

    bound = tol.residual_tol * residual_scale(arr, x)
    gap_power = fnorm(x @ ak1 - ak)
    gap_sym = fnorm(minkowski_adjoint(arr @ x, metric) - arr @ x)
    if gap_power > bound or gap_sym > bound:
        raise DiagnosticError(
            "least-squares solution violates the linear conditions "
            f"(|XA^(k+1)-A^k| = {gap_power:.3e}, |(AX)~-AX| = {gap_sym:.3e} > {bound:.3e}); "
            "the inverse does not exist or the system is numerically degenerate"
        )
    gap_outer = fnorm(x @ arr @ x - x)
    if gap_outer > bound:
        raise DiagnosticError(
            f"least-squares solution violates XAX=X (|XAX-X| = {gap_outer:.3e} > {bound:.3e})"
        )
    return x


def oracle_minkowski(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> np.ndarray:
    """Solve the Minkowski-inverse equations directly, independent of any
    factorization.

    The solution is parametrized as X = A~ Z A~ (which pins the range and
    null space of X and makes the linear system uniquely solvable), the
    conditions AXA = A, (AX)~ = AX and (XA)~ = XA are imposed by least
    squares, and XAX = X is verified on the result.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    if metric.n != arr.shape[0]:
        raise DimensionMismatchError("metric dimension does not match matrix size")
    n = arr.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    g = metric.materialize()
    perm = _transpose_perm(n)
    adj = minkowski_adjoint(arr, metric)

    # A (A~ Z A~) A = A
    block_one = (np.kron((adj @ arr).T, arr @ adj), None, _vec(arr))
    # (A X)~ = AX with AX = (A A~) Z A~
    m2, c2 = _msym_condition(arr @ adj, adj, g, perm)
    # (X A)~ = XA with XA = A~ Z (A~ A)
    m3, c3 = _msym_condition(adj, adj @ arr, g, perm)
    zero = np.zeros(n * n, dtype=complex)

    z = _unvec(
        _real_stacked_lstsq([block_one, (m2, c2, zero), (m3, c3, zero)], n * n), (n, n)
    )
    x = adj @ z @ adj

    bound = tol.residual_tol * residual_scale(arr, x)
    gaps = {
        L_AXA: fnorm(arr @ x @ arr - arr),
        L_AX_MSYM: fnorm(minkowski_adjoint(arr @ x, metric) - arr @ x),
        L_XA_MSYM: fnorm(minkowski_adjoint(x @ arr, metric) - x @ arr),
        L_XAX: fnorm(x @ arr @ x - x),
    }
    bad = {label: gap for label, gap in gaps.items() if gap > bound}
    if bad:
        raise DiagnosticError(
            f"least-squares solution violates {sorted(bad)} beyond {bound:.3e}; "
            "the Minkowski inverse does not exist or the system is degenerate"
        )
    return x


def _range_defect(x: np.ndarray, ak: np.ndarray, tol: Tolerances, scale: float) -> float:
    """|(I - P) X|_F with P the orthogonal projector onto the column space of A^k.

    ``scale`` floors the rank cutoff at the noise level of the computed
    power (||A||_2^k)."""
    if ak.size == 0:
        return fnorm(x)
    u, s, _ = np.linalg.svd(ak)
    level = max(EPS * float(s[0]), PRODUCT_NOISE_FLOOR * scale)
    rank = 0
    if level > 0.0:
        cutoff = tol.rank_tol_factor * max(ak.shape) * level
        rank = int(np.count_nonzero(s > cutoff))
    basis = u[:, :rank]
    return fnorm(x - basis @ (basis.conj().T @ x))


def check_axioms(a, x, kind: str, metric: MinkowskiMetric, tol: Tolerances | None = None) -> dict[str, float]:
    """Frobenius residual of every defining equation for the given inverse kind.

    Pure measurement: large residuals are reported, never raised.  ``kind``
    is one of ``minkowski, group, drazin, core_ep, m_core, m_core_ep``.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    ex = as_matrix(x)
    if ex.shape != arr.shape:
        raise DimensionMismatchError(
            f"inverse candidate shape {ex.shape} does not match matrix shape {arr.shape}"
        )
    if metric.n != arr.shape[0]:
        raise DimensionMismatchError("metric dimension does not match matrix size")
    kind = str(kind)
    if kind not in AXIOM_LABELS:
        raise ValueError(f"unknown inverse kind {kind!r}")

    k = matrix_index(arr, tol)
    ak = np.linalg.matrix_power(arr, k)
    power_scale = float(np.linalg.norm(arr, 2)) ** k if arr.shape[0] else 0.0
    ax = arr @ ex
    xa = ex @ arr
    values = {
        L_AXA: lambda: fnorm(arr @ ex @ arr - arr),
        L_XAX: lambda: fnorm(ex @ arr @ ex - ex),
        L_AX_MSYM: lambda: fnorm(minkowski_adjoint(ax, metric) - ax),
        L_XA_MSYM: lambda: fnorm(minkowski_adjoint(xa, metric) - xa),
        L_AXX: lambda: fnorm(arr @ ex @ ex - ex),
        L_AKXA: lambda: fnorm(ak @ ex @ arr - ak),
        L_COMMUTE: lambda: fnorm(ax - xa),
        L_XAK1: lambda: fnorm(ex @ (ak @ arr) - ak),
        L_AX_HSYM: lambda: fnorm(ax.conj().T - ax),
        L_RANGE: lambda: _range_defect(ex, ak, tol, power_scale),
    }
    return {label: values[label]() for label in AXIOM_LABELS[kind]}
