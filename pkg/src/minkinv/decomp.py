"""Core-EP style decompositions and the metric partition.

A square A with index k and r = rank(A^k) splits as A = A1 + A2 where, for
some unitary U,

    A = U [[T, S], [0, N]] U*,   A1 = U [[T, S], [0, 0]] U*,
                                 A2 = U [[0, 0], [0, N]] U*,

with T (r x r) invertible and N nilpotent (N^k = 0).  The partition of
U* G U at row/column r,

    U* G U = [[G1, G2], [G3, G4]],

decides everything metric-related: the leading block G1 is nonsingular
exactly when rank((A^k)~ A^k) = rank(A^k), and in that case A also has the
metric-adapted splitting A = A1hat + A2hat with

    A1hat = U [[T, S + G1^{-1} G2 N], [0, 0]] U*,
    A2hat = U [[0, -G1^{-1} G2 N], [0, N]] U*,

which satisfies A1hat~ A2hat = A2hat A1hat = 0 and A2hat^k = 0.  A1hat is
unique (independent of U) and can equivalently be obtained through the
projection forms A^k (A^k)^m-core A and A X A with X the metric core-EP
inverse; both are computed and cross-checked in
:func:`m_core_ep_parts_via_projection`.

The unitary U itself is *not* canonical.  ``core_ep_decompose`` accepts a
``seed``: when given, the Schur factorization is run on W A W* for a random
unitary W and U = W* Z, which produces a different but equally valid U.
Downstream quantities that are U-independent must agree across seeds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DiagnosticError, DimensionMismatchError, NotMCoreEPInvertible
from .numlin import (
    EPS,
    PRODUCT_NOISE_FLOOR,
    MinkowskiMetric,
    Tolerances,
    as_square,
    fnorm,
    matrix_index,
    power_rank,
    random_unitary,
)

__all__ = [
    "CoreEPDecomp",
    "MetricBlocks",
    "MCoreEPDecomp",
    "core_ep_decompose",
    "extract_parts",
    "metric_blocks",
    "m_core_ep_decompose",
    "m_core_ep_parts_via_projection",
]


@dataclass(frozen=True)
class CoreEPDecomp:
    """Unitary U and blocks T, S, N with A = U [[T, S], [0, N]] U*.

    T is r x r upper triangular and invertible (its diagonal holds the
    eigenvalues classified as nonzero); N is (n-r) x (n-r) upper triangular
    with diagonal magnitudes below the zero-classification split, and
    N^k ~ 0 at working precision.  r = rank(A^k) and k is the index of A.
    """

    U: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    r: int
    k: int

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def middle(self) -> np.ndarray:
        """The block matrix [[T, S], [0, N]] (equals U* A U)."""
        m = np.zeros((self.n, self.n), dtype=complex)
        m[: self.r, : self.r] = self.T
        m[: self.r, self.r :] = self.S
        m[self.r :, self.r :] = self.N
        return m

    def assemble(self) -> np.ndarray:
        """Reconstruct A = U [[T, S], [0, N]] U*."""
        return self.U @ self.middle() @ self.U.conj().T


@dataclass(frozen=True)
class MetricBlocks:
    """Partition of U* G U at row/column r, plus diagnostics for G1.

    G1 is Hermitian and G3 = G2* because U* G U is Hermitian.
    ``g1_invertible`` reports whether the smallest singular value of G1
    clears the rank cutoff; ``g1_condition`` is sigma_max/sigma_min
    (``inf`` when singular, 1.0 for the empty block).
    """

    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray
    G4: np.ndarray
    g1_invertible: bool
    g1_condition: float


@dataclass(frozen=True)
class MCoreEPDecomp:
    """The metric-adapted splitting A = A1hat + A2hat (index k).

    A1hat has index <= 1 with rank(A1hat~ A1hat) = rank(A1hat), A2hat^k = 0,
    and A1hat~ A2hat = A2hat A1hat = 0.  The splitting is unique when it
    exists.
    """

    A1hat: np.ndarray
    A2hat: np.ndarray
    k: int


def _schur_complex(a: np.ndarray, sort=None):
    try:
        if sort is None:
            t, z = scipy.linalg.schur(a, output="complex")
            return t, z, None
        return scipy.linalg.schur(a, output="complex", sort=sort)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:  # pragma: no cover
        raise DiagnosticError(f"Schur factorization failed to converge: {exc}") from exc


def core_ep_decompose(a, tol: Tolerances | None = None, seed: int | None = None) -> CoreEPDecomp:
    """Split A into its invertible-core and nilpotent blocks via ordered Schur.

    The index k comes from the rank-of-powers definition and r = rank(A^k);
    the complex Schur form is then reordered so the r eigenvalues of largest
    modulus lead.  The split point is the geometric midpoint of the moduli
    across the rank boundary; if the r-th largest modulus does not clear the
    floor ``eig_zero_factor * n * eps * ||A||_2``, or the reordering cannot
    realize the rank-demanded split, the spectral and rank views of A
    disagree and a :class:`DiagnosticError` reports the conflict.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    n = arr.shape[0]
    k = matrix_index(arr, tol)
    r = power_rank(arr, k, tol)

    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return CoreEPDecomp(U=empty, T=empty, S=empty, N=empty, r=0, k=0)

    if seed is None:
        w = None
        b = arr
    else:
        w = random_unitary(n, np.random.default_rng(seed))
        b = w @ arr @ w.conj().T

    if r in (0, n):
        t_full, z, _ = _schur_complex(b)
    else:
        try:
            moduli = np.sort(np.abs(np.linalg.eigvals(b)))[::-1]
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise DiagnosticError(f"eigenvalue computation failed: {exc}") from exc
        m_keep, m_drop = float(moduli[r - 1]), float(moduli[r])
        floor = tol.eig_zero_factor * n * EPS * float(np.linalg.norm(b, 2))
        if m_keep <= floor:
            raise DiagnosticError(
                "spectral split conflicts with rank of powers: "
                f"rank(A^{k}) = {r} but the {r}-th largest eigenvalue modulus "
                f"{m_keep:.3e} is below the zero floor {floor:.3e}"
            )
        if m_drop >= m_keep:
            raise DiagnosticError(
                "spectral split is ambiguous: eigenvalue moduli "
                f"{m_keep:.3e} and {m_drop:.3e} straddle the rank boundary without a gap"
            )
        tau = np.sqrt(m_keep * m_drop) if m_drop > 0 else m_keep / 2.0
        t_full, z, sdim = _schur_complex(b, sort=lambda lam: abs(lam) > tau)
        if sdim != r:
            raise DiagnosticError(
                f"Schur reordering produced a leading block of size {sdim}, "
                f"but rank(A^{k}) = {r}"
            )

    u = z if w is None else w.conj().T @ z
    t = t_full[:r, :r]
    s = t_full[:r, r:]
    nil = np.triu(t_full[r:, r:])
    return CoreEPDecomp(U=u, T=t, S=s, N=nil, r=r, k=k)


def extract_parts(d: CoreEPDecomp) -> tuple[np.ndarray, np.ndarray]:
    """The unique splitting A = A1 + A2 with A1 of index <= 1, A2^k = 0, and
    A1* A2 = A2 A1 = 0.  Invertible A gives (A, 0); nilpotent A gives (0, A)."""
    n, r = d.n, d.r
    c1 = np.zeros((n, n), dtype=complex)
    c1[:r, :r] = d.T
    c1[:r, r:] = d.S
    c2 = np.zeros((n, n), dtype=complex)
    c2[r:, r:] = d.N
    uh = d.U.conj().T
    return d.U @ c1 @ uh, d.U @ c2 @ uh


def metric_blocks(d: CoreEPDecomp, metric: MinkowskiMetric, tol: Tolerances | None = None) -> MetricBlocks:
    """Partition U* G U at row/column r and test the leading block.

    ``g1_invertible`` is true exactly when the smallest singular value of G1
    exceeds the rank cutoff, which by the existence theory decides whether
    the metric core-EP inverse of A exists.
    """
    tol = tol or Tolerances()
    if metric.n != d.n:
        raise DimensionMismatchError(
            f"metric dimension {metric.n} does not match decomposition size {d.n}"
        )
    m = d.U.conj().T @ metric.mul_left(d.U)
    r = d.r
    g1 = m[:r, :r]
    if r == 0:
        invertible, condition = True, 1.0
    else:
        s = np.linalg.svd(g1, compute_uv=False)
        smax, smin = float(s[0]), float(s[-1])
        # G1 is a principal block of the unitary congruence of the metric,
        # whose 2-norm is exactly 1: that is the noise scale of its entries.
        cutoff = tol.rank_tol_factor * r * max(EPS * smax, PRODUCT_NOISE_FLOOR)
        invertible = smin > cutoff
        condition = smax / smin if invertible else float("inf")
    return MetricBlocks(
        G1=g1,
        G2=m[:r, r:],
        G3=m[r:, :r],
        G4=m[r:, r:],
        g1_invertible=invertible,
        g1_condition=condition,
    )


def _coupling_block(mb: MetricBlocks, nil: np.ndarray) -> np.ndarray:
    """G1^{-1} G2 N, via a solve rather than an explicit inverse."""
    if mb.G1.shape[0] == 0 or nil.shape[0] == 0:
        return np.zeros((mb.G1.shape[0], nil.shape[1]), dtype=complex)
    return np.linalg.solve(mb.G1, mb.G2 @ nil)


def m_core_ep_decompose(
    a, metric: MinkowskiMetric, tol: Tolerances | None = None, seed: int | None = None
) -> MCoreEPDecomp:
    """Metric-adapted splitting from the block formulas.

    Raises :class:`NotMCoreEPInvertible` when the leading metric block G1 is
    singular, i.e. when the existence condition rank((A^k)~ A^k) = rank(A^k)
    fails.
    """
    tol = tol or Tolerances()
    d = core_ep_decompose(a, tol, seed=seed)
    mb = metric_blocks(d, metric, tol)
    if not mb.g1_invertible:
        raise NotMCoreEPInvertible(
            f"leading metric block G1 is singular (condition {mb.g1_condition:.3e}); "
            "the metric-adapted splitting does not exist"
        )
    n, r = d.n, d.r
    coupling = _coupling_block(mb, d.N)
    c1 = np.zeros((n, n), dtype=complex)
    c1[:r, :r] = d.T
    c1[:r, r:] = d.S + coupling
    c2 = np.zeros((n, n), dtype=complex)
    c2[:r, r:] = -coupling
    c2[r:, r:] = d.N
    uh = d.U.conj().T
    return MCoreEPDecomp(A1hat=d.U @ c1 @ uh, A2hat=d.U @ c2 @ uh, k=d.k)


def m_core_ep_parts_via_projection(
    a, metric: MinkowskiMetric, tol: Tolerances | None = None
) -> MCoreEPDecomp:
    """A1hat through the two projection identities, cross-checked.

    Computes A1hat both as A^k (A^k)^{m-core} A and as A X A with X the
    metric core-EP inverse of A; the two must agree within tolerance.
    Returns the first together with A2hat = A - A1hat.
    """
    from .ginv import m_core_ep_inverse, m_core_inverse

    tol = tol or Tolerances()
    arr = as_square(a)
    k = matrix_index(arr, tol)
    ak = np.linalg.matrix_power(arr, k)
    a1_power = ak @ m_core_inverse(ak, metric, tol).X @ arr
    x = m_core_ep_inverse(arr, metric, tol).X
    a1_inverse = arr @ x @ arr
    gap = fnorm(a1_power - a1_inverse)
    bound = tol.residual_tol * (1.0 + fnorm(arr)) * (1.0 + fnorm(a1_power))
    if gap > bound:
        raise DiagnosticError(
            f"projection forms of A1hat disagree: |difference| = {gap:.3e} > {bound:.3e}"
        )
    return MCoreEPDecomp(A1hat=a1_power, A2hat=arr - a1_power, k=k)
