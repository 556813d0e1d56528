"""Every generalized inverse in the calculus, with residual-bearing reports.

Each operation returns an :class:`InverseReport` whose ``residuals`` map
records the Frobenius defect of every defining equation of that inverse
(labels come from :mod:`minkinv.verify`).  Existence failures raise the
typed ``Not*Invertible`` errors carrying an ``exists=False`` report; there
are deliberately no least-squares fallbacks, because these objects are
all-or-nothing.

Block formulas all flow through the shared core-EP decomposition, so every
route sees the same unitary; route-agreement entries in the residual maps
then isolate formula errors from decomposition noise.  The exception is the
Minkowski inverse, which has no block form in this calculus and is computed
from a rank-revealing full-rank factorization A = F H as

    X = G H* (F* G A G H*)^{-1} F* G,

which satisfies all four of its defining equations exactly when the
existence test rk(A~A) = rk(AA~) = rk(A) passes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .decomp import (
    CoreEPDecomp,
    core_ep_decompose,
    extract_parts,
    m_core_ep_decompose,
    metric_blocks,
)
from .errors import (
    DiagnosticError,
    NotCM,
    NotGroupInvertible,
    NotInvertibleError,
    NotMCoreEPInvertible,
    NotMCoreInvertible,
    NotMinkowskiInvertible,
)
from .numlin import (
    EPS,
    PRODUCT_NOISE_FLOOR,
    MinkowskiMetric,
    Tolerances,
    as_square,
    fnorm,
    matrix_index,
    minkowski_adjoint,
    numerical_rank,
)
from .verify import check_axioms, residual_scale

__all__ = [
    "InverseKind",
    "InverseReport",
    "minkowski_inverse",
    "group_inverse",
    "drazin_inverse",
    "core_ep_inverse",
    "m_core_inverse",
    "m_core_ep_exists",
    "m_core_ep_inverse",
    "m_core_ep_via_drazin",
    "m_core_ep_via_parts",
]


class InverseKind(str, enum.Enum):
    minkowski = "minkowski"
    group = "group"
    drazin = "drazin"
    core_ep = "core_ep"
    m_core = "m_core"
    m_core_ep = "m_core_ep"

    def __str__(self) -> str:  # report/CLI friendliness
        return self.value


@dataclass(frozen=True)
class InverseReport:
    """A computed inverse plus the residuals of its defining equations.

    When ``exists`` is false, ``X`` is ``None`` and ``residuals`` records the
    violated rank/invertibility test instead of equation residuals.
    ``route`` names the formula that produced ``X``.
    """

    kind: InverseKind
    X: np.ndarray | None
    exists: bool
    residuals: dict[str, float]
    route: str
    diagnostics: list[str] = field(default_factory=list)


def _finish(
    kind: InverseKind,
    a: np.ndarray,
    x: np.ndarray,
    metric: MinkowskiMetric,
    tol: Tolerances,
    route: str,
    extra: dict[str, float] | None = None,
    diagnostics: list[str] | None = None,
) -> InverseReport:
    residuals = check_axioms(a, x, kind.value, metric, tol)
    if extra:
        residuals.update(extra)
    bound = tol.residual_tol * residual_scale(a, x)
    bad = {label: value for label, value in residuals.items() if value > bound}
    if bad:
        raise DiagnosticError(
            f"{kind.value} inverse residuals exceed tolerance {bound:.3e}: "
            + ", ".join(f"{label}={value:.3e}" for label, value in sorted(bad.items()))
        )
    return InverseReport(
        kind=kind,
        X=x,
        exists=True,
        residuals=residuals,
        route=route,
        diagnostics=diagnostics or [],
    )


def _column_basis(m: np.ndarray, tol: Tolerances, scale: float | None) -> np.ndarray:
    """Orthonormal basis of col(M), rank decided at the given noise scale."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m)
    level = EPS * float(s[0])
    if scale is not None:
        level = max(level, PRODUCT_NOISE_FLOOR * scale)
    rank = 0
    if level > 0.0:
        cutoff = tol.rank_tol_factor * max(m.shape) * level
        rank = int(np.count_nonzero(s > cutoff))
    return u[:, :rank]


def _metric_gram_rank(
    m: np.ndarray, metric: MinkowskiMetric, tol: Tolerances, scale: float | None = None
) -> tuple[int, int]:
    """(rk(M), rk(M~M)) with the Gram rank computed in reduced form.

    rk(M~M) equals rk(Q* G Q) for any orthonormal basis Q of col(M), which
    sidesteps the squared conditioning of the explicit product: Q* G Q has
    unit scale, so its rank decision is as robust as the one for M itself.
    """
    basis = _column_basis(m, tol, scale)
    gram = basis.conj().T @ metric.mul_left(basis)
    return basis.shape[1], numerical_rank(gram, tol, scale=1.0)


def _corner(d: CoreEPDecomp, top_left: np.ndarray, top_right: np.ndarray) -> np.ndarray:
    """U [[TL, TR], [0, 0]] U* for r x r TL and r x (n-r) TR."""
    c = np.zeros((d.n, d.n), dtype=complex)
    c[: d.r, : d.r] = top_left
    c[: d.r, d.r :] = top_right
    return d.U @ c @ d.U.conj().T


def _tri_inv(t: np.ndarray) -> np.ndarray:
    if t.shape[0] == 0:
        return t
    return scipy.linalg.solve_triangular(t, np.eye(t.shape[0], dtype=complex))


def _g1t_inv(d: CoreEPDecomp, g1: np.ndarray) -> np.ndarray:
    """T^{-1} G1^{-1} = (G1 T)^{-1}, via a solve."""
    if d.r == 0:
        return np.zeros((0, 0), dtype=complex)
    return np.linalg.solve(g1 @ d.T, np.eye(d.r, dtype=complex))


def minkowski_inverse(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> InverseReport:
    """The unique X with AXA=A, XAX=X, (AX)~=AX, (XA)~=XA, when it exists.

    Existence is the rank test rk(A~A) = rk(AA~) = rk(A); the inverse is
    assembled from a pivoted-QR full-rank factorization.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    if metric.n != arr.shape[0]:
        raise NotInvertibleError("metric dimension does not match matrix size")
    n = arr.shape[0]
    adj = minkowski_adjoint(arr, metric)
    rank = numerical_rank(arr, tol)
    _, rank_left = _metric_gram_rank(arr, metric, tol)  # rk(A~A)
    _, rank_right = _metric_gram_rank(adj, metric, tol)  # rk(AA~) = rk((A~)~A~)
    if not (rank_left == rank_right == rank):
        report = InverseReport(
            kind=InverseKind.minkowski,
            X=None,
            exists=False,
            residuals={
                "rk(A~A)-rk(A)": float(rank_left - rank),
                "rk(AA~)-rk(A)": float(rank_right - rank),
            },
            route="existence-test",
            diagnostics=[
                f"rk(A)={rank}, rk(A~A)={rank_left}, rk(AA~)={rank_right}"
            ],
        )
        raise NotMinkowskiInvertible(
            f"rank test failed: rk(A~A)={rank_left}, rk(AA~)={rank_right}, rk(A)={rank}",
            report=report,
        )

    if rank == 0:
        x = np.zeros((n, n), dtype=complex)
        return _finish(InverseKind.minkowski, arr, x, metric, tol, "full-rank-factorization")

    q, rmat, piv = scipy.linalg.qr(arr, pivoting=True)
    f = q[:, :rank]
    h = np.zeros((rank, n), dtype=complex)
    h[:, piv] = rmat[:rank, :]
    split_gap = fnorm(arr - f @ h)
    if split_gap > tol.residual_tol * (1.0 + fnorm(arr)):
        raise DiagnosticError(
            f"rank-revealing QR disagrees with the SVD rank: |A - FH| = {split_gap:.3e}"
        )
    gag = metric.mul_right(metric.mul_left(arr))
    middle = f.conj().T @ gag @ h.conj().T
    cond = np.linalg.cond(middle)
    if not np.isfinite(cond) or cond >= 1.0 / (n * EPS):
        raise DiagnosticError(
            f"F* G A G H* is numerically singular (condition {cond:.3e}) although the "
            "rank test passed; the input sits on the existence boundary"
        )
    x = metric.mul_left(h.conj().T @ np.linalg.solve(middle, metric.mul_right(f.conj().T)))
    return _finish(InverseKind.minkowski, arr, x, metric, tol, "full-rank-factorization")


def group_inverse(a, tol: Tolerances | None = None, metric: MinkowskiMetric | None = None) -> InverseReport:
    """Group inverse of an index <= 1 matrix: X = U [[T^-1, T^-2 S], [0, 0]] U*."""
    tol = tol or Tolerances()
    arr = as_square(a)
    metric = metric or MinkowskiMetric(arr.shape[0])
    k = matrix_index(arr, tol)
    if k > 1:
        report = InverseReport(
            kind=InverseKind.group,
            X=None,
            exists=False,
            residuals={"index(A)-1": float(k - 1)},
            route="existence-test",
            diagnostics=[f"index(A)={k} exceeds 1"],
        )
        raise NotGroupInvertible(f"matrix has index {k} > 1", report=report)
    d = core_ep_decompose(arr, tol)
    ti = _tri_inv(d.T)
    x = _corner(d, ti, ti @ (ti @ d.S))
    return _finish(InverseKind.group, arr, x, metric, tol, "block-formula")


def drazin_inverse(a, tol: Tolerances | None = None, metric: MinkowskiMetric | None = None) -> InverseReport:
    """Drazin inverse, computed two ways and cross-checked.

    Route one is A^k (A^{k+1})^group; route two is the block formula
    U [[T^-1, T^-(k+2) Tbar], [0, 0]] U* with Tbar the (1,2) block of
    U* A^{k+1} U.  The returned X is the block-formula one; the agreement
    gap is recorded under ``route-agreement``.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    metric = metric or MinkowskiMetric(arr.shape[0])
    d = core_ep_decompose(arr, tol)
    ak = np.linalg.matrix_power(arr, d.k)
    ak1 = ak @ arr

    x_power = ak @ group_inverse(ak1, tol).X

    tbar = (d.U.conj().T @ ak1 @ d.U)[: d.r, d.r :]
    if d.r:
        top_right = scipy.linalg.solve_triangular(
            np.linalg.matrix_power(d.T, d.k + 2), tbar
        )
    else:
        top_right = tbar
    x_block = _corner(d, _tri_inv(d.T), top_right)

    gap = fnorm(x_power - x_block)
    bound = tol.residual_tol * residual_scale(arr, x_block)
    if gap > bound:
        raise DiagnosticError(
            f"Drazin routes disagree: |A^k(A^(k+1))^group - block| = {gap:.3e} > {bound:.3e}"
        )
    return _finish(
        InverseKind.drazin,
        arr,
        x_block,
        metric,
        tol,
        "block-formula",
        extra={"route-agreement": gap},
    )


def core_ep_inverse(a, tol: Tolerances | None = None, metric: MinkowskiMetric | None = None) -> InverseReport:
    """Core-EP inverse (Hermitian symmetry): X = U [[T^-1, 0], [0, 0]] U*."""
    tol = tol or Tolerances()
    arr = as_square(a)
    metric = metric or MinkowskiMetric(arr.shape[0])
    d = core_ep_decompose(arr, tol)
    x = _corner(d, _tri_inv(d.T), np.zeros((d.r, d.n - d.r), dtype=complex))
    return _finish(InverseKind.core_ep, arr, x, metric, tol, "block-formula")


def _existence_cross_check(
    arr: np.ndarray, d: CoreEPDecomp, metric: MinkowskiMetric, tol: Tolerances
) -> tuple[bool, "object", dict[str, float], list[str]]:
    """Rank test rk((A^k)~A^k) = rk(A^k) cross-checked against G1 invertibility."""
    ak = np.linalg.matrix_power(arr, d.k)
    power_scale = float(np.linalg.norm(arr, 2)) ** d.k if arr.shape[0] else 0.0
    rank_ak, rank_gram = _metric_gram_rank(ak, metric, tol, scale=power_scale)
    rank_ok = rank_gram == rank_ak
    mb = metric_blocks(d, metric, tol)
    if rank_ok != mb.g1_invertible:
        raise DiagnosticError(
            "existence tests disagree: "
            f"rk((A^k)~A^k)={rank_gram} vs rk(A^k)={rank_ak}, while G1 "
            f"{'is' if mb.g1_invertible else 'is not'} invertible "
            f"(condition {mb.g1_condition:.3e}); the input sits on the existence boundary"
        )
    failure = {
        "rk((A^k)~A^k)-rk(A^k)": float(rank_gram - rank_ak),
    }
    notes = [
        f"rk(A^k)={rank_ak}, rk((A^k)~A^k)={rank_gram}",
        f"G1 condition number {mb.g1_condition:.6e}",
    ]
    return rank_ok, mb, failure, notes


def m_core_inverse(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> InverseReport:
    """m-core inverse of an index <= 1 matrix: the unique X with AXA=A,
    AX^2=X, (AX)~=AX; exists iff rk(A~A) = rk(A), equivalently iff the
    leading metric block is invertible."""
    tol = tol or Tolerances()
    arr = as_square(a)
    k = matrix_index(arr, tol)
    if k > 1:
        report = InverseReport(
            kind=InverseKind.m_core,
            X=None,
            exists=False,
            residuals={"index(A)-1": float(k - 1)},
            route="existence-test",
            diagnostics=[f"index(A)={k} exceeds 1"],
        )
        raise NotCM(f"matrix has index {k} > 1", report=report)
    d = core_ep_decompose(arr, tol)
    rank, rank_gram = _metric_gram_rank(arr, metric, tol)
    mb = metric_blocks(d, metric, tol)
    if (rank_gram == rank) != mb.g1_invertible:
        raise DiagnosticError(
            f"existence tests disagree: rk(A~A)={rank_gram} vs rk(A)={rank}, while G1 "
            f"{'is' if mb.g1_invertible else 'is not'} invertible "
            f"(condition {mb.g1_condition:.3e})"
        )
    if rank_gram != rank:
        report = InverseReport(
            kind=InverseKind.m_core,
            X=None,
            exists=False,
            residuals={"rk(A~A)-rk(A)": float(rank_gram - rank)},
            route="existence-test",
            diagnostics=[f"rk(A)={rank}, rk(A~A)={rank_gram}", "G1 singular"],
        )
        raise NotMCoreInvertible(
            f"rank test failed: rk(A~A)={rank_gram} != rk(A)={rank}", report=report
        )
    x = metric.mul_right(
        _corner(d, _g1t_inv(d, mb.G1), np.zeros((d.r, d.n - d.r), dtype=complex))
    )
    return _finish(InverseKind.m_core, arr, x, metric, tol, "block-formula")


def m_core_ep_exists(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> bool:
    """True iff rk((A^k)~ A^k) = rk(A^k), cross-checked against the
    invertibility of the leading metric block; a disagreement between the
    two tests raises :class:`DiagnosticError`."""
    tol = tol or Tolerances()
    arr = as_square(a)
    d = core_ep_decompose(arr, tol)
    exists, _, _, _ = _existence_cross_check(arr, d, metric, tol)
    return exists


def m_core_ep_inverse(
    a, metric: MinkowskiMetric, tol: Tolerances | None = None, seed: int | None = None
) -> InverseReport:
    """The metric core-EP inverse: the unique X with XAX=X, XA^(k+1)=A^k,
    (AX)~=AX, range(X) inside range(A^k); block formula
    X = U [[T^-1 G1^-1, 0], [0, 0]] U* G."""
    tol = tol or Tolerances()
    arr = as_square(a)
    d = core_ep_decompose(arr, tol, seed=seed)
    exists, mb, failure, notes = _existence_cross_check(arr, d, metric, tol)
    if not exists:
        report = InverseReport(
            kind=InverseKind.m_core_ep,
            X=None,
            exists=False,
            residuals=failure,
            route="existence-test",
            diagnostics=notes + ["G1 singular"],
        )
        raise NotMCoreEPInvertible(
            "rank test failed: " + notes[0], report=report
        )
    x = metric.mul_right(
        _corner(d, _g1t_inv(d, mb.G1), np.zeros((d.r, d.n - d.r), dtype=complex))
    )
    return _finish(
        InverseKind.m_core_ep, arr, x, metric, tol, "block-formula", diagnostics=notes
    )


def m_core_ep_via_drazin(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> InverseReport:
    """The identity X = A^k A^drazin (A^k)^m-core, cross-checked against the
    block formula."""
    tol = tol or Tolerances()
    arr = as_square(a)
    block = m_core_ep_inverse(arr, metric, tol)
    k = matrix_index(arr, tol)
    ak = np.linalg.matrix_power(arr, k)
    try:
        x = ak @ drazin_inverse(arr, tol, metric).X @ m_core_inverse(ak, metric, tol).X
    except NotInvertibleError as exc:
        raise DiagnosticError(
            f"existence tests disagreed between routes: {exc}"
        ) from exc
    gap = fnorm(x - block.X)
    bound = tol.residual_tol * residual_scale(arr, block.X)
    if gap > bound:
        raise DiagnosticError(
            f"Drazin route disagrees with the block formula: {gap:.3e} > {bound:.3e}"
        )
    return _finish(
        InverseKind.m_core_ep,
        arr,
        x,
        metric,
        tol,
        "power-drazin-product",
        extra={"route-agreement": gap},
    )


def m_core_ep_via_parts(a, metric: MinkowskiMetric, tol: Tolerances | None = None) -> InverseReport:
    """The metric core-EP inverse through the splittings of A.

    Three routes: the m-core inverse of the index <= 1 part A1, the product
    A1^group A1 A1^minkowski (only when the extra rank condition
    rk(A^k (A^k)~) = rk(A^k) holds), and the m-core inverse of the
    metric-adapted part A1hat.  All computed routes must agree pairwise;
    the A1 route is returned.
    """
    tol = tol or Tolerances()
    arr = as_square(a)
    d = core_ep_decompose(arr, tol)
    exists, _, failure, notes = _existence_cross_check(arr, d, metric, tol)
    if not exists:
        report = InverseReport(
            kind=InverseKind.m_core_ep,
            X=None,
            exists=False,
            residuals=failure,
            route="existence-test",
            diagnostics=notes + ["G1 singular"],
        )
        raise NotMCoreEPInvertible("rank test failed: " + notes[0], report=report)

    a1, _ = extract_parts(d)
    diagnostics = list(notes)
    try:
        x_cm = m_core_inverse(a1, metric, tol).X
        x_hat = m_core_inverse(m_core_ep_decompose(arr, metric, tol).A1hat, metric, tol).X
    except NotInvertibleError as exc:
        raise DiagnosticError(f"existence tests disagreed between routes: {exc}") from exc

    extra: dict[str, float] = {}
    bound = tol.residual_tol * residual_scale(arr, x_cm)
    gap_hat = fnorm(x_cm - x_hat)
    extra["route-agreement(cm-part,hat-part)"] = gap_hat
    if gap_hat > bound:
        raise DiagnosticError(
            f"splitting routes disagree: |A1 route - A1hat route| = {gap_hat:.3e} > {bound:.3e}"
        )

    power_scale = float(np.linalg.norm(arr, 2)) ** d.k if arr.shape[0] else 0.0
    ak_adj = minkowski_adjoint(np.linalg.matrix_power(arr, d.k), metric)
    # rk(A^k (A^k)~) = rk((B)~B) for B = (A^k)~
    rank_ak, rank_right_gram = _metric_gram_rank(ak_adj, metric, tol, scale=power_scale)
    right_gram_ok = rank_right_gram == rank_ak
    if right_gram_ok:
        try:
            x_sharp = group_inverse(a1, tol).X @ a1 @ minkowski_inverse(a1, metric, tol).X
        except NotInvertibleError as exc:
            diagnostics.append(
                f"sharp-product route skipped: borderline existence failure ({exc})"
            )
        else:
            gap_sharp = fnorm(x_cm - x_sharp)
            extra["route-agreement(cm-part,sharp-product)"] = gap_sharp
            if gap_sharp > bound:
                raise DiagnosticError(
                    "splitting routes disagree: |A1 route - sharp-product route| = "
                    f"{gap_sharp:.3e} > {bound:.3e}"
                )
    else:
        diagnostics.append(
            "sharp-product route skipped: rk(A^k(A^k)~) != rk(A^k)"
        )

    return _finish(
        InverseKind.m_core_ep,
        arr,
        x_cm,
        metric,
        tol,
        "cm-part-m-core",
        extra=extra,
        diagnostics=diagnostics,
    )
