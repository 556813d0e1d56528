"""The m-core and metric core-EP orders between matrix pairs.

A <= B in the m-core order (both index <= 1 and m-core invertible) means

    A^(m) A = A^(m) B   and   A A^(m) = B A^(m),

and in the metric core-EP order (both m-core-EP invertible)

    A^(E) A = A^(E) B   and   A A^(E) = B A^(E).

The EP order supports three routes: the definition above, the algebraic
characterization A^(k+1) = B A^k together with A~ A^k = B~ A^k, and the
transfer to the metric-adapted parts (A1hat <= B1hat in the m-core order).
The definitional verdict is authoritative; any unmet side hypothesis of the
characterization theorems (such as rk(B) >= rk(A)) is flagged rather than
resolved.

Verdicts use a hysteresis band: residuals within the tolerance mean the
order holds, residuals beyond 10x the tolerance mean it cleanly fails, and
anything in between is reported as indeterminate instead of being flipped
by noise.

:class:`OrderCanonicalSpec` packages the canonical block form that every
ordered pair admits; :func:`order_pair` runs it in reverse to manufacture
pairs that are ordered by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomp import m_core_ep_decompose
from .errors import DiagnosticError, DimensionMismatchError, NotInvertibleError
from .ginv import m_core_ep_inverse, m_core_inverse
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
    random_unitary,
)

__all__ = [
    "OrderVerdict",
    "OrderCanonicalSpec",
    "m_core_leq",
    "m_core_ep_leq",
    "order_pair",
    "random_order_spec",
]

HYSTERESIS = 10.0

L_DEF_LEFT_M = "A^(m)A=A^(m)B"
L_DEF_RIGHT_M = "AA^(m)=BA^(m)"
L_ABSORB_LEFT = "A^(m)BB^(m)=A^(m)"
L_ABSORB_RIGHT = "B^(m)BA^(m)=A^(m)"
L_DEF_LEFT_E = "A^(E)A=A^(E)B"
L_DEF_RIGHT_E = "AA^(E)=BA^(E)"
L_CHAR_POWER = "A^(k+1)=BA^k"
L_CHAR_ADJ = "A~A^k=B~A^k"


@dataclass(frozen=True)
class OrderVerdict:
    """Result of an order test by definition and by characterization.

    ``holds`` is the definitional verdict (all definitional residuals within
    ``threshold``); ``agree`` compares it with the characterization route
    when one exists.  ``indeterminate`` marks the hysteresis band where the
    residuals fail the tolerance but stay below 10x it.  ``transfer_holds``
    carries the metric-adapted-parts route for the EP order (None when not
    applicable or not computable).
    """

    relation: str
    holds: bool
    def_residuals: dict[str, float]
    char_residuals: dict[str, float]
    agree: bool
    threshold: float
    indeterminate: bool = False
    transfer_holds: bool | None = None
    transfer_residuals: dict[str, float] = field(default_factory=dict)
    unmet_hypotheses: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _band(residuals: dict[str, float], threshold: float) -> tuple[bool, bool]:
    worst = max(residuals.values(), default=0.0)
    holds = worst <= threshold
    indeterminate = (not holds) and worst <= HYSTERESIS * threshold
    return holds, indeterminate


def m_core_leq(a, b, metric: MinkowskiMetric, tol: Tolerances | None = None) -> OrderVerdict:
    """Decide A <= B in the m-core order.

    Both arguments must be m-core invertible (index <= 1 and passing the
    rank test); otherwise the corresponding ``Not*`` error propagates.  When
    the order holds, the absorbing identities A^(m) B B^(m) = A^(m) and
    B^(m) B A^(m) = A^(m) are recorded as consequence residuals.
    """
    tol = tol or Tolerances()
    arr_a = as_square(a)
    arr_b = as_square(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatchError("order arguments must share a shape")
    am = m_core_inverse(arr_a, metric, tol).X
    bm = m_core_inverse(arr_b, metric, tol).X

    threshold = tol.residual_tol * (1.0 + fnorm(arr_a)) * (1.0 + fnorm(arr_b)) * (1.0 + fnorm(am))
    def_residuals = {
        L_DEF_LEFT_M: fnorm(am @ arr_a - am @ arr_b),
        L_DEF_RIGHT_M: fnorm(arr_a @ am - arr_b @ am),
    }
    holds, indeterminate = _band(def_residuals, threshold)

    unmet = []
    if numerical_rank(arr_b, tol) < numerical_rank(arr_a, tol):
        unmet.append("rk(B)>=rk(A)")
    if holds:
        def_residuals[L_ABSORB_LEFT] = fnorm(am @ arr_b @ bm - am)
        def_residuals[L_ABSORB_RIGHT] = fnorm(bm @ arr_b @ am - am)

    return OrderVerdict(
        relation="m_core",
        holds=holds,
        def_residuals=def_residuals,
        char_residuals={},
        agree=True,
        threshold=threshold,
        indeterminate=indeterminate,
        unmet_hypotheses=unmet,
    )


def m_core_ep_leq(a, b, metric: MinkowskiMetric, tol: Tolerances | None = None) -> OrderVerdict:
    """Decide A <= B in the metric core-EP order by all three routes.

    The definitional route drives ``holds``; the characterization route
    (A^(k+1) = B A^k and A~ A^k = B~ A^k, residuals normalized by
    1 + |A^k|_F so both routes share one threshold) fills
    ``char_residuals`` and the ``agree`` flag; the transfer route compares
    the metric-adapted parts in the m-core order.
    """
    tol = tol or Tolerances()
    arr_a = as_square(a)
    arr_b = as_square(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatchError("order arguments must share a shape")

    ae = m_core_ep_inverse(arr_a, metric, tol).X
    m_core_ep_inverse(arr_b, metric, tol)  # existence gate for B

    threshold = tol.residual_tol * (1.0 + fnorm(arr_a)) * (1.0 + fnorm(arr_b)) * (1.0 + fnorm(ae))
    def_residuals = {
        L_DEF_LEFT_E: fnorm(ae @ arr_a - ae @ arr_b),
        L_DEF_RIGHT_E: fnorm(arr_a @ ae - arr_b @ ae),
    }
    holds, indeterminate = _band(def_residuals, threshold)

    k = matrix_index(arr_a, tol)
    ak = np.linalg.matrix_power(arr_a, k)
    norm_ak = 1.0 + fnorm(ak)
    char_residuals = {
        L_CHAR_POWER: fnorm(ak @ arr_a - arr_b @ ak) / norm_ak,
        L_CHAR_ADJ: fnorm(
            (minkowski_adjoint(arr_a, metric) - minkowski_adjoint(arr_b, metric)) @ ak
        )
        / norm_ak,
    }
    char_holds, _ = _band(char_residuals, threshold)

    unmet = []
    if numerical_rank(arr_b, tol) < numerical_rank(arr_a, tol):
        unmet.append("rk(B)>=rk(A)")

    diagnostics: list[str] = []
    transfer_holds: bool | None = None
    transfer_residuals: dict[str, float] = {}
    try:
        a1hat = m_core_ep_decompose(arr_a, metric, tol).A1hat
        b1hat = m_core_ep_decompose(arr_b, metric, tol).A1hat
        transfer = m_core_leq(a1hat, b1hat, metric, tol)
    except NotInvertibleError as exc:
        diagnostics.append(f"transfer route not computable: {exc}")
    else:
        transfer_holds = transfer.holds
        transfer_residuals = {f"hat:{key}": val for key, val in transfer.def_residuals.items()}

    return OrderVerdict(
        relation="m_core_ep",
        holds=holds,
        def_residuals=def_residuals,
        char_residuals=char_residuals,
        agree=holds == char_holds,
        threshold=threshold,
        indeterminate=indeterminate,
        transfer_holds=transfer_holds,
        transfer_residuals=transfer_residuals,
        unmet_hypotheses=unmet,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class OrderCanonicalSpec:
    """Block data of the canonical form shared by an EP-ordered pair.

    With partitions r (rank of the A core), s >= r (rank of the B core) and
    n, the pair assembles as

        A = U [[T, S1, S2], [0, N11, N12], [0, N13, N14]] U*,
        B = U [[T, alpha, beta], [0, Tt, Sh], [0, 0, Nh]] U*,

    where [[N11, N12], [N13, N14]] and Nh are nilpotent, T and Tt are
    invertible, and alpha, beta carry the metric coupling computed from the
    partition of U* G U.  Use :meth:`from_blocks` to build a validated spec
    with alpha/beta filled in.
    """

    Uhat: np.ndarray
    T: np.ndarray
    Ttilde: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    Shat: np.ndarray
    Nhat: np.ndarray
    N11hat: np.ndarray
    N12hat: np.ndarray
    N13hat: np.ndarray
    N14hat: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def n(self) -> int:
        return self.Uhat.shape[0]

    @property
    def r(self) -> int:
        return self.T.shape[0]

    @property
    def s(self) -> int:
        return self.r + self.Ttilde.shape[0]

    @classmethod
    def from_blocks(
        cls,
        Uhat,
        T,
        Ttilde,
        S1,
        S2,
        Shat,
        Nhat,
        N11hat,
        N12hat,
        N13hat,
        N14hat,
        metric: MinkowskiMetric,
        tol: Tolerances | None = None,
    ) -> "OrderCanonicalSpec":
        tol = tol or Tolerances()
        blocks = {
            "Uhat": as_square(Uhat),
            "T": as_square(T),
            "Ttilde": as_square(Ttilde),
            "S1": as_matrix(S1),
            "S2": as_matrix(S2),
            "Shat": as_matrix(Shat),
            "Nhat": as_square(Nhat),
            "N11hat": as_square(N11hat),
            "N12hat": as_matrix(N12hat),
            "N13hat": as_matrix(N13hat),
            "N14hat": as_square(N14hat),
        }
        n = blocks["Uhat"].shape[0]
        r = blocks["T"].shape[0]
        mid = blocks["Ttilde"].shape[0]
        tail = blocks["Nhat"].shape[0]
        s = r + mid
        if s + tail != n:
            raise DimensionMismatchError(
                f"partition r={r}, s={s}, n={n} does not add up with Nhat of size {tail}"
            )
        expected = {
            "S1": (r, mid),
            "S2": (r, tail),
            "Shat": (mid, tail),
            "N11hat": (mid, mid),
            "N12hat": (mid, tail),
            "N13hat": (tail, mid),
            "N14hat": (tail, tail),
        }
        for name, shape in expected.items():
            if blocks[name].shape != shape:
                raise DimensionMismatchError(
                    f"block {name} has shape {blocks[name].shape}, expected {shape}"
                )
        if metric.n != n:
            raise DimensionMismatchError("metric dimension does not match Uhat")
        if fnorm(blocks["Uhat"].conj().T @ blocks["Uhat"] - np.eye(n)) > tol.residual_tol * n:
            raise ValueError("Uhat is not unitary")

        n_full = np.block(
            [
                [blocks["N11hat"], blocks["N12hat"]],
                [blocks["N13hat"], blocks["N14hat"]],
            ]
        ) if n - r else np.zeros((0, 0), complex)
        for name, mat in (("[[N11,N12],[N13,N14]]", n_full), ("Nhat", blocks["Nhat"])):
            if mat.shape[0]:
                radius = float(np.max(np.abs(np.linalg.eigvals(mat))))
                if radius > 1e-4 * (1.0 + fnorm(mat)):
                    raise ValueError(f"{name} is not nilpotent (spectral radius {radius:.3e})")
        for name in ("T", "Ttilde"):
            mat = blocks[name]
            if mat.shape[0]:
                sv = np.linalg.svd(mat, compute_uv=False)
                if sv[-1] <= tol.rank_tol_factor * mat.shape[0] * EPS * sv[0]:
                    raise ValueError(f"{name} is singular")

        g = metric.materialize()
        m = blocks["Uhat"].conj().T @ g @ blocks["Uhat"]
        g1 = m[:r, :r]
        g21 = m[:r, r:s]
        g22 = m[:r, s:]
        ghat1 = m[:s, :s]
        for name, mat in (("G1", g1), ("Ghat1", ghat1)):
            if mat.shape[0]:
                sv = np.linalg.svd(mat, compute_uv=False)
                cutoff = tol.rank_tol_factor * mat.shape[0] * max(EPS * sv[0], PRODUCT_NOISE_FLOOR)
                if sv[-1] <= cutoff:
                    raise ValueError(f"metric block {name} is singular for this unitary")

        if r:
            alpha = blocks["S1"] + np.linalg.solve(
                g1, g21 @ (blocks["N11hat"] - blocks["Ttilde"]) + g22 @ blocks["N13hat"]
            )
            beta = blocks["S2"] + np.linalg.solve(
                g1,
                g21 @ (blocks["N12hat"] - blocks["Shat"])
                + g22 @ (blocks["N14hat"] - blocks["Nhat"]),
            )
        else:
            alpha = np.zeros((0, mid), dtype=complex)
            beta = np.zeros((0, tail), dtype=complex)
        return cls(
            Uhat=blocks["Uhat"],
            T=blocks["T"],
            Ttilde=blocks["Ttilde"],
            S1=blocks["S1"],
            S2=blocks["S2"],
            Shat=blocks["Shat"],
            Nhat=blocks["Nhat"],
            N11hat=blocks["N11hat"],
            N12hat=blocks["N12hat"],
            N13hat=blocks["N13hat"],
            N14hat=blocks["N14hat"],
            alpha=alpha,
            beta=beta,
        )


def order_pair(
    spec: OrderCanonicalSpec, metric: MinkowskiMetric, tol: Tolerances | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the EP-ordered pair (A, B) encoded by a canonical spec.

    The returned pair satisfies A <= B in the metric core-EP order by all
    three routes of :func:`m_core_ep_leq`.
    """
    tol = tol or Tolerances()
    n, r, s = spec.n, spec.r, spec.s
    if metric.n != n:
        raise DimensionMismatchError("metric dimension does not match the spec")
    g = metric.materialize()
    m = spec.Uhat.conj().T @ g @ spec.Uhat
    for name, mat in (("G1", m[:r, :r]), ("Ghat1", m[:s, :s])):
        if mat.shape[0]:
            sv = np.linalg.svd(mat, compute_uv=False)
            cutoff = tol.rank_tol_factor * mat.shape[0] * max(EPS * sv[0], PRODUCT_NOISE_FLOOR)
            if sv[-1] <= cutoff:
                raise ValueError(f"metric block {name} is singular for this unitary")

    mid_a = np.zeros((n, n), dtype=complex)
    mid_a[:r, :r] = spec.T
    mid_a[:r, r:s] = spec.S1
    mid_a[:r, s:] = spec.S2
    mid_a[r:s, r:s] = spec.N11hat
    mid_a[r:s, s:] = spec.N12hat
    mid_a[s:, r:s] = spec.N13hat
    mid_a[s:, s:] = spec.N14hat

    mid_b = np.zeros((n, n), dtype=complex)
    mid_b[:r, :r] = spec.T
    mid_b[:r, r:s] = spec.alpha
    mid_b[:r, s:] = spec.beta
    mid_b[r:s, r:s] = spec.Ttilde
    mid_b[r:s, s:] = spec.Shat
    mid_b[s:, s:] = spec.Nhat

    uh = spec.Uhat.conj().T
    return spec.Uhat @ mid_a @ uh, spec.Uhat @ mid_b @ uh


def random_order_spec(
    n: int,
    r: int,
    s: int,
    metric: MinkowskiMetric,
    seed: int,
    tol: Tolerances | None = None,
    resample_budget: int = 64,
) -> OrderCanonicalSpec:
    """Random canonical spec with well-conditioned metric blocks.

    The unitary is resampled until both G1 (r x r) and Ghat1 (s x s) have
    condition number below 1e6.  Nilpotent blocks are kept at nilpotency
    index <= 3 so their computed spectra stay far from the invertible cores.
    """
    tol = tol or Tolerances()
    if not (0 <= r <= s <= n):
        raise ValueError(f"need 0 <= r <= s <= n, got r={r}, s={s}, n={n}")
    if metric.n != n:
        raise DimensionMismatchError("metric dimension does not match n")
    from .verify import _random_nilpotent, _random_triangular_core

    rng = np.random.default_rng(seed)
    g = metric.materialize()
    mid, tail = s - r, n - s
    for _ in range(resample_budget):
        uhat = random_unitary(n, rng)
        m = uhat.conj().T @ g @ uhat
        ok = True
        for mat in (m[:r, :r], m[:s, :s]):
            if mat.shape[0]:
                sv = np.linalg.svd(mat, compute_uv=False)
                if sv[-1] <= 1e-3 or sv[0] / sv[-1] >= 1e6:
                    ok = False
                    break
        if not ok:
            continue
        t = _random_triangular_core(rng, r, 10.0)
        ttilde = _random_triangular_core(rng, mid, 10.0)
        if n - r:
            w = _random_nilpotent(rng, n - r, min(3, n - r))
            v = random_unitary(n - r, rng)
            n_full = v @ w @ v.conj().T
        else:
            n_full = np.zeros((0, 0), dtype=complex)
        nhat = _random_nilpotent(rng, tail, min(2, tail)) if tail else np.zeros((0, 0), complex)
        s1 = rng.standard_normal((r, mid)) + 1j * rng.standard_normal((r, mid))
        s2 = rng.standard_normal((r, tail)) + 1j * rng.standard_normal((r, tail))
        shat = rng.standard_normal((mid, tail)) + 1j * rng.standard_normal((mid, tail))
        return OrderCanonicalSpec.from_blocks(
            uhat,
            t,
            ttilde,
            s1,
            s2,
            shat,
            nhat,
            n_full[:mid, :mid],
            n_full[:mid, mid:],
            n_full[mid:, :mid],
            n_full[mid:, mid:],
            metric,
            tol,
        )
    raise DiagnosticError(
        f"could not draw a unitary with invertible metric blocks for n={n}, r={r}, s={s} "
        f"(seed {seed})"
    )
