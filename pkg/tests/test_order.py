"""Order tests: definitions, characterization, transfer, canonical pairs."""
import numpy as np
import pytest

from minkinv import (
    CanonicalCaseSpec,
    MinkowskiMetric,
    NotInvertibleError,
    OrderCanonicalSpec,
    Tolerances,
    generate_case,
    m_core_ep_decompose,
    m_core_ep_inverse,
    m_core_ep_leq,
    m_core_inverse,
    m_core_leq,
    matrix_index,
    order_pair,
    random_order_spec,
)
from minkinv.numlin import fnorm, random_unitary
from minkinv.verify import _random_nilpotent, _random_triangular_core

TOL = Tolerances()


def zeros(shape):
    return np.zeros(shape, dtype=complex)


def cm_spec(n, r, s, seed):
    """Canonical spec with all nilpotent blocks zero, so both matrices are CM."""
    metric = MinkowskiMetric(n)
    base = random_order_spec(n, r, s, metric, seed=seed)
    mid, tail = s - r, n - s
    return OrderCanonicalSpec.from_blocks(
        base.Uhat,
        base.T,
        base.Ttilde,
        base.S1,
        base.S2,
        base.Shat,
        zeros((tail, tail)),
        zeros((mid, mid)),
        zeros((mid, tail)),
        zeros((tail, mid)),
        zeros((tail, tail)),
        metric,
    )


def chained_triple(n, r, s, s2, seed):
    """A <= B <= C built by stacking two canonical constructions on one unitary."""
    metric = MinkowskiMetric(n)
    rng = np.random.default_rng(seed)
    for attempt in range(64):
        spec1 = random_order_spec(n, r, s, metric, seed=int(rng.integers(1 << 30)))
        m = spec1.Uhat.conj().T @ metric.materialize() @ spec1.Uhat
        sv = np.linalg.svd(m[:s2, :s2], compute_uv=False)
        if sv[-1] <= 1e-3 or sv[0] / sv[-1] >= 1e6:
            continue
        a, b = order_pair(spec1, metric)
        core_b = zeros((s, s))
        core_b[:r, :r] = spec1.T
        core_b[:r, r:] = spec1.alpha
        core_b[r:, r:] = spec1.Ttilde
        side_b = np.vstack([spec1.beta, spec1.Shat])
        mid2, tail2 = s2 - s, n - s2
        nil = spec1.Nhat
        try:
            spec2 = OrderCanonicalSpec.from_blocks(
                spec1.Uhat,
                core_b,
                _random_triangular_core(rng, mid2, 10.0),
                side_b[:, :mid2],
                side_b[:, mid2:],
                rng.standard_normal((mid2, tail2)) + 1j * rng.standard_normal((mid2, tail2)),
                _random_nilpotent(rng, tail2, min(2, tail2)) if tail2 else zeros((0, 0)),
                nil[:mid2, :mid2],
                nil[:mid2, mid2:],
                nil[mid2:, :mid2],
                nil[mid2:, mid2:],
                metric,
            )
        except ValueError:
            continue
        b_again, c = order_pair(spec2, metric)
        assert fnorm(b_again - b) <= 1e-10 * (1 + fnorm(b))
        return a, b, c, metric
    raise RuntimeError(f"could not build a chain for n={n} (seed {seed})")


class TestMCoreOrder:
    def test_reflexive(self, g3, ex3):
        a1hat = m_core_ep_decompose(ex3, g3).A1hat
        verdict = m_core_leq(a1hat, a1hat, g3)
        assert verdict.holds and not verdict.indeterminate

    def test_cm_canonical_pair(self):
        metric = MinkowskiMetric(5)
        spec = cm_spec(5, 2, 3, seed=21)
        a, b = order_pair(spec, metric)
        assert matrix_index(a) <= 1 and matrix_index(b) <= 1
        verdict = m_core_leq(a, b, metric)
        assert verdict.holds
        # absorbing identities recorded as consequences
        assert verdict.def_residuals["A^(m)BB^(m)=A^(m)"] <= verdict.threshold
        assert verdict.def_residuals["B^(m)BA^(m)=A^(m)"] <= verdict.threshold

    def test_unrelated_cm_pair_fails_cleanly(self):
        metric = MinkowskiMetric(4)
        a = generate_case(CanonicalCaseSpec(n=4, r=2, k=1, seed=31), metric)
        b = generate_case(CanonicalCaseSpec(n=4, r=2, k=1, seed=77), metric)
        verdict = m_core_leq(a, b, metric)
        assert not verdict.holds and not verdict.indeterminate

    def test_non_cm_argument_raises(self, ex2, ex4a, g3):
        with pytest.raises(NotInvertibleError):
            m_core_leq(ex2, ex4a, g3)


class TestMCoreEPOrder:
    def test_bundled_pair_both_directions(self, ex4a, ex4b, g3):
        forward = m_core_ep_leq(ex4a, ex4b, g3)
        backward = m_core_ep_leq(ex4b, ex4a, g3)
        assert forward.holds and backward.holds
        assert forward.agree and backward.agree
        assert forward.transfer_holds and backward.transfer_holds
        assert fnorm(ex4a - ex4b) > 0.5
        # rank hypothesis of the characterization is unmet one way only
        assert forward.unmet_hypotheses == ["rk(B)>=rk(A)"]
        assert backward.unmet_hypotheses == []

    def test_reflexive_on_many(self, canonical_grid):
        for spec, a, metric in canonical_grid[:40]:
            verdict = m_core_ep_leq(a, a, metric)
            assert verdict.holds and verdict.agree, spec

    def test_canonical_pairs_all_routes(self):
        for i in range(25):
            n = 4 + i % 4
            r = 1 + i % 2
            s = min(n - 1, r + 1 + i % 2)
            metric = MinkowskiMetric(n)
            pair_spec = random_order_spec(n, r, s, metric, seed=900 + i)
            a, b = order_pair(pair_spec, metric)
            verdict = m_core_ep_leq(a, b, metric)
            assert verdict.holds and verdict.agree and verdict.transfer_holds, (
                i,
                verdict.def_residuals,
                verdict.char_residuals,
            )

    def test_unrelated_pairs_fail_both_routes(self):
        for i in range(30):
            n = 3 + i % 3
            metric = MinkowskiMetric(n)
            r = 1 + i % 2 if n > 2 else 1
            a = generate_case(CanonicalCaseSpec(n=n, r=r, k=1, seed=50 + i), metric)
            b = generate_case(CanonicalCaseSpec(n=n, r=r, k=1, seed=5000 + i), metric)
            verdict = m_core_ep_leq(a, b, metric)
            char_holds = all(v <= verdict.threshold for v in verdict.char_residuals.values())
            assert not verdict.holds and not char_holds and verdict.agree
            assert not verdict.indeterminate

    def test_transitive_chains(self):
        for i, (n, r, s, s2) in enumerate([(5, 1, 2, 3), (6, 1, 2, 4), (6, 2, 3, 4)]):
            a, b, c, metric = chained_triple(n, r, s, s2, seed=10 + i)
            assert m_core_ep_leq(a, b, metric).holds
            assert m_core_ep_leq(b, c, metric).holds
            assert m_core_ep_leq(a, c, metric).holds

    def test_nilpotent_below_everything(self, canonical_grid):
        spec, b, metric = next(
            (s, a, m) for s, a, m in canonical_grid if s.r >= 1 and s.n == 3
        )
        nil = np.zeros((metric.n, metric.n))
        verdict = m_core_ep_leq(nil, b, metric)
        assert verdict.holds and verdict.agree

    def test_cm_pair_matches_m_core_verdict(self):
        metric = MinkowskiMetric(5)
        spec = cm_spec(5, 2, 3, seed=41)
        a, b = order_pair(spec, metric)
        ep = m_core_ep_leq(a, b, metric)
        cm = m_core_leq(a, b, metric)
        assert ep.holds == cm.holds == True  # noqa: E712
        x_core = m_core_inverse(a, metric).X
        x_ep = m_core_ep_inverse(a, metric).X
        assert fnorm(x_core - x_ep) <= TOL.residual_tol * (1 + fnorm(x_core))

    def test_indeterminate_band(self, g3, ex4a, ex4b):
        base = m_core_ep_leq(ex4a, ex4b, g3)
        x = m_core_ep_inverse(ex4a, g3).X
        direction = np.ones((3, 3)) / 3.0
        push = fnorm(x @ direction)
        delta = 3.0 * base.threshold / push
        verdict = m_core_ep_leq(ex4a, ex4b + delta * direction, g3)
        assert not verdict.holds
        assert verdict.indeterminate

    def test_not_invertible_argument_raises(self, ex1, ex2, g3):
        with pytest.raises(NotInvertibleError):
            m_core_ep_leq(ex1, ex2, g3)
        with pytest.raises(NotInvertibleError):
            m_core_ep_leq(ex2, ex1, g3)


class TestOrderPair:
    def test_degenerate_equal_partitions(self):
        metric = MinkowskiMetric(4)
        spec = random_order_spec(4, 2, 2, metric, seed=61)
        assert spec.Ttilde.shape == (0, 0)
        a, b = order_pair(spec, metric)
        verdict = m_core_ep_leq(a, b, metric)
        assert verdict.holds and verdict.agree

    def test_recovers_bundled_pair_shape(self, ex4a, ex4b, g3):
        # the bundled pair fits the canonical form with the identity unitary
        spec = OrderCanonicalSpec.from_blocks(
            np.eye(3),
            np.array([[1.0]]),
            zeros((0, 0)),
            zeros((1, 0)),
            np.array([[2.0, 3.0]]),
            zeros((0, 2)),
            zeros((2, 2)),
            zeros((0, 0)),
            zeros((0, 2)),
            zeros((2, 0)),
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            g3,
        )
        a, b = order_pair(spec, g3)
        assert fnorm(a - ex4a) <= 1e-12
        assert fnorm(b - ex4b) <= 1e-12

    def test_random_spec_sweep(self):
        count = 0
        for i in range(40):
            n = 3 + i % 6
            r = i % min(3, n)
            s = min(n, r + 1 + i % 2)
            metric = MinkowskiMetric(n)
            spec = random_order_spec(n, r, s, metric, seed=7000 + i)
            a, b = order_pair(spec, metric)
            verdict = m_core_ep_leq(a, b, metric)
            assert verdict.holds and verdict.agree, (n, r, s, i)
            count += 1
        assert count == 40

    def test_dimension_validation(self, g3):
        with pytest.raises(Exception):
            OrderCanonicalSpec.from_blocks(
                np.eye(3),
                np.array([[1.0]]),
                zeros((0, 0)),
                zeros((1, 1)),  # wrong: should be 1 x 0
                np.array([[2.0, 3.0]]),
                zeros((0, 2)),
                zeros((2, 2)),
                zeros((0, 0)),
                zeros((0, 2)),
                zeros((2, 0)),
                zeros((2, 2)),
                g3,
            )

    def test_non_nilpotent_block_rejected(self, g3):
        with pytest.raises(ValueError):
            OrderCanonicalSpec.from_blocks(
                np.eye(3),
                np.array([[1.0]]),
                zeros((0, 0)),
                zeros((1, 0)),
                np.array([[2.0, 3.0]]),
                zeros((0, 2)),
                zeros((2, 2)),
                zeros((0, 0)),
                zeros((0, 2)),
                zeros((2, 0)),
                np.eye(2),  # not nilpotent
                g3,
            )
