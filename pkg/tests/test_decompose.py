"""Decomposition strategies, the peel step, Caratheodory reduction."""

import itertools

import numpy as np
import pytest

import l1rankone as lr
from l1rankone import decompose as dc
from l1rankone.errors import (
    DimensionMismatchError,
    NormalizationError,
    NotDiagonallyDominantError,
    NotPSDError,
    QuadFormTooLargeError,
    RankOneInputError,
    ZeroDirectionError,
)

from conftest import hermitian, random_dd, random_psd

LIGHT = dc.GreedyConfig(restarts=2, max_iter=80)


class TestLdlDecompose:
    def test_2x2(self):
        d = dc.ldl_decompose(hermitian([[2, 1], [1, 2]]))
        assert d.cost == pytest.approx(6.0, abs=1e-12)
        np.testing.assert_allclose(d.vectors[0], [np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)
        np.testing.assert_allclose(d.vectors[1], [0, np.sqrt(1.5)], atol=1e-15)

    def test_identity(self):
        assert dc.ldl_decompose(hermitian(np.eye(2))).cost == pytest.approx(2.0)

    def test_3x3_equals_l11(self):
        a = hermitian([[1, 0, 1], [0, 1, 1], [1, 1, 3]])
        d = dc.ldl_decompose(a)
        assert d.cost == pytest.approx(9.0, abs=1e-12)
        assert d.cost == pytest.approx(lr.norm_l11(a), abs=1e-12)


class TestEigenDecompose:
    def test_2x2(self):
        d = dc.eigen_decompose(hermitian([[2, 1], [1, 2]]))
        assert d.cost == pytest.approx(8.0, abs=1e-12)

    def test_diagonal(self):
        assert dc.eigen_decompose(hermitian(np.diag([4.0, 9.0]))).cost == pytest.approx(13.0)

    def test_rank_one(self):
        u = np.array([1.0, 1.0])
        d = dc.eigen_decompose(hermitian(np.outer(u, u)))
        assert len(d.vectors) == 1
        assert d.cost == pytest.approx(4.0, abs=1e-12)

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            dc.eigen_decompose(hermitian([[0, 1], [1, 0]]))


class TestDiagonallyDominant:
    def test_is_dd_examples(self):
        ok, _ = dc.is_diagonally_dominant(hermitian([[2, 1], [1, 2]]))
        assert ok
        ok, margins = dc.is_diagonally_dominant(hermitian([[1, 2], [2, 1]]))
        assert not ok
        np.testing.assert_allclose(margins, [-1, -1])
        ok, margins = dc.is_diagonally_dominant(hermitian([[1, 1], [1, 1]]))
        assert ok
        np.testing.assert_allclose(margins, [0, 0])

    def test_dd_decompose_2x2(self):
        a = hermitian([[2, 1], [1, 2]])
        d = dc.dd_decompose(a)
        assert d.cost == pytest.approx(6.0, abs=1e-12)
        assert d.cost == pytest.approx(lr.norm_l11(a), abs=1e-12)
        supports = sorted(tuple(np.flatnonzero(np.abs(v) > 0)) for v in d.vectors)
        assert supports == [(0,), (0, 1), (1,)]

    def test_dd_complex_principal_root(self):
        a = hermitian([[1, 1j], [-1j, 1]])
        d = dc.dd_decompose(a)
        assert len(d.vectors) == 1
        u = d.vectors[0]
        np.testing.assert_allclose(u[0], np.exp(1j * np.pi / 4), atol=1e-15)
        np.testing.assert_allclose(u[1], np.exp(-1j * np.pi / 4), atol=1e-15)
        assert d.cost == pytest.approx(4.0, abs=1e-12)

    def test_dd_1x1(self):
        d = dc.dd_decompose(hermitian([[5.0]]))
        assert d.cost == pytest.approx(5.0, abs=1e-12)

    def test_dd_rejects(self):
        with pytest.raises(NotDiagonallyDominantError) as exc:
            dc.dd_decompose(hermitian([[1, 2], [2, 1]]))
        assert exc.value.margin == pytest.approx(-1.0)


class TestRankOnePeel:
    def test_identity_basis(self):
        step, resid = dc.rank_one_peel(hermitian(np.eye(2)), np.array([1.0, 0.0]))
        np.testing.assert_allclose(step.y, [1, 0], atol=1e-15)
        np.testing.assert_allclose(resid.entries, np.diag([0.0, 1.0]), atol=1e-15)
        assert dc.numerical_rank(resid) == 1

    def test_matches_first_ldl_step(self):
        a = hermitian([[2, 1], [1, 2]])
        step, resid = dc.rank_one_peel(a, np.array([1 / np.sqrt(2), 0]))
        assert step.quad == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(step.y, [np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)
        np.testing.assert_allclose(resid.entries, [[0, 0], [0, 1.5]], atol=1e-12)

    def test_quad_too_large(self):
        with pytest.raises(QuadFormTooLargeError):
            dc.rank_one_peel(hermitian(np.eye(2)), np.array([1.0, 1.0]))

    def test_zero_direction(self):
        a = hermitian(np.diag([1.0, 0.0]))
        with pytest.raises(ZeroDirectionError):
            dc.rank_one_peel(a, np.array([0.0, 1.0]))

    def test_rank_drop_on_random_pd(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 7))
            a = random_psd(rng, n)
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = z / np.sqrt(np.vdot(z, a.entries @ z).real)
            step, resid = dc.rank_one_peel(a, x)
            assert abs(step.quad - 1.0) <= 1e-9
            assert lr.is_psd(resid, psd_tol=1e-9)
            assert dc.numerical_rank(resid) == n - 1


class TestGreedy:
    def test_certified_2x2(self):
        d = dc.greedy_decompose(hermitian([[2, 1], [1, 2]]), LIGHT)
        assert d.cost == pytest.approx(6.0, abs=1e-6)

    def test_rank_one(self):
        u = np.array([1.0, 2.0])
        d = dc.greedy_decompose(hermitian(np.outer(u, u)), LIGHT)
        assert d.cost == pytest.approx(9.0, abs=1e-9)

    def test_diagonal(self):
        d = dc.greedy_decompose(hermitian(np.diag([1.0, 2.0, 3.0])), LIGHT)
        assert d.cost == pytest.approx(6.0, abs=1e-9)

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            dc.greedy_decompose(hermitian([[0, 1], [1, 0]]), LIGHT)

    def test_beats_all_pivot_permutations(self, rng):
        # exhaustive permuted-LDL floor for n <= 4
        for _ in range(25):
            n = int(rng.integers(2, 5))
            a = random_psd(rng, n)
            best = np.inf
            for perm in itertools.permutations(range(n)):
                p = np.array(perm)
                pa = lr.ingest_matrix(a.entries[np.ix_(p, p)])
                best = min(best, dc.ldl_decompose(pa).cost)
            d = dc.greedy_decompose(a, LIGHT)
            assert d.cost <= best + 1e-6

    def test_deterministic(self, rng):
        a = random_psd(rng, 4)
        cfg = dc.GreedyConfig(restarts=4, seed=7)
        d1 = dc.greedy_decompose(a, cfg)
        d2 = dc.greedy_decompose(a, cfg)
        assert d1.cost == d2.cost
        for v1, v2 in zip(d1.vectors, d2.vectors):
            np.testing.assert_array_equal(v1, v2)


class TestCaratheodory:
    def test_short_input_unchanged(self):
        xs = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex),
              np.array([0.5, 0.5], dtype=complex)]
        w = np.array([0.2, 0.2, 0.2])
        w2, xs2 = dc.caratheodory_reduce(w, xs)
        assert len(w2) == 3
        np.testing.assert_array_equal(w2, w)

    def test_single_term_unchanged(self):
        w2, xs2 = dc.caratheodory_reduce([0.5], [np.array([0.5, 0.5], dtype=complex)])
        assert len(w2) == 1

    def test_six_terms_reduce_to_five(self):
        # six distinct unit-l1 vectors whose equal-weight mix is I/2
        xs = [np.array([1, 0], dtype=complex), np.array([1j, 0], dtype=complex),
              np.array([-1, 0], dtype=complex), np.array([0, 1], dtype=complex),
              np.array([0, 1j], dtype=complex), np.array([0, -1], dtype=complex)]
        w = np.full(6, 1.0 / 6.0)
        target = sum(wk * np.outer(x, x.conj()) for wk, x in zip(w, xs))
        np.testing.assert_allclose(target, np.eye(2) / 2, atol=1e-15)
        w2, xs2 = dc.caratheodory_reduce(w, xs)
        assert len(w2) <= 5
        rec = sum(wk * np.outer(x, x.conj()) for wk, x in zip(w2, xs2))
        assert np.abs(rec - target).max() <= 1e-9
        assert abs(w2.sum() - w.sum()) <= 1e-9

    def test_random_overlong_inputs(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 4))
            m = n * n + 4
            xs = []
            for _ in range(m):
                z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                xs.append(z / np.abs(z).sum())
            w = rng.uniform(0.1, 1.0, size=m)
            w = w / w.sum()
            target = sum(wk * np.outer(x, x.conj()) for wk, x in zip(w, xs))
            w2, xs2 = dc.caratheodory_reduce(w, xs)
            assert len(w2) <= n * n + 1
            assert np.all(w2 > 0)
            rec = sum(wk * np.outer(x, x.conj()) for wk, x in zip(w2, xs2))
            assert np.abs(rec - target).max() <= 1e-9
            assert abs(w2.sum() - w.sum()) <= 1e-9

    def test_normalization_errors(self):
        with pytest.raises(NormalizationError):
            dc.caratheodory_reduce([0.5], [np.array([1.0, 1.0], dtype=complex)])
        with pytest.raises(NormalizationError):
            dc.caratheodory_reduce([-0.1], [np.array([1.0, 0.0], dtype=complex)])
        with pytest.raises(NormalizationError):
            dc.caratheodory_reduce([0.9, 0.9], [np.array([1.0, 0.0], dtype=complex),
                                                np.array([0.0, 1.0], dtype=complex)])


class TestStructuredCostCheck:
    def test_dd_output_conforms(self):
        a = hermitian([[2, 1], [1, 2]])
        assert dc.structured_cost_check(a, dc.dd_decompose(a))

    def test_eigen_output_does_not(self):
        a = hermitian([[2, 1], [1, 2]])
        assert not dc.structured_cost_check(a, dc.eigen_decompose(a))

    def test_identity_basis(self):
        a = hermitian(np.eye(2))
        d = dc.RankOneDecomposition.build(
            a, [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)], "external")
        assert dc.structured_cost_check(a, d)

    def test_repeated_pair_rejected(self):
        a = hermitian([[2, 0], [0, 2]])
        d = dc.RankOneDecomposition.build(
            a, [np.array([1, 1], dtype=complex), np.array([1, -1], dtype=complex)], "external")
        assert not dc.structured_cost_check(a, d)


class TestSpecial3x3Gap:
    def test_zero_gap_b_zero(self):
        a = hermitian([[1, 0, 1], [0, 1, 1], [1, 1, 3]])
        assert dc.special_3x3_gap(a) == pytest.approx(0.0, abs=1e-12)

    def test_zero_gap_c_zero(self):
        a = hermitian([[1, 1, 0], [1, 2, 1], [0, 1, 2]])
        assert dc.special_3x3_gap(a) == pytest.approx(0.0, abs=1e-12)

    def test_positive_gap_matches_ldl_excess(self):
        # entries a=1, b=1, c=-1, e=1 give gap 4; d and f chosen so the
        # matrix is PD (the gap formula does not involve d or f)
        a = hermitian([[1, 1, -1], [1, 3, 1], [-1, 1, 6]])
        gap = dc.special_3x3_gap(a)
        assert gap == pytest.approx(4.0, abs=1e-12)
        excess = dc.ldl_decompose(a).cost - lr.norm_l11(a)
        assert excess == pytest.approx(gap, abs=1e-9)

    def test_rank_one_rejected(self):
        u = np.array([1.0, 2.0, 3.0])
        with pytest.raises(RankOneInputError):
            dc.special_3x3_gap(hermitian(np.outer(u, u)))

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            dc.special_3x3_gap(hermitian(np.eye(2)))

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            dc.special_3x3_gap(hermitian([[1, 1, -1], [1, 2, 1], [-1, 1, 3]]))


class TestStrategyInvariants:
    def test_reconstruction_and_cost_floor(self, rng):
        # every strategy reconstructs its target and never beats ||A||_1,1
        for _ in range(500):
            n = int(rng.integers(2, 9))
            a = random_psd(rng, n, rank=int(rng.integers(1, n + 1)))
            l11 = lr.norm_l11(a)
            decs = [dc.ldl_decompose(a), dc.eigen_decompose(a),
                    dc.greedy_decompose(a, LIGHT)]
            if dc.is_diagonally_dominant(a)[0]:
                decs.append(dc.dd_decompose(a))
            for d in decs:
                assert lr.verify_reconstruction(a, d.vectors).ok
                assert d.cost >= l11 - 1e-9
                assert d.cost == pytest.approx(dc.decomposition_cost(d.vectors), abs=1e-12)
                assert all(np.abs(v).sum() > 0 for v in d.vectors)

    def test_dd_cost_is_l11(self, rng):
        for k in range(200):
            n = int(rng.integers(2, 9))
            a = random_dd(rng, n, complex_off=bool(k % 2), tight_rows=k % 3)
            d = dc.dd_decompose(a)
            assert abs(d.cost - lr.norm_l11(a)) <= 1e-9 * max(1.0, lr.norm_l11(a))

    def test_2x2_ldl_exact(self, rng):
        for _ in range(200):
            a = random_psd(rng, 2, complex_entries=bool(rng.integers(0, 2)))
            assert abs(dc.ldl_decompose(a).cost - lr.norm_l11(a)) <= 1e-9 * max(1.0, lr.norm_l11(a))

    def test_3x3_gap_identity(self, rng):
        for _ in range(200):
            a = random_psd(rng, 3, complex_entries=bool(rng.integers(0, 2)))
            gap = dc.special_3x3_gap(a)
            assert gap >= -1e-12
            excess = dc.ldl_decompose(a).cost - lr.norm_l11(a)
            assert abs(excess - gap) <= 1e-9 * max(1.0, lr.norm_l11(a))

    def test_reduce_decomposition_caps_terms(self, rng):
        a = random_psd(rng, 2)
        # inflate an LDL decomposition far past the n^2 + 1 cap
        base = dc.ldl_decompose(a)
        split = []
        for v in base.vectors:
            split.extend([v / np.sqrt(3)] * 3)
        for _ in range(3):
            split.append(np.zeros(2, dtype=complex))
        fat = dc.RankOneDecomposition.build(a, split, "external")
        assert len(fat.vectors) > 5
        slim = dc.reduce_decomposition(fat, a)
        assert len(slim.vectors) <= 5
        assert slim.cost <= fat.cost + 1e-9
        assert lr.verify_reconstruction(a, slim.vectors).ok
