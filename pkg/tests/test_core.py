import numpy as np
import pytest

from proxvr import RngStream, SparseVector, dot, norm2_sq, sample_with_replacement


class TestSampling:
    def test_single_index(self):
        out = sample_with_replacement(RngStream(0), 1, 3)
        assert list(out) == [0, 0, 0]

    def test_same_seed_same_draws(self):
        a = sample_with_replacement(RngStream(5), 5, 2)
        b = sample_with_replacement(RngStream(5), 5, 2)
        assert np.array_equal(a, b)
        a = sample_with_replacement(RngStream(5), 1000, 500)
        b = sample_with_replacement(RngStream(5), 1000, 500)
        assert np.array_equal(a, b)

    def test_reference_sequence_pinned(self):
        # PCG64 + SeedSequence; these draws must never change across
        # platforms or library upgrades.
        assert list(sample_with_replacement(RngStream(2024), 10, 5)) == [2, 6, 0, 2, 3]
        assert list(sample_with_replacement(RngStream(2024).derive(3), 10, 5)) == [5, 0, 0, 0, 5]

    def test_derive_is_static(self):
        parent = RngStream(7)
        child_before = parent.derive(1)
        parent.integers(0, 100, size=50)  # consume the parent
        child_after = parent.derive(1)
        assert np.array_equal(child_before.integers(0, 100, size=10),
                              child_after.integers(0, 100, size=10))

    def test_draws_in_range(self):
        out = sample_with_replacement(RngStream(3), 7, 10_000)
        assert out.min() >= 0 and out.max() < 7

    def test_uniform_frequency(self):
        # chi-square style frequency check: n=4, one million draws
        draws = sample_with_replacement(RngStream(11), 4, 1_000_000)
        freqs = np.bincount(draws, minlength=4) / 1_000_000
        assert np.all(np.abs(freqs - 0.25) <= 0.01 * 0.25)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            sample_with_replacement(RngStream(0), 0, 1)
        with pytest.raises(ValueError):
            sample_with_replacement(RngStream(0), 4, 0)


class TestVectorKernels:
    def test_dot_hand_values(self):
        assert dot([1.0, 0.0, 2.0], [3.0, 4.0, 5.0]) == 13.0
        assert dot(np.zeros(4), np.arange(4.0)) == 0.0
        sv = SparseVector([1], [2.0], 3)
        assert dot(sv, [5.0, 7.0, 9.0]) == 14.0

    def test_dot_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dot([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            SparseVector([0], [1.0], 2).dot(np.zeros(3))

    def test_norm2_sq(self):
        assert norm2_sq([3.0, 4.0]) == 25.0
        assert norm2_sq(np.zeros(5)) == 0.0

    def test_norm_equals_self_dot(self):
        rng = RngStream(1)
        for _ in range(20):
            v = rng.normal(size=6)
            assert norm2_sq(v) == pytest.approx(dot(v, v), rel=1e-12)


class TestSparseVector:
    def test_validation(self):
        with pytest.raises(ValueError):
            SparseVector([2, 1], [1.0, 1.0], 3)  # not increasing
        with pytest.raises(ValueError):
            SparseVector([0, 0], [1.0, 1.0], 3)  # duplicate
        with pytest.raises(ValueError):
            SparseVector([0, 5], [1.0, 1.0], 3)  # out of range
        with pytest.raises(ValueError):
            SparseVector([0], [0.0], 3)  # stored zero
        with pytest.raises(ValueError):
            SparseVector([0], [np.inf], 3)

    def test_immutable_after_construction(self):
        sv = SparseVector([0, 2], [1.0, -2.0], 4)
        with pytest.raises(ValueError):
            sv.values[0] = 9.0

    def test_dense_round_trip(self):
        sv = SparseVector([1, 3], [2.0, -1.5], 5)
        dense = sv.to_dense()
        assert np.array_equal(dense, [0.0, 2.0, 0.0, -1.5, 0.0])
        assert sv.norm() == pytest.approx(np.linalg.norm(dense))

    def test_equality(self):
        a = SparseVector([1], [2.0], 3)
        assert a == SparseVector([1], [2.0], 3)
        assert a != SparseVector([1], [2.0], 4)
        assert a != SparseVector([2], [2.0], 3)


class TestIndependentSumIdentities:
    def test_mean_zero_sum_matches_component_sum(self):
        # For independent mean-zero draws, E||sum z_i||^2 = sum E||z_i||^2.
        # Components are uniform(-1, 1), so E||z||^2 = d/3 exactly.
        rng = RngStream(21)
        r, d, trials = 4, 3, 200_000
        z = rng.uniform(-1.0, 1.0, size=(trials, r, d))
        empirical = float((z.sum(axis=1) ** 2).sum(axis=1).mean())
        expected = r * d / 3.0
        assert empirical == pytest.approx(expected, rel=0.02)

    def test_sum_sq_bound_holds_per_sample(self):
        # ||sum z_i||^2 <= r * sum ||z_i||^2 deterministically
        rng = RngStream(22)
        for _ in range(200):
            r = int(rng.integers(1, 7))
            z = rng.normal(size=(r, 5))
            lhs = norm2_sq(z.sum(axis=0))
            rhs = r * sum(norm2_sq(z[i]) for i in range(r))
            assert lhs <= rhs * (1.0 + 1e-12)
