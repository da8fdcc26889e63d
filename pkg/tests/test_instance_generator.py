#!/usr/bin/env python3
"""
Tests for the synthetic UNION / BION instance generator.
"""

import numpy as np
import pytest

from src.models.errors import InstanceGenerationError
from src.models.factorization_models import InstanceKind
from src.services.instance_generator import generate_instance, generate_orthonormal_factor
from src.services.objective import infeas_bi, infeas_uni, rse
from src.services.solver_common import derive_seed


class TestOrthonormalFactor:

    def test_columns_are_orthonormal(self):
        G = generate_orthonormal_factor(50, 10, rng_seed=3)
        assert G.shape == (50, 10)
        assert (G >= 0).all()
        np.testing.assert_allclose(G.T @ G, np.eye(10), atol=1e-12)

    def test_one_nonzero_per_row(self):
        G = generate_orthonormal_factor(40, 8, rng_seed=11)
        assert (np.count_nonzero(G, axis=1) == 1).all()

    def test_deterministic(self):
        np.testing.assert_array_equal(
            generate_orthonormal_factor(30, 6, rng_seed=5),
            generate_orthonormal_factor(30, 6, rng_seed=5)
        )

    def test_empty_columns_are_repaired(self):
        # every row lands in column 0, leaving columns 1 and 2 empty
        def all_first(rng, rows, cols):
            return np.zeros(rows, dtype=np.int64)

        G = generate_orthonormal_factor(5, 3, rng_seed=1, position_sampler=all_first)
        assert np.count_nonzero(G, axis=0).tolist() == [3, 1, 1]
        assert G[0, 1] == pytest.approx(1.0)
        assert G[1, 2] == pytest.approx(1.0)
        np.testing.assert_allclose(G.T @ G, np.eye(3), atol=1e-12)

    def test_square_factor_repair(self):
        def all_first(rng, rows, cols):
            return np.zeros(rows, dtype=np.int64)

        G = generate_orthonormal_factor(2, 2, rng_seed=1, position_sampler=all_first)
        np.testing.assert_allclose(G, np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-15)

    @pytest.mark.parametrize("rows, cols", [(3, 4), (5, 0)])
    def test_invalid_shape(self, rows, cols):
        with pytest.raises(InstanceGenerationError):
            generate_orthonormal_factor(rows, cols, rng_seed=1)


class TestGenerateInstance:

    @pytest.mark.parametrize("kind", [InstanceKind.UNION, InstanceKind.BION])
    @pytest.mark.parametrize("n, k", [(50, 10), (50, 20), (100, 20)])
    def test_true_factors_are_exact_and_feasible(self, kind, n, k):
        for replicate in range(1, 6):
            seed = derive_seed(20240101, kind.value, n, k, replicate)
            t = generate_instance(n, k, kind, replicate, seed)
            G, H = t.G_true.data, t.H_true.data
            assert t.R.shape == (n, n)
            assert G.shape == (n, k) and H.shape == (k, n)
            assert rse(t.R, G, H) < 1e-14
            if kind is InstanceKind.BION:
                assert infeas_bi(G, H) < 1e-12
            else:
                assert infeas_uni(G) < 1e-12

    def test_union_coefficients_strictly_positive(self):
        t = generate_instance(50, 20, InstanceKind.UNION, 1, seed=99)
        H = t.H_true.data
        assert (H > 0).all() and (H < 1).all()

    def test_bion_data_is_not_symmetric_in_general(self):
        t = generate_instance(50, 10, InstanceKind.BION, 1, seed=99)
        assert t.R.data.shape == (50, 50)
        assert not np.array_equal(t.R.data, t.R.data.T)

    def test_same_seed_same_instance(self):
        a = generate_instance(50, 10, InstanceKind.BION, 2, seed=1234)
        b = generate_instance(50, 10, InstanceKind.BION, 2, seed=1234)
        np.testing.assert_array_equal(a.R.data, b.R.data)
        np.testing.assert_array_equal(a.G_true.data, b.G_true.data)

    def test_metadata(self):
        t = generate_instance(50, 10, InstanceKind.UNION, 3, seed=7)
        assert (t.n, t.k, t.id, t.kind, t.seed) == (50, 10, 3, InstanceKind.UNION, 7)

    def test_rank_too_large(self):
        with pytest.raises(InstanceGenerationError):
            generate_instance(10, 6, InstanceKind.UNION, 1, seed=1)
