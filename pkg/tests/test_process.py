"""
Rastgele sütun süreci testleri
"""

from collections import Counter

import numpy as np
import pytest
from scipy import stats

from matroidphase.models.schemas import DistributionSpec
from matroidphase.services.gf import field_make
from matroidphase.services.process import dist_make, process_extend, process_matrix, process_start, sample_column
from matroidphase.utils.errors import DimensionError, DistributionError


class TestDistribution:
    """dist_make ve atomlar"""

    def test_uniform_atoms_sum_to_one(self, gf3):
        dist = dist_make(gf3, 3, "uniform")
        assert sum(p for _, p in dist.atoms) == pytest.approx(1.0)
        assert len(dist.atoms) == 4

    def test_all_ones(self, gf3):
        dist = dist_make(gf3, 4, "all-ones")
        assert dist.atoms == (((1, 1, 1, 1), 1.0),)

    def test_atoms_merge_permutations(self, gf3):
        dist = dist_make(gf3, 2, [((1, 2), 0.25), ((2, 1), 0.25), ((1, 1), 0.5)])
        assert dict(dist.atoms) == {(1, 1): 0.5, (1, 2): 0.5}

    def test_pydantic_spec(self, gf3):
        spec = DistributionSpec(kind="atoms", atoms=[{"values": [1, 2, 2], "p": 1.0}])
        dist = dist_make(gf3, 3, spec)
        assert dist.kind == "atoms"

    def test_zero_entry_rejected(self, gf3):
        with pytest.raises(DistributionError):
            dist_make(gf3, 2, [((0, 1), 1.0)])

    def test_bad_total(self, gf3):
        with pytest.raises(DistributionError):
            dist_make(gf3, 2, [((1, 1), 0.3)])

    def test_wrong_length(self, gf3):
        with pytest.raises(DistributionError):
            dist_make(gf3, 3, [((1, 1), 1.0)])

    def test_unknown_kind(self, gf3):
        with pytest.raises(DistributionError):
            dist_make(gf3, 3, "gaussian")

    def test_k_too_small(self, gf3):
        with pytest.raises(DistributionError):
            dist_make(gf3, 1)


class TestSampling:
    """sample_column ve süreç"""

    def test_column_shape(self, gf4, rng):
        dist = dist_make(gf4, 3)
        for _ in range(200):
            col = sample_column(dist, 10, rng)
            assert len(col.rows) == 3
            assert list(col.rows) == sorted(set(col.rows))
            assert all(0 < v < 4 for v in col.values)

    def test_n_less_than_k(self, gf2, rng):
        with pytest.raises(DimensionError):
            sample_column(dist_make(gf2, 3), 2, rng)

    def test_support_uniform(self, gf2, rng):
        """Her satırın seçilme sıklığı düzgün olmalı (ki-kare)"""
        dist = dist_make(gf2, 3)
        counts = Counter()
        trials = 6000
        for _ in range(trials):
            counts.update(sample_column(dist, 6, rng).rows)
        observed = np.array([counts[r] for r in range(6)], dtype=float)
        _, pvalue = stats.chisquare(observed)
        assert pvalue > 1e-4

    def test_values_uniform(self, rng):
        f = field_make(5)
        dist = dist_make(f, 2)
        counts = Counter()
        for _ in range(4000):
            counts.update(sample_column(dist, 4, rng).values)
        observed = np.array([counts[v] for v in range(1, 5)], dtype=float)
        _, pvalue = stats.chisquare(observed)
        assert pvalue > 1e-4

    def test_monotone_extension(self, gf3):
        dist = dist_make(gf3, 3)
        state = process_matrix(dist, 20, 10, seed=7)
        grown = process_extend(state, 5)
        assert grown.matrix.columns[:10] == state.matrix.columns
        assert grown.m == 15

    def test_deterministic_seed(self, gf3):
        dist = dist_make(gf3, 3)
        a = process_matrix(dist, 30, 12, seed=99).matrix
        b = process_matrix(dist, 30, 12, seed=99).matrix
        assert a == b

    def test_start_empty(self, gf2):
        state = process_start(dist_make(gf2, 3), 5, seed=1)
        assert state.m == 0 and state.matrix.n_rows == 5

    def test_negative_count(self, gf2):
        state = process_start(dist_make(gf2, 3), 5, seed=1)
        with pytest.raises(DimensionError):
            process_extend(state, -1)
