"""
Minor arama testleri: hedefler, tanıklar, kaba kuvvet ve rastgele arayıcı
"""

import pytest

from matroidphase.services.gf import field_make
from matroidphase.services.matrix_io import write_matrix
from matroidphase.services.minors import (
    IndependenceOracle,
    MinorWitness,
    TargetMinor,
    find_minor,
    minor_bruteforce,
    minor_randomized,
    planted_instance,
    projective_points,
    same_matroid,
    search_randomized,
    verify_witness,
)
from matroidphase.services.process import dist_make, process_matrix
from matroidphase.services.spmat import SparseMatrix
from matroidphase.utils.errors import (
    DimensionError,
    FieldMismatchError,
    InstanceTooLargeError,
    TargetError,
)


def u24(field):
    """GF(3) üzerinde U(2,4)"""
    return SparseMatrix.from_columns(
        field, 2, [[(0, 1)], [(1, 1)], [(0, 1), (1, 1)], [(0, 1), (1, 2)]]
    )


class TestOracle:
    """Bağımsızlık kahini ve matroid karşılaştırması"""

    def test_independence(self, u23_host):
        oracle = IndependenceOracle(u23_host)
        assert oracle((0, 1))
        assert not oracle((0, 1, 2))
        assert oracle(())
        assert oracle.rank() == 3

    def test_same_matroid_permuted_identity(self, gf2, identity3):
        other = SparseMatrix.from_columns(gf2, 3, [[(2, 1)], [(0, 1)], [(1, 1)]])
        assert same_matroid(identity3, other)

    def test_different_matroids(self, u23_host, gf2):
        free = SparseMatrix.from_columns(gf2, 3, [[(0, 1)], [(1, 1)], [(2, 1)], [(0, 1), (1, 1), (2, 1)]])
        assert not same_matroid(u23_host, free)

    def test_field_mismatch(self, gf2, gf3):
        with pytest.raises(FieldMismatchError):
            same_matroid(TargetMinor.u23(gf2).matrix, TargetMinor.u23(gf3).matrix)


class TestTargets:
    """TargetMinor kurucuları"""

    def test_projective_point_counts(self, gf2, gf3):
        assert len(projective_points(gf2, 3)) == 7
        assert len(projective_points(gf3, 2)) == 4

    def test_fano(self):
        fano = TargetMinor.pg(3, 2)
        assert fano.n_cols == 7 and fano.rank == 3
        assert fano.has_circuit
        assert fano.name == "pg:3:2"

    def test_pg_bad_rank(self):
        with pytest.raises(TargetError):
            TargetMinor.pg(1, 2)

    def test_pg_bad_order(self):
        with pytest.raises(TargetError):
            TargetMinor.pg(2, 6)

    def test_parse(self, gf2):
        assert TargetMinor.parse("u23", gf2).kind == "u23"
        assert TargetMinor.parse(" pg:2:2 ").n_cols == 3

    @pytest.mark.parametrize("spec", ["pg:x:2", "pg:3", "k5", ""])
    def test_parse_errors(self, spec):
        with pytest.raises(TargetError):
            TargetMinor.parse(spec)

    def test_parse_field_mismatch(self, gf2):
        with pytest.raises(TargetError):
            TargetMinor.parse("pg:2:3", gf2)

    def test_parse_file(self, gf3, tmp_path):
        path = tmp_path / "u24.mat"
        write_matrix(path, u24(gf3))
        target = TargetMinor.parse(f"file:{path}", gf3)
        assert target.kind == "explicit"
        assert target.n_cols == 4 and target.rank == 2

    def test_explicit_rejects_parallel(self, gf2):
        m = SparseMatrix.from_columns(gf2, 2, [[(0, 1)], [(0, 1)], [(1, 1)]])
        with pytest.raises(TargetError):
            TargetMinor.explicit(m)

    def test_explicit_circuit_requirement(self, identity3):
        with pytest.raises(TargetError):
            TargetMinor.explicit(identity3)
        assert TargetMinor.explicit(identity3, require_circuit=False).rank == 3

    def test_explicit_empty(self, gf2):
        with pytest.raises(TargetError):
            TargetMinor.explicit(SparseMatrix(gf2, 2, ()))


class TestWitness:
    """Tanık yapısı ve yeniden oynatma"""

    def test_disjoint_sets(self):
        with pytest.raises(DimensionError):
            MinorWitness(contract_set=(1,), delete_set=(1,), embedding=())

    def test_missing_label_rejected(self, u23_host):
        target = TargetMinor.u23()
        witness = minor_bruteforce(u23_host, target)
        # 3 etiketi ne büzülüyor ne siliniyor
        broken = MinorWitness((), (), witness.embedding, witness.scalars)
        assert not verify_witness(u23_host, target, broken)

    def test_scalars_tampered(self, gf3):
        host = SparseMatrix.from_columns(gf3, 2, [[(0, 2)], [(1, 1)], [(0, 1), (1, 1)], [(0, 1), (1, 2)]])
        target = TargetMinor.explicit(u24(gf3))
        witness = minor_bruteforce(host, target)
        assert witness.scalars == (1, 2, 2, 2)
        tampered = MinorWitness(witness.contract_set, witness.delete_set, witness.embedding, (1, 1, 1, 1))
        assert not verify_witness(host, target, tampered)

    def test_wrong_contraction_rejected(self, u23_host):
        target = TargetMinor.u23()
        bad = MinorWitness(contract_set=(0,), delete_set=(1,), embedding=((0, 2), (1, 3), (2, 1)))
        assert not verify_witness(u23_host, target, bad)

    def test_summary(self, u23_host):
        witness = minor_bruteforce(u23_host, TargetMinor.u23())
        summary = witness.summary(True)
        assert summary.verified is True
        assert summary.contract_set == [3]
        assert set(summary.embedding) == {"0", "1", "2"}


class TestBruteForce:
    """Kesin kahin"""

    def test_finds_u23(self, u23_host):
        target = TargetMinor.u23()
        witness = minor_bruteforce(u23_host, target)
        assert witness is not None
        assert witness.contract_set == (3,)
        assert witness.scalars == (1, 1, 1)
        assert verify_witness(u23_host, target, witness)

    def test_free_matroid_has_no_u23(self, identity3):
        assert minor_bruteforce(identity3, TargetMinor.u23()) is None
        outcome = find_minor(identity3, TargetMinor.u23(), mode="brute")
        assert outcome.failure_code == "absent" and not outcome.found

    def test_gf3_scalars(self, gf3):
        host = SparseMatrix.from_columns(
            gf3, 3, [[(0, 2)], [(1, 1)], [(0, 1), (1, 1)], [(0, 1), (1, 2)], [(2, 1)]]
        )
        target = TargetMinor.explicit(u24(gf3))
        witness = minor_bruteforce(host, target)
        assert witness is not None
        assert len(witness.scalars) == 4
        assert verify_witness(host, target, witness)

    def test_too_large(self, gf2):
        cols = [[(i % 3, 1)] for i in range(13)]
        with pytest.raises(InstanceTooLargeError):
            minor_bruteforce(SparseMatrix.from_columns(gf2, 3, cols), TargetMinor.u23())

    def test_field_mismatch(self, gf3, u23_host):
        with pytest.raises(TargetError):
            minor_bruteforce(u23_host, TargetMinor.u23(gf3))

    def test_unknown_mode(self, u23_host):
        with pytest.raises(ValueError):
            find_minor(u23_host, TargetMinor.u23(), mode="sezgisel")


class TestRandomized:
    """Rastgele arayıcı ve hata kodları"""

    def test_finds_u23(self, u23_host):
        target = TargetMinor.u23()
        outcome = search_randomized(u23_host, target, budget=50, rng=1)
        assert outcome.found and outcome.failure_code == "none"
        assert verify_witness(u23_host, target, outcome.witness)

    def test_coloop_target_needs_brute_force(self, u23_host):
        """Hedefin coloop'u soyulan sütuna düşerse çekirdek araması bulamaz"""
        target = TargetMinor.explicit(u23_host)
        assert target.rank == 3
        outcome = search_randomized(u23_host, target, budget=20, rng=3)
        assert not outcome.found
        assert outcome.failure_code == "rank-too-small"
        witness = minor_bruteforce(u23_host, target)
        assert witness is not None
        assert verify_witness(u23_host, target, witness)

    def test_fano_in_itself(self):
        target = TargetMinor.pg(3, 2)
        outcome = search_randomized(target.matrix, target, budget=5, rng=2)
        assert outcome.found and outcome.attempts == 1

    def test_full_rank(self, identity3):
        outcome = search_randomized(identity3, TargetMinor.u23(), budget=10, rng=3)
        assert outcome.failure_code == "full-rank" and outcome.attempts == 0

    def test_rank_too_small(self, gf2):
        m = SparseMatrix.from_columns(gf2, 2, [[(0, 1), (1, 1)], [(0, 1), (1, 1)]])
        assert search_randomized(m, TargetMinor.u23(), rng=4).failure_code == "rank-too-small"

    def test_budget_exhausted(self, gf2):
        m = SparseMatrix.from_columns(gf2, 3, [[(0, 1)], [(1, 1)], [(2, 1)], [(0, 1), (1, 1), (2, 1)]])
        outcome = search_randomized(m, TargetMinor.pg(3, 2), budget=5, rng=5)
        assert outcome.failure_code == "budget-exhausted"
        assert outcome.attempts == 5

    def test_circuit_free_target(self, u23_host, identity3):
        target = TargetMinor.explicit(identity3, require_circuit=False)
        outcome = search_randomized(u23_host, target, rng=6)
        assert outcome.found
        assert verify_witness(u23_host, target, outcome.witness)

    def test_planted_block_recovered(self, gf2):
        target = TargetMinor.u23(gf2)
        host = planted_instance(gf2, target.matrix, 3, 30, rng=7)
        assert host.n_rows == 2 + 3 + 30
        outcome = search_randomized(host, target, budget=500, rng=8)
        assert outcome.found
        assert verify_witness(host, target, outcome.witness)

    def test_planted_field_mismatch(self, gf2, gf3):
        with pytest.raises(FieldMismatchError):
            planted_instance(gf2, TargetMinor.u23(gf3).matrix, 3, 5)


def _agreement(field, count, budget):
    target = TargetMinor.u23(field)
    for seed in range(count):
        m = 3 + seed % 6
        matrix = process_matrix(dist_make(field, 3), 4, m, seed=seed).matrix
        exact = find_minor(matrix, target, mode="brute")
        if exact.found:
            assert verify_witness(matrix, target, exact.witness)
        witness = minor_randomized(matrix, target, budget=budget, rng=seed)
        if witness is not None:
            assert exact.found, f"seed={seed}: rastgele arayıcı kahinle çelişiyor"
            assert verify_witness(matrix, target, witness)


class TestOracleAgreement:
    """Rastgele arayıcı kaba kuvvetle hiç çelişmemeli"""

    @pytest.mark.parametrize("p", [2, 3])
    def test_small_instances(self, p):
        _agreement(field_make(p), 40, 200)

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [2, 3])
    def test_many_instances(self, p):
        _agreement(field_make(p), 200, 10_000)
