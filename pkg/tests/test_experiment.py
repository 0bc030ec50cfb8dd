"""
Deney düzeneği testleri: denemeler, taramalar, CSV ve özetler
"""

import csv
import io
import math

import pytest
from pydantic import ValidationError

from matroidphase.config import settings
from matroidphase.models.schemas import CSV_COLUMNS, SweepConfig
from matroidphase.services.experiment import (
    PARTIAL_MARKER,
    load_config,
    run_sweep,
    run_trial,
    summarize,
    sweep_tasks,
    trial_matrix,
    write_summary,
)
from matroidphase.services.spmat import rank
from matroidphase.utils.rng import derive_seed

HEADER = ",".join(CSV_COLUMNS) + "\n"


def small_config(**overrides):
    values = dict(n=60, ratios=[0.5, 0.9], trials=3, budget=20, master_seed=17)
    values.update(overrides)
    return SweepConfig(**values)


class FlakyHandle(io.StringIO):
    """İkinci write çağrısında bir kez OSError yükseltir"""

    def __init__(self):
        super().__init__()
        self.calls = 0

    def write(self, text):
        self.calls += 1
        if self.calls == 2:
            raise OSError("disk dolu")
        return super().write(text)


class TestSweepConfig:
    """Doğrulama"""

    def test_n_below_k(self):
        with pytest.raises(ValidationError):
            SweepConfig(n=2, k=3)

    def test_negative_ratio(self):
        with pytest.raises(ValidationError):
            SweepConfig(n=10, ratios=[0.5, -0.1])

    def test_q(self):
        assert SweepConfig(n=10, p=2, e=3).q == 8

    def test_load_config(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text('{"n": 40, "ratios": [0.2, 0.4], "trials": 2, "target": "pg:3:2"}', encoding="utf-8")
        config = load_config(path)
        assert config.n == 40 and config.trials == 2
        assert config.target == "pg:3:2"


class TestTrial:
    """Tek deneme"""

    def test_deterministic(self):
        config = small_config()
        assert run_trial(config, 1, 1) == run_trial(config, 1, 1)

    def test_seed_derivation(self):
        config = small_config()
        record = run_trial(config, 2, 1)
        assert record.seed == derive_seed(17, 1, 2)
        _, seed = trial_matrix(config, 2, 1)
        assert seed == record.seed

    def test_rank_matches_matrix(self):
        config = small_config()
        record = run_trial(config, 0, 1)
        matrix, _ = trial_matrix(config, 0, 1)
        assert record.m == matrix.n_cols == 54
        assert record.rank == rank(matrix)
        assert record.full_rank == (record.rank == record.m)

    def test_zero_ratio(self):
        record = run_trial(small_config(ratios=[0.0]), 0)
        assert record.m == 0 and record.rank == 0
        assert record.full_rank
        assert not record.minor_found
        assert record.failure_code == "full-rank"

    def test_errors_recorded(self):
        # 20 sütun kaba kuvvet sınırının üstünde
        config = small_config(n=20, ratios=[1.0], finder="brute")
        record = run_trial(config, 0)
        assert record.failure_code == "error:InstanceTooLargeError"
        assert not record.minor_found

    def test_brute_finder(self):
        record = run_trial(small_config(n=5, ratios=[2.0], finder="brute"), 0)
        assert record.failure_code in {"none", "absent"}
        assert record.minor_found == (record.failure_code == "none")

    def test_diagnostics(self):
        record = run_trial(small_config(n=300, ratios=[0.95], diagnostics=True), 0)
        diag = record.diagnostics
        assert set(diag) >= {"core_row_frac", "core_col_frac", "rank_frac", "red_fraction", "max_red_component"}
        assert diag["rank_frac"] == pytest.approx(record.rank / 300)

    def test_time_off_by_default(self):
        assert run_trial(small_config(), 0).time_ms == 0

    def test_witness_summary_when_found(self):
        record = run_trial(small_config(n=200, ratios=[1.0], budget=200), 0)
        if record.minor_found:
            assert record.witness is not None
            assert len(record.witness.embedding) == 3


class TestSweep:
    """Tarama ve CSV"""

    def test_task_order(self):
        assert sweep_tasks(small_config()) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    def test_rows_in_order(self):
        out = io.StringIO()
        records = run_sweep(small_config(), threads=1, out=out)
        assert [(r.ratio_index, r.trial_index) for r in records] == sweep_tasks(small_config())
        lines = out.getvalue().splitlines()
        assert len(lines) == 7
        assert lines[0] + "\n" == HEADER

    def test_empty_ratios_header_only(self):
        out = io.StringIO()
        assert run_sweep(small_config(ratios=[]), out=out) == []
        assert out.getvalue() == HEADER

    def test_output_file_rerun_identical(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        run_sweep(small_config(output=str(first)))
        run_sweep(small_config(output=str(second)))
        assert first.read_bytes() == second.read_bytes()

    def test_csv_values(self):
        out = io.StringIO()
        records = run_sweep(small_config(ratios=[0.5], trials=1), out=out)
        row = next(csv.DictReader(io.StringIO(out.getvalue())))
        assert row["seed"] == str(records[0].seed)
        assert row["full_rank"] in {"true", "false"}

    def test_parallel_matches_serial(self, monkeypatch):
        monkeypatch.setattr(settings, "THREADS", 2)
        serial = run_sweep(small_config(), threads=1)
        parallel = run_sweep(small_config(), threads=2)
        assert serial == parallel

    def test_partial_marker(self):
        handle = FlakyHandle()
        with pytest.raises(OSError):
            run_sweep(small_config(), out=handle)
        text = handle.getvalue()
        assert text.startswith(HEADER)
        assert PARTIAL_MARKER in text


class TestSummary:
    """Oran başına özet"""

    def test_rows(self):
        records = run_sweep(small_config())
        rows = summarize(records)
        assert [r.ratio for r in rows] == [0.5, 0.9]
        assert all(r.trials == 3 for r in rows)
        assert rows[0].predicted_rank_limit == pytest.approx(0.5)
        assert 0.0 <= rows[1].found_freq <= 1.0

    def test_write_summary(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_summary(summarize(run_sweep(small_config(ratios=[0.3], trials=2))), path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("ratio,trials,found_freq")
        assert len(lines) == 2


class TestFullRankTransition:
    """Tam rank eşiğin altında neredeyse kesin, üstünde nadir"""

    @pytest.mark.slow
    def test_full_rank_frequencies(self):
        config = SweepConfig(n=3000, ratios=[0.85, 0.95], trials=100, budget=1, master_seed=2024)
        below, above = summarize(run_sweep(config))
        assert below.full_rank_freq >= 0.95
        assert above.full_rank_freq <= 0.10


@pytest.fixture(scope="module")
def phase_rows():
    ratios = [0.80, 0.85, 0.90, 0.95, 1.00, 1.05, 1.10]
    config = SweepConfig(n=2000, ratios=ratios, trials=50, target="u23", master_seed=77)
    return summarize(run_sweep(config))


@pytest.mark.slow
class TestPhaseTransition:
    """U(2,3) bulunma sıklığı eşikte sıçrar; rank limite oturur"""

    def test_found_frequency_jump(self, phase_rows):
        by_ratio = {round(r.ratio, 2): r for r in phase_rows}
        assert by_ratio[0.85].found_freq <= 0.05
        assert by_ratio[1.05].found_freq >= 0.90

    def test_found_frequency_nondecreasing(self, phase_rows):
        for prev, cur in zip(phase_rows, phase_rows[1:]):
            pooled = (prev.found_freq + cur.found_freq) / 2
            sigma = math.sqrt(2 * pooled * (1 - pooled) / cur.trials)
            assert cur.found_freq >= prev.found_freq - 2 * sigma

    def test_rank_matches_limit(self, phase_rows):
        for row in phase_rows:
            assert abs(row.mean_rank_frac - row.predicted_rank_limit) <= 0.02, row.ratio
