"""
Komut satırı testleri
"""

import json
import logging

import pytest

from matroidphase import __version__
from matroidphase.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from matroidphase.models.schemas import CSV_COLUMNS
from matroidphase.services.matrix_io import read_matrix, write_matrix

SUBCOMMANDS = ["thresholds", "simulate", "sweep", "peel", "find-minor", "pipeline"]


@pytest.fixture(autouse=True)
def restore_logging():
    """main() kök logger'ı yeniden kurar; testten sonra eski hâline döner"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def sweep_config(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"n": 40, "ratios": [0.4, 0.8], "trials": 2, "budget": 10, "master_seed": 3}))
    return path


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestThresholds:
    """thresholds alt komutu"""

    def test_k2_json(self, capsys):
        assert main(["thresholds", "--k", "2", "--json"]) == EXIT_OK
        assert abs(out_json(capsys)["d_k"] - 1.0) < 1e-9

    def test_plain_output(self, capsys):
        assert main(["thresholds", "--k", "3", "--d", "3.0"]) == EXIT_OK
        lines = dict(line.split("\t") for line in capsys.readouterr().out.splitlines())
        assert float(lines["d_k"]) == pytest.approx(2.753805, abs=1e-3)
        assert "rho" in lines

    def test_non_integer_k(self):
        assert main(["thresholds", "--k", "7.5"]) == EXIT_USAGE

    def test_k_out_of_range(self):
        assert main(["thresholds", "--k", "1"]) == EXIT_USAGE

    def test_verbose_flag(self, capsys):
        assert main(["-v", "thresholds", "--k", "3", "--json"]) == EXIT_OK
        assert out_json(capsys)["k"] == 3


class TestParser:
    """Yardım, sürüm ve eksik komut"""

    @pytest.mark.parametrize("command", SUBCOMMANDS)
    def test_help(self, command, capsys):
        assert main([command, "--help"]) == EXIT_OK
        assert "usage" in capsys.readouterr().out

    @pytest.mark.parametrize("command", SUBCOMMANDS)
    def test_version(self, command, capsys):
        assert main([command, "--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out

    def test_top_level_version(self):
        assert main(["--version"]) == EXIT_OK

    def test_missing_command(self):
        assert main([]) == EXIT_USAGE


class TestSimulateAndPeel:
    """simulate → matris dosyası → peel"""

    def test_round_trip(self, tmp_path, capsys):
        path = tmp_path / "a.mat"
        assert main(["simulate", "--n", "60", "--ratio", "0.9", "--seed", "4", "--emit-matrix", str(path)]) == EXIT_OK
        record = out_json(capsys)
        assert record["m"] == 54
        assert read_matrix(path).n_cols == 54

        assert main(["peel", "--input", str(path)]) == EXIT_OK
        peel = out_json(capsys)
        assert peel["rank"] == record["rank"]
        assert peel["core_rows"] == record["core_rows"]
        assert peel["core_cols"] == record["core_cols"]

    def test_peel_writes_core(self, tmp_path, capsys, u23_host):
        src, core = tmp_path / "h.mat", tmp_path / "core.mat"
        write_matrix(src, u23_host)
        assert main(["peel", "--input", str(src), "--output", str(core)]) == EXIT_OK
        assert out_json(capsys)["peeled_cols"] == 1
        assert read_matrix(core).n_cols == 3

    def test_print_core(self, tmp_path, capsys, u23_host):
        src = tmp_path / "h.mat"
        write_matrix(src, u23_host)
        assert main(["peel", "--input", str(src), "--print-core"]) == EXIT_OK
        assert out_json(capsys)["core"].startswith("matroidphase-mat v1")

    def test_simulate_diagnostics(self, capsys):
        assert main(["simulate", "--n", "200", "--ratio", "0.95", "--diagnostics"]) == EXIT_OK
        assert "red_fraction" in out_json(capsys)["diagnostics"]

    def test_bad_distribution(self):
        assert main(["simulate", "--n", "20", "--ratio", "0.5", "--distribution", "{bozuk"]) == EXIT_USAGE

    def test_n_below_k(self):
        assert main(["simulate", "--n", "2", "--ratio", "0.5"]) == EXIT_USAGE

    def test_missing_input(self, tmp_path):
        assert main(["peel", "--input", str(tmp_path / "yok.mat")]) == EXIT_RUNTIME


class TestSweep:
    """sweep alt komutu"""

    def test_stdout_csv(self, sweep_config, capsys):
        assert main(["sweep", "--config", str(sweep_config)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 5

    def test_rerun_byte_identical(self, sweep_config, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--config", str(sweep_config), "--output", str(a)]) == EXIT_OK
        assert main(["sweep", "--config", str(sweep_config), "--output", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_summary_file(self, sweep_config, tmp_path, capsys):
        summary = tmp_path / "s.csv"
        assert main(["sweep", "--config", str(sweep_config), "--summary", str(summary)]) == EXIT_OK
        assert len(summary.read_text().splitlines()) == 3

    def test_bad_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1, "k": 3}')
        assert main(["sweep", "--config", str(path)]) == EXIT_USAGE


class TestFindMinor:
    """find-minor alt komutu"""

    def test_found(self, tmp_path, capsys, u23_host):
        path = tmp_path / "h.mat"
        write_matrix(path, u23_host)
        assert main(["find-minor", "--input", str(path), "--seed", "1"]) == EXIT_OK
        payload = out_json(capsys)
        assert payload["found"] is True
        assert payload["witness"]["verified"] is True

    def test_not_found_exit_code(self, tmp_path, capsys, identity3):
        path = tmp_path / "i.mat"
        write_matrix(path, identity3)
        assert main(["find-minor", "--input", str(path)]) == EXIT_NEGATIVE
        assert out_json(capsys)["failure_code"] == "full-rank"

    def test_brute_absent(self, tmp_path, capsys, identity3):
        path = tmp_path / "i.mat"
        write_matrix(path, identity3)
        assert main(["find-minor", "--input", str(path), "--mode", "brute"]) == EXIT_NEGATIVE
        assert out_json(capsys)["failure_code"] == "absent"

    def test_bad_target(self, tmp_path, u23_host):
        path = tmp_path / "h.mat"
        write_matrix(path, u23_host)
        assert main(["find-minor", "--input", str(path), "--target", "k5"]) == EXIT_USAGE


class TestPipelineCommand:
    """pipeline alt komutu"""

    def test_small_run(self, capsys):
        assert main(["pipeline", "--n", "400", "--seed", "2"]) == EXIT_OK
        summary = out_json(capsys)
        assert summary["n"] == 400
        assert summary["failure_code"] in {"none", "dependent-core", "undersized-U", "singular", "empty-V"}

    def test_empty_core_is_runtime_error(self):
        assert main(["pipeline", "--n", "300", "--d", "1.0", "--seed", "2"]) == EXIT_RUNTIME


class TestUnexpectedErrors:
    """Alan dışı hatalar da çalışma zamanı koduna düşer"""

    def test_stray_exception(self, monkeypatch, capsys):
        def broken(k, d):
            raise RuntimeError("beklenmedik")

        monkeypatch.setattr("matroidphase.cli.threshold_report", broken)
        assert main(["thresholds", "--k", "3"]) == EXIT_RUNTIME
        assert capsys.readouterr().out == ""

    def test_non_utf8_input(self, tmp_path):
        path = tmp_path / "bozuk.mat"
        path.write_bytes(b"matroidphase-mat v1 q=2 p=2 e=1 rows=2 cols=1\n\xff\n")
        assert main(["peel", "--input", str(path)]) == EXIT_RUNTIME
