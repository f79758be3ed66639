"""End-to-end tests of the command-line interface and its file outputs."""

import math

import numpy as np
import pytest

import mcfv
from mcfv import cli


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


class TestConfigParsing:
    def test_roundtrip_file(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "# comment line\n"
            "samples = 12\n"
            "cells = 64   # trailing comment\n"
            "\n"
            "limiter = superbee\n"
        )
        values = cli.parse_config_file(cfgfile)
        assert values == {"samples": "12", "cells": "64", "limiter": "superbee"}

    def test_unknown_key_named(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("samplez = 12\n")
        with pytest.raises(cli.ConfigError, match="samplez"):
            cli.parse_config_file(cfgfile)

    def test_bad_line_rejected(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("cells 64\n")
        with pytest.raises(cli.ConfigError):
            cli.parse_config_file(cfgfile)

    def test_unknown_key_exit_code(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("wibble = 3\n")
        code = cli.main(["time-run", "--config", str(cfgfile)])
        assert code == 1
        assert "wibble" in capsys.readouterr().err

    def test_unknown_preset_exit_code(self, capsys):
        assert cli.main(["time-run", "--preset", "nope"]) == 1
        assert "nope" in capsys.readouterr().err

    def test_bad_value_exit_code(self, capsys):
        assert cli.main(["time-run", "--samples", "not-a-number"]) == 1


class TestExactCommand:
    def test_zero_noise_zero_variance(self, tmp_path, capsys):
        out = tmp_path / "o"
        code = cli.main([
            "exact", "--sigma", "0", "--a0", "0.25", "--cells", "64",
            "--out", str(out),
        ])
        assert code == 0
        header, data = read_csv(out / "exact_var.csv")
        assert header == ["x", "value"]
        np.testing.assert_array_equal(data[:, 1], 0.0)

    def test_constant_profile_constant_mean(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main([
            "exact", "--profile", "constant", "--cells", "32",
            "--out", str(out),
        ]) == 0
        _, data = read_csv(out / "exact_mean.csv")
        np.testing.assert_allclose(data[:, 1], 1.0, rtol=1e-12)

    def test_reference_kernel_parameters_logged(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert cli.main(["exact", "--cells", "64", "--out", str(out)]) == 0
        message = capsys.readouterr().out
        assert "0.12729" in message or "0.1272" in message
        meta = (out / "meta.txt").read_text()
        assert "displacement_mean" in meta
        got = float(meta.split("displacement_mean = ")[1].split("\n")[0])
        assert got == pytest.approx(0.1272895, abs=1e-7)


class TestTimeRunCommand:
    def test_outputs_and_determinism(self, tmp_path):
        args = ["time-run", "--samples", "40", "--cells", "64",
                "--seed", "11", "--workers", "1"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(args + ["--out", str(out1)]) == 0
        assert cli.main(args + ["--out", str(out2)]) == 0
        assert (out1 / "mean.csv").read_bytes() == (out2 / "mean.csv").read_bytes()
        assert (out1 / "var.csv").read_bytes() == (out2 / "var.csv").read_bytes()
        header, data = read_csv(out1 / "mean.csv")
        assert header == ["x", "value"] and data.shape == (64, 2)

    def test_meta_roundtrip_reproduces(self, tmp_path):
        out1 = tmp_path / "a"
        assert cli.main(["time-run", "--samples", "25", "--cells", "32",
                         "--seed", "5", "--out", str(out1)]) == 0
        out2 = tmp_path / "b"
        assert cli.main(["time-run", "--config", str(out1 / "meta.txt"),
                         "--out", str(out2)]) == 0
        assert (out1 / "mean.csv").read_bytes() == (out2 / "mean.csv").read_bytes()
        assert (out1 / "var.csv").read_bytes() == (out2 / "var.csv").read_bytes()

    def test_single_sample_deterministic_mean(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["time-run", "--samples", "1", "--sigma", "0",
                         "--cells", "32", "--out", str(out)]) == 0
        _, var = read_csv(out / "var.csv")
        np.testing.assert_array_equal(var[:, 1], 0.0)

    def test_meta_contains_error_telemetry(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["time-run", "--samples", "30", "--cells", "32",
                         "--out", str(out)]) == 0
        meta = (out / "meta.txt").read_text()
        assert "eps_mean" in meta and "delta_var" in meta
        # meta parses as a config again
        assert "samples = 30" in meta
        cli.parse_config_file(out / "meta.txt")


class TestSpaceRunCommand:
    def test_zero_amplitude_stationary(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["space-run", "--field-sigma", "0", "--zeta", "3",
                         "--samples", "5", "--cells", "64",
                         "--out", str(out)]) == 0
        _, mean = read_csv(out / "mean.csv")
        _, var = read_csv(out / "var.csv")
        profile = mcfv.get_profile("sine-jump")
        np.testing.assert_array_equal(mean[:, 1], profile.cell_averages(64))
        np.testing.assert_array_equal(var[:, 1], 0.0)

    def test_auto_final_time_from_zeta(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["space-run", "--zeta", "2", "--samples", "2",
                         "--cells", "256", "--c-dist", "0.4",
                         "--out", str(out)]) == 0
        meta = (out / "meta.txt").read_text()
        t_final = float(meta.split("t_final = ")[1].split("\n")[0])
        base = mcfv.FieldParams(0.0, 10.0, 5, 50.0, 256)
        mu = mcfv.mu_from_zeta(2.0, base)
        assert t_final == pytest.approx(0.4 / mu, rel=1e-12)

    def test_mu_zero_defaults_to_t2(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["space-run", "--zeta", "0", "--samples", "2",
                         "--cells", "64", "--out", str(out)]) == 0
        meta = (out / "meta.txt").read_text()
        assert "t_final = 2" in meta


class TestConvergenceCommand:
    def test_single_level_rejected(self, capsys):
        assert cli.main(["convergence", "--cells-list", "64",
                         "--samples", "5"]) == 1

    def test_time_sweep_writes_table(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["convergence", "--problem", "time",
                         "--cells-list", "32,64", "--samples", "60",
                         "--order", "1", "--out", str(out)]) == 0
        text = (out / "convergence.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == "I,eps_mean,delta_var,order_mean,order_var"
        assert len(lines) == 3

    def test_space_sweep_self_convergence(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["convergence", "--problem", "space",
                         "--cells-list", "64,128,256", "--samples", "30",
                         "--zeta", "2", "--out", str(out)]) == 0
        lines = (out / "convergence.csv").read_text().strip().split("\n")
        assert len(lines) == 3  # finest level is the reference


class TestFieldDumpCommand:
    def test_writes_interface_values(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["field-dump", "--cells", "128", "--seed", "9",
                         "--zeta", "1", "--out", str(out)]) == 0
        header, data = read_csv(out / "field.csv")
        assert header == ["x", "a"]
        assert data.shape == (128, 2)
        assert data[0, 0] == 0.0  # first interface sits at the left edge
        # reproducible from the same seed
        f = mcfv.sample_field_for(
            cli._run_config({**cli._DEFAULTS, "zeta": 1.0, "cells": 128,
                             "seed": 9, "t_final": "auto"}, "space", 128), 0)
        np.testing.assert_allclose(data[:, 1], f.a, rtol=1e-15)


class TestExitCodes:
    def test_numerical_failure_maps_to_2(self, monkeypatch, capsys):
        from mcfv.driver import SampleFailure

        def boom(cfg, workers=1):
            raise SampleFailure(7, "non-finite cell value in the final state")

        monkeypatch.setattr(cli, "run", boom)
        code = cli.main(["time-run", "--samples", "4", "--cells", "32"])
        assert code == 2
        assert "sample 7" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert cli.main(["time-run", "--config", "/nonexistent/x.cfg"]) == 1


def test_worker_count_invariance_via_cli(tmp_path):
    # acceptance-style check at unit-test scale
    args = ["time-run", "--samples", "150", "--cells", "48", "--seed", "3"]
    out1, out2 = tmp_path / "w1", tmp_path / "w4"
    assert cli.main(args + ["--workers", "1", "--out", str(out1)]) == 0
    assert cli.main(args + ["--workers", "4", "--out", str(out2)]) == 0
    assert (out1 / "mean.csv").read_bytes() == (out2 / "mean.csv").read_bytes()
    assert (out1 / "var.csv").read_bytes() == (out2 / "var.csv").read_bytes()
