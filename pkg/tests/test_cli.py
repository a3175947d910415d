"""CLI: sweeps, CSV format, presets, validation, exit codes."""

import math

import numpy as np
import pytest

from mixent import cli


def make_spec(**kw):
    base = dict(
        scheme="kerr_micro_thermal",
        fixed={"r": 1.0, "V": 10.0, "gamma": 2.0},
        sweep=("d", 0.0, 10.0, 5),
        out=None,
        validate_tol=None,
    )
    base.update(kw)
    return cli.SweepSpec(**base)


class TestSweep:
    def test_row_count_and_schema(self):
        code, text, failures = cli.run_sweep(make_spec())
        lines = text.splitlines()
        assert code == 0 and not failures
        assert lines[0] == "# mixent-csv v1"
        assert lines[1] == "d,npt,trace"
        assert len(lines) == 2 + 5
        assert text.endswith("\n")

    def test_deterministic_text(self):
        a = cli.run_sweep(make_spec())[1]
        b = cli.run_sweep(make_spec())[1]
        assert a == b

    def test_validation_columns(self):
        code, text, failures = cli.run_sweep(make_spec(validate_tol=1e-8, sweep=("d", 0.0, 4.0, 3)))
        assert code == 0 and not failures
        assert text.splitlines()[1] == "d,npt,trace,oracle_npt,max_dev"
        last = text.splitlines()[-1].split(",")
        assert float(last[4]) <= 1e-8

    def test_validation_failure_exit_code(self):
        # an impossible tolerance flags every row and returns 3
        code, text, failures = cli.run_sweep(make_spec(validate_tol=0.0, sweep=("d", 1.0, 2.0, 2)))
        assert code == 3
        assert failures

    def test_degenerate_r_sweep_rows_are_zero(self):
        spec = cli.SweepSpec(
            scheme="kerr_micro_thermal",
            fixed={"V": 10.0, "gamma": 2.0, "d": 0.0},
            sweep=("r", 0.0, 1.0, 2),
        )
        _, text, _ = cli.run_sweep(spec)
        rows = [line.split(",") for line in text.splitlines()[2:]]
        assert [float(r[1]) for r in rows] == [0.0, 0.0]

    def test_file_output_newlines(self, tmp_path):
        out = tmp_path / "curve.csv"
        cli.run_sweep(make_spec(out=str(out)))
        data = out.read_bytes()
        assert b"\r" not in data
        assert data.decode().startswith("# mixent-csv v1\n")

    def test_threaded_rows_identical(self, monkeypatch):
        base = cli.run_sweep(make_spec())[1]
        monkeypatch.setenv("MIXENT_THREADS", "4")
        assert cli.run_sweep(make_spec())[1] == base


class TestSpecValidation:
    def test_unknown_scheme(self):
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(scheme="qq"))

    def test_unsweepable_parameter(self):
        with pytest.raises(cli.SpecError):
            cli.run_sweep(
                cli.SweepSpec("bs", {"r": 1.0, "V": 2.0, "d": 0.0, "gamma": 2.0}, ("sign", -1, 1, 3))
            )

    def test_count_and_range(self):
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(sweep=("d", 0.0, 1.0, 1)))
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(sweep=("d", 1.0, 1.0, 4)))

    def test_missing_and_unknown_parameters(self):
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(fixed={"r": 1.0, "V": 10.0}))
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(fixed={"r": 1.0, "V": 10.0, "gamma": 2.0, "zeta": 1.0}))

    def test_fixed_and_swept_clash(self):
        with pytest.raises(cli.SpecError):
            cli.run_sweep(make_spec(fixed={"r": 1.0, "V": 10.0, "gamma": 2.0, "d": 1.0}))


class TestMain:
    def test_sweep_stdout(self, capsys):
        code = cli.main(
            [
                "sweep",
                "--scheme",
                "direct_kerr",
                "--set",
                "gamma=2",
                "--set",
                "V=10",
                "--sweep",
                "d:0:20:4",
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out.startswith("# mixent-csv v1\n")
        assert len(captured.out.splitlines()) == 6

    def test_usage_error_exit_2(self, capsys):
        code = cli.main(["sweep", "--scheme", "jc", "--set", "p=1", "--sweep", "gt:0:1:5"])
        assert code == 2
        assert "missing parameters" in capsys.readouterr().err

    def test_bad_set_syntax(self, capsys):
        code = cli.main(["sweep", "--scheme", "jc", "--set", "p", "--sweep", "gt:0:1:5"])
        assert code == 2

    def test_argparse_usage_exit_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["validate", "not-a-grid"])
        assert err.value.code == 2

    def test_preset_list(self, capsys):
        assert cli.main(["preset", "list"]) == 0
        out = capsys.readouterr().out
        assert "fig2a" in out and "fig5" in out

    def test_config_file_with_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(
            "# comment\nscheme=kerr_micro_thermal\nr=1\nV=10\ngamma=2\nsweep=d:0:10:5\n"
        )
        code = cli.main(["sweep", "--config", str(cfg), "--set", "r=0.5", "--sweep", "d:0:10:3"])
        out = capsys.readouterr().out
        assert code == 0
        assert len(out.splitlines()) == 5  # override wins

    def test_validate_jc_grid(self, capsys):
        assert cli.main(["validate", "jc-grid"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_validate_failure_exit_3(self, capsys):
        assert cli.main(["validate", "direct-grid", "--tol", "0"]) == 3
        out = capsys.readouterr().out
        assert "FAIL" in out and "worst case" in out


class TestPresets:
    def test_all_presets_well_formed(self):
        for name, spec in cli.PRESETS.items():
            checked = cli._check_spec(spec)
            assert checked.scheme in cli.SCHEMES, name

    def test_preset_fixed_parameters(self):
        assert cli.PRESETS["fig1a"].fixed["p"] == 1.0
        assert cli.PRESETS["fig1b"].fixed["p"] == 0.9
        assert cli.PRESETS["fig1c"].fixed["p"] == 0.8
        for name in ("fig1d", "fig1e", "fig1f"):
            assert cli.PRESETS[name].fixed["p"] == 0.5
        assert [cli.PRESETS[k].fixed["lam"] for k in ("fig1d", "fig1e", "fig1f")] == [0.0, 0.1, 0.2]
        for name in ("fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5"):
            assert cli.PRESETS[name].fixed["gamma"] == 2.0

    def test_preset_run_writes_file(self, tmp_path, monkeypatch):
        out = tmp_path / "fig2a.csv"
        assert cli.main(["preset", "run", "fig2a", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2 + 201

    def test_fig1a_zeros_on_quarter_periods(self, tmp_path):
        out = tmp_path / "fig1a.csv"
        assert cli.main(["preset", "run", "fig1a", "--out", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[2:]]
        assert len(rows) == 401
        for gt_text, npt_text, _ in rows:
            gt, value = float(gt_text), float(npt_text)
            k = round(gt / (math.pi / 2))
            if abs(gt - k * math.pi / 2) < 1e-9:
                assert value <= 1e-10, gt
            else:
                assert value > 0.0, gt

    def test_fig3a_rises_with_mixture(self, tmp_path):
        out = tmp_path / "fig3a.csv"
        assert cli.main(["preset", "run", "fig3a", "--out", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[2:]]
        first, last = float(rows[0][1]), float(rows[-1][1])
        assert first <= 1e-10  # V = 1, d = 0: vacuum, no entanglement
        assert last > 0.0

    @pytest.mark.parametrize("name", ["fig2a", "fig4a", "fig5"])
    def test_displacement_onset_shape(self, name, tmp_path):
        # qualitative regression: flat zero at d = 0, then a rise to strong
        # entanglement once d is well past sqrt(V)
        out = tmp_path / f"{name}.csv"
        assert cli.main(["preset", "run", name, "--out", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[2:]]
        npts = np.array([float(r[1]) for r in rows])
        assert npts[0] <= 1e-10
        assert npts.max() > 0.5
        assert np.all(npts >= 0.0)
        # once the curve has risen past half maximum it does not fall back to zero
        risen = np.flatnonzero(npts > 0.5 * npts.max())[0]
        assert np.all(npts[risen:] > 0.0)
