import io
import re

import pytest

from src.cli import curve_writer
from src.cli import main as cli_main
from src.cli.main import main
from src.schemas.lora_schemas import SfBoundaries
from src.schemas.sim_schemas import BinEstimate, CurveEstimate, SimConfig
from src.simulation.config import load_config

HEADER = "distance_km,p_h1,p_h1_ci,p_h2,p_h2_ci,p_success,p_success_ci,trials,sf,throughput_bps"
ROW = re.compile(r"^\d+\.\d{6}(,\d+\.\d{6}){6},\d+,\d+,\d+\.\d{6}$")


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(
        "# quick sweep\n"
        "radius_km = 6\n"
        "gw_intensity = 0.02\n"
        "ed_intensity = 0.5\n"
        "bins = 0.5:4.5:1.0\n"
        "trials = 30\n",
        encoding='utf-8',
    )
    return path


def _run(config_file, out, *extra):
    return main(['--config', str(config_file), '--seed', '42', '--out', str(out), '--quiet', *extra])


class TestMain:
    def test_happy_path(self, config_file, tmp_path):
        out = tmp_path / "results"
        assert _run(config_file, out) == 0
        assert sorted(p.name for p in out.iterdir()) == ['rayleigh_curves.csv', 'rayleigh_manifest.txt']

        lines = (out / 'rayleigh_curves.csv').read_text(encoding='utf-8').splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 1 + 5
        assert all(ROW.match(line) for line in lines[1:])

    def test_rerun_is_byte_identical(self, config_file, tmp_path):
        assert _run(config_file, tmp_path / "a") == 0
        assert _run(config_file, tmp_path / "b", '--workers', '2') == 0
        first = (tmp_path / "a" / 'rayleigh_curves.csv').read_bytes()
        assert first == (tmp_path / "b" / 'rayleigh_curves.csv').read_bytes()

    def test_both_channels(self, config_file, tmp_path):
        out = tmp_path / "both"
        assert _run(config_file, out, '--channel', 'both', '--coverage') == 0
        assert sorted(p.name for p in out.iterdir()) == [
            'rayleigh_curves.csv', 'rayleigh_manifest.txt', 'rician_curves.csv', 'rician_manifest.txt',
        ]
        manifest = (out / 'rician_manifest.txt').read_text(encoding='utf-8')
        assert "channel = rician" in manifest
        assert "coverage_p_success = " in manifest

    def test_manifest_reproduces_run(self, config_file, tmp_path):
        assert _run(config_file, tmp_path / "first") == 0
        manifest = tmp_path / "first" / 'rayleigh_manifest.txt'
        config = load_config(manifest)
        assert config.seed == 42
        assert config.trials == 30

        assert main(['--config', str(manifest), '--out', str(tmp_path / "again"), '--quiet']) == 0
        assert ((tmp_path / "first" / 'rayleigh_curves.csv').read_bytes()
                == (tmp_path / "again" / 'rayleigh_curves.csv').read_bytes())

    def test_missing_config(self, tmp_path, capsys):
        missing = tmp_path / "missing.cfg"
        assert main(['--config', str(missing), '--out', str(tmp_path / "out")]) == 1
        assert "missing.cfg" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_invalid_config_names_key(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("trials = 5\ned_intensity = -1\n", encoding='utf-8')
        assert main(['--config', str(path), '--out', str(tmp_path / "out")]) == 1
        err = capsys.readouterr().err
        assert "ed_intensity" in err and "line 2" in err

    def test_unwritable_output(self, config_file, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("", encoding='utf-8')
        assert _run(config_file, blocker) == 1

    def test_malformed_worker_env(self, config_file, tmp_path, monkeypatch):
        monkeypatch.setenv('LORASIM_WORKERS', 'many')
        assert _run(config_file, tmp_path / "out") == 1

    def test_unexpected_failure_removes_earlier_channels(self, config_file, tmp_path, monkeypatch, capsys):
        real_sweep = cli_main.run_sweep
        calls = []

        def failing_second_sweep(config):
            calls.append(config.fading)
            if len(calls) == 2:
                raise ValueError("frame construction failed")
            return real_sweep(config)

        monkeypatch.setattr(cli_main, 'run_sweep', failing_second_sweep)
        out = tmp_path / "out"
        assert _run(config_file, out, '--channel', 'both') == 1
        assert len(calls) == 2
        assert list(out.iterdir()) == []
        err = capsys.readouterr().err
        assert "ValueError" in err and "frame construction failed" in err

    def test_unknown_channel_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(['--channel', 'nakagami', '--out', str(tmp_path)])
        assert excinfo.value.code == 2


class TestCurveWriter:
    def _curve(self):
        b = BinEstimate(
            distance_km=1.0, sf=7, p_h1=0.5, p_h1_ci=0.15, p_h2=0.5, p_h2_ci=0.15,
            p_success=0.5, p_success_ci=0.15, trials=100, throughput_bps=2.722222, analytic_h1=0.5,
        )
        rings = SfBoundaries(d=(0.0, 4.0, 5.0, 6.0, 8.0, 10.0, 13.0))
        return CurveEstimate(config=SimConfig(), boundaries=rings, bins=[b])

    def test_single_bin_format(self):
        sink = io.StringIO()
        curve_writer.emit_curves(self._curve(), sink)
        lines = sink.getvalue().split("\n")
        assert lines[0] == HEADER
        assert lines[1] == "1.000000,0.500000,0.150000,0.500000,0.150000,0.500000,0.150000,100,7,2.722222"
        assert lines[2] == ""
