import numpy as np
import pytest

from ofdm_sync.channel import ChannelModel, NoiseConvention, NoiseSpec
from ofdm_sync.cli import main
from ofdm_sync.config import ConfigError, parse_config
from ofdm_sync.detector import PeakReport
from ofdm_sync.experiments import HistogramResult, TraceResult, run_histogram, run_trace
from ofdm_sync.frame import OfdmConfig
from ofdm_sync.output import emit_plot_script, read_csv, write_histogram_csv, write_trace_csv

SMALL = OfdmConfig(num_data_symbols=2, lead_noise_len=128, tail_noise_len=128)


# --- config -----------------------------------------------------------------

def test_defaults():
    run = parse_config("", {})
    o = run.ofdm
    assert (o.fft_size, o.half_len, o.cp_len, o.num_data_symbols) == (128, 64, 32, 16)
    assert (o.lead_noise_len, o.tail_noise_len) == (512, 512)
    assert run.noise == NoiseSpec(10.0, NoiseConvention.EB_N0_QPSK)
    assert run.channel is None and run.threshold == 0.6


def test_file_values_and_comments():
    text = """
    # scenario
    fft_size = 256   # bigger
    cp_len = 16
    preamble_has_cp = yes
    taps = 1:0.8,0;33:0.35,0.35
    es_n0_db = 7
    """
    run = parse_config(text, {})
    assert run.ofdm.fft_size == 256 and run.ofdm.cp_len == 16 and run.ofdm.preamble_has_cp
    assert run.channel.duration == 33
    assert run.noise.convention is NoiseConvention.ES_N0


def test_power_of_two_rejected():
    with pytest.raises(ConfigError, match="line 1: fft_size"):
        parse_config("fft_size = 127", {})


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 3: unknown key 'fft'"):
        parse_config("cp_len = 8\n\nfft = 64\n", {})


@pytest.mark.parametrize("text", ["cp_len = abc", "preamble_has_cp = maybe", "just words",
                                  "cp_len = 1\ncp_len = 2", "eb_n0_db = 3\nes_n0_db = 4",
                                  "taps = 0:1,0", "trials = 0", "threshold = 1.5"])
def test_malformed(text):
    with pytest.raises(ConfigError):
        parse_config(text, {})


def test_flag_precedence():
    run = parse_config("es_n0_db = 10\ncp_len = 8", {"es_n0_db": 7.0, "cp_len": None})
    assert run.ofdm.es_over_n0_db == 7.0 and run.ofdm.cp_len == 8
    # a flag in one SNR convention replaces a file value in the other
    run = parse_config("eb_n0_db = 10", {"es_n0_db": 7.0})
    assert run.noise == NoiseSpec(7.0, NoiseConvention.ES_N0)


def test_resolved_text_round_trips():
    run = parse_config("taps = 1:0.8,0;33:0.3,0.2\nes_n0_db = 7\nseed = 5", {"trials": 300})
    again = parse_config(run.to_text(), {})
    assert again.ofdm == run.ofdm and again.channel == run.channel and again.trials == 300


# --- CSV / meta ------------------------------------------------------------------

def _tiny_trace():
    return TraceResult(np.array([128, 129, 130]), np.array([0.1, 1 / 3, 2.0]),
                       np.array([0.1, 0.25, 1.0]), np.array([0.0, 1e-7, 0.5]), 130, 200, 32,
                       [], [], PeakReport([(130, 1.0)], (130, 1.0), 0.6, 128), 7, SMALL)


def test_trace_csv_layout(tmp_path):
    path = tmp_path / "trace.csv"
    meta = write_trace_csv(_tiny_trace(), path, "cp_len = 32\n")
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert len(lines) == 4 and lines[0] == "n,m_old,m_new,m_delayed_r"
    assert lines[1].split(",")[0] == "128"
    assert meta.name == "meta.txt"
    text = meta.read_text()
    assert "cp_len = 32" in text and "# trial_seed = 7" in text


def test_trace_csv_round_trip_and_bytes(tmp_path):
    res = run_trace(SMALL, None, NoiseSpec(10), 3)
    a, b = tmp_path / "a" / "trace.csv", tmp_path / "b" / "trace.csv"
    write_trace_csv(res, a)
    write_trace_csv(res, b)
    assert a.read_bytes() == b.read_bytes()
    header, data = read_csv(a)
    assert np.array_equal(data[:, 0], res.indices)
    for col, name in enumerate(("m_old", "m_new", "m_delayed_r"), 1):
        np.testing.assert_allclose(data[:, col], getattr(res, name), rtol=1e-9, atol=0)


def test_histogram_csv(tmp_path):
    h = run_histogram(SMALL, NoiseSpec(7, NoiseConvention.ES_N0), 100, base_seed=1)
    path = tmp_path / "histogram.csv"
    meta = write_histogram_csv(h, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 65 and lines[0] == "bin_left,bin_right,count_old_norm,count_new_norm"
    _, data = read_csv(path)
    assert abs(data[:, 2].sum() - 1) <= 1e-12 and abs(data[:, 3].sum() - 1) <= 1e-12
    text = meta.read_text()
    assert "# mean_old = " in text and "# var_new = " in text


def test_histogram_zero_trials_rejected(tmp_path):
    z = np.zeros(0)
    h = HistogramResult(0, z, z, 0, 0, 0, 0, np.linspace(0, 1, 65), np.zeros(64), np.zeros(64))
    with pytest.raises(ValueError):
        write_histogram_csv(h, tmp_path / "h.csv")
    assert not (tmp_path / "h.csv").exists()


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="cannot write"):
        write_trace_csv(_tiny_trace(), blocker / "trace.csv")


# --- plot scripts ----------------------------------------------------------------

def test_trace_plot_script(tmp_path):
    csv_path = tmp_path / "data" / "trace.csv"
    write_trace_csv(_tiny_trace(), csv_path)
    script = emit_plot_script([csv_path], tmp_path / "plot.gp").read_text()
    assert "'data/trace.csv' using 1:2" in script and "title 'M old'" in script
    assert "using 1:3" in script and "title 'M new'" in script


def test_histogram_plot_script(tmp_path):
    h = run_histogram(SMALL, NoiseSpec(7, NoiseConvention.ES_N0), 10)
    csv_path = tmp_path / "histogram.csv"
    write_histogram_csv(h, csv_path)
    script = emit_plot_script([csv_path], tmp_path / "h.gp").read_text()
    assert "multiplot" in script and script.count("with boxes") == 2


def test_plot_script_missing_csv(tmp_path):
    with pytest.raises(FileNotFoundError):
        emit_plot_script([tmp_path / "nope.csv"], tmp_path / "p.gp")


# --- CLI -----------------------------------------------------------------------

def test_cli_trace(tmp_path, capsys):
    rc = main(["trace", "--output-dir", str(tmp_path), "--data-symbols", "2",
               "--lead-noise", "128", "--tail-noise", "128", "--seed", "3"])
    assert rc == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["meta.txt", "trace.csv", "trace.gp"]
    assert "PASS  no_spurious_new" in capsys.readouterr().out


def test_cli_outputs_byte_identical(tmp_path):
    args = ["trace", "--data-symbols", "2", "--taps", "1:0.8,0;33:0.35,0.35"]
    main(args + ["--output-dir", str(tmp_path / "a")])
    main(args + ["--output-dir", str(tmp_path / "b")])
    for name in ("trace.csv", "meta.txt", "trace.gp"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_no_plot_script(tmp_path):
    assert main(["trace", "--output-dir", str(tmp_path), "--data-symbols", "1",
                 "--no-plot-script"]) == 0
    assert not (tmp_path / "trace.gp").exists()


def test_cli_meta_reusable_as_config(tmp_path):
    main(["trace", "--output-dir", str(tmp_path / "a"), "--data-symbols", "1", "--es-n0-db", "12"])
    main(["trace", "--output-dir", str(tmp_path / "b"), "--config", str(tmp_path / "a" / "meta.txt")])
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()


def test_cli_histogram(tmp_path, capsys):
    rc = main(["histogram", "--output-dir", str(tmp_path), "--es-n0-db", "7", "--trials", "400",
               "--data-symbols", "1"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert (tmp_path / "histogram.csv").exists() and (tmp_path / "histogram.gp").exists()


def test_cli_histogram_failing_flag_exits_1(tmp_path):
    # noiseless: no variance to compare, so the variance flag cannot pass
    assert main(["histogram", "--output-dir", str(tmp_path), "--es-n0-db", "inf",
                 "--trials", "3", "--data-symbols", "0"]) == 1


def test_cli_config_errors_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("fft_size = 127\n")
    assert main(["trace", "--config", str(cfg)]) == 2
    assert "power of two" in capsys.readouterr().err
    assert main(["trace", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["trace", "--taps", "garbage"]) == 2


def test_cli_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["trace", "--eb-n0-db", "3", "--es-n0-db", "4"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4
