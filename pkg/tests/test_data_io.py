import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from melink import ConfigError, DomainError, ParseError
from melink.data_io import (
    CONFIG_KEYS, REFERENCE_MODEL, Config, RangeFile, SpectrumFile, dumps_config, dumps_range_file,
    dumps_spectrum_file, dumps_table, loads_config, loads_range_file, loads_spectrum_file, parse_range,
    parse_spectrum, read_config, synth_dataset, write_dataset,
)
from melink.link_budget import RangeSample, fit_path_loss, predict_snr

TWO_BINS = "# noise_floor_dbv=-91\nfrequency_hz,level_dbv\n31000,-80\n31010,-70\n"


def test_two_bin_spectrum():
    sf = loads_spectrum_file(TWO_BINS)
    s = sf.to_spectrum()
    assert s.n_bins == 2
    assert s.delta_f == 10.0
    np.testing.assert_allclose(s.snr, [10 ** 1.1, 10 ** 2.1])


def test_spectrum_round_trip_and_metadata_order():
    text = "# distance_m=8\n# noise_floor_dbv=-95\n# note=hello world\nfrequency_hz,level_dbv\n34629.26,-80.5\n34629.27,-81\n"
    sf = loads_spectrum_file(text)
    assert list(sf.metadata) == ["distance_m", "noise_floor_dbv", "note"]
    assert sf.distance_m == 8.0 and sf.noise_floor_dbv == -95.0
    assert dumps_spectrum_file(sf) == text
    assert dumps_spectrum_file(loads_spectrum_file(dumps_spectrum_file(sf))) == text


def test_default_noise_floor():
    sf = loads_spectrum_file("frequency_hz,level_dbv\n1,-91\n2,-91\n")
    assert sf.noise_floor_dbv == -91.0
    assert sf.distance_m is None


def test_decreasing_frequency_reports_line():
    text = "frequency_hz,level_dbv\n31000,-80\n31010,-80\n31005,-80\n"
    with pytest.raises(ParseError) as e:
        loads_spectrum_file(text, "s.csv")
    assert e.value.line == 4
    assert "s.csv:4" in str(e.value)


@pytest.mark.parametrize("bad", ["nan", "inf", "-inf", "abc"])
def test_non_finite_rejected(bad):
    with pytest.raises(ParseError) as e:
        loads_spectrum_file(f"frequency_hz,level_dbv\n31000,-80\n31010,{bad}\n")
    assert e.value.line == 3


def test_missing_header():
    with pytest.raises(ParseError, match="header"):
        loads_spectrum_file("31000,-80\n31010,-70\n")
    with pytest.raises(ParseError, match="header"):
        loads_spectrum_file("")


def test_wrong_column_count():
    with pytest.raises(ParseError) as e:
        loads_spectrum_file("frequency_hz,level_dbv\n31000,-80,3\n")
    assert e.value.line == 2


def test_missing_file(tmp_path):
    with pytest.raises(ParseError, match="no such file"):
        parse_spectrum(tmp_path / "nope.csv")


def test_non_uniform_grid_resampled():
    s = parse_spectrum(io.StringIO("frequency_hz,level_dbv\n0,-91\n1,-81\n3,-71\n4,-71\n6,-91\n"))
    assert s.delta_f == 2.0


def test_range_row():
    rf = loads_range_file("distance_m,peak_snr_db,peak_frequency_hz,flag\n730,12.0,34629.26,noisefloor_shift\n")
    (s,) = rf.samples
    assert (s.distance, s.peak_snr, s.frequency_at_peak, s.flag) == (730.0, 12.0, 34629.26, "noisefloor_shift")


def test_range_empty_and_optional_columns():
    assert parse_range(io.StringIO("distance_m,peak_snr_db,peak_frequency_hz,flag\n")) == []
    rf = loads_range_file("distance_m,peak_snr_db,peak_frequency_hz,flag\n5,30,,\n")
    assert math.isnan(rf.samples[0].frequency_at_peak)
    assert rf.samples[0].flag == "ok"
    assert dumps_range_file(rf).endswith("\n5,30,,ok\n")


def test_range_unknown_flag():
    with pytest.raises(ParseError) as e:
        loads_range_file("distance_m,peak_snr_db,peak_frequency_hz,flag\n5,30,35000,ok\n8,20,35000,weird\n")
    assert e.value.line == 3


def test_range_round_trip():
    rf = RangeFile([RangeSample(8.0, 45.25, 35500.0, "ok"), RangeSample(80.0, 20.0, 34629.26, "anomaly")],
                   {"seed": "3"})
    text = dumps_range_file(rf)
    assert dumps_range_file(loads_range_file(text)) == text
    assert loads_range_file(text).samples == rf.samples


floats = st.floats(-200, 200, allow_nan=False).map(lambda x: float(f"{x:.6g}"))


@settings(max_examples=50)
@given(st.lists(floats, min_size=1, max_size=30), st.floats(1, 1e5), st.floats(0.01, 100))
def test_spectrum_round_trip_property(levels, start, df):
    start, df = float(f"{start:.6g}"), float(f"{df:.4g}")
    freqs = start + df * np.arange(len(levels))
    freqs = np.array([float(f"{f:.10g}") for f in freqs])
    if np.any(np.diff(freqs) <= 0):
        return
    sf = SpectrumFile(freqs, np.array(levels), {})
    back = loads_spectrum_file(dumps_spectrum_file(sf))
    np.testing.assert_array_equal(back.frequency_hz, freqs)
    np.testing.assert_array_equal(back.level_dbv, levels)


def test_config_defaults_and_round_trip():
    cfg = Config()
    assert (cfg.conductivity_s_per_m, cfg.n_tx, cfg.center_hz) == (0.0097, 15, 34629.26)
    assert loads_config(dumps_config(cfg)) == cfg
    custom = cfg.override(conductivity_s_per_m=4.818, n_rx=3, rb_bps=None)
    assert loads_config(dumps_config(custom)) == custom
    assert custom.rb_bps == 100.0


def test_config_parse_with_comments():
    cfg = loads_config("# link\nmedium.conductivity_s_per_m = 4.818  # salt\n\narray.n_tx = 4\n")
    assert cfg.conductivity_s_per_m == 4.818
    assert cfg.n_tx == 4
    assert cfg.medium().conductivity == 4.818
    assert cfg.tx_array().n_elements == 4


def test_config_covers_every_field():
    assert sorted(CONFIG_KEYS.values()) == sorted(f for f in Config.__dataclass_fields__)


@pytest.mark.parametrize("text, line", [
    ("medium.conductivity_s_per_m = 1\nmedium.salinity = 3\n", 2),
    ("array.n_tx = 2.5\n", 1),
    ("modem.rb_bps = fast\n", 1),
    ("antenna.q = 1\nantenna.q = 2\n", 2),
    ("just words\n", 1),
    ("antenna.q = nan\n", 1),
])
def test_config_errors(text, line):
    with pytest.raises(ConfigError) as e:
        loads_config(text, "c.cfg")
    assert e.value.line == line
    assert str(e.value).startswith(f"c.cfg:{line}:")


def test_read_config_file(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("modem.delta_f_hz = 200\n")
    assert read_config(p).delta_f_hz == 200.0


def test_table_formatting():
    text = dumps_table(["frequency_hz", "snr"], [(34629.26, 1 / 3)], freq_columns=("frequency_hz",))
    assert text == "frequency_hz,snr\n34629.26,0.333333\n"


def test_synth_zero_jitter_reproduces_model():
    spectra, rf = synth_dataset(jitter_db=0.0, seed=1)
    d = np.array([s.distance for s in rf.samples])
    np.testing.assert_allclose([s.peak_snr for s in rf.samples], predict_snr(REFERENCE_MODEL, d), atol=1e-9)
    # each spectrum peaks at the range-file SNR above its floor
    for sf, s in zip(spectra, rf.samples):
        assert np.max(sf.level_dbv) - sf.noise_floor_dbv == pytest.approx(s.peak_snr, abs=1e-6)


def test_synth_fit_recovers_exponents():
    _, rf = synth_dataset(seed=2, distances=np.geomspace(2, 730, 200))
    model = fit_path_loss(rf.samples, [15.0])
    assert model.segments[0].exponent == pytest.approx(4.0, rel=0.05)
    assert model.segments[1].exponent == pytest.approx(1.0, rel=0.05)
    assert model.rms_residual == pytest.approx(1.0, rel=0.2)


def test_synth_byte_identical(tmp_path):
    a = write_dataset(*synth_dataset(seed=5, distances=[2, 10, 100]), tmp_path / "a")
    b = write_dataset(*synth_dataset(seed=5, distances=[2, 10, 100]), tmp_path / "b")
    c = write_dataset(*synth_dataset(seed=6, distances=[2, 10, 100]), tmp_path / "c")
    assert [p.name for p in a] == ["spectrum_000.csv", "spectrum_001.csv", "spectrum_002.csv", "range.csv"]
    assert all(x.read_bytes() == y.read_bytes() for x, y in zip(a, b))
    assert a[-1].read_bytes() != c[-1].read_bytes()


def test_synth_files_parse_back(tmp_path):
    paths = write_dataset(*synth_dataset(seed=0, distances=[3, 30]), tmp_path)
    s = parse_spectrum(paths[0])
    assert s.start_frequency == 31e3 and s.delta_f == 10.0
    assert len(parse_range(paths[-1])) == 2


def test_synth_rejects_negative_jitter():
    with pytest.raises(DomainError):
        synth_dataset(jitter_db=-1.0)
