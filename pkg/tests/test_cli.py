import subprocess
import sys

import numpy as np
import pytest

from melink import antenna, capacity, data_io, link_budget, medium
from melink.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return [line.split(",") for line in text.strip().splitlines()]


@pytest.fixture
def dataset(tmp_path):
    paths = data_io.write_dataset(*data_io.synth_dataset(seed=3), tmp_path)
    return tmp_path, paths


def test_medium_saltwater(capsys):
    code, out, _ = run(capsys, "medium", "--conductivity", "4.818", "--frequency", "36000")
    assert code == 0
    header, row = rows(out)
    lam = float(row[header.index("wavelength_m")])
    assert lam == pytest.approx(7.59, rel=1e-3)
    assert "7.59" in out


def test_medium_matches_module(capsys):
    code, out, _ = run(capsys, "medium", "--frequency", "31000", "--frequency", "41000")
    assert code == 0
    header, *body = rows(out)
    got = [float(r[header.index("wavelength_m")]) for r in body]
    want = medium.wavelength(medium.FRESHWATER, np.array([31e3, 41e3]))
    np.testing.assert_allclose(got, want, rtol=1e-5)


def test_link_reference(capsys):
    code, out, _ = run(capsys, "link", "--n-tx", "15", "--n-rx", "15", "--medium-ratio", "267")
    assert code == 0
    assert "901125" in out
    report = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(report["total_link_db"]) == pytest.approx(119.1, abs=0.1)
    assert out == data_io.dumps_report(data_io.link_report(link_budget.total_link_budget(267, 15, 15)))


def test_resonance_matches_module(capsys):
    code, out, _ = run(capsys, "resonance")
    assert code == 0
    assert out == data_io.dumps_report({"resonance_hz": antenna.resonance_frequency(antenna.REFERENCE_LAMINATE)})


def test_impedance_table(capsys):
    code, out, _ = run(capsys, "impedance", "--n-elements", "3", "--wiring", "series", "--points", "11")
    assert code == 0
    header, *body = rows(out)
    assert len(body) == 11
    assert header[0] == "frequency_hz"


def test_missing_spectrum(capsys):
    code, out, err = run(capsys, "ber", "--spectrum", "missing.csv")
    assert code == 2
    assert "missing.csv" in err
    assert out == ""


def test_domain_error_exit_1(capsys):
    code, _, err = run(capsys, "medium", "--conductivity", "-1")
    assert code == 1
    assert "conductivity" in err


def test_bad_config_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("medium.conductivity_s_per_m = 1\nmedium.salinity = 35\n")
    code, _, err = run(capsys, "medium", "--config", str(cfg))
    assert code == 2
    assert "bad.cfg:2" in err and "salinity" in err


def test_unknown_flag_exit_2(capsys):
    code, _, _ = run(capsys, "medium", "--wat")
    assert code == 2
    code, _, _ = run(capsys)
    assert code == 2


def test_override_wins_over_config(capsys, tmp_path):
    cfg = tmp_path / "salt.cfg"
    cfg.write_text("medium.conductivity_s_per_m = 4.818\n")
    _, from_file, _ = run(capsys, "medium", "--config", str(cfg))
    _, overridden, _ = run(capsys, "medium", "--config", str(cfg), "--conductivity", "0.0097")
    _, fresh, _ = run(capsys, "medium")
    assert from_file != fresh
    assert overridden == fresh


def test_capacity_matches_module(capsys, dataset):
    _, paths = dataset
    code, out, _ = run(capsys, "capacity", "--spectrum", str(paths[5]))
    assert code == 0
    f, c = capacity.capacity_cumulative(data_io.parse_spectrum(paths[5]))
    assert out == data_io.dumps_table(("frequency_hz", "cumulative_bits_per_s"), zip(f, c),
                                      freq_columns=("frequency_hz",))
    code, out, _ = run(capsys, "capacity", "--spectrum", str(paths[5]), "--f-lo", "34000", "--f-hi", "36000")
    assert code == 0 and "capacity_bits_per_s" in out


def test_fit_on_synth(capsys, dataset):
    _, paths = dataset
    code, out, _ = run(capsys, "fit", "--range", str(paths[-1]), "--breakpoint", "15")
    assert code == 0
    model = link_budget.fit_path_loss(data_io.parse_range(paths[-1]), [15.0])
    assert out == data_io.dumps_report(data_io.model_report(model))


def test_ber_from_spectra(capsys, dataset):
    _, paths = dataset
    args = ["ber", "--center-hz", "35500"]
    for p in paths[:3]:
        args += ["--spectrum", str(p)]
    code, out, _ = run(capsys, *args, "--tone-spacing", "100", "--tone-spacing", "1000")
    assert code == 0
    header, *body = rows(out)
    assert header[:2] == ["distance_m", "tone_spacing_hz"]
    assert len(body) == 6
    distances = [float(r[0]) for r in body]
    assert distances == sorted(distances)


def test_ber_monte_carlo_deterministic(capsys):
    argv = ["ber", "--center-hz", "35000", "--delta-f-hz", "5000", "--rb-bps", "5000",
            "--sample-rate", "100000", "--snr-db", "6", "--bits", "20000", "--seed", "9"]
    a = run(capsys, *argv)
    b = run(capsys, *argv, "--workers", "2")
    assert a[0] == 0 and a[1] == b[1]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "m.csv"
    code, out, _ = run(capsys, "medium", "--out", str(target))
    assert code == 0 and out == ""
    _, stdout_version, _ = run(capsys, "medium")
    assert target.read_text() == stdout_version


def test_synth_out_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "synth", "--out-dir", str(tmp_path / "d"), "--seed", "1")
    assert code == 0
    assert (tmp_path / "d" / "range.csv").exists()
    assert len(out.strip().splitlines()) == 41


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "melink", "link", "--medium-ratio", "267"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "901125" in res.stdout
    assert "\x1b" not in res.stdout
