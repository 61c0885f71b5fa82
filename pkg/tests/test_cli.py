import io
import json

import numpy as np
import pytest

from spinstar.cli import execute, main, parse_config, read_config_from_csv
from spinstar.errors import UsageError
from spinstar.symmetry import INFINITE


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = execute(parse_config(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _table(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    return rows[0].split(","), np.array([[float(x) for x in r.split(",")] for r in rows[1:]])


def test_defaults_and_infinite_beta():
    config = parse_config(["dynamics", "--n", "201", "--g", "0.1", "--beta", "inf", "--init", "up"])
    assert config.params.beta is INFINITE
    assert config.params.n_spins == 201 and config.params.omega == 1.0
    assert config.grid.dt == 0.05 and config.grid.t_max == 200.0


def test_usage_errors_exit_1(capsys):
    assert main(["dynamics", "--beta", "-1"]) == 1
    assert "--beta" in capsys.readouterr().err
    assert main(["dynamics", "--n", "abc"]) == 1
    assert main(["dynamics", "--init", "custom", "--a", "0.6", "--b", "0.7"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["dynamics", "--unknown-flag", "1"]) == 1


def test_resource_and_io_exit_codes(tmp_path, capsys):
    assert main(["validate", "--n", "6", "--oracle-cap", "4"]) == 2
    bad = tmp_path / "missing" / "out.csv"
    assert main(["dynamics", "--n", "3", "--t-max", "1", "-o", str(bad)]) == 4


def test_config_file_overridden_by_flags(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 7, "g": 0.3, "beta": "inf"}))
    config = parse_config(["dynamics", "--config", str(path), "--g", "0.2"])
    assert config.params.n_spins == 7 and config.params.g == 0.2 and config.params.beta is INFINITE
    path.write_text(json.dumps({"nope": 1}))
    with pytest.raises(UsageError):
        parse_config(["dynamics", "--config", str(path)])


def test_dynamics_csv_round_trip():
    argv = ["dynamics", "--n", "5", "--beta", "0.5", "--init", "custom", "--a", "0.6", "--b", "0.8j", "--t-max", "2"]
    code, text, _ = _run(argv)
    assert code == 0
    assert text.startswith("# spinstar 0.1.0")
    header, data = _table(text)
    assert header == ["t", "P", "sx", "sy", "sz"]
    assert data.shape == (41, 5)
    assert np.isclose(data[0, 1], 0.36) and np.isclose(data[0, 3], 0.96)
    again = read_config_from_csv(text)
    assert again == parse_config(argv)


@pytest.mark.parametrize(
    "mode,header",
    [
        ("decoherence", ["t", "reL", "imL", "absL"]),
        ("mutual-info", ["t", "I_bits", "S_s", "S_b", "S_sb"]),
        ("correlation", ["dt", "re", "im", "abs"]),
        ("spectrum", ["omega", "amplitude"]),
    ],
)
def test_mode_columns(mode, header):
    code, text, err = _run([mode, "--n", "4", "--t-max", "5", "--beta", "0.5"])
    assert code == 0
    assert _table(text)[0] == header
    if mode == "correlation":
        assert "DISAGREES" in err


def test_fluctuation_sweep():
    code, text, _ = _run(["fluctuation", "--sweep-n", "3,5", "--sweep-beta", "0,inf", "--t-max", "20", "--t-min-fluct", "5"])
    header, data = _table(text)
    assert header == ["n", "beta", "deltaP"]
    assert data[:, 0].tolist() == [3, 3, 5, 5]
    assert np.isinf(data[1, 1])


def test_validate_mode():
    code, text, err = _run(["validate", "--n", "6"])
    assert code == 0 and "PASS" in err


def test_output_independent_of_workers(tmp_path):
    files = []
    for workers in ("1", "3"):
        path = tmp_path / f"w{workers}.csv"
        assert main(["mutual-info", "--n", "9", "--t-max", "3", "--workers", workers, "-o", str(path)]) == 0
        files.append(path.read_bytes())
    assert files[0] == files[1]
