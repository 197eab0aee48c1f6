import io
import math
import subprocess
import sys

import numpy as np
import pytest

from optomech import cli
from optomech.cli import GridSpec, main
from optomech.errors import ConfigError
from optomech.selftest import CHECKS


def run(args):
    out = io.StringIO()
    code = main(args, out)
    return code, out.getvalue()


def test_poles_exact_branch():
    code, text = run(["poles", "--preset", "P0", "--delta", "omega_m", "--gamma-c", "5e7"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# params: ")
    exact = next(l for l in lines if l.startswith("exact,"))
    numeric = next(l for l in lines if l.startswith("numeric,"))
    assert exact.split(",")[2] in ("distinct-damping", "equal-damping")
    a = np.array(exact.split(",")[3:], dtype=float)
    b = np.array(numeric.split(",")[3:], dtype=float)
    assert np.allclose(a, b, rtol=1e-9)


def test_stability_unstable_exit(capsys):
    code, text = run(["stability", "--delta=-62831853"])
    assert code == 2
    assert "0,blue-detuned" in text
    assert "margin=" in capsys.readouterr().err


def test_config_errors():
    assert run(["stability", "--gamma-c=-5"])[0] == 1
    assert run(["stability", "--preset", "P9"])[0] == 1
    assert run(["cooling-map"])[0] == 1
    assert run(["heterodyne", "--sweep", "power=1:2:3", "--delta", "omega_m"])[0] == 1
    assert run(["homodyne", "--delta", "omega_m", "--spectrum", "pink"])[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"], io.StringIO())
    assert exc.value.code == 1


def test_numeric_failure_exit(monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("forms differ")

    monkeypatch.setattr(cli, "homodyne_spectrum", broken)
    assert run(["homodyne", "--delta", "omega_m", "--grid", "0:1e8:3"])[0] == 3


def test_selftest():
    code, text = run(["selftest"])
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == len(CHECKS)
    assert all(l.startswith("PASS ") for l in lines)


def test_selftest_failure_exit(monkeypatch):
    from optomech.selftest import CheckResult

    monkeypatch.setattr(cli, "run_selftest", lambda params: [CheckResult("x", False, "bad")])
    code, text = run(["selftest"])
    assert code == 3 and text.startswith("FAIL x")


def test_cooling_map_csv(tmp_path):
    target = tmp_path / "map.csv"
    code, _ = run(["cooling-map", "--delta-grid", "1e6:3e9:4", "--gamma-c-grid", "3e8:3e9:3:log",
                   "-o", str(target)])
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0].startswith("# params: ")
    assert lines[1].startswith("delta_rad_s,gamma_c_rad_s,cooling_factor")
    assert len(lines) == 2 + 12


def test_heterodyne_sweep_counts_peaks(tmp_path, capsys):
    target = tmp_path / "het.csv"
    code, _ = run(["heterodyne", "--delta", "omega_m", "--sweep", "gamma_c=4e6:2e8:3:log",
                   "--grid=-1e7:1.3e8:400", "-o", str(target)])
    assert code == 0
    peaks = [int(l.split("peaks=")[1]) for l in capsys.readouterr().err.splitlines() if "peaks=" in l]
    assert peaks[0] == 2 and peaks[-1] == 1
    files = sorted(tmp_path.glob("het_*.csv"))
    assert [f.name for f in files] == ["het_000.csv", "het_001.csv", "het_002.csv"]
    head = files[0].read_text().splitlines()
    assert head[0].startswith("# elastic: elastic_weight=")
    assert "gamma_c=4000000.0" in head[1]


def test_output_is_deterministic():
    args = ["homodyne", "--delta", "omega_m", "--theta", "0.3", "--spectrum", "ohmic", "--grid", "0:1e8:25"]
    assert run(args)[1] == run(args)[1]


def test_hz_suffix():
    a = run(["stability", "--delta", "omega_m", "--gamma-c", "1e7hz"])[1]
    b = run(["stability", "--delta", "omega_m", "--gamma-c", repr(2 * math.pi * 1e7)])[1]
    assert a == b


def test_grid_spec():
    g = GridSpec.parse("1hz:2hz:3")
    assert np.allclose(g.values(), 2 * math.pi * np.array([1.0, 1.5, 2.0]))
    assert GridSpec.parse("1:100:3:log").values()[1] == pytest.approx(10.0)
    for bad in ("1:2", "2:1:5", "1:2:1", "1:2:x", "0:1:3:log", "1:2:3:cubic"):
        with pytest.raises(ConfigError):
            GridSpec.parse(bad)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "optomech.cli", "stability", "--delta", "omega_m"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# params: ")
