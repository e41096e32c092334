import csv
import io
import json
import math
import subprocess
import sys

import pytest

from abforce import ConfigError, RegimeError
from abforce.cli import main
from abforce.config import MODES, SCHEMA, config_from_dict, parse_config

BASE = """
[scenario]
mu = 1e-14
y0 = 1e-5
v0 = 1e7
"""

SWEEP = BASE + """
[run]
sweep.axis = "y0"
sweep.min = 1e-6
sweep.max = 1e-3
sweep.points = 7
"""


@pytest.fixture
def cfg_file(tmp_path):
    def write(text, name="s.toml"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_defaults():
    cfg = parse_config(BASE)
    assert cfg.mode == "perturbative"
    assert cfg.scenario.side.value == "left"
    assert cfg.scenario.z_span == 1e4
    assert cfg.rel_tol == 1e-10 and cfg.abs_tol == 1e-12
    assert cfg.sweep is None
    assert cfg.slits.n_samples == 4096


def test_sweep_defaults():
    cfg = parse_config(BASE + '[run]\nsweep.axis = "mu"\nsweep.min = 1e-16\nsweep.max = 1e-12\n',
                       mode="sweep")
    assert cfg.sweep.points == 31 and cfg.sweep.scale == "log"
    assert cfg.sweep.values()[0] == pytest.approx(1e-16)
    z = parse_config(BASE, mode="fields").sweep
    assert (z.axis, z.min, z.max, z.points, z.scale) == ("z", -5.0, 5.0, 101, "linear")


def test_relativistic_speed_is_regime_error():
    with pytest.raises(RegimeError):
        parse_config(BASE.replace("v0 = 1e7", "v0 = 1.5e8"))


@pytest.mark.parametrize("text,key", [
    (BASE + "mu_0 = 1.0\n", "mu_0"),
    (BASE + "[extra]\nx = 1\n", "extra"),
    (BASE.replace("mu = 1e-14\n", ""), "mu"),
    (BASE.replace("1e-14", '"big"'), "mu"),
    (BASE + '[run]\nmethod = "simpson"\n', "method"),
    (BASE + "[run]\nrel_tol = 1e-3\n", "rel_tol"),
    (BASE + '[run]\nsweep.axis = "q"\n', "sweep.axis"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_sweep_mode_requires_range():
    with pytest.raises(ConfigError):
        parse_config(BASE, mode="sweep")


def test_parse_error_position():
    text = "[scenario]\nmu = 1e-14\ny0 = = 3\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 3
    assert info.value.column is not None


def test_invalid_values_are_config_errors():
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("y0 = 1e-5", "y0 = -1e-5"))


def test_help_lists_every_key(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for (section, key) in SCHEMA:
        assert key in out
        assert f"[{section}]" in out
    for mode in MODES:
        assert mode in out


def test_json_echo_round_trips(cfg_file, capsys):
    path = cfg_file(SWEEP)
    code, out, _ = run_cli(capsys, "sweep", "--config", path, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    again = config_from_dict(doc["config"], mode="sweep")
    original = parse_config(SWEEP, mode="sweep")
    assert again.scenario == original.scenario
    assert again.sweep == original.sweep
    assert again.slits == original.slits
    assert doc["provenance"]["constants"]["planck"] == 6.62607015e-34


def test_csv_and_json_carry_identical_numbers(cfg_file, capsys):
    path = cfg_file(SWEEP)
    _, out_csv, _ = run_cli(capsys, "sweep", "--config", path)
    _, out_json, _ = run_cli(capsys, "sweep", "--config", path, "--format", "json")
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    jrows = json.loads(out_json)["rows"]
    assert len(rows) == len(jrows) == 7
    for r, j in zip(rows, jrows):
        for k, v in j.items():
            if isinstance(v, float):
                assert float(r[k]) == v  # bit-exact through %.17g
            else:
                assert r[k] == str(v)


def test_sweep_phase_times_distance_constant(cfg_file, capsys):
    _, out, _ = run_cli(capsys, "sweep", "--config", cfg_file(SWEEP), "--format", "json")
    rows = json.loads(out)["rows"]
    prods = [r["phi"] * r["y0"] for r in rows]
    assert (max(prods) - min(prods)) / abs(prods[0]) <= 1e-9
    assert all(abs(r["agreement"] - 1) <= 1e-9 for r in rows)


def test_parallel_sweep_matches_serial(cfg_file, capsys):
    path = cfg_file(SWEEP)
    _, serial, _ = run_cli(capsys, "sweep", "--config", path)
    _, parallel, _ = run_cli(capsys, "sweep", "--config", path, "--workers", "2")
    assert serial == parallel


@pytest.mark.parametrize("mode", MODES)
def test_every_mode_runs_and_is_byte_identical(mode, cfg_file, tmp_path, capsys):
    path = cfg_file(SWEEP if mode == "sweep" else BASE)
    outs = []
    for i in range(2):
        out = tmp_path / f"{mode}{i}.json"
        code, _, err = run_cli(capsys, mode, "--config", path, "--out", str(out), "--seed", "7")
        assert code == 0, err
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["provenance"]["seed"] == 7 and doc["rows"]


def test_force_check_rows(cfg_file, capsys):
    _, out, _ = run_cli(capsys, "force-check", "--config", cfg_file(BASE), "--format", "json",
                        "--points", "40")
    rows = json.loads(out)["rows"]
    assert len(rows) == 40
    assert max(r["frame_rel_diff"] for r in rows) <= 1e-12
    assert max(r["oracle_rel_diff"] for r in rows) <= 1e-6


def test_seed_changes_force_check_sampling(cfg_file, capsys):
    path = cfg_file(BASE)
    _, a, _ = run_cli(capsys, "force-check", "--config", path, "--seed", "1")
    _, b, _ = run_cli(capsys, "force-check", "--config", path, "--seed", "2")
    assert a != b


def test_fringe_shift_in_report(cfg_file, capsys):
    _, out, _ = run_cli(capsys, "fringe", "--config", cfg_file(BASE), "--format", "json")
    r = json.loads(out)["rows"][0]
    assert abs(r["fringe_shift"] - r["predicted_shift"]) <= 1e-3 * r["fringe_spacing"]


@pytest.mark.parametrize("text,mode,code", [
    (BASE + "mu_0 = 1\n", "perturbative", 2),
    ("[scenario\n", "perturbative", 2),
    (BASE.replace("v0 = 1e7", "v0 = 1.5e8"), "perturbative", 4),
    (BASE.replace("mu = 1e-14", "mu = 1e-9").replace("v0 = 1e7", "v0 = 1e5"), "perturbative", 4),
    (BASE + "[slits]\nL = 1e-5\n", "fringe", 2),
])
def test_exit_codes_and_error_record(text, mode, code, cfg_file, capsys):
    rc, out, err = run_cli(capsys, mode, "--config", cfg_file(text))
    assert rc == code
    assert out == ""
    rec = json.loads(err.strip())
    assert rec["exit_code"] == code and rec["message"]


def test_missing_config_file(capsys, tmp_path):
    rc, _, err = run_cli(capsys, "perturbative", "--config", str(tmp_path / "nope.toml"))
    assert rc == 2


def test_module_entry_point(cfg_file):
    p = subprocess.run([sys.executable, "-m", "abforce", "perturbative", "--config", cfg_file(BASE)],
                       capture_output=True, text=True)
    assert p.returncode == 0
    header, row = p.stdout.strip().split("\n")
    vals = dict(zip(header.split(","), row.split(",")))
    assert math.isclose(float(vals["phi"]), 0.6077069794822978, rel_tol=1e-12)
    p = subprocess.run([sys.executable, "-m", "abforce", "perturbative", "--config",
                        cfg_file(BASE + "mu_0 = 1\n", "bad.toml")], capture_output=True, text=True)
    assert p.returncode == 2
    assert json.loads(p.stderr)["key"] == "mu_0"
