import json
from pathlib import Path

import pytest

from dcnls import cli


def write_ini(path: Path, text: str) -> str:
    path.write_text(text)
    return str(path)


EVOLVE_INI = """\
[run]
command = evolve
output_dir = {out}
[regime]
code = FF
[grid]
kind = box
n = 16
[solver]
dt = 5e-3
t_end = 0.05
[data]
amplitude = 0.4
"""


def test_unknown_key_rejected(tmp_path):
    path = write_ini(
        tmp_path / "c.ini",
        "[run]\ncommand = evolve\n[regime]\ncode = FF\n"
        "[solver]\ndt = 1e-3\nt_end = 1\nfrobnicate = 3\n",
    )
    with pytest.raises(cli.ConfigError, match="frobnicate"):
        cli.load_config(path)


def test_unknown_section_rejected(tmp_path):
    path = write_ini(
        tmp_path / "c.ini", "[run]\ncommand = mc-curve\n[weird]\nx = 1\n"
    )
    with pytest.raises(cli.ConfigError, match="weird"):
        cli.load_config(path)


def test_missing_required_key_rejected(tmp_path):
    path = write_ini(
        tmp_path / "c.ini",
        "[run]\ncommand = evolve\n[regime]\ncode = FF\n[solver]\ndt = 1e-3\n",
    )
    with pytest.raises(cli.ConfigError, match="t_end"):
        cli.load_config(path)


def test_negative_dt_rejected(tmp_path):
    path = write_ini(
        tmp_path / "c.ini",
        "[run]\ncommand = evolve\n[regime]\ncode = FF\n"
        "[solver]\ndt = -1e-3\nt_end = 1\n",
    )
    with pytest.raises(cli.ConfigError, match="dt"):
        cli.load_config(path)
    assert cli.main(["validate", path]) == cli.EXIT_CONFIG


def test_unknown_command_rejected(tmp_path):
    path = write_ini(tmp_path / "c.ini", "[run]\ncommand = frobnicate\n")
    with pytest.raises(cli.ConfigError, match="frobnicate"):
        cli.load_config(path)


def test_config_hash_ignores_output_dir(tmp_path):
    p1 = write_ini(tmp_path / "a.ini", EVOLVE_INI.format(out=tmp_path / "o1"))
    p2 = write_ini(tmp_path / "b.ini", EVOLVE_INI.format(out=tmp_path / "o2"))
    h1 = cli.config_hash(cli.load_config(p1))
    h2 = cli.config_hash(cli.load_config(p2))
    assert h1 == h2
    # but a physical parameter changes it
    p3 = write_ini(
        tmp_path / "d.ini",
        EVOLVE_INI.format(out=tmp_path / "o1").replace("0.4", "0.5"),
    )
    assert cli.config_hash(cli.load_config(p3)) != h1


def test_env_output_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("DCNLS_OUTPUT_DIR", str(tmp_path / "redirected"))
    cfg = cli.load_config(
        write_ini(tmp_path / "c.ini", EVOLVE_INI.format(out=tmp_path / "orig"))
    )
    assert cfg["run"]["output_dir"] == str(tmp_path / "redirected")


def test_validate_resource_estimate(tmp_path, capsys):
    path = write_ini(
        tmp_path / "c.ini",
        "[run]\ncommand = evolve\n[regime]\ncode = FF\n[grid]\nn = 64\n"
        "[solver]\ndt = 1e-3\nt_end = 1\n",
    )
    assert cli.main(["validate", path]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "1000" in out  # step estimate for t_end/dt


def test_classify_ff_requires_curve(tmp_path, capsys):
    path = write_ini(
        tmp_path / "c.ini",
        "[run]\ncommand = classify\noutput_dir = {}\n[regime]\ncode = FF\n"
        "[grid]\nn = 16\n[solver]\ndt = 5e-3\nt_end = 0.05\n".format(tmp_path / "o"),
    )
    assert cli.main(["classify", path]) == cli.EXIT_CONFIG
    assert "mc-curve" in capsys.readouterr().err


def test_command_mismatch_rejected(tmp_path):
    path = write_ini(tmp_path / "c.ini", EVOLVE_INI.format(out=tmp_path / "o"))
    assert cli.main(["mc-curve", path]) == cli.EXIT_CONFIG


def test_evolve_outputs_and_manifest(tmp_path):
    out = tmp_path / "out"
    path = write_ini(tmp_path / "c.ini", EVOLVE_INI.format(out=out))
    assert cli.main(["evolve", path]) == cli.EXIT_OK
    manifest = json.loads((out / "run.json").read_text())
    assert manifest["command"] == "evolve"
    assert "series.csv" in manifest["outputs"]
    series = (out / "series.csv").read_text().splitlines()
    assert series[0] == f"# config_hash={manifest['config_hash']}"
    report = json.loads((out / "conservation.json").read_text())
    assert report["config_hash"] == manifest["config_hash"]


def test_missing_config_file(tmp_path):
    assert cli.main(["evolve", str(tmp_path / "nope.ini")]) == cli.EXIT_CONFIG
