import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seamlab.config import SCHEMA, load_config, parse_value
from seamlab.errors import ConfigError


def test_minimal_config_takes_defaults():
    cfg = load_config(text="command = zeros\n[zeros]\nz_max = 22\n")
    assert cfg.command == "zeros"
    assert cfg["zeros.z_max"] == 22.0 and isinstance(cfg["zeros.z_max"], float)
    assert cfg["quadrature.target_tol"] == 1e-13
    assert list(cfg.echo()) == sorted(cfg.values)
    assert set(cfg.values) == set(SCHEMA)


def test_empty_grid_names_field_and_line():
    with pytest.raises(ConfigError) as ei:
        load_config(text="command = scan-rectangle\n[scan]\nT = []\n")
    assert ei.value.field == "scan.T" and ei.value.line == 3
    assert "empty grid" in str(ei.value)


@pytest.mark.parametrize(
    "text,field",
    [
        ("command = zeros\n[zeros]\nbogus = 1\n", "zeros.bogus"),
        ("[zeros]\nz_max = 3\n", "command"),
        ("command = nope\n", "command"),
        ("command = zeros\n[quadrature]\ntarget_tol = -1\n", "quadrature.target_tol"),
        ("command = zeros\n[quadrature]\ntarget_tol = 0\n", "quadrature.target_tol"),
        ("command = zeros\n[scan]\nschedule = [[4, 32], [2, 16]]\n", "scan.schedule"),
        ("command = zeros\n[scan]\nT = [4, 2]\n", "scan.T"),
        ("command = zeros\n[scan]\ntheta = 2.0\n", "scan.theta"),
        ("command = zeros\nthreads = 0\n", "threads"),
        ("command = zeros\n[ulclt]\nwindow = [2, 1]\n", "ulclt.window"),
    ],
)
def test_invalid_configs(text, field):
    with pytest.raises(ConfigError) as ei:
        load_config(text=text)
    assert ei.value.field == field


def test_duplicate_and_malformed():
    with pytest.raises(ConfigError):
        load_config(text="command = zeros\ncommand = ulclt\n")
    with pytest.raises(ConfigError):
        load_config(text="command = zeros\n[zeros\n")


def test_overrides_and_command_agreement(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("command = ulclt\n[ulclt]\nt = 1.0\n")
    cfg = load_config(p, overrides=["ulclt.t=0.5", "scan.N=[8, 16]"], command="ulclt")
    assert cfg["ulclt.t"] == 0.5 and cfg["scan.N"] == [8, 16]
    assert cfg.source == str(p)
    with pytest.raises(ConfigError):
        load_config(p, command="zeros")
    with pytest.raises(ConfigError):
        load_config(p, overrides=["ulclt.t"])
    with pytest.raises(ConfigError):
        load_config(p, overrides=["ulclt.nokey=1"])
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
    assert load_config(text="", command="zeros").command == "zeros"


def test_parse_value():
    assert parse_value(" 3 ") == 3 and parse_value("1e-13") == 1e-13
    assert parse_value("[1, 2.5]") == [1, 2.5]
    assert parse_value("True") is True and parse_value("off") is False
    assert parse_value("bridge") == "bridge"


@given(st.floats(1e-300, 1e300))
def test_positive_tolerances_round_trip(tol):
    cfg = load_config(text=f"command = zeros\n[zeros]\ntol = {tol!r}\n")
    assert cfg["zeros.tol"] == tol


def test_defaults_validate():
    for key, (default, check, _) in SCHEMA.items():
        if key != "command":
            assert check(default), key
    assert SCHEMA["scan.theta"][0] == math.pi / 4
