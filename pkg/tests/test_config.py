import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotvort.config import SECTIONS, ConfigError, load_config, parse_config


def test_empty_config_gives_defaults():
    cfg = parse_config({})
    assert cfg.params.gamma == 9 / 7
    assert cfg.params.l == 7.3e-5
    assert cfg.params.c0 == 0.1
    assert cfg.seed == 0
    assert cfg["grid"]["nx"] == 100


def test_reference_constants_accepted_verbatim():
    cfg = parse_config({"params": {"gamma": 1.2857142857142858, "l": 7.3e-5, "c0": 0.1}, "init": {"sigma": 1e-9, "R0": 10}})
    assert cfg.params.l == 7.3e-5
    assert cfg["init"]["R0"] == 10.0


def test_gamma_out_of_range_names_field():
    with pytest.raises(ConfigError) as exc:
        parse_config({"params": {"gamma": 2.5}})
    assert exc.value.field_path == "params.gamma"


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"grid": {"nz": 3}}, "grid.nz"),
        ({"gird": {}}, "gird"),
        ({"grid": {"nx": 1.5}}, "grid.nx"),
        ({"grid": {"dx": "wide"}}, "grid.dx"),
        ({"grid": {"nx": -4}}, "grid.nx"),
        ({"init": {"family": "gaussian"}}, "init.family"),
        ({"output": {"snapshot_times": [0, -1]}}, "output.snapshot_times[1]"),
        ({"oracle_check": {"checks": ["qsol", "nope"]}}, "oracle_check.checks[1]"),
        ({"resonances": {"max_order": 7}}, "resonances.max_order"),
        ({"integrate": {"rhs": "axisym", "state0": [1, 2]}}, "integrate.state0"),
        ({"params": []}, "params"),
        ({"threads": 0}, "threads"),
        ({"acceptance": {"criteria": [10]}}, "acceptance.criteria[0]"),
    ],
)
def test_errors_carry_field_paths(doc, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.field_path == path


def test_malformed_json():
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_config("{not json")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_overrides_apply_and_none_is_ignored():
    cfg = parse_config({"params": {"gamma": 1.5}}, {"params.gamma": 1.1, "params.l": None, "seed": 7})
    assert cfg.params.gamma == 1.1
    assert cfg.params.l == 7.3e-5
    assert cfg.seed == 7


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("ROTVORT_THREADS", "3")
    assert parse_config({}).threads == 3
    assert parse_config({"threads": 2}).threads == 2
    monkeypatch.setenv("ROTVORT_THREADS", "many")
    with pytest.raises(ConfigError, match="ROTVORT_THREADS"):
        parse_config({})


def test_defaults_not_shared_between_configs():
    a = parse_config({})
    a["output"]["snapshot_times"].append(5.0)
    assert parse_config({})["output"]["snapshot_times"] == []


def test_load_from_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"linstab_scan": {"step": 0.1}}))
    assert load_config(str(path))["linstab_scan"]["step"] == 0.1
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))


def test_pde_config_built():
    pc = parse_config({"grid": {"nx": 50, "ny": 60, "dx": 1000.0}, "out": "/tmp/x", "output": {"csv_path": "d.csv"}}).pde_config()
    assert (pc.grid.nx, pc.grid.ny) == (50, 60)
    assert pc.output.csv_path == "/tmp/x/d.csv"


@given(st.sampled_from(sorted(SECTIONS)), st.text(min_size=1, max_size=8))
def test_unknown_keys_always_rejected(section, key):
    if key in SECTIONS[section]:
        return
    with pytest.raises(ConfigError) as exc:
        parse_config({section: {key: 1}})
    assert exc.value.field_path == f"{section}.{key}"
