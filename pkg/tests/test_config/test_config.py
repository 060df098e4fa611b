"""Tests for loading and validating run configurations."""

import json
from pathlib import Path

import pytest

import edudyn.config as config_module
from edudyn.analysis import bifurcation
from edudyn.config import EXPERIMENTS, load_config, preset_names
from edudyn.exceptions import ConfigError


def _write(tmp_path: Path, text: str, name: str = "run.cfg") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_preset_values() -> None:
    """Test that the sigma sweep preset loads the bifurcation settings."""
    config = load_config("fig1b")
    assert config.experiment == "bifurcate"
    assert config.preset == "fig1b"
    assert config.model.rho == 0.98
    assert config.model.sigma_pi is None
    assert config.mix.lam == 0.5
    assert config.sweep.parameter == "sigma"
    assert (config.sweep.lo, config.sweep.hi, config.sweep.grid_points) == (0.0, 20.0, 1000)


@pytest.mark.parametrize("name", preset_names())
def test_every_preset_loads(name: str) -> None:
    """Test that every bundled preset is a valid configuration."""
    config = load_config(name)
    assert config.experiment in EXPERIMENTS


def test_missing_file() -> None:
    """Test that an unknown location is a configuration error."""
    with pytest.raises(ConfigError, match="No configuration file or preset"):
        load_config("does/not/exist.cfg")


def test_bound_violation_names_key_and_line(tmp_path: Path) -> None:
    """Test that an out-of-bound parameter reports its file, line and key."""
    path = _write(tmp_path, "# comment\nexperiment = simulate\nmodel.price_education = -1\n")
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert excinfo.value.key == "model.price_education"
    assert excinfo.value.line == 3
    assert excinfo.value.source == str(path)
    assert "price_education" in str(excinfo.value)


def test_defaults_are_echoed(tmp_path: Path) -> None:
    """Test that omitted keys take their defaults and appear in the header items."""
    config = load_config(_write(tmp_path, "experiment = simulate\n"))
    assert config.run.burn_in == 2000
    items = config.header_items()
    assert items["run.burn_in"] == "2000"
    assert items["model.sigma_pi"] == "tied"
    assert items["sweep.continuation"] == "false"
    assert items["preset"] == "none"


@pytest.mark.parametrize(
    ("text", "key"),
    [
        ("experiment = simulate\nmodel.foo = 1\n", "model.foo"),
        ("experiment = simulate\nrun.steps = ten\n", "run.steps"),
        ("experiment = simulate\nrun.steps = 5\nrun.steps = 6\n", "run.steps"),
        ("experiment = dance\n", "experiment"),
        ("model.sigma = 3\n", "experiment"),
        ("experiment = bifurcate\nsweep.parameter = income\n", "sweep.parameter"),
        ("experiment = simulate\nmix.lambda = 1.5\n", "mix.lambda"),
        ("experiment = absorbing-interval\nrun.critical_grid_n = 500\n", "run.critical_grid_n"),
    ],
)
def test_invalid_entries(tmp_path: Path, text: str, key: str) -> None:
    """Test that unknown, malformed, duplicate and out-of-bound entries are refused."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, text))
    assert excinfo.value.key == key


def test_malformed_line(tmp_path: Path) -> None:
    """Test that a line without '=' reports its line number."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, "experiment = simulate\nsigma 3\n"))
    assert excinfo.value.line == 2


def test_json_form_is_equivalent(tmp_path: Path) -> None:
    """Test that a JSON document with nested sections matches the line form."""
    lines = _write(tmp_path, "experiment = simulate\nmodel.sigma = 4.0\nmodel.sigma_pi = tied\nrun.steps = 50\n")
    document = {"experiment": "simulate", "model": {"sigma": 4.0, "sigma_pi": None}, "run": {"steps": 50}}
    as_json = _write(tmp_path, json.dumps(document, indent=2), "run.json")
    assert load_config(lines) == load_config(as_json)


def test_invalid_json(tmp_path: Path) -> None:
    """Test that broken JSON is a configuration error with a line number."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, '{\n  "experiment": \n}', "run.json"))
    assert excinfo.value.line is not None


def test_overrides_apply_last(tmp_path: Path) -> None:
    """Test that command line overrides win over the preset and the file."""
    path = _write(tmp_path, "preset = fig3\nrun.steps = 10\n")
    config = load_config(path, ["run.steps=20", "model.sigma=4"], experiment="cobweb", output_dir=tmp_path / "out")
    assert config.preset == "fig3"
    assert config.experiment == "cobweb"
    assert config.run.steps == 20
    assert config.run.burn_in == 2000
    assert config.model.sigma == 4.0
    assert config.model.sigma_premium == 4.0
    assert config.output_dir == tmp_path / "out"
    assert config.header_items()["model.sigma_pi"] == "tied"


def test_override_errors() -> None:
    """Test that malformed overrides and preset overrides are refused."""
    with pytest.raises(ConfigError, match="key=value"):
        load_config("fig3", ["run.steps"])
    with pytest.raises(ConfigError, match="--config"):
        load_config("fig3", ["preset=fig4"])
    with pytest.raises(ConfigError) as excinfo:
        load_config("fig3", ["model.rho=-1"])
    assert excinfo.value.key == "model.rho"
    assert excinfo.value.source == "--set"


def test_boolean_values() -> None:
    """Test the accepted spellings of boolean keys."""
    assert load_config("fig1b", ["sweep.continuation=yes"]).sweep.continuation
    assert not load_config("fig1b", ["sweep.continuation=off"]).sweep.continuation
    with pytest.raises(ConfigError):
        load_config("fig1b", ["sweep.continuation=maybe"])


def test_sweepable_parameters_shared_with_sweeps() -> None:
    """Test that configurations and sweeps accept the same swept parameters."""
    assert config_module.SWEEPABLE is bifurcation.SWEEPABLE
    for name in bifurcation.SWEEPABLE:
        assert load_config("fig1b", [f"sweep.parameter={name}"]).sweep.parameter == name
