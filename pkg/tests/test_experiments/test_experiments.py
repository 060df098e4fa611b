"""Tests for the experiments run on bundled presets with small settings."""

from pathlib import Path

import numpy as np
import pytest

from edudyn.config import EXPERIMENTS, load_config
from edudyn.csv_io import read_result
from edudyn.exceptions import ConfigError, UnimodalityNotCertified
from edudyn.experiments import BaseExperiment, run_experiment, stability_experiments
from edudyn.model import FixedPoint2D, State2D, absorbing_interval, comparative_statics_kappa

SMALL_SWEEP = [
    "sweep.grid_points=100",
    "sweep.lo=5",
    "sweep.hi=6",
    "run.burn_in=200",
    "run.samples=256",
    "run.lyapunov_steps=100",
]


def test_registry_matches_experiments() -> None:
    """Test that every experiment name resolves to a registered class."""
    assert BaseExperiment.names() == sorted(EXPERIMENTS)
    for name in EXPERIMENTS:
        assert BaseExperiment.get(name).EXPERIMENT_NAME == name
    with pytest.raises(ConfigError):
        BaseExperiment.get("plot")


def test_simulate_1d(tmp_path: Path) -> None:
    """Test the time series file of the one-dimensional map."""
    config = load_config("fig3", ["run.steps=50"], output_dir=tmp_path)
    [path] = run_experiment(config)
    assert path == tmp_path / "simulate.csv"

    result = read_result(path)
    assert result.schema == "simulate-1d"
    assert result.header["model.sigma"] == "16.5"
    assert result.header["run.burn_in"] == "2000"
    assert "edudyn_version" in result.header
    assert list(result.frame["t"]) == list(range(2001, 2051))
    assert result.frame["E"].between(0.0, config.model.e_bar).all()


def test_simulate_2d(tmp_path: Path) -> None:
    """Test that the two-dimensional time series records the follower share."""
    config = load_config("fig3", ["run.steps=300", "run.system=2d", "mix.mu=1"], output_dir=tmp_path)
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert list(frame.columns) == ["t", "E", "lambda"]
    assert len(frame) == 300
    assert frame["lambda"].between(0.0, 1.0).all()


def test_cobweb(tmp_path: Path) -> None:
    """Test the curve and staircase files of the cobweb experiment."""
    curve_path, staircase_path = run_experiment(load_config("fig4", output_dir=tmp_path))
    curve = read_result(curve_path).frame
    staircase = read_result(staircase_path).frame
    assert len(curve) == 1000
    assert len(staircase) == 201
    assert list(staircase["seq"]) == list(range(201))
    assert (staircase["x"][0], staircase["y"][0]) == (0.3, 0.3)


def test_fixed_points_1d(tmp_path: Path) -> None:
    """Test that the chaotic preset has an unstable interior fixed point."""
    [path] = run_experiment(load_config("fig3", experiment="fixed-points", output_dir=tmp_path))
    frame = read_result(path).frame
    assert len(frame) >= 1
    assert "unstable" in set(frame["class"])
    assert set(frame["regime"]) == {"interior"}


def test_fixed_points_2d(tmp_path: Path) -> None:
    """Test the two-dimensional fixed points of a stable parameter set."""
    config = load_config("prop3-kappa", ["run.system=2d", "mix.mu=0.1"], experiment="fixed-points", output_dir=tmp_path)
    [path] = run_experiment(config)
    result = read_result(path)
    assert result.schema == "fixed-points-2d"
    assert len(result.frame) >= 1
    assert result.frame["lambda_star"].between(0.0, 1.0).all()


def test_absorbing_interval(tmp_path: Path) -> None:
    """Test the trapping interval of the unimodal preset."""
    config = load_config("unimodal", output_dir=tmp_path)
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert len(frame) == 1
    row = frame.iloc[0]
    assert bool(row["unimodal_certified"])
    assert row["E_min"] <= row["E_max"]

    interval = absorbing_interval(0.5, config.model, grid_n=10_000, samples=10_000)
    assert row["E_max"] == pytest.approx(interval.E_max, rel=1e-15)


def test_absorbing_interval_refuses_uncertified_map(tmp_path: Path) -> None:
    """Test that the chaotic map is not certified unimodal."""
    config = load_config("fig3", experiment="absorbing-interval", output_dir=tmp_path)
    with pytest.raises(UnimodalityNotCertified):
        run_experiment(config)


def test_comparative_statics(tmp_path: Path) -> None:
    """Test that the statics file matches a direct evaluation at each stable fixed point."""
    config = load_config("prop3-kappa", output_dir=tmp_path)
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert len(frame) >= 1
    for row in frame.itertuples():
        statics = comparative_statics_kappa(row.E_star, config.mix.lam, config.model)
        assert row.dE_dkappa == statics.dE_dkappa
        assert row.log10_abs_dE_dkappa == statics.log10_abs_dE_dkappa
        assert np.isfinite(row.error_estimate)
        assert row.regime == "interior"


def test_stability(tmp_path: Path) -> None:
    """Test that the Schur verdict in the file agrees with the spectral radius."""
    config = load_config("prop3-kappa", ["run.system=2d", "mix.mu=0.1"], experiment="stability", output_dir=tmp_path)
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert len(frame) >= 1
    assert (frame["stable"] == (frame["spectral_radius"] < 1)).all()
    assert np.allclose(frame["trace"], frame["gamma_E"])
    assert np.allclose(frame["det"], -frame["gamma_lambda"] * frame["v_E"])
    assert set(frame["status"]) == {"ok"}


def test_stability_keeps_failed_fixed_points(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that a fixed point without a stability report still gets its row."""
    located = stability_experiments.fixed_points_2d

    def with_failure(*args: object) -> list[FixedPoint2D]:
        return [FixedPoint2D(State2D(0.4, 0.5), report=None, error="weights vanish"), *located(*args)]

    monkeypatch.setattr(stability_experiments, "fixed_points_2d", with_failure)
    config = load_config("prop3-kappa", ["run.system=2d", "mix.mu=0.1"], experiment="stability", output_dir=tmp_path)
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert len(frame) >= 2
    failed = frame.iloc[0]
    assert (failed["E_star"], failed["lambda_star"], failed["status"]) == (0.4, 0.5, "error")
    assert np.isnan(failed["spectral_radius"])
    assert np.isnan(failed["mu_threshold_conservative"])
    assert set(frame["status"].iloc[1:]) == {"ok"}


def test_mu_threshold(tmp_path: Path) -> None:
    """Test that a stable fixed point gets a positive switching threshold."""
    config = load_config(
        "prop3-kappa",
        ["run.system=2d", "mix.mu=0.1"],
        experiment="mu-threshold",
        output_dir=tmp_path,
    )
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert set(frame["status"]) == {"ok"}
    assert (frame["mu_bar_conservative"] <= frame["mu_bar_at_point"]).all()
    assert (frame["mu_bar_conservative"] >= 0).all()


def test_mu_threshold_conservative_positive(tmp_path: Path) -> None:
    """Test that weak positional reactivity gives a positive conservative threshold and its region."""
    config = load_config(
        "prop3-kappa",
        ["run.system=2d", "mix.mu=0.1", "model.sigma=1"],
        experiment="mu-threshold",
        output_dir=tmp_path,
    )
    [path] = run_experiment(config)
    frame = read_result(path).frame
    assert len(frame) >= 1
    assert set(frame["status"]) == {"ok"}
    assert (frame["mu_bar_conservative"] > 0).all()
    assert ((frame["region_lo"] > 0) & (frame["region_hi"] < config.model.e_bar)).all()


def test_bifurcate(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test the long-format bifurcation table of a small sigma sweep."""
    monkeypatch.setenv("EDUDYN_THREADS", "2")
    [path] = run_experiment(load_config("fig1b", SMALL_SWEEP, output_dir=tmp_path))
    result = read_result(path)
    assert result.schema == "bifurcate-1d"
    frame = result.frame
    assert len(frame) == 100 * 256
    assert frame["param_value"].nunique() == 100
    assert frame["sample_index"].max() == 255
    assert frame.groupby("param_value")["lyapunov"].nunique().eq(1).all()


def test_bifurcate_rejects_coarse_grid(tmp_path: Path) -> None:
    """Test that a sweep below the minimum grid is a configuration error."""
    config = load_config("fig1b", [*SMALL_SWEEP, "sweep.grid_points=10"], output_dir=tmp_path)
    with pytest.raises(ConfigError) as excinfo:
        run_experiment(config)
    assert excinfo.value.key == "sweep.grid_points"
