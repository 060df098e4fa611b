"""Tests for the Lyapunov exponent estimates."""

import numpy as np
import pytest

from edudyn.analysis import lyapunov_1d, lyapunov_2d
from edudyn.config import load_config
from edudyn.model import ModelParams, State2D, iterate_2d


def test_chaotic_exponent_positive(chaotic_params: ModelParams) -> None:
    """Test that the chaotic regime stretches nearby orbits apart."""
    estimate = lyapunov_1d(0.3, 0.5, chaotic_params)
    assert estimate.exponent > 0
    assert estimate.steps == 10_000
    assert estimate.fallback_count == 0


def test_stable_exponent_negative(stable_params: ModelParams) -> None:
    """Test that an attracting fixed point gives a negative exponent."""
    assert lyapunov_1d(0.3, 0.5, stable_params, n=2000).exponent < 0


def test_two_dimensional_reduces_without_switching(chaotic_params: ModelParams) -> None:
    """Test that with mu = 0 the two-dimensional exponent equals the one-dimensional one."""
    one = lyapunov_1d(0.3, 0.5, chaotic_params, n=3000, burn_in=500)
    two = lyapunov_2d(State2D(0.3, 0.5), chaotic_params, 0.0, n=3000, burn_in=500)
    assert two.exponent == pytest.approx(one.exponent, rel=1e-9, abs=1e-12)


def test_invalid_step_counts(chaotic_params: ModelParams) -> None:
    """Test that empty averages are refused."""
    with pytest.raises(ValueError, match="Invalid"):
        lyapunov_1d(0.3, 0.5, chaotic_params, n=0)
    with pytest.raises(ValueError, match="Invalid"):
        lyapunov_2d(State2D(0.3, 0.5), chaotic_params, 0.5, n=10, burn_in=-1)


def test_two_dimensional_chaos_propagates() -> None:
    """Test that switching at the sigma-sweep preset stays chaotic and drives lambda across its range."""
    config = load_config("fig6-sigma")
    assert config.mix.mu == 5.8
    params = config.model.with_value("sigma", 16.5)
    seed = State2D(config.run.seed_E, config.run.seed_lambda)
    assert lyapunov_2d(seed, params, config.mix.mu, n=2000, burn_in=1000).exponent > 0

    shares = iterate_2d(seed, params, config.mix.mu, n_steps=2000, burn_in=1000).follower_share
    assert np.any((shares <= 0.1) | (shares >= 0.9))
    assert np.any((shares >= 0.4) & (shares <= 0.6))


def test_two_dimensional_orbit_bounded() -> None:
    """Test that switching orbits stay in the state space."""
    params = ModelParams(sigma=18.0)
    trajectory = iterate_2d(State2D(0.3, 0.5), params, 1.0, n_steps=500, burn_in=500)
    assert np.all((trajectory.enrolment >= 0) & (trajectory.enrolment <= params.e_bar))
    assert np.all((trajectory.follower_share >= 0) & (trajectory.follower_share <= 1))
