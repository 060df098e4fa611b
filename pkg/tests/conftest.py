"""Shared parameter sets for the enrolment-map tests."""

import pytest

from edudyn.model import ModelParams


@pytest.fixture
def chaotic_params() -> ModelParams:
    """Reference calibration, sigma = sigma_pi = 16.5, chaotic at lambda = 0.5."""
    return ModelParams()


@pytest.fixture
def stable_params() -> ModelParams:
    """Reference calibration before the first flip (sigma = 3), one stable fixed point."""
    return ModelParams(sigma=3.0)


@pytest.fixture
def unimodal_params() -> ModelParams:
    """Parameters whose map has exactly one interior maximum."""
    return ModelParams(rho=0.05, rho_pi=1.0, sigma=5.0)


@pytest.fixture
def kappa_params() -> ModelParams:
    """Low reactivities and a small premium, stable for kappa between 0.1 and 0.9."""
    return ModelParams(rho=0.98, rho_pi=0.0, sigma=3.0, sigma_pi=1.0, pi_bar=1.0)


@pytest.fixture
def saturated_params() -> ModelParams:
    """Premium clamp binding for E above 1/3."""
    return ModelParams(pi_bar=0.1, kappa=0.3, sigma=3.0)
