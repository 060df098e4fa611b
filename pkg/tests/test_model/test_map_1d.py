"""Tests for the one-dimensional enrolment map."""

import math

import numpy as np
import pytest

from edudyn.exceptions import DomainError, NotStable, UnimodalityNotCertified
from edudyn.model import (
    ModelParams,
    Regime,
    Stability,
    absorbing_interval,
    comparative_statics_kappa,
    critical_points,
    existence_condition,
    finite_difference,
    fixed_points_1d,
    gamma,
    gamma_iterate,
    gamma_prime,
    iterate_1d,
)
from edudyn.model.map_1d import classify, gamma_lambda


def test_gamma_stays_in_domain(chaotic_params: ModelParams) -> None:
    """Test that the map sends the domain into itself for every follower share."""
    for lam in (0.0, 0.3, 0.5, 1.0):
        for E in np.linspace(0.0, chaotic_params.e_bar, 201):
            assert 0.0 <= gamma(float(E), lam, chaotic_params) <= chaotic_params.e_bar


def test_gamma_at_zero(chaotic_params: ModelParams) -> None:
    """Test Gamma(0) against its closed form."""
    c_bar = 1 / 0.53
    alpha_P = 1 - math.exp(-16.5 * 100)
    s_P = alpha_P / (alpha_P + math.exp(-16.5 * c_bar))
    # No premium term for followers (rho_pi = 0), so s_F(0) = 0
    expected = (1 / 1.2) * (0.5 * 0.0 + 0.5 * s_P)
    assert gamma(0.0, 0.5, chaotic_params) == pytest.approx(expected, rel=1e-14)


def test_gamma_rejects_bad_inputs(chaotic_params: ModelParams) -> None:
    """Test that enrolment and follower share are checked."""
    with pytest.raises(DomainError):
        gamma(0.4, 1.2, chaotic_params)
    with pytest.raises(DomainError):
        gamma(2.0, 0.5, chaotic_params)


def test_gamma_lambda_is_share_gap(chaotic_params: ModelParams) -> None:
    """Test that Gamma is affine in lambda with slope Gamma_lambda."""
    E = 0.45
    assert gamma(E, 1.0, chaotic_params) - gamma(E, 0.0, chaotic_params) == pytest.approx(
        gamma_lambda(E, chaotic_params),
        rel=1e-12,
    )


def test_gamma_prime_matches_finite_differences() -> None:
    """Test the analytic map slope against central differences on random states."""
    rng = np.random.default_rng(21)
    for _ in range(300):
        params = ModelParams(rho=rng.uniform(0.1, 3.0), sigma=rng.uniform(0.5, 20.0), rho_pi=rng.uniform(0.0, 2.0))
        E, lam = float(rng.uniform(0.05, 0.8)), float(rng.uniform(0.0, 1.0))
        slope = gamma_prime(E, lam, params)
        estimate = finite_difference(lambda x, p=params, lam=lam: gamma(x, lam, p), E)
        assert slope.analytic
        assert abs(slope.value - estimate.value) <= 1e-6 * max(abs(estimate.value), 1.0) + 10 * estimate.error


def test_gamma_prime_fallback_at_kink(saturated_params: ModelParams) -> None:
    """Test the finite-difference fallback at the premium kink."""
    slope = gamma_prime(saturated_params.kink, 0.5, saturated_params)
    assert not slope.analytic
    assert math.isfinite(slope.value)


def test_gamma_iterate(chaotic_params: ModelParams) -> None:
    """Test that iterating twice equals composing the map with itself."""
    E = 0.3
    assert gamma_iterate(E, 0.5, chaotic_params, 0) == E
    assert gamma_iterate(E, 0.5, chaotic_params, 2) == gamma(gamma(E, 0.5, chaotic_params), 0.5, chaotic_params)
    with pytest.raises(ValueError, match="non-negative"):
        gamma_iterate(E, 0.5, chaotic_params, -1)


@pytest.mark.parametrize(
    ("slope", "expected"),
    [
        (0.5, Stability.STABLE),
        (-0.999, Stability.STABLE),
        (-1.5, Stability.UNSTABLE),
        (1.0 + 1e-9, Stability.NONHYPERBOLIC),
        (-1.0, Stability.NONHYPERBOLIC),
    ],
)
def test_classify(slope: float, expected: Stability) -> None:
    """Test the stability classes around |slope| = 1."""
    assert classify(slope) is expected


def test_iterate_1d_shapes(chaotic_params: ModelParams) -> None:
    """Test the trajectory layout and the window statistics."""
    trajectory = iterate_1d(0.3, 0.5, chaotic_params, n_steps=50, burn_in=20)
    assert trajectory.states.shape == (71,)
    assert trajectory.states[0] == 0.3
    assert trajectory.tail.shape == (50,)
    assert trajectory.window_min == trajectory.tail.min()
    assert trajectory.window_max == trajectory.tail.max()
    assert np.all((trajectory.states >= 0) & (trajectory.states <= chaotic_params.e_bar))
    with pytest.raises(ValueError, match="positive"):
        iterate_1d(0.3, 0.5, chaotic_params, n_steps=0)


def test_single_stable_fixed_point(stable_params: ModelParams) -> None:
    """Test that the pre-flip map has exactly one fixed point, attracting long orbits."""
    points = fixed_points_1d(0.5, stable_params)
    assert len(points) == 1
    point = points[0]
    assert point.classification is Stability.STABLE
    assert point.regime is Regime.INTERIOR
    assert point.analytic_derivative
    assert abs(gamma(point.E_star, 0.5, stable_params) - point.E_star) < 1e-10

    limit = iterate_1d(0.3, 0.5, stable_params, n_steps=1, burn_in=10_000).tail[-1]
    assert limit == pytest.approx(point.E_star, abs=1e-8)


def test_chaotic_fixed_point_unstable(chaotic_params: ModelParams) -> None:
    """Test that the chaotic regime has an unstable interior fixed point."""
    points = fixed_points_1d(0.5, chaotic_params)
    assert points
    assert any(point.classification is Stability.UNSTABLE for point in points)
    assert [point.E_star for point in points] == sorted(point.E_star for point in points)


def test_fixed_points_grid_minimum(chaotic_params: ModelParams) -> None:
    """Test that coarse root scans are refused."""
    with pytest.raises(ValueError, match="at least"):
        fixed_points_1d(0.5, chaotic_params, grid_n=100)


def test_existence_condition_cases(chaotic_params: ModelParams) -> None:
    """Test the case split of the sufficient existence condition."""
    below = existence_condition(0.3, chaotic_params)
    assert below.case == "ii"
    assert below.lambda_bound == pytest.approx(0.53 / 1.2)
    assert not below.assumptions_hold
    assert fixed_points_1d(0.3, chaotic_params)

    assert existence_condition(0.5, chaotic_params).case == "inconclusive"
    assert existence_condition(0.5, ModelParams(price_education=0.5)).case == "i"


def test_existence_cases_always_have_fixed_points() -> None:
    """Test that randomized parameters meeting case i or ii always yield a fixed point."""
    rng = np.random.default_rng(31)
    checked = 0
    while checked < 200:
        params = ModelParams(
            price_education=rng.uniform(0.2, 2.0),
            price_consumption=rng.uniform(0.2, 2.0),
            rho=rng.uniform(0.1, 3.0),
            rho_pi=rng.uniform(0.0, 2.0),
            sigma=rng.uniform(0.5, 20.0),
            kappa=rng.uniform(0.0, 0.9),
            pi_bar=rng.uniform(1.0, 100.0),
        )
        lam = float(rng.uniform(0.0, 1.0))
        if existence_condition(lam, params).case == "inconclusive":
            continue
        checked += 1
        assert fixed_points_1d(lam, params, grid_n=1000), (params, lam)


def test_critical_points_chaotic(chaotic_params: ModelParams) -> None:
    """Test that the chaotic map is humped but not certified unimodal."""
    scan = critical_points(0.5, chaotic_params)
    assert scan.maxima
    assert not scan.unimodal
    with pytest.raises(UnimodalityNotCertified):
        absorbing_interval(0.5, chaotic_params)


def test_critical_points_grid_minimum(chaotic_params: ModelParams) -> None:
    """Test that the critical-point scan refuses grids below 10^4 points."""
    with pytest.raises(ValueError, match="at least 10000"):
        critical_points(0.5, chaotic_params, grid_n=9_999)


def test_critical_points_monotone() -> None:
    """Test that a follower-only population gives a monotone map."""
    scan = critical_points(1.0, ModelParams(kappa=0.0, rho=0.5))
    assert scan.points == []
    assert scan.reason == "monotone"


def test_absorbing_interval(unimodal_params: ModelParams) -> None:
    """Test the trapping interval of a unimodal map on random initial conditions."""
    interval = absorbing_interval(0.5, unimodal_params)
    assert interval.unimodal_certified
    assert 0.0 < interval.E_c < interval.E_max <= unimodal_params.e_bar
    assert interval.E_min < interval.E_max
    assert interval.E_max == gamma(interval.E_c, 0.5, unimodal_params)

    rng = np.random.default_rng(41)
    for E0 in rng.uniform(0.0, unimodal_params.e_bar, 10_000):
        assert interval.contains(gamma_iterate(float(E0), 0.5, unimodal_params, 2))


@pytest.mark.parametrize("kappa", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("rho_pi", [0.0, 0.5])
def test_comparative_statics_negative(kappa_params: ModelParams, kappa: float, rho_pi: float) -> None:
    """Test that a stable fixed point falls with kappa and matches a two-point re-solve."""
    params = kappa_params.with_value("kappa", kappa).with_value("rho_pi", rho_pi)
    stable = [point for point in fixed_points_1d(0.5, params) if point.classification is Stability.STABLE]
    assert stable

    delta = 1e-4
    for point in stable:
        statics = comparative_statics_kappa(point.E_star, 0.5, params)
        assert statics.dE_dkappa < 0
        assert statics.regime is Regime.INTERIOR
        assert statics.gamma_kappa == pytest.approx(statics.gamma_kappa_via_premium, rel=1e-4)
        assert statics.log10_abs_dE_dkappa == pytest.approx(math.log10(-statics.dE_dkappa), abs=1e-6)

        def resolve(value: float, near: float = point.E_star) -> float:
            roots = [other.E_star for other in fixed_points_1d(0.5, params.with_value("kappa", value))]
            return min(roots, key=lambda root: abs(root - near))

        oracle = (resolve(kappa + delta) - resolve(kappa - delta)) / (2 * delta)
        assert statics.dE_dkappa == pytest.approx(oracle, rel=1e-3)


def test_comparative_statics_saturated() -> None:
    """Test that kappa has no effect once the premium is clamped."""
    # Followers only, with the premium exhausted above E = 1/30
    params = ModelParams(rho=3.0, pi_bar=0.01, sigma=3.0)
    stable = [point for point in fixed_points_1d(1.0, params) if point.classification is Stability.STABLE]
    saturated = [point for point in stable if point.regime is Regime.SATURATED]
    assert saturated
    for point in saturated:
        statics = comparative_statics_kappa(point.E_star, 1.0, params)
        assert statics.dE_dkappa == 0.0
        assert statics.gamma_kappa == 0.0
        assert statics.log10_abs_dE_dkappa == -math.inf


def test_comparative_statics_requires_stability(chaotic_params: ModelParams) -> None:
    """Test that an unstable fixed point is refused."""
    unstable = [point for point in fixed_points_1d(0.5, chaotic_params) if point.classification is Stability.UNSTABLE]
    with pytest.raises(NotStable):
        comparative_statics_kappa(unstable[0].E_star, 0.5, chaotic_params)


def test_comparative_statics_large_premium() -> None:
    """Test that a response too small for a double still reports its magnitude."""
    # exp(-sigma_pi * Pi) with Pi near 100 is far below the smallest double
    params = ModelParams(sigma=3.0, sigma_pi=16.5)
    stable = [point for point in fixed_points_1d(0.5, params) if point.classification is Stability.STABLE]
    assert stable
    for point in stable:
        statics = comparative_statics_kappa(point.E_star, 0.5, params)
        assert statics.dE_dkappa == 0.0
        assert statics.regime is Regime.INTERIOR
        assert -1000.0 < statics.log10_abs_dE_dkappa < -300.0
