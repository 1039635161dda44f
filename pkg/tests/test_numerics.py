import numpy as np
import pytest
from scipy.special import ellipk, ellipkinc

from sojourn.catalog.confined import Pendulum
from sojourn.catalog.flat import Kinetic
from sojourn.errors import DomainError, FlowError, NumericError
from sojourn.numerics.elliptic import complete_K, elliptic_F
from sojourn.numerics.extrapolate import errors_decreasing, extrapolate_power_tail, fitted_rate
from sojourn.numerics.integrators import ExactOrbit, splitting_orbit
from sojourn.numerics.quadrature import geometric_breakpoints, improper_integral, integrate


def test_integrate_scalar():
    res = integrate(np.sin, [0.0, np.pi])
    assert abs(res.value - 2.0) < 1e-10


def test_integrate_vector_valued():
    res = integrate(lambda t: np.stack([t, t * t], axis=-1), [0.0, 1.0])
    assert np.allclose(res.value, [0.5, 1.0 / 3.0], atol=1e-12)


def test_integrate_kink_on_breakpoint():
    res = integrate(lambda t: np.abs(t - 0.3), [0.0, 0.3, 1.0])
    assert abs(res.value - 0.29) < 1e-12


def test_integrate_interval_budget():
    with pytest.raises(NumericError):
        integrate(lambda t: (t > 0.3337).astype(float), [0.0, 1.0], tol=1e-14, max_intervals=20)


def test_integrate_raises_instead_of_returning_a_loose_value():
    with pytest.raises(NumericError) as info:
        integrate(lambda t: 1.0 / np.sqrt(np.abs(t - 1.0 / 3.0)), [0.0, 1.0], tol=1e-13, max_intervals=200)
    assert info.value.diagnostics["error"] > info.value.diagnostics["target"]


def test_integrate_rejects_non_finite_integrand():
    with pytest.raises(NumericError):
        integrate(lambda t: np.full_like(t, np.nan), [0.0, 1.0], max_intervals=50)


def test_integrate_reports_error_within_target():
    res = integrate(np.exp, [0.0, 0.5, 1.0], tol=1e-12)
    assert res.error <= 1e-12
    assert res.intervals >= 2
    assert abs(res.value - (np.e - 1.0)) < 1e-12


def test_geometric_breakpoints_double_past_last_kink():
    bps = geometric_breakpoints([1.0], 10.0)
    assert bps.tolist() == [0.0, 1.0, 2.0, 4.0, 8.0, 10.0]


def test_geometric_breakpoints_without_kinks():
    bps = geometric_breakpoints([], 10.0)
    assert bps[0] == 0.0 and bps[-1] == 10.0
    assert np.all(np.diff(bps) > 0)


def test_improper_integral_exponential():
    res = improper_integral(lambda t: np.exp(-t), 0.0, lambda m: np.exp(-m), tol=1e-10)
    assert abs(res.value - 1.0) < 1e-9


def test_aitken_recovers_power_tail():
    radii = [10.0, 20.0, 40.0, 80.0]
    values = [1.5 + 3.0 / r ** 2 for r in radii]
    ex = extrapolate_power_tail(radii, values)
    assert ex.method == "aitken"
    assert abs(ex.limit - 1.5) < 1e-12
    assert abs(ex.rate - 2.0) < 1e-9


def test_aitken_falls_back_on_flat_sequence():
    ex = extrapolate_power_tail([10.0, 20.0, 40.0, 80.0], [0.25] * 4)
    assert ex.method == "last"
    assert ex.limit == 0.25
    assert np.isnan(ex.rate)


def test_fitted_rate():
    radii = [10.0, 20.0, 40.0]
    assert abs(fitted_rate(radii, [r ** -2 for r in radii]) - 2.0) < 1e-9
    assert np.isnan(fitted_rate(radii, [1.0, 0.0, 1.0]))


def test_errors_decreasing():
    assert errors_decreasing([1.0, 0.5, 0.25], 0.0)
    assert not errors_decreasing([1.0, 0.5, 0.7], 0.0)
    # noise under the floor does not count as growth
    assert errors_decreasing([1e-14, 2e-14, 1e-14], 1e-12)


@pytest.mark.parametrize("phi", [-1.2, 0.0, 0.3, 1.5])
def test_elliptic_F_matches_scipy(phi):
    k = 0.7
    assert abs(elliptic_F(phi, k) - ellipkinc(phi, k * k)) < 1e-13


def test_elliptic_F_quasi_periodic():
    k = 0.4
    for phi in (0.2, 1.0, 2.5):
        assert abs(elliptic_F(phi + np.pi, k) - elliptic_F(phi, k) - 2.0 * complete_K(k)) < 1e-12


def test_elliptic_F_is_increasing():
    phi = np.linspace(-7.0, 7.0, 401)
    assert np.all(np.diff(elliptic_F(phi, 0.9)) > 0)


def test_complete_K():
    assert abs(complete_K(0.5) - ellipk(0.25)) < 1e-13


def test_elliptic_modulus_domain():
    with pytest.raises(DomainError):
        elliptic_F(0.3, 1.0)
    with pytest.raises(DomainError):
        complete_K(1.5)


def test_exact_orbit_is_unbounded():
    sys = Kinetic(1)
    orbit = sys.orbit(np.array([2.0, 0.5]), 10.0)
    assert isinstance(orbit, ExactOrbit)
    states = orbit(np.array([-100.0, 100.0]))
    assert np.allclose(states[:, 0], [-48.0, 52.0])


def test_splitting_orbit_conserves_energy():
    sys = Pendulum(1.0)
    z = np.array([0.3, 2.0])
    orbit = sys.orbit(z, 5.0)
    assert orbit.method == "splitting"
    states = orbit(np.linspace(-5.0, 5.0, 51))
    assert np.max(np.abs(sys.hamiltonian(states) - sys.hamiltonian(z))) < 1e-9


def test_dense_orbit_rejects_times_outside_window():
    sys = Pendulum(1.0)
    orbit = sys.orbit(np.array([0.3, 2.0]), 5.0)
    with pytest.raises(FlowError):
        orbit(np.array([6.0]))


def test_unreachable_drift_budget_raises_flow_error():
    sys = Pendulum(1.0)
    with pytest.raises(FlowError) as info:
        splitting_orbit(sys, np.array([0.3, 2.0]), 5.0, drift_budget=1e-30, attempts=2)
    assert info.value.reached_time >= 0.0
    assert "drift" in info.value.diagnostics
