import numpy as np
import pytest
from scipy.integrate import quad_vec

from sojourn.catalog.confined import CentralForce, Pendulum, RepulsiveHarmonic
from sojourn.catalog.covering import OscillatorCovering, SphereCovering
from sojourn.catalog.flat import Dispersion, Friedrichs, InverseSquareDilation, Stark
from sojourn.catalog.registry import CATALOG, build, crosscheck, listing, validate_params
from sojourn.errors import ConfigError
from sojourn.models import SystemSpec
from sojourn.numerics.integrators import adaptive_orbit


def test_listing_covers_every_system():
    entries = listing()
    assert [e["name"] for e in entries] == list(CATALOG)
    assert len(entries) == 11
    for e in entries:
        assert e["anchor"]
        assert "properties" in e["schema"] or e["schema"].get("type") == "object"
        validate_params(SystemSpec(name=e["name"], params=e["defaults"]))


@pytest.mark.parametrize("name", list(CATALOG))
def test_closed_form_nabla_agrees_with_bracket(name):
    sys = build(SystemSpec(name=name), check=False)
    assert crosscheck(sys, points=3, seed=7) < 1e-6


def test_dilation_inverse_square_builds():
    sys = build(SystemSpec(name="dilation_homogeneous", params={"case": "ii", "n": 2}))
    assert isinstance(sys, InverseSquareDilation)
    for z in sys.sample(np.random.default_rng(0), 5):
        assert sys.closest_approach(z) >= 0.5


def test_unknown_system():
    with pytest.raises(ConfigError, match="unknown system"):
        validate_params(SystemSpec(name="harmonic"))


@pytest.mark.parametrize("name,params", [
    ("friedrichs", {"width": -1.0}),
    ("stark", {"v": [0.0]}),
    ("dilation_homogeneous", {"case": "ii", "alpha": 3.0}),
    ("central_force", {"n": 1, "K": 1.0}),
    ("kinetic", {"n": 1, "mass": 2.0}),
])
def test_invalid_params(name, params):
    with pytest.raises(ConfigError, match="invalid params"):
        validate_params(SystemSpec(name=name, params=params))


def test_stark_relativistic_displacement_matches_quadrature():
    sys = Stark([0.6, -0.8], Dispersion.relativistic)
    p = np.array([0.4, 1.1])
    times = np.array([-3.0, 0.7, 5.0])

    def velocity(s):
        w = p - s * sys.v
        return w / np.sqrt(1.0 + w @ w)

    for t, got in zip(times, sys.displacement(p, times)):
        want, _ = quad_vec(velocity, min(t, 0.0), max(t, 0.0), epsabs=1e-13, epsrel=1e-12)
        assert np.max(np.abs(got - np.sign(t) * want)) < 1e-10


def test_friedrichs_flow_conserves_energy():
    sys = Friedrichs([1.0, 0.5])
    z = np.array([-2.0, 0.3, 0.1, -0.4])
    states = sys.exact_flow(np.linspace(-8.0, 8.0, 9), z)
    assert np.max(np.abs(sys.hamiltonian(states) - sys.hamiltonian(z))) < 1e-10


def test_repulsive_harmonic_flow_matches_integrator():
    sys = RepulsiveHarmonic(1, 0.5)
    z = np.array([0.2, 1.5])
    orbit = adaptive_orbit(sys, z, 2.0, drift_budget=1e-10)
    t = np.array([-2.0, -0.5, 1.0, 2.0])
    assert np.max(np.abs(orbit(t) - sys.exact_flow(t, z))) < 1e-8


def test_repulsive_harmonic_unsmoothed_domain():
    sys = RepulsiveHarmonic(1, 1.0, smoothed=False)
    assert not sys.in_domain(np.array([1.0, 1.0]))
    assert sys.in_domain(np.array([0.2, 1.5]))
    assert np.allclose(sys.nabla_h_closed(np.array([0.2, 1.5])), [1.0])


def test_pendulum_phi_advances_with_sign_of_p():
    sys = Pendulum(1.0)
    z = np.array([0.3, -2.0])
    assert sys.nabla_h_closed(z).tolist() == [-1.0]
    assert sys.phi(np.array([0.3, 2.0]))[0] > 0


def test_central_force_branches_average():
    sys = CentralForce(2, 1.0)
    z = np.array([1.2, 0.3, 0.4, 0.9])
    plus, minus = sys.log_arguments(z)
    assert plus > 0 and minus > 0
    mean = 0.5 * (sys.branch_value(z, "+") + sys.branch_value(z, "-"))
    assert abs(sys.branch_value(z, "0") - mean) < 1e-12


def test_central_force_attractive_needs_angular_momentum():
    sys = CentralForce(2, 1.0)
    assert not sys.in_domain(np.array([1.0, 0.0, 2.0, 0.0]))


def test_sphere_covering_projects_to_unit_sphere():
    sys = SphereCovering()
    points = sys.sample(np.random.default_rng(1), 20)
    assert np.allclose(np.linalg.norm(sys.project(points), axis=-1), 1.0)


def test_oscillator_covering_darboux_chart():
    sys = OscillatorCovering(2, 1.5)
    z = np.array([0.7, 1.3, -4.0, 2.5])
    assert np.allclose(sys.from_darboux(sys.to_darboux(z)), z)
    states = sys.exact_flow(np.array([2.0]), z)
    assert np.allclose(sys.project(states), sys.project(sys.exact_flow(np.array([2.0 + 2.0 * np.pi / 1.5]), z)))
