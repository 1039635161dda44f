import numpy as np
import pytest

from sojourn.catalog.confined import Pendulum
from sojourn.catalog.covering import SphereCovering
from sojourn.catalog.flat import HomogeneousDilation, Kinetic, RatioHomogeneous, Stark
from sojourn.dynamics.brackets import is_critical, nabla_H, poisson_bracket
from sojourn.dynamics.checks import (
    T_f_observable,
    check_assumption,
    check_flow_group,
    check_gradient_law,
    check_time_operator,
    critical_inclusion,
    crosscheck_nabla,
    energy_drift,
    orthogonality_defect,
)
from sojourn.dynamics.system import PhasePoint
from sojourn.errors import DomainError
from sojourn.locfn.functions import characteristic_ball, radial_smooth

GRID = np.linspace(-5.0, 5.0, 11)


def test_bracket_of_position_with_H_is_velocity():
    sys = Kinetic(1)
    z = np.array([2.0, 0.5])
    assert abs(poisson_bracket(sys, lambda w: w[0], sys.H, z) - 0.5) < 1e-9


def test_nabla_H_bracket_matches_closed_form():
    sys = RatioHomogeneous()
    z = np.array([0.5, 2.0, 1.0, -0.3])
    assert crosscheck_nabla(sys, z) < 1e-6
    assert abs(nabla_H(sys, z)[0] - (4.25 ** 2 - 4.0)) < 1e-12


def test_kinetic_point_at_rest_is_critical():
    sys = Kinetic(1)
    assert is_critical(sys, np.array([1.0, 0.0]))
    assert not is_critical(sys, np.array([1.0, 0.5]))


def test_T_f_for_free_motion():
    sys = Kinetic(1)
    assert abs(T_f_observable(sys, radial_smooth(1), np.array([2.0, 0.5])) - 4.0) < 1e-12


def test_T_f_rejects_critical_point():
    with pytest.raises(DomainError, match="Crit"):
        T_f_observable(Kinetic(1), radial_smooth(1), np.array([2.0, 0.0]))


def test_T_f_rejects_dimension_mismatch():
    with pytest.raises(DomainError):
        T_f_observable(Kinetic(2), radial_smooth(1), np.array([1.0, 1.0, 0.5, 0.5]))


def test_time_operator_law_on_exact_flow():
    sys = Stark([1.0])
    report = check_time_operator(sys, radial_smooth(1), np.array([0.3, 1.2]), [-10.0, -1.0, 0.5, 10.0])
    assert not report.skipped
    assert report.max_residual < 1e-9


def test_time_operator_skips_critical_point():
    report = check_time_operator(Kinetic(1), radial_smooth(1), np.array([1.0, 0.0]), [1.0])
    assert report.skipped
    assert np.isnan(report.max_residual)


def test_assumption_holds_for_stark():
    report = check_assumption(Stark([1.0]), np.array([0.3, 1.2]), GRID)
    assert report.max_second_difference < 1e-9
    assert report.max_linearity_residual < 1e-9
    assert not report.critical


def test_assumption_grid_must_be_symmetric():
    with pytest.raises(DomainError):
        check_assumption(Stark([1.0]), np.array([0.3, 1.2]), [0.0, 1.0, 2.0])


def test_flow_group_numeric():
    sys = Pendulum(1.0)
    assert check_flow_group(sys, np.array([0.3, 2.0]), 0.5, 0.5) < 1e-6


def test_energy_drift_exact_flow():
    assert energy_drift(Stark([1.0]), np.array([0.3, 1.2]), 10.0) < 1e-9


def test_critical_inclusion():
    hamiltonian_field, nabla = critical_inclusion(Kinetic(1), np.array([1.0, 0.0]))
    assert hamiltonian_field < 1e-9
    assert nabla < 1e-12


def test_orthogonality_defect():
    assert abs(orthogonality_defect(Kinetic(1), np.array([2.0, 0.5])) - 2.0) < 1e-7


def test_gradient_law():
    assert check_gradient_law(HomogeneousDilation(2, 3.0), np.array([1.0, -0.5, 0.8, 0.4])) < 1e-6
    assert np.isnan(check_gradient_law(Kinetic(1), np.array([1.0, 0.5])))


def test_require_checks_shape_and_chart():
    sys = SphereCovering()
    with pytest.raises(DomainError):
        sys.require(np.array([0.1, 0.2, 0.3]))
    with pytest.raises(DomainError, match="chart"):
        sys.require(PhasePoint([0.1, 0.2], "canonical"))
    assert sys.require(PhasePoint([0.1, 0.2], "cylinder")).tolist() == [0.1, 0.2]


def test_domain_error_names_the_predicate():
    with pytest.raises(DomainError, match=r"p\^2/2 > K cos\^2\(q/2\)"):
        Pendulum(1.0).require(np.array([0.0, 0.1]))


def test_T_f_with_characteristic_ball():
    sys = Kinetic(2)
    z = np.array([1.0, 0.5, 0.3, -0.2])
    expected = float(np.array([1.0, 0.5]) @ np.array([0.3, -0.2])) / 0.13
    assert abs(T_f_observable(sys, characteristic_ball(2), z) - expected) < 1e-12
