import numpy as np
import pytest

from sojourn.catalog.confined import Pendulum
from sojourn.catalog.flat import Kinetic, Stark
from sojourn.engine import (
    SojournOptions,
    converge,
    judge,
    radii_values,
    sojourn_at,
    sojourn_difference,
    sojourn_difference_discrete,
    summarise,
)
from sojourn.errors import DomainError, UnsupportedFunctionError
from sojourn.locfn.functions import characteristic_ball, product_smooth, radial_smooth
from sojourn.locfn.pairs import pair_inner_continuous
from sojourn.models import RadiiSchedule, Tolerances

RADII = [10.0, 20.0, 40.0, 80.0]


def test_characteristic_ball_sojourn_is_exact_past_the_offset():
    value, t_star = sojourn_difference(Kinetic(1), characteristic_ball(1), np.array([2.0, 0.5]), 10.0)
    assert abs(value - 4.0) < 1e-10
    assert t_star >= (10.0 + 2.0) / 0.5


def test_converge_free_motion():
    series = converge(Kinetic(1), radial_smooth(1), np.array([2.0, 0.5]), RadiiSchedule(count=5))
    assert series.verdict == "PASS"
    assert series.reference == 4.0
    assert abs(series.limit - 4.0) < 1e-3
    assert len(series.values) == 5
    assert series.mode == "continuous"


def test_converge_stark_momentum_function():
    series = converge(Stark([1.0]), radial_smooth(1), np.array([0.3, 1.2]), RADII)
    assert series.verdict == "PASS"
    assert abs(series.limit + 1.2) < 1e-3


def test_limit_shifts_with_the_flow():
    sys = Stark([1.0])
    tol = Tolerances(acceptance=1e-5)
    z = np.array([0.3, 1.2])
    s = 2.0
    moved = sys.flow(s, z)
    before = converge(sys, radial_smooth(1), z, RADII, tolerances=tol)
    after = converge(sys, radial_smooth(1), moved, RADII, tolerances=tol)
    assert abs(after.reference - before.reference - s) < 1e-12
    assert abs(after.limit - before.limit - s) < 1e-3


def test_radial_limit_does_not_depend_on_the_profile():
    z = np.array([1.0, -0.5, 0.5, 2.0])
    tol = Tolerances(acceptance=1e-6)
    narrow = converge(Kinetic(2), radial_smooth(2), z, RADII, tolerances=tol)
    wide = converge(Kinetic(2), radial_smooth(2, rho=6.0, delta=2.0), z, RADII, tolerances=tol)
    assert narrow.reference == pytest.approx(wide.reference, abs=1e-15)
    assert abs(narrow.limit - wide.limit) < 1e-5


def test_free_motion_matches_the_pair_integral():
    f = product_smooth(2)
    q, p = np.array([2.0, 1.0]), np.array([0.5, 0.25])
    opts = SojournOptions()
    value, t_star = sojourn_difference(Kinetic(2), f, np.concatenate([q, p]), 20.0, opts)
    pair, pair_t = pair_inner_continuous(f, q, p, 20.0, tol=opts.quadrature_tol, tail_tol=opts.tail_tol)
    assert t_star == pair_t
    assert abs(value - pair) < 1e-8


def test_critical_point_is_rejected():
    with pytest.raises(DomainError, match="Crit"):
        sojourn_difference(Kinetic(1), radial_smooth(1), np.array([2.0, 0.0]), 10.0)


def test_critical_point_in_diagnostic_mode_vanishes():
    opts = SojournOptions(diagnose=True)
    value, _ = sojourn_difference(Kinetic(1), radial_smooth(1), np.array([2.0, 0.0]), 10.0, opts)
    assert value == 0.0


def test_sojourn_rejects_bad_radius_and_dimension():
    with pytest.raises(DomainError):
        sojourn_difference(Kinetic(1), radial_smooth(1), np.array([2.0, 0.5]), 0.0)
    with pytest.raises(DomainError):
        sojourn_difference(Kinetic(1), radial_smooth(2), np.array([2.0, 0.5]), 10.0)


def test_discrete_sojourn_needs_smooth_f():
    with pytest.raises(UnsupportedFunctionError):
        sojourn_difference_discrete(Kinetic(1), characteristic_ball(1), np.array([2.0, 0.5]), 10.0)


def test_discrete_converge_free_motion():
    series = converge(Kinetic(1), radial_smooth(1), np.array([2.0, 0.5]), RADII, discrete=True)
    assert series.mode == "discrete"
    assert series.verdict == "PASS"
    assert all(t == int(t) for t in series.truncation_times)


def test_sojourn_at_dispatches_on_mode():
    z = np.array([2.0, 0.5])
    opts = SojournOptions()
    cont = sojourn_at(Kinetic(1), radial_smooth(1), z, 20.0, opts)
    disc = sojourn_at(Kinetic(1), radial_smooth(1), z, 20.0, opts, discrete=True)
    assert cont == sojourn_difference(Kinetic(1), radial_smooth(1), z, 20.0, opts)
    assert abs(cont[0] - disc[0]) < 1e-3


@pytest.mark.slow
def test_converge_pendulum_numeric_flow():
    tol = Tolerances(acceptance=1e-2, drift_budget=1e-11)
    series = converge(Pendulum(1.0, tol.drift_budget), characteristic_ball(1), np.array([0.3, 2.0]),
                      [5.0, 10.0, 20.0, 40.0], tolerances=tol)
    assert series.verdict == "PASS"


def test_judge():
    assert judge(1.0, 1.0005, [3.0, 2.0, 1.0], 1e-3, 1e-4) == "PASS"
    assert judge(1.1, 1.0, [3.0, 2.0, 1.0], 1e-3, 1e-4) == "FAIL"
    assert judge(float("nan"), 1.0, [3.0, 2.0, 1.0], 1e-3, 1e-4) == "FAIL"
    assert judge(1.0, 1.0, [1.0, 2.0, 3.0], 1e-3, 1e-4) == "FAIL"
    # tolerance is relative once |T| exceeds 1
    assert judge(100.05, 100.0, [3.0, 2.0, 1.0], 1e-3, 1e-4) == "PASS"


def test_summarise_reports_errors_and_rate():
    radii = [10.0, 20.0, 40.0, 80.0]
    values = [2.0 + 1.0 / r for r in radii]
    series = summarise("toy", radii, values, [1.0] * 4, 2.0, Tolerances())
    assert series.verdict == "PASS"
    assert series.limit_method == "aitken"
    assert abs(series.fitted_rate - 1.0) < 1e-9
    assert series.errors[-1] == pytest.approx(1.0 / 80.0)


def test_radii_values():
    assert radii_values(RadiiSchedule(r0=5.0, factor=2.0, count=4)) == [5.0, 10.0, 20.0, 40.0]
    with pytest.raises(DomainError):
        radii_values([10.0, 20.0, 40.0])
    with pytest.raises(DomainError):
        radii_values([10.0, 40.0, 20.0, 80.0])


def test_options_follow_tolerances():
    opts = SojournOptions.from_tolerances(Tolerances(acceptance=1e-2, critical_eps=1e-6), diagnose=True)
    assert opts.tail_tol == pytest.approx(1e-3)
    assert opts.critical_eps == 1e-6
    assert opts.diagnose
