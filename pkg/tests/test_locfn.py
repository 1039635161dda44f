import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sojourn.errors import DomainError, UnsupportedFunctionError
from sojourn.locfn.functions import characteristic_ball, product_smooth, radial_smooth
from sojourn.locfn.pairs import pair_inner_continuous, pair_limit_continuous, pair_limit_discrete
from sojourn.locfn.rfunc import check_homogeneity, eval_Rf, grad_Rf

coord = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def test_plateau_and_decay():
    f = radial_smooth(2)
    assert f(np.zeros(2)) == 1.0
    assert f(np.array([0.5, 0.5])) == 1.0
    assert abs(f(np.array([3.0, 0.0])) - 1.0 / 17.0) < 1e-15


def test_characteristic_ball_boundary():
    f = characteristic_ball(2)
    assert f(np.array([1.0, 0.0])) == 1.0
    assert f(np.array([1.0001, 0.0])) == 0.0


def test_product_smooth_needs_rho_above_one():
    with pytest.raises(DomainError):
        product_smooth(2, rho=1.0)


def test_characteristic_ball_has_no_gradient():
    with pytest.raises(UnsupportedFunctionError):
        characteristic_ball(1).gradient(np.array([0.5]))


@settings(max_examples=30, deadline=None)
@given(st.lists(coord, min_size=2, max_size=2))
def test_smooth_kinds_are_even(x):
    x = np.array(x)
    for f in (radial_smooth(2), product_smooth(2)):
        assert f(x) == f(-x)


def test_Rf_of_characteristic_ball():
    assert abs(eval_Rf(characteristic_ball(2), [3.0, 4.0]) + math.log(5.0)) < 1e-12


def test_Rf_shifts_by_log_under_scaling():
    f = radial_smooth(2)
    x = np.array([0.7, -1.1])
    assert abs(eval_Rf(f, 3.0 * x) - eval_Rf(f, x) + math.log(3.0)) < 1e-8


def test_grad_Rf_radial_closed_form():
    g = grad_Rf(radial_smooth(3), [1.0, 2.0, 2.0])
    assert np.allclose(g, -np.array([1.0, 2.0, 2.0]) / 9.0, rtol=0, atol=1e-15)


def test_grad_Rf_quadrature_matches_closed_form():
    f = radial_smooth(2)
    x = np.array([0.4, 1.3])
    assert np.max(np.abs(grad_Rf(f, x, method="quadrature") - grad_Rf(f, x))) < 1e-8


def test_grad_Rf_undefined_at_origin():
    with pytest.raises(DomainError):
        grad_Rf(radial_smooth(2), [0.0, 0.0])
    with pytest.raises(DomainError):
        eval_Rf(radial_smooth(2), [0.0, 0.0])


@pytest.mark.parametrize("f", [radial_smooth(2), product_smooth(2), characteristic_ball(2)])
def test_homogeneity(f):
    rng = np.random.default_rng(3)
    report = check_homogeneity(f, rng.normal(0.0, 2.0, size=(8, 2)))
    assert report.samples == 8
    assert report.failures == []
    assert report.max_euler_deviation < 1e-7


def test_pair_limit_characteristic_ball_is_exact():
    x, y = np.array([1.0, 0.5]), np.array([0.8, -0.3])
    est = pair_limit_continuous(characteristic_ball(2), x, y, [10.0, 20.0, 40.0, 80.0])
    assert abs(est.limit - float(x @ y) / float(y @ y)) < 1e-9


def test_pair_limit_radial_smooth():
    f = radial_smooth(2)
    x, y = np.array([1.0, 0.5]), np.array([0.8, -0.3])
    est = pair_limit_continuous(f, x, y, [10.0, 20.0, 40.0, 80.0], tail_tol=1e-10)
    assert abs(est.limit + float(x @ grad_Rf(f, y))) < 1e-6


def test_pair_limit_discrete_agrees_with_continuous():
    f = radial_smooth(1)
    x, y = np.array([1.5]), np.array([0.7])
    radii = [10.0, 20.0, 40.0, 80.0]
    cont = pair_limit_continuous(f, x, y, radii, tail_tol=1e-10)
    disc = pair_limit_discrete(f, x, y, radii, tail_tol=1e-10)
    assert abs(cont.limit - disc.limit) < 1e-6


def test_discrete_pair_rejects_characteristic_ball():
    with pytest.raises(UnsupportedFunctionError):
        pair_limit_discrete(characteristic_ball(1), [1.0], [0.5], [10.0, 20.0, 40.0, 80.0])


def test_pair_needs_nonzero_y():
    with pytest.raises(DomainError):
        pair_inner_continuous(radial_smooth(1), [1.0], [0.0], 10.0)


@settings(max_examples=20, deadline=None)
@given(coord, st.floats(min_value=0.5, max_value=3.0))
def test_pair_inner_is_odd_in_x(x, y):
    f = radial_smooth(1)
    plus, _ = pair_inner_continuous(f, [x], [y], 10.0)
    minus, _ = pair_inner_continuous(f, [-x], [y], 10.0)
    assert abs(plus + minus) < 1e-12


@pytest.mark.parametrize("f", [radial_smooth(2), product_smooth(2)], ids=repr)
def test_pair_limit_is_odd_in_x(f):
    x, y = np.array([1.5, -0.5]), np.array([0.7, 0.4])
    radii = [10.0, 20.0, 40.0, 80.0]
    plus = pair_limit_continuous(f, x, y, radii)
    minus = pair_limit_continuous(f, -x, y, radii)
    assert np.allclose(plus.values, -np.array(minus.values), rtol=0, atol=1e-12)
    assert abs(plus.limit + minus.limit) < 1e-10
