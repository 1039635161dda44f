import pytest

from sojourn import acceptance
from sojourn.models import LocalisationSpec, TimeOperatorReport


def test_rf_homogeneity():
    res = acceptance.rf_homogeneity(samples=5)
    assert res.number == 1
    assert res.passed, res.detail


def test_radial_closed_form():
    assert acceptance.radial_closed_form(samples=5).passed


def test_ball_pair_limit():
    assert acceptance.ball_pair_limit(samples=5).passed


def test_discrete_agreement():
    assert acceptance.discrete_agreement(samples=3).passed


def test_exact_flow_formula_subset():
    res = acceptance.exact_flow_formula(points=1, keys=["stark", "friedrichs", "sphere_covering"])
    assert res.passed, res.detail


def test_determinism():
    assert acceptance.determinism(points=1).passed


def test_time_operator_law_needs_an_evaluated_point(monkeypatch):
    skipped = TimeOperatorReport(max_residual=float("nan"), skipped=True, reason="critical")
    monkeypatch.setattr(acceptance, "check_time_operator", lambda *args, **kwargs: skipped)
    res = acceptance.time_operator_law(points=1)
    assert not res.passed
    assert "no non-critical point" in res.detail


def test_run_acceptance_filters():
    results = acceptance.run_acceptance(only=[2, 3])
    assert [r.number for r in results] == [2, 3]


def test_verify_rf_suites_radial():
    suites = acceptance.verify_rf_suites(LocalisationSpec(kind="radial-smooth", dimension=1), samples=4)
    assert [s.name for s in suites] == ["homogeneity", "radial closed form", "pair limit",
                                        "discrete/continuous agreement"]
    assert all(s.status == "PASS" for s in suites)


def test_verify_rf_suites_product_skips_closed_form():
    suites = acceptance.verify_rf_suites(LocalisationSpec(kind="product-smooth", dimension=2), samples=4)
    status = {s.name: s.status for s in suites}
    assert status["radial closed form"] == "SKIPPED"
    assert status["homogeneity"] == "PASS"


@pytest.mark.slow
@pytest.mark.parametrize("number", [5, 6, 7, 8, 9, 10])
def test_full_criteria(number):
    res = acceptance.CRITERIA[number](0)
    assert res.passed, res.detail
