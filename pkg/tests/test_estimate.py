import numpy as np
import pytest

from partial_copula.errors import EstimationError, ParameterAtBound
from partial_copula.estimate import (
    COORDINATES,
    FitMode,
    MLModel,
    fit_joint,
    fit_stepwise,
    get_scenario,
    joint_vs_stepwise_experiment,
    simulate_ml_data,
)
from partial_copula.families import Family
from partial_copula.simulate import SampleSet


@pytest.fixture(scope="module")
def simplified_data():
    return simulate_ml_data("simplified", 20000, seed=42)


def test_stepwise_recovers_truth(simplified_data):
    fit = fit_stepwise(simplified_data)
    theta1, theta2, theta3 = fit.estimates
    assert theta1 == pytest.approx(1.0, abs=0.04)
    assert theta2 == pytest.approx(1.0, abs=0.04)
    assert theta3 == pytest.approx(0.5, abs=0.07)
    assert fit.mode is FitMode.STEPWISE
    assert fit.converged


def test_stepwise_nonsimplified_has_independent_partial():
    data = simulate_ml_data("nonsimplified", 20000, seed=42)
    assert fit_stepwise(data).estimates[2] == pytest.approx(0.0, abs=0.07)


def test_simulation_is_deterministic():
    a = simulate_ml_data("nonsimplified-cubic", 1000, seed=7)
    b = simulate_ml_data("nonsimplified-cubic", 1000, seed=7)
    assert np.array_equal(a.matrix(("y1", "y2", "z")), b.matrix(("y1", "y2", "z")))


def test_joint_never_worse_than_stepwise(simplified_data):
    stepwise = fit_stepwise(simplified_data)
    joint = fit_joint(simplified_data, start=stepwise.estimates)
    assert joint.loglik >= stepwise.loglik - 1e-9
    assert joint.mode is FitMode.JOINT


def test_joint_fit_does_not_depend_on_start():
    data = simulate_ml_data("simplified", 5000, seed=3)
    from_truth = fit_joint(data, start=(1.0, 1.0, 0.5))
    from_stepwise = fit_joint(data)
    assert from_truth.loglik == pytest.approx(from_stepwise.loglik, abs=1e-7)
    assert from_truth.estimates == pytest.approx(from_stepwise.estimates, abs=1e-3)


def test_stepwise_copula_on_boundary():
    data = simulate_ml_data("simplified", 2000, seed=5)
    copy = SampleSet({"y1": data["y1"], "y2": data["y1"], "z": data["z"]}, seed=5)
    with pytest.raises(ParameterAtBound) as info:
        fit_stepwise(copy)
    assert isinstance(info.value, EstimationError)


def test_model_validation():
    with pytest.raises(ValueError, match="copula family"):
        MLModel(copula_family=Family.Frank2)
    model = MLModel(copula_family=Family.PolyCE2)
    assert model.copula_box == (-0.5, 1.0)
    assert list(model.lower) == [-10.0, -10.0, -0.5]


def test_missing_columns():
    with pytest.raises(ValueError, match="missing"):
        fit_stepwise(SampleSet({"y1": [1.0, 2.0], "z": [0.1, 0.2]}, seed=0))


def test_scenarios():
    assert get_scenario("nonsimplified").truth == (1.0, 1.0, 0.0)
    assert get_scenario("nonsimplified-cubic").model().copula_family is Family.PolyCE2
    with pytest.raises(ValueError, match="unknown scenario"):
        get_scenario("clayton")


def test_experiment_argument_errors():
    with pytest.raises(ValueError):
        joint_vs_stepwise_experiment(n=500)
    with pytest.raises(ValueError):
        joint_vs_stepwise_experiment(n=2000, replications=0)


def test_single_replication_has_no_standard_error():
    with pytest.warns(RuntimeWarning, match="replications"):
        report = joint_vs_stepwise_experiment("simplified", n=2000, replications=1, seed=1)
    assert report.standard_error is None
    assert report.flagged == ()
    assert "standard error unavailable" in report.summary()
    rows = report.rows()
    assert [row["mode"] for row in rows] == ["Stepwise", "Joint"]
    assert set(COORDINATES) <= set(rows[0])


@pytest.mark.slow
def test_experiment_is_deterministic():
    with pytest.warns(RuntimeWarning):
        a = joint_vs_stepwise_experiment("simplified", n=2000, replications=3, seed=9)
    with pytest.warns(RuntimeWarning):
        b = joint_vs_stepwise_experiment("simplified", n=2000, replications=3, seed=9)
    assert a.mean_difference == b.mean_difference
    assert a.standard_error == b.standard_error


@pytest.mark.slow
def test_simplified_scenario_is_not_flagged():
    report = joint_vs_stepwise_experiment("simplified", n=20000, replications=20, seed=42)
    assert report.flagged_margins == ()
    assert "common limit" in report.summary()


@pytest.mark.slow
def test_cubic_scenario_separates_estimators():
    report = joint_vs_stepwise_experiment("nonsimplified-cubic", n=20000, replications=20, seed=42)
    assert report.flagged_margins == ("theta1", "theta2")
    assert "gamma != theta" in report.summary()
