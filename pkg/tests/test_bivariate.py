import numpy as np
import pytest
from scipy import stats

from partial_copula.bivariate import (
    AMH2,
    FGM2,
    Clayton2,
    Comonotone2,
    Frank2,
    Gauss2,
    PolyCE2,
    Product2,
    frank_tau,
    frank_tau_to_theta,
)
from partial_copula.errors import DensityUnavailable, ParameterOutOfRange
from partial_copula.util import central_difference, mixed_difference

COPULAS = [
    Product2(),
    FGM2(0.7),
    FGM2(-1.0),
    AMH2(0.6),
    AMH2(np.nextafter(1.0, 0.0)),
    Frank2(4.0),
    Frank2(-3.0),
    Clayton2(2.0),
    Gauss2(0.6),
    Gauss2(-0.4),
    PolyCE2(0.5),
    PolyCE2(-0.5),
    PolyCE2(1.0),
]
POINTS = [(0.3, 0.7), (0.6, 0.2), (0.5, 0.5), (0.85, 0.9)]


@pytest.mark.parametrize("cop", COPULAS + [Comonotone2()], ids=repr)
def test_boundary_conditions(cop):
    u = np.array([0.0, 0.1, 0.45, 0.99, 1.0])
    assert cop.cdf(u, np.zeros_like(u)) == pytest.approx(np.zeros_like(u), abs=1e-12)
    assert cop.cdf(np.zeros_like(u), u) == pytest.approx(np.zeros_like(u), abs=1e-12)
    assert cop.cdf(u, np.ones_like(u)) == pytest.approx(u, abs=1e-12)
    assert cop.cdf(np.ones_like(u), u) == pytest.approx(u, abs=1e-12)


@pytest.mark.parametrize("cop", COPULAS, ids=repr)
def test_h_functions_are_partial_derivatives(cop):
    for u, v in POINTS:
        assert cop.h1(u, v) == pytest.approx(central_difference(cop.cdf, (u, v), 0), abs=1e-6)
        assert cop.h2(u, v) == pytest.approx(central_difference(cop.cdf, (u, v), 1), abs=1e-6)


@pytest.mark.parametrize("cop", COPULAS, ids=repr)
def test_density_is_mixed_derivative(cop):
    points = np.random.default_rng(2024).uniform(0.05, 0.95, size=(100, 2))
    for u, v in points:
        assert cop.pdf(u, v) == pytest.approx(mixed_difference(cop.cdf, (u, v), h=2e-5), abs=1e-5), (u, v)


@pytest.mark.parametrize("cop", COPULAS + [Comonotone2()], ids=repr)
def test_rectangle_volumes_are_nonnegative(cop):
    grid = np.linspace(0.0, 1.0, 21)
    c = np.asarray(cop.cdf(*np.meshgrid(grid, grid, indexing="ij")))
    volumes = c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]
    assert volumes.min() >= -1e-12


@pytest.mark.parametrize("cop", COPULAS, ids=repr)
def test_inverse_h_functions(cop):
    for u, v in POINTS:
        assert cop.h1_inv(cop.h1(u, v), u) == pytest.approx(v, abs=1e-9)
        assert cop.h2_inv(cop.h2(u, v), v) == pytest.approx(u, abs=1e-9)


def test_inverse_broadcasts_array_parameters():
    z = np.array([0.1, 0.5, 0.9])
    cop = PolyCE2(z)
    u = np.array([0.2, 0.4, 0.8])
    v = np.array([0.3, 0.6, 0.5])
    assert cop.h1_inv(cop.h1(u, v), u) == pytest.approx(v, abs=1e-9)
    amh = AMH2(z)
    assert amh.h2_inv(amh.h2(u, v), v) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize(
    "make, bad",
    [(FGM2, 1.5), (AMH2, 1.0), (AMH2, -0.1), (Frank2, 0.0), (Clayton2, -1.0), (Gauss2, 1.0), (PolyCE2, -0.6)],
)
def test_parameter_out_of_range(make, bad):
    with pytest.raises(ParameterOutOfRange):
        make(bad)


def test_parameter_message_names_family_and_constraint():
    with pytest.raises(ParameterOutOfRange, match=r"FGM2: \|theta\| <= 1 \(got theta=1.5\)") as info:
        FGM2(1.5)
    assert info.value.family == "FGM2"
    assert isinstance(info.value, ValueError)


def test_comonotone_has_no_density():
    cop = Comonotone2()
    assert not cop.has_density
    with pytest.raises(DensityUnavailable):
        cop.pdf(0.3, 0.4)
    assert cop.cdf(0.3, 0.4) == 0.3


def test_polynomial_density_integrates_to_one():
    from partial_copula.quadrature import gauss_rule

    rule = gauss_rule(8)
    for z in (-0.5, 0.5, 1.0):
        assert rule.integrate2(PolyCE2(z).pdf) == pytest.approx(1.0, abs=1e-14)


def test_frank_tau_small_theta():
    assert frank_tau(1e-6) == pytest.approx(1e-6 / 9, rel=1e-9)
    assert frank_tau(0.5) == pytest.approx(0.5 / 9 - 0.5**3 / 900, abs=1e-5)


def test_frank_tau_to_theta():
    assert frank_tau_to_theta(0.4) == pytest.approx(4.1612, abs=2e-3)
    for tau in (0.05, 0.4, 0.8):
        assert frank_tau(frank_tau_to_theta(tau)) == pytest.approx(tau, abs=1e-10)
    with pytest.raises(ParameterOutOfRange):
        frank_tau_to_theta(1.0)


def test_closed_form_measures():
    assert FGM2(0.9).closed_form_measure("spearman") == pytest.approx(0.3)
    assert FGM2(0.9).closed_form_measure("kendall") == pytest.approx(0.2)
    assert Clayton2(2.0).closed_form_measure("tail_lower") == pytest.approx(2**-0.5)
    assert Clayton2(2.0).closed_form_measure("spearman") is None
    assert Gauss2(0.5).closed_form_measure("kendall") == pytest.approx(1 / 3)
    assert AMH2(0.0).closed_form_measure("kendall") == 0.0
    assert Product2().closed_form_measure("tail_upper") == 0.0
    assert Comonotone2().closed_form_measure("kendall") == 1.0


def test_repr():
    assert repr(FGM2(0.5)) == "FGM2(0.5)"
    assert repr(Product2()) == "Product2()"


@pytest.mark.parametrize("rho", [-0.9, -0.4, 0.0, 0.6, 0.95])
def test_gauss_cdf_matches_bivariate_normal(rho):
    mvn = stats.multivariate_normal(mean=[0.0, 0.0], cov=[[1.0, rho], [rho, 1.0]])
    cop = Gauss2(rho)
    for u, v in POINTS + [(0.5, 0.2), (0.7, 0.5), (0.02, 0.97)]:
        expected = stats.multivariate_normal.cdf([stats.norm.ppf(u), stats.norm.ppf(v)], mean=mvn.mean, cov=mvn.cov, abseps=1e-12, releps=1e-12)
        assert cop.cdf(u, v) == pytest.approx(expected, abs=1e-8)


def test_gauss_cdf_at_the_median():
    for rho in (-0.7, 0.0, 0.3):
        assert Gauss2(rho).cdf(0.5, 0.5) == pytest.approx(0.25 + np.arcsin(rho) / (2 * np.pi), abs=1e-14)
    assert Gauss2(0.0).cdf(0.5, 0.3) == pytest.approx(0.15, abs=1e-14)


def test_amh_next_to_unit_gamma():
    cop = AMH2(np.nextafter(1.0, 0.0))
    u = np.array([0.0, 0.2, 0.5, 0.9])
    v = np.array([0.0, 0.7, 0.5, 0.3])
    assert cop.cdf(u, v) == pytest.approx(np.array([0.0, 0.14 / 0.76, 1 / 3, 0.27 / 0.93]), abs=1e-14)
    assert cop.closed_form_measure("kendall") == pytest.approx(1 / 3, abs=1e-12)
    assert np.all(np.isfinite(cop.h1_inv(np.array([0.0, 0.5, 1.0]), u)))
