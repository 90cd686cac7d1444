import numpy as np
import pytest

from partial_copula.bivariate import Product2, frank_tau, frank_tau_to_theta
from partial_copula.errors import UnsupportedFamily
from partial_copula.families import FamilySpec, make_trivariate
from partial_copula.partial import FrankPartial2
from partial_copula.simulate import (
    SampleSet,
    cpit,
    empirical_cdf3,
    empirical_copula,
    empirical_copula_distance,
    empirical_copula_grid,
    replication_seeds,
    sample_kendall,
    sample_spearman,
    sample_trivariate,
    uniformity_pvalues,
)
from partial_copula.trivariate import cdf3


def test_independent_sample_has_no_rank_correlation():
    samples = sample_trivariate(FamilySpec.of("FGM3", 0.0), 20_000, seed=3)
    for a, b in (("u1", "u2"), ("u1", "u3"), ("u2", "u3")):
        assert abs(sample_spearman(samples, a, b)) < 0.03
    assert min(uniformity_pvalues(samples).values()) > 1e-4


def test_sampling_is_deterministic():
    spec = FamilySpec.of("Frank3", 3.0)
    a = sample_trivariate(spec, 500, seed=42)
    b = sample_trivariate(spec, 500, seed=42)
    c = sample_trivariate(spec, 500, seed=43)
    assert np.array_equal(a.matrix(a.names), b.matrix(b.names))
    assert not np.array_equal(a["u1"], c["u1"])
    assert a.seed == 42 and a.generator == "Philox"


def test_cpit_of_independence_is_identity():
    spec = FamilySpec.of("FGM3", 0.0)
    samples = cpit(sample_trivariate(spec, 200, seed=1), spec)
    assert samples["v1"] == pytest.approx(samples["u1"], abs=1e-12)
    assert samples["v3"] == pytest.approx(samples["u3"], abs=1e-12)


def test_sample_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample_trivariate(FamilySpec.of("Frank3", 2.0), 0, seed=1)
    with pytest.raises(UnsupportedFamily):
        sample_trivariate(FamilySpec.of("Frank2", 2.0), 10, seed=1)


def test_sample_set_checks_lengths_and_is_read_only():
    with pytest.raises(ValueError, match="different lengths"):
        SampleSet({"a": [1.0, 2.0], "b": [1.0]}, seed=0)
    s = SampleSet({"a": [1.0, 2.0]}, seed=0)
    assert s.n == 2
    with pytest.raises(ValueError):
        s["a"][0] = 3.0


def test_replication_seeds_are_distinct():
    seeds = replication_seeds(42, 5)
    draws = [np.random.Generator(np.random.Philox(s)).random() for s in seeds]
    assert len(set(draws)) == 5
    again = [np.random.Generator(np.random.Philox(s)).random() for s in replication_seeds(42, 5)]
    assert draws == again


def test_empirical_copula_small_example():
    x = np.arange(10.0)
    pairs = SampleSet({"v1": x, "v3": x}, seed=0)
    # pseudo-observations are (i + 1) / 11, comonotone
    assert empirical_copula(pairs, 0.5, 0.5) == pytest.approx(0.5)
    assert empirical_copula(pairs, 1.0, 0.2) == pytest.approx(0.2)
    reverse = SampleSet({"v1": x, "v3": -x}, seed=0)
    assert empirical_copula(reverse, 0.5, 0.5) == 0.0
    with pytest.raises(ValueError):
        empirical_copula(SampleSet({"v1": x[:5], "v3": x[:5]}, seed=0), 0.5, 0.5)


def test_empirical_copula_grid_matches_direct_count():
    rng = np.random.default_rng(5)
    x, y = rng.random(300), rng.random(300)
    grid = np.arange(1, 16) / 16
    pairs = SampleSet({"v1": x, "v3": y}, seed=5)
    gu, gv = np.meshgrid(grid, grid, indexing="ij")
    assert empirical_copula_grid(x, y, grid) == pytest.approx(empirical_copula(pairs, gu, gv), abs=1e-15)


@pytest.mark.slow
def test_frank_sampler_pipeline():
    theta = frank_tau_to_theta(0.4)
    spec = FamilySpec.of("Frank3", theta)
    n = 100_000
    samples = cpit(sample_trivariate(spec, n, seed=42), spec)
    for a, b in (("u1", "u2"), ("u1", "u3"), ("u2", "u3")):
        assert sample_kendall(samples, a, b) == pytest.approx(0.4, abs=0.01)
    for name in ("v1", "v3"):
        assert abs(np.corrcoef(samples[name], samples["u2"])[0, 1]) < 0.01
    distance = empirical_copula_distance(samples["v1"], samples["v3"], FrankPartial2(theta))
    assert distance < 2 * 1.36 / np.sqrt(n)


@pytest.mark.slow
@pytest.mark.parametrize(
    "spec",
    [
        FamilySpec.of("Clayton3", 2.0),
        FamilySpec.of("PolyCE"),
        FamilySpec.of("FGM3", 0.8),
        FamilySpec.of("Frank3", 3.0),
        FamilySpec.of("Gauss3", 0.5, 0.3, 0.4),
    ],
    ids=str,
)
def test_sampler_matches_cdf(spec):
    n = 100_000
    samples = sample_trivariate(spec, n, seed=11)
    points = np.random.default_rng(0).uniform(0.1, 0.9, size=(10, 3))
    cop = make_trivariate(spec)
    expected = np.array([cdf3(cop, *p) for p in points])
    empirical = empirical_cdf3(samples, points)
    sd = np.sqrt(expected * (1 - expected) / n)
    assert np.all(np.abs(empirical - expected) < 4 * sd)


def test_frank_sampling_with_large_theta():
    spec = FamilySpec.of("Frank3", 40.0)
    samples = cpit(sample_trivariate(spec, 2000, seed=1), spec)
    block = samples.matrix(samples.names)
    assert np.all(np.isfinite(block))
    assert np.all((block >= 0) & (block <= 1))
    assert sample_kendall(samples, "u1", "u2") == pytest.approx(frank_tau(40.0), abs=0.03)


@pytest.mark.slow
def test_fgm_cpit_pipeline():
    spec = FamilySpec.of("FGM3", 0.8)
    n = 100_000
    samples = cpit(sample_trivariate(spec, n, seed=42), spec)
    assert min(uniformity_pvalues(samples, ("v1", "v3")).values()) > 1e-3
    for name in ("v1", "v3"):
        assert abs(np.corrcoef(samples[name], samples["u2"])[0, 1]) < 0.01
    distance = empirical_copula_distance(samples["v1"], samples["v3"], Product2())
    assert distance < 2 * 1.36 / np.sqrt(n)
