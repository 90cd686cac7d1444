#!/usr/bin/env python3
"""Rank correlations, tail coefficients and partial correlation.

Copula-level measures are integrals over the unit square evaluated with a
tensor Gauss rule; tail coefficients are corner limits extrapolated along
eps = 2^-k.
"""

from __future__ import annotations
import enum
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from scipy import special

from .bivariate import MEASURES, BivariateCopulaMixin, Product2
from .errors import DegenerateResiduals, DensityUnavailable, NonConvergent, SingularDesign
from .partial import ConditionalFamily, PartialMode, partial_copula
from .quadrature import QuadratureRule, gauss_rule
from .simulate import SampleSet, empirical_copula_distance, make_generator
from .util import scalar_or_array

TAIL_EXPONENTS = tuple(range(6, 21))
TAIL_TOLERANCE = 1e-3


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    QUADRATURE = "Quadrature"
    LIMIT = "LimitExtrapolation"


@dataclass(frozen=True)
class DependenceSummary:
    spearman: float
    kendall: float
    tail_lower: float
    tail_upper: float
    methods: Dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in MEASURES}


def spearman_rho(cop: BivariateCopulaMixin, rule: QuadratureRule = None) -> float:
    """12 times the integral of the copula over the unit square, minus 3."""
    rule = rule if rule is not None else gauss_rule()
    return 12 * rule.integrate2(cop.cdf) - 3


def kendall_tau(cop: BivariateCopulaMixin, rule: QuadratureRule = None) -> float:
    """4 E[C(U, V)] - 1, integrating C against the copula density."""
    if not cop.has_density:
        raise DensityUnavailable(f"Kendall's tau needs a density; {cop!r} has none")
    rule = rule if rule is not None else gauss_rule()
    return 4 * rule.integrate2(lambda u, v: cop.cdf(u, v) * cop.pdf(u, v)) - 1


def _tail(cop: BivariateCopulaMixin, side: str, tol: float, use_closed_form: bool = True) -> Tuple[float, Method]:
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    closed = cop.closed_form_measure(f"tail_{side}") if use_closed_form else None
    if closed is not None:
        return float(closed), Method.CLOSED_FORM

    eps = 2.0 ** -np.array(TAIL_EXPONENTS, dtype=np.float64)
    if side == "lower":
        ratios = np.asarray(cop.cdf(eps, eps)) / eps
    else:
        ratios = (2 * eps - 1 + np.asarray(cop.cdf(1 - eps, 1 - eps))) / eps
    # eps halves at each step, so a linear error term cancels in 2 r(eps/2) - r(eps)
    extrapolants = 2 * ratios[1:] - ratios[:-1]
    for j in range(len(extrapolants) - 2):
        window = extrapolants[j : j + 3]
        if np.ptp(window) <= tol:
            return float(np.clip(window[-1], 0.0, 1.0)), Method.LIMIT
    raise NonConvergent(
        f"{side} tail of {cop!r}: extrapolants did not settle within {tol:g} "
        f"(last values {extrapolants[-3:]})"
    )


def tail_coefficient(
    cop: BivariateCopulaMixin, side: str, tol: float = TAIL_TOLERANCE, use_closed_form: bool = True
) -> float:
    """Lower or upper tail-dependence coefficient; closed forms win when the family has one
    unless `use_closed_form` is False."""
    return _tail(cop, side, tol, use_closed_form)[0]


def measure(cop: BivariateCopulaMixin, name: str, rule: QuadratureRule = None) -> float:
    """One of MEASURES for a single bivariate copula."""
    if name == "spearman":
        return spearman_rho(cop, rule)
    if name == "kendall":
        return kendall_tau(cop, rule)
    if name == "tail_lower":
        return tail_coefficient(cop, "lower")
    if name == "tail_upper":
        return tail_coefficient(cop, "upper")
    raise ValueError(f"unknown measure {name!r}; choose from {MEASURES}")


def expected_conditional_measure(cf: ConditionalFamily, name: str, rule: QuadratureRule = None) -> float:
    """Average of a measure of the conditional copula over Z uniform on [0, 1]."""
    rule = rule if rule is not None else gauss_rule()
    if cf.simplified:
        return measure(cf.at(0.5), name, rule)
    values = np.array([measure(cf.at(z), name, rule) for z in rule.nodes])
    return float(np.dot(rule.weights, values))


def summarize(cop: BivariateCopulaMixin, rule: QuadratureRule = None) -> DependenceSummary:
    rule = rule if rule is not None else gauss_rule()
    methods = {"spearman": Method.QUADRATURE.value}
    spearman = spearman_rho(cop, rule)
    try:
        kendall = kendall_tau(cop, rule)
        methods["kendall"] = Method.QUADRATURE.value
    except DensityUnavailable:
        kendall = cop.closed_form_measure("kendall")
        if kendall is None:
            raise
        methods["kendall"] = Method.CLOSED_FORM.value
    lower, how_lower = _tail(cop, "lower", TAIL_TOLERANCE)
    upper, how_upper = _tail(cop, "upper", TAIL_TOLERANCE)
    methods["tail_lower"] = how_lower.value
    methods["tail_upper"] = how_upper.value
    return DependenceSummary(spearman, kendall, lower, upper, methods)


class MeasureComparison(NamedTuple):
    measure: str
    partial: float
    expected: float
    gap: float
    method: str


def compare_partial_expected(cf: ConditionalFamily, rule: QuadratureRule = None) -> List[MeasureComparison]:
    """Each measure of the partial copula next to the expected conditional measure."""
    rule = rule if rule is not None else gauss_rule()
    mode = PartialMode.CLOSED_FORM if cf.closed_partial is not None else PartialMode.QUADRATURE
    summary = summarize(partial_copula(cf, mode, rule), rule)
    rows = []
    for name in MEASURES:
        value = getattr(summary, name)
        expected = expected_conditional_measure(cf, name, rule)
        rows.append(MeasureComparison(name, value, expected, abs(value - expected), summary.methods[name]))
    return rows


def partial_correlation(y1, y2, z) -> float:
    """Correlation of the least-squares residuals of y1 and y2 on the columns of z.

    z should contain an intercept column."""
    y1 = np.asarray(y1, dtype=np.float64)
    y2 = np.asarray(y2, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        z = z[:, None]
    n = len(y1)
    if len(y2) != n or z.shape[0] != n:
        raise ValueError("y1, y2 and z need the same number of rows")
    if n < 3:
        raise ValueError(f"partial correlation needs at least 3 observations, got {n}")
    if np.linalg.matrix_rank(z) < z.shape[1]:
        raise SingularDesign(f"design matrix of shape {z.shape} is rank deficient")

    ys = np.column_stack([y1, y2])
    beta, *_ = np.linalg.lstsq(z, ys, rcond=None)
    resid = ys - z @ beta
    scale = np.maximum(np.std(ys, axis=0), 1.0)
    if np.any(np.std(resid, axis=0) <= 1e-12 * scale):
        raise DegenerateResiduals("a residual vector has zero variance")
    return float(np.clip(np.corrcoef(resid, rowvar=False)[0, 1], -1.0, 1.0))


def cond_corr_profile(z_values):
    """Correlation of exp(W) and exp(zW), W standard normal.

    (e^z - 1) / sqrt((e - 1)(e^(z^2) - 1)), written with expm1 ratios so small z
    stays accurate; it tends to 1 / sqrt(e - 1) as z -> 0."""
    z = np.asarray(z_values, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("the conditional correlation profile needs z > 0")
    z2 = z**2
    with np.errstate(over="ignore"):
        ratio_num = np.expm1(z) / z
        ratio_den = np.where(z2 > 0, np.expm1(z2) / np.where(z2 > 0, z2, 1.0), 1.0)
        value = ratio_num / np.sqrt(np.expm1(1.0) * ratio_den)
    return scalar_or_array(value)


def lognormal_comonotone_sample(z: float, n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Y1 = exp(W), Y2 = exp(zW): log-normal margins with the comonotone copula."""
    w = make_generator(seed).standard_normal(n)
    return np.exp(w), np.exp(z * w)


def pathology_partial_correlation(sigma: float, negative: bool = False) -> float:
    """Population partial correlation of Y1 = -1 + Z^2 + e1 and Y2 = +-(Z^2) + e2 given Z.

    Var[Z^2] = 2 for Z standard normal and Var[e_i] = sigma."""
    value = 2 / (2 + sigma)
    return -value if negative else value


def pathology_sample(n: int, sigma: float, seed: int, negative: bool = False) -> SampleSet:
    """Conditionally independent Y1, Y2 given Z whose partial correlation is near +-1 for small sigma."""
    if sigma <= 0:
        raise ValueError(f"sigma is a variance and must be positive, got {sigma}")
    rng = make_generator(seed)
    z = rng.standard_normal(n)
    e1, e2 = np.sqrt(sigma) * rng.standard_normal((2, n))
    y1 = -1 + z**2 + e1
    y2 = (-(z**2) + e2) if negative else (-1 + z**2 + e2)
    return SampleSet({"y1": y1, "y2": y2, "z": z}, seed)


def pathology_cpits(sample: SampleSet, sigma: float, negative: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """True conditional probability integral transforms of a pathology sample."""
    z = sample["z"]
    mean2 = -(z**2) if negative else -1 + z**2
    scale = np.sqrt(sigma)
    return special.ndtr((sample["y1"] - (-1 + z**2)) / scale), special.ndtr((sample["y2"] - mean2) / scale)


def cpit_independence_distance(sample: SampleSet, sigma: float, negative: bool = False, grid_size: int = 64) -> float:
    """Sup-distance between the empirical copula of the CPITs and the product copula."""
    v1, v2 = pathology_cpits(sample, sigma, negative)
    return empirical_copula_distance(v1, v2, Product2(), grid_size)
