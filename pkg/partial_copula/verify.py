#!/usr/bin/env python3
"""The numerical check suite behind `partial-copula verify`.

Each check recomputes a closed-form identity, an exact rational or a
statistical property of the partial copula and compares it to its reference.
A check that raises is reported as a failure with the error message.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import dependence as dep
from .bivariate import AMH2, FGM2, Clayton2, Frank2, PolyCE2, Product2, frank_tau_to_theta
from .families import FamilySpec
from .partial import (
    FrankPartial2,
    PartialMode,
    associativity_check,
    conditional_copula,
    kl_divergence,
    l2_projection_bruteforce,
    l2_projection_fgm,
    partial_copula,
)
from .quadrature import DEFAULT_ORDER, QuadratureRule, gauss_rule
from .simulate import cpit, empirical_copula_distance, sample_kendall, sample_trivariate
from .trivariate import Clayton3, FGM3, Frank3, Gauss3, PolyCE3, gaussian_partial_correlation

logger = logging.getLogger(__name__)

UNIT_GRID = np.linspace(0.0, 1.0, 21)
L2_POINTS = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
KL_MARGIN = 1e-4
PATHOLOGY_SIGMAS = (1.0, 0.1, 0.01)
SAMPLE_SIZE = 100_000


@dataclass(frozen=True)
class Check:
    """One verified quantity: computed value, reference label and outcome."""

    name: str
    value: float
    reference: str
    passed: bool
    tolerance: Optional[float] = None
    error: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error is not None:
            return f"{self.name}: raised {self.error} {status}"
        if self.tolerance is None:
            return f"{self.name}: {self.reference} {status}  [value {self.value:.7g}]"
        return f"{self.name}: {self.value:.7g} vs {self.reference} {status}  [tol {self.tolerance:g}]"


def close(name: str, value: float, target: float, reference: str, tol: float) -> Check:
    value = float(value)
    return Check(name, value, reference, bool(np.isfinite(value) and abs(value - target) <= tol), tol)


def above(name: str, value: float, bound: float, reference: str) -> Check:
    value = float(value)
    return Check(name, value, reference, bool(value > bound))


def below(name: str, value: float, bound: float, reference: str) -> Check:
    value = float(value)
    return Check(name, value, reference, bool(value < bound))


_SUITE: List[Callable[[QuadratureRule, int], List[Check]]] = []


def _register(fn):
    _SUITE.append(fn)
    return fn


def _grid():
    return np.meshgrid(UNIT_GRID, UNIT_GRID, indexing="ij")


@_register
def _partial_fgm_is_product(rule, seed):
    u, v = _grid()
    pc = partial_copula(FGM3(1.0), PartialMode.QUADRATURE, rule)
    gap = np.max(np.abs(pc.cdf(u, v) - u * v))
    return [close("partial FGM3(1) by quadrature vs u1*u2 on 21x21 grid", gap, 0.0, "0", 1e-10)]


@_register
def _partial_frank_closed_form(rule, seed):
    u, v = _grid()
    out = []
    for theta in (0.5, 2.0, 8.0):
        cf = conditional_copula(Frank3(theta))
        quad = partial_copula(cf, PartialMode.QUADRATURE, rule).cdf(u, v)
        closed = partial_copula(cf, PartialMode.CLOSED_FORM, rule).cdf(u, v)
        gap = np.max(np.abs(quad - closed))
        out.append(close(f"partial Frank3({theta:g}) closed form vs quadrature", gap, 0.0, "0", 1e-8))
    return out


@_register
def _kendall_counterexample(rule, seed):
    cf = conditional_copula(PolyCE3())
    expected = dep.expected_conditional_measure(cf, "kendall", rule)
    partial = dep.kendall_tau(partial_copula(cf, PartialMode.QUADRATURE, rule), rule)
    return [
        close("kendall expected-conditional PolyCE", expected, 377 / 2700, "377/2700", 1e-7),
        close("kendall partial PolyCE", partial, 251 / 1800, "251/1800", 1e-7),
        above("kendall partial vs expected-conditional PolyCE gap", abs(expected - partial), 1e-5, "> 1e-5"),
    ]


@_register
def _conditional_kendall_curve(rule, seed):
    out = []
    for z in (0.0, 0.25, 0.5, 0.75, 1.0):
        value = dep.kendall_tau(PolyCE2(z), rule)
        target = z**2 / 450 + 5 * z / 18
        out.append(close(f"kendall PolyCE conditional at z={z:g}", value, target, "z^2/450 + 5z/18", 1e-7))
    return out


@_register
def _expected_measures_match(rule, seed):
    out = []
    for cop in (FGM3(1.0), Frank3(2.0), PolyCE3()):
        cf = conditional_copula(cop)
        pc = partial_copula(cf, PartialMode.CLOSED_FORM, rule)
        rho = dep.spearman_rho(pc, rule)
        expected = dep.expected_conditional_measure(cf, "spearman", rule)
        out.append(close(f"spearman partial vs expected-conditional {cop!r}", abs(rho - expected), 0.0, "0", 1e-6))
        for side in ("lower", "upper"):
            tail = dep.tail_coefficient(pc, side)
            expected = dep.expected_conditional_measure(cf, f"tail_{side}", rule)
            out.append(
                close(f"{side} tail partial vs expected-conditional {cop!r}", abs(tail - expected), 0.0, "0", 1e-3)
            )
    return out


def kl_candidates():
    """Alternative copulas the partial Frank copula is compared with."""
    return [
        Product2(),
        FGM2(-0.5),
        FGM2(0.25),
        FGM2(1.0),
        AMH2(0.2),
        AMH2(0.35),
        AMH2(0.85),
        AMH2(0.95),
        Frank2(0.5),
        Frank2(6.0),
        Clayton2(3.0),
    ]


@_register
def _kl_minimality(rule, seed):
    cf = conditional_copula(Frank3(2.0))
    best = kl_divergence(cf, FrankPartial2(2.0), rule)
    others = {repr(c): kl_divergence(cf, c, rule) for c in kl_candidates()}
    closest = min(others, key=others.get)
    logger.info("KL against partial Frank %.6g; closest alternative %s at %.6g", best, closest, others[closest])
    return [
        above(
            f"KL margin of partial Frank3(2) over {len(others)} alternatives (closest {closest})",
            others[closest] - best,
            KL_MARGIN,
            "> 1e-4",
        )
    ]


@_register
def _l2_projection(rule, seed):
    u, v = np.meshgrid(L2_POINTS, L2_POINTS, indexing="ij")
    cf = conditional_copula(FGM3(1.0))
    closed = l2_projection_fgm(1.0, u, v)
    brute = l2_projection_bruteforce(cf, u, v, rule)
    return [
        close(
            "L2 projection FGM3(1) closed form vs conditional expectation",
            np.max(np.abs(closed - brute)),
            0.0,
            "0",
            1e-8,
        ),
        above("L2 projection FGM3(1) distance from partial (product)", np.max(np.abs(closed - u * v)), 1e-4, "> 1e-4"),
    ]


@_register
def _associativity(rule, seed):
    theta = frank_tau_to_theta(0.4)
    result = associativity_check(FrankPartial2(theta), 0.25, 0.5, 0.5)
    return [above("partial-Frank associativity gap at (0.25,0.5,0.5)", result.gap, 1e-6, "> 1e-6")]


@_register
def _pathology(rule, seed):
    out = []
    values = []
    band = 1.63 / np.sqrt(SAMPLE_SIZE) * 1.5
    for sigma in PATHOLOGY_SIGMAS:
        sample = dep.pathology_sample(SAMPLE_SIZE, sigma, seed)
        intercept = np.ones(sample.n)
        values.append(dep.partial_correlation(sample["y1"], sample["y2"], np.column_stack([intercept, sample["z"]])))
        out.append(
            below(
                f"CPIT independence distance, sigma={sigma:g}",
                dep.cpit_independence_distance(sample, sigma),
                band,
                f"< {band:.4g}",
            )
        )
    out.append(above("pathology partial correlation at sigma=0.01", values[-1], 0.95, "> 0.95"))
    out.append(
        above("pathology partial correlation increases as sigma shrinks", float(np.min(np.diff(values))), 0.0, "> 0")
    )
    return out


@_register
def _correlation_profile(rule, seed):
    z = np.linspace(0.0, 10.0, 1001)[1:]
    profile = dep.cond_corr_profile(z)
    inside = float(np.mean((profile >= 0) & (profile <= 1)))
    return [
        close("conditional correlation profile at z=1", dep.cond_corr_profile(1.0), 1.0, "1", 0.0),
        close("share of profile values in [0, 1] on (0, 10]", inside, 1.0, "1", 0.0),
    ]


@_register
def _sampler_pipeline(rule, seed):
    theta = frank_tau_to_theta(0.4)
    spec = FamilySpec.of("Frank3", theta)
    samples = cpit(sample_trivariate(spec, SAMPLE_SIZE, seed), spec)
    band = 2 * 1.36 / np.sqrt(SAMPLE_SIZE)
    distance = empirical_copula_distance(samples["v1"], samples["v3"], FrankPartial2(theta))
    out = [below("CPIT empirical copula vs partial Frank sup-distance", distance, band, f"< {band:.4g}")]
    for a, b in (("u1", "u2"), ("u1", "u3"), ("u2", "u3")):
        out.append(close(f"sample kendall Frank3 ({a},{b})", sample_kendall(samples, a, b), 0.4, "0.4", 0.01))
    return out


@_register
def _tail_equivalence(rule, seed):
    out = []
    z_grid = np.linspace(0.05, 0.95, 10)
    for cop in (Frank3(2.0), FGM3(1.0)):
        cf = conditional_copula(cop)
        pc = partial_copula(cf, PartialMode.CLOSED_FORM, rule)
        worst = max(
            [dep.tail_coefficient(pc, side) for side in ("lower", "upper")]
            + [dep.tail_coefficient(cf.at(z), side) for z in z_grid for side in ("lower", "upper")]
        )
        out.append(below(f"largest partial and conditional tail {cop!r}", worst, 1e-3, "< 1e-3"))

    cf = conditional_copula(Clayton3(2.0))
    pc = partial_copula(cf, PartialMode.QUADRATURE, rule)
    target = 2**-0.5
    out.append(close("lower tail partial Clayton3(2)", dep.tail_coefficient(pc, "lower"), target, "2^-1/2", 1e-3))
    out.append(
        close(
            "lower tail Clayton2(2) by extrapolation",
            dep.tail_coefficient(Clayton2(2.0), "lower", use_closed_form=False),
            target,
            "2^-1/2",
            1e-3,
        )
    )
    gaps = [abs(dep.tail_coefficient(cf.at(z), "lower") - target) for z in z_grid]
    out.append(close("lower tail Clayton3(2) conditional on z grid, largest gap", max(gaps), 0.0, "0", 1e-3))
    return out


@_register
def _gaussian_partial(rule, seed):
    cop = Gauss3(0.5, 0.3, 0.4)
    rho = gaussian_partial_correlation(0.5, 0.3, 0.4)
    pc = partial_copula(cop, PartialMode.QUADRATURE, rule)
    target = 6 / np.pi * np.arcsin(rho / 2)
    value = dep.spearman_rho(pc, rule)
    return [close("spearman partial Gauss3(0.5, 0.3, 0.4)", value, target, "6/pi asin(rho/2)", 1e-5)]


def run_checks(order: int = DEFAULT_ORDER, seed: int = 42) -> List[Check]:
    """Runs the whole suite with a Gauss rule of the given order."""
    rule = gauss_rule(order)
    results = []
    for fn in _SUITE:
        try:
            checks = fn(rule, seed)
        except Exception as e:  # reported as a failed check
            name = fn.__name__.strip("_").replace("_", " ")
            logger.debug("check %s raised", name, exc_info=True)
            checks = [Check(name, float("nan"), "", False, error=f"{type(e).__name__}: {e}")]
        for c in checks:
            logger.info(c.line())
        results.extend(checks)
    return results
