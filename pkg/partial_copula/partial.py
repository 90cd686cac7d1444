#!/usr/bin/env python3
"""Conditional and partial copulas of trivariate models.

The partial copula is the conditional copula averaged over the conditioning
variable, C_p(u1, u2) = E[C(u1, u2 | Z)]. It is available in closed form for
the FGM, Frank and PolyCE models and by quadrature for every model.
"""

from __future__ import annotations
import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy import special, stats

from .bivariate import BivariateCopulaMixin, PolyCE2, Product2
from .errors import DensityUnavailable, NonpositiveDensity, ParameterOutOfRange, UnsupportedFamily
from .families import FamilySpec, make_trivariate
from .quadrature import QuadratureRule, gauss_rule
from .trivariate import Clayton3, FGM3, Frank3, Gauss3, PolyCE3, TrivariateCopulaMixin
from .util import as_floats, check_interior, check_unit, scalar_or_array

DENSITY_FLOOR = 1e-300


class PartialMode(enum.Enum):
    CLOSED_FORM = "closed"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class ConditionalFamily:
    """The map z -> C(., . | z) together with what is known about its average.

    `factory` must accept array-valued z and return a copula whose parameters
    have the shape of z."""

    name: str
    factory: Callable[[np.ndarray], BivariateCopulaMixin]
    simplified: bool = False
    closed_partial: Optional[BivariateCopulaMixin] = None

    def at(self, z) -> BivariateCopulaMixin:
        return self.factory(np.asarray(z, dtype=np.float64))

    def cdf(self, u1, u2, z):
        return self.at(z).cdf(u1, u2)

    def pdf(self, u1, u2, z):
        return self.at(z).pdf(u1, u2)


class FrankPartial2(BivariateCopulaMixin):
    """Closed-form partial copula of the trivariate Frank copula.

    C(u1, u2) = u1 u2 / (theta f) [log(1 - (1 - e^-theta)(1 - f)) + theta]
    with f = u1 + u2 - u1 u2, written as u1 u2 H(q) with q = (1-u1)(1-u2)."""

    def __init__(self, theta: float):
        self.theta = float(theta)

    def name(self) -> str:
        return "FrankPartial2"

    def params(self) -> tuple:
        return (self.theta,)

    def _h_terms(self, u, v):
        u, v = as_floats(u, v)
        theta = self.theta
        f = u + v - u * v
        f = np.where(f > 0, f, 1.0)
        big_a = -np.expm1(-theta)
        n = np.log1p(np.expm1(theta) * f)
        g = np.exp(-theta) + big_a * f
        n1 = -big_a / g
        n2 = -(big_a**2) / g**2
        h0 = n / (theta * f)
        h1 = (n1 * f + n) / (theta * f**2)
        h2 = (n2 * f**2 + 2 * (n1 * f + n)) / (theta * f**3)
        return u, v, h0, h1, h2

    def cdf(self, u, v):
        u, v, h0, _, _ = self._h_terms(u, v)
        return scalar_or_array(u * v * h0)

    def pdf(self, u, v):
        u, v, h0, h1, h2 = self._h_terms(u, v)
        q = (1 - u) * (1 - v)
        return scalar_or_array(h0 - (u + v - 3 * u * v) * h1 + u * v * q * h2)

    def h1(self, u, v):
        u, v, h0, h1, _ = self._h_terms(u, v)
        return scalar_or_array(v * h0 - u * v * (1 - v) * h1)

    def h2(self, u, v):
        u, v, h0, h1, _ = self._h_terms(u, v)
        return scalar_or_array(u * h0 - u * v * (1 - u) * h1)


def conditional_copula(cop: Union[TrivariateCopulaMixin, FamilySpec]) -> ConditionalFamily:
    """Conditional copula of (U1, U3) given U2 for the supported trivariate models."""
    if isinstance(cop, FamilySpec):
        cop = make_trivariate(cop)
    label = f"{cop!r} conditional"
    if isinstance(cop, FGM3):
        return ConditionalFamily(label, cop.conditional_at, closed_partial=Product2())
    if isinstance(cop, Frank3):
        return ConditionalFamily(label, cop.conditional_at, closed_partial=FrankPartial2(cop.theta))
    if isinstance(cop, PolyCE3):
        return ConditionalFamily(label, cop.conditional_at, closed_partial=PolyCE2(0.5))
    if isinstance(cop, (Gauss3, Clayton3)):
        constant = cop.conditional_at(0.5)
        return ConditionalFamily(label, cop.conditional_at, simplified=True, closed_partial=constant)
    raise UnsupportedFamily(f"no conditional copula for {cop!r}")


class PartialCopula(BivariateCopulaMixin):
    """Expected conditional copula, in closed form or averaged with a quadrature rule.

    `mixing` is the law of Z as a frozen scipy.stats distribution; the default is
    uniform on [0, 1]. Quadrature nodes are pushed through its ppf."""

    def __init__(
        self,
        underlying: ConditionalFamily,
        mode: PartialMode = PartialMode.QUADRATURE,
        rule: QuadratureRule = None,
        mixing: Optional[stats.rv_continuous] = None,
    ):
        self.underlying = underlying
        self.mode = PartialMode(mode)
        self.rule = rule if rule is not None else gauss_rule()
        self.mixing = mixing
        if self.mode is PartialMode.CLOSED_FORM:
            if underlying.closed_partial is None:
                raise UnsupportedFamily(f"{underlying.name} has no closed-form partial copula")
            if mixing is not None:
                raise UnsupportedFamily("closed forms assume Z uniform on [0, 1]")

    def name(self) -> str:
        return f"Partial[{self.underlying.name}, {self.mode.value}]"

    def z_nodes(self) -> np.ndarray:
        if self.mixing is None:
            return np.asarray(self.rule.nodes)
        return self.mixing.ppf(self.rule.nodes)

    def _average(self, method: str, u, v):
        u, v = as_floats(u, v)
        z = self.z_nodes().reshape((self.rule.order,) + (1,) * u.ndim)
        values = getattr(self.underlying.at(z), method)(u, v)
        values = np.broadcast_to(values, (self.rule.order,) + u.shape)
        return scalar_or_array(self.rule.average(values))

    @property
    def closed(self) -> bool:
        return self.mode is PartialMode.CLOSED_FORM

    @property
    def has_density(self) -> bool:
        return self.underlying.at(0.5).has_density

    def cdf(self, u, v):
        if self.closed:
            return self.underlying.closed_partial.cdf(u, v)
        return self._average("cdf", u, v)

    def pdf(self, u, v):
        if self.closed:
            return self.underlying.closed_partial.pdf(u, v)
        return self._average("pdf", u, v)

    def h1(self, u, v):
        if self.closed:
            return self.underlying.closed_partial.h1(u, v)
        return self._average("h1", u, v)

    def h2(self, u, v):
        if self.closed:
            return self.underlying.closed_partial.h2(u, v)
        return self._average("h2", u, v)

    def closed_form_measure(self, measure: str) -> Optional[float]:
        if self.closed:
            return self.underlying.closed_partial.closed_form_measure(measure)
        if self.underlying.simplified and self.mixing is None:
            return self.underlying.at(0.5).closed_form_measure(measure)
        return None


def partial_copula(
    source: Union[ConditionalFamily, TrivariateCopulaMixin, FamilySpec],
    mode: Union[PartialMode, str] = PartialMode.QUADRATURE,
    rule: QuadratureRule = None,
    mixing=None,
) -> PartialCopula:
    cf = source if isinstance(source, ConditionalFamily) else conditional_copula(source)
    return PartialCopula(cf, PartialMode(mode), rule=rule, mixing=mixing)


def partial_cdf(pc: PartialCopula, u1, u2):
    check_unit("partial_cdf", u1, u2)
    return pc.cdf(u1, u2)


def partial_pdf(pc: PartialCopula, u1, u2):
    check_interior("partial_pdf", u1, u2)
    return pc.pdf(u1, u2)


def partial_h1(pc: PartialCopula, u1, u2):
    check_unit("partial_h1", u1, u2)
    return pc.h1(u1, u2)


def partial_h2(pc: PartialCopula, u1, u2):
    check_unit("partial_h2", u1, u2)
    return pc.h2(u1, u2)


def l2_projection_bruteforce(cf: ConditionalFamily, u1, u2, rule: QuadratureRule = None):
    """E[C(u1, u2 | Z) | U1 = u1, U2 = u2] for the CPIT pair (U1, U2).

    The conditional density of Z given the CPITs is c(u1, u2 | z) divided by its
    integral over z, assembled with the same rule."""
    check_unit("l2_projection_bruteforce", u1, u2)
    rule = rule if rule is not None else gauss_rule()
    u1, u2 = as_floats(u1, u2)
    shape = (rule.order,) + u1.shape
    z = np.asarray(rule.nodes).reshape((rule.order,) + (1,) * u1.ndim)
    cond = cf.at(z)
    try:
        density = np.broadcast_to(cond.pdf(u1, u2), shape)
    except DensityUnavailable as e:
        raise UnsupportedFamily(f"{cf.name} has no conditional density") from e
    values = np.broadcast_to(cond.cdf(u1, u2), shape)
    return scalar_or_array(rule.average(values * density) / rule.average(density))


def l2_projection_fgm(theta: float, u1, u2):
    """Closed form of the L2-optimal approximation for the trivariate FGM model."""
    if abs(theta) > 1:
        raise ParameterOutOfRange("FGM3", "|theta| <= 1", f"theta={theta}")
    u1, u2 = as_floats(u1, u2)
    bracket = (
        4 * u1**2 * u2**2
        - 6 * (u1**2 * u2 + u1 * u2**2)
        + 2 * (u1**2 + u2**2)
        + 9 * u1 * u2
        - 3 * (u1 + u2)
        + 1
    )
    return scalar_or_array(u1 * u2 * (1 + theta**2 * bracket / 3))


def kl_divergence(cf: ConditionalFamily, candidate: BivariateCopulaMixin, rule: QuadratureRule = None) -> float:
    """Expected KL divergence of `candidate` from the conditional copula, Z uniform.

    Integrates c(u1, u2 | z) log(c(u1, u2 | z) / candidate(u1, u2)) over the unit cube."""
    rule = rule if rule is not None else gauss_rule()
    u, v, w = rule.tensor()
    cand = np.broadcast_to(candidate.pdf(u, v), u.shape)
    if not np.all(cand > DENSITY_FLOOR):
        raise NonpositiveDensity(f"{candidate!r} density falls below {DENSITY_FLOOR:g} on the grid")
    z = np.asarray(rule.nodes).reshape(-1, 1, 1)
    cond = np.broadcast_to(cf.at(z).pdf(u, v), (rule.order,) + u.shape)
    per_slice = np.sum(w * special.rel_entr(cond, cand), axis=(1, 2))
    return float(np.dot(rule.weights, per_slice))


class AssociativityResult(NamedTuple):
    lhs: float
    rhs: float
    gap: float


def associativity_check(pc: BivariateCopulaMixin, a: float, b: float, c: float) -> AssociativityResult:
    """Compares C(C(a, b), c) with C(a, C(b, c)); Archimedean copulas have gap 0."""
    lhs = float(pc.cdf(pc.cdf(a, b), c))
    rhs = float(pc.cdf(a, pc.cdf(b, c)))
    return AssociativityResult(lhs, rhs, abs(lhs - rhs))


def normal_scale_density(cop: BivariateCopulaMixin, x1, x2):
    """Density of (Phi^-1(U1), Phi^-1(U2)) for (U1, U2) distributed as `cop`."""
    x1, x2 = as_floats(x1, x2)
    u1, u2 = special.ndtr(x1), special.ndtr(x2)
    return scalar_or_array(cop.pdf(u1, u2) * stats.norm.pdf(x1) * stats.norm.pdf(x2))


def normal_scale_grid(cop: BivariateCopulaMixin, resolution: int, limit: float = 3.0):
    """Equally spaced axis on [-limit, limit] and the normal-scale density on its square grid.

    Rows index x1, columns x2."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    if limit <= 0:
        raise ValueError(f"limit must be positive, got {limit}")
    axis = np.linspace(-limit, limit, resolution)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return axis, np.broadcast_to(normal_scale_density(cop, x1, x2), x1.shape)
