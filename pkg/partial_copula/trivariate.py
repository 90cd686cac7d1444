#!/usr/bin/env python3
"""Trivariate copulas built from two margins and a conditional copula.

The conditioning variable is always the middle argument: a model is given by the
copula of (U1, U2), the copula of (U3, U2) and the copula of (U1, U3) given
U2 = z. The density factorises as

    c(u1, u2, u3) = c12(u1, u2) c32(u3, u2) c13|2(h(u1|u2), h(u3|u2); u2)

and the cdf is the integral over t < u2 of the conditional copula evaluated at
the two h-functions.
"""

from __future__ import annotations
import abc

import numpy as np

from .bivariate import (
    AMH2,
    BivariateCopulaMixin,
    Clayton2,
    FGM2,
    Frank2,
    Gauss2,
    PolyCE2,
    Product2,
    _require,
)
from .quadrature import QuadratureRule, gauss_rule
from .util import as_floats, check_interior, check_unit, scalar_or_array

CONDITIONINGS = ("1|2", "3|2")


def _log1mexp(x):
    """log(1 - exp(-x)) for x >= 0, switching branches at log 2."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.where(x < np.log(2.0), np.log(-np.expm1(-x)), np.log1p(-np.exp(-x)))


def gaussian_partial_correlation(rho12: float, rho13: float, rho23: float) -> float:
    """Partial correlation of variables 1 and 3 given variable 2 for a Gaussian vector."""
    return (rho13 - rho12 * rho23) / np.sqrt((1 - rho12**2) * (1 - rho23**2))


class TrivariateCopulaMixin(abc.ABC):
    """Mixin for trivariate copulas with the conditioning variable in the middle."""

    #: True when the conditional copula does not depend on the conditioning value.
    simplified = False

    def __init__(self, rule: QuadratureRule = None):
        self.rule = rule if rule is not None else gauss_rule()

    @abc.abstractmethod
    def name(self) -> str:
        raise NotImplementedError("Subclasses must define a name")

    @abc.abstractmethod
    def margin12(self) -> BivariateCopulaMixin:
        """Copula of (U1, U2)."""
        raise NotImplementedError("Subclasses must implement method margin12")

    @abc.abstractmethod
    def margin32(self) -> BivariateCopulaMixin:
        """Copula of (U3, U2)."""
        raise NotImplementedError("Subclasses must implement method margin32")

    @abc.abstractmethod
    def conditional_at(self, z) -> BivariateCopulaMixin:
        """Copula of (U1, U3) given U2 = z. Array z gives array parameters."""
        raise NotImplementedError("Subclasses must implement method conditional_at")

    def params(self) -> tuple:
        return ()

    def _margin(self, which: str) -> BivariateCopulaMixin:
        if which == "1|2":
            return self.margin12()
        if which == "3|2":
            return self.margin32()
        raise ValueError(f"conditioning must be one of {CONDITIONINGS}, got {which!r}")

    def hfunc(self, which: str, u, given):
        """Conditional cdf of U1 (or U3) given U2 = given."""
        return self._margin(which).h2(u, given)

    def hfunc_inv(self, which: str, p, given):
        return self._margin(which).h2_inv(p, given)

    def cdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        t, w = self.rule.on_interval(0.0, u2)
        cond = self.conditional_at(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inner = cond.cdf(self.margin12().h2(u1, t), self.margin32().h2(u3, t))
        value = np.sum(w * np.nan_to_num(inner), axis=0)
        value = np.where(u3 == 1, self.margin12().cdf(u1, u2), value)
        value = np.where(u1 == 1, self.margin32().cdf(u3, u2), value)
        value = np.where((u1 == 0) | (u2 == 0) | (u3 == 0), 0.0, value)
        return scalar_or_array(value)

    def pdf3(self, u1, u2, u3):
        m12, m32 = self.margin12(), self.margin32()
        cond = self.conditional_at(u2)
        return (
            m12.pdf(u1, u2)
            * m32.pdf(u3, u2)
            * cond.pdf(m12.h2(u1, u2), m32.h2(u3, u2))
        )

    def __repr__(self) -> str:
        args = ", ".join(f"{p:g}" for p in self.params())
        return f"{self.name()}({args})"


class FGM3(TrivariateCopulaMixin):
    """prod(u) + theta prod(u(1-u)), |theta| <= 1. All bivariate margins are independent."""

    def __init__(self, theta: float, rule: QuadratureRule = None):
        super().__init__(rule)
        self.theta = float(theta)
        _require("FGM3", abs(self.theta) <= 1, "|theta| <= 1", f"theta={theta}")

    def name(self) -> str:
        return "FGM3"

    def params(self) -> tuple:
        return (self.theta,)

    def margin12(self) -> BivariateCopulaMixin:
        return Product2()

    def margin32(self) -> BivariateCopulaMixin:
        return Product2()

    def conditional_at(self, z) -> BivariateCopulaMixin:
        return FGM2(self.theta * (1 - 2 * np.asarray(z, dtype=np.float64)))

    def cdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        prod = u1 * u2 * u3
        return scalar_or_array(prod + self.theta * prod * (1 - u1) * (1 - u2) * (1 - u3))

    def pdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        return scalar_or_array(1 + self.theta * (1 - 2 * u1) * (1 - 2 * u2) * (1 - 2 * u3))


class Frank3(TrivariateCopulaMixin):
    """Exchangeable Frank copula, theta > 0.

    Its bivariate margins are Frank(theta) and its conditional copula given
    U2 = z is AMH with gamma = 1 - exp(-theta z)."""

    def __init__(self, theta: float, rule: QuadratureRule = None):
        super().__init__(rule)
        self.theta = float(theta)
        _require("Frank3", self.theta > 0 and np.isfinite(self.theta), "theta > 0", f"theta={theta}")

    def name(self) -> str:
        return "Frank3"

    def params(self) -> tuple:
        return (self.theta,)

    def margin12(self) -> BivariateCopulaMixin:
        return Frank2(self.theta)

    def margin32(self) -> BivariateCopulaMixin:
        return Frank2(self.theta)

    def conditional_at(self, z) -> BivariateCopulaMixin:
        # gamma < 1 for finite theta z, but 1 - exp(-theta z) rounds to 1 once theta z passes about 37
        gamma = -np.expm1(-self.theta * np.asarray(z, dtype=np.float64))
        return AMH2(np.minimum(gamma, np.nextafter(1.0, 0.0)))

    def _log_ratio(self, u1, u2, u3):
        # log of a(u1) a(u2) a(u3) / a(1)^2 with a(x) = 1 - exp(-theta x)
        t = self.theta
        return _log1mexp(t * u1) + _log1mexp(t * u2) + _log1mexp(t * u3) - 2 * _log1mexp(t)

    def cdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        with np.errstate(divide="ignore"):
            return scalar_or_array(-np.log(-np.expm1(self._log_ratio(u1, u2, u3))) / self.theta)

    def pdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        log_ap = self._log_ratio(u1, u2, u3)
        big_a = -np.expm1(-self.theta)
        scale = self.theta**2 * np.exp(-self.theta * (u1 + u2 + u3)) / big_a**2
        return scalar_or_array(scale * (1 + np.exp(log_ap)) / (-np.expm1(log_ap)) ** 3)


class Gauss3(TrivariateCopulaMixin):
    """Gaussian copula with correlations (rho12, rho13, rho23). Simplified."""

    simplified = True

    def __init__(self, rho12: float, rho13: float, rho23: float, rule: QuadratureRule = None):
        super().__init__(rule)
        self.rho12, self.rho13, self.rho23 = float(rho12), float(rho13), float(rho23)
        corr = np.array(
            [[1, self.rho12, self.rho13], [self.rho12, 1, self.rho23], [self.rho13, self.rho23, 1]]
        )
        detail = f"rho=({rho12}, {rho13}, {rho23})"
        _require("Gauss3", np.all(np.abs(corr[np.triu_indices(3, 1)]) < 1), "|rho_ij| < 1", detail)
        _require("Gauss3", np.linalg.eigvalsh(corr).min() > 0, "positive-definite correlation matrix", detail)

    def name(self) -> str:
        return "Gauss3"

    def params(self) -> tuple:
        return (self.rho12, self.rho13, self.rho23)

    def partial_rho(self) -> float:
        return gaussian_partial_correlation(self.rho12, self.rho13, self.rho23)

    def margin12(self) -> BivariateCopulaMixin:
        return Gauss2(self.rho12)

    def margin32(self) -> BivariateCopulaMixin:
        return Gauss2(self.rho23)

    def conditional_at(self, z) -> BivariateCopulaMixin:
        return Gauss2(self.partial_rho())


class Clayton3(TrivariateCopulaMixin):
    """Pair-copula construction with Clayton(theta) for both margins and the
    conditional copula, theta > 0. Simplified, so its partial copula is Clayton(theta)."""

    simplified = True

    def __init__(self, theta: float, rule: QuadratureRule = None):
        super().__init__(rule)
        self.theta = float(theta)
        _require("Clayton3", self.theta > 0, "theta > 0", f"theta={theta}")

    def name(self) -> str:
        return "Clayton3"

    def params(self) -> tuple:
        return (self.theta,)

    def margin12(self) -> BivariateCopulaMixin:
        return Clayton2(self.theta)

    def margin32(self) -> BivariateCopulaMixin:
        return Clayton2(self.theta)

    def conditional_at(self, z) -> BivariateCopulaMixin:
        return Clayton2(self.theta)


class PolyCE3(TrivariateCopulaMixin):
    """U2 uniform and independent of U1 and U3; (U1, U3) given U2 = z is PolyCE2(z)."""

    def name(self) -> str:
        return "PolyCE"

    def margin12(self) -> BivariateCopulaMixin:
        return Product2()

    def margin32(self) -> BivariateCopulaMixin:
        return Product2()

    def conditional_at(self, z) -> BivariateCopulaMixin:
        return PolyCE2(z)

    def cdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        return scalar_or_array(u1 * u2 * u3 + u2**2 / 2 * PolyCE2.perturbation(u1, u3))

    def pdf3(self, u1, u2, u3):
        u1, u2, u3 = as_floats(u1, u2, u3)
        return scalar_or_array(1 + u2 * PolyCE2.perturbation_density(u1, u3))


def cdf3(cop: TrivariateCopulaMixin, u1, u2, u3):
    """C(u1, u2, u3) for arguments in the closed unit cube."""
    check_unit("cdf3", u1, u2, u3)
    return cop.cdf3(u1, u2, u3)


def pdf3(cop: TrivariateCopulaMixin, u1, u2, u3):
    """Density on the open unit cube; raises EvaluationAtBoundary on its boundary."""
    check_interior("pdf3", u1, u2, u3)
    return cop.pdf3(u1, u2, u3)


def hfunc(cop: TrivariateCopulaMixin, which: str, u, given):
    """F(u | given) for which in {"1|2", "3|2"}."""
    check_unit("hfunc", u)
    check_interior("hfunc conditioning value", given)
    return cop.hfunc(which, u, given)


def hfunc_inv(cop: TrivariateCopulaMixin, which: str, p, given):
    check_unit("hfunc_inv", p)
    check_interior("hfunc_inv conditioning value", given)
    return cop.hfunc_inv(which, p, given)
