#!/usr/bin/env python3
"""Defines a common interface to bivariate copulas and the families built on it."""

from __future__ import annotations
import abc
from typing import List, Optional

import numpy as np
from scipy import integrate, optimize, special

from .errors import DensityUnavailable, ParameterOutOfRange
from .util import as_floats, bisect_increasing, scalar_or_array

MEASURES = ("spearman", "kendall", "tail_lower", "tail_upper")


def _require(family: str, ok, constraint: str, detail: str) -> None:
    if not np.all(ok):
        raise ParameterOutOfRange(family, constraint, detail)


class BivariateCopulaMixin(abc.ABC):
    """Mixin for bivariate copulas: cdf, density and the two h-functions.

    h1(u, v) is the derivative of the cdf in u, i.e. the conditional cdf of V
    given U = u evaluated at v. h2(u, v) is the derivative in v. Parameters may
    be arrays; they broadcast against the arguments."""

    @abc.abstractmethod
    def name(self) -> str:
        """The name of the family."""
        raise NotImplementedError("Subclasses must define a name")

    @abc.abstractmethod
    def cdf(self, u, v):
        raise NotImplementedError("Subclasses must implement method cdf")

    @abc.abstractmethod
    def pdf(self, u, v):
        raise NotImplementedError("Subclasses must implement method pdf")

    @abc.abstractmethod
    def h1(self, u, v):
        raise NotImplementedError("Subclasses must implement method h1")

    @abc.abstractmethod
    def h2(self, u, v):
        raise NotImplementedError("Subclasses must implement method h2")

    def params(self) -> tuple:
        return ()

    def _param_arrays(self) -> List[np.ndarray]:
        return [np.asarray(p) for p in self.params()]

    @property
    def has_density(self) -> bool:
        return True

    def h1_inv(self, p, u):
        """Returns v with h1(u, v) = p, by bisection unless a subclass knows better."""
        p, u = as_floats(p, u)
        shape = np.broadcast(p, u, *self._param_arrays()).shape
        p, u = np.broadcast_to(p, shape), np.broadcast_to(u, shape)
        return scalar_or_array(bisect_increasing(lambda v: self.h1(u, v), p))

    def h2_inv(self, p, v):
        """Returns u with h2(u, v) = p."""
        p, v = as_floats(p, v)
        shape = np.broadcast(p, v, *self._param_arrays()).shape
        p, v = np.broadcast_to(p, shape), np.broadcast_to(v, shape)
        return scalar_or_array(bisect_increasing(lambda u: self.h2(u, v), p))

    def closed_form_measure(self, measure: str) -> Optional[float]:
        """Classical closed form for one of MEASURES, or None if the family has none."""
        return None

    def __call__(self, u, v):
        return self.cdf(u, v)

    def __repr__(self) -> str:
        args = ", ".join(f"{float(np.mean(p)):g}" if np.ndim(p) == 0 else "array" for p in self.params())
        return f"{self.name()}({args})"


class Product2(BivariateCopulaMixin):
    """Independence copula."""

    def name(self) -> str:
        return "Product2"

    def cdf(self, u, v):
        return np.multiply(u, v)

    def pdf(self, u, v):
        u, v = as_floats(u, v)
        return scalar_or_array(np.ones_like(u))

    def h1(self, u, v):
        u, v = as_floats(u, v)
        return scalar_or_array(v.copy())

    def h2(self, u, v):
        u, v = as_floats(u, v)
        return scalar_or_array(u.copy())

    def h1_inv(self, p, u):
        p, u = as_floats(p, u)
        return scalar_or_array(p.copy())

    def h2_inv(self, p, v):
        p, v = as_floats(p, v)
        return scalar_or_array(p.copy())

    def closed_form_measure(self, measure: str) -> Optional[float]:
        return 0.0


class Comonotone2(BivariateCopulaMixin):
    """Upper Frechet bound M(u, v) = min(u, v). Has no density."""

    def name(self) -> str:
        return "Comonotone2"

    @property
    def has_density(self) -> bool:
        return False

    def cdf(self, u, v):
        return np.minimum(u, v)

    def pdf(self, u, v):
        raise DensityUnavailable("the comonotone copula is singular")

    def h1(self, u, v):
        u, v = as_floats(u, v)
        return scalar_or_array((v >= u).astype(np.float64))

    def h2(self, u, v):
        u, v = as_floats(u, v)
        return scalar_or_array((u >= v).astype(np.float64))

    def h1_inv(self, p, u):
        p, u = as_floats(p, u)
        return scalar_or_array(u.copy())

    def h2_inv(self, p, v):
        p, v = as_floats(p, v)
        return scalar_or_array(v.copy())

    def closed_form_measure(self, measure: str) -> Optional[float]:
        return 1.0


class FGM2(BivariateCopulaMixin):
    """Farlie-Gumbel-Morgenstern copula uv(1 + theta(1-u)(1-v)), |theta| <= 1."""

    def __init__(self, theta):
        self.theta = np.asarray(theta, dtype=np.float64)
        _require("FGM2", np.abs(self.theta) <= 1, "|theta| <= 1", f"theta={theta}")

    def name(self) -> str:
        return "FGM2"

    def params(self) -> tuple:
        return (self.theta,)

    def cdf(self, u, v):
        return u * v * (1 + self.theta * (1 - u) * (1 - v))

    def pdf(self, u, v):
        return 1 + self.theta * (1 - 2 * np.asarray(u)) * (1 - 2 * np.asarray(v))

    def h1(self, u, v):
        return v + self.theta * (1 - 2 * np.asarray(u)) * v * (1 - np.asarray(v))

    def h2(self, u, v):
        return u + self.theta * u * (1 - np.asarray(u)) * (1 - 2 * np.asarray(v))

    @staticmethod
    def _solve(p, a):
        # smaller root of a x^2 - (1 + a) x + p = 0, written without dividing by a
        disc = np.sqrt(np.maximum((1 + a) ** 2 - 4 * a * p, 0.0))
        denom = (1 + a) + disc
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(denom > 0, 2 * p / denom, 0.0)
        return np.clip(x, 0.0, 1.0)

    def h1_inv(self, p, u):
        p, u = as_floats(p, u)
        return scalar_or_array(self._solve(p, self.theta * (1 - 2 * u)))

    def h2_inv(self, p, v):
        p, v = as_floats(p, v)
        return scalar_or_array(self._solve(p, self.theta * (1 - 2 * v)))

    def closed_form_measure(self, measure: str) -> Optional[float]:
        theta = float(self.theta)
        return {
            "spearman": theta / 3,
            "kendall": 2 * theta / 9,
            "tail_lower": 0.0,
            "tail_upper": 0.0,
        }[measure]


class AMH2(BivariateCopulaMixin):
    """Ali-Mikhail-Haq copula uv / (1 - gamma(1-u)(1-v)), gamma in [0, 1)."""

    def __init__(self, gamma):
        self.gamma = np.asarray(gamma, dtype=np.float64)
        _require("AMH2", (self.gamma >= 0) & (self.gamma < 1), "0 <= gamma < 1", f"gamma={gamma}")

    def name(self) -> str:
        return "AMH2"

    def params(self) -> tuple:
        return (self.gamma,)

    def _denom(self, u, v):
        return 1 - self.gamma * (1 - np.asarray(u)) * (1 - np.asarray(v))

    def cdf(self, u, v):
        return u * v / self._denom(u, v)

    def pdf(self, u, v):
        u, v = np.asarray(u), np.asarray(v)
        g = self.gamma
        num = 1 + g * ((1 + u) * (1 + v) - 3) + g**2 * (1 - u) * (1 - v)
        return num / self._denom(u, v) ** 3

    def h1(self, u, v):
        v = np.asarray(v)
        return v * (1 - self.gamma * (1 - v)) / self._denom(u, v) ** 2

    def h2(self, u, v):
        u = np.asarray(u)
        return u * (1 - self.gamma * (1 - u)) / self._denom(u, v) ** 2

    def closed_form_measure(self, measure: str) -> Optional[float]:
        g = float(self.gamma)
        if measure == "kendall":
            if g == 0:
                return 0.0
            return 1 - 2 * (g + (1 - g) ** 2 * np.log1p(-g)) / (3 * g**2)
        if measure in ("tail_lower", "tail_upper"):
            return 0.0
        return None


def frank_tau(theta: float) -> float:
    """Kendall's tau of the bivariate Frank copula, 1 - 4/theta (1 - D1(theta)).

    D1 is the first Debye function."""
    theta = float(theta)
    if abs(theta) < 1e-4:
        return theta / 9 - theta**3 / 900

    def integrand(t):
        return t / np.expm1(t) if t != 0 else 1.0

    area, _ = integrate.quad(integrand, 0.0, theta, epsabs=1e-14, epsrel=1e-13, limit=200)
    debye1 = area / theta
    return 1 - 4 / theta * (1 - debye1)


def frank_tau_to_theta(tau: float) -> float:
    """Frank parameter whose Kendall's tau equals `tau`, for tau in (0, 1)."""
    if not 0 < tau < 1:
        raise ParameterOutOfRange("Frank2", "0 < tau < 1", f"tau={tau}")
    lo = 1e-4
    if tau <= frank_tau(lo):
        # tau ~ theta / 9 this close to independence
        return 9 * tau
    hi = 1.0
    while frank_tau(hi) < tau:
        hi *= 2
        if hi > 1e8:
            raise ParameterOutOfRange("Frank2", "tau must be representable", f"tau={tau}")
    return optimize.brentq(lambda t: frank_tau(t) - tau, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=500)


class Frank2(BivariateCopulaMixin):
    """Frank copula, theta != 0, evaluated through expm1."""

    def __init__(self, theta):
        self.theta = np.asarray(theta, dtype=np.float64)
        _require("Frank2", (self.theta != 0) & np.isfinite(self.theta), "theta != 0", f"theta={theta}")

    def name(self) -> str:
        return "Frank2"

    def params(self) -> tuple:
        return (self.theta,)

    def _a(self, x):
        # 1 - alpha^x with alpha = exp(-theta)
        return -np.expm1(-self.theta * np.asarray(x))

    def _gap(self, u, v):
        # A - a(u) a(v) = e^(-theta u) a(v) + e^(-theta) expm1(theta (1 - v)), both terms of one sign
        t = self.theta
        return np.exp(-t * np.asarray(u)) * self._a(v) + np.exp(-t) * np.expm1(t * (1 - np.asarray(v)))

    def cdf(self, u, v):
        with np.errstate(divide="ignore"):
            return -np.log(self._gap(u, v) / self._a(1.0)) / self.theta

    def pdf(self, u, v):
        big_a = self._a(1.0)
        return self.theta * big_a * np.exp(-self.theta * (np.asarray(u) + np.asarray(v))) / self._gap(u, v) ** 2

    def h1(self, u, v):
        return self._a(v) * np.exp(-self.theta * np.asarray(u)) / self._gap(u, v)

    def h2(self, u, v):
        return self._a(u) * np.exp(-self.theta * np.asarray(v)) / self._gap(u, v)

    def _invert(self, p, given):
        decay = np.exp(-self.theta * given)
        ratio = (decay * (1 - p) + p * np.exp(-self.theta)) / (decay + p * self._a(given))
        with np.errstate(divide="ignore"):
            return np.clip(-np.log(ratio) / self.theta, 0.0, 1.0)

    def h1_inv(self, p, u):
        p, u = as_floats(p, u)
        return scalar_or_array(self._invert(p, u))

    def h2_inv(self, p, v):
        p, v = as_floats(p, v)
        return scalar_or_array(self._invert(p, v))

    def closed_form_measure(self, measure: str) -> Optional[float]:
        if measure == "kendall":
            return frank_tau(float(self.theta))
        if measure in ("tail_lower", "tail_upper"):
            return 0.0
        return None


class Clayton2(BivariateCopulaMixin):
    """Clayton copula (u^-theta + v^-theta - 1)^(-1/theta), theta > 0."""

    def __init__(self, theta):
        self.theta = np.asarray(theta, dtype=np.float64)
        _require("Clayton2", self.theta > 0, "theta > 0", f"theta={theta}")

    def name(self) -> str:
        return "Clayton2"

    def params(self) -> tuple:
        return (self.theta,)

    def _s(self, u, v):
        return np.power(u, -self.theta) + np.power(v, -self.theta) - 1

    def cdf(self, u, v):
        u, v = as_floats(u, v)
        with np.errstate(divide="ignore", over="ignore"):
            return scalar_or_array(np.power(self._s(u, v), -1 / self.theta))

    def pdf(self, u, v):
        t = self.theta
        return (1 + t) * np.power(np.multiply(u, v), -t - 1) * np.power(self._s(u, v), -1 / t - 2)

    def h1(self, u, v):
        t = self.theta
        return np.power(u, -t - 1) * np.power(self._s(u, v), -1 / t - 1)

    def h2(self, u, v):
        t = self.theta
        return np.power(v, -t - 1) * np.power(self._s(u, v), -1 / t - 1)

    def _invert(self, p, given):
        t = self.theta
        inner = np.power(p * np.power(given, t + 1), -t / (1 + t)) - np.power(given, -t) + 1
        with np.errstate(divide="ignore", over="ignore"):
            return np.clip(np.power(inner, -1 / t), 0.0, 1.0)

    def h1_inv(self, p, u):
        p, u = as_floats(p, u)
        return scalar_or_array(self._invert(p, u))

    def h2_inv(self, p, v):
        p, v = as_floats(p, v)
        return scalar_or_array(self._invert(p, v))

    def closed_form_measure(self, measure: str) -> Optional[float]:
        t = float(self.theta)
        return {
            "spearman": None,
            "kendall": t / (t + 2),
            "tail_lower": 2 ** (-1 / t),
            "tail_upper": 0.0,
        }[measure]


class Gauss2(BivariateCopulaMixin):
    """Gaussian copula with correlation rho, |rho| < 1."""

    def __init__(self, rho):
        self.rho = np.asarray(rho, dtype=np.float64)
        _require("Gauss2", np.abs(self.rho) < 1, "|rho| < 1", f"rho={rho}")
        self._scale = np.sqrt(1 - self.rho**2)

    def name(self) -> str:
        return "Gauss2"

    def params(self) -> tuple:
        return (self.rho,)

    def _owen_term(self, h, k):
        # T(h, (k - rho h) / (h scale)) with h = 0 read as the limit from above
        r, s = self.rho, self._scale
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.where(h == 0, (1 - r) / s, (k - r * h) / (h * s))
        value = special.owens_t(h, a)
        return np.where((h == 0) & (k != 0), 0.25 * np.sign(k), value)

    def cdf(self, u, v):
        u, v = as_floats(u, v)
        x = special.ndtri(np.clip(u, 1e-300, 1 - 1e-16))
        y = special.ndtri(np.clip(v, 1e-300, 1 - 1e-16))
        # Owen's reduction of the bivariate normal cdf to two T-functions
        xy = x * y
        beta = np.where((xy < 0) | ((xy == 0) & (x + y < 0)), 0.5, 0.0)
        value = 0.5 * (special.ndtr(x) + special.ndtr(y)) - self._owen_term(x, y) - self._owen_term(y, x) - beta
        value = np.where((u == 0) | (v == 0), 0.0, value)
        value = np.where(u == 1, v, value)
        value = np.where(v == 1, u, value)
        return scalar_or_array(np.clip(value, 0.0, 1.0))

    def pdf(self, u, v):
        x, y = special.ndtri(u), special.ndtri(v)
        r = self.rho
        expo = -(r**2 * (x**2 + y**2) - 2 * r * x * y) / (2 * (1 - r**2))
        return np.exp(expo) / self._scale

    def h1(self, u, v):
        x, y = special.ndtri(u), special.ndtri(v)
        return special.ndtr((y - self.rho * x) / self._scale)

    def h2(self, u, v):
        x, y = special.ndtri(u), special.ndtri(v)
        return special.ndtr((x - self.rho * y) / self._scale)

    def h1_inv(self, p, u):
        return special.ndtr(self._scale * special.ndtri(p) + self.rho * special.ndtri(u))

    def h2_inv(self, p, v):
        return special.ndtr(self._scale * special.ndtri(p) + self.rho * special.ndtri(v))

    def closed_form_measure(self, measure: str) -> Optional[float]:
        r = float(self.rho)
        return {
            "spearman": 6 / np.pi * np.arcsin(r / 2),
            "kendall": 2 / np.pi * np.arcsin(r),
            "tail_lower": 0.0,
            "tail_upper": 0.0,
        }[measure]


class PolyCE2(BivariateCopulaMixin):
    """Cubic perturbation of independence, uv + z uv(1-u)(1-v)(1+uv), z in [-1/2, 1].

    With z uniform on [0, 1] this is the conditional copula of PolyCE3; z = 1/2
    gives its partial copula."""

    def __init__(self, z):
        self.z = np.asarray(z, dtype=np.float64)
        _require("PolyCE2", (self.z >= -0.5) & (self.z <= 1), "-1/2 <= z <= 1", f"z={z}")

    def name(self) -> str:
        return "PolyCE2"

    def params(self) -> tuple:
        return (self.z,)

    @staticmethod
    def perturbation(u, v):
        u, v = np.asarray(u), np.asarray(v)
        return u * v * (1 - u) * (1 - v) * (1 + u * v)

    @staticmethod
    def perturbation_density(u, v):
        u, v = np.asarray(u), np.asarray(v)
        return (1 - 2 * u) * (1 - 2 * v) + (2 * u - 3 * u**2) * (2 * v - 3 * v**2)

    def cdf(self, u, v):
        return np.multiply(u, v) + self.z * self.perturbation(u, v)

    def pdf(self, u, v):
        return 1 + self.z * self.perturbation_density(u, v)

    def h1(self, u, v):
        u, v = np.asarray(u), np.asarray(v)
        return v + self.z * v * (1 - v) * (1 - 2 * u + 2 * u * v - 3 * u**2 * v)

    def h2(self, u, v):
        u, v = np.asarray(u), np.asarray(v)
        return u + self.z * u * (1 - u) * (1 - 2 * v + 2 * u * v - 3 * u * v**2)

    def closed_form_measure(self, measure: str) -> Optional[float]:
        if measure in ("tail_lower", "tail_upper"):
            return 0.0
        return None
