#!/usr/bin/env python3
"""General utilities: argument checks, vectorised root finding, difference oracles."""

from typing import Callable, Sequence
import numpy as np

from .errors import EvaluationAtBoundary, RootNotBracketed

ROOT_TOLERANCE = 1e-12
MAX_BISECTIONS = 200


def as_floats(*xs):
    """Broadcasts the arguments to float64 arrays of a common shape."""
    return np.broadcast_arrays(*[np.asarray(x, dtype=np.float64) for x in xs])


def scalar_or_array(x):
    """Unwraps 0-d arrays so scalar inputs give scalar outputs."""
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def check_interior(what: str, *values) -> None:
    """Raises EvaluationAtBoundary unless every value lies in the open unit interval."""
    for x in values:
        x = np.asarray(x)
        if np.any((x <= 0.0) | (x >= 1.0)):
            raise EvaluationAtBoundary(f"{what} is only defined on the open unit interval")


def check_unit(what: str, *values) -> None:
    for x in values:
        x = np.asarray(x)
        if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
            raise ValueError(f"{what} expects arguments in [0, 1]")


def bisect_increasing(
    fn: Callable[[np.ndarray], np.ndarray],
    target,
    lo=0.0,
    hi=1.0,
    tol: float = ROOT_TOLERANCE,
) -> np.ndarray:
    """Solves fn(x) = target elementwise for a nondecreasing fn on [lo, hi].

    All elements are bisected together; fn must accept and return arrays of the
    broadcast shape of target, lo and hi."""
    target, lo, hi = as_floats(target, lo, hi)
    lo = lo.copy()
    hi = hi.copy()
    slack = 1e-12
    if np.any(fn(lo) > target + slack) or np.any(fn(hi) < target - slack):
        raise RootNotBracketed("target lies outside the range of the function on the bracket")

    for _ in range(MAX_BISECTIONS):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def central_difference(fn: Callable[..., np.ndarray], point: Sequence[float], axis: int, h: float = 1e-6):
    """First partial derivative of fn along one axis by central differences."""
    up = list(point)
    down = list(point)
    up[axis] += h
    down[axis] -= h
    return (fn(*up) - fn(*down)) / (2 * h)


def mixed_difference(fn: Callable[..., np.ndarray], point: Sequence[float], h: float = 1e-3):
    """Mixed partial derivative over every argument of fn by central differences.

    Used only as a test oracle for analytic densities."""
    point = np.asarray(point, dtype=np.float64)
    d = len(point)
    total = 0.0
    for corner in np.ndindex(*(2,) * d):
        signs = np.where(np.array(corner) == 1, 1.0, -1.0)
        total += np.prod(signs) * fn(*(point + signs * h))
    return total / (2 * h) ** d
