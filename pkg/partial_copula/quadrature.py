#!/usr/bin/env python3
"""Gauss-Legendre rules on the unit interval and their tensor products."""

from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

DEFAULT_ORDER = 64


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes in (0, 1) and positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValueError(
                f"rule of order {self.order} needs {self.order} nodes and weights"
            )

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of fn over [0, 1]."""
        return float(np.dot(self.weights, fn(self.nodes)))

    def on_interval(self, lo, hi) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights mapped to [lo, hi]. Array endpoints broadcast
        along new trailing axes, so the node axis always comes first."""
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        shape = (self.order,) + (1,) * max(lo.ndim, hi.ndim)
        width = hi - lo
        nodes = lo + width * self.nodes.reshape(shape)
        weights = width * self.weights.reshape(shape)
        return nodes, weights

    def tensor(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Two-dimensional tensor grid: (u, v, weight) arrays of shape (order, order)."""
        u, v = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        return u, v, np.outer(self.weights, self.weights)

    def integrate2(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
        """Integral of fn over the unit square."""
        u, v, w = self.tensor()
        return float(np.sum(w * fn(u, v)))

    def average(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the leading (node) axis, in fixed order."""
        return np.tensordot(self.weights, values, axes=1)


@lru_cache(maxsize=None)
def gauss_rule(order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes mapped from [-1, 1] to [0, 1].

    Exact for polynomials of degree up to 2 * order - 1."""
    if order < 2:
        raise ValueError(f"quadrature order must be at least 2, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    nodes = (x + 1.0) / 2.0
    weights = w / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, order)
