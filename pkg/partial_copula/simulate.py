#!/usr/bin/env python3
"""Sampling from trivariate models, CPITs and empirical copulas."""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .bivariate import BivariateCopulaMixin
from .families import FamilySpec, make_trivariate
from .trivariate import hfunc

logger = logging.getLogger(__name__)

GENERATOR_NAME = "Philox"

# keeps uniform draws off the boundary of the unit interval
_EDGE = 1e-16


def make_generator(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """Counter-based generator; identical streams on every platform for a given seed."""
    return np.random.Generator(np.random.Philox(seed))


def replication_seeds(seed: int, count: int) -> Tuple[np.random.SeedSequence, ...]:
    """Independent child seeds derived from (seed, replication index)."""
    return tuple(np.random.SeedSequence(seed).spawn(count))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Named columns of equal length plus the seed and generator that produced them."""

    columns: Mapping[str, np.ndarray]
    seed: int
    generator: str = GENERATOR_NAME
    n: int = field(init=False)

    def __post_init__(self):
        cols = {}
        for name, values in self.columns.items():
            arr = np.array(values, dtype=np.float64)
            arr.setflags(write=False)
            cols[name] = arr
        lengths = {len(v) for v in cols.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have different lengths: {sorted(lengths)}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "n", lengths.pop() if lengths else 0)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.columns)

    def with_columns(self, **new: np.ndarray) -> SampleSet:
        return SampleSet({**self.columns, **new}, self.seed, self.generator)

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        return np.column_stack([self.columns[name] for name in names])


def sample_trivariate(spec: FamilySpec, n: int, seed: int) -> SampleSet:
    """Draws (u1, u2, u3) by conditional inversion.

    u2 is uniform; (p1, p3) is drawn from the conditional copula at u2 and
    mapped back through the inverse h-functions of the two margins."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    cop = make_trivariate(spec)
    rng = make_generator(seed)
    draws = np.clip(rng.random((3, n)), _EDGE, 1 - _EDGE)
    u2, p1, w = draws
    p3 = cop.conditional_at(u2).h1_inv(w, p1)
    u1 = cop.hfunc_inv("1|2", p1, u2)
    u3 = cop.hfunc_inv("3|2", p3, u2)
    logger.debug("drew %d samples from %s with seed %d", n, spec, seed)
    return SampleSet({"u1": u1, "u2": u2, "u3": u3}, seed)


def cpit(samples: SampleSet, spec: FamilySpec) -> SampleSet:
    """Adds the conditional probability integral transforms v1 = F(u1 | u2), v3 = F(u3 | u2)."""
    cop = make_trivariate(spec)
    u1, u2, u3 = samples["u1"], samples["u2"], samples["u3"]
    v1 = hfunc(cop, "1|2", u1, u2)
    v3 = hfunc(cop, "3|2", u3, u2)
    return samples.with_columns(v1=v1, v3=v3)


def pseudo_observations(x: np.ndarray) -> np.ndarray:
    """Ranks scaled by 1 / (n + 1)."""
    x = np.asarray(x)
    return stats.rankdata(x) / (len(x) + 1)


def empirical_copula(pairs: SampleSet, u1, u2, columns: Tuple[str, str] = ("v1", "v3")):
    """Rank-based empirical copula of two columns at (u1, u2)."""
    if pairs.n < 10:
        raise ValueError(f"the empirical copula needs at least 10 observations, got {pairs.n}")
    pu = pseudo_observations(pairs[columns[0]])
    pv = pseudo_observations(pairs[columns[1]])
    u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=np.float64), np.asarray(u2, dtype=np.float64))
    flat = [np.mean((pu <= a) & (pv <= b)) for a, b in zip(u1.ravel(), u2.ravel())]
    values = np.array(flat).reshape(u1.shape)
    return values[()] if values.ndim == 0 else values


def empirical_copula_grid(x: np.ndarray, y: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Empirical copula of (x, y) on grid x grid, by cumulative counting."""
    pu, pv = pseudo_observations(x), pseudo_observations(y)
    grid = np.asarray(grid, dtype=np.float64)
    g = len(grid)
    # index of the first grid point >= observation; obs <= grid[j] iff index <= j
    iu = np.searchsorted(grid, pu, side="left")
    iv = np.searchsorted(grid, pv, side="left")
    counts = np.zeros((g + 1, g + 1))
    np.add.at(counts, (iu, iv), 1.0)
    cumulative = counts.cumsum(axis=0).cumsum(axis=1)
    return cumulative[:g, :g] / len(pu)


def empirical_copula_distance(
    x: np.ndarray, y: np.ndarray, reference: BivariateCopulaMixin, grid_size: int = 64
) -> float:
    """Sup-distance between the empirical copula of (x, y) and `reference` on a grid."""
    grid = np.arange(1, grid_size) / grid_size
    empirical = empirical_copula_grid(x, y, grid)
    gu, gv = np.meshgrid(grid, grid, indexing="ij")
    return float(np.max(np.abs(empirical - reference.cdf(gu, gv))))


def empirical_cdf3(samples: SampleSet, points: Iterable[Sequence[float]]) -> np.ndarray:
    """Empirical trivariate cdf of (u1, u2, u3) at each point."""
    data = samples.matrix(("u1", "u2", "u3"))
    return np.array([np.mean(np.all(data <= np.asarray(p), axis=1)) for p in points])


def uniformity_pvalues(samples: SampleSet, names: Sequence[str] = None) -> Dict[str, float]:
    """Kolmogorov-Smirnov p-values of each copula-scale column against U(0, 1)."""
    names = names if names is not None else [n for n in samples.names if n.startswith(("u", "v"))]
    return {name: float(stats.kstest(samples[name], "uniform").pvalue) for name in names}


def sample_kendall(samples: SampleSet, a: str, b: str) -> float:
    return float(stats.kendalltau(samples[a], samples[b])[0])


def sample_spearman(samples: SampleSet, a: str, b: str) -> float:
    return float(stats.spearmanr(samples[a], samples[b])[0])
