#!/usr/bin/env python3
"""Family identifiers, parameter validation and construction of copula objects."""

from __future__ import annotations
import enum
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from .bivariate import (
    AMH2,
    BivariateCopulaMixin,
    Clayton2,
    Comonotone2,
    FGM2,
    Frank2,
    Gauss2,
    PolyCE2,
    Product2,
)
from .errors import ParameterOutOfRange, UnsupportedFamily
from .quadrature import QuadratureRule
from .trivariate import Clayton3, FGM3, Frank3, Gauss3, PolyCE3, TrivariateCopulaMixin


class Family(enum.Enum):
    FGM3 = "FGM3"
    Frank3 = "Frank3"
    Gauss3 = "Gauss3"
    Clayton3 = "Clayton3"
    PolyCE = "PolyCE"
    AMH2 = "AMH2"
    FGM2 = "FGM2"
    Frank2 = "Frank2"
    Clayton2 = "Clayton2"
    Gauss2 = "Gauss2"
    PolyCE2 = "PolyCE2"
    Product2 = "Product2"
    Comonotone2 = "Comonotone2"

    @property
    def is_trivariate(self) -> bool:
        return self in TRIVARIATE

    @property
    def n_params(self) -> int:
        return _ARITY[self]

    @classmethod
    def parse(cls, name: str) -> Family:
        """Case-insensitive lookup by name."""
        for family in cls:
            if family.value.lower() == name.lower():
                return family
        raise UnsupportedFamily(f"unknown family {name!r}; choose from {', '.join(f.value for f in cls)}")


TRIVARIATE = frozenset({Family.FGM3, Family.Frank3, Family.Gauss3, Family.Clayton3, Family.PolyCE})

_ARITY = {
    Family.FGM3: 1,
    Family.Frank3: 1,
    Family.Gauss3: 3,
    Family.Clayton3: 1,
    Family.PolyCE: 0,
    Family.AMH2: 1,
    Family.FGM2: 1,
    Family.Frank2: 1,
    Family.Clayton2: 1,
    Family.Gauss2: 1,
    Family.PolyCE2: 1,
    Family.Product2: 0,
    Family.Comonotone2: 0,
}

_CONSTRUCTORS = {
    Family.FGM3: FGM3,
    Family.Frank3: Frank3,
    Family.Gauss3: Gauss3,
    Family.Clayton3: Clayton3,
    Family.PolyCE: PolyCE3,
    Family.AMH2: AMH2,
    Family.FGM2: FGM2,
    Family.Frank2: Frank2,
    Family.Clayton2: Clayton2,
    Family.Gauss2: Gauss2,
    Family.PolyCE2: PolyCE2,
    Family.Product2: Product2,
    Family.Comonotone2: Comonotone2,
}

Copula = Union[BivariateCopulaMixin, TrivariateCopulaMixin]


@dataclass(frozen=True)
class FamilySpec:
    """A family tag plus its parameter vector."""

    family: Family
    params: Tuple[float, ...] = ()

    @classmethod
    def of(cls, family: Union[str, Family], *params: float) -> FamilySpec:
        if isinstance(family, str):
            family = Family.parse(family)
        return cls(family, tuple(float(p) for p in params))

    def __str__(self) -> str:
        args = ", ".join(f"{p:g}" for p in self.params)
        return f"{self.family.value}({args})"


def validate(spec: FamilySpec) -> FamilySpec:
    """Returns the spec unchanged if every constraint of its family holds."""
    name = spec.family.value
    if len(spec.params) != spec.family.n_params:
        raise ParameterOutOfRange(
            name, f"expects {spec.family.n_params} parameter(s)", f"{len(spec.params)}"
        )
    # constructors carry the per-family constraints
    _CONSTRUCTORS[spec.family](*spec.params)
    return spec


def make_copula(spec: FamilySpec, rule: QuadratureRule = None) -> Copula:
    """Builds the copula object for a validated spec."""
    validate(spec)
    constructor = _CONSTRUCTORS[spec.family]
    if spec.family.is_trivariate:
        return constructor(*spec.params, rule=rule)
    return constructor(*spec.params)


def make_trivariate(spec: FamilySpec, rule: QuadratureRule = None) -> TrivariateCopulaMixin:
    if not spec.family.is_trivariate:
        raise UnsupportedFamily(f"{spec.family.value} is not a trivariate family")
    return make_copula(spec, rule)


def spec_from_args(family: str, params: Sequence[float]) -> FamilySpec:
    return validate(FamilySpec.of(family, *params))
