#!/usr/bin/env python3
"""Command-line front end: verify, measure, partial, grid, sample and estimate.

Exit codes are 0 on success, 1 when a check or an estimation fails, and 2 for
usage, configuration and I/O errors.
"""

from __future__ import annotations
import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import __version__
from .bivariate import MEASURES
from .dependence import compare_partial_expected, kendall_tau, summarize
from .errors import CopulaError, EstimationError, UnsupportedFamily
from .estimate import COORDINATES, MIN_REPLICATIONS, SCENARIOS, joint_vs_stepwise_experiment
from .families import Family, FamilySpec, make_copula, make_trivariate, spec_from_args
from .output import Format, open_output, write_csv, write_json
from .partial import PartialMode, conditional_copula, l2_projection_fgm, normal_scale_grid, partial_copula
from .quadrature import DEFAULT_ORDER, gauss_rule
from .simulate import cpit, sample_trivariate
from .verify import run_checks

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("verify", "measure", "partial", "grid", "sample", "estimate")
_NEEDS_FAMILY = {"measure", "partial", "grid", "sample"}
_NEEDS_TRIVARIATE = {"partial", "grid", "sample"}
_DEFAULT_N = {"sample": 1000, "estimate": 20000}
_DEFAULT_Z = (0.25, 0.5, 0.75)
MIN_GRID_RESOLUTION = 16


@dataclass(frozen=True)
class CommandConfig:
    """Everything a subcommand needs, parsed and checked before any computation."""

    subcommand: str
    family: Optional[str] = None
    params: Tuple[float, ...] = ()
    order: int = DEFAULT_ORDER
    seed: int = 42
    n: Optional[int] = None
    reps: int = MIN_REPLICATIONS
    z_slices: Tuple[float, ...] = _DEFAULT_Z
    resolution: int = 64
    out: Optional[Path] = None
    format: Format = Format.CSV
    scenario: str = "simplified"
    mode: Optional[PartialMode] = None
    limit: float = 3.0
    verbose: int = 0

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> CommandConfig:
        n = ns.n if ns.n is not None else _DEFAULT_N.get(ns.subcommand)
        return cls(
            subcommand=ns.subcommand,
            family=ns.family,
            params=tuple(ns.params or ()),
            order=ns.order,
            seed=ns.seed,
            n=n,
            reps=ns.reps,
            z_slices=tuple(ns.z) if ns.z else _DEFAULT_Z,
            resolution=ns.resolution,
            out=ns.out,
            format=Format(ns.format),
            scenario=ns.scenario,
            mode=PartialMode(ns.mode) if ns.mode else None,
            limit=ns.limit,
            verbose=ns.verbose,
        )

    def spec(self) -> FamilySpec:
        return spec_from_args(self.family, self.params)

    def validate(self) -> CommandConfig:
        """Raises ValueError or a CopulaError for anything the subcommand cannot run with."""
        if self.order < 2:
            raise ValueError(f"--order must be at least 2, got {self.order}")
        if self.subcommand in _NEEDS_FAMILY:
            if not self.family:
                raise ValueError(f"{self.subcommand} needs --family")
            spec = self.spec()
            if self.subcommand in _NEEDS_TRIVARIATE and not spec.family.is_trivariate:
                raise UnsupportedFamily(f"{self.subcommand} needs a trivariate family, got {spec.family.value}")
        if self.subcommand == "grid":
            if self.resolution < MIN_GRID_RESOLUTION:
                raise ValueError(f"--resolution must be at least {MIN_GRID_RESOLUTION}, got {self.resolution}")
            if self.limit <= 0:
                raise ValueError(f"--limit must be positive, got {self.limit}")
            if any(not 0 <= z <= 1 for z in self.z_slices):
                raise ValueError("--z values must lie in [0, 1]")
        if self.subcommand == "partial" and self.resolution < 1:
            raise ValueError(f"--resolution must be positive, got {self.resolution}")
        if self.subcommand == "sample" and self.n < 1:
            raise ValueError(f"--n must be positive, got {self.n}")
        if self.subcommand == "estimate":
            if self.n < 1000:
                raise ValueError(f"estimate needs --n >= 1000, got {self.n}")
            if self.reps < 1:
                raise ValueError(f"--reps must be at least 1, got {self.reps}")
        return self


def cmd_verify(config: CommandConfig) -> int:
    checks = run_checks(config.order, config.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if config.out is not None:
        header = ("check", "value", "reference", "tolerance", "passed")
        rows = [(c.name, c.value, c.reference, c.tolerance, c.passed) for c in checks]
        with open_output(config.out) as f:
            if config.format is Format.CSV:
                write_csv(f, header, rows)
            else:
                write_json(f, {"order": config.order, "checks": [dict(zip(header, r)) for r in rows]})
    return 1 if failed else 0


def cmd_measure(config: CommandConfig) -> int:
    spec = config.spec()
    rule = gauss_rule(config.order)
    if spec.family.is_trivariate:
        cf = conditional_copula(make_trivariate(spec, rule))
        header = ("measure", "partial", "expected_conditional", "gap", "method")
        rows = [tuple(r) for r in compare_partial_expected(cf, rule)]
    else:
        summary = summarize(make_copula(spec), rule)
        header = ("measure", "value", "method")
        rows = [(name, getattr(summary, name), summary.methods[name]) for name in MEASURES]
    with open_output(config.out) as f:
        if config.format is Format.CSV:
            write_csv(f, header, rows)
        else:
            write_json(f, {"family": str(spec), "order": config.order, "measures": [dict(zip(header, r)) for r in rows]})
    return 0


def _partial_mode(config: CommandConfig, cf) -> PartialMode:
    if config.mode is not None:
        return config.mode
    return PartialMode.CLOSED_FORM if cf.closed_partial is not None else PartialMode.QUADRATURE


def cmd_partial(config: CommandConfig) -> int:
    spec = config.spec()
    rule = gauss_rule(config.order)
    cf = conditional_copula(make_trivariate(spec, rule))
    mode = _partial_mode(config, cf)
    pc = partial_copula(cf, mode, rule)
    mid = (np.arange(config.resolution) + 0.5) / config.resolution
    u, v = np.meshgrid(mid, mid, indexing="ij")
    columns = {"u1": u.ravel(), "u2": v.ravel(), "cdf": np.ravel(pc.cdf(u, v)), "pdf": np.ravel(pc.pdf(u, v))}
    if spec.family is Family.FGM3:
        columns["l2_projection"] = np.ravel(l2_projection_fgm(spec.params[0], u, v))
    with open_output(config.out) as f:
        if config.format is Format.CSV:
            write_csv(f, tuple(columns), zip(*columns.values()))
        else:
            write_json(f, {"family": str(spec), "mode": mode, "order": config.order, "columns": columns})
    return 0


def cmd_grid(config: CommandConfig) -> int:
    spec = config.spec()
    rule = gauss_rule(config.order)
    cf = conditional_copula(make_trivariate(spec, rule))
    mode = _partial_mode(config, cf)
    res, limit = config.resolution, config.limit

    conditional = []
    for z in config.z_slices:
        axis, density = normal_scale_grid(cf.at(z), res, limit)
        conditional.append((z, density))
    axis, partial_density = normal_scale_grid(partial_copula(cf, mode, rule), res, limit)
    curve_z = np.linspace(0.0, 1.0, res)
    curve_tau = np.array([kendall_tau(cf.at(z), rule) for z in curve_z])
    logger.info("grid for %s: %d slices, %d x %d", spec, len(conditional), res, res)

    with open_output(config.out) as f:
        if config.format is Format.JSON:
            write_json(
                f,
                {
                    "family": str(spec),
                    "axis": axis,
                    "conditional": [{"z": z, "density": d} for z, d in conditional],
                    "partial": {"mode": mode, "density": partial_density},
                    "kendall": {"z": curve_z, "tau": curve_tau},
                },
            )
            return 0

        def rows():
            for z, density in conditional:
                for i, x1 in enumerate(axis):
                    for j, x2 in enumerate(axis):
                        yield ("conditional", z, x1, x2, density[i, j])
            for i, x1 in enumerate(axis):
                for j, x2 in enumerate(axis):
                    yield ("partial", None, x1, x2, partial_density[i, j])
            for z, tau in zip(curve_z, curve_tau):
                yield ("kendall", z, None, None, tau)

        write_csv(f, ("panel", "z", "x1", "x2", "value"), rows())
    return 0


def cmd_sample(config: CommandConfig) -> int:
    spec = config.spec()
    samples = cpit(sample_trivariate(spec, config.n, config.seed), spec)
    names = ("u1", "u2", "u3", "v1", "v3")
    with open_output(config.out) as f:
        if config.format is Format.CSV:
            write_csv(f, names, samples.matrix(names))
        else:
            write_json(
                f,
                {
                    "family": str(spec),
                    "n": samples.n,
                    "seed": config.seed,
                    "generator": samples.generator,
                    "columns": {name: samples[name] for name in names},
                },
            )
    return 0


def cmd_estimate(config: CommandConfig) -> int:
    report = joint_vs_stepwise_experiment(config.scenario, config.n, config.reps, config.seed)
    if config.out is not None:
        rows = report.rows()
        with open_output(config.out) as f:
            if config.format is Format.CSV:
                header = tuple(rows[0])
                write_csv(f, header, [tuple(r.values()) for r in rows])
            else:
                write_json(
                    f,
                    {
                        "scenario": report.scenario,
                        "n": report.n,
                        "replications": report.replications,
                        "seed": report.seed,
                        "fits": rows,
                        "summary": {
                            "mean_difference": dict(zip(COORDINATES, report.mean_difference)),
                            "standard_error": (
                                dict(zip(COORDINATES, report.standard_error)) if report.standard_error else None
                            ),
                            "flagged": report.flagged,
                        },
                    },
                )
    print(report.summary())
    return 0


COMMANDS: Dict[str, Callable[[CommandConfig], int]] = {
    "verify": cmd_verify,
    "measure": cmd_measure,
    "partial": cmd_partial,
    "grid": cmd_grid,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="copula family, e.g. FGM3, Frank3, Gauss3, Clayton3, PolyCE")
    common.add_argument(
        "--theta", dest="params", action="append", type=float, help="family parameter (repeatable)"
    )
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help="Gauss-Legendre order (default: %(default)s)")
    common.add_argument("--seed", type=int, default=42, help="master seed (default: %(default)s)")
    common.add_argument("--n", type=int, help="sample size")
    common.add_argument("--reps", type=int, default=MIN_REPLICATIONS, help="replications (default: %(default)s)")
    common.add_argument("--z", action="append", type=float, help="conditioning value for grid slices (repeatable)")
    common.add_argument("--resolution", type=int, default=64, help="grid points per axis (default: %(default)s)")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--format", choices=[f.value for f in Format], default=Format.CSV.value)
    common.add_argument("--scenario", choices=sorted(SCENARIOS), default="simplified")
    common.add_argument("--mode", choices=[m.value for m in PartialMode], help="partial copula evaluation")
    common.add_argument("--limit", type=float, default=3.0, help="normal-scale grid range (default: %(default)s)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")

    parser = argparse.ArgumentParser(
        prog="partial-copula", description="Partial copulas of trivariate copula models."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "verify": "run the numerical check suite",
        "measure": "dependence measures of the partial copula and the expected conditional ones",
        "partial": "partial copula cdf and density on a grid",
        "grid": "normal-scale density grids of conditional and partial copulas",
        "sample": "draw from a trivariate family and add CPITs",
        "estimate": "joint vs stepwise maximum-likelihood experiment",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    _configure_logging(ns.verbose)

    try:
        config = CommandConfig.from_namespace(ns).validate()
    except (CopulaError, ValueError) as e:
        print(f"partial-copula: error: {e}", file=sys.stderr)
        return 2

    logger.debug("running %s", config)
    try:
        return COMMANDS[config.subcommand](config)
    except EstimationError as e:
        print(f"partial-copula: estimation failed: {e}", file=sys.stderr)
        return 1
    except (CopulaError, ValueError, OSError) as e:
        print(f"partial-copula: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
