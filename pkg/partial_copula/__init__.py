"""Partial copulas of trivariate copula models: construction, dependence measures and estimation."""

__version__ = "0.1.0"

from .errors import *
from .quadrature import QuadratureRule, gauss_rule
from .bivariate import (
    AMH2,
    FGM2,
    BivariateCopulaMixin,
    Clayton2,
    Comonotone2,
    Frank2,
    Gauss2,
    PolyCE2,
    Product2,
    frank_tau,
    frank_tau_to_theta,
)
from .trivariate import (
    FGM3,
    Clayton3,
    Frank3,
    Gauss3,
    PolyCE3,
    TrivariateCopulaMixin,
    cdf3,
    gaussian_partial_correlation,
    hfunc,
    hfunc_inv,
    pdf3,
)
from .families import Family, FamilySpec, make_copula, make_trivariate, validate
from .partial import (
    ConditionalFamily,
    FrankPartial2,
    PartialCopula,
    PartialMode,
    associativity_check,
    conditional_copula,
    kl_divergence,
    l2_projection_bruteforce,
    l2_projection_fgm,
    normal_scale_grid,
    partial_cdf,
    partial_copula,
    partial_h1,
    partial_h2,
    partial_pdf,
)
from .dependence import (
    DependenceSummary,
    cond_corr_profile,
    expected_conditional_measure,
    kendall_tau,
    partial_correlation,
    spearman_rho,
    summarize,
    tail_coefficient,
)
from .simulate import SampleSet, cpit, empirical_copula, sample_trivariate
from .estimate import FitResult, MLModel, fit_joint, fit_stepwise, joint_vs_stepwise_experiment
