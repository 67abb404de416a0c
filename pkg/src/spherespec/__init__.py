"""Extended-precision spectra of zonal kernels on spheres and checks of their decay."""

from .decay import (
    DecayReport,
    ExponentSpec,
    SeriesEvaluation,
    decay_bound,
    decay_envelope_check,
    divergence_parameters,
    exact_j_product,
    exponent_from_string,
    index_inequality,
    series_eval,
    verify_lemma42,
)
from .errors import ConvergenceError, DomainError, KernelParseError, ParseError, SphereSpecError
from .grammar import parse_kernel
from .harmonics import (
    DEFAULT_PRECISION,
    cum_dim,
    delta,
    dim_harmonic,
    legendre_eval,
    level_of_index,
    quadrature_rule,
)
from .kernels import (
    DotProduct,
    ExplicitCoefficients,
    Gaussian,
    LegendreExpansion,
    Moller,
    Multiquadric,
    Optimality,
    PointwiseZonal,
    catalog_coefficients,
    dot_product_coefficients,
    expand,
    power_to_condensed,
    project_zonal,
    ratio_test,
    schoenberg_check,
)
from .oracle import build_grid, eigs_symmetric, nystrom_eigenvalues, oracle_check
from .spectra import Spectrum, eigenvalue_blocks, growth_rate, hs_norm, j_operator, lb_derivative, s1_of_derivative

__version__ = "0.1.0"
