"""Analytic Yeh-Feynman integrals, Fourier-Yeh-Feynman transforms and
convolution products for cylinder functionals on Yeh-Wiener space, with exact
and Monte Carlo verification of their composition identities."""

from .algebra import (
    CylinderFunctional,
    DiscreteMeasure,
    FeynmanQ,
    RealLambda,
    compact,
    evaluate,
    gcp,
    gfyft,
    random_functional,
    reflect,
    scale_path,
    scaled_product,
    unit_mass,
)
from .errors import DegenerateParameterError, GridMismatchError, HypothesisError, SupportWarning
from .feynman import (
    MCEstimate,
    alpha_n,
    closed_form_real_lambda,
    feynman_closed_form,
    iterated_closed_form,
    iterated_mc_two_kernels,
    yeh_wiener_mc,
)
from .grid import (
    GridFunction,
    GridSpec,
    combine_kernels,
    constant,
    l2_inner,
    l2_norm_sq,
    make_grid,
    pointwise_mul,
    sample_function,
)
from .kernels import preset, resolve_kernels
from .sheet import (
    RngStream,
    SheetPath,
    empirical_process_covariance,
    gaussian_path,
    pwz_integral,
    sample_sheet,
)

__version__ = "0.1.0"
