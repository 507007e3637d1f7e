"""Generalized Toeplitz operators, Berezin transforms and the invariant
Laplacian on the Bergman space of the unit disk, as truncated matrices."""
from .berezin import (
    BerezinField,
    BiPolynomial,
    berezin_measure,
    berezin_op,
    berezin_symbol,
    berezin_toeplitz,
    decompose_T_Bn,
    delta_tilde_fn,
    delta_tilde_op,
    hyperbolic_grid,
    lincom_coefficients,
    m_difference,
)
from .carleson import (
    CarlesonReport,
    PseudoDisk,
    annulus_constant_check,
    box_kernel_sup,
    carleson_classify,
    mu_tilde_disk,
    norm_bounds,
    pseudo_disk,
)
from .core import (
    CoeffVector,
    MobiusMap,
    TruncatedOperator,
    fused_kernel_column,
    inner_product,
    mobius_eval,
    mobius_series,
    rank_one,
    reproducing_kernel,
    u_matrix,
    u_transform,
    u_transform_tail,
)
from .errors import DomainError, EvaluationError, PrecisionError, UsageError
from .kernels import BACKEND
from .measures import Atomic, Density, Radial, load_measure, measure_from_dict
from .quadrature import DiskQuadrature, build_disk_quadrature, integrate
from .toeplitz import ToeplitzRequest, assemble_toeplitz, operator_norm

__version__ = "0.1.0"
