"""Regularized factorization method for acoustic inverse scattering."""
from .forward import (
    ArrayGeometry,
    MediumParams,
    QuadratureSpec,
    RadialShape,
    add_noise,
    born_farfield_matrix,
    disk_farfield_matrix,
    soundsoft_nearfield_matrix,
)
from .operators import KernelTruncation, q_kernel_matrix, r_kernel_matrix, sharp, transform_nearfield
from .rfm import FilterKind, FilterSpec, Grid, imaging_field

__version__ = "0.1.0"
