"""Conditioning of measured data operators.

``sharp`` turns an indefinite far-field matrix into the Hermitian PSD
``|Re F| + |Im F|``.  ``q_kernel_matrix`` and ``r_kernel_matrix`` discretise
the truncated Dirichlet-to-far-field and reflection kernels on an
equispaced circle, with the Riemann weight ``2 pi / count`` folded in so
that a matrix-vector product is the quadrature of the integral operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .forward import ArrayGeometry, ConfigError, circulant, hankel_modes

DEFAULT_KERNEL_ORDER = 10


@dataclass(frozen=True)
class KernelTruncation:
    max_order: int = DEFAULT_KERNEL_ORDER

    def check(self, geom: ArrayGeometry) -> None:
        if self.max_order < 0:
            raise ConfigError("kernel truncation must be nonnegative")
        # equispaced quadrature is exact for e^{i(m-n)theta} only while |m - n| < count
        if 2 * self.max_order >= geom.count:
            raise ConfigError(
                f"kernel truncation {self.max_order} aliases on {geom.count} points "
                f"(need max_order < count / 2)"
            )


def real_part(f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    return 0.5 * (f + f.conj().T)


def imag_part(f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    return (f - f.conj().T) / 2j


def sharp(f) -> np.ndarray:
    """``|Re F| + |Im F|`` with the operator (not entrywise) real/imaginary parts."""
    f = linalg.as_matrix(f)
    if f.shape[0] != f.shape[1]:
        raise linalg.ShapeError(f"sharp needs a square matrix, got {f.shape}")
    return linalg.hermitian_abs(real_part(f)) + linalg.hermitian_abs(imag_part(f))


def q_kernel_matrix(
    k: float,
    rho: float,
    geom: ArrayGeometry = ArrayGeometry(),
    trunc: KernelTruncation = KernelTruncation(),
    scale: float = 1.0,
) -> np.ndarray:
    """Collocated truncated Dirichlet-to-far-field kernel.

    Entry ``(i, j)`` is ``(2 pi / count) Q(theta_i - theta_j)`` with
    ``Q(t) = (1 - i)/(2 pi sqrt(pi k)) sum_{|n| <= N} e^{in(t - pi/2)} / H_n(k rho)``.
    ``scale`` multiplies the kernel constant and exists only for sensitivity
    checks.
    """
    trunc.check(geom)
    if not rho > 0 or not k > 0:
        raise ConfigError("k and rho must be positive")
    if not math.isclose(rho, geom.radius):
        raise ConfigError("geometry radius must equal the measurement radius rho")
    orders = np.arange(-trunc.max_order, trunc.max_order + 1)
    inv_h = 1.0 / hankel_modes(trunc.max_order, k * rho)[0]
    t = geom.angles
    const = scale * (1.0 - 1.0j) / (2.0 * math.pi * math.sqrt(math.pi * k))
    col = const * (np.exp(1j * np.outer(t, orders) - 0.5j * math.pi * orders) @ inv_h)
    return (2.0 * math.pi / geom.count) * circulant(col)


def r_kernel_matrix(
    geom: ArrayGeometry = ArrayGeometry(), trunc: KernelTruncation = KernelTruncation()
) -> np.ndarray:
    """Collocated truncated reflection kernel ``(1/2pi) sum e^{in(t + pi)}``."""
    trunc.check(geom)
    orders = np.arange(-trunc.max_order, trunc.max_order + 1)
    t = geom.angles
    col = np.exp(1j * np.outer(t + math.pi, orders)).sum(axis=1) / (2.0 * math.pi)
    return (2.0 * math.pi / geom.count) * circulant(col)


def transform_nearfield(n, q, r) -> np.ndarray:
    """``Q N Q^T R`` with a plain (non-conjugating) transpose."""
    mats = [linalg.as_matrix(m) for m in (n, q, r)]
    shapes = {m.shape for m in mats}
    if len(shapes) != 1 or mats[0].shape[0] != mats[0].shape[1]:
        raise linalg.ShapeError(f"transform needs equal square matrices, got {sorted(shapes)}")
    n, q, r = mats
    return q @ n @ q.T @ r


def fit_constant(a, b) -> complex:
    """Least-squares ``c`` minimising ``||a - c b||_F``."""
    b = np.asarray(b, dtype=complex)
    return complex(np.vdot(b, a) / np.vdot(b, b))


def disk_transform_constant(k: float) -> complex:
    """Analytic ratio between ``Q N Q^T R`` (point-source near field) and
    ``disk_farfield_matrix`` (plane-wave far field, e^{ikr} r^{-1/2} convention).

    Equals ``1 / (2 (1 - i) sqrt(pi k))``; it depends on ``k`` because the
    kernel ``Q`` carries ``1/sqrt(k)`` twice while the plane-wave pattern
    carries it once.
    """
    return 1.0 / (2.0 * (1.0 - 1.0j) * math.sqrt(math.pi * k))
