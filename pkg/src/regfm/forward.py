"""Synthetic scattering data.

* Born-approximation far-field matrices for penetrable scatterers with
  constant contrast.
* Near-field matrices for sound-soft obstacles illuminated by point
  sources on a circle, computed from a truncated Fourier-Hankel expansion
  of the scattered field fitted to the Dirichlet condition by least
  squares collocation.
* The closed-form far-field operator of a sound-soft disk, used as an
  oracle for the near-to-far transform.
* Multiplicative random noise.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .specfun import bessel_j, fundamental_solution, hankel1_table

log = logging.getLogger(__name__)

RESIDUAL_WARN = 0.05


class ConfigError(ValueError):
    """Invalid parameters for data synthesis or reconstruction."""


class ShapeKind(str, enum.Enum):
    ROUNDED_SQUARE = "rounded_square"
    STAR = "star"
    ACORN = "acorn"
    PEANUT = "peanut"
    DISK = "disk"


@dataclass(frozen=True)
class RadialShape:
    """Star-shaped domain ``{rho (cos t, sin t) : 0 <= rho < r(t)}``."""

    kind: ShapeKind
    radius: float = 0.5  # only used by DISK

    def __post_init__(self):
        object.__setattr__(self, "kind", ShapeKind(self.kind))
        if self.kind is ShapeKind.DISK and not self.radius > 0:
            raise ConfigError("disk radius must be positive")

    @classmethod
    def disk(cls, radius: float) -> "RadialShape":
        return cls(ShapeKind.DISK, radius)

    def r(self, theta):
        theta = np.asarray(theta, dtype=float)
        kind = self.kind
        if kind is ShapeKind.ROUNDED_SQUARE:
            return 0.5 * (np.abs(np.sin(theta)) ** 10 + 0.1 * np.abs(np.cos(theta)) ** 10) ** (-0.1)
        if kind is ShapeKind.STAR:
            return 0.5 * (1.0 - 0.25 * np.sin(4.0 * theta))
        if kind is ShapeKind.ACORN:
            return 0.25 * (2.0 + 0.5 * np.cos(3.0 * theta))
        if kind is ShapeKind.PEANUT:
            return 0.75 * np.sqrt(0.75 * np.cos(theta) ** 2 + 0.07 * np.sin(theta) ** 2)
        return np.full_like(theta, self.radius)

    def contains(self, points) -> np.ndarray:
        """Boolean mask of points (last axis = coordinates) strictly inside."""
        pts = np.asarray(points, dtype=float)
        rho = np.hypot(pts[..., 0], pts[..., 1])
        return rho < self.r(np.arctan2(pts[..., 1], pts[..., 0]))

    def area(self, n: int = 4096) -> float:
        theta = 2.0 * np.pi * np.arange(n) / n
        return float(0.5 * np.mean(self.r(theta) ** 2) * 2.0 * np.pi)


def boundary_point(shape: RadialShape, theta):
    """``r(theta) (cos theta, sin theta)``; works on arrays of angles."""
    theta = np.mod(np.asarray(theta, dtype=float), 2.0 * np.pi)
    rr = shape.r(theta)
    return np.stack([rr * np.cos(theta), rr * np.sin(theta)], axis=-1)


@dataclass(frozen=True)
class MediumParams:
    k: float = 4.0
    q: complex = 1.0 + 1.0j

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigError("wave number must be positive")


@dataclass(frozen=True)
class ArrayGeometry:
    """``count`` equispaced directions/points, ``theta_i = 2 pi i / count``.

    ``radius`` is the radius of the measurement circle for near-field data.
    """

    count: int = 64
    radius: float = 5.0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("count must be positive")
        if not self.radius > 0:
            raise ConfigError("measurement radius must be positive")

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.count) / self.count

    @property
    def directions(self) -> np.ndarray:
        t = self.angles
        return np.stack([np.cos(t), np.sin(t)], axis=-1)

    @property
    def points(self) -> np.ndarray:
        return self.radius * self.directions


@dataclass(frozen=True)
class QuadratureSpec:
    """Polar product rule: midpoint in angle, Gauss-Legendre in radius."""

    angular: int = 256
    radial: int = 32

    def __post_init__(self):
        if self.angular < 1 or self.radial < 1:
            raise ConfigError("quadrature resolution must be positive")

    def nodes(self, shape: RadialShape):
        """Quadrature points (P, 2) and weights (P,) over the shape's interior."""
        theta = 2.0 * np.pi * (np.arange(self.angular) + 0.5) / self.angular
        x, w = np.polynomial.legendre.leggauss(self.radial)
        s = 0.5 * (x + 1.0)
        ws = 0.5 * w
        rr = shape.r(theta)
        rho = rr[:, None] * s[None, :]
        weight = (2.0 * np.pi / self.angular) * rr[:, None] * ws[None, :] * rho
        pts = np.stack([rho * np.cos(theta)[:, None], rho * np.sin(theta)[:, None]], axis=-1)
        return pts.reshape(-1, 2), weight.ravel()


def born_farfield_matrix(
    shape: RadialShape,
    med: MediumParams = MediumParams(),
    geom: ArrayGeometry = ArrayGeometry(),
    quad: QuadratureSpec = QuadratureSpec(),
) -> np.ndarray:
    """Born far-field data ``k^2 q int_D exp(-i k y.(xhat_i - d_j)) dy``.

    The kernel factorises as ``exp(-i k y.xhat) exp(i k y.d)`` so the
    quadrature is a single matrix product.
    """
    if not isinstance(quad, QuadratureSpec):
        raise ConfigError("quad must be a QuadratureSpec")
    pts, w = quad.nodes(shape)
    phase = pts @ geom.directions.T  # (P, count)
    out_ = np.exp(-1j * med.k * phase)
    in_ = np.exp(1j * med.k * phase)
    return med.k**2 * complex(med.q) * (out_.T * w) @ in_


def circulant(first_col) -> np.ndarray:
    """Matrix with entry ``(i, j) = first_col[(i - j) mod n]``."""
    first_col = np.asarray(first_col)
    n = len(first_col)
    return first_col[(np.arange(n)[:, None] - np.arange(n)[None, :]) % n]


def _mode_orders(trunc):
    return np.arange(-trunc, trunc + 1)


def hankel_modes(trunc: int, arg) -> np.ndarray:
    """``H_n^{(1)}(arg)`` for ``n = -trunc..trunc``; mode axis last."""
    arg = np.atleast_1d(np.asarray(arg, dtype=float))
    table = np.moveaxis(hankel1_table(trunc, arg), 0, -1)  # (..., trunc + 1)
    n = np.arange(1, trunc + 1)
    neg = table[..., 1:][..., ::-1] * ((-1.0) ** n[::-1])
    return np.concatenate([neg, table], axis=-1)


@dataclass
class ResidualReport:
    """Per-source relative boundary residual of the collocation fit."""

    residuals: np.ndarray
    rank: int
    unknowns: int
    threshold: float = RESIDUAL_WARN
    warnings: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    @property
    def ok(self) -> bool:
        return not self.warnings

    def summary(self) -> str:
        status = "ok" if self.ok else "WARNING"
        return (
            f"collocation residual: max {self.max_residual:.3e}, "
            f"median {float(np.median(self.residuals)):.3e} "
            f"(rank {self.rank}/{self.unknowns}, threshold {self.threshold:g}) [{status}]"
        )


def soundsoft_coefficients(shape: RadialShape, k: float, geom: ArrayGeometry, trunc: int = 15):
    """Series coefficients ``c_n(y_j)`` (shape ``(2 trunc + 1, count)``).

    Returns ``(coefficients, report)``; row ``n + trunc`` holds mode ``n``.
    """
    if trunc < 0:
        raise ConfigError("truncation must be nonnegative")
    if not k > 0:
        raise ConfigError("wave number must be positive")
    theta = geom.angles
    bnd = boundary_point(shape, theta)
    if np.max(np.hypot(bnd[:, 0], bnd[:, 1])) >= geom.radius:
        raise ConfigError("scatterer must lie strictly inside the measurement circle")
    orders = _mode_orders(trunc)
    rb = shape.r(theta)
    colloc = hankel_modes(trunc, k * rb) * np.exp(1j * np.outer(theta, orders))
    rhs = -fundamental_solution(bnd[:, None, :], geom.points[None, :, :], k)
    sol = linalg.lstsq(colloc, rhs)
    coef = sol.solution
    resid = np.max(np.abs(colloc @ coef - rhs), axis=0) / np.max(np.abs(rhs), axis=0)
    report = ResidualReport(resid, sol.rank, len(orders))
    if sol.rank_deficient:
        report.warnings.append(f"collocation matrix rank deficient ({sol.rank}/{len(orders)})")
    if report.max_residual > RESIDUAL_WARN:
        report.warnings.append(
            f"boundary residual {report.max_residual:.3e} exceeds {RESIDUAL_WARN:g}; "
            "k^2 may be close to a Dirichlet eigenvalue or the truncation too small"
        )
    for msg in report.warnings:
        log.warning(msg)
    return coef, report


def soundsoft_nearfield_matrix(
    shape: RadialShape, k: float = 4.0, geom: ArrayGeometry = ArrayGeometry(), trunc: int = 15
):
    """Scattered field ``u^s(x_i, y_j)`` on the measurement circle.

    Returns ``(N, report)``.
    """
    coef, report = soundsoft_coefficients(shape, k, geom, trunc)
    orders = _mode_orders(trunc)
    basis = hankel_modes(trunc, k * geom.radius)[0] * np.exp(1j * np.outer(geom.angles, orders))
    return basis @ coef, report


def disk_farfield_matrix(a: float, k: float, geom: ArrayGeometry = ArrayGeometry(), trunc: int = 10):
    """Far-field operator of a sound-soft disk of radius ``a``.

    ``-(1 - i)/sqrt(pi k) sum_{|n| <= trunc} J_n(ka)/H_n(ka) e^{i n (theta_i - theta_j)}``,
    i.e. the pattern in the convention ``u^s ~ e^{ikr} r^{-1/2} u^inf``.
    """
    if not a > 0:
        raise ConfigError("disk radius must be positive")
    orders = _mode_orders(trunc)
    h = hankel_modes(trunc, k * a)[0]
    j = np.array([bessel_j(abs(n), k * a) * (-1.0) ** (n if n < 0 else 0) for n in orders])
    ratio = j / h
    col = np.exp(1j * np.outer(geom.angles, orders)) @ ratio
    return -(1.0 - 1.0j) / math.sqrt(math.pi * k) * circulant(col)


def noise_matrix(shape, seed: int) -> np.ndarray:
    """Standard complex Gaussian matrix (PCG64 stream) scaled to unit spectral norm."""
    rng = np.random.Generator(np.random.PCG64(seed))
    e = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return e / linalg.spectral_norm(e)


def add_noise(m, delta: float, seed: int) -> np.ndarray:
    """Entrywise multiplicative noise ``M_ij (1 + delta E_ij)`` with ``||E||_2 = 1``."""
    if delta < 0:
        raise ConfigError("noise level must be nonnegative")
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise linalg.ShapeError("noise is applied to square data matrices")
    if delta == 0:
        return m.copy()
    return m * (1.0 + delta * noise_matrix(m.shape, seed))
