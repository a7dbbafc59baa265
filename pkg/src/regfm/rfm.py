"""Regularized factorization method.

Given a Hermitian PSD data matrix with spectrum ``{sigma_j, u_j}`` and a
filter ``phi(t; alpha)``, the regularized solution of ``A x = l`` is

    x_alpha = sum_j phi(sigma_j) / sigma_j <u_j, l> u_j

and ``<x_alpha, A x_alpha> = sum_j phi(sigma_j)^2 / sigma_j |<u_j, l>|^2``.
The imaging functional ``W(z)`` is the reciprocal of that series for the
probe ``l_z = exp(-i k xhat . z)``: bounded below away from zero for
``z`` inside the scatterer and close to zero outside.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .forward import ArrayGeometry, ConfigError

DEFAULT_ALPHA = 1e-6
LANDWEBER_BETA_FACTOR = 0.9


class FilterKind(str, enum.Enum):
    TIKHONOV = "tikhonov"
    LANDWEBER = "landweber"
    CUTOFF = "cutoff"


@dataclass(frozen=True)
class FilterSpec:
    """Regularization filter and its parameter.

    For Landweber the iteration count is ``m = max(1, round(1/alpha))`` and
    ``beta`` defaults to ``0.9 / sigma_1**2`` of the operator it is applied to.
    """

    kind: FilterKind = FilterKind.TIKHONOV
    alpha: float = DEFAULT_ALPHA
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FilterKind(self.kind))
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.beta is not None and not self.beta > 0:
            raise ConfigError("beta must be positive")

    @property
    def iterations(self) -> int:
        return max(1, round(1.0 / self.alpha))

    def beta_for(self, sigma1: float) -> float:
        if self.beta is not None:
            return self.beta
        return LANDWEBER_BETA_FACTOR / sigma1**2


def filter_value(spec: FilterSpec, t, sigma1: float):
    """Filter factor ``phi(t; alpha)`` (scalar or array ``t``), values in [0, 1]."""
    t = np.asarray(t, dtype=float)
    t2 = t * t
    if spec.kind is FilterKind.TIKHONOV:
        out = t2 / (t2 + spec.alpha)
    elif spec.kind is FilterKind.CUTOFF:
        out = np.where(t2 >= spec.alpha, 1.0, 0.0)
    else:
        if not sigma1 > 0:
            raise ConfigError("Landweber filter needs a positive largest singular value")
        bt2 = spec.beta_for(sigma1) * t2
        if np.any(bt2 >= 1.0):
            raise ConfigError("Landweber step too large: beta * t^2 must stay below 1")
        # 1 - (1 - b t^2)^m without cancellation
        out = -np.expm1(spec.iterations * np.log1p(-bt2))
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class GelfandModel:
    """Hermitian PSD data operator together with its spectrum."""

    operator: np.ndarray
    spectrum: linalg.SpectralData

    @classmethod
    def from_operator(cls, a) -> "GelfandModel":
        a = linalg.as_matrix(a)
        return cls(a, linalg.svd(a, right=False))


def _weights(spectrum: linalg.SpectralData, spec: FilterSpec, power: int):
    """``phi(sigma_j)^power / sigma_j`` with the relative floor on sigma."""
    s = spectrum.values
    if len(s) == 0:
        raise ValueError("empty spectrum")
    sigma1 = float(s[0])
    if sigma1 == 0.0:
        return np.zeros_like(s)
    phi = np.asarray(filter_value(spec, s, sigma1))
    return phi**power / spectrum.floored_values()


def regularized_solution(model: GelfandModel, ell, spec: FilterSpec) -> np.ndarray:
    u = model.spectrum.left_vectors
    return u @ (_weights(model.spectrum, spec, 1) * (u.conj().T @ np.asarray(ell, dtype=complex)))


def quadratic_form(model: GelfandModel, ell, spec: FilterSpec) -> float:
    return _series(model.spectrum, np.asarray(ell, dtype=complex)[:, None], spec)[0]


def _series(spectrum, probes, spec):
    # probes: (count, P)
    w = _weights(spectrum, spec, 2)
    coef = spectrum.left_vectors.conj().T @ probes
    return w @ (np.abs(coef) ** 2)


@dataclass(frozen=True)
class ProbeVector:
    entries: np.ndarray
    z: tuple


def probe_matrix(points, geom: ArrayGeometry, k: float) -> np.ndarray:
    """Columns ``exp(-i k xhat_i . z)`` for each point ``z`` (shape (P, 2))."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.exp(-1j * k * (geom.directions @ pts.T))


def probe_vector(z, geom: ArrayGeometry, k: float) -> ProbeVector:
    z = tuple(float(c) for c in z)
    return ProbeVector(probe_matrix([z], geom, k)[:, 0], z)


def _reciprocal(total):
    with np.errstate(divide="ignore"):
        return np.where(total > 0, 1.0 / np.where(total > 0, total, 1.0), np.inf)


def imaging_value(spectrum: linalg.SpectralData, probe, spec: FilterSpec) -> float:
    """``W = 1 / sum_j phi^2(sigma_j)/sigma_j |<u_j, l>|^2``; ``inf`` if the sum vanishes."""
    ell = probe.entries if isinstance(probe, ProbeVector) else np.asarray(probe, dtype=complex)
    return float(_reciprocal(_series(spectrum, ell[:, None], spec))[0])


def imaging_values(spectrum, points, spec: FilterSpec, k: float, geom: ArrayGeometry, chunk=4096):
    """``W`` at each row of ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        block = pts[start : start + chunk]
        out[start : start + chunk] = _reciprocal(_series(spectrum, probe_matrix(block, geom, k), spec))
    return out


@dataclass(frozen=True)
class Grid:
    xmin: float = -1.0
    xmax: float = 1.0
    ymin: float = -1.0
    ymax: float = 1.0
    nx: int = 128
    ny: int = 128

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError("grid needs at least one point per axis")
        if not (self.xmax >= self.xmin and self.ymax >= self.ymin):
            raise ConfigError("grid bounds are reversed")

    @property
    def xs(self):
        return np.linspace(self.xmin, self.xmax, self.nx)

    @property
    def ys(self):
        return np.linspace(self.ymin, self.ymax, self.ny)

    def points(self) -> np.ndarray:
        """Lattice points, shape ``(ny, nx, 2)``; row index follows y."""
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True)
class ImagingField:
    grid: Grid
    values: np.ndarray  # (ny, nx)
    spec: FilterSpec

    def finite_max(self) -> float:
        fin = self.values[np.isfinite(self.values)]
        return float(fin.max()) if fin.size else math.inf


def imaging_field(
    data_sharp, grid: Grid, spec: FilterSpec, k: float, geom: ArrayGeometry
) -> ImagingField:
    """Evaluate ``W`` on a lattice from a conditioned (Hermitian PSD) data matrix."""
    spectrum = linalg.svd(data_sharp, right=False)
    pts = grid.points()
    vals = imaging_values(spectrum, pts.reshape(-1, 2), spec, k, geom)
    return ImagingField(grid, vals.reshape(grid.ny, grid.nx), spec)


def level_set(values, fraction: float = 0.5) -> np.ndarray:
    """Mask ``{W >= fraction * max W}`` over finite values (sentinels count as above)."""
    values = np.asarray(values)
    fin = values[np.isfinite(values)]
    top = fin.max() if fin.size else 0.0
    return values >= fraction * top


def jaccard(a, b) -> float:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    union = np.count_nonzero(a | b)
    return 1.0 if union == 0 else np.count_nonzero(a & b) / union
