"""Cylindrical Bessel/Hankel functions of integer order and the 2-D
Helmholtz fundamental solution.

J_n is computed with Miller's downward recurrence normalised by
``J_0 + 2 * sum(J_2k) = 1``.  Y_0 and Y_1 come from their ascending series
for small arguments and from the Hankel asymptotic expansion otherwise;
higher orders follow by forward recurrence, which is stable for Y.

All functions accept scalars or numpy arrays for the argument.
"""
from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

#: arguments below this are rejected; Phi is never evaluated that close
#: to its singularity
MIN_ARG = 1e-8

MAX_ORDER = 60

# crossover between ascending series and asymptotic expansion for Y_0, Y_1
_SERIES_LIMIT = 12.0
_SERIES_TERMS = 60
_RESCALE = 1e200


def _check_arg(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("Bessel argument must be finite and positive")
    return x


def _miller_start(order, xmax):
    # even starting index, comfortably above both order and argument
    m = max(order, int(xmax)) + 20 + int(math.sqrt(40.0 * max(order, int(xmax), 1)))
    return m + (m % 2)


def _bessel_j_table(max_order, x):
    """Return an array ``out[n, ...] = J_n(x)`` for ``0 <= n <= max_order``."""
    x = np.asarray(x, dtype=float)
    start = _miller_start(max_order, float(np.max(x)))
    out = np.zeros((max_order + 1,) + x.shape)
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    two_over_x = 2.0 / x
    for n in range(start, 0, -1):
        prev = n * two_over_x * cur - nxt
        nxt, cur = cur, prev
        # cur now holds the unnormalised J_{n-1}
        m = n - 1
        if m <= max_order:
            out[m] = cur
        if m > 0 and m % 2 == 0:
            norm += 2.0 * cur
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            cur *= scale
            nxt *= scale
            norm *= scale
            out[: max_order + 1] *= scale
    norm += cur
    return out / norm


def _asymptotic(order, x):
    """Hankel asymptotic expansion for J and Y of order 0 or 1."""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    last = np.full_like(x, np.inf)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop each lane once the divergent tail starts growing
        active &= mag < last
        last = np.where(active, mag, last)
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        if k % 2 == 0:
            p += (-1) ** (k // 2) * contrib
        else:
            q += (-1) ** ((k - 1) // 2) * contrib
        if np.all(mag < 1e-17):
            break
    chi = x - (0.5 * order + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    j = amp * (p * np.cos(chi) - q * np.sin(chi))
    y = amp * (p * np.sin(chi) + q * np.cos(chi))
    return j, y


def _y01_series(x):
    half = x / 2.0
    log_term = np.log(half) + EULER_GAMMA
    sq = half * half
    j0 = np.zeros_like(x)
    j1 = np.zeros_like(x)
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    t = np.ones_like(x)  # (x/2)^{2m} / (m!)^2
    harmonic = 0.0
    for m in range(_SERIES_TERMS):
        if m > 0:
            t = t * (-sq) / (m * m)
            harmonic += 1.0 / m
        # (x/2)^{2m+1} / (m! (m+1)!)
        t1 = t * half / (m + 1)
        j0 += t
        j1 += t1
        s0 -= harmonic * t
        # psi(m+1) + psi(m+2) = -2 gamma + 2 H_m + 1/(m+1)
        s1 += (2.0 * harmonic + 1.0 / (m + 1)) * t1
    y0 = 2.0 / math.pi * (log_term * j0 + s0)
    y1 = -2.0 / (math.pi * x) + 2.0 / math.pi * log_term * j1 - s1 / math.pi
    return y0, y1


def _y01(x):
    small = x <= _SERIES_LIMIT
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    if np.any(small):
        y0[small], y1[small] = _y01_series(x[small])
    if np.any(~small):
        y0[~small] = _asymptotic(0, x[~small])[1]
        y1[~small] = _asymptotic(1, x[~small])[1]
    return y0, y1


def _bessel_y_table(max_order, x):
    y0, y1 = _y01(x)
    out = np.empty((max_order + 1,) + x.shape)
    out[0] = y0
    if max_order >= 1:
        out[1] = y1
    two_over_x = 2.0 / x
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, max_order):
            out[n + 1] = n * two_over_x * out[n] - out[n - 1]
    return out


def _as_result(table, x_in):
    return table.item() if np.ndim(x_in) == 0 else table


def bessel_j(order: int, arg):
    """Bessel function of the first kind J_order(arg), ``order >= 0``."""
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}]")
    x = _check_arg(arg)
    xs = np.atleast_1d(x)
    return _as_result(_bessel_j_table(order, xs)[order].reshape(x.shape), arg)


def bessel_y(order: int, arg):
    """Bessel function of the second kind Y_order(arg), ``order >= 0``."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    x = _check_arg(arg)
    xs = np.atleast_1d(x)
    return _as_result(_bessel_y_table(order, xs)[order].reshape(x.shape), arg)


def hankel1_table(max_order: int, arg) -> np.ndarray:
    """All H_n^{(1)}(arg) for ``0 <= n <= max_order``, stacked on axis 0."""
    if max_order < 0 or max_order > MAX_ORDER:
        raise ValueError(f"max_order must lie in [0, {MAX_ORDER}]")
    x = np.atleast_1d(_check_arg(arg))
    return _bessel_j_table(max_order, x) + 1j * _bessel_y_table(max_order, x)


def hankel1(order: int, arg):
    """Hankel function of the first kind, H_n^{(1)} = J_n + i Y_n.

    Negative orders use ``H_{-n} = (-1)^n H_n``.
    """
    n = abs(order)
    x = _check_arg(arg)
    val = hankel1_table(n, x)[n].reshape(x.shape)
    if order < 0 and n % 2:
        val = -val
    return _as_result(val, arg)


def fundamental_solution(x, y, k: float):
    """Radiating fundamental solution of the 2-D Helmholtz equation,
    ``(i/4) H_0^{(1)}(k |x - y|)``.

    ``x`` and ``y`` are points (or broadcastable arrays of points) with the
    coordinates on the last axis.
    """
    if k <= 0:
        raise ValueError("wave number must be positive")
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dist = np.hypot(diff[..., 0], diff[..., 1])
    if np.any(k * dist < MIN_ARG):
        raise ValueError("fundamental solution evaluated at coincident points")
    return 0.25j * hankel1(0, k * dist)


def farfield_gamma(k: float) -> complex:
    """Far-field normalisation constant e^{i pi/4} / sqrt(8 pi k)."""
    if k <= 0:
        raise ValueError("wave number must be positive")
    return complex(np.exp(0.25j * math.pi) / math.sqrt(8.0 * math.pi * k))
