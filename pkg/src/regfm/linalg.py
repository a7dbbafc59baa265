"""Dense complex linear algebra for the data operators.

The Hermitian eigensolver is a cyclic complex Jacobi method (compiled with
numba); the SVD is built on top of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

HERMITIAN_TOL = 1e-8
#: relative floor applied to singular values before they are divided by
SIGMA_FLOOR = 1e-14

_MAX_SWEEPS = 40


class ShapeError(ValueError):
    """Matrix dimensions do not satisfy an operation's precondition."""


class NotHermitianError(ValueError):
    """Input deviates from Hermitian symmetry beyond the accepted tolerance."""


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns


@dataclass(frozen=True)
class SpectralData:
    """Singular values (descending) with left, optionally right, vectors."""

    values: np.ndarray
    left_vectors: np.ndarray  # columns u_j
    right_vectors: np.ndarray | None = None

    def __len__(self):
        return len(self.values)

    def floored_values(self) -> np.ndarray:
        if len(self.values) == 0:
            return self.values
        return np.maximum(self.values, SIGMA_FLOOR * self.values[0])


@dataclass(frozen=True)
class LstsqResult:
    solution: np.ndarray
    rank: int
    rank_deficient: bool = False
    singular_values: np.ndarray = field(default_factory=lambda: np.empty(0))


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"expected a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _square(a):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a


def symmetrize(a) -> np.ndarray:
    """Return ``(A + A*) / 2`` after checking ``A`` is nearly Hermitian."""
    a = _square(a)
    scale = np.max(np.abs(a))
    skew = np.max(np.abs(a - a.conj().T))
    if skew > HERMITIAN_TOL * scale:
        raise NotHermitianError(
            f"non-Hermitian part {skew:.3e} exceeds {HERMITIAN_TOL:g} x max entry {scale:.3e}"
        )
    return 0.5 * (a + a.conj().T)


@numba.njit(cache=True)
def _jacobi(a):
    """Cyclic complex Jacobi; returns (diagonal, accumulated rotations)."""
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    total = np.sqrt(np.sum(np.abs(a) ** 2))
    if total == 0.0:
        return np.zeros(n), v
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += abs(a[i, j]) ** 2
        if np.sqrt(off) <= 1e-15 * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane
                g_pp = c + 0j
                g_pq = s + 0j
                g_qp = -s * phase.conjugate()
                g_qq = c * phase.conjugate()
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * g_pp + akq * g_qp
                    a[k, q] = akp * g_pq + akq * g_qq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = g_pp.conjugate() * apk + g_qp.conjugate() * aqk
                    a[q, k] = g_pq.conjugate() * apk + g_qq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * g_pp + vkq * g_qp
                    v[k, q] = vkp * g_pq + vkq * g_qq
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i].real
    return d, v


def _fix_phase(vectors):
    """Rotate each column so its largest-modulus entry is real positive."""
    idx = np.argmax(np.abs(vectors) > np.abs(vectors).max(axis=0) * (1 - 1e-12), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    mag = np.abs(lead)
    phase = np.where(mag > 0, lead / np.where(mag > 0, mag, 1.0), 1.0)
    return vectors / phase


def hermitian_eig(a) -> HermitianEig:
    """Eigendecomposition of a (near-)Hermitian matrix, eigenvalues ascending."""
    h = symmetrize(a)
    vals, vecs = _jacobi(h)
    order = np.argsort(vals, kind="stable")
    return HermitianEig(vals[order], _fix_phase(vecs[:, order]))


def _is_hermitian(a):
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T)) <= HERMITIAN_TOL * np.max(
        np.abs(a)
    )


def svd(a, right: bool = True) -> SpectralData:
    """Singular value decomposition ``A = U diag(s) V*`` with ``s`` descending.

    Hermitian input is decomposed directly (``s = |lambda|``).  Otherwise
    the right vectors come from the eigenvectors of ``A* A`` (or the left
    ones from ``A A*`` for wide matrices) and the other side is recovered
    by orthonormalising ``A V``.
    """
    a = as_matrix(a)
    m, n = a.shape
    if _is_hermitian(a):
        eig = hermitian_eig(a)
        order = np.argsort(-np.abs(eig.eigenvalues), kind="stable")
        lam = eig.eigenvalues[order]
        u = eig.eigenvectors[:, order]
        sign = np.where(lam < 0, -1.0, 1.0)
        return SpectralData(np.abs(lam), u, u * sign if right else None)
    if m < n:
        t = svd(a.conj().T)
        return SpectralData(t.values, t.right_vectors, t.left_vectors if right else None)
    eig = hermitian_eig(a.conj().T @ a)
    order = np.argsort(-eig.eigenvalues, kind="stable")
    s = np.sqrt(np.clip(eig.eigenvalues[order], 0.0, None))
    v = eig.eigenvectors[:, order]
    q, r = np.linalg.qr(a @ v, mode="reduced")
    d = np.diagonal(r)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    u = _fix_phase(q * phase)
    # keep the pairing A v_j = s_j u_j after the left phase normalisation
    rot = np.sum(u.conj() * (q * phase), axis=0)
    v = v * np.where(np.abs(rot) > 0, rot.conj() / np.where(np.abs(rot) > 0, np.abs(rot), 1.0), 1.0)
    return SpectralData(s, u, v if right else None)


def spectral_norm(a) -> float:
    """Largest singular value."""
    a = as_matrix(a)
    if _is_hermitian(a):
        return float(np.max(np.abs(hermitian_eig(a).eigenvalues)))
    small = a.conj().T @ a if a.shape[0] >= a.shape[1] else a @ a.conj().T
    return float(np.sqrt(max(hermitian_eig(small).eigenvalues[-1], 0.0)))


def hermitian_abs(a) -> np.ndarray:
    """Operator absolute value ``V diag(|lambda|) V*`` of a Hermitian matrix."""
    eig = hermitian_eig(a)
    v = eig.eigenvectors
    out = (v * np.abs(eig.eigenvalues)) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def lstsq(a, b, rcond: float = 1e-13) -> LstsqResult:
    """Least-squares solution of ``A x = b`` for a tall matrix.

    Columns are equilibrated before the (LAPACK) solve since collocation
    matrices built from Hankel functions have wildly different column
    scales.  Numerical rank below ``n`` is reported, and the minimum-norm
    solution of the equilibrated system is returned.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        raise ShapeError(f"lstsq needs rows >= cols, got {a.shape}")
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != m:
        raise ShapeError(f"right-hand side has {b.shape[0]} rows, expected {m}")
    scale = np.linalg.norm(a, axis=0)
    scale[scale == 0] = 1.0
    x, _, rank, sv = np.linalg.lstsq(a / scale, b, rcond=rcond)
    x = x / (scale if x.ndim == 1 else scale[:, None])
    return LstsqResult(x, int(rank), int(rank) < n, sv)
