"""Dense complex matrix helpers, a one-sided Jacobi SVD and small permanents.

Matrices are plain ``numpy`` complex arrays. The SVD follows the factor
ordering used throughout the package::

    A = V @ diag(s) @ U

so ``V`` holds the left singular vectors (columns) and ``U`` holds the
conjugated right singular vectors (rows). In the conventional notation
``A = W S X^H`` this means ``V = W`` and ``U = X^H``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10
MAX_PERMANENT_SIZE = 4
RANK_CUTOFF = 1e-12


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible with an operation."""


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2D complex array."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _require_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def max_norm(a) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(a)))


def unitarity_error(a) -> float:
    """max |(a^H a - I)_ij| for a square matrix."""
    a = as_matrix(a)
    _require_square(a)
    return max_norm(a.conj().T @ a - np.eye(a.shape[0]))


def is_unitary(a, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return unitarity_error(a) < tol


def block_diag(*blocks) -> np.ndarray:
    """Block-diagonal matrix; integer blocks stand for identities of that size."""
    mats = [np.eye(b, dtype=complex) if isinstance(b, (int, np.integer)) else as_matrix(b)
            for b in blocks]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


@dataclass(frozen=True)
class SvdFactors:
    """``V @ diag(singular_values) @ U`` with unitary ``V`` and ``U``."""

    V: np.ndarray
    singular_values: np.ndarray
    U: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.V @ np.diag(self.singular_values) @ self.U


def _complete_basis(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend ``k`` orthonormal columns to an ``n x n`` unitary."""
    k = cols.shape[1]
    if k == n:
        return cols
    q, _ = np.linalg.qr(np.hstack([cols, np.eye(n, dtype=complex)]))
    # qr may flip phases of the leading columns; keep the originals.
    return np.hstack([cols, q[:, k:n]])


def svd(a, tol: float = 1e-15, max_sweeps: int = 60) -> SvdFactors:
    """Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

    Columns of a working copy of ``a`` are rotated pairwise until mutually
    orthogonal. The accumulated rotation ``X`` gives ``a @ X = B`` with
    orthogonal columns; the column norms of ``B`` are the singular values.
    Left vectors for (numerically) zero singular values are completed to a
    unitary basis.
    """
    a = as_matrix(a)
    _require_square(a)
    n = a.shape[0]
    b = a.copy()
    x = np.eye(n, dtype=complex)

    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = np.vdot(b[:, p], b[:, p]).real
                beta = np.vdot(b[:, q], b[:, q]).real
                gamma = np.vdot(b[:, p], b[:, q])
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                for m in (b, x):
                    mp, mq = m[:, p].copy(), m[:, q].copy()
                    m[:, p] = c * mp - s * np.conj(phase) * mq
                    m[:, q] = s * phase * mp + c * mq
        if not rotated:
            break

    sigma = np.linalg.norm(b, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, b, x = sigma[order], b[:, order], x[:, order]

    # Columns this small are dominated by rounding; their left vectors are
    # replaced by a completion, costing at most RANK_CUTOFF in reconstruction.
    keep = int(np.count_nonzero(sigma > RANK_CUTOFF * sigma[0])) if sigma[0] > 0 else 0
    left = _complete_basis(b[:, :keep] / sigma[:keep], n)
    return SvdFactors(V=left, singular_values=sigma, U=x.conj().T)


def spectral_norm(a) -> float:
    return float(svd(a).singular_values[0])


def permanent(a) -> complex:
    """Permanent by direct expansion over permutations (at most 4x4)."""
    a = as_matrix(a)
    _require_square(a)
    n = a.shape[0]
    if n > MAX_PERMANENT_SIZE:
        raise DimensionError(
            f"permanent limited to {MAX_PERMANENT_SIZE}x{MAX_PERMANENT_SIZE}, got {n}x{n}")
    total = 0j
    for perm in itertools.permutations(range(n)):
        term = 1 + 0j
        for i, j in enumerate(perm):
            term *= a[i, j]
        total += term
    return complex(total)
