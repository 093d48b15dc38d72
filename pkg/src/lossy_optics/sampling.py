"""Seeded random matrices for property checks."""

from __future__ import annotations

import numpy as np

from .linalg import svd


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_contraction(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with spectral norm drawn uniformly from [0, 1]."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return z * (rng.uniform(0.0, 1.0) / svd(z).singular_values[0])


def random_disc_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Entries uniform in the complex unit disc."""
    r = np.sqrt(rng.uniform(0.0, 1.0, (n, n)))
    phi = rng.uniform(0.0, 2 * np.pi, (n, n))
    return r * np.exp(1j * phi)
