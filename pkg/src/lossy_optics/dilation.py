"""Embedding of lossy (contractive) transformations into larger unitaries.

A transformation ``T`` with spectral norm at most one is factored as
``T = V @ diag(s) @ U``. Every singular value ``s_j < 1`` gets its own
ancilla mode, coupled to system mode ``j`` by the two-mode block
``[[cos t, i sin t], [i sin t, cos t]]`` with ``cos t = s_j``, so that::

    M = blockdiag(V, I_k) @ Theta @ blockdiag(U, I_k)

is unitary and its top-left ``N x N`` block is ``T``. Ancillas are appended
after the system modes in descending singular-value order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import SvdFactors, as_matrix, block_diag, max_norm, svd

GAIN_TOL = 1e-9
UNIT_SIGMA_TOL = 1e-12
ETA_MATCH_TOL = 1e-12

AMPLITUDE = "amplitude"
POWER = "power"
LOSS_CONVENTIONS = (AMPLITUDE, POWER)


class GainError(ValueError):
    """The transformation amplifies some input and cannot be dilated passively."""


# Factors of the 50/50 lossy beamsplitter, T(eta) = V diag(1, eta) U.
BEAMSPLITTER_U = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)
BEAMSPLITTER_V = np.array([[1j, 1j], [-1, 1]], dtype=complex) / math.sqrt(2)


def beamsplitter_matrix(eta: float) -> np.ndarray:
    """Closed form of the lossy 50/50 beamsplitter transfer matrix."""
    return 0.5 * np.array([[-eta + 1j, -1 + 1j * eta],
                           [-1 + 1j * eta, eta - 1j]], dtype=complex)


def coupling_block(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


@dataclass(frozen=True)
class LossyTransform:
    matrix: np.ndarray
    svd: SvdFactors
    eta: Optional[float] = None

    def __post_init__(self):
        s = self.svd.singular_values
        if s[0] > 1 + GAIN_TOL:
            raise GainError(
                f"spectral norm {s[0]:.17g} exceeds 1; gain is not representable")
        if self.eta is not None and max_norm(self.matrix - beamsplitter_matrix(self.eta)) > ETA_MATCH_TOL:
            raise ValueError("matrix does not match the lossy beamsplitter at the recorded eta")

    @classmethod
    def from_matrix(cls, t) -> "LossyTransform":
        t = as_matrix(t)
        return cls(matrix=t, svd=svd(t))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DilatedUnitary:
    matrix: np.ndarray
    system_ports: list[int]
    ancilla_ports: list[int]
    thetas: list[float] = field(default_factory=list)

    @property
    def n_ancilla(self) -> int:
        return len(self.ancilla_ports)

    def embedded(self, n_modes: int) -> np.ndarray:
        """The unitary padded with decoupled (identity) modes up to ``n_modes``."""
        extra = n_modes - self.matrix.shape[0]
        if extra < 0:
            raise ValueError("cannot embed into fewer modes")
        return block_diag(self.matrix, extra) if extra else self.matrix.copy()

    def to_dict(self) -> dict:
        from .matrix_io import to_pairs

        return {
            "matrix": to_pairs(self.matrix),
            "system_ports": list(self.system_ports),
            "ancilla_ports": list(self.ancilla_ports),
            "thetas": list(self.thetas),
        }


def lossy_beamsplitter(eta: float) -> LossyTransform:
    """Lossy 50/50 beamsplitter with the analytic factors ``V diag(1, eta) U``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    factors = SvdFactors(V=BEAMSPLITTER_V.copy(),
                         singular_values=np.array([1.0, float(eta)]),
                         U=BEAMSPLITTER_U.copy())
    return LossyTransform(matrix=beamsplitter_matrix(eta), svd=factors, eta=float(eta))


def loss_parameter(t: LossyTransform, convention: str = AMPLITUDE) -> float:
    """Loss of the transformation: ``1 - eta`` (amplitude) or ``1 - eta**2`` (power).

    Without a recorded ``eta`` the smallest singular value is used.
    """
    eta = t.eta if t.eta is not None else float(t.svd.singular_values[-1])
    if convention == AMPLITUDE:
        return 1.0 - eta
    if convention == POWER:
        return 1.0 - eta * eta
    raise ValueError(f"unknown loss convention {convention!r}")


def eta_from_loss(loss: float, convention: str = AMPLITUDE) -> float:
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must lie in [0, 1], got {loss}")
    if convention == AMPLITUDE:
        return 1.0 - loss
    if convention == POWER:
        return math.sqrt(1.0 - loss)
    raise ValueError(f"unknown loss convention {convention!r}")


def dilate(t: LossyTransform) -> DilatedUnitary:
    factors = t.svd
    n = t.size
    sigma = np.minimum(factors.singular_values, 1.0)
    deficient = [j for j, s in enumerate(sigma) if s < 1.0 - UNIT_SIGMA_TOL]
    k = len(deficient)

    theta_mix = np.eye(n + k, dtype=complex)
    thetas = []
    for a, j in enumerate(deficient):
        theta = math.acos(sigma[j])
        idx = [j, n + a]
        theta_mix[np.ix_(idx, idx)] = coupling_block(theta)
        thetas.append(theta)

    m = block_diag(factors.V, k) @ theta_mix @ block_diag(factors.U, k)
    return DilatedUnitary(matrix=m,
                          system_ports=list(range(1, n + 1)),
                          ancilla_ports=list(range(n + 1, n + k + 1)),
                          thetas=thetas)
