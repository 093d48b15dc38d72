"""Two-photon interference of a partially distinguishable photon pair.

Matrices act on mode amplitudes: column ``p`` of ``M`` holds the output
amplitudes of a photon injected into input port ``p``. All port numbers
are 1-based.

The source places one photon in each of two input ports with mutual
coherence ``gamma = xi * exp(-tau**2 / T**2)``; ``gamma`` weighs the
interference (exchange) term of every coincidence probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, unitarity_error

UNITARY_GATE_TOL = 1e-8


class NonUnitaryError(ValueError):
    """Quantum evolution requires the full (dilated) unitary."""


@dataclass(frozen=True)
class PhotonPairSource:
    port_a: int = 1
    port_b: int = 2
    coherence_time: float = 1.0  # ps
    visibility: float = 1.0

    def __post_init__(self):
        if self.port_a == self.port_b:
            raise ValueError("source ports must differ")
        if min(self.port_a, self.port_b) < 1:
            raise ValueError("source ports are 1-based")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")
        if not self.coherence_time > 0.0:
            raise ValueError("coherence_time must be positive")


def mutual_coherence(source: PhotonPairSource, tau: float) -> float:
    """gamma(tau) = xi * exp(-tau^2 / T^2) for a delay tau in ps."""
    return source.visibility * math.exp(-(tau / source.coherence_time) ** 2)


@dataclass(frozen=True)
class TwoPhotonState:
    """Pure amplitude over (signal mode, idler mode) plus the pair coherence."""

    n_modes: int
    amplitudes: np.ndarray
    coherence: float

    def __post_init__(self):
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state not normalized (norm {norm})")

    @classmethod
    def from_source(cls, source: PhotonPairSource, n_modes: int, gamma: float) -> "TwoPhotonState":
        amps = np.zeros((n_modes, n_modes), dtype=complex)
        amps[source.port_a - 1, source.port_b - 1] = 1.0
        return cls(n_modes, amps, gamma)

    def evolve(self, m) -> "TwoPhotonState":
        m = as_matrix(m)
        return TwoPhotonState(self.n_modes, m @ self.amplitudes @ m.T, self.coherence)


@dataclass(frozen=True)
class CoincidenceMap:
    n_modes: int
    probabilities: dict[tuple[int, int], float]

    @property
    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def __getitem__(self, pair: tuple[int, int]) -> float:
        m, n = pair
        return self.probabilities[(min(m, n), max(m, n))]

    def to_dict(self) -> dict:
        return {
            "pairs": [[m, n, p] for (m, n), p in sorted(self.probabilities.items())],
            "total": self.total,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CoincidenceMap":
        probs = {(int(m), int(n)): float(p) for m, n, p in data["pairs"]}
        n_modes = max(max(k) for k in probs) if probs else 0
        return cls(n_modes, probs)


def _check_inputs(M, source: PhotonPairSource, gamma: float, *ports: int) -> np.ndarray:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NonUnitaryError("transfer matrix must be square")
    if unitarity_error(M) >= UNITARY_GATE_TOL:
        raise NonUnitaryError(
            "transfer matrix is not unitary; dilate lossy transformations first")
    n = M.shape[0]
    for p in (source.port_a, source.port_b, *ports):
        if not 1 <= p <= n:
            raise ValueError(f"port {p} outside 1..{n}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return M


def coincidence(M, source: PhotonPairSource, gamma: float, m: int, n: int) -> float:
    """Probability of detecting one photon in output ``m`` and one in ``n``.

    For ``m == n`` this is the probability that both photons leave through
    the same port.
    """
    M = _check_inputs(M, source, gamma, m, n)
    p, q = source.port_a - 1, source.port_b - 1
    i, j = m - 1, n - 1
    if i == j:
        return (1.0 + gamma) * abs(M[i, p] * M[i, q]) ** 2
    direct = M[i, p] * M[j, q]
    exchange = M[i, q] * M[j, p]
    return float(abs(direct) ** 2 + abs(exchange) ** 2
                 + 2.0 * gamma * (direct * exchange.conjugate()).real)


def coincidence_map(M, source: PhotonPairSource, gamma: float) -> CoincidenceMap:
    M = _check_inputs(M, source, gamma)
    n_modes = M.shape[0]
    probs = {(m, n): coincidence(M, source, gamma, m, n)
             for m in range(1, n_modes + 1) for n in range(m, n_modes + 1)}
    return CoincidenceMap(n_modes, probs)


def p12_closed(theta: float, gamma: float) -> float:
    """Coincidences between the two lossy-MZI outputs."""
    c2 = math.cos(theta) ** 2
    s4 = math.sin(theta) ** 4
    return (c2 + 1.0) ** 2 / 8.0 - gamma * c2 / 2.0 + gamma * s4 / 8.0


def p13_closed(theta: float, gamma: float) -> float:
    """Coincidences between MZI output 1 and the loss channel."""
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    return (c2 + 1.0) * s2 / 4.0 - gamma * s2 * s2 / 4.0
