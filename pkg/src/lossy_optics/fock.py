"""Brute-force Fock-space evolution of the two-photon source.

Independent of the closed-form coincidence formula: states are dictionaries
over occupation-number tuples, creation operators are applied one at a time
with their bosonic sqrt(n + 1) factors, and the density matrix is built
term by term and propagated as ``U_F rho U_F^H`` where ``U_F`` is the Fock
representation of the mode transformation.

Single-particle labels are ``(mode, species)`` with species 0 = signal and
1 = idler, flattened to ``species * n_modes + mode`` (0-based).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

from .quantum import PhotonPairSource, _check_inputs

SIGNAL, IDLER = 0, 1

Occupation = tuple[int, ...]
FockState = dict[Occupation, complex]


def vacuum(n_labels: int) -> FockState:
    return {(0,) * n_labels: 1.0 + 0j}


def create(state: FockState, label: int) -> FockState:
    out: FockState = defaultdict(complex)
    for occ, amp in state.items():
        new = list(occ)
        new[label] += 1
        out[tuple(new)] += amp * math.sqrt(new[label])
    return dict(out)


def create_superposition(state: FockState, coeffs: dict[int, complex]) -> FockState:
    """Apply ``sum_label coeffs[label] * a_label^dagger``."""
    out: FockState = defaultdict(complex)
    for label, c in coeffs.items():
        if c == 0:
            continue
        for occ, amp in create(state, label).items():
            out[occ] += c * amp
    return dict(out)


class TwoSpeciesFock:
    """Sector with exactly one signal and one idler photon over ``n_modes`` modes."""

    def __init__(self, n_modes: int):
        self.n_modes = n_modes
        self.n_labels = 2 * n_modes
        self.basis: list[Occupation] = []
        for ms, mi in itertools.product(range(n_modes), repeat=2):
            occ = [0] * self.n_labels
            occ[self.label(ms, SIGNAL)] += 1
            occ[self.label(mi, IDLER)] += 1
            self.basis.append(tuple(occ))
        self.index = {occ: k for k, occ in enumerate(self.basis)}

    def label(self, mode: int, species: int) -> int:
        return species * self.n_modes + mode

    def pair_state(self, signal_mode: int, idler_mode: int, M=None) -> FockState:
        """``a_s^dag a_i^dag |0>`` with each creation operator optionally mapped
        through ``a_p^dag -> sum_m M[m, p] b_m^dag``."""
        state = vacuum(self.n_labels)
        for mode, species in ((idler_mode, IDLER), (signal_mode, SIGNAL)):
            if M is None:
                state = create(state, self.label(mode, species))
            else:
                coeffs = {self.label(m, species): M[m, mode] for m in range(self.n_modes)}
                state = create_superposition(state, coeffs)
        return state

    def vector(self, state: FockState) -> np.ndarray:
        v = np.zeros(len(self.basis), dtype=complex)
        for occ, amp in state.items():
            v[self.index[occ]] += amp
        return v

    def transfer(self, M) -> np.ndarray:
        """Fock-space matrix of the mode transformation on this sector."""
        cols = []
        for occ in self.basis:
            ms = occ.index(1, 0, self.n_modes)
            mi = occ.index(1, self.n_modes) - self.n_modes
            cols.append(self.vector(self.pair_state(ms, mi, M)))
        return np.column_stack(cols)

    def source_density(self, source: PhotonPairSource, gamma: float) -> np.ndarray:
        p, q = source.port_a - 1, source.port_b - 1
        k1 = self.vector(self.pair_state(p, q))  # signal in a, idler in b
        k2 = self.vector(self.pair_state(q, p))  # signal in b, idler in a
        return (0.5 * (np.outer(k1, k1.conj()) + np.outer(k2, k2.conj()))
                + 0.5 * gamma * (np.outer(k1, k2.conj()) + np.outer(k2, k1.conj())))

    def projector_weight(self, rho: np.ndarray, signal_mode: int, idler_mode: int) -> float:
        k = self.vector(self.pair_state(signal_mode, idler_mode))
        return float(np.real(k.conj() @ rho @ k))


def evolved_density(M, source: PhotonPairSource, gamma: float) -> tuple[TwoSpeciesFock, np.ndarray]:
    M = _check_inputs(M, source, gamma)
    space = TwoSpeciesFock(M.shape[0])
    uf = space.transfer(M)
    rho = space.source_density(source, gamma)
    return space, uf @ rho @ uf.conj().T


def oracle_coincidence(M, source: PhotonPairSource, gamma: float, m: int, n: int) -> float:
    """Coincidence probability read off the evolved Fock density matrix."""
    space, rho = evolved_density(M, source, gamma)
    if not (1 <= m <= space.n_modes and 1 <= n <= space.n_modes):
        raise ValueError("output port out of range")
    i, j = m - 1, n - 1
    if i == j:
        return space.projector_weight(rho, i, i)
    return space.projector_weight(rho, i, j) + space.projector_weight(rho, j, i)


def oracle_coincidence_map(M, source: PhotonPairSource, gamma: float) -> dict[tuple[int, int], float]:
    space, rho = evolved_density(M, source, gamma)
    out = {}
    for i in range(space.n_modes):
        for j in range(i, space.n_modes):
            w = space.projector_weight(rho, i, j)
            if i != j:
                w += space.projector_weight(rho, j, i)
            out[(i + 1, j + 1)] = w
    return out
