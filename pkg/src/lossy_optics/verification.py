"""Property suites run by ``lossy-optics verify``.

Each suite returns the largest deviation it saw together with the inputs of
the worst case, so a breach can be reproduced from the report alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import compile_netlist, decompose
from .dilation import LossyTransform, dilate
from .experiment import device_unitary
from .fock import oracle_coincidence, oracle_coincidence_map
from .linalg import max_norm, unitarity_error
from .quantum import PhotonPairSource, coincidence_map, p12_closed, p13_closed
from .sampling import random_contraction, random_unitary

GAMMAS = (0.0, 0.3, 0.87, 1.0)


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    max_deviation: float = 0.0
    worst_case: dict = field(default_factory=dict)
    cases: int = 0

    def record(self, deviation: float, **case) -> None:
        self.cases += 1
        if deviation > self.max_deviation or not self.worst_case:
            self.max_deviation = float(deviation)
            self.worst_case = case

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "max_deviation": self.max_deviation,
                "cases": self.cases, "passed": self.passed, "worst_case": self.worst_case}


def _mat(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def closed_form_oracle_suite() -> SuiteResult:
    res = SuiteResult("closed_form_vs_oracle", 1e-12)
    src = PhotonPairSource()
    for theta in np.linspace(0.0, math.pi / 2, 21):
        device = device_unitary(theta)
        for gamma in np.linspace(0.0, 1.0, 11):
            oracle = oracle_coincidence_map(device, src, gamma)
            dev = max(abs(oracle[(1, 2)] - p12_closed(theta, gamma)),
                      abs(oracle[(1, 3)] - p13_closed(theta, gamma)))
            res.record(dev, theta=float(theta), gamma=float(gamma))
    return res


def random_oracle_suites(trials: int, rng: np.random.Generator) -> list[SuiteResult]:
    oracle = SuiteResult("coincidence_vs_oracle", 1e-12)
    norm = SuiteResult("normalization", 1e-12)
    gauge = SuiteResult("phase_invariance", 1e-14)
    for _ in range(trials):
        n = int(rng.integers(3, 6))
        u = random_unitary(n, rng)
        p, q = (int(x) + 1 for x in rng.choice(n, size=2, replace=False))
        src = PhotonPairSource(p, q)
        gamma = float(rng.choice(GAMMAS))
        m, k = (int(x) for x in rng.integers(1, n + 1, size=2))
        case = dict(matrix=_mat(u), port_a=p, port_b=q, gamma=gamma)

        cmap = coincidence_map(u, src, gamma)
        dev = abs(cmap[(m, k)] - oracle_coincidence(u, src, gamma, m, k))
        oracle.record(dev, outputs=[m, k], **case)
        norm.record(abs(cmap.total - 1.0), **case)

        left = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        right = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        gauged = coincidence_map(left[:, None] * u * right[None, :], src, gamma)
        gauge.record(max(abs(gauged.probabilities[key] - val)
                         for key, val in cmap.probabilities.items()), **case)
    return [oracle, norm, gauge]


def dilation_suites(trials: int, rng: np.random.Generator) -> list[SuiteResult]:
    unitary = SuiteResult("dilation_unitarity", 1e-10)
    block = SuiteResult("dilation_block_recovery", 1e-10)
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        t = random_contraction(n, rng)
        d = dilate(LossyTransform.from_matrix(t))
        unitary.record(unitarity_error(d.matrix), matrix=_mat(t))
        block.record(max_norm(d.matrix[:n, :n] - t), matrix=_mat(t))
    return [unitary, block]


def decomposition_suite(trials: int, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("decompose_roundtrip", 1e-8)
    for _ in range(trials):
        n = int(rng.integers(2, 7))
        u = random_unitary(n, rng)
        res.record(max_norm(compile_netlist(decompose(u)) - u), matrix=_mat(u))
    return res


def run_all(trials: int = 200, seed: int = 0, inject_failure: bool = False) -> dict:
    rng = np.random.default_rng(seed)
    suites = [closed_form_oracle_suite()]
    suites += random_oracle_suites(trials, rng)
    suites += dilation_suites(trials, rng)
    suites.append(decomposition_suite(trials, rng))
    if inject_failure:
        suites[0].record(1.0, injected=True)
    return {
        "seed": seed,
        "trials": trials,
        "passed": all(s.passed for s in suites),
        "suites": {s.name: s.to_dict() for s in suites},
    }
