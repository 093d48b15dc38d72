"""HOM delay/loss scans, visibility metrics and synthetic coincidence counts."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circuit import compile_netlist, lossy_mzi_netlist
from .dilation import AMPLITUDE, LOSS_CONVENTIONS, eta_from_loss
from .quantum import (PhotonPairSource, coincidence, coincidence_map, mutual_coherence,
                      p12_closed, p13_closed)

OBSERVABLES = ("P12", "P13", "P23", "map")
METRICS = ("dip", "peak", "michelson")

CSV_COLUMNS = ["loss", "tau_ps", "gamma", "value", "observable", "convention"]


def default_tau_grid() -> list[float]:
    return np.linspace(-2.0, 2.0, 81).tolist()


@dataclass(frozen=True)
class ScanConfig:
    losses: tuple[float, ...]
    tau_grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_tau_grid()))
    loss_convention: str = AMPLITUDE
    source: PhotonPairSource = field(default_factory=PhotonPairSource)
    observable: str = "P12"

    def __post_init__(self):
        object.__setattr__(self, "losses", tuple(float(x) for x in self.losses))
        object.__setattr__(self, "tau_grid", tuple(float(x) for x in self.tau_grid))
        if not self.tau_grid:
            raise ValueError("tau_grid: must be non-empty")
        if any(b < a for a, b in zip(self.tau_grid, self.tau_grid[1:])):
            raise ValueError("tau_grid: must be sorted ascending")
        if not self.losses:
            raise ValueError("losses: must be non-empty")
        for k, x in enumerate(self.losses):
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"losses[{k}]: {x} outside [0, 1]")
        if self.loss_convention not in LOSS_CONVENTIONS:
            raise ValueError(f"loss_convention: expected one of {LOSS_CONVENTIONS}")
        if self.observable not in OBSERVABLES:
            raise ValueError(f"observable: expected one of {OBSERVABLES}")

    def to_dict(self) -> dict:
        s = self.source
        return {
            "losses": list(self.losses),
            "tau_grid": list(self.tau_grid),
            "loss_convention": self.loss_convention,
            "observable": self.observable,
            "source": {"port_a": s.port_a, "port_b": s.port_b,
                       "coherence_time": s.coherence_time, "visibility": s.visibility},
        }


@dataclass(frozen=True)
class ScanResult:
    """Scan values indexed ``[loss, tau]`` (``[loss, tau, pair]`` for maps)."""

    config: ScanConfig
    gammas: np.ndarray
    values: np.ndarray
    long_delay_baseline: np.ndarray
    zero_delay_value: np.ndarray
    labels: tuple[str, ...] = ()

    def rows(self):
        """Yield ``(loss, tau, gamma, value, observable)`` in grid order."""
        cfg = self.config
        for a, loss in enumerate(cfg.losses):
            for b, tau in enumerate(cfg.tau_grid):
                if cfg.observable == "map":
                    for c, label in enumerate(self.labels):
                        yield loss, tau, self.gammas[b], self.values[a, b, c], label
                else:
                    yield loss, tau, self.gammas[b], self.values[a, b], cfg.observable


@dataclass(frozen=True)
class CountsModel:
    pair_rate: float = 1000.0
    integration_time: float = 1.0
    dark_coincidence_rate: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.pair_rate, self.integration_time, self.dark_coincidence_rate) < 0:
            raise ValueError("rates and integration time must be non-negative")


def theta_for_loss(loss: float, convention: str = AMPLITUDE) -> float:
    return math.acos(min(1.0, eta_from_loss(loss, convention)))


def device_unitary(theta: float) -> np.ndarray:
    return compile_netlist(lossy_mzi_netlist(theta))


def _pair_label(m: int, n: int) -> str:
    return f"P{m}{n}"


def _evaluate(observable: str, theta: float, source: PhotonPairSource, gamma: float,
              device: Optional[np.ndarray]):
    if observable == "P12":
        return p12_closed(theta, gamma)
    if observable == "P13":
        return p13_closed(theta, gamma)
    if observable == "P23":
        return coincidence(device, source, gamma, 2, 3)
    cmap = coincidence_map(device, source, gamma)
    return [p for _, p in sorted(cmap.probabilities.items())]


def run_scan(cfg: ScanConfig, verify: bool = False) -> ScanResult:
    """Evaluate the observable over the (loss, delay) grid.

    With ``verify`` every point is recomputed by the Fock-space oracle and a
    mismatch beyond 1e-12 raises ``AssertionError``.
    """
    src = cfg.source
    if cfg.observable in ("P12", "P13") and (src.port_a, src.port_b) not in ((1, 2), (2, 1)):
        raise ValueError("closed-form observables assume the source feeds ports 1 and 2")
    gammas = np.array([mutual_coherence(src, tau) for tau in cfg.tau_grid])
    values, base, zero = [], [], []
    labels: tuple[str, ...] = ()
    for loss in cfg.losses:
        theta = theta_for_loss(loss, cfg.loss_convention)
        device = device_unitary(theta) if cfg.observable in ("P23", "map") or verify else None
        values.append([_evaluate(cfg.observable, theta, src, g, device) for g in gammas])
        base.append(_evaluate(cfg.observable, theta, src, 0.0, device))
        zero.append(_evaluate(cfg.observable, theta, src, src.visibility, device))
        if verify:
            _verify_row(cfg, device, gammas, values[-1])
    if cfg.observable == "map":
        n = 3
        labels = tuple(_pair_label(m, k) for m in range(1, n + 1) for k in range(m, n + 1))
    return ScanResult(config=cfg, gammas=gammas, values=np.array(values),
                      long_delay_baseline=np.array(base), zero_delay_value=np.array(zero),
                      labels=labels)


def _verify_row(cfg: ScanConfig, device, gammas, row) -> None:
    from .fock import oracle_coincidence_map

    for g, value in zip(gammas, row):
        oracle = oracle_coincidence_map(device, cfg.source, g)
        if cfg.observable == "map":
            expected = [p for _, p in sorted(oracle.items())]
        else:
            m, n = int(cfg.observable[1]), int(cfg.observable[2])
            expected = oracle[(m, n)]
        dev = float(np.max(np.abs(np.asarray(value) - np.asarray(expected))))
        if dev > 1e-12:
            raise AssertionError(f"oracle mismatch {dev:.3g} at gamma={g}")


def visibility(zero_delay: float, long_delay: float, metric: str = "dip") -> float:
    if metric in ("dip", "peak"):
        if long_delay <= 0:
            raise ZeroDivisionError("long-delay baseline must be positive")
        ratio = zero_delay / long_delay
        return 1.0 - ratio if metric == "dip" else ratio - 1.0
    if metric == "michelson":
        total = zero_delay + long_delay
        if total <= 0:
            raise ZeroDivisionError("zero_delay + long_delay must be positive")
        return abs(zero_delay - long_delay) / total
    raise ValueError(f"unknown visibility metric {metric!r}")


def scan_visibilities(result: ScanResult) -> list[dict[str, Optional[float]]]:
    """All three metrics per loss; ``None`` where the baseline vanishes."""
    out = []
    for z, b in zip(result.zero_delay_value, result.long_delay_baseline):
        row = {}
        for metric in METRICS:
            try:
                row[metric] = visibility(float(z), float(b), metric)
            except ZeroDivisionError:
                row[metric] = None
        out.append(row)
    return out


def expected_counts(scan: ScanResult, model: CountsModel) -> np.ndarray:
    if scan.config.observable == "map":
        raise ValueError("counts are generated for single observables only")
    base = scan.long_delay_baseline[:, None]
    # A vanishing baseline means the observable is identically zero.
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = np.where(base > 0, scan.values / np.where(base > 0, base, 1.0), 0.0)
    return (model.pair_rate * model.integration_time * normalized
            + model.dark_coincidence_rate * model.integration_time)


def synthesize_counts(scan: ScanResult, model: CountsModel) -> np.ndarray:
    """Poisson-sampled coincidence counts, drawn in row-major grid order."""
    mean = np.clip(expected_counts(scan, model), 0.0, None)
    rng = np.random.default_rng(model.rng_seed)
    return rng.poisson(mean).astype(np.int64)


def crossing_loss(xi: float) -> float:
    """Amplitude loss where P12 at zero delay equals its long-delay value.

    The balance ``(xi/2) c = (xi/8) (1 - c)^2`` with ``c = cos^2 theta`` does
    not depend on ``xi``; its root in [0, 1] is ``c = 3 - 2 sqrt(2)``.
    """
    if not 0.0 < xi <= 1.0:
        raise ValueError(f"xi must lie in (0, 1], got {xi}")
    c = 3.0 - 2.0 * math.sqrt(2.0)
    return 1.0 - math.sqrt(c)


def write_scan_csv(result: ScanResult, stream=None, counts: Optional[np.ndarray] = None,
                   seed: Optional[int] = None) -> str:
    buf = io.StringIO() if stream is None else stream
    writer = csv.writer(buf, lineterminator="\n")
    header = list(CSV_COLUMNS) + (["counts", "seed"] if counts is not None else [])
    writer.writerow(header)
    conv = result.config.loss_convention
    flat_counts = counts.ravel() if counts is not None else None
    for k, (loss, tau, gamma, value, obs) in enumerate(result.rows()):
        row = [f"{loss:.17g}", f"{tau:.17g}", f"{gamma:.17g}", f"{value:.17g}", obs, conv]
        if flat_counts is not None:
            row += [str(int(flat_counts[k])), str(seed)]
        writer.writerow(row)
    return buf.getvalue() if stream is None else ""
