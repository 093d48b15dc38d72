"""Photonic netlists: couplers and phase shifters over numbered waveguides.

Text format (line oriented, 1-based ports, ``#`` starts a comment)::

    modes 3
    coupler 1 2 0.78539816339744828
    phase 1 1.5707963267948966

Elements are listed in the order light meets them, so the compiled transfer
matrix multiplies later elements on the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, unitarity_error

COUPLER = "coupler"
PHASE = "phase"

DECOMPOSE_TOL = 1e-8
MAX_DECOMPOSE_SIZE = 8


class NetlistError(ValueError):
    pass


class NetlistParseError(NetlistError):
    def __init__(self, lineno: int, token: str, message: str):
        self.lineno = lineno
        self.token = token
        super().__init__(f"line {lineno}: {message} (at {token!r})")


@dataclass(frozen=True)
class Element:
    kind: str
    ports: tuple[int, ...]
    angle: float

    def __post_init__(self):
        if self.kind == COUPLER:
            if len(self.ports) != 2:
                raise NetlistError("coupler needs exactly two ports")
            if self.ports[0] == self.ports[1]:
                raise NetlistError(f"coupler ports must be distinct, got {self.ports}")
        elif self.kind == PHASE:
            if len(self.ports) != 1:
                raise NetlistError("phase shifter needs exactly one port")
        else:
            raise NetlistError(f"unknown element kind {self.kind!r}")
        if not math.isfinite(self.angle):
            raise NetlistError("element angle must be finite")

    def check_ports(self, n_modes: int) -> None:
        for p in self.ports:
            if not 1 <= p <= n_modes:
                raise NetlistError(f"port {p} outside 1..{n_modes}")


def coupler(i: int, j: int, theta: float) -> Element:
    return Element(COUPLER, (int(i), int(j)), float(theta))


def phase(i: int, phi: float) -> Element:
    return Element(PHASE, (int(i),), float(phi))


@dataclass(frozen=True)
class Netlist:
    n_modes: int
    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        if self.n_modes < 1:
            raise NetlistError("netlist needs at least one mode")
        object.__setattr__(self, "elements", tuple(self.elements))
        for e in self.elements:
            e.check_ports(self.n_modes)


def element_matrix(e: Element, n_modes: int) -> np.ndarray:
    e.check_ports(n_modes)
    m = np.eye(n_modes, dtype=complex)
    if e.kind == COUPLER:
        i, j = (p - 1 for p in e.ports)
        c, s = math.cos(e.angle), math.sin(e.angle)
        m[i, i] = m[j, j] = c
        m[i, j] = m[j, i] = 1j * s
    else:
        i = e.ports[0] - 1
        m[i, i] = complex(math.cos(e.angle), math.sin(e.angle))
    return m


def compile_netlist(nl: Netlist) -> np.ndarray:
    """Transfer matrix of the netlist (first element acts first)."""
    m = np.eye(nl.n_modes, dtype=complex)
    for e in nl.elements:
        m = element_matrix(e, nl.n_modes) @ m
    return m


def lossy_mzi_netlist(theta: float) -> Netlist:
    """Three-waveguide lossy Mach-Zehnder: 50/50 coupler, loss coupler into
    waveguide 3, pi/2 phase on waveguide 1, 50/50 coupler."""
    if not 0.0 <= theta <= math.pi / 2:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    return Netlist(3, (
        coupler(1, 2, math.pi / 4),
        coupler(2, 3, theta),
        phase(1, math.pi / 2),
        coupler(1, 2, math.pi / 4),
    ))


def decompose(u) -> Netlist:
    """Triangular mesh realizing a unitary.

    Right-multiplies ``u`` by column rotations, working rows bottom-up and
    columns left-to-right, until only a diagonal of phases remains::

        u @ B_1 @ ... @ B_K = D   =>   u = D @ B_K^H @ ... @ B_1^H

    Each ``B^H`` is a phase on the left column followed by a coupler, so the
    netlist reads ``B_1^H, ..., B_K^H`` and ends with a per-mode phase layer.
    """
    u = as_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n) or not 2 <= n <= MAX_DECOMPOSE_SIZE:
        raise NetlistError(f"decompose supports square sizes 2..{MAX_DECOMPOSE_SIZE}, got {u.shape}")
    if unitarity_error(u) >= DECOMPOSE_TOL:
        raise NetlistError("decompose requires a unitary matrix")

    w = u.copy()
    elements = []
    for row in range(n - 1, 0, -1):
        for col in range(row):
            a, b = w[row, col], w[row, col + 1]
            theta = math.atan2(abs(a), abs(b))
            phi = 0.0
            if a != 0 and b != 0:
                phi = math.remainder(float(np.angle(a) - np.angle(b)) - math.pi / 2, 2 * math.pi)
            # w <- w @ (C(theta) P(phi))^H acting on columns col, col+1
            block = np.array([[math.cos(theta), 1j * math.sin(theta)],
                              [1j * math.sin(theta), math.cos(theta)]]) @ np.diag(
                [np.exp(1j * phi), 1.0])
            cols = [col, col + 1]
            w[:, cols] = w[:, cols] @ block.conj().T
            elements.append(phase(col + 1, phi))
            elements.append(coupler(col + 1, col + 2, theta))
    for k in range(n):
        elements.append(phase(k + 1, float(np.angle(w[k, k]))))
    return Netlist(n, tuple(elements))


def _format_angle(x: float) -> str:
    return f"{x:.17g}"


def serialize(nl: Netlist) -> str:
    lines = [f"modes {nl.n_modes}"]
    for e in nl.elements:
        ports = " ".join(str(p) for p in e.ports)
        lines.append(f"{e.kind} {ports} {_format_angle(e.angle)}")
    return "\n".join(lines) + "\n"


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise NetlistParseError(lineno, tok, f"malformed {what}") from None


def _parse_angle(tok: str, lineno: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise NetlistParseError(lineno, tok, "malformed angle") from None
    if not math.isfinite(x):
        raise NetlistParseError(lineno, tok, "angle must be finite")
    return x


def parse(text: str) -> Netlist:
    n_modes = None
    elements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head = tokens[0]
        if n_modes is None:
            if head != "modes":
                raise NetlistParseError(lineno, head, "expected 'modes <n>' first")
            if len(tokens) != 2:
                raise NetlistParseError(lineno, tokens[-1], "'modes' takes one integer")
            n_modes = _parse_int(tokens[1], lineno, "mode count")
            if n_modes < 1:
                raise NetlistParseError(lineno, tokens[1], "mode count must be positive")
            continue
        if head == COUPLER:
            if len(tokens) != 4:
                raise NetlistParseError(lineno, head, "expected 'coupler <i> <j> <angle>'")
            ports = (_parse_int(tokens[1], lineno, "port"), _parse_int(tokens[2], lineno, "port"))
            angle = _parse_angle(tokens[3], lineno)
            port_toks = tokens[1:3]
        elif head == PHASE:
            if len(tokens) != 3:
                raise NetlistParseError(lineno, head, "expected 'phase <i> <angle>'")
            ports = (_parse_int(tokens[1], lineno, "port"),)
            angle = _parse_angle(tokens[2], lineno)
            port_toks = tokens[1:2]
        else:
            raise NetlistParseError(lineno, head, "unknown element")
        for p, tok in zip(ports, port_toks):
            if not 1 <= p <= n_modes:
                raise NetlistParseError(lineno, tok, f"port outside 1..{n_modes}")
        try:
            elements.append(Element(head, ports, angle))
        except NetlistError as exc:
            raise NetlistParseError(lineno, head, str(exc)) from None
    if n_modes is None:
        raise NetlistParseError(0, "", "missing 'modes' line")
    return Netlist(n_modes, tuple(elements))
