import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import device_M, lossy_T, splitter_U, splitter_V
from lossy_optics.circuit import (Element, Netlist, NetlistError, NetlistParseError,
                                  compile_netlist, coupler, decompose, element_matrix,
                                  lossy_mzi_netlist, parse, phase, serialize)
from lossy_optics.dilation import coupling_block, dilate, lossy_beamsplitter
from lossy_optics.linalg import block_diag, is_unitary, max_norm
from lossy_optics.sampling import random_unitary


def test_coupler_quarter_turn_is_balanced_splitter():
    assert max_norm(element_matrix(coupler(1, 2, math.pi / 4), 2) - splitter_U()) < 1e-15


def test_phase_then_coupler_gives_second_unitary():
    nl = Netlist(2, (phase(1, math.pi / 2), coupler(1, 2, math.pi / 4)))
    assert max_norm(compile_netlist(nl) - splitter_V()) < 1e-15


def test_coupler_on_ancilla_pair():
    theta = 0.6
    expected = block_diag(1, coupling_block(theta))
    assert max_norm(element_matrix(coupler(2, 3, theta), 3) - expected) == 0


def test_element_validation():
    with pytest.raises(NetlistError):
        coupler(2, 2, 0.1)
    with pytest.raises(NetlistError):
        Element("mirror", (1,), 0.0)
    with pytest.raises(NetlistError):
        element_matrix(phase(4, 0.1), 3)
    with pytest.raises(NetlistError):
        Netlist(2, (coupler(1, 3, 0.1),))


def test_empty_netlist_is_identity():
    assert np.array_equal(compile_netlist(Netlist(3)), np.eye(3))


def test_coupler_angles_add():
    # [[c, is], [is, c]] at pi/4 squared = [[0, i], [i, 0]].
    nl = Netlist(2, (coupler(1, 2, math.pi / 4), coupler(1, 2, math.pi / 4)))
    assert max_norm(compile_netlist(nl) - np.array([[0, 1j], [1j, 0]])) < 1e-15
    assert max_norm(compile_netlist(nl) - element_matrix(coupler(1, 2, math.pi / 2), 2)) < 1e-15


def test_later_elements_multiply_on_the_left():
    a, b = coupler(1, 2, 0.3), phase(2, 1.1)
    m = compile_netlist(Netlist(2, (a, b)))
    assert max_norm(m - element_matrix(b, 2) @ element_matrix(a, 2)) == 0


def test_lossy_mzi_limits():
    m0 = compile_netlist(lossy_mzi_netlist(0.0))
    assert max_norm(m0 - block_diag(lossy_T(1.0), 1)) < 1e-15
    assert max_norm(compile_netlist(lossy_mzi_netlist(math.pi / 2)) - device_M(math.pi / 2)) < 1e-15


@pytest.mark.parametrize("theta", np.linspace(0, math.pi / 2, 7))
def test_lossy_mzi_block_is_lossy_beamsplitter(theta):
    m = compile_netlist(lossy_mzi_netlist(theta))
    assert max_norm(m[:2, :2] - lossy_T(math.cos(theta))) < 1e-12
    assert max_norm(m - device_M(theta)) < 1e-12


def test_lossy_mzi_range():
    with pytest.raises(ValueError):
        lossy_mzi_netlist(2.0)


@pytest.mark.parametrize("theta", np.linspace(0, math.pi / 2, 50))
def test_lossy_mzi_equals_dilation(theta):
    d = dilate(lossy_beamsplitter(math.cos(theta)))
    assert max_norm(compile_netlist(lossy_mzi_netlist(theta)) - d.embedded(3)) < 1e-10


@st.composite
def netlists(draw):
    n = draw(st.integers(1, 6))
    angles = st.floats(-10, 10, allow_nan=False)
    elements = []
    for _ in range(draw(st.integers(0, 12))):
        if n > 1 and draw(st.booleans()):
            i, j = draw(st.lists(st.integers(1, n), min_size=2, max_size=2, unique=True))
            elements.append(coupler(i, j, draw(angles)))
        else:
            elements.append(phase(draw(st.integers(1, n)), draw(angles)))
    return Netlist(n, tuple(elements))


@settings(max_examples=200, deadline=None)
@given(netlists())
def test_compiled_netlists_are_unitary(nl):
    assert is_unitary(compile_netlist(nl), 1e-10)


@settings(max_examples=200, deadline=None)
@given(netlists())
def test_parse_serialize_round_trip(nl):
    text = serialize(nl)
    assert parse(text) == nl
    assert serialize(parse(text)) == text


def test_decompose_identity():
    nl = decompose(np.eye(4))
    assert all(e.angle == 0 for e in nl.elements)
    assert max_norm(compile_netlist(nl) - np.eye(4)) == 0


def test_decompose_device_unitaries():
    assert max_norm(compile_netlist(decompose(splitter_U())) - splitter_U()) < 1e-10
    m = device_M(math.pi / 3)
    assert max_norm(compile_netlist(decompose(m)) - m) < 1e-8


def test_decompose_random(rng):
    for _ in range(200):
        u = random_unitary(int(rng.integers(2, 7)), rng)
        assert max_norm(compile_netlist(decompose(u)) - u) < 1e-8


def test_decompose_shape_and_order():
    nl = decompose(random_unitary(4, np.random.default_rng(3)))
    kinds = [e.kind for e in nl.elements]
    assert kinds[-4:] == ["phase"] * 4
    assert [e.ports for e in nl.elements[-4:]] == [(1,), (2,), (3,), (4,)]
    assert kinds.count("coupler") == 4 * 3 // 2
    # Bottom row first: the first couplers sweep left to right.
    assert [e.ports for e in nl.elements if e.kind == "coupler"][:3] == [(1, 2), (2, 3), (3, 4)]


@pytest.mark.parametrize("u", [np.eye(9), np.array([[1, 1], [0, 1]]), np.eye(1)])
def test_decompose_rejects(u):
    with pytest.raises(NetlistError):
        decompose(u)


def test_parse_example():
    nl = parse("modes 3\ncoupler 1 2 0.7853981633974483\n")
    assert nl == Netlist(3, (coupler(1, 2, math.pi / 4),))


def test_parse_comments_and_blank_lines():
    text = "# header\n\nmodes 2  # two waveguides\nphase 2 -1.5\n  # done\n"
    assert parse(text) == Netlist(2, (phase(2, -1.5),))
    assert serialize(parse(text)) == "modes 2\nphase 2 -1.5\n"


def test_serialize_uses_seventeen_digits():
    assert serialize(Netlist(2, (coupler(1, 2, math.pi / 4),))) == (
        "modes 2\ncoupler 1 2 0.78539816339744828\n")


def test_serialized_mzi_reparses():
    nl = lossy_mzi_netlist(math.pi / 4)
    assert parse(serialize(nl)) == nl


@pytest.mark.parametrize("text, lineno, token", [
    ("coupler 1 1 0.5", 1, "coupler"),
    ("modes 2\ncoupler 1 1 0.5", 2, "coupler"),
    ("modes 2\ncoupler 1 3 0.5", 2, "3"),
    ("modes 2\nphase 1 abc", 2, "abc"),
    ("modes 2\nphase 1 inf", 2, "inf"),
    ("modes 2\nsplitter 1 2 0.1", 2, "splitter"),
    ("modes two", 1, "two"),
    ("modes 0", 1, "0"),
    ("modes 2\nphase x 0.1", 2, "x"),
    ("modes 2\n\ncoupler 1 2", 3, "coupler"),
    ("", 0, ""),
])
def test_parse_errors(text, lineno, token):
    with pytest.raises(NetlistParseError) as info:
        parse(text)
    assert info.value.lineno == lineno
    assert info.value.token == token
    assert f"line {lineno}" in str(info.value)


def test_duplicate_port_message():
    with pytest.raises(NetlistParseError, match="distinct"):
        parse("modes 2\ncoupler 1 1 0.5\n")
