import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_circuit
from gsqc.circuit import (
    IDENTITY,
    NOT,
    Circuit,
    CircuitError,
    ControlledGate,
    ParseError,
    SingleAssignment,
    Stage,
    build_grover_circuit,
    check,
    orthogonal,
    parse_circuit,
    rotation,
    serialize_circuit,
    single_layer,
    stage_line_numbers,
    validate,
)


def test_minimal_circuit_is_valid():
    assert validate(Circuit(1, (single_layer(NOT),))) == []


def test_unassigned_qubit_reported():
    c = Circuit(2, (Stage((SingleAssignment(0, NOT),)),))
    assert validate(c) == ["stage 1: qubit 1 unassigned"]


def test_non_orthogonal_reported():
    c = Circuit(1, (single_layer(orthogonal(1, 0, 0, 1.001)),))
    (problem,) = validate(c)
    assert "not orthogonal" in problem and "stage 1 qubit 0" in problem


def test_control_equals_target_and_overlap():
    c = Circuit(2, (Stage((ControlledGate(1, 1), SingleAssignment(0, NOT), SingleAssignment(0, NOT))),))
    problems = validate(c)
    assert "stage 1: control = target = 1" in problems
    assert "stage 1: qubit 0 assigned 2 times" in problems


def test_every_violation_listed():
    c = Circuit(
        2,
        (
            single_layer(NOT, NOT),
            Stage((SingleAssignment(0, orthogonal(2, 0, 0, 1)),)),
            Stage((SingleAssignment(0, NOT), SingleAssignment(5, NOT), SingleAssignment(1, IDENTITY))),
        ),
    )
    problems = validate(c)
    assert any(p.startswith("stage 2 qubit 0: not orthogonal") for p in problems)
    assert "stage 2: qubit 1 unassigned" in problems
    assert "stage 3: qubit 5 out of range 0..1" in problems
    with pytest.raises(CircuitError):
        check(c)


def test_bad_epsilon():
    assert validate(Circuit(1, (), epsilon=0.0)) == ["epsilon must be > 0, got 0.0"]


def test_gate_matrices():
    np.testing.assert_array_equal(NOT.matrix, [[0, 1], [1, 0]])
    t = 0.3
    np.testing.assert_allclose(rotation(t).matrix, [[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])


@given(st.floats(-10, 10, allow_nan=False))
def test_rotation_orthogonal_unit_det(theta):
    u = rotation(theta).matrix
    assert np.max(np.abs(u.T @ u - np.eye(2))) <= 1e-12
    assert abs(abs(np.linalg.det(u)) - 1) <= 1e-12


# --- parsing ----------------------------------------------------------------


def test_parse_not():
    c = parse_circuit("qubits 1\nstage N 0")
    assert c == Circuit(1, (Stage((SingleAssignment(0, NOT),)),))


def test_parse_cnot():
    c = parse_circuit("qubits 2\nstage CNOT control=0 target=1 on=1")
    assert c.stages[0].assignments == (ControlledGate(0, 1, IDENTITY, NOT),)
    c0 = parse_circuit("qubits 2\nstage CNOT control=0 target=1 on=0")
    assert c0.stages[0].assignments == (ControlledGate(0, 1, NOT, IDENTITY),)


def test_parse_rotation_stage():
    c = parse_circuit("qubits 2\nstage R 0 0.785398163397 ; N 1")
    a, b = c.stages[0].assignments
    assert a == SingleAssignment(0, rotation(0.785398163397))
    assert abs(a.gate.params[0] - math.pi / 4) < 1e-12
    assert b == SingleAssignment(1, NOT)


def test_parse_comments_epsilon_fill_and_cu():
    text = """
    # two qubits
    qubits 3
    epsilon 2.5   # energy unit
    stage CU control=2 target=0 u0=R:0.5 u1=O:0,1,1,0 ; I *
    stage O 1 0 1 -1 0 ; I *
    """
    c = parse_circuit(text)
    assert c.epsilon == 2.5
    cu = c.stages[0].assignments[0]
    assert cu == ControlledGate(2, 0, rotation(0.5), orthogonal(0, 1, 1, 0))
    assert c.stages[0].assignments[1:] == (SingleAssignment(1, IDENTITY),)
    assert [a.qubit for a in c.stages[1].singles()] == [0, 1, 2]
    assert validate(c) == []


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("qubits 1\nstage X 0", 2, "unknown gate mnemonic 'X'"),
        ("qubits 1\nstage R 0", 2, "R takes 2 argument(s), got 1"),
        ("qubits 1\n\nstage R 0 abc", 3, "malformed number 'abc'"),
        ("qubits 2\nstage CNOT control=0 target=1", 2, "missing argument(s) on"),
        ("qubits 2\nstage CNOT control=0 target=1 on=2", 2, "on= must be 0 or 1"),
        ("qubits 2\nstage CU control=0 target=1 u0=Q u1=N", 2, "unknown gatespec 'Q'"),
        ("stage N 0", 1, "'qubits' line must come first"),
        ("qubits x", 1, "malformed qubit index 'x'"),
        ("qubits 1\nfoo 1", 2, "unknown directive 'foo'"),
        ("# nothing", 1, "missing 'qubits' line"),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ParseError) as info:
        parse_circuit(text)
    assert info.value.lineno == lineno
    assert fragment in str(info.value)


def test_stage_line_numbers():
    assert stage_line_numbers("qubits 1\n# c\nstage N 0\n\nstage I 0\n") == [3, 5]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 6), st.booleans())
def test_round_trip(seed, m, n, general):
    rng = np.random.default_rng(seed)
    nc = min(n, 2) if m > 1 else 0
    c = random_circuit(rng, m, n, nc, general=general)
    c = Circuit(c.num_qubits, c.stages, float(rng.uniform(0.1, 3)))
    again = parse_circuit(serialize_circuit(c))
    assert again == c
    assert parse_circuit(serialize_circuit(again)) == again


# --- Grover program -----------------------------------------------------------


def test_grover_shape():
    g = build_grover_circuit()
    assert g.num_qubits == 2
    assert g.num_stages == 12
    assert g.num_rows == 13
    assert validate(g) == []


def test_grover_layout():
    g = build_grover_circuit()
    q = math.pi / 4

    def singles(j):
        return [(a.qubit, a.gate) for a in g.stages[j].singles()]

    # W
    assert singles(0) == [(0, rotation(q)), (1, rotation(q))]
    assert singles(1) == [(0, NOT), (1, NOT)]
    # C: stage 3 (0-based) rotates the second qubit first
    assert singles(2) == [(0, IDENTITY), (1, rotation(q))]
    assert g.stages[3].assignments == (ControlledGate(0, 1, IDENTITY, NOT),)
    assert singles(4) == [(0, IDENTITY), (1, rotation(-q))]
    # W again, then P with the zero-controlled NOT
    assert singles(5) == singles(0) and singles(6) == singles(1)
    assert singles(7) == [(0, IDENTITY), (1, rotation(-q))]
    assert g.stages[8].assignments == (ControlledGate(0, 1, NOT, IDENTITY),)
    assert singles(9) == [(0, IDENTITY), (1, rotation(q))]
    assert singles(10) == singles(0) and singles(11) == singles(1)
