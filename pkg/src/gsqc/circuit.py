"""Circuit representation, validation and the line-oriented circuit file format.

A circuit acts on ``num_qubits`` qubits through an ordered list of stages.
Every stage assigns each qubit exactly one operation: a real orthogonal
single-qubit gate, or one half of a controlled gate.  Only orthogonal
gates are representable because tunnelling amplitudes between dots are
real.

File format (``#`` starts a comment)::

    qubits 2
    epsilon 1.0
    stage R 0 0.7853981633974483 ; N 1
    stage CNOT control=0 target=1 on=1
    stage CU control=1 target=0 u0=I u1=R:0.5
    stage N 0 ; I *
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

ORTHOGONALITY_TOL = 1e-12


class CircuitError(ValueError):
    """Raised when a circuit violates its structural invariants."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}")


@dataclass(frozen=True)
class Gate:
    """Real orthogonal 2x2 gate.

    ``kind`` is one of ``"I"``, ``"N"``, ``"R"`` (rotation, ``params=(theta,)``)
    or ``"O"`` (explicit matrix, ``params=(m00, m01, m10, m11)``).
    """

    kind: str
    params: tuple[float, ...] = ()

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "I":
            return np.eye(2)
        if self.kind == "N":
            return np.array([[0.0, 1.0], [1.0, 0.0]])
        if self.kind == "R":
            (theta,) = self.params
            c, s = math.cos(theta), math.sin(theta)
            return np.array([[c, s], [-s, c]])
        if self.kind == "O":
            return np.array(self.params, dtype=float).reshape(2, 2)
        raise ValueError(f"unknown gate kind {self.kind!r}")

    def spec(self) -> str:
        """Compact ``gatespec`` form used inside ``CU`` assignments."""
        if self.kind in ("I", "N"):
            return self.kind
        if self.kind == "R":
            return f"R:{self.params[0]!r}"
        return "O:" + ",".join(repr(p) for p in self.params)


IDENTITY = Gate("I")
NOT = Gate("N")


def rotation(theta: float) -> Gate:
    return Gate("R", (float(theta),))


def orthogonal(m00: float, m01: float, m10: float, m11: float) -> Gate:
    return Gate("O", (float(m00), float(m01), float(m10), float(m11)))


@dataclass(frozen=True)
class SingleAssignment:
    qubit: int
    gate: Gate

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class ControlledGate:
    """Applies ``u_on_0`` to ``target`` when ``control`` reads 0 and ``u_on_1`` when it reads 1.

    The usual CNOT is ``ControlledGate(c, t, IDENTITY, NOT)``.
    """

    control: int
    target: int
    u_on_0: Gate = IDENTITY
    u_on_1: Gate = NOT

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


Assignment = Union[SingleAssignment, ControlledGate]


@dataclass(frozen=True)
class Stage:
    assignments: tuple[Assignment, ...]

    def singles(self) -> list[SingleAssignment]:
        return sorted(
            (a for a in self.assignments if isinstance(a, SingleAssignment)),
            key=lambda a: a.qubit,
        )

    def controlled(self) -> list[ControlledGate]:
        return sorted(
            (a for a in self.assignments if isinstance(a, ControlledGate)),
            key=lambda a: a.control,
        )


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    stages: tuple[Stage, ...] = field(default_factory=tuple)
    epsilon: float = 1.0

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    @property
    def num_rows(self) -> int:
        return len(self.stages) + 1


def stage(*assignments: Assignment) -> Stage:
    return Stage(tuple(assignments))


def single_layer(*gates: Gate) -> Stage:
    """Stage applying ``gates[q]`` to qubit ``q``."""
    return Stage(tuple(SingleAssignment(q, g) for q, g in enumerate(gates)))


def _gate_problems(gate: Gate) -> list[str]:
    if gate.kind not in ("I", "N", "R", "O"):
        return [f"unknown gate kind {gate.kind!r}"]
    expected = {"I": 0, "N": 0, "R": 1, "O": 4}[gate.kind]
    if len(gate.params) != expected:
        return [f"gate {gate.kind} takes {expected} parameters, got {len(gate.params)}"]
    u = gate.matrix
    if not np.all(np.isfinite(u)):
        return ["non-finite matrix entry"]
    if np.max(np.abs(u.T @ u - np.eye(2))) > ORTHOGONALITY_TOL:
        return ["not orthogonal"]
    return []


def validate(circuit: Circuit) -> list[str]:
    """Return every invariant violation in ``circuit``; an empty list means valid."""
    problems = []
    m = circuit.num_qubits
    if not isinstance(m, int) or m < 1:
        problems.append(f"num_qubits must be >= 1, got {m!r}")
        return problems
    if not (math.isfinite(circuit.epsilon) and circuit.epsilon > 0):
        problems.append(f"epsilon must be > 0, got {circuit.epsilon!r}")
    for j, st in enumerate(circuit.stages, start=1):
        seen: dict[int, int] = {}
        for a in st.assignments:
            if isinstance(a, ControlledGate):
                if a.control == a.target:
                    problems.append(f"stage {j}: control = target = {a.control}")
                for label, g in (("u0", a.u_on_0), ("u1", a.u_on_1)):
                    for p in _gate_problems(g):
                        problems.append(f"stage {j} qubit {a.target} ({label}): {p}")
            else:
                for p in _gate_problems(a.gate):
                    problems.append(f"stage {j} qubit {a.qubit}: {p}")
            for q in set(a.qubits):
                if not 0 <= q < m:
                    problems.append(f"stage {j}: qubit {q} out of range 0..{m - 1}")
                seen[q] = seen.get(q, 0) + 1
        for q in range(m):
            count = seen.get(q, 0)
            if count == 0:
                problems.append(f"stage {j}: qubit {q} unassigned")
            elif count > 1:
                problems.append(f"stage {j}: qubit {q} assigned {count} times")
    return problems


def check(circuit: Circuit) -> Circuit:
    """Return ``circuit`` unchanged, raising :class:`CircuitError` if it is invalid."""
    problems = validate(circuit)
    if problems:
        raise CircuitError(problems)
    return circuit


# --- text format ---------------------------------------------------------


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"malformed number {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(lineno, f"malformed number {token!r}")
    return value


def _index(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"malformed qubit index {token!r}") from None


def _gatespec(text: str, lineno: int) -> Gate:
    if text in ("I", "N"):
        return Gate(text)
    head, sep, rest = text.partition(":")
    if head == "R" and sep:
        return rotation(_number(rest, lineno))
    if head == "O" and sep:
        parts = rest.split(",")
        if len(parts) != 4:
            raise ParseError(lineno, f"O gatespec needs 4 entries, got {len(parts)}")
        return orthogonal(*(_number(p, lineno) for p in parts))
    raise ParseError(lineno, f"unknown gatespec {text!r}")


def _keywords(tokens: list[str], names: tuple[str, ...], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in names:
            raise ParseError(lineno, f"unexpected argument {tok!r}")
        if key in out:
            raise ParseError(lineno, f"duplicate argument {key!r}")
        out[key] = value
    missing = [n for n in names if n not in out]
    if missing:
        raise ParseError(lineno, f"missing argument(s) {', '.join(missing)}")
    return out


_ARITY = {"I": 1, "N": 1, "R": 2, "O": 5}


def _assignment(text: str, lineno: int) -> Assignment | None:
    tokens = text.split()
    if not tokens:
        raise ParseError(lineno, "empty assignment")
    op, args = tokens[0], tokens[1:]
    if op == "I" and args == ["*"]:
        return None
    if op in _ARITY:
        if len(args) != _ARITY[op]:
            raise ParseError(lineno, f"{op} takes {_ARITY[op]} argument(s), got {len(args)}")
        q = _index(args[0], lineno)
        if op == "R":
            return SingleAssignment(q, rotation(_number(args[1], lineno)))
        if op == "O":
            return SingleAssignment(q, orthogonal(*(_number(a, lineno) for a in args[1:])))
        return SingleAssignment(q, Gate(op))
    if op == "CNOT":
        kw = _keywords(args, ("control", "target", "on"), lineno)
        if kw["on"] not in ("0", "1"):
            raise ParseError(lineno, f"on= must be 0 or 1, got {kw['on']!r}")
        u0, u1 = (IDENTITY, NOT) if kw["on"] == "1" else (NOT, IDENTITY)
        return ControlledGate(_index(kw["control"], lineno), _index(kw["target"], lineno), u0, u1)
    if op == "CU":
        kw = _keywords(args, ("control", "target", "u0", "u1"), lineno)
        return ControlledGate(
            _index(kw["control"], lineno),
            _index(kw["target"], lineno),
            _gatespec(kw["u0"], lineno),
            _gatespec(kw["u1"], lineno),
        )
    raise ParseError(lineno, f"unknown gate mnemonic {op!r}")


def parse_circuit(text: str | Iterable[str]) -> Circuit:
    """Parse the circuit text format.  Structural validity is checked separately by :func:`validate`."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    num_qubits = None
    epsilon = 1.0
    stages = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "qubits":
            if num_qubits is not None:
                raise ParseError(lineno, "duplicate 'qubits' line")
            if stages:
                raise ParseError(lineno, "'qubits' must precede stages")
            num_qubits = _index(rest, lineno)
            if num_qubits < 1:
                raise ParseError(lineno, "qubits must be >= 1")
        elif keyword == "epsilon":
            epsilon = _number(rest, lineno)
        elif keyword == "stage":
            if num_qubits is None:
                raise ParseError(lineno, "'qubits' line must come first")
            parts = [p.strip() for p in rest.split(";")]
            assignments = []
            fill = False
            for part in parts:
                a = _assignment(part, lineno)
                if a is None:
                    fill = True
                else:
                    assignments.append(a)
            if fill:
                used = {q for a in assignments for q in a.qubits}
                assignments += [SingleAssignment(q, IDENTITY) for q in range(num_qubits) if q not in used]
            stages.append(Stage(tuple(assignments)))
        else:
            raise ParseError(lineno, f"unknown directive {keyword!r}")
    if num_qubits is None:
        raise ParseError(max(len(lines), 1), "missing 'qubits' line")
    return Circuit(num_qubits, tuple(stages), epsilon)


def _format_assignment(a: Assignment) -> str:
    if isinstance(a, ControlledGate):
        if (a.u_on_0, a.u_on_1) == (IDENTITY, NOT):
            return f"CNOT control={a.control} target={a.target} on=1"
        if (a.u_on_0, a.u_on_1) == (NOT, IDENTITY):
            return f"CNOT control={a.control} target={a.target} on=0"
        return f"CU control={a.control} target={a.target} u0={a.u_on_0.spec()} u1={a.u_on_1.spec()}"
    g = a.gate
    if g.kind in ("I", "N"):
        return f"{g.kind} {a.qubit}"
    return " ".join([g.kind, str(a.qubit), *(repr(p) for p in g.params)])


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}", f"epsilon {circuit.epsilon!r}"]
    for st in circuit.stages:
        lines.append("stage " + " ; ".join(_format_assignment(a) for a in st.assignments))
    return "\n".join(lines) + "\n"


# --- Grover search program -------------------------------------------------

QUARTER_TURN = math.pi / 4


def _walsh() -> list[Stage]:
    return [
        single_layer(rotation(QUARTER_TURN), rotation(QUARTER_TURN)),
        single_layer(NOT, NOT),
    ]


def _sign_flip(first: float, control_polarity: int) -> list[Stage]:
    # rotate qubit 1, NOT it conditioned on qubit 0, rotate back
    u0, u1 = (IDENTITY, NOT) if control_polarity == 1 else (NOT, IDENTITY)
    return [
        single_layer(IDENTITY, rotation(first)),
        stage(ControlledGate(0, 1, u0, u1)),
        single_layer(IDENTITY, rotation(-first)),
    ]


def build_grover_circuit(epsilon: float = 1.0) -> Circuit:
    """Two-qubit database search W, C, W, P, W: 12 stages, 13 rows per qubit."""
    stages = (
        _walsh()
        + _sign_flip(QUARTER_TURN, control_polarity=1)
        + _walsh()
        + _sign_flip(-QUARTER_TURN, control_polarity=0)
        + _walsh()
    )
    return Circuit(2, tuple(stages), epsilon)


def stage_line_numbers(text: str) -> list[int]:
    """1-based file line of each ``stage`` directive, in stage order."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.split("#", 1)[0].split()[:1] == ["stage"]:
            out.append(lineno)
    return out
