"""Ground-state quantum computation on quantum-dot arrays.

A circuit of real orthogonal gates is encoded in a static, positive
semi-definite Hamiltonian whose ground state carries the whole computation
history: projecting it onto the row where every electron sits at stage
``j`` gives the register state after ``j`` gates.
"""

__version__ = "0.1.0"

from gsqc._backend import BACKEND
from gsqc.analysis import ReadoutReport, VerificationReport, readout, verify
from gsqc.circuit import (
    IDENTITY,
    NOT,
    Circuit,
    CircuitError,
    ControlledGate,
    Gate,
    ParseError,
    SingleAssignment,
    Stage,
    build_grover_circuit,
    orthogonal,
    parse_circuit,
    rotation,
    serialize_circuit,
    validate,
)
from gsqc.eigen import GroundSpace, ground_space, solve_dense, solve_lanczos, spectral_gap_scan
from gsqc.hamiltonian import BiasSpec, SparseSymMatrix, assemble
from gsqc.hilbert import Basis, dim, project_row
from gsqc.oracle import final_state_identity_check, gate_oracle_run, recursion_state

__all__ = [
    "BACKEND",
    "Basis",
    "BiasSpec",
    "Circuit",
    "CircuitError",
    "ControlledGate",
    "Gate",
    "GroundSpace",
    "IDENTITY",
    "NOT",
    "ParseError",
    "ReadoutReport",
    "SingleAssignment",
    "SparseSymMatrix",
    "Stage",
    "VerificationReport",
    "assemble",
    "build_grover_circuit",
    "dim",
    "final_state_identity_check",
    "gate_oracle_run",
    "ground_space",
    "orthogonal",
    "parse_circuit",
    "project_row",
    "readout",
    "recursion_state",
    "rotation",
    "serialize_circuit",
    "solve_dense",
    "solve_lanczos",
    "spectral_gap_scan",
    "validate",
    "verify",
]
