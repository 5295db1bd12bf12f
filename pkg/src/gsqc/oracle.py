"""Reference constructions the numerical ground state is checked against.

``gate_oracle_run`` is an ordinary state-vector simulator on ``2**M``
amplitudes.  ``recursion_state`` builds the zero-energy state of the dot
array directly, row by row: each stage adds the amplitude that has advanced
one row through its gate, never touching the Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gsqc.circuit import Circuit, ControlledGate, check
from gsqc.hilbert import Basis, bits_of


def _apply(op: np.ndarray, psi: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)


def gate_oracle_run(circuit: Circuit, n: int, upto_stage: int | None = None) -> np.ndarray:
    """Register amplitudes after stages ``1..upto_stage`` starting from basis state ``n``."""
    m = circuit.num_qubits
    if upto_stage is None:
        upto_stage = circuit.num_stages
    if not 0 <= upto_stage <= circuit.num_stages:
        raise ValueError(f"stage {upto_stage} out of range 0..{circuit.num_stages}")
    bits_of(n, m)
    psi = np.zeros(2**m)
    psi[n] = 1.0
    psi = psi.reshape((2,) * m)
    ax = lambda q: m - 1 - q  # noqa: E731
    for st in circuit.stages[:upto_stage]:
        for a in st.assignments:
            if isinstance(a, ControlledGate):
                out = psi.copy()
                for b, u in ((0, a.u_on_0), (1, a.u_on_1)):
                    index = [slice(None)] * m
                    index[ax(a.control)] = b
                    index = tuple(index)
                    # the control axis is gone from the slice
                    t = ax(a.target) - (ax(a.target) > ax(a.control))
                    out[index] = _apply(u.matrix, psi[index], t)
                psi = out
            else:
                psi = _apply(a.gate.matrix, psi, ax(a.qubit))
    return psi.reshape(-1)


def _advance(L: int, stage: int, U: np.ndarray) -> np.ndarray:
    """One-chain operator moving row ``stage - 1`` into row ``stage`` through ``U``."""
    S = np.zeros((L, L))
    S[2 * stage : 2 * stage + 2, 2 * stage - 2 : 2 * stage] = U
    return S


def recursion_state(
    circuit: Circuit,
    n: int | None = None,
    initial: np.ndarray | None = None,
    normalize: bool = True,
) -> np.ndarray:
    """Zero-energy state of the dot array for input ``n``.

    ``initial`` may instead give arbitrary row-0 amplitudes over the
    ``2**M`` bit configurations.  Normalisation happens once, at the end.
    """
    check(circuit)
    m = circuit.num_qubits
    basis = Basis(m, circuit.num_stages)
    L = basis.sites_per_qubit
    if (n is None) == (initial is None):
        raise ValueError("give exactly one of n and initial")
    if initial is None:
        bits_of(n, m)
        initial = np.zeros(2**m)
        initial[n] = 1.0
    psi = np.zeros(basis.dim)
    psi[basis.row_indices(0)] = initial
    psi = psi.reshape(basis.shape)
    eye = np.eye(L)
    for j, st in enumerate(circuit.stages, start=1):
        # factors on disjoint qubits commute; singles first
        for a in st.singles():
            psi = psi + _apply(_advance(L, j, a.gate.matrix), psi, basis.axis(a.qubit))
        for g in st.controlled():
            out = psi.copy()
            for b, u in ((0, g.u_on_0), (1, g.u_on_1)):
                move_control = np.zeros((L, L))
                move_control[2 * j + b, 2 * (j - 1) + b] = 1.0
                target_step = eye + _advance(L, j, u.matrix)
                out += _apply(move_control, _apply(target_step, psi, basis.axis(g.target)), basis.axis(g.control))
            psi = out
    psi = psi.reshape(-1)
    if normalize:
        psi = psi / np.linalg.norm(psi)
    return psi


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap of the normalised vectors; insensitive to a global sign."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb)) ** 2


@dataclass
class IdentityCheck:
    fidelity: float
    projected: np.ndarray  # normalised output-row amplitudes of the recursion state
    expected: np.ndarray  # gate-oracle output


def final_state_identity_check(circuit: Circuit, n: int) -> IdentityCheck:
    """Compare the output row of the recursion state with the gate-oracle result."""
    basis = Basis(circuit.num_qubits, circuit.num_stages)
    out = basis.project_row(recursion_state(circuit, n), circuit.num_stages)
    out = out / np.linalg.norm(out)
    expected = gate_oracle_run(circuit, n)
    if np.dot(out, expected) < 0:
        out = -out
    return IdentityCheck(fidelity(out, expected), out, expected)
