"""Readout of ground states and end-to-end verification against the gate oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gsqc.circuit import Circuit, check
from gsqc.eigen import DEGENERACY_TOL, GroundSpace, ground_space
from gsqc.hamiltonian import DEFAULT_BIAS, BiasSpec, SparseSymMatrix, assemble, row_sectors
from gsqc.hilbert import Basis, bits_of, format_bits
from gsqc.oracle import fidelity, gate_oracle_run, recursion_state


@dataclass
class ReadoutReport:
    row_occupancy: np.ndarray  # probability that every qubit sits at row j
    conditional_output: np.ndarray  # output-row distribution over bit configurations
    top_outcome: int | None
    top_probability: float
    num_qubits: int

    @property
    def output_occupancy(self) -> float:
        return float(self.row_occupancy[-1])

    @property
    def top_bits(self) -> str:
        return "-" if self.top_outcome is None else format_bits(self.top_outcome, self.num_qubits)


def readout(state: np.ndarray, basis: Basis, row: int | None = None) -> ReadoutReport:
    """Exact sensor statistics at ``row`` (default: the output row), conditioned on arrival of every electron."""
    state = np.asarray(state, dtype=float)
    total = float(state @ state)
    if total == 0.0:
        raise ValueError("cannot read out the zero vector")
    if row is None:
        row = basis.num_stages
    occupancy = np.array(
        [np.sum(basis.project_row(state, j) ** 2) / total for j in range(basis.num_rows)]
    )
    weights = basis.project_row(state, row) ** 2
    if weights.sum() > 0:
        conditional = weights / weights.sum()
        top = int(np.argmax(conditional))
        top_p = float(conditional[top])
    else:
        conditional = np.zeros_like(weights)
        top, top_p = None, 0.0
    return ReadoutReport(occupancy, conditional, top, top_p, basis.num_qubits)


@dataclass
class SectorSpectrum:
    """Ground data of ``H`` assembled sector by sector (``H`` is block diagonal over row sectors)."""

    ground_energy: float
    degeneracy: int
    gap: float
    num_sectors: int


def sector_spectrum(
    H: SparseSymMatrix, basis: Basis, solver: str = "auto", seed: int = 0, known: dict | None = None
) -> SectorSpectrum:
    count, labels = row_sectors(H, basis)
    lows = []
    for s in range(count):
        if known and s in known:
            gs = known[s]
        else:
            gs = ground_space(H.restrict(np.flatnonzero(labels == s)), solver=solver, seed=seed)
        lows.append((gs.ground_energy, gs.degeneracy, gs.gap))
    e0 = min(e for e, _, _ in lows)
    tol = DEGENERACY_TOL * H.scale
    degeneracy = sum(d for e, d, _ in lows if e - e0 <= tol)
    above = [e + g for e, _, g in lows if e - e0 <= tol and not math.isnan(g)]
    above += [e for e, _, _ in lows if e - e0 > tol]
    gap = min(above) - e0 if above else math.nan
    return SectorSpectrum(e0, degeneracy, gap, count)


@dataclass
class VerificationReport:
    input: int
    num_qubits: int
    dim: int
    sector_dim: int
    num_sectors: int
    solver: str
    ground_energy: float
    degeneracy: int  # whole Hamiltonian
    gap: float
    sector_degeneracy: int  # sector reachable from the input row
    sector_gap: float
    per_stage_fidelity: list[float]
    hamiltonian_residual: float
    ground_state: np.ndarray = field(repr=False)
    readout: ReadoutReport = field(repr=False)

    @property
    def min_fidelity(self) -> float:
        return min(self.per_stage_fidelity)

    def metrics(self) -> dict[str, object]:
        r = self.readout
        return {
            "input": format_bits(self.input, self.num_qubits),
            "dim": self.dim,
            "sector_dim": self.sector_dim,
            "sectors": self.num_sectors,
            "solver": self.solver,
            "ground_energy": self.ground_energy,
            "degeneracy": self.degeneracy,
            "sector_degeneracy": self.sector_degeneracy,
            "gap": self.gap,
            "sector_gap": self.sector_gap,
            "min_fidelity": self.min_fidelity,
            "hamiltonian_residual": self.hamiltonian_residual,
            "output_occupancy": r.output_occupancy,
            "top_outcome": r.top_bits,
            "top_probability": r.top_probability,
        }


def verify(
    circuit: Circuit,
    n: int,
    delta: float = DEFAULT_BIAS,
    solver: str = "auto",
    seed: int = 0,
) -> VerificationReport:
    """Solve the biased Hamiltonian and compare its ground state with the gate oracle row by row.

    The ground state is taken from the row sector holding the input row,
    where it must be unique.  Other sectors cannot carry weight on any row
    with all electrons aligned, but some circuits leave zero modes there;
    they are counted in ``degeneracy`` and ``gap``.
    """
    check(circuit)
    m = circuit.num_qubits
    basis = Basis(m, circuit.num_stages)
    H = assemble(circuit, BiasSpec(bits_of(n, m), delta))
    count, labels = row_sectors(H, basis)
    sector = np.flatnonzero(labels == labels[0])
    gs: GroundSpace = ground_space(H.restrict(sector), expected_degeneracy=1, solver=solver, seed=seed)
    full = sector_spectrum(H, basis, seed=seed, known={int(labels[0]): gs})

    ground = np.zeros(basis.dim)
    ground[sector] = gs.eigenvectors[:, 0]
    if np.sum(basis.project_row(ground, 0)) < 0:
        ground = -ground
    fids = [
        fidelity(basis.project_row(ground, j), gate_oracle_run(circuit, n, j))
        for j in range(basis.num_rows)
    ]
    psi = recursion_state(circuit, n)
    residual = float(np.linalg.norm(H.matvec(psi)))
    return VerificationReport(
        input=n,
        num_qubits=m,
        dim=basis.dim,
        sector_dim=len(sector),
        num_sectors=count,
        solver=gs.solver,
        ground_energy=full.ground_energy,
        degeneracy=full.degeneracy,
        gap=full.gap,
        sector_degeneracy=gs.degeneracy,
        sector_gap=gs.gap,
        per_stage_fidelity=fids,
        hamiltonian_residual=residual,
        ground_state=ground,
        readout=readout(ground, basis),
    )
