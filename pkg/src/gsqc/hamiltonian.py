"""Sparse real-symmetric Hamiltonian of a quantum-dot circuit array.

Single-qubit operators live on the ``L = 2 (N + 1)`` dot sites of one
chain and are lifted to the product space with Kronecker products
(qubit 0 innermost).  Every term conserves the electron count of each
chain, so the product space is closed under the Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from gsqc import _backend
from gsqc.circuit import IDENTITY, Circuit, Gate, check
from gsqc.hilbert import Basis

DROP_TOL = 1e-15
DEFAULT_BIAS = 0.1


class SparseSymMatrix:
    """Real symmetric matrix stored as its sorted upper triangle (diagonal included).

    ``rows <= cols`` entrywise, coordinates unique and sorted
    lexicographically.  ``scale`` is the energy unit used for tolerances.
    """

    def __init__(self, dim: int, rows, cols, vals, scale: float = 1.0):
        self.dim = int(dim)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.vals = np.asarray(vals, dtype=float)
        self.scale = float(scale)

    @classmethod
    def from_triplets(cls, dim, rows, cols, vals, scale=1.0) -> "SparseSymMatrix":
        """Merge upper-triangle triplets; duplicates are summed in input order."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if np.any(rows > cols):
            raise ValueError("triplets must lie on or above the diagonal")
        if len(vals) and not np.all(np.isfinite(vals)):
            raise ValueError("non-finite matrix entry")
        if len(vals) and (rows.min() < 0 or cols.max() >= dim):
            raise ValueError("coordinate out of range")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if len(vals):
            start = np.flatnonzero(np.r_[True, (np.diff(rows) != 0) | (np.diff(cols) != 0)])
            vals = np.add.reduceat(vals, start)
            rows, cols = rows[start], cols[start]
        keep = np.abs(vals) >= DROP_TOL * scale
        return cls(dim, rows[keep], cols[keep], vals[keep], scale)

    @classmethod
    def from_sparse(cls, matrix: sp.spmatrix, scale: float = 1.0) -> "SparseSymMatrix":
        """Take the upper triangle of a symmetric scipy matrix."""
        coo = sp.triu(matrix, format="coo")
        return cls.from_triplets(matrix.shape[0], coo.row, coo.col, coo.data, scale)

    def __add__(self, other: "SparseSymMatrix") -> "SparseSymMatrix":
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return SparseSymMatrix.from_triplets(
            self.dim,
            np.r_[self.rows, other.rows],
            np.r_[self.cols, other.cols],
            np.r_[self.vals, other.vals],
            self.scale,
        )

    @property
    def nnz(self) -> int:
        return len(self.vals)

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # full symmetric CSR, columns ascending in each row
        off = self.rows != self.cols
        r = np.r_[self.rows, self.cols[off]]
        c = np.r_[self.cols, self.rows[off]]
        v = np.r_[self.vals, self.vals[off]]
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order]
        indptr = np.zeros(self.dim + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=self.dim), out=indptr[1:])
        return indptr, c.astype(np.int32), np.ascontiguousarray(v)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """``H @ x`` summing each row in ascending column order."""
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: matrix {self.dim}, vector {x.shape}")
        out = np.empty(self.dim)
        _backend.csr_matvec(*self._csr, x, out)
        return out

    def matmat(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: matrix {self.dim}, block {x.shape}")
        out = np.empty_like(x)
        _backend.csr_matmat(*self._csr, x, out)
        return out

    def __matmul__(self, x):
        x = np.asarray(x)
        return self.matvec(x) if x.ndim == 1 else self.matmat(x)

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.dim)
        on = self.rows == self.cols
        d[self.rows[on]] = self.vals[on]
        return d

    def to_scipy(self) -> sp.csr_matrix:
        indptr, indices, data = self._csr
        return sp.csr_matrix((data, indices, indptr), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[self.rows, self.cols] = self.vals
        out[self.cols, self.rows] = self.vals
        return out

    def restrict(self, indices: np.ndarray) -> "SparseSymMatrix":
        """Principal submatrix on ``indices`` (sorted ascending), renumbered 0..len-1."""
        indices = np.asarray(indices, dtype=np.int64)
        position = np.full(self.dim, -1, dtype=np.int64)
        position[indices] = np.arange(len(indices))
        r, c = position[self.rows], position[self.cols]
        keep = (r >= 0) & (c >= 0)
        lo, hi = np.minimum(r[keep], c[keep]), np.maximum(r[keep], c[keep])
        return SparseSymMatrix.from_triplets(len(indices), lo, hi, self.vals[keep], self.scale)

    def dump_lines(self) -> Iterable[str]:
        for i, j, v in zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()):
            yield f"{i} {j} {v:.17e}"

    def dump(self) -> str:
        return "".join(line + "\n" for line in self.dump_lines())


@dataclass(frozen=True)
class BiasSpec:
    """Raise the on-site energy of each qubit's row-0 dot that disagrees with ``input_bits``."""

    input_bits: tuple[int, ...]
    delta: float = DEFAULT_BIAS

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"bias delta must be > 0, got {self.delta}")
        if any(b not in (0, 1) for b in self.input_bits):
            raise ValueError(f"input bits must be 0/1, got {self.input_bits}")


# --- one-chain operators ----------------------------------------------------


def _site(row: int, bit: int) -> int:
    return 2 * row + bit


def number_row(L: int, row: int) -> sp.csr_matrix:
    d = np.zeros(L)
    d[_site(row, 0)] = d[_site(row, 1)] = 1.0
    return sp.diags(d, format="csr")


def number_site(L: int, row: int, bit: int) -> sp.csr_matrix:
    d = np.zeros(L)
    d[_site(row, bit)] = 1.0
    return sp.diags(d, format="csr")


def transfer(L: int, stage: int, U: np.ndarray) -> sp.csr_matrix:
    """Unit-energy block ``n(j-1) + n(j) - (C_j^dag U C_{j-1} + h.c.)`` on one chain.

    Its quadratic form is ``|x_j - U x_{j-1}|**2``, so it vanishes exactly on
    chain amplitudes that advance by ``U`` from row ``j - 1`` to row ``j``.
    """
    rows, cols, vals = [], [], []
    for b in range(2):
        for r in (stage - 1, stage):
            rows.append(_site(r, b))
            cols.append(_site(r, b))
            vals.append(1.0)
        for bp in range(2):
            if U[b, bp] != 0.0:
                i, k = _site(stage, b), _site(stage - 1, bp)
                rows += [i, k]
                cols += [k, i]
                vals += [-U[b, bp], -U[b, bp]]
    return sp.csr_matrix((vals, (rows, cols)), shape=(L, L))


def lift(basis: Basis, factors: dict[int, sp.spmatrix]) -> sp.csr_matrix:
    """Tensor product of per-qubit ``factors`` with the identity on all other qubits."""
    L = basis.sites_per_qubit
    out = sp.identity(1, format="csr")
    for q in range(basis.num_qubits):
        f = factors.get(q)
        out = sp.kron(f if f is not None else sp.identity(L, format="csr"), out, format="csr")
    return out


# --- blocks -------------------------------------------------------------------


def _check_stage(basis: Basis, stage: int) -> None:
    if not 1 <= stage <= basis.num_stages:
        raise ValueError(f"stage {stage} out of range 1..{basis.num_stages} (row 0 has no incoming block)")


def single_gate_block(basis: Basis, qubit: int, stage: int, U: Gate | np.ndarray, epsilon: float = 1.0) -> SparseSymMatrix:
    """``epsilon * h(U)`` on ``qubit`` between rows ``stage - 1`` and ``stage``."""
    _check_stage(basis, stage)
    U = U.matrix if isinstance(U, Gate) else np.asarray(U, dtype=float)
    h = lift(basis, {qubit: transfer(basis.sites_per_qubit, stage, U)})
    return SparseSymMatrix.from_sparse(epsilon * h, epsilon)


def _controlled_terms(basis: Basis, control: int, target: int, stage: int, u0, u1) -> list[sp.csr_matrix]:
    if control == target:
        raise ValueError("control = target")
    L = basis.sites_per_qubit
    j = stage
    return [
        # control still upstream while target has moved on: forbidden
        lift(basis, {control: number_row(L, j - 1), target: number_row(L, j)}),
        # control passes through unchanged only while target waits at the gate
        lift(basis, {control: transfer(L, j, np.eye(2)), target: number_row(L, j - 1)}),
        lift(basis, {control: number_site(L, j, 0), target: transfer(L, j, u0)}),
        lift(basis, {control: number_site(L, j, 1), target: transfer(L, j, u1)}),
    ]


def controlled_gate_block(
    basis: Basis,
    control: int,
    target: int,
    stage: int,
    u_on_0: Gate | np.ndarray = IDENTITY,
    u_on_1: Gate | np.ndarray | None = None,
    epsilon: float = 1.0,
) -> SparseSymMatrix:
    """Four-term two-body block; defaults give the CNOT of ``target`` by ``control``."""
    _check_stage(basis, stage)
    u0 = u_on_0.matrix if isinstance(u_on_0, Gate) else np.asarray(u_on_0, dtype=float)
    if u_on_1 is None:
        u1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    else:
        u1 = u_on_1.matrix if isinstance(u_on_1, Gate) else np.asarray(u_on_1, dtype=float)
    total = sum(_controlled_terms(basis, control, target, stage, u0, u1))
    return SparseSymMatrix.from_sparse(epsilon * total, epsilon)


def bias_term(basis: Basis, bias: BiasSpec) -> SparseSymMatrix:
    if len(bias.input_bits) != basis.num_qubits:
        raise ValueError(f"bias needs {basis.num_qubits} input bits, got {len(bias.input_bits)}")
    L = basis.sites_per_qubit
    total = sum(lift(basis, {a: number_site(L, 0, 1 - b)}) for a, b in enumerate(bias.input_bits))
    return SparseSymMatrix.from_sparse(bias.delta * total)


def _stage_terms(basis: Basis, circuit: Circuit) -> Iterable[sp.spmatrix]:
    L = basis.sites_per_qubit
    eps = circuit.epsilon
    for j, st in enumerate(circuit.stages, start=1):
        for a in st.singles():
            yield eps * lift(basis, {a.qubit: transfer(L, j, a.gate.matrix)})
        for g in st.controlled():
            for term in _controlled_terms(basis, g.control, g.target, j, g.u_on_0.matrix, g.u_on_1.matrix):
                yield eps * term


def assemble(circuit: Circuit, bias: BiasSpec | None = None) -> SparseSymMatrix:
    """Full circuit Hamiltonian, optionally with the input-selecting bias."""
    check(circuit)
    basis = Basis(circuit.num_qubits, circuit.num_stages)
    dim = basis.dim
    rows, cols, vals = [], [], []
    terms = list(_stage_terms(basis, circuit))
    if bias is not None:
        if len(bias.input_bits) != circuit.num_qubits:
            raise ValueError(f"bias needs {circuit.num_qubits} input bits, got {len(bias.input_bits)}")
        for a, b in enumerate(bias.input_bits):
            terms.append(bias.delta * lift(basis, {a: number_site(basis.sites_per_qubit, 0, 1 - b)}))
    for term in terms:
        coo = sp.triu(term, format="coo")
        rows.append(coo.row)
        cols.append(coo.col)
        vals.append(coo.data)
    if not terms:
        return SparseSymMatrix(dim, [], [], [], circuit.epsilon)
    return SparseSymMatrix.from_triplets(
        dim, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), circuit.epsilon
    )


# --- row sectors --------------------------------------------------------------


def row_sectors(H: SparseSymMatrix, basis: Basis) -> tuple[int, np.ndarray]:
    """Connected components of the row-configuration graph of ``H``.

    Two per-qubit row tuples are linked when ``H`` couples any pair of basis
    states carrying them.  ``H`` is block diagonal over the returned labels
    (one label per basis index).
    """
    n_cfg = basis.num_rows**basis.num_qubits
    off = H.rows != H.cols
    a = basis.row_configuration(H.rows[off])
    b = basis.row_configuration(H.cols[off])
    graph = sp.coo_matrix((np.ones(len(a)), (a, b)), shape=(n_cfg, n_cfg))
    count, cfg_label = connected_components(graph, directed=False)
    labels = cfg_label[basis.row_configuration(np.arange(basis.dim))]
    return count, labels


def computational_sector(H: SparseSymMatrix, basis: Basis) -> np.ndarray:
    """Basis indices in the sector holding the all-qubits-at-row-0 configuration."""
    _, labels = row_sectors(H, basis)
    return np.flatnonzero(labels == labels[0])
