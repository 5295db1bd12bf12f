"""Product basis for one electron per qubit chain.

Each qubit chain has ``2 * num_rows`` dot sites; site ordinal ``2 * row + bit``.
A basis state lists one site ordinal per qubit and is encoded as a
mixed-radix integer with qubit 0 as the least significant digit.  In
array form a state is reshaped to ``(L,) * M`` with qubit ``a`` on axis
``M - 1 - a`` (C order then reproduces the mixed-radix index).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_DIM = 2**31 - 1


class InstanceTooLarge(ValueError):
    pass


def dim(num_qubits: int, num_stages: int) -> int:
    """Dimension ``(2 (N + 1)) ** M`` of the product space."""
    if num_qubits < 1 or num_stages < 0:
        raise ValueError("need num_qubits >= 1 and num_stages >= 0")
    d = (2 * (num_stages + 1)) ** num_qubits
    if d > MAX_DIM:
        raise InstanceTooLarge(f"instance too large: dimension {d} exceeds {MAX_DIM}")
    return d


@dataclass(frozen=True)
class Basis:
    num_qubits: int
    num_stages: int

    @property
    def num_rows(self) -> int:
        return self.num_stages + 1

    @property
    def sites_per_qubit(self) -> int:
        return 2 * self.num_rows

    @property
    def dim(self) -> int:
        return dim(self.num_qubits, self.num_stages)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.sites_per_qubit,) * self.num_qubits

    def axis(self, qubit: int) -> int:
        return self.num_qubits - 1 - qubit

    def encode(self, sites: Sequence[int]) -> int:
        if len(sites) != self.num_qubits:
            raise ValueError(f"expected {self.num_qubits} site ordinals, got {len(sites)}")
        L = self.sites_per_qubit
        index = 0
        for s in reversed(sites):
            if not 0 <= s < L:
                raise ValueError(f"site ordinal {s} out of range 0..{L - 1}")
            index = index * L + int(s)
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range 0..{self.dim - 1}")
        L = self.sites_per_qubit
        out = []
        for _ in range(self.num_qubits):
            index, s = divmod(index, L)
            out.append(s)
        return tuple(out)

    def site_ordinals(self, indices: np.ndarray) -> np.ndarray:
        """Vectorised decode: ``(len(indices), M)`` array of site ordinals."""
        indices = np.asarray(indices, dtype=np.int64)
        L = self.sites_per_qubit
        powers = L ** np.arange(self.num_qubits, dtype=np.int64)
        return (indices[:, None] // powers) % L

    def row_configuration(self, indices: np.ndarray) -> np.ndarray:
        """Mixed-radix id of the per-qubit row tuple (radix ``num_rows``) for each basis index."""
        rows = self.site_ordinals(indices) // 2
        powers = self.num_rows ** np.arange(self.num_qubits, dtype=np.int64)
        return rows @ powers

    def row_indices(self, row: int) -> np.ndarray:
        """Basis indices with every qubit at ``row``, ordered by bit configuration.

        Entry ``c`` holds bit ``(c >> a) & 1`` on qubit ``a``.
        """
        if not 0 <= row <= self.num_stages:
            raise ValueError(f"row {row} out of range 0..{self.num_stages}")
        L = self.sites_per_qubit
        configs = np.arange(2**self.num_qubits, dtype=np.int64)
        index = np.zeros_like(configs)
        for a in range(self.num_qubits):
            index += (2 * row + ((configs >> a) & 1)) * L**a
        return index

    def basis_vector(self, sites: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.encode(sites)] = 1.0
        return v

    def as_tensor(self, state: np.ndarray) -> np.ndarray:
        return np.asarray(state).reshape(self.shape)

    def project_row(self, state: np.ndarray, row: int) -> np.ndarray:
        """Unnormalised ``2**M`` amplitudes of ``state`` with every qubit at ``row``."""
        state = np.asarray(state)
        if state.shape != (self.dim,):
            raise ValueError(f"state has shape {state.shape}, expected ({self.dim},)")
        return state[self.row_indices(row)]


def project_row(state: np.ndarray, row: int, basis: Basis) -> np.ndarray:
    return basis.project_row(state, row)


def bits_of(n: int, num_qubits: int) -> tuple[int, ...]:
    """Per-qubit bits of ``n`` (qubit 0 least significant)."""
    if not 0 <= n < 2**num_qubits:
        raise ValueError(f"input {n} out of range for {num_qubits} qubits")
    return tuple((n >> a) & 1 for a in range(num_qubits))


def format_bits(n: int, num_qubits: int) -> str:
    """Bit string ``b_{M-1} ... b_0`` for configuration ``n``."""
    return format(n, f"0{num_qubits}b")


def parse_bits(text: str, num_qubits: int) -> int:
    """Inverse of :func:`format_bits`; the leftmost character is qubit ``M - 1``."""
    if len(text) != num_qubits or set(text) - {"0", "1"}:
        raise ValueError(f"expected {num_qubits} bits (e.g. {'0' * num_qubits}), got {text!r}")
    return int(text, 2)
