"""Low-lying spectrum: dense and Lanczos solvers, ground-space grouping, gap scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from gsqc.hamiltonian import SparseSymMatrix, assemble

DENSE_LIMIT = 4096
MAX_LANCZOS_K = 32
DEGENERACY_TOL = 1e-8


class SolverError(RuntimeError):
    pass


class DimensionTooLarge(SolverError):
    pass


class ConvergenceError(SolverError):
    def __init__(self, message: str, residuals: np.ndarray):
        super().__init__(message)
        self.residuals = residuals


class DegeneracyMismatch(SolverError):
    def __init__(self, expected: int, observed: int):
        super().__init__(f"degeneracy mismatch: expected {expected}, observed {observed}")
        self.expected = expected
        self.observed = observed


@dataclass
class GroundSpace:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    degeneracy: int
    gap: float  # nan when no eigenvalue above the ground group was computed
    solver: str

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_vectors(self) -> np.ndarray:
        return self.eigenvectors[:, : self.degeneracy]


def solve_dense(H: SparseSymMatrix, dense_limit: int = DENSE_LIMIT) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum (ascending) and orthonormal eigenvectors."""
    if H.dim > dense_limit:
        raise DimensionTooLarge(f"dimension {H.dim} above dense limit {dense_limit}")
    return np.linalg.eigh(H.to_dense())


def _orthogonalize(v: np.ndarray, *blocks: np.ndarray) -> np.ndarray:
    # two passes of classical Gram-Schmidt
    for _ in range(2):
        for Q in blocks:
            if Q.shape[1]:
                v = v - Q @ (Q.T @ v)
    return v


def _next_block(P, X, V, rng):
    """Orthonormal block from ``P``, orthogonal to locked ``X`` and basis ``V``.

    Directions lost to cancellation are replaced with random vectors.
    """
    n, b = P.shape
    scale = np.linalg.norm(P, axis=0)
    P = _orthogonalize(P, X, V)
    weak = np.linalg.norm(P, axis=0) <= 1e-8 * np.maximum(scale, 1e-300)
    if weak.any():
        P[:, weak] = _orthogonalize(rng.standard_normal((n, int(weak.sum()))), X, V)
    Q, R = np.linalg.qr(P)
    lost = np.abs(np.diag(R)) <= 1e-10 * np.abs(np.diag(R)).max()
    if lost.any():
        # keep the independent columns, refill the rest with noise
        fresh = _orthogonalize(rng.standard_normal((n, int(lost.sum()))), X, V, Q[:, ~lost])
        Q = np.column_stack([Q[:, ~lost], np.linalg.qr(fresh)[0]])
        Q = _orthogonalize(Q, X, V)
        Q = np.linalg.qr(Q)[0]
    return Q


def solve_lanczos(
    H: SparseSymMatrix,
    k: int,
    seed: int = 0,
    tol: float | None = None,
    max_iter: int | None = None,
    block_size: int | None = None,
    basis_size: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """``k`` lowest eigenpairs by thick-restart block Lanczos.

    Each new block is fully reorthogonalised against the working basis and
    against locked (converged) eigenvectors; converged pairs are locked in
    ascending order and deflated.  A block of ``b`` vectors resolves
    eigenvalues of multiplicity up to ``b``, which the zero modes of an
    unbiased circuit need; ``block_size`` defaults to ``k``.

    ``tol`` bounds ``||H v - lambda v||`` and defaults to
    ``1e-9 * H.scale * sqrt(dim)``.  ``max_iter`` counts matrix-vector
    products (default ``min(10 * dim, 200000)``).  The start block is drawn
    from ``seed``, so results are reproducible.
    """
    n = H.dim
    if n <= 1:
        raise ValueError("Lanczos needs dim > 1")
    if not 1 <= k <= min(MAX_LANCZOS_K, n):
        raise ValueError(f"k must be in 1..{min(MAX_LANCZOS_K, n)}, got {k}")
    if tol is None:
        tol = 1e-9 * H.scale * math.sqrt(n)
    if max_iter is None:
        max_iter = min(10 * n, 200_000)
    b = block_size or k
    m = basis_size or max(120, 12 * b + 2 * k)
    # whole blocks only, so the restart continuation keeps its full width
    m = min(b * -(-m // b), n)
    rng = np.random.default_rng(seed)

    X = np.zeros((n, 0))  # locked eigenvectors
    locked_vals: list[float] = []
    V = np.zeros((n, m))
    AV = np.zeros((n, m))
    T = np.zeros((m, m))
    j = 0
    pending = rng.standard_normal((n, b))
    matvecs = 0
    residuals = np.full(k, np.inf)

    while True:
        while j < m and X.shape[1] + j < n:
            width = min(b, m - j, n - X.shape[1] - j)
            Q = _next_block(pending[:, :width], X, V[:, :j], rng)
            V[:, j : j + width] = Q
            W = H.matmat(Q)
            matvecs += width
            AV[:, j : j + width] = W
            Hc = V[:, : j + width].T @ W
            T[: j + width, j : j + width] = Hc
            T[j : j + width, : j + width] = Hc.T
            pending = W
            j += width

        T[:j, :j] = 0.5 * (T[:j, :j] + T[:j, :j].T)
        theta, G = np.linalg.eigh(T[:j, :j])
        Z = V[:, :j] @ G
        AZ = AV[:, :j] @ G
        want = min(k - X.shape[1], j)
        res = np.linalg.norm(AZ[:, :want] - Z[:, :want] * theta[:want], axis=0)
        newly = 0
        while newly < want and res[newly] <= tol:
            newly += 1
        done = X.shape[1]
        residuals[done : done + want] = res
        exhausted = X.shape[1] + j >= n
        if exhausted:
            # the working space spans the whole complement: every Ritz pair is exact
            newly = want
        if newly:
            X = np.column_stack([X, Z[:, :newly]])
            locked_vals += theta[:newly].tolist()
        remaining = k - X.shape[1]
        if remaining == 0:
            break
        if matvecs >= max_iter:
            raise ConvergenceError(
                f"Lanczos did not converge in {matvecs} matrix-vector products", residuals.copy()
            )
        keep = min(j - newly, max(remaining + b, 2 * remaining), m - b)
        keep = max(m - b * -(-(m - keep) // b), 0)
        sel = slice(newly, newly + keep)
        # pending block: the unprocessed part of the last Krylov step
        pending = _orthogonalize(pending, X, V[:, :j])
        V[:, :keep] = Z[:, sel]
        AV[:, :keep] = AZ[:, sel]
        T[:] = 0.0
        T[np.arange(keep), np.arange(keep)] = theta[sel]
        j = keep
        if pending.shape[1] < b:
            pending = np.column_stack([pending, rng.standard_normal((n, b - pending.shape[1]))])

    vals = np.asarray(locked_vals)
    order = np.argsort(vals, kind="stable")
    return vals[order], X[:, order]


def group_ground(eigenvalues: np.ndarray, scale: float = 1.0) -> tuple[int, float]:
    """Degeneracy of the lowest eigenvalue (within ``DEGENERACY_TOL * scale``) and the gap above it."""
    vals = np.sort(np.asarray(eigenvalues))
    degeneracy = int(np.count_nonzero(vals - vals[0] <= DEGENERACY_TOL * scale))
    gap = float(vals[degeneracy] - vals[0]) if degeneracy < len(vals) else math.nan
    return degeneracy, gap


def ground_space(
    H: SparseSymMatrix,
    expected_degeneracy: int | None = None,
    solver: str = "auto",
    seed: int = 0,
    dense_limit: int = DENSE_LIMIT,
) -> GroundSpace:
    """Ground energy, degenerate ground vectors and the gap above them."""
    if solver == "auto":
        solver = "dense" if H.dim <= dense_limit else "lanczos"
    if solver == "dense" or H.dim == 1:
        vals, vecs = solve_dense(H, dense_limit)
        solver = "dense"
    elif solver == "lanczos":
        k = min((expected_degeneracy or 1) + 1, H.dim - 1, MAX_LANCZOS_K)
        while True:
            vals, vecs = solve_lanczos(H, k, seed=seed)
            degeneracy, _ = group_ground(vals, H.scale)
            # need at least one eigenvalue above the ground group
            if degeneracy < k or k >= min(H.dim - 1, MAX_LANCZOS_K):
                break
            k = min(2 * k, H.dim - 1, MAX_LANCZOS_K)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    degeneracy, gap = group_ground(vals, H.scale)
    if expected_degeneracy is not None and degeneracy != expected_degeneracy:
        raise DegeneracyMismatch(expected_degeneracy, degeneracy)
    return GroundSpace(vals, vecs, degeneracy, gap, solver)


def spectral_gap_scan(
    family: Callable[[int], "object"],
    rows: Iterable[int],
    solver: str = "auto",
) -> list[tuple[int, float]]:
    """``(N, gap)`` for ``family(N)``, a circuit with ``N`` stages, at each requested stage count.

    ``rows`` lists stage counts ``N`` (each circuit has ``N + 1`` rows).
    """
    table = []
    for n in rows:
        circuit = family(n)
        H = assemble(circuit)
        table.append((n, ground_space(H, solver=solver).gap))
    return table


def identity_chain_gap(num_stages: int, epsilon: float = 1.0) -> float:
    """Closed form for the single-qubit Identity chain: the path-graph Laplacian's first nonzero mode."""
    return 2.0 * epsilon * (1.0 - math.cos(math.pi / (num_stages + 1)))


def subspace_residual(vectors: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Relative norm of each column of ``vectors`` off the span of orthonormal ``basis`` columns."""
    vectors = np.atleast_2d(np.asarray(vectors).T).T
    off = vectors - basis @ (basis.T @ vectors)
    return np.linalg.norm(off, axis=0) / np.linalg.norm(vectors, axis=0)

