"""Numpy implementations of the kernels in ``_kernels.pyx``.

``np.bincount`` accumulates weights in input order, so each row sums its
entries in ascending column order, the same order the compiled loop uses.
"""

import numpy as np


def csr_matvec(indptr, indices, data, x, out):
    n = len(indptr) - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    out[:] = np.bincount(rows, weights=data * x[indices], minlength=n)


def csr_matmat(indptr, indices, data, x, out):
    for c in range(x.shape[1]):
        col = np.ascontiguousarray(x[:, c])
        tmp = np.empty(len(indptr) - 1)
        csr_matvec(indptr, indices, data, col, tmp)
        out[:, c] = tmp
