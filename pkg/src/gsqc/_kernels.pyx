# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled CSR kernels.  Must agree bit-for-bit with ``gsqc._fallback``.

Rows are written independently, so the row loop could be split across
threads without changing any result.
"""


def csr_matvec(const long long[::1] indptr, const int[::1] indices,
               const double[::1] data, const double[::1] x, double[::1] out):
    """out[i] = sum_k data[k] * x[indices[k]] over row i, columns ascending."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i
    cdef long long k
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc = acc + data[k] * x[indices[k]]
            out[i] = acc


def csr_matmat(const long long[::1] indptr, const int[::1] indices,
               const double[::1] data, const double[:, ::1] x, double[:, ::1] out):
    """Row-major block product; one pass over the matrix for all columns of ``x``."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t b = x.shape[1]
    cdef Py_ssize_t i, c
    cdef long long k
    cdef double a
    cdef int j
    with nogil:
        for i in range(n):
            for c in range(b):
                out[i, c] = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                a = data[k]
                j = indices[k]
                for c in range(b):
                    out[i, c] = out[i, c] + a * x[j, c]
