# cython: language_level=3
"""Compiled Gram-Schmidt kernels.

Both routines run modified Gram-Schmidt with one full reorthogonalization
pass over the rows of a basis buffer. Rows are the vectors; the buffer is
filled in place.
"""
import numpy as np

from libc.math cimport sqrt


cdef double _project_out(double[:, ::1] q, Py_ssize_t k, double[::1] v) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t p, i, j
    cdef double c, s
    for p in range(2):
        for i in range(k):
            c = 0.0
            for j in range(n):
                c += q[i, j] * v[j]
            for j in range(n):
                v[j] -= c * q[i, j]
    s = 0.0
    for j in range(n):
        s += v[j] * v[j]
    return sqrt(s)


cdef double _norm(double[::1] v) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t j
    for j in range(v.shape[0]):
        s += v[j] * v[j]
    return sqrt(s)


def incremental_rank(double[:, ::1] cols, double tol):
    """Rank trace of the leading columns of a matrix given as rows of ``cols``.

    Row ``i`` is independent iff its norm exceeds ``tol`` and its residual
    after projection onto the span of the earlier independent rows exceeds
    ``tol`` times its norm.

    Returns:
        (independent, trace, ratio): boolean flags, running rank and the
        relative residual ``res / norm`` (0 for skipped rows), one per row.
    """
    cdef Py_ssize_t n = cols.shape[0], dim = cols.shape[1]
    cdef Py_ssize_t i, j, k = 0
    cdef double nrm, res
    q_arr = np.zeros((min(n, dim), dim))
    work_arr = np.empty(dim)
    indep_arr = np.zeros(n, dtype=np.uint8)
    trace_arr = np.zeros(n, dtype=np.intp)
    ratio_arr = np.zeros(n)
    cdef double[:, ::1] q = q_arr
    cdef double[::1] work = work_arr
    cdef unsigned char[::1] indep = indep_arr
    cdef Py_ssize_t[::1] trace = trace_arr
    cdef double[::1] ratio = ratio_arr
    with nogil:
        for i in range(n):
            for j in range(dim):
                work[j] = cols[i, j]
            nrm = _norm(work)
            if nrm > tol and k < q.shape[0]:
                res = _project_out(q, k, work)
                ratio[i] = res / nrm
                if res > tol * nrm:
                    for j in range(dim):
                        q[k, j] = work[j] / res
                    indep[i] = 1
                    k += 1
            trace[i] = k
    return indep_arr.astype(bool), trace_arr, ratio_arr


def gs_insert(double[:, ::1] basis, Py_ssize_t k, double[:, ::1] cands, double tol):
    """Append candidates whose residual norm exceeds ``tol`` to ``basis``.

    ``basis[:k]`` must be orthonormal; accepted candidates are normalized
    into ``basis[k:]`` in order.

    Returns:
        (k_new, accepted): new basis size and indices of accepted candidates.
    """
    cdef Py_ssize_t c = cands.shape[0], dim = cands.shape[1]
    cdef Py_ssize_t cap = basis.shape[0]
    cdef Py_ssize_t i, j
    cdef double res
    work_arr = np.empty(dim)
    cdef double[::1] work = work_arr
    accepted = []
    for i in range(c):
        if k >= cap:
            break
        with nogil:
            for j in range(dim):
                work[j] = cands[i, j]
            res = _project_out(basis, k, work)
            if res > tol:
                for j in range(dim):
                    basis[k, j] = work[j] / res
        if res > tol:
            accepted.append(i)
            k += 1
    return k, np.asarray(accepted, dtype=np.intp)
