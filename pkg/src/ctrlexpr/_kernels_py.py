"""Pure-numpy fallback for the compiled Gram-Schmidt kernels.

Same signatures and semantics as ``ctrlexpr._kernels``. Projection uses
classical Gram-Schmidt applied twice, which matches the compiled modified
Gram-Schmidt to roundoff while staying vectorized.
"""
import numpy as np


def _project_out(q, v):
    for _ in range(2):
        v -= q.T @ (q @ v)
    return np.linalg.norm(v)


def incremental_rank(cols, tol):
    cols = np.asarray(cols, dtype=float)
    n, dim = cols.shape
    q = np.zeros((min(n, dim), dim))
    indep = np.zeros(n, dtype=bool)
    trace = np.zeros(n, dtype=np.intp)
    ratio = np.zeros(n)
    k = 0
    for i in range(n):
        work = cols[i].copy()
        nrm = np.linalg.norm(work)
        if nrm > tol and k < q.shape[0]:
            res = _project_out(q[:k], work)
            ratio[i] = res / nrm
            if res > tol * nrm:
                q[k] = work / res
                indep[i] = True
                k += 1
        trace[i] = k
    return indep, trace, ratio


def gs_insert(basis, k, cands, tol):
    accepted = []
    cap = basis.shape[0]
    for i, cand in enumerate(cands):
        if k >= cap:
            break
        work = np.array(cand, dtype=float)
        res = _project_out(basis[:k], work)
        if res > tol:
            basis[k] = work / res
            accepted.append(i)
            k += 1
    return k, np.asarray(accepted, dtype=np.intp)
