"""Dimensional expressivity of parametric circuits.

The expressivity at a parameter point is the rank of the real Jacobian of
the final state. Parameters are scanned in slot order; a slot is
independent when its Jacobian column raises the rank of the leading
columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import ParametricCircuit, state_derivatives

__all__ = [
    "DEFAULT_TOLERANCE",
    "ExpressivityScan",
    "jacobian",
    "s_matrix",
    "numeric_rank",
    "scan",
]

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ExpressivityScan:
    independent_slots: tuple[int, ...]
    rank_trace: tuple[int, ...]
    expressivity: int
    theta: tuple[float, ...]
    tolerance: float

    @property
    def saturation_slot(self) -> int | None:
        """First slot at which the final expressivity is reached."""
        if not self.independent_slots:
            return None
        return self.independent_slots[-1]

    def rank_before(self, slot: int) -> int:
        """Rank of the Jacobian restricted to slots ``0 .. slot-1``."""
        return self.rank_trace[slot - 1] if slot > 0 else 0


def jacobian(circuit: ParametricCircuit, theta) -> np.ndarray:
    """Real ``2d x n`` Jacobian: real parts in the top half, imaginary below."""
    _, derivs = state_derivatives(circuit, theta)
    return np.vstack([derivs.real, derivs.imag])


def s_matrix(jac: np.ndarray, n: int) -> np.ndarray:
    """Gram matrix ``J_n^T J_n`` of the first ``n`` Jacobian columns."""
    if not 0 <= n <= jac.shape[1]:
        raise ValueError(f"n={n} out of range for {jac.shape[1]} columns")
    lead = jac[:, :n]
    s = lead.T @ lead
    return 0.5 * (s + s.T)


def numeric_rank(mat: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def _svd_trace(jac: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    # slot-ordered rank test by SVD of the kept columns plus the candidate
    n = jac.shape[1]
    indep = np.zeros(n, dtype=bool)
    trace = np.zeros(n, dtype=np.intp)
    kept: list[int] = []
    for k in range(n):
        if np.linalg.norm(jac[:, k]) > tol and numeric_rank(jac[:, kept + [k]], tol) > len(kept):
            kept.append(k)
            indep[k] = True
        trace[k] = len(kept)
    return indep, trace


def scan(circuit: ParametricCircuit, theta, tol: float = DEFAULT_TOLERANCE) -> ExpressivityScan:
    """Find a maximal set of independent parameters at ``theta``.

    A column is counted as independent when its norm exceeds ``tol`` and
    the part of it orthogonal to the earlier independent columns is larger
    than ``tol`` times its norm.

    A column accepted with a relative residual below ``sqrt(tol)`` leaves
    a basis vector whose direction error (roundoff over that residual) can
    push later, dependent columns over the threshold. In that case the
    trace is recomputed with SVD rank tests, slot by slot.
    """
    theta = np.asarray(theta, dtype=float)
    jac = jacobian(circuit, theta)
    indep, trace, ratio = kernels.incremental_rank(np.ascontiguousarray(jac.T), tol)
    if np.any(indep & (ratio < np.sqrt(tol))):
        indep, trace = _svd_trace(jac, tol)
    trace = tuple(int(r) for r in trace)
    return ExpressivityScan(
        independent_slots=tuple(int(k) for k in np.flatnonzero(indep)),
        rank_trace=trace,
        expressivity=trace[-1] if trace else 0,
        theta=tuple(float(t) for t in theta),
        tolerance=float(tol),
    )
