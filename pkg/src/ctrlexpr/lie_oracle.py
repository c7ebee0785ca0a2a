"""Brute-force dynamical Lie algebra and the classical rank conditions.

Skew-Hermitian matrices are handled as real vectors ``[Re A, Im A] / sqrt(d)``
so that the Euclidean dot product equals ``Re tr(A^dag B) / d``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .hamiltonian import ControlSystem

__all__ = [
    "ORACLE_TOLERANCE",
    "AlgebraBasis",
    "density_matrix",
    "generate_algebra",
    "operator_controllable",
    "pure_state_rank",
    "pure_state_controllable",
]

log = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """Orthonormal basis of a real matrix Lie algebra.

    Attributes:
        elements: ``(dim, d, d)`` skew-Hermitian matrices, orthonormal under
            ``Re tr(A^dag B) / d``.
        generation: commutator nesting depth at which each element appeared.
    """

    elements: np.ndarray
    generation: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def d(self) -> int:
        return self.elements.shape[1]


def _to_real(mats: np.ndarray) -> np.ndarray:
    d = mats.shape[-1]
    flat = mats.reshape(len(mats), d * d)
    return np.ascontiguousarray(np.concatenate([flat.real, flat.imag], axis=1) / np.sqrt(d))


def _from_real(vecs: np.ndarray, d: int) -> np.ndarray:
    half = d * d
    scaled = vecs * np.sqrt(d)
    return (scaled[:, :half] + 1j * scaled[:, half:]).reshape(len(vecs), d, d)


def _lie_closure(seeds: np.ndarray, tol: float) -> AlgebraBasis:
    d = seeds.shape[-1]
    traceless = np.all(np.abs(np.trace(seeds, axis1=1, axis2=2)) < 1e-12)
    max_dim = d * d - 1 if traceless else d * d
    basis = np.zeros((d * d, 2 * d * d))
    norms = np.linalg.norm(seeds.reshape(len(seeds), -1), axis=1) / np.sqrt(d)
    seeds = seeds[norms > tol] / norms[norms > tol, None, None]
    k, accepted = kernels.gs_insert(basis, 0, _to_real(seeds), tol)
    generation = [0] * k
    frontier = list(range(k))
    level = 0
    while frontier and k < max_dim:
        level += 1
        snapshot = k
        mats = _from_real(basis[:snapshot], d)
        first_new = k
        in_frontier = np.zeros(snapshot, dtype=bool)
        in_frontier[frontier] = True
        for i in frontier:
            # frontier pairs are visited once, from the lower index
            partners = np.flatnonzero(~in_frontier | (np.arange(snapshot) > i))
            if partners.size == 0:
                continue
            others = mats[partners]
            comm = mats[i] @ others - others @ mats[i]
            vecs = _to_real(comm)
            for _ in range(2):
                vecs -= (vecs @ basis[:k].T) @ basis[:k]
            keep = np.linalg.norm(vecs, axis=1) > tol
            if keep.any():
                k, accepted = kernels.gs_insert(basis, k, np.ascontiguousarray(vecs[keep]), tol)
                generation += [level] * len(accepted)
            if k >= max_dim:
                break
        log.debug("commutator depth %d: algebra dimension %d", level, k)
        frontier = list(range(first_new, k))
    return AlgebraBasis(elements=_from_real(basis[:k], d), generation=tuple(generation))


def generate_algebra(system: ControlSystem, tol: float = ORACLE_TOLERANCE) -> AlgebraBasis:
    """Lie algebra generated by ``i H_0, ..., i H_m`` under commutation.

    Generators are rescaled to unit norm before orthonormalization, and new
    commutators are kept when their residual norm exceeds ``tol``.
    """
    seeds = np.array([1j * h for h in system.generators])
    return _lie_closure(seeds, tol)


def operator_controllable(system: ControlSystem, tol: float = ORACLE_TOLERANCE) -> bool:
    """True iff the dynamical Lie algebra is all of ``su(d)``."""
    return generate_algebra(system, tol).dim == system.dim**2 - 1


def density_matrix(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def _check_pure(rho0: np.ndarray, d: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(d, d)}")
    if (
        np.abs(rho0 - rho0.conj().T).max() > 1e-10
        or abs(np.trace(rho0) - 1) > 1e-10
        or np.abs(rho0 @ rho0 - rho0).max() > 1e-10
    ):
        raise ValueError("rho0 must be a pure-state density matrix")
    return rho0


def pure_state_rank(
    system: ControlSystem,
    rho0,
    tol: float = ORACLE_TOLERANCE,
    algebra: AlgebraBasis | None = None,
) -> int:
    """Dimension of the real span of ``[rho0, L]``.

    This is the dimension of the orbit of ``rho0`` under the group generated
    by the dynamical Lie algebra ``L``; it is at most ``2d - 2``.
    """
    rho0 = _check_pure(rho0, system.dim)
    if algebra is None:
        algebra = generate_algebra(system, tol)
    if algebra.dim == 0:
        return 0
    elems = algebra.elements
    vecs = _to_real(rho0 @ elems - elems @ rho0)
    scale = np.linalg.norm(vecs, axis=1).max()
    if scale == 0:
        return 0
    buf = np.zeros((min(len(vecs), vecs.shape[1]), vecs.shape[1]))
    k, _ = kernels.gs_insert(buf, 0, vecs / scale, tol)
    return int(k)


def pure_state_controllable(system: ControlSystem, rho0, tol: float = ORACLE_TOLERANCE) -> bool:
    """True iff the orbit of ``rho0`` has the full dimension ``2d - 2``."""
    return pure_state_rank(system, rho0, tol) == 2 * system.dim - 2
