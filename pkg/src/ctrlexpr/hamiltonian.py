"""Pauli-string Hamiltonians and driven qubit systems.

Operators are dense complex ``numpy`` arrays. Qubit 0 is the leftmost
(most-significant) tensor factor, so ``"ZI"`` acts on the first qubit of
``|q0 q1>``. Energies are plain coefficients in GHz with hbar = 1.
"""
from __future__ import annotations

import functools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PAULI",
    "PauliTerm",
    "ControlSystem",
    "hermitian_operator",
    "dense_matrix",
    "assemble",
    "embed",
    "extend_bipartite",
    "qubit_frequencies",
]

HERMITIAN_ATOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """A real weight times a tensor product of single-qubit Paulis.

    Args:
        axes: one label from ``IXYZ`` per qubit, e.g. ``"XXII"``.
        weight: coefficient in GHz.
    """

    axes: str
    weight: float = 1.0

    def __post_init__(self):
        axes = "".join(self.axes).upper()
        if not axes:
            raise ValueError("PauliTerm needs at least one axis")
        bad = set(axes) - set(PAULI)
        if bad:
            raise ValueError(f"invalid Pauli labels {sorted(bad)} in {self.axes!r}")
        if not np.isfinite(self.weight):
            raise ValueError(f"non-finite weight {self.weight!r}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def qubits(self) -> int:
        return len(self.axes)

    @property
    def is_identity(self) -> bool:
        return set(self.axes) == {"I"}


def hermitian_operator(matrix, traceless: bool = True, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``matrix`` as a (traceless) Hermitian operator.

    Returns a read-only complex copy. Raises ``ValueError`` if the matrix
    is not square, not Hermitian within ``atol``, or (when ``traceless``)
    has a trace larger than ``atol``.
    """
    op = np.array(matrix, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] == 0:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {op.shape}")
    if np.abs(op - op.conj().T).max() >= atol:
        raise ValueError("operator is not Hermitian")
    if traceless and abs(np.trace(op)) >= atol:
        raise ValueError(f"operator is not traceless (trace={np.trace(op):.3g})")
    op.setflags(write=False)
    return op


def dense_matrix(term: PauliTerm) -> np.ndarray:
    """Dense ``2^q x 2^q`` matrix of ``term``."""
    mat = functools.reduce(np.kron, (PAULI[a] for a in term.axes))
    return term.weight * mat


def assemble(terms: Iterable[PauliTerm], qubits: int) -> np.ndarray:
    """Sum of the dense matrices of ``terms``; the zero matrix if empty."""
    total = np.zeros((2**qubits, 2**qubits), dtype=complex)
    for term in terms:
        if term.qubits != qubits:
            raise ValueError(f"term {term.axes!r} has {term.qubits} axes, expected {qubits}")
        total += dense_matrix(term)
    return total


def embed(label: str, qubit: int, qubits: int, weight: float = 1.0) -> PauliTerm:
    """Single-qubit Pauli ``label`` acting on ``qubit`` of a ``qubits`` register."""
    if not 0 <= qubit < qubits:
        raise ValueError(f"qubit {qubit} out of range for {qubits} qubits")
    axes = ["I"] * qubits
    axes[qubit] = label
    return PauliTerm("".join(axes), weight)


def qubit_frequencies(terms: Sequence[PauliTerm], qubits: int) -> tuple[float, ...]:
    """Recover free-qubit frequencies from ``-w/2 Z_j`` drift terms.

    Qubits without a single-qubit ``Z`` term get frequency 0.
    """
    freqs = [0.0] * qubits
    for term in terms:
        non_id = [(k, a) for k, a in enumerate(term.axes) if a != "I"]
        if len(non_id) == 1 and non_id[0][1] == "Z":
            freqs[non_id[0][0]] += -2.0 * term.weight
    return tuple(freqs)


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """Drift plus control operators on ``qubits`` qubits.

    ``drift_parts`` is only set on bipartite extensions: it holds the
    original-system drift (acting on the first half of the qubits) and the
    auxiliary free-qubit drift separately, since the operator test rotates
    them as two gates sharing one parameter.
    """

    qubits: int
    drift: np.ndarray
    controls: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None
    drift_parts: tuple[np.ndarray, np.ndarray] | None = None
    frequencies: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.qubits < 1:
            raise ValueError("a control system needs at least one qubit")
        dim = 2**self.qubits
        drift = hermitian_operator(self.drift)
        controls = tuple(hermitian_operator(c) for c in self.controls)
        if not controls:
            raise ValueError("a control system needs at least one control operator")
        for op in (drift, *controls):
            if op.shape != (dim, dim):
                raise ValueError(f"operator shape {op.shape} does not match {self.qubits} qubits")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "controls", controls)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(controls) + 1:
                raise ValueError("labels must name the drift and every control")
            object.__setattr__(self, "labels", labels)
        if self.drift_parts is not None:
            parts = tuple(hermitian_operator(p) for p in self.drift_parts)
            if len(parts) != 2 or np.abs(parts[0] + parts[1] - drift).max() > 1e-10:
                raise ValueError("drift_parts must be two operators summing to the drift")
            object.__setattr__(self, "drift_parts", parts)
        if self.frequencies is not None:
            object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))

    @property
    def dim(self) -> int:
        return 2**self.qubits

    @property
    def m(self) -> int:
        """Number of control operators."""
        return len(self.controls)

    @property
    def generators(self) -> tuple[np.ndarray, ...]:
        return (self.drift, *self.controls)

    @classmethod
    def from_terms(
        cls,
        qubits: int,
        drift: Sequence[PauliTerm],
        controls: Sequence[PauliTerm | Sequence[PauliTerm]],
        labels: Sequence[str] | None = None,
    ) -> "ControlSystem":
        """Build a system from Pauli terms; each control may be one term or a list."""
        ctrl_ops = []
        for c in controls:
            ctrl_ops.append(assemble([c] if isinstance(c, PauliTerm) else c, qubits))
        return cls(
            qubits=qubits,
            drift=assemble(drift, qubits),
            controls=tuple(ctrl_ops),
            labels=None if labels is None else tuple(labels),
            frequencies=qubit_frequencies(drift, qubits),
        )

    def scaled(self, drift_factor: float, control_factors: Sequence[float]) -> "ControlSystem":
        """Copy with the drift and each control multiplied by a positive factor."""
        parts = None
        if self.drift_parts is not None:
            parts = tuple(drift_factor * p for p in self.drift_parts)
        freqs = None if self.frequencies is None else tuple(drift_factor * f for f in self.frequencies)
        return ControlSystem(
            qubits=self.qubits,
            drift=drift_factor * self.drift,
            controls=tuple(f * c for f, c in zip(control_factors, self.controls, strict=True)),
            labels=self.labels,
            drift_parts=parts,
            frequencies=freqs,
        )

    def normalized(self) -> "ControlSystem":
        """Copy with every non-zero generator rescaled to unit spectral norm.

        Both parts of a split drift share the drift's factor, so the
        physical evolution time behind a shared drift parameter is kept.
        """

        def inv_norm(op):
            n = np.linalg.norm(op, 2)
            return 1.0 / n if n > 0 else 1.0

        return self.scaled(inv_norm(self.drift), [inv_norm(c) for c in self.controls])


def extend_bipartite(system: ControlSystem, aux_frequencies: Sequence[float]) -> ControlSystem:
    """Double ``system`` with auxiliary qubits that carry only free drift.

    The result acts on ``2q`` qubits: original operators become ``H (x) I``
    and the drift gains ``sum_j -w_j/2 Z_{j+q}`` on the auxiliary half. The
    two drift contributions are kept apart in ``drift_parts``.
    """
    q = system.qubits
    if len(aux_frequencies) != q:
        raise ValueError(f"need {q} auxiliary frequencies, got {len(aux_frequencies)}")
    eye = np.eye(system.dim, dtype=complex)
    part_a = np.kron(system.drift, eye)
    part_b = assemble(
        [embed("Z", j + q, 2 * q, -0.5 * float(w)) for j, w in enumerate(aux_frequencies)], 2 * q
    )
    return ControlSystem(
        qubits=2 * q,
        drift=part_a + part_b,
        controls=tuple(np.kron(c, eye) for c in system.controls),
        labels=system.labels,
        drift_parts=(part_a, part_b),
        frequencies=None,
    )
