"""Layered rotation circuits and their analytic parameter derivatives.

A circuit is an initial state followed by gates ``exp(-i sign theta/2 G)``
applied left to right. Gate unitaries come from the eigendecomposition of
each generator, computed once per circuit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .hamiltonian import ControlSystem, hermitian_operator

__all__ = [
    "TestType",
    "GateSpec",
    "ParametricCircuit",
    "rotation",
    "evaluate",
    "state_derivatives",
    "partial_derivative",
    "computational_zero",
    "max_entangled_state",
    "build_psc_circuit",
    "build_oc_circuit",
    "min_layers",
]

NORM_ATOL = 1e-12


class TestType(str, enum.Enum):
    """Pure-state (PSC) or operator (OC) controllability."""

    __test__ = False

    PSC = "PSC"
    OC = "OC"


class GateSpec(NamedTuple):
    generator_id: int
    param_slot: int
    sign: int = 1


@dataclass(frozen=True, eq=False)
class ParametricCircuit:
    """Initial state plus an ordered list of parametric rotations.

    Attributes:
        generators: Hermitian generators, all of dimension ``dim``.
        gates: applied in order, ``gates[0]`` first.
        initial_state: unit vector the circuit starts from.
        n_params: number of parameter slots; a slot may drive several gates.
        layer_boundaries: gate index at which each layer starts.
    """

    generators: tuple[np.ndarray, ...]
    gates: tuple[GateSpec, ...]
    initial_state: np.ndarray
    n_params: int
    layer_boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        gens = tuple(hermitian_operator(g, traceless=False) for g in self.generators)
        psi = np.array(self.initial_state, dtype=complex)
        if psi.ndim != 1:
            raise ValueError("initial_state must be a vector")
        if abs(np.linalg.norm(psi) - 1.0) > NORM_ATOL:
            raise ValueError(f"initial_state is not normalized (norm={np.linalg.norm(psi):.15g})")
        for g in gens:
            if g.shape != (psi.size, psi.size):
                raise ValueError(f"generator shape {g.shape} does not match state dimension {psi.size}")
        gates = tuple(GateSpec(*g) for g in self.gates)
        used = set()
        for g in gates:
            if not 0 <= g.generator_id < len(gens):
                raise ValueError(f"generator_id {g.generator_id} out of range")
            if not 0 <= g.param_slot < self.n_params:
                raise ValueError(f"param_slot {g.param_slot} out of range")
            if g.sign not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {g.sign}")
            used.add(g.param_slot)
        if len(used) != self.n_params:
            missing = sorted(set(range(self.n_params)) - used)
            raise ValueError(f"parameter slots {missing} are not used by any gate")
        bounds = tuple(int(b) for b in self.layer_boundaries)
        if any(not 0 <= b < max(len(gates), 1) for b in bounds) or list(bounds) != sorted(set(bounds)):
            raise ValueError("layer_boundaries must be increasing gate indices")
        psi.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "initial_state", psi)
        object.__setattr__(self, "layer_boundaries", bounds)

    @property
    def dim(self) -> int:
        return self.initial_state.size

    @property
    def n_layers(self) -> int:
        return len(self.layer_boundaries)

    @property
    def layer_slot_starts(self) -> tuple[int, ...]:
        """First parameter slot of every layer."""
        return tuple(self.gates[b].param_slot for b in self.layer_boundaries)

    @cached_property
    def spectra(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        return tuple(np.linalg.eigh(g) for g in self.generators)


def rotation(generator, angle: float, sign: int = 1) -> np.ndarray:
    """Unitary ``exp(-i sign angle/2 generator)``."""
    gen = hermitian_operator(generator, traceless=False)
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-0.5j * sign * angle * w)) @ v.conj().T


def _check_theta(circuit: ParametricCircuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.n_params,):
        raise ValueError(f"theta has shape {theta.shape}, circuit has {circuit.n_params} parameters")
    return theta


def _propagate(circuit: ParametricCircuit, theta: np.ndarray, derivatives: bool) -> np.ndarray:
    # column 0 carries the state, column 1 + k the derivative wrt slot k
    ncol = 1 + (circuit.n_params if derivatives else 0)
    block = np.zeros((circuit.dim, ncol), dtype=complex)
    block[:, 0] = circuit.initial_state
    for gate in circuit.gates:
        w, v = circuit.spectra[gate.generator_id]
        phase = np.exp(-0.5j * gate.sign * theta[gate.param_slot] * w)
        eig = phase[:, None] * (v.conj().T @ block)
        block = v @ eig
        if derivatives:
            block[:, 1 + gate.param_slot] += (-0.5j * gate.sign) * (v @ (w * eig[:, 0]))
    return block


def evaluate(circuit: ParametricCircuit, theta) -> np.ndarray:
    """Final state ``C(theta)``."""
    return _propagate(circuit, _check_theta(circuit, theta), derivatives=False)[:, 0]


def state_derivatives(circuit: ParametricCircuit, theta) -> tuple[np.ndarray, np.ndarray]:
    """Final state and all partial derivatives in one forward pass.

    Returns:
        (state, derivs): ``derivs[:, k]`` is ``dC/dtheta_k``. Slots shared by
        several gates receive the sum of the per-gate terms.
    """
    block = _propagate(circuit, _check_theta(circuit, theta), derivatives=True)
    return block[:, 0], block[:, 1:]


def partial_derivative(circuit: ParametricCircuit, theta, k: int) -> np.ndarray:
    """``dC/dtheta_k`` evaluated at ``theta``."""
    if not 0 <= k < circuit.n_params:
        raise IndexError(f"slot {k} out of range for {circuit.n_params} parameters")
    return state_derivatives(circuit, theta)[1][:, k]


def computational_zero(dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    return psi


def max_entangled_state(d: int) -> np.ndarray:
    """``sum_i |i>|i> / sqrt(d)`` in the computational basis, length ``d**2``."""
    if d < 2:
        raise ValueError("max_entangled_state needs d >= 2")
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return psi


def build_psc_circuit(system: ControlSystem, n_layers: int, psi0) -> ParametricCircuit:
    """Pure-state test circuit: per layer the drift rotation, then each control."""
    if n_layers < 1:
        raise ValueError("n_layers must be at least 1")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (system.dim,):
        raise ValueError(f"initial state has shape {psi0.shape}, system dimension is {system.dim}")
    per_layer = system.m + 1
    gates = [GateSpec(g, j * per_layer + g) for j in range(n_layers) for g in range(per_layer)]
    return ParametricCircuit(
        generators=system.generators,
        gates=tuple(gates),
        initial_state=psi0,
        n_params=n_layers * per_layer,
        layer_boundaries=tuple(j * per_layer for j in range(n_layers)),
    )


def build_oc_circuit(extended: ControlSystem, n_layers: int) -> ParametricCircuit:
    """Operator test circuit on a bipartite extension.

    Each layer rotates the original drift and the auxiliary drift with the
    same parameter, then applies every extended control. Starts from the
    maximally entangled state between the two halves.
    """
    if extended.drift_parts is None:
        raise ValueError("operator test needs a system produced by extend_bipartite")
    if n_layers < 1:
        raise ValueError("n_layers must be at least 1")
    part_a, part_b = extended.drift_parts
    m = extended.m
    gates = []
    for j in range(n_layers):
        slot = j * (m + 1)
        # part_b already holds -w/2 Z, so sign +1 gives exp(+i a/2 sum w/2 Z)
        gates += [GateSpec(0, slot), GateSpec(1, slot)]
        gates += [GateSpec(1 + k, slot + k) for k in range(1, m + 1)]
    return ParametricCircuit(
        generators=(part_a, part_b, *extended.controls),
        gates=tuple(gates),
        initial_state=max_entangled_state(2 ** (extended.qubits // 2)),
        n_params=n_layers * (m + 1),
        layer_boundaries=tuple(j * (m + 2) for j in range(n_layers)),
    )


def min_layers(test: TestType | str, d: int, m: int) -> int:
    """Fewest layers whose parameter count reaches the maximal expressivity.

    ``d`` is the Hilbert-space dimension of the original system.
    """
    test = TestType(test)
    if d < 2 or m < 1:
        raise ValueError("min_layers needs d >= 2 and m >= 1")
    target = 2 * d - 1 if test is TestType.PSC else d * d - 1
    return -(-target // (m + 1))
