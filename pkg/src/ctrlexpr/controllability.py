"""Pure-state and operator controllability tests.

The test grows a layered rotation circuit until its expressivity reaches
the maximum (controllable) or a full layer adds nothing for every one of
several fresh random parameter draws (not controllable). A layer budget
turns runaway growth into an inconclusive verdict.
"""
from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import (
    ParametricCircuit,
    TestType,
    build_oc_circuit,
    build_psc_circuit,
    computational_zero,
    max_entangled_state,
    min_layers,
)
from .expressivity import DEFAULT_TOLERANCE, ExpressivityScan, scan
from .hamiltonian import ControlSystem, extend_bipartite

__all__ = [
    "Outcome",
    "TestConfig",
    "TrialScan",
    "Verdict",
    "expressivity_before_last_layer",
    "initial_state_vector",
    "run_test",
    "worker_threads",
]

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
INITIAL_STATES = ("computational-zero", "max-entangled")


class Outcome(str, enum.Enum):
    CONTROLLABLE = "Controllable"
    NOT_CONTROLLABLE = "NotControllable"
    INCONCLUSIVE = "Inconclusive"

    @property
    def algorithm_code(self) -> int:
        """0 not controllable, 1 controllable, 2 inconclusive."""
        return {"NotControllable": 0, "Controllable": 1, "Inconclusive": 2}[self.value]

    @property
    def exit_code(self) -> int:
        return {"Controllable": 0, "NotControllable": 1, "Inconclusive": 2}[self.value]


@dataclass(frozen=True)
class TestConfig:
    """Inputs of one controllability run.

    ``n_layers_initial="auto"`` starts from the minimal layer count, and
    ``max_extra_layers=None`` allows as many extra layers as that minimum.
    ``initial_state`` is ``None`` (test default), one of
    ``"computational-zero"``/``"max-entangled"``, or an explicit vector;
    the operator test always starts from the maximally entangled state.
    """

    __test__ = False

    test_type: TestType = TestType.PSC
    initial_state: str | tuple[complex, ...] | None = None
    n_layers_initial: int | str = "auto"
    max_extra_layers: int | None = None
    resamples: int = 5
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    normalize_generators: bool = False

    def __post_init__(self):
        object.__setattr__(self, "test_type", TestType(self.test_type))
        if self.n_layers_initial != "auto":
            if isinstance(self.n_layers_initial, bool) or not isinstance(self.n_layers_initial, (int, np.integer)):
                raise ValueError("n_layers_initial must be a positive integer or 'auto'")
            if self.n_layers_initial < 1:
                raise ValueError("n_layers_initial must be at least 1")
            object.__setattr__(self, "n_layers_initial", int(self.n_layers_initial))
        if self.max_extra_layers is not None and self.max_extra_layers < 0:
            raise ValueError("max_extra_layers must be non-negative")
        if self.resamples < 1:
            raise ValueError("resamples must be at least 1")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        state = self.initial_state
        if isinstance(state, str):
            if state not in INITIAL_STATES:
                raise ValueError(f"initial_state must be one of {INITIAL_STATES} or a vector")
        elif state is not None:
            object.__setattr__(self, "initial_state", tuple(complex(a) for a in state))
        if self.test_type is TestType.OC and state not in (None, "max-entangled"):
            raise ValueError("the operator test always starts from the maximally entangled state")


@dataclass(frozen=True)
class TrialScan:
    """One expressivity scan of an ``layers``-layer circuit."""

    layers: int
    scan: ExpressivityScan
    before_last_layer: int
    resample: int | None = None

    @property
    def expressivity(self) -> int:
        return self.scan.expressivity

    @property
    def grew(self) -> bool:
        """Whether the last layer contributed an independent parameter."""
        return self.scan.expressivity > self.before_last_layer


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    expressivity_target: int
    best_expressivity: int
    layers_used: int
    scans: tuple[TrialScan, ...]
    resample_history: tuple[TrialScan, ...] = ()
    seed: int = 0
    layers_initial: int = 0
    params_per_layer: int = 1
    aux_frequencies: tuple[float, ...] | None = field(default=None)

    @property
    def saturation_slot(self) -> int | None:
        """Slot at which the final circuit's expressivity was reached."""
        return self.scans[-1].scan.saturation_slot if self.scans else None

    @property
    def saturation_layer(self) -> int | None:
        """1-based layer containing ``saturation_slot``."""
        slot = self.saturation_slot
        return None if slot is None else slot // self.params_per_layer + 1


def worker_threads() -> int:
    """Worker cap from ``CTRL_EXPR_THREADS`` (default 1)."""
    raw = os.environ.get("CTRL_EXPR_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CTRL_EXPR_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def expressivity_before_last_layer(result: ExpressivityScan, circuit: ParametricCircuit) -> int:
    """Rank of the Jacobian columns that precede the circuit's last layer."""
    if circuit.n_layers < 1:
        raise ValueError("circuit has no layers")
    return result.rank_before(circuit.layer_slot_starts[-1])


def initial_state_vector(config: TestConfig, dim: int) -> np.ndarray:
    state = config.initial_state
    if state is None or state == "computational-zero":
        return computational_zero(dim)
    if state == "max-entangled":
        sub = int(round(np.sqrt(dim)))
        if sub * sub != dim:
            raise ValueError("max-entangled initial state needs a square dimension")
        return max_entangled_state(sub)
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"initial state has {psi.size} amplitudes, system dimension is {dim}")
    return psi


def _trial(circuit: ParametricCircuit, theta: np.ndarray, tol: float, layers: int, resample=None) -> TrialScan:
    result = scan(circuit, theta, tol)
    return TrialScan(layers, result, expressivity_before_last_layer(result, circuit), resample)


def run_test(
    system: ControlSystem,
    config: TestConfig,
    aux_frequencies: Sequence[float] | None = None,
) -> Verdict:
    """Decide controllability of ``system`` with a growing rotation circuit.

    For the operator test, ``aux_frequencies`` sets the free frequencies of
    the auxiliary qubits; by default the original qubit frequencies are
    reused (zero where unknown).
    """
    d, m = system.dim, system.m
    work = system.normalized() if config.normalize_generators else system
    aux = None
    if config.test_type is TestType.OC:
        if aux_frequencies is None:
            aux_frequencies = system.frequencies or (0.0,) * system.qubits
        aux = tuple(float(w) for w in aux_frequencies)
        scale = 1.0
        if config.normalize_generators:
            norm = np.linalg.norm(system.drift, 2)
            scale = 1.0 / norm if norm > 0 else 1.0
        extended = extend_bipartite(work, [scale * w for w in aux])

        def make(n):
            return build_oc_circuit(extended, n)

        target = d * d - 1
    else:
        psi0 = initial_state_vector(config, d)

        def make(n):
            return build_psc_circuit(work, n, psi0)

        target = 2 * d - 1

    n_min = min_layers(config.test_type, d, m)
    n_layers = n_min if config.n_layers_initial == "auto" else config.n_layers_initial
    layers_initial = n_layers
    extra = n_min if config.max_extra_layers is None else config.max_extra_layers
    max_layers = n_layers + extra
    per_layer = m + 1
    tol = config.tolerance
    threads = worker_threads()

    rng = np.random.default_rng(config.seed)
    theta = rng.uniform(0.0, TWO_PI, n_layers * per_layer)
    scans: list[TrialScan] = []
    history: list[TrialScan] = []
    best = 0

    while True:
        circuit = make(n_layers)
        trial = _trial(circuit, theta, tol, n_layers)
        scans.append(trial)
        best = max(best, trial.expressivity)
        log.info("%d layers: expressivity %d/%d (before last layer %d)",
                 n_layers, trial.expressivity, target, trial.before_last_layer)
        if trial.expressivity >= target:
            outcome = Outcome.CONTROLLABLE
            break
        if not trial.grew:
            # plateau: confirm with fresh draws of the whole parameter vector
            thetas = [rng.uniform(0.0, TWO_PI, circuit.n_params) for _ in range(config.resamples)]

            def run(item, circuit=circuit, n_layers=n_layers):
                r, th = item
                return _trial(circuit, th, tol, n_layers, resample=r)

            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    redo = list(pool.map(run, enumerate(thetas)))
            else:
                redo = [run(item) for item in enumerate(thetas)]
            history.extend(redo)
            best = max(best, *(t.expressivity for t in redo))
            if any(t.expressivity >= target for t in redo):
                outcome = Outcome.CONTROLLABLE
                break
            growing = [t for t in redo if t.grew]
            if not growing:
                outcome = Outcome.NOT_CONTROLLABLE
                break
            theta = np.asarray(growing[0].scan.theta)
        if n_layers >= max_layers:
            outcome = Outcome.INCONCLUSIVE
            break
        n_layers += 1
        theta = np.concatenate([theta, rng.uniform(0.0, TWO_PI, per_layer)])

    if best > target:
        log.warning("expressivity %d exceeds the maximum %d; the rank tolerance is likely too small",
                    best, target)
    return Verdict(
        outcome=outcome,
        expressivity_target=target,
        best_expressivity=best,
        layers_used=n_layers,
        scans=tuple(scans),
        resample_history=tuple(history),
        seed=config.seed,
        layers_initial=layers_initial,
        params_per_layer=per_layer,
        aux_frequencies=aux,
    )
