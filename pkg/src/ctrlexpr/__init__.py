"""Controllability tests for quantum systems via dimensional expressivity."""

__version__ = "0.1.0"

from .circuit import (
    GateSpec,
    ParametricCircuit,
    TestType,
    build_oc_circuit,
    build_psc_circuit,
    min_layers,
    state_derivatives,
)
from .controllability import Outcome, TestConfig, Verdict, run_test
from .expressivity import ExpressivityScan, jacobian, numeric_rank, s_matrix, scan
from .hamiltonian import ControlSystem, PauliTerm, extend_bipartite
from .lie_oracle import (
    generate_algebra,
    operator_controllable,
    pure_state_controllable,
    pure_state_rank,
)
from .specfile import SpecError, SystemSpec, dump_spec, load_spec, parse_spec

__all__ = [
    "__version__",
    "ControlSystem",
    "PauliTerm",
    "extend_bipartite",
    "GateSpec",
    "ParametricCircuit",
    "TestType",
    "build_psc_circuit",
    "build_oc_circuit",
    "min_layers",
    "state_derivatives",
    "ExpressivityScan",
    "jacobian",
    "s_matrix",
    "numeric_rank",
    "scan",
    "Outcome",
    "TestConfig",
    "Verdict",
    "run_test",
    "generate_algebra",
    "operator_controllable",
    "pure_state_rank",
    "pure_state_controllable",
    "SpecError",
    "SystemSpec",
    "load_spec",
    "parse_spec",
    "dump_spec",
]
