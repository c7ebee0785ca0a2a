"""System description files.

A spec file is a single YAML mapping::

    qubits: 4
    drift:                       # Pauli strings, qubit 0 leftmost
      - {pauli: ZIII, coeff: -2.70, unit: GHz}
      - {pauli: XXII, coeff: 170, unit: MHz}
    controls:
      - {pauli: IXII, label: x1}   # optional coeff (default 1)
    aux_frequencies: [5.37, 5.29, 5.34]   # optional, GHz, operator test only
    test:                        # every key optional
      type: PSC                  # PSC | OC
      layers: auto               # auto | positive int
      max_extra_layers: auto     # auto | non-negative int
      resamples: 5
      tolerance: 1.0e-9
      seed: 0
      normalize_generators: false
      initial_state: computational-zero   # | max-entangled | [[re, im], ...]

Coefficients in MHz are converted to GHz on load; files written by
:func:`dump_spec` always use GHz.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .circuit import TestType
from .controllability import INITIAL_STATES, TestConfig
from .hamiltonian import ControlSystem, PauliTerm

__all__ = [
    "SpecError",
    "DriftEntry",
    "ControlEntry",
    "SystemSpec",
    "parse_spec",
    "load_spec",
    "loads_spec",
    "dump_spec",
    "spec_to_dict",
    "bundled_specs",
]

UNITS = {"GHz": 1.0, "MHz": 1e-3}
_TOP_KEYS = {"qubits", "drift", "controls", "aux_frequencies", "test"}
_TEST_KEYS = {
    "type", "layers", "max_extra_layers", "resamples", "tolerance", "seed",
    "normalize_generators", "initial_state",
}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-9`` (no dot) as a float, as YAML 1.2 does."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)


class SpecError(ValueError):
    """Malformed or invalid system description."""


@dataclass(frozen=True)
class DriftEntry:
    pauli: str
    coeff: float


@dataclass(frozen=True)
class ControlEntry:
    pauli: str
    coeff: float = 1.0
    label: str | None = None


@dataclass(frozen=True)
class SystemSpec:
    qubits: int
    drift: tuple[DriftEntry, ...]
    controls: tuple[ControlEntry, ...]
    test: TestConfig = TestConfig()
    aux_frequencies: tuple[float, ...] | None = None

    def control_system(self) -> ControlSystem:
        labels = ("drift",) + tuple(c.label or c.pauli for c in self.controls)
        return ControlSystem.from_terms(
            self.qubits,
            [PauliTerm(e.pauli, e.coeff) for e in self.drift],
            [PauliTerm(c.pauli, c.coeff) for c in self.controls],
            labels=labels,
        )


def _require(cond, where, msg):
    if not cond:
        raise SpecError(f"{where}: {msg}")


def _real(value, where) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), where, f"expected a number, got {value!r}")
    _require(math.isfinite(value), where, "must be finite")
    return float(value)


def _int(value, where, minimum) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), where, f"expected an integer, got {value!r}")
    _require(value >= minimum, where, f"must be >= {minimum}")
    return value


def _pauli(value, where, qubits) -> str:
    _require(isinstance(value, str), where, f"expected a Pauli string, got {value!r}")
    _require(len(value) == qubits, where, f"expected {qubits} characters, got {len(value)} in {value!r}")
    _require(set(value) <= set("IXYZ"), where, f"characters must be from IXYZ, got {value!r}")
    return value


def _mapping(value, where, allowed):
    _require(isinstance(value, dict), where, "expected a mapping")
    unknown = set(value) - allowed
    _require(not unknown, where, f"unknown keys {sorted(map(str, unknown))}")
    return value


def _state(value, where):
    if isinstance(value, str):
        _require(value in INITIAL_STATES, where, f"expected one of {INITIAL_STATES} or a list of amplitudes")
        return value
    _require(isinstance(value, list) and value, where, "expected a name or a non-empty list of amplitudes")
    amps = []
    for i, a in enumerate(value):
        if isinstance(a, list):
            _require(len(a) == 2, f"{where}[{i}]", "complex amplitudes are written [re, im]")
            amps.append(complex(_real(a[0], f"{where}[{i}]"), _real(a[1], f"{where}[{i}]")))
        else:
            amps.append(complex(_real(a, f"{where}[{i}]")))
    norm = np.linalg.norm(amps)
    _require(abs(norm - 1) < 1e-6, where, f"state must be normalized (norm {norm:.9g})")
    return tuple(a / norm for a in amps)


def _test_config(raw, qubits) -> TestConfig:
    raw = _mapping(raw or {}, "test", _TEST_KEYS)
    kwargs = {}
    if "type" in raw:
        _require(raw["type"] in ("PSC", "OC"), "test.type", f"expected PSC or OC, got {raw['type']!r}")
        kwargs["test_type"] = TestType(raw["type"])
    if "layers" in raw:
        layers = raw["layers"]
        kwargs["n_layers_initial"] = "auto" if layers == "auto" else _int(layers, "test.layers", 1)
    if "max_extra_layers" in raw:
        extra = raw["max_extra_layers"]
        kwargs["max_extra_layers"] = None if extra == "auto" else _int(extra, "test.max_extra_layers", 0)
    if "resamples" in raw:
        kwargs["resamples"] = _int(raw["resamples"], "test.resamples", 1)
    if "tolerance" in raw:
        tol = _real(raw["tolerance"], "test.tolerance")
        _require(0 < tol < 1, "test.tolerance", "must lie in (0, 1)")
        kwargs["tolerance"] = tol
    if "seed" in raw:
        seed = _int(raw["seed"], "test.seed", 0)
        _require(seed < 2**64, "test.seed", "must fit in 64 bits")
        kwargs["seed"] = seed
    if "normalize_generators" in raw:
        _require(isinstance(raw["normalize_generators"], bool), "test.normalize_generators", "expected true or false")
        kwargs["normalize_generators"] = raw["normalize_generators"]
    if "initial_state" in raw:
        state = _state(raw["initial_state"], "test.initial_state")
        if not isinstance(state, str):
            _require(len(state) == 2**qubits, "test.initial_state", f"expected {2**qubits} amplitudes")
        kwargs["initial_state"] = state
    try:
        return TestConfig(**kwargs)
    except ValueError as exc:
        raise SpecError(f"test: {exc}") from None


def _from_document(doc) -> SystemSpec:
    doc = _mapping(doc, "document", _TOP_KEYS)
    for key in ("qubits", "drift", "controls"):
        _require(key in doc, key, "missing required field")
    qubits = _int(doc["qubits"], "qubits", 1)
    _require(qubits <= 12, "qubits", "dense simulation supports at most 12 qubits")

    _require(isinstance(doc["drift"], list), "drift", "expected a list of terms")
    drift = []
    for i, raw in enumerate(doc["drift"]):
        where = f"drift[{i}]"
        raw = _mapping(raw, where, {"pauli", "coeff", "unit"})
        _require("pauli" in raw and "coeff" in raw, where, "needs pauli and coeff")
        unit = raw.get("unit", "GHz")
        _require(unit in UNITS, f"{where}.unit", f"expected one of {sorted(UNITS)}, got {unit!r}")
        pauli = _pauli(raw["pauli"], f"{where}.pauli", qubits)
        _require(set(pauli) != {"I"}, f"{where}.pauli", "identity terms are not allowed (operators must be traceless)")
        drift.append(DriftEntry(pauli, _real(raw["coeff"], f"{where}.coeff") * UNITS[unit]))

    _require(isinstance(doc["controls"], list) and doc["controls"], "controls", "expected a non-empty list")
    controls = []
    for i, raw in enumerate(doc["controls"]):
        where = f"controls[{i}]"
        raw = _mapping(raw, where, {"pauli", "coeff", "label"})
        _require("pauli" in raw, where, "needs pauli")
        pauli = _pauli(raw["pauli"], f"{where}.pauli", qubits)
        _require(set(pauli) != {"I"}, f"{where}.pauli", "identity controls are not allowed")
        coeff = _real(raw.get("coeff", 1.0), f"{where}.coeff")
        _require(coeff != 0, f"{where}.coeff", "must be non-zero")
        label = raw.get("label")
        _require(label is None or isinstance(label, str), f"{where}.label", "expected a string")
        controls.append(ControlEntry(pauli, coeff, label))

    aux = doc.get("aux_frequencies")
    if aux is not None:
        _require(isinstance(aux, list) and len(aux) == qubits, "aux_frequencies", f"expected a list of {qubits} numbers")
        aux = tuple(_real(w, f"aux_frequencies[{j}]") for j, w in enumerate(aux))

    return SystemSpec(
        qubits=qubits,
        drift=tuple(drift),
        controls=tuple(controls),
        test=_test_config(doc.get("test"), qubits),
        aux_frequencies=aux,
    )


def loads_spec(text: str, source: str = "<string>") -> SystemSpec:
    """Parse spec-file text."""
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise SpecError(f"{where}: parse error: {exc.problem or exc.context}") from None
    except yaml.YAMLError as exc:
        raise SpecError(f"{source}: parse error: {exc}") from None
    try:
        return _from_document(doc)
    except SpecError as exc:
        raise SpecError(f"{source}: {exc}") from None


def load_spec(path) -> SystemSpec:
    path = Path(path)
    return loads_spec(path.read_text(encoding="utf-8"), source=str(path))


def parse_spec(path) -> tuple[ControlSystem, TestConfig]:
    """Read a spec file into a validated system and test configuration."""
    spec = load_spec(path)
    return spec.control_system(), spec.test


def spec_to_dict(spec: SystemSpec) -> dict:
    """Plain-data form of ``spec``; ``loads_spec(dump_spec(s)) == s``."""
    cfg = spec.test
    state = cfg.initial_state
    if state is not None and not isinstance(state, str):
        state = [[a.real, a.imag] for a in state]
    test = {
        "type": cfg.test_type.value,
        "layers": cfg.n_layers_initial,
        "max_extra_layers": "auto" if cfg.max_extra_layers is None else cfg.max_extra_layers,
        "resamples": cfg.resamples,
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "normalize_generators": cfg.normalize_generators,
    }
    if state is not None:
        test["initial_state"] = state
    doc = {
        "qubits": spec.qubits,
        "drift": [{"pauli": e.pauli, "coeff": e.coeff, "unit": "GHz"} for e in spec.drift],
        "controls": [
            {"pauli": c.pauli, "coeff": c.coeff, **({"label": c.label} if c.label is not None else {})}
            for c in spec.controls
        ],
        "test": test,
    }
    if spec.aux_frequencies is not None:
        doc["aux_frequencies"] = list(spec.aux_frequencies)
    return doc


def dump_spec(spec: SystemSpec) -> str:
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False, default_flow_style=None)


def bundled_specs() -> dict[str, Path]:
    """Spec files shipped with the package, keyed by file name."""
    root = resources.files("ctrlexpr") / "specs"
    return {p.name: Path(str(p)) for p in root.iterdir() if p.name.endswith(".spec")}
