"""Acceptance criteria, one test per criterion.

``conftest.py`` prints a PASS/FAIL line per criterion at the end of the run.
"""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from ctrlexpr.circuit import (
    build_oc_circuit,
    build_psc_circuit,
    computational_zero,
    evaluate,
    min_layers,
    state_derivatives,
)
from ctrlexpr.controllability import Outcome, TestConfig, run_test
from ctrlexpr.expressivity import jacobian, s_matrix, scan
from ctrlexpr.hamiltonian import extend_bipartite
from ctrlexpr.lie_oracle import density_matrix, generate_algebra, pure_state_rank
from ctrlexpr.specfile import bundled_specs, load_spec

from systems import (
    AUX_3Q,
    REFERENCE_SYSTEMS,
    oc_controllable,
    oc_noncontrollable,
    psc_controllable,
    psc_noncontrollable,
    random_circuit,
    random_system,
)

SEEDS = (0, 1, 2)
FD_STEP = 1e-5
FD_TOL = 1e-7
CHOI_TOL = 1e-9
SYM_TOL = 1e-12
PSD_TOL = -1e-10


def timed_run(system, config, aux=None):
    t0 = time.perf_counter()
    verdict = run_test(system, config, aux)
    return verdict, time.perf_counter() - t0


@pytest.mark.criterion(1, "PSC positive reproduction")
def test_criterion_01_psc_controllable():
    for seed in SEEDS:
        v, dt = timed_run(psc_controllable(), TestConfig(n_layers_initial=11, seed=seed))
        assert v.outcome is Outcome.CONTROLLABLE
        assert v.best_expressivity == 31
        assert dt < 5.0


@pytest.mark.criterion(2, "PSC negative reproduction")
def test_criterion_02_psc_noncontrollable():
    for seed in SEEDS:
        v, dt = timed_run(psc_noncontrollable(), TestConfig(n_layers_initial="auto", resamples=5, seed=seed))
        assert v.outcome is Outcome.NOT_CONTROLLABLE
        assert v.best_expressivity == 29
        assert len(v.resample_history) == 5
        assert dt < 10.0


@pytest.mark.criterion(3, "OC positive reproduction")
def test_criterion_03_oc_controllable():
    for seed in SEEDS:
        v, dt = timed_run(oc_controllable(), TestConfig(test_type="OC", n_layers_initial=16, seed=seed), AUX_3Q)
        assert v.outcome is Outcome.CONTROLLABLE
        assert v.best_expressivity == 63
        assert dt < 60.0


@pytest.mark.criterion(4, "OC negative reproduction")
def test_criterion_04_oc_noncontrollable():
    for seed in SEEDS:
        v, _ = timed_run(oc_noncontrollable(), TestConfig(test_type="OC", seed=seed), AUX_3Q)
        assert v.outcome is Outcome.NOT_CONTROLLABLE
        assert v.best_expressivity == 31
        print(f"seed {seed}: saturation at layer {v.saturation_layer}")
        assert v.saturation_layer <= 10


@pytest.mark.criterion(5, "oracle numbers")
def test_criterion_05_oracle_numbers():
    system = psc_noncontrollable()
    algebra = generate_algebra(system)
    assert algebra.dim == 120
    assert pure_state_rank(system, density_matrix(computational_zero(16)), algebra=algebra) == 28


@pytest.mark.criterion(6, "min-layer formulas")
def test_criterion_06_min_layers():
    assert min_layers("PSC", 16, 2) == 11
    assert min_layers("PSC", 16, 3) == 8
    assert min_layers("OC", 8, 3) == 16


def _random_oc_circuit(rng):
    q = int(rng.integers(1, 4))
    s = random_system(rng, q)
    layers = max(1, 40 // (s.m + 1))
    return build_oc_circuit(extend_bipartite(s, rng.uniform(4, 6, q)), int(rng.integers(1, layers + 1)))


@pytest.mark.criterion(7, "gradient property suite")
def test_criterion_07_gradients_match_finite_differences():
    rng = np.random.default_rng(2024)
    circuits = [random_circuit(rng, max_qubits=6, max_slots=40) for _ in range(40)]
    circuits += [_random_oc_circuit(rng) for _ in range(20)]
    qubits = {int(np.log2(c.dim)) for c in circuits}
    assert len(circuits) >= 50 and qubits == set(range(1, 7))
    shared = 0
    for c in circuits:
        assert c.n_params <= 40
        theta = rng.uniform(0, 2 * np.pi, c.n_params)
        _, analytic = state_derivatives(c, theta)
        for k in range(c.n_params):
            e = np.zeros(c.n_params)
            e[k] = FD_STEP
            fd = (evaluate(c, theta + e) - evaluate(c, theta - e)) / (2 * FD_STEP)
            assert np.abs(analytic[:, k] - fd).max() < FD_TOL
        shared += len(c.gates) > c.n_params
    assert shared >= 20


@pytest.mark.criterion(8, "oracle-equivalence property suite")
def test_criterion_08_verdicts_agree_with_oracle():
    agree = {("PSC", True): 0, ("PSC", False): 0, ("OC", True): 0, ("OC", False): 0}
    for seed in range(40):
        rng = np.random.default_rng(1000 + seed)
        s = random_system(rng, 2, n_drift=(2, 5), n_controls=(1, 4))
        algebra = generate_algebra(s)
        oracle = {
            "PSC": pure_state_rank(s, density_matrix(computational_zero(4)), algebra=algebra) == 6,
            "OC": algebra.dim == 15,
        }
        for test in ("PSC", "OC"):
            # default budget: n_min extra layers on top of n_min, i.e. twice the minimum
            v = run_test(s, TestConfig(test_type=test, seed=seed))
            assert v.outcome is not Outcome.INCONCLUSIVE
            assert (v.outcome is Outcome.CONTROLLABLE) == oracle[test], (seed, test)
            agree[test, oracle[test]] += 1
    assert all(n > 0 for n in agree.values()), agree


@pytest.mark.criterion(9, "invariant suite")
@pytest.mark.parametrize("name", sorted(REFERENCE_SYSTEMS))
def test_criterion_09_invariants(name):
    make, test = REFERENCE_SYSTEMS[name]
    system = make()
    rng = np.random.default_rng(7)
    if test == "PSC":
        circuit = build_psc_circuit(system, min_layers("PSC", 16, system.m) + 1, computational_zero(16))
    else:
        circuit = build_oc_circuit(extend_bipartite(system, AUX_3Q), 16)
    for _ in range(3):
        theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
        result = scan(circuit, theta)
        steps = np.diff(np.concatenate([[0], result.rank_trace]))
        assert set(steps) <= {0, 1}
        psi = evaluate(circuit, theta)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
        s = s_matrix(jacobian(circuit, theta), circuit.n_params)
        assert np.abs(s - s.T).max() < SYM_TOL
        assert np.linalg.eigvalsh(s).min() > PSD_TOL
        if test == "OC":
            d = system.dim
            m = psi.reshape(d, d)
            assert np.abs(m.conj().T @ m - np.eye(d) / d).max() < CHOI_TOL
    assert scan(circuit, np.zeros(circuit.n_params)).expressivity <= system.m + 1


@pytest.mark.criterion(10, "determinism")
def test_criterion_10_reports_are_byte_identical(tmp_path):
    for name in ("psc_noncontrollable.spec", "oc_controllable.spec"):
        texts = []
        for run in range(2):
            out = tmp_path / f"{name}.{run}.json"
            proc = subprocess.run(
                [sys.executable, "-m", "ctrlexpr", "test", str(bundled_specs()[name]), "--oracle", "--json", str(out)],
                capture_output=True, text=True,
            )
            assert proc.returncode in (0, 1), proc.stderr
            report = json.loads(out.read_text())
            assert "timings" in report
            del report["timings"]
            texts.append(json.dumps(report, indent=2, sort_keys=True))
        assert texts[0] == texts[1]
        assert json.loads(texts[0])["config"]["test"]["seed"] == load_spec(bundled_specs()[name]).test.seed
