"""Compare the compiled and numpy Gram-Schmidt backends.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each case is
timed with both backends swapped into ``ctrlexpr.kernels``; the best of N
runs is reported.
"""
import argparse
import timeit

import numpy as np

from ctrlexpr import _kernels_py, kernels
from ctrlexpr.circuit import build_oc_circuit, build_psc_circuit, computational_zero
from ctrlexpr.controllability import TestConfig, run_test
from ctrlexpr.expressivity import jacobian
from ctrlexpr.hamiltonian import ControlSystem, PauliTerm, embed, extend_bipartite
from ctrlexpr.lie_oracle import generate_algebra

try:
    from ctrlexpr import _kernels as compiled
except ImportError:
    compiled = None


def four_qubit(controls):
    w, J = (5.40, 5.30, 5.42, 5.37), (0.170, 0.220, 0.150)
    drift = [embed("Z", j, 4, -x / 2) for j, x in enumerate(w)]
    drift += [PauliTerm("I" * k + "XX" + "I" * (2 - k), c) for k, c in enumerate(J)]
    return ControlSystem.from_terms(4, drift, controls)


def three_qubit(controls):
    w, J = (5.40, 5.30, 5.42), (0.170, 0.220)
    drift = [embed("Z", j, 3, -x / 2) for j, x in enumerate(w)]
    drift += [PauliTerm("I" * k + "ZZ" + "I" * (1 - k), c) for k, c in enumerate(J)]
    return ControlSystem.from_terms(3, drift, controls)


def cases():
    rng = np.random.default_rng(0)
    psc = four_qubit([embed("X", 1, 4), embed("X", 2, 4)])
    oc = three_qubit([embed("X", 0, 3), embed("Y", 1, 3), embed("X", 2, 3)])
    oc_circ = build_oc_circuit(extend_bipartite(oc, (5.37, 5.29, 5.34)), 16)
    jac_oc = np.ascontiguousarray(jacobian(oc_circ, rng.uniform(0, 2 * np.pi, oc_circ.n_params)).T)
    psc_circ = build_psc_circuit(psc, 11, computational_zero(16))
    jac_psc = np.ascontiguousarray(jacobian(psc_circ, rng.uniform(0, 2 * np.pi, psc_circ.n_params)).T)
    wide = np.ascontiguousarray(rng.normal(size=(400, 2000)))
    return {
        "rank trace, 4-qubit PSC (33 x 32)": lambda: kernels.incremental_rank(jac_psc, 1e-9),
        "rank trace, 3-qubit OC (64 x 128)": lambda: kernels.incremental_rank(jac_oc, 1e-9),
        "rank trace, random (400 x 2000)": lambda: kernels.incremental_rank(wide, 1e-9),
        "Lie closure, 4 qubits (dim 255)": lambda: generate_algebra(psc),
        "run_test, OC controllable": lambda: run_test(oc, TestConfig(test_type="OC", n_layers_initial=16)),
    }


def use(impl):
    kernels.incremental_rank = impl.incremental_rank
    kernels.gs_insert = impl.gs_insert


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    print(f"{'case':40s}" + "".join(f"{name:>12s}" for name, _ in backends) + ("     speedup" if compiled else ""))
    for label, fn in cases().items():
        times = []
        for _, impl in backends:
            use(impl)
            fn()
            times.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)))
        row = f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if compiled:
            row += f"{times[0] / times[1]:11.2f}x"
        print(row)
    if not compiled:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
