import numpy as np
import pytest

from ctrlexpr.hamiltonian import ControlSystem, PauliTerm, embed
from ctrlexpr.lie_oracle import (
    density_matrix,
    generate_algebra,
    operator_controllable,
    pure_state_controllable,
    pure_state_rank,
)

from systems import (
    oc_controllable,
    oc_noncontrollable,
    psc_controllable,
    psc_noncontrollable,
    random_system,
)


def comm(a, b):
    return a @ b - b @ a


def naive_closure_dim(gens, tol=1e-8):
    # SVD-based span check after repeated full commutator rounds
    d = gens[0].shape[0]
    elems = [1j * g for g in gens]

    def rank(ms):
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in ms])
        return np.linalg.matrix_rank(flat, tol)

    r = rank(elems)
    while True:
        new = elems + [comm(a, b) for i, a in enumerate(elems) for b in elems[i + 1:]]
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in new])
        u, s, vt = np.linalg.svd(flat, full_matrices=False)
        keep = s > tol * s[0]
        basis = vt[keep]
        elems = [(v[: d * d] + 1j * v[d * d:]).reshape(d, d) for v in basis]
        if len(elems) == r:
            return r
        r = len(elems)


def test_single_qubit_su2():
    s = ControlSystem.from_terms(1, [PauliTerm("Z")], [PauliTerm("X")])
    alg = generate_algebra(s)
    assert alg.dim == 3 and alg.d == 2
    assert operator_controllable(s)


def test_commuting_generators_stay_abelian():
    s = ControlSystem.from_terms(2, [PauliTerm("ZI"), PauliTerm("IZ")], [PauliTerm("ZZ")])
    # the drift is one generator, so the span is {ZI + IZ, ZZ}
    assert generate_algebra(s).dim == 2


def test_basis_orthonormal_and_skew_hermitian():
    alg = generate_algebra(oc_noncontrollable())
    d = alg.d
    gram = np.einsum("aij,bij->ab", alg.elements.conj(), alg.elements).real / d
    assert np.abs(gram - np.eye(alg.dim)).max() < 1e-10
    for e in alg.elements:
        assert np.abs(e + e.conj().T).max() < 1e-10


def test_algebra_closed_under_commutation():
    alg = generate_algebra(oc_noncontrollable())
    d = alg.d
    basis = np.array([np.concatenate([e.real.ravel(), e.imag.ravel()]) for e in alg.elements])
    rng = np.random.default_rng(0)
    for _ in range(10):
        a, b = alg.elements[rng.integers(alg.dim, size=2)]
        c = comm(a, b)
        v = np.concatenate([c.real.ravel(), c.imag.ravel()])
        # basis rows are orthonormal under <.,.>/d
        coef = basis @ v / d
        res = v - basis.T @ coef
        assert np.linalg.norm(res) < 1e-8 * max(1, np.linalg.norm(v))


@pytest.mark.parametrize(
    "make,dim",
    [(psc_noncontrollable, 120), (psc_controllable, 255), (oc_controllable, 63), (oc_noncontrollable, 31)],
)
def test_reference_algebra_dimensions(make, dim):
    assert generate_algebra(make()).dim == dim


@pytest.mark.parametrize("seed", range(8))
def test_matches_naive_closure(seed):
    rng = np.random.default_rng(seed)
    s = random_system(rng, 2)
    assert generate_algebra(s).dim == naive_closure_dim(list(s.generators))


def test_pure_state_ranks():
    rho0 = density_matrix(np.eye(16)[0])
    assert pure_state_rank(psc_noncontrollable(), rho0) == 28
    assert pure_state_rank(psc_controllable(), rho0) == 30
    assert not pure_state_controllable(psc_noncontrollable(), rho0)
    assert pure_state_controllable(psc_controllable(), rho0)


def test_pure_state_rank_single_qubit():
    # su(2) moves |0> over the whole Bloch sphere
    s = ControlSystem.from_terms(1, [PauliTerm("Z")], [PauliTerm("X")])
    assert pure_state_rank(s, density_matrix([1, 0])) == 2
    # Z alone only rotates the phase of |0>
    s = ControlSystem.from_terms(1, [PauliTerm("Z")], [PauliTerm("Z", 2.0)])
    assert pure_state_rank(s, density_matrix([1, 0])) == 0


def test_pure_state_rank_validates_rho():
    s = psc_controllable()
    with pytest.raises(ValueError):
        pure_state_rank(s, np.eye(16) / 16)
    with pytest.raises(ValueError):
        pure_state_rank(s, np.eye(4))


def test_pure_state_rank_reuses_algebra():
    s = oc_noncontrollable()
    alg = generate_algebra(s)
    rho0 = density_matrix(np.eye(8)[0])
    assert pure_state_rank(s, rho0, algebra=alg) == pure_state_rank(s, rho0)


def test_operator_controllable_flags():
    assert operator_controllable(oc_controllable())
    assert not operator_controllable(oc_noncontrollable())
    x = embed("X", 0, 2)
    assert not operator_controllable(ControlSystem.from_terms(2, [PauliTerm("ZI")], [x]))
