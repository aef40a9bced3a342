import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellanomaly.errors import DegenerateState, InvalidDims, NotHermitian
from bellanomaly.quantum import (
    PAULI_X,
    DensityOperator,
    Povm,
    PureState,
    entanglement_entropy,
    haar_unitary,
    hermitian_eig,
    kron,
    max_entangled,
    partial_trace,
    product_state,
    random_projective_povm,
    schmidt_decompose,
    schmidt_state,
    singlet,
    werner,
)
from bellanomaly.rng import SeededRng


def test_kron_flips_both_qubits():
    ket00 = np.array([1, 0, 0, 0])
    assert np.allclose(kron(PAULI_X, PAULI_X) @ ket00, [0, 0, 0, 1])


def test_partial_trace_of_schmidt_state():
    psi = schmidt_state([math.cos(math.pi / 6), math.sin(math.pi / 6)])
    assert np.allclose(partial_trace(psi, "A"), np.diag([0.75, 0.25]))
    assert np.allclose(partial_trace(psi, "B"), np.diag([0.75, 0.25]))
    with pytest.raises(ValueError):
        partial_trace(psi, "C")


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_reconstruction_seed7_dim9():
    gen = SeededRng(7).generator("hermitian")
    z = gen.standard_normal((9, 9)) + 1j * gen.standard_normal((9, 9))
    h = (z + z.conj().T) / 2
    w, v = hermitian_eig(h)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) <= 1e-10


def test_state_invariants():
    with pytest.raises(ValueError):
        PureState((2, 2), [1, 1, 0, 0])
    with pytest.raises(InvalidDims):
        PureState((2, 3), [1, 0, 0, 0])
    with pytest.raises(DegenerateState):
        PureState.normalized((2, 2), [0, 0, 0, 0])
    with pytest.raises(ValueError):
        DensityOperator((2, 2), np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(NotHermitian):
        DensityOperator((1, 2), [[0.5, 0.5], [0, 0.5]])
    with pytest.raises(ValueError):
        Povm(np.array([np.eye(2), np.eye(2)]))
    with pytest.raises(ValueError):
        werner(1.5)


def test_schmidt_middle_coefficient():
    c, _, _ = schmidt_decompose(schmidt_state([1, 0.7923, 1]))
    assert c[2] == pytest.approx(0.7923 / math.sqrt(2 + 0.7923**2), abs=1e-12)


def test_entropy_closed_form():
    psi = schmidt_state([math.cos(math.pi / 6), math.sin(math.pi / 6)])
    h = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert entanglement_entropy(psi) == pytest.approx(h, abs=1e-12)
    assert entanglement_entropy(max_entangled(3)) == pytest.approx(math.log2(3), abs=1e-12)
    assert entanglement_entropy(product_state([1, 0], [0, 1])) == pytest.approx(0, abs=1e-12)
    assert entanglement_entropy(singlet()) == pytest.approx(1, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_schmidt_round_trip(dA, dB, seed):
    gen = np.random.default_rng(seed)
    amp = gen.standard_normal(dA * dB) + 1j * gen.standard_normal(dA * dB)
    psi = PureState.normalized((dA, dB), amp)
    c, a, b = schmidt_decompose(psi)
    rebuilt = sum(c[i] * np.kron(a[:, i], b[:, i]) for i in range(len(c)))
    assert np.max(np.abs(rebuilt - psi.amplitudes)) < 1e-9
    assert np.all(np.diff(c) <= 1e-15)
    p = c**2
    p = p[p > 0]
    assert entanglement_entropy(psi) == pytest.approx(-np.sum(p * np.log2(p)), abs=1e-9)


def test_schmidt_state_round_trip():
    c = np.array([1, 0.7923, 1]) / math.sqrt(2 + 0.7923**2)
    got, _, _ = schmidt_decompose(schmidt_state([1, 0.7923, 1]))
    assert np.allclose(np.sort(got), np.sort(c), atol=1e-10)


def test_haar_moment():
    gen = SeededRng(3).generator("moment")
    from bellanomaly.quantum import haar_unitaries

    u = haar_unitaries(2, 100_000, gen)
    assert np.mean(np.abs(u[:, 0, 0]) ** 2) == pytest.approx(0.5, abs=0.01)


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(3, SeededRng(1))
    assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    assert np.array_equal(u, haar_unitary(3, SeededRng(1)))
    with pytest.raises(InvalidDims):
        haar_unitary(1, SeededRng(1))


def test_random_projective_povm():
    m = random_projective_povm(3, SeededRng(2), 2)
    assert m.n_outcomes == 2
    assert np.allclose(m.effects.sum(axis=0), np.eye(3))
    assert [round(np.trace(e).real) for e in m.effects] == [2, 1]
