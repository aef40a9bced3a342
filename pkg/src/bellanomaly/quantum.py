"""Dense complex linear algebra for bipartite states and measurements.

Operators are plain ``numpy`` complex arrays. :class:`PureState`,
:class:`DensityOperator` and :class:`Povm` wrap them with their dimensions
and check their defining invariants on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DegenerateState, InvalidDims, NotHermitian
from .rng import SeededRng

HERMITIAN_TOL = 1e-12
STRUCT_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor indexes the coarse blocks."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and float(np.max(np.abs(h - h.conj().T), initial=0.0)) <= tol


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of ``h``.

    Raises :class:`NotHermitian` if ``h`` is not Hermitian within 1e-12.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise NotHermitian("hermitian_eig needs a Hermitian matrix")
    return kernels.jacobi_eigh(0.5 * (h + h.conj().T))


def _check_dims(dims) -> tuple[int, int]:
    if len(dims) != 2 or any(int(d) < 1 for d in dims):
        raise InvalidDims(f"bad bipartite dims {dims!r}")
    return int(dims[0]), int(dims[1])


@dataclass(frozen=True)
class PureState:
    dims: tuple[int, int]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != dims[0] * dims[1]:
            raise InvalidDims(f"{amp.size} amplitudes for dims {dims}")
        if abs(float(np.vdot(amp, amp).real) - 1.0) > 1e-12:
            raise ValueError("pure state is not normalised")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, dims, amplitudes) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = math.sqrt(float(np.vdot(amp, amp).real))
        if norm == 0.0:
            raise DegenerateState("zero vector")
        return cls(dims, amp / norm)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a dA x dB coefficient matrix."""
        return self.amplitudes.reshape(self.dims)

    def density(self) -> "DensityOperator":
        return DensityOperator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    dims: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = np.asarray(self.matrix, dtype=complex)
        d = dims[0] * dims[1]
        if m.shape != (d, d):
            raise InvalidDims(f"matrix of shape {m.shape} for dims {dims}")
        if not is_hermitian(m):
            raise NotHermitian("density operator is not Hermitian")
        if abs(np.trace(m).real - 1.0) > STRUCT_TOL:
            raise ValueError("density operator trace differs from 1")
        if hermitian_eig(m)[0][0] < -STRUCT_TOL:
            raise ValueError("density operator is not positive semidefinite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def tensor(self) -> np.ndarray:
        """The matrix as a rank-4 tensor indexed [iA, iB, jA, jB]."""
        dA, dB = self.dims
        return self.matrix.reshape(dA, dB, dA, dB)


def as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected a PureState or DensityOperator, got {type(state).__name__}")


@dataclass(frozen=True)
class Povm:
    effects: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.effects, dtype=complex)
        if e.ndim != 3 or e.shape[0] < 1 or e.shape[1] != e.shape[2]:
            raise InvalidDims(f"effects must have shape (n, d, d), got {e.shape}")
        d = e.shape[1]
        for k in range(e.shape[0]):
            if not is_hermitian(e[k]):
                raise NotHermitian(f"effect {k} is not Hermitian")
            if hermitian_eig(e[k])[0][0] < -STRUCT_TOL:
                raise ValueError(f"effect {k} is not positive semidefinite")
        if np.max(np.abs(e.sum(axis=0) - np.eye(d))) > STRUCT_TOL:
            raise ValueError("effects do not sum to the identity")
        object.__setattr__(self, "effects", e)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.effects.shape[0]

    @classmethod
    def from_basis(cls, u, assign=None, n_outcomes=None) -> "Povm":
        """Projective measurement from the columns of a unitary.

        Column ``i`` contributes to outcome ``assign[i]``; by default each
        column is its own outcome.
        """
        u = np.asarray(u, dtype=complex)
        d = u.shape[0]
        assign = np.arange(d) if assign is None else np.asarray(assign)
        n = int(n_outcomes if n_outcomes is not None else assign.max() + 1)
        effects = np.zeros((n, d, d), dtype=complex)
        for i, a in enumerate(assign):
            effects[a] += np.outer(u[:, i], u[:, i].conj())
        return cls(effects)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced operator of party ``keep`` ("A" or "B")."""
    if isinstance(rho, PureState):
        rho = rho.density()
    if isinstance(rho, DensityOperator):
        dims, m = rho.dims, rho.matrix
    else:
        raise TypeError("partial_trace expects a DensityOperator or PureState")
    dA, dB = dims
    if m.shape != (dA * dB, dA * dB):
        raise InvalidDims("matrix size does not match dims")
    t = m.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def schmidt_decompose(psi: PureState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt coefficients (non-increasing) with the two local bases.

    Returns ``(c, a, b)`` where ``psi = sum_i c[i] a[:, i] (x) b[:, i]`` and
    ``len(c) == min(dA, dB)``. The coefficients are norms of projected
    vectors, so they stay accurate near zero.
    """
    m = psi.matrix()
    swapped = m.shape[0] > m.shape[1]
    if swapped:
        m = m.T
    # m is dSmall x dLarge; eigenbasis of m m^H on the small side
    _, small = hermitian_eig(m @ m.conj().T)
    partner = m.T @ small.conj()
    coeffs = np.linalg.norm(partner, axis=0)
    order = np.argsort(-coeffs, kind="stable")
    coeffs, small, partner = coeffs[order], small[:, order], partner[:, order]
    large = np.zeros_like(partner)
    for i, c in enumerate(coeffs):
        if c > 1e-300:
            large[:, i] = partner[:, i] / c
    large = _complete_orthonormal(large, coeffs > 1e-300)
    if swapped:
        return coeffs, large, small
    return coeffs, small, large


def _complete_orthonormal(cols: np.ndarray, keep: np.ndarray) -> np.ndarray:
    out = cols.copy()
    fixed = [out[:, i] for i in range(out.shape[1]) if keep[i]]
    d = out.shape[0]
    for i in range(out.shape[1]):
        if keep[i]:
            continue
        for e in np.eye(d, dtype=complex):
            v = e - sum(np.vdot(f, e) * f for f in fixed)
            n = np.linalg.norm(v)
            if n > 1e-8:
                v = v / n
                out[:, i] = v
                fixed.append(v)
                break
    return out


def entanglement_entropy(psi: PureState) -> float:
    """Entropy of entanglement in bits, with 0 log 0 = 0."""
    c2 = schmidt_decompose(psi)[0] ** 2
    c2 = c2[c2 > 0]
    return float(max(0.0, -np.sum(c2 * np.log2(c2))))


def schmidt_state(coefficients: Sequence[float], dims=None) -> PureState:
    """sum_i c_i |ii> (normalised), in dims (n, n) unless given."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0 or np.any(c < 0):
        raise ValueError("coefficients must be a non-empty non-negative sequence")
    if not np.any(c > 0):
        raise DegenerateState("all Schmidt coefficients are zero")
    dims = _check_dims(dims if dims is not None else (c.size, c.size))
    if c.size > min(dims):
        raise InvalidDims("more coefficients than the smaller local dimension")
    amp = np.zeros(dims, dtype=complex)
    for i, ci in enumerate(c):
        amp[i, i] = ci
    return PureState.normalized(dims, amp)


def max_entangled(n: int) -> PureState:
    return schmidt_state(np.ones(n))


def product_state(a, b) -> PureState:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return PureState.normalized((a.size, b.size), np.kron(a, b))


def singlet() -> PureState:
    return PureState.normalized((2, 2), [0, 1, -1, 0])


def phi_plus(n: int = 2) -> PureState:
    return max_entangled(n)


def werner(p: float, n: int = 2) -> DensityOperator:
    """p |phi+><phi+| + (1 - p) I / n^2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("Werner weight must lie in [0, 1]")
    phi = max_entangled(n).amplitudes
    d = n * n
    return DensityOperator((n, n), p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(d) / d)


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator("haar")
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be a SeededRng or numpy Generator")


def haar_unitaries(d: int, count: int, gen: np.random.Generator) -> np.ndarray:
    """``count`` Haar-distributed d x d unitaries, shape (count, d, d)."""
    if d < 1:
        raise InvalidDims("unitary dimension must be positive")
    z = (gen.standard_normal((count, d, d)) + 1j * gen.standard_normal((count, d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary(d: int, rng) -> np.ndarray:
    """One Haar-random unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    if d < 2:
        raise InvalidDims("haar_unitary needs d >= 2")
    return haar_unitaries(d, 1, _generator(rng))[0]


def random_projective_povm(d: int, rng, outcomes: int | None = None) -> Povm:
    """Rank-1 projective measurement onto the columns of a Haar unitary.

    With fewer outcomes than ``d``, columns are dealt round-robin.
    """
    u = haar_unitary(d, rng)
    n = d if outcomes is None else int(outcomes)
    return Povm.from_basis(u, np.arange(d) % n, n)
