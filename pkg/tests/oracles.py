"""Independent reference computations used to check the package.

Nothing here imports the package's algorithms; each oracle recomputes a
quantity from first principles (brute force, closed forms or direct
state-vector simulation).
"""

import itertools
import math
from fractions import Fraction

import numpy as np


def brute_local_bound(xi) -> Fraction:
    """max over every deterministic strategy, by plain enumeration."""
    nA, nB, nX, nY = xi.shape
    best = None
    for fa in itertools.product(range(nA), repeat=nX):
        for fb in itertools.product(range(nB), repeat=nY):
            v = sum(Fraction(xi[fa[x], fb[y], x, y]) for x in range(nX) for y in range(nY))
            best = v if best is None or v > best else best
    return best


def cglmp3_table():
    """I_3 written from its probability form, outcomes mod 3."""
    xi = np.zeros((3, 3, 2, 2), dtype=int)
    for a in range(3):
        for b in range(3):
            # + P(A0 = B0) + P(B0 = A1 + 1) + P(A1 = B1) + P(B1 = A0)
            xi[a, b, 0, 0] += a == b
            xi[a, b, 1, 0] += b == (a + 1) % 3
            xi[a, b, 1, 1] += a == b
            xi[a, b, 0, 1] += b == a
            # - P(A0 = B0 - 1) - P(B0 = A1) - P(A1 = B1 - 1) - P(B1 = A0 - 1)
            xi[a, b, 0, 0] -= a == (b - 1) % 3
            xi[a, b, 1, 0] -= b == a
            xi[a, b, 1, 1] -= a == (b - 1) % 3
            xi[a, b, 0, 1] -= b == (a - 1) % 3
    return xi


def chsh_table():
    xi = np.zeros((2, 2, 2, 2), dtype=int)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        sign = 1 if a == b else -1
        xi[a, b, x, y] = -sign if (x, y) == (1, 1) else sign
    return xi


def horodecki(theta: float) -> float:
    """Max CHSH of cos|00> + sin|11>: 2 sqrt(1 + sin^2 2theta)."""
    return 2 * math.sqrt(1 + math.sin(2 * theta) ** 2)


CGLMP3_MAX_ENTANGLED = (12 + 8 * math.sqrt(3)) / 9
CGLMP3_OPTIMUM = 1 + math.sqrt(11 / 3)
CGLMP3_GAMMA_STAR = (math.sqrt(11) - math.sqrt(3)) / 2


def pauli_states():
    s = 1 / math.sqrt(2)
    return [np.array(v, dtype=complex) for v in
            ([1, 0], [0, 1], [s, s], [s, -s], [s, 1j * s], [s, -1j * s])]


def teleport_average_fidelity(c0: float, c1: float) -> float:
    """State-vector simulation of standard teleportation through the share
    c0|00> + c1|11>: Bell measurement, Pauli correction for phi+, fidelity
    averaged over the six Pauli eigenstates (a 2-design)."""
    share = np.array([c0, 0, 0, c1], dtype=complex)
    share /= np.linalg.norm(share)
    s = 1 / math.sqrt(2)
    bell = [np.array([s, 0, 0, s]), np.array([s, 0, 0, -s]), np.array([0, s, s, 0]), np.array([0, s, -s, 0])]
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1, -1]).astype(complex)
    fixes = [np.eye(2), z, x, z @ x]
    total = 0.0
    for psi in pauli_states():
        full = np.kron(psi, share).reshape(4, 2)  # rows (input, A), column B
        fid = 0.0
        for b, fix in zip(bell, fixes):
            out = fix @ (b.conj() @ full)
            fid += abs(np.vdot(psi, out)) ** 2
        total += fid
    return total / 6


def product_overlap_bound(gen, probes: int) -> float:
    """Largest |<phi+|a b>|^2 over random product vectors (never above 1/2)."""
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    best = 0.0
    for _ in range(probes):
        a = gen.standard_normal(2) + 1j * gen.standard_normal(2)
        b = gen.standard_normal(2) + 1j * gen.standard_normal(2)
        v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        best = max(best, abs(np.vdot(phi, v)) ** 2)
    return best
