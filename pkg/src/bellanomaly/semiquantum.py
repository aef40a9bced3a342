"""Semiquantum games: quantum inputs, classical outputs.

The referee hands Alice a state tau_s and Bob a state omega_t; each party
measures its input together with its half of the shared state and
reports a classical outcome. Registers are always ordered
``S (x) A (x) B (x) T``: Alice's input, Alice's half, Bob's half, Bob's
input. Alice's effects act on ``S (x) A`` and Bob's on ``B (x) T``.

Two strategy classes are modelled. LOSR strategies are mixtures of
product measurements. One-round LOCC strategies let Alice's outcome act
as a message that selects Bob's measurement.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidDims, NotHermitian, ScenarioMismatch, Unsupported
from .optimize import MONOTONE_SLACK, SeeSawConfig, _block_update, _effects, _initial_assign, _map
from .quantum import (
    DensityOperator,
    Povm,
    STRUCT_TOL,
    as_density,
    haar_unitaries,
    hermitian_eig,
    is_hermitian,
    max_entangled,
)
from .rng import SeededRng

SENSES = ("max", "min")


def _check_input_state(m, where: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidDims(f"{where}: input state must be a square matrix")
    if not is_hermitian(m):
        raise NotHermitian(f"{where}: input state is not Hermitian")
    if abs(np.trace(m).real - 1.0) > STRUCT_TOL:
        raise ValueError(f"{where}: input state trace differs from 1")
    if hermitian_eig(m)[0][0] < -STRUCT_TOL:
        raise ValueError(f"{where}: input state is not positive semidefinite")
    return m


@dataclass(frozen=True)
class SemiquantumGame:
    """Inputs, payoff coefficients ``xi[a, b, s, t]`` and input priors.

    ``sense`` says whether a strategy aims to make the payoff large
    ("max") or small ("min"); witness games use "min".
    """

    inputs_a: np.ndarray
    inputs_b: np.ndarray
    coefficients: np.ndarray
    priors: np.ndarray
    sense: str = "max"
    name: str = "game"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ta = np.array([_check_input_state(m, f"inputs_a[{i}]") for i, m in enumerate(self.inputs_a)])
        tb = np.array([_check_input_state(m, f"inputs_b[{i}]") for i, m in enumerate(self.inputs_b)])
        if len(ta) == 0 or len(tb) == 0:
            raise InvalidDims("a game needs at least one input on each side")
        xi = np.asarray(self.coefficients, dtype=float)
        if xi.ndim != 4 or xi.shape[2:] != (len(ta), len(tb)) or min(xi.shape[:2]) < 1:
            raise InvalidDims(f"coefficients of shape {xi.shape} do not match {len(ta)} x {len(tb)} inputs")
        pri = np.asarray(self.priors, dtype=float)
        if pri.shape != (len(ta), len(tb)):
            raise InvalidDims("priors must have shape (len(inputs_a), len(inputs_b))")
        if np.any(pri < 0) or abs(pri.sum() - 1.0) > 1e-12:
            raise ValueError("priors must form a probability distribution")
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}")
        object.__setattr__(self, "inputs_a", ta)
        object.__setattr__(self, "inputs_b", tb)
        object.__setattr__(self, "coefficients", xi)
        object.__setattr__(self, "priors", pri)

    @property
    def n_a(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_b(self) -> int:
        return self.coefficients.shape[1]

    @property
    def d_s(self) -> int:
        return self.inputs_a.shape[1]

    @property
    def d_t(self) -> int:
        return self.inputs_b.shape[1]


def _check_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("branch weights must form a probability distribution")
    return w


@dataclass(frozen=True)
class LosrStrategy:
    """Mixture of product measurements: ``branches[k] = (alice, bob)``."""

    weights: np.ndarray
    branches: tuple

    def __post_init__(self):
        w = _check_weights(self.weights)
        if len(self.branches) != w.size:
            raise ValueError("one branch per weight")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "branches", tuple((a, b) for a, b in self.branches))


@dataclass(frozen=True)
class LoccStrategy:
    """Mixture of one-way protocols: ``branches[k] = (alice, [bob per message])``.

    Alice's outcome is the message; Bob measures with ``bob[message]``.
    """

    weights: np.ndarray
    branches: tuple

    def __post_init__(self):
        w = _check_weights(self.weights)
        if len(self.branches) != w.size:
            raise ValueError("one branch per weight")
        for alice, bobs in self.branches:
            if len(bobs) != alice.n_outcomes:
                raise ValueError("LOCC branch needs one Bob measurement per message")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "branches", tuple((a, tuple(b)) for a, b in self.branches))

    @classmethod
    def from_losr(cls, s: LosrStrategy) -> "LoccStrategy":
        """Embed an LOSR strategy as a message-ignoring LOCC one."""
        return cls(s.weights, tuple((a, (b,) * a.n_outcomes) for a, b in s.branches))


@dataclass(frozen=True)
class SqCorrelation:
    p: np.ndarray  # P(a, b | s, t)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 4:
            raise InvalidDims("a semiquantum correlation is indexed [a, b, s, t]")
        if np.min(p) < -1e-9:
            raise ValueError("negative probability")
        if np.max(np.abs(p.sum(axis=(0, 1)) - 1.0)) > 1e-9:
            raise ValueError("probabilities do not sum to one for some (s, t)")
        object.__setattr__(self, "p", p)


def _input_tensor(game: SemiquantumGame, rho: DensityOperator) -> np.ndarray:
    """Omega[s, t] = tau_s (x) rho (x) omega_t as [s, t, X', Y', X, Y] with
    X = S (x) A and Y = B (x) T."""
    dS, dT = game.d_s, game.d_t
    dA, dB = rho.dims
    om = np.einsum("spr,ijkl,tqu->stpijqrklu", game.inputs_a, rho.tensor(), game.inputs_b)
    return om.reshape(len(game.inputs_a), len(game.inputs_b), dS * dA, dB * dT, dS * dA, dB * dT)


def _check_strategy_dims(game, rho, alice: Povm, bobs: Sequence[Povm]):
    dA, dB = rho.dims
    if alice.dim != game.d_s * dA or alice.n_outcomes != game.n_a:
        raise InvalidDims(f"Alice needs {game.n_a} effects on dimension {game.d_s * dA}")
    for b in bobs:
        if b.dim != dB * game.d_t or b.n_outcomes != game.n_b:
            raise InvalidDims(f"Bob needs {game.n_b} effects on dimension {dB * game.d_t}")


def sq_correlation(state, game: SemiquantumGame, strategy) -> SqCorrelation:
    """P(a, b | s, t) for ``strategy`` playing ``game`` on ``state``."""
    rho = as_density(state)
    om = _input_tensor(game, rho)
    p = np.zeros(game.coefficients.shape)
    if isinstance(strategy, LosrStrategy):
        for w, (alice, bob) in zip(strategy.weights, strategy.branches):
            _check_strategy_dims(game, rho, alice, [bob])
            p += w * np.einsum("awx,byz,stxzwy->abst", alice.effects, bob.effects, om, optimize=True).real
    elif isinstance(strategy, LoccStrategy):
        for w, (alice, bobs) in zip(strategy.weights, strategy.branches):
            _check_strategy_dims(game, rho, alice, bobs)
            eb = np.array([b.effects for b in bobs])
            p += w * np.einsum("awx,abyz,stxzwy->abst", alice.effects, eb, om, optimize=True).real
    else:
        raise TypeError("strategy must be an LosrStrategy or LoccStrategy")
    return SqCorrelation(np.clip(p, 0.0, None))


def sq_payoff(game: SemiquantumGame, corr: SqCorrelation) -> float:
    """sum prior(s, t) xi(a, b, s, t) P(a, b | s, t)."""
    if corr.p.shape != game.coefficients.shape:
        raise ScenarioMismatch(f"correlation shape {corr.p.shape} vs game {game.coefficients.shape}")
    return float(np.einsum("st,abst,abst->", game.priors, game.coefficients, corr.p))


# -- optimisation -------------------------------------------------------------


def _payoff_operator(game: SemiquantumGame, rho: DensityOperator) -> np.ndarray:
    """G[a, b] = sum_st prior xi tau_s (x) rho (x) omega_t, as [a, b, X', Y', X, Y]."""
    c = np.einsum("st,abst->abst", game.priors, game.coefficients)
    if game.sense == "min":
        c = -c
    return np.einsum("abst,stxzwy->abxzwy", c, _input_tensor(game, rho), optimize=True)


@dataclass
class SqOptimum:
    value: float
    strategy: object
    report: dict

    def __iter__(self):
        return iter((self.value, self.strategy))

    @property
    def converged(self) -> bool:
        return self.report["converged"]


def _update(k: np.ndarray, u: np.ndarray, assign: np.ndarray, sweeps: int, fixed: bool):
    """Best response of one measurement to the operators ``k``.

    With ``fixed`` and two outcomes the rank of outcome 0 is held: it gets
    the top eigenvectors of K_0 - K_1. This is exact within that rank
    class and stops the see-saw from collapsing to the all-zero strategy,
    which is a fixed point of the unconstrained update.
    """
    if fixed and k.shape[0] == 2:
        rank = int(np.count_nonzero(assign == 0))
        _, v = hermitian_eig(k[0] - k[1])
        new = np.ones(len(assign), dtype=np.int64)
        new[len(assign) - rank:] = 0
        return v, new
    return _block_update(k, u, assign, sweeps)


def _sq_run(g: np.ndarray, start, locc: bool, cfg: SeeSawConfig):
    """One see-saw restart. ``start`` = (alice (U, assign), bob list of (U, assign)).

    A fixed-rank phase runs first, then an unconstrained polish; both
    are monotone, so the trace never decreases.
    """
    nA, nB = g.shape[:2]
    (ua, asg_a), bob = start
    bob = list(bob)

    def bob_effects():
        eb = np.array([_effects(u, a, nB) for u, a in bob])
        return eb if locc else eb[0]

    def value(ea, eb):
        if locc:
            return float(np.einsum("awx,abyz,abxzwy->", ea, eb, g).real)
        return float(np.einsum("awx,byz,abxzwy->", ea, eb, g).real)

    ea = _effects(ua, asg_a, nA)
    current = value(ea, bob_effects())
    trace, monotone, converged, it = [current], True, False, 0
    fixed = True
    for it in range(1, cfg.max_iters + 1):
        before = current
        eb = bob_effects()
        k = np.einsum("abyz,abxzwy->axw" if locc else "byz,abxzwy->axw", eb, g)
        ua, asg_a = _update(k, ua, asg_a, cfg.ascent_sweeps, fixed)
        ea = _effects(ua, asg_a, nA)
        new = value(ea, eb)
        monotone &= new >= current - MONOTONE_SLACK * max(1.0, abs(current))
        current = new
        trace.append(current)
        if locc:
            for m in range(nA):
                km = np.einsum("wx,bxzwy->bzy", ea[m], g[m])
                bob[m] = _update(km, *bob[m], cfg.ascent_sweeps, fixed)
        else:
            kb = np.einsum("awx,abxzwy->bzy", ea, g)
            bob[0] = _update(kb, *bob[0], cfg.ascent_sweeps, fixed)
        new = value(ea, bob_effects())
        monotone &= new >= current - MONOTONE_SLACK * max(1.0, abs(current))
        current = new
        trace.append(current)
        if abs(current - before) <= cfg.tol:
            if not fixed:
                converged = True
                break
            fixed = False
    return current, ((ua, asg_a), bob), it, converged, monotone


def _random_start(dx: int, dy: int, nA: int, nB: int, n_bob: int, gen: np.random.Generator):
    """Haar bases; for two outcomes the outcome-0 rank is drawn at random."""

    def assign(d, n):
        if n == 2 and d > 2:
            r = int(gen.integers(1, d))
            return np.array([1] * (d - r) + [0] * r)
        return _initial_assign(d, n)

    ua = haar_unitaries(dx, 1, gen)[0]
    ub = haar_unitaries(dy, n_bob, gen)
    return (ua, assign(dx, nA)), [(u, assign(dy, nB)) for u in ub]


def _optimize(game: SemiquantumGame, state, cfg: SeeSawConfig, locc: bool, label: str, warm=None) -> SqOptimum:
    rho = as_density(state)
    dA, dB = rho.dims
    dx, dy = game.d_s * dA, dB * game.d_t
    nA, nB = game.n_a, game.n_b
    if nA > dx or nB > dy:
        raise InvalidDims("more outcomes than the measured dimension allows for projective strategies")
    g = _payoff_operator(game, rho)
    n_bob = nA if locc else 1

    def one(r):
        start = warm if (warm is not None and r == 0) else _random_start(dx, dy, nA, nB, n_bob, cfg.rng.generator(label, r))
        return _sq_run(g, start, locc, cfg)

    total = cfg.restarts + (1 if warm is not None else 0)
    runs = _map(one, range(total), cfg.threads)
    best_i = max(range(total), key=lambda i: (runs[i][0], -i))
    val, ((ua, asg_a), bob), iters, conv, _ = runs[best_i]
    alice = Povm(_effects(ua, asg_a, nA))
    bobs = [Povm(_effects(u, a, nB)) for u, a in bob]
    strategy = LoccStrategy([1.0], [(alice, bobs)]) if locc else LosrStrategy([1.0], [(alice, bobs[0])])
    sign = -1.0 if game.sense == "min" else 1.0
    report = {
        "restart_values": [sign * r[0] for r in runs],
        "best_restart": best_i,
        "iterations": iters,
        "converged": conv,
        "all_converged": all(r[3] for r in runs),
        "monotone": all(r[4] for r in runs),
        "sense": game.sense,
        "warm_start": warm is not None,
        "rng": cfg.rng.to_dict(),
        "_raw": ((ua, asg_a), bob),
    }
    return SqOptimum(sign * val + 0.0, strategy, report)


def optimize_losr_payoff(game: SemiquantumGame, state, cfg: SeeSawConfig | None = None) -> SqOptimum:
    """Best payoff (in the game's sense) over LOSR strategies.

    A payoff linear in the strategy is optimised by a single branch of a
    shared-randomness mixture, so one product measurement is searched
    (projective, see-saw between the parties, seeded restarts).
    """
    cfg = cfg or SeeSawConfig()
    opt = _optimize(game, state, cfg, locc=False, label="losr")
    opt.report.pop("_raw")
    return opt


def optimize_locc_payoff(game: SemiquantumGame, state, cfg: SeeSawConfig | None = None) -> SqOptimum:
    """Best payoff over one-round (Alice to Bob) LOCC strategies.

    Restart 0 starts from the LOSR optimum embedded as a message-ignoring
    protocol and the see-saw never loses value, so the result is never
    worse than :func:`optimize_losr_payoff` under the same configuration.
    """
    cfg = cfg or SeeSawConfig()
    losr = _optimize(game, state, cfg, locc=False, label="losr")
    (ua, asg_a), bob = losr.report.pop("_raw")
    warm = ((ua, asg_a), [bob[0]] * game.n_a)
    opt = _optimize(game, state, cfg, locc=True, label="locc", warm=warm)
    opt.report.pop("_raw")
    opt.report["losr_value"] = losr.value
    return opt


def random_strategy(game: SemiquantumGame, state, rng: SeededRng, locc: bool = False, key=0):
    """Haar-random projective strategy (a probe, not a canonical measure)."""
    rho = as_density(state)
    dA, dB = rho.dims
    gen = rng.generator("probe", key)
    (ua, asg), bob = _random_start(game.d_s * dA, dB * game.d_t, game.n_a, game.n_b, game.n_a if locc else 1, gen)
    alice = Povm(_effects(ua, asg, game.n_a))
    bobs = [Povm(_effects(u, a, game.n_b)) for u, a in bob]
    if locc:
        return LoccStrategy([1.0], [(alice, bobs)])
    return LosrStrategy([1.0], [(alice, bobs[0])])


# -- concrete games -----------------------------------------------------------


def pauli_eigenstates() -> list[np.ndarray]:
    """z+, z-, x+, x-, y+, y- as density matrices."""
    s = 1 / math.sqrt(2)
    vecs = [[1, 0], [0, 1], [s, s], [s, -s], [s, 1j * s], [s, -1j * s]]
    return [np.outer(v, np.conj(v)) for v in np.array(vecs, dtype=complex)]


def mub_states(d: int) -> list[np.ndarray]:
    """All d(d + 1) states of a complete set of mutually unbiased bases
    (prime d); they form a state 2-design."""
    if d == 2:
        return pauli_eigenstates()
    if d < 2 or any(d % k == 0 for k in range(2, int(math.isqrt(d)) + 1)):
        raise Unsupported("mutually unbiased bases are built for prime dimensions only")
    w = cmath.exp(2j * math.pi / d)
    vecs = [np.eye(d, dtype=complex)[j] for j in range(d)]
    for k in range(d):
        for j in range(d):
            vecs.append(np.array([w ** ((k * n * n + j * n) % d) for n in range(d)]) / math.sqrt(d))
    return [np.outer(v, v.conj()) for v in vecs]


def _decompose(target: np.ndarray, left: Sequence[np.ndarray], right: Sequence[np.ndarray]) -> np.ndarray:
    """Real beta[s, t] with sum beta left_s (x) right_t = target (least norm)."""
    cols = np.array([np.kron(l, r).reshape(-1) for l in left for r in right]).T
    a = np.vstack([cols.real, cols.imag])
    b = np.concatenate([target.reshape(-1).real, target.reshape(-1).imag])
    beta, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.max(np.abs(a @ beta - b)) > 1e-10:
        raise Unsupported("the input states do not span the operator; no decomposition exists")
    beta[np.abs(beta) < 1e-13] = 0.0
    return beta.reshape(len(left), len(right))


def _snap_rational(xi: np.ndarray, prior, states, target_b0) -> np.ndarray:
    """Replace solver noise by nearby small-denominator rationals when the
    snapped coefficients still reproduce the target operator."""
    snapped = np.vectorize(lambda v: float(Fraction(v).limit_denominator(1000)))(xi)
    op = sum(prior[s, t] * snapped[0, 0, s, t] * np.kron(states[s], states[t])
             for s in range(len(states)) for t in range(len(states)))
    return snapped if np.max(np.abs(op - target_b0)) <= 1e-14 else xi


def teleportation_game(d: int = 2, input_design="pauli-eigenstates") -> SemiquantumGame:
    """Game whose payoff is the average fidelity of teleporting Alice's input.

    Alice and Bob receive states from a 2-design. With D = |phi+><phi+| - I/d
    on Alice's and Bob's input registers, the coefficients make

        payoff = (2 + d Tr[M D]) / (d + 1),

    where M is the effective operator on ``S (x) T`` of Bob's outcome 0.
    Teleporting S to Bob and projecting onto phi+ with T gives M = phi+
    and payoff 1. Every separable M (anything reachable without
    entanglement, or without communication) has Tr[M D] <= 0, so payoff
    <= 2/(d + 1). For a pure share with Schmidt coefficients c the honest
    protocol scores the average teleportation fidelity
    (1 + (sum c)^2) / (d + 1).
    Alice's outcome (d^2 of them) is the message; Bob has 2 outcomes.
    """
    if isinstance(input_design, str):
        if input_design == "pauli-eigenstates":
            if d != 2:
                raise Unsupported("the Pauli-eigenstate design is for qubits; use 'mub' for other primes")
            states = pauli_eigenstates()
        elif input_design == "mub":
            states = mub_states(d)
        else:
            raise Unsupported(f"unknown input design {input_design!r}")
    else:
        states = [np.asarray(m, dtype=complex) for m in input_design]
        if any(m.shape != (d, d) for m in states):
            raise InvalidDims("explicit design states must be d x d")
    n = len(states)
    prior = np.full((n, n), 1.0 / (n * n))
    phi = max_entangled(d).amplitudes
    dmat = np.outer(phi, phi.conj()) - np.eye(d * d) / d
    c0, c1 = 2.0 / (d + 1), d / (d + 1.0)
    beta = _decompose(c1 * dmat, states, states)
    xi = np.zeros((d * d, 2, n, n))
    xi[:, 0] = c0 + beta / prior
    xi[:, 1] = c0
    xi = _snap_rational(xi, prior, states, c0 * np.eye(d * d) / (d * d) + c1 * dmat)
    return SemiquantumGame(np.array(states), np.array(states), xi, prior, "max", f"teleport-d{d}",
                           meta={"d": d, "design": input_design if isinstance(input_design, str) else "explicit"})


def _bell_basis(d: int) -> np.ndarray:
    """Columns are the d^2 generalised Bell states (phi+ first)."""
    w = cmath.exp(2j * math.pi / d)
    cols = []
    for m in range(d):
        for k in range(d):
            v = np.zeros(d * d, dtype=complex)
            for j in range(d):
                v[j * d + (j + k) % d] = w ** (m * j) / math.sqrt(d)
            cols.append(v)
    return np.array(cols).T


def honest_teleportation(game: SemiquantumGame, state) -> LoccStrategy:
    """Bell measurement on S (x) A, then Bob undoes the induced map and
    projects B (x) T onto phi+ (outcome 0).

    Bob's correction for message m is the unitary polar factor of the
    map S -> B that Alice's outcome induces, so the protocol adapts to
    any share, not only phi+.
    """
    d = game.d_s
    psi = state.amplitudes if hasattr(state, "amplitudes") else None
    rho = as_density(state)
    if rho.dims != (d, d) or game.d_t != d:
        raise InvalidDims("teleportation needs a d x d share matching the input dimension")
    bell = _bell_basis(d)
    alice = Povm(np.array([np.outer(bell[:, m], bell[:, m].conj()) for m in range(d * d)]))
    if psi is None:
        w, v = hermitian_eig(rho.matrix)
        psi = v[:, -1]  # corrections from the dominant eigenvector
    phi = max_entangled(d).amplitudes
    proj = np.outer(phi, phi.conj())
    bobs = []
    for m in range(d * d):
        beta = bell[:, m].reshape(d, d)  # [s, a]
        kraus = np.einsum("sa,ab->bs", beta.conj(), psi.reshape(d, d))  # S -> B
        u, _, vh = np.linalg.svd(kraus)
        corr = (u @ vh).conj().T  # corr @ kraus is positive
        c = np.kron(corr, np.eye(d))
        e0 = c.conj().T @ proj @ c
        bobs.append(Povm(np.array([e0, np.eye(d * d) - e0])))
    return LoccStrategy([1.0], [(alice, bobs)])


def mdi_witness_game(witness, dims=None, inputs=None) -> tuple[SemiquantumGame, float]:
    """Measurement-device-independent game for an entanglement witness W.

    Inputs are d^2 linearly independent pure states on each side (by
    default |k>, (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2), and
    W = sum beta_st tau_s^T (x) omega_t^T. Coefficients reward the outcome
    pair (0, 0), read as both Bell measurements finding phi+, so the
    honest strategy scores exactly kappa Tr[W rho]. The game has sense
    "min": a negative payoff certifies entanglement, since every
    separable rho has Tr[W rho] >= 0 for a witness.
    Returns ``(game, kappa)``.
    """
    w = np.asarray(witness, dtype=complex)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidDims("witness must be a square matrix")
    if not is_hermitian(w):
        raise NotHermitian("witness must be Hermitian")
    if dims is None:
        d = math.isqrt(w.shape[0])
        if d * d != w.shape[0]:
            raise InvalidDims("give dims for a non-square bipartition")
        dims = (d, d)
    dA, dB = int(dims[0]), int(dims[1])
    if dA * dB != w.shape[0]:
        raise InvalidDims("dims do not match the witness size")
    if inputs is None:
        ins_a, ins_b = _independent_states(dA), _independent_states(dB)
    else:
        ins_a, ins_b = [np.asarray(m, dtype=complex) for m in inputs[0]], [np.asarray(m, dtype=complex) for m in inputs[1]]
    beta = _decompose(w, [m.T for m in ins_a], [m.T for m in ins_b])
    ns, nt = beta.shape
    prior = np.full((ns, nt), 1.0 / (ns * nt))
    scale = float(np.max(np.abs(beta))) or 1.0
    kappa = 1.0 / (ns * nt * dA * dB * scale)
    xi = np.zeros((2, 2, ns, nt))
    xi[0, 0] = kappa * ns * nt * dA * dB * beta
    game = SemiquantumGame(np.array(ins_a), np.array(ins_b), xi, prior, "min", "mdi-witness",
                           meta={"dims": [dA, dB], "kappa": kappa})
    return game, kappa


def _independent_states(d: int) -> list[np.ndarray]:
    vecs = [np.eye(d, dtype=complex)[k] for k in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            e = np.eye(d, dtype=complex)
            vecs.append((e[j] + e[k]) / math.sqrt(2))
            vecs.append((e[j] + 1j * e[k]) / math.sqrt(2))
    return [np.outer(v, v.conj()) for v in vecs]


def honest_mdi(game: SemiquantumGame, state) -> LosrStrategy:
    """Both parties measure {phi+, rest} on input (x) share-half."""
    rho = as_density(state)
    dA, dB = rho.dims
    if (game.d_s, game.d_t) != (dA, dB):
        raise InvalidDims("share dimensions do not match the game inputs")

    def bsm(d):
        phi = max_entangled(d).amplitudes
        e0 = np.outer(phi, phi.conj())
        return Povm(np.array([e0, np.eye(d * d) - e0]))

    # Alice's register is S (x) A; Bob's is B (x) T, so his phi+ is on (B, T)
    return LosrStrategy([1.0], [(bsm(dA), bsm(dB))])


def honest_payoff(game: SemiquantumGame, state, strategy) -> float:
    return sq_payoff(game, sq_correlation(state, game, strategy))
