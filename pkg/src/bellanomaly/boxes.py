"""Correlation boxes, Bell functionals and the local polytope.

A box is the table ``p[a, b, x, y] = P(a, b | x, y)``. Bell functionals
carry exact rational coefficients so their local bounds are exact; the
local polytope is handled through its vertices, the deterministic
strategies.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import Inconclusive, ScenarioMismatch, TooLarge, Unsupported
from .quantum import DensityOperator, Povm, as_density

VERTEX_LIMIT = 10**6
BOX_NEG_TOL = 1e-12
BOX_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    """Outcome counts (nA, nB) and setting counts (nX, nY)."""

    nA: int
    nB: int
    nX: int
    nY: int

    def __post_init__(self):
        if min(self.nA, self.nB, self.nX, self.nY) < 1:
            raise ValueError("scenario sizes must be positive")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.nA, self.nB, self.nX, self.nY)

    @property
    def n_vertices(self) -> int:
        return self.nA**self.nX * self.nB**self.nY


CHSH_SCENARIO = Scenario(2, 2, 2, 2)


def check_box_tensor(p: np.ndarray, neg_tol=BOX_NEG_TOL, sum_tol=BOX_SUM_TOL) -> list[str]:
    """Return the list of violated box invariants (empty when valid)."""
    problems = []
    if p.min() < -neg_tol:
        problems.append(f"negative entry {p.min():.3e}")
    sums = p.sum(axis=(0, 1))
    if np.max(np.abs(sums - 1.0)) > sum_tol:
        problems.append("rows not normalised")
    alice = p.sum(axis=1)  # [a, x, y]
    if np.max(np.abs(alice - alice[:, :, :1])) > sum_tol:
        problems.append("Alice marginal depends on y")
    bob = p.sum(axis=0)  # [b, x, y]
    if np.max(np.abs(bob - bob[:, :1, :])) > sum_tol:
        problems.append("Bob marginal depends on x")
    return problems


@dataclass(frozen=True)
class Box:
    scenario: Scenario
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != self.scenario.shape:
            raise ScenarioMismatch(f"table shape {p.shape} does not match {self.scenario}")
        problems = check_box_tensor(p)
        if problems:
            raise ValueError("invalid box: " + "; ".join(problems))
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class DeterministicStrategy:
    alice: tuple[int, ...]
    bob: tuple[int, ...]

    def table(self, scenario: Scenario) -> np.ndarray:
        p = np.zeros(scenario.shape)
        for x, a in enumerate(self.alice):
            for y, b in enumerate(self.bob):
                p[a, b, x, y] = 1.0
        return p


@dataclass(frozen=True)
class LocalModel:
    """Weights over the deterministic strategies of ``scenario``.

    ``weights[k]`` belongs to ``enumerate_deterministic(scenario)[k]``.
    """

    scenario: Scenario
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.scenario.n_vertices,):
            raise ValueError("one weight per deterministic strategy is required")
        if w.min() < -1e-12 or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("local model weights must form a distribution")
        object.__setattr__(self, "weights", w)

    def table(self) -> np.ndarray:
        return (self.weights @ vertex_matrix(self.scenario)).reshape(self.scenario.shape)


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError("coefficients must be finite")
        return Fraction(float(value)).limit_denominator(10**9)
    raise TypeError(f"cannot read coefficient {value!r}")


@dataclass(frozen=True)
class BellFunctional:
    """Exact rational coefficients ``xi[a, b, x, y]``.

    Floats are rationalised with denominators up to 1e9.
    """

    scenario: Scenario
    xi: np.ndarray
    name: str = ""
    _float: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        raw = np.asarray(self.xi, dtype=object)
        if raw.shape != self.scenario.shape:
            raise ScenarioMismatch(f"coefficient shape {raw.shape} does not match {self.scenario}")
        exact = np.empty(raw.shape, dtype=object)
        for idx in np.ndindex(raw.shape):
            exact[idx] = _fraction(raw[idx])
        object.__setattr__(self, "xi", exact)
        object.__setattr__(self, "_float", np.array([float(v) for v in exact.flat]).reshape(raw.shape))

    @property
    def coefficients(self) -> np.ndarray:
        """Floating-point copy of the coefficients."""
        return self._float.copy()

    @classmethod
    def from_float(cls, scenario: Scenario, xi, name: str = "") -> "BellFunctional":
        return cls(scenario, np.asarray(xi, dtype=float).astype(object), name)

    def scaled(self, factor) -> "BellFunctional":
        f = _fraction(factor)
        return BellFunctional(self.scenario, self.xi * f, self.name)


def box_from_state(rho, alice_meas: Sequence[Povm], bob_meas: Sequence[Povm]) -> Box:
    """Box with entries Tr[(A_{a|x} (x) B_{b|y}) rho]."""
    rho = as_density(rho)
    table = box_table(rho, [m.effects for m in alice_meas], [m.effects for m in bob_meas])
    scen = Scenario(table.shape[0], table.shape[1], table.shape[2], table.shape[3])
    return Box(scen, table)


def box_table(rho: DensityOperator, alice_effects, bob_effects) -> np.ndarray:
    """Unvalidated version of :func:`box_from_state` on raw effect arrays.

    ``alice_effects[x]`` has shape (nA, dA, dA); every setting of a party
    must have the same number of outcomes.
    """
    from .errors import InvalidDims

    dA, dB = rho.dims
    ea = np.asarray(alice_effects, dtype=complex)  # [x, a, i, k]
    eb = np.asarray(bob_effects, dtype=complex)  # [y, b, j, l]
    if ea.ndim != 4 or eb.ndim != 4 or ea.shape[-1] != dA or eb.shape[-1] != dB:
        raise InvalidDims("measurement dimensions do not match the state")
    t = rho.tensor()  # [iA, iB, kA, lB]
    p = np.einsum("xaki,ijkl,yblj->abxy", ea, t, eb, optimize=True)
    return np.real(p)


def enumerate_deterministic(scenario: Scenario, limit: int = VERTEX_LIMIT) -> list[tuple[DeterministicStrategy, Box]]:
    """All deterministic strategies with their vertex boxes."""
    mat = vertex_matrix(scenario, limit)
    strategies = _strategies(scenario)
    return [(s, Box(scenario, row.reshape(scenario.shape))) for s, row in zip(strategies, mat)]


def _strategies(scenario: Scenario) -> list[DeterministicStrategy]:
    alices = list(itertools.product(range(scenario.nA), repeat=scenario.nX))
    bobs = list(itertools.product(range(scenario.nB), repeat=scenario.nY))
    return [DeterministicStrategy(a, b) for a in alices for b in bobs]


@lru_cache(maxsize=32)
def _vertex_matrix(scenario: Scenario) -> np.ndarray:
    rows = [s.table(scenario).reshape(-1) for s in _strategies(scenario)]
    mat = np.array(rows)
    mat.setflags(write=False)
    return mat


def vertex_matrix(scenario: Scenario, limit: int = VERTEX_LIMIT) -> np.ndarray:
    """Vertex boxes as rows of a (n_vertices, nA*nB*nX*nY) matrix."""
    if scenario.n_vertices > limit:
        raise TooLarge(f"{scenario.n_vertices} deterministic strategies exceed the limit {limit}")
    return _vertex_matrix(scenario)


def _table(box) -> tuple[Scenario, np.ndarray]:
    if isinstance(box, Box):
        return box.scenario, box.p
    raise TypeError("expected a Box")


def bell_value(f: BellFunctional, box: Box) -> float:
    scen, p = _table(box)
    if scen != f.scenario:
        raise ScenarioMismatch(f"functional for {f.scenario} applied to a box for {scen}")
    return float(np.sum(f._float * p))


def local_bound(f: BellFunctional, limit: int = VERTEX_LIMIT) -> Fraction:
    """Exact maximum of ``f`` over deterministic strategies.

    For each of Alice's deterministic strategies Bob's best response is
    chosen setting by setting, which visits every vertex value implicitly.
    """
    scen = f.scenario
    if scen.n_vertices > limit:
        raise TooLarge(f"{scen.n_vertices} deterministic strategies exceed the limit {limit}")
    den = 1
    for v in f.xi.flat:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = np.empty(scen.shape, dtype=object)
    for idx in np.ndindex(scen.shape):
        ints[idx] = int(f.xi[idx] * den)
    best = None
    for alice in itertools.product(range(scen.nA), repeat=scen.nX):
        total = 0
        for y in range(scen.nY):
            total += max(sum(ints[alice[x], b, x, y] for x in range(scen.nX)) for b in range(scen.nB))
        if best is None or total > best:
            best = total
    return Fraction(best, den)


def pr_box() -> Box:
    p = np.zeros(CHSH_SCENARIO.shape)
    for a, b, x, y in np.ndindex(p.shape):
        if (a ^ b) == (x & y):
            p[a, b, x, y] = 0.5
    return Box(CHSH_SCENARIO, p)


def white_noise(scenario: Scenario) -> Box:
    return Box(scenario, np.full(scenario.shape, 1.0 / (scenario.nA * scenario.nB)))


# -- canonical functionals ---------------------------------------------------


def _chsh_formula() -> np.ndarray:
    xi = np.empty(CHSH_SCENARIO.shape, dtype=object)
    for a, b, x, y in np.ndindex(xi.shape):
        xi[a, b, x, y] = Fraction((-1) ** (a + b + x * y))
    return xi


def cglmp_coefficients(d: int) -> np.ndarray:
    """CGLMP coefficients for d outcomes in the ``p[a, b, x, y]`` layout.

    Built from the correlation terms P(A_x = B_y + k) with the weights
    1 - 2k/(d - 1); its local bound is 2.
    """
    if d < 2:
        raise Unsupported("CGLMP needs d >= 2")
    xi = np.full((d, d, 2, 2), Fraction(0), dtype=object)

    def add(x, y, shift, weight):
        # P(A_x = B_y + shift mod d)
        for b in range(d):
            xi[(b + shift) % d, b, x, y] += weight

    for k in range(d // 2):
        c = 1 - Fraction(2 * k, d - 1)
        add(0, 0, k, c)
        add(1, 0, -(k + 1), c)  # P(B_0 = A_1 + k + 1)
        add(1, 1, k, c)
        add(0, 1, -k, c)  # P(B_1 = A_0 + k)
        add(0, 0, -(k + 1), -c)
        add(1, 0, k, -c)  # P(B_0 = A_1 - k)
        add(1, 1, -(k + 1), -c)
        add(0, 1, k + 1, -c)  # P(B_1 = A_0 - k - 1)
    return xi


@lru_cache(maxsize=None)
def _vendored() -> dict:
    with resources.files("bellanomaly").joinpath("data/functionals.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def canonical_functional(kind: str, d: int = 2) -> BellFunctional:
    """CHSH (d = 2) or CGLMP (d >= 3); local bound 2 in both cases.

    CHSH and CGLMP-3 come from the vendored table in
    ``data/functionals.json``; larger CGLMP tables are generated.
    """
    kind = kind.upper()
    if kind == "CHSH":
        if d != 2:
            raise Unsupported("CHSH is defined for d = 2 only")
        return _from_vendored("chsh")
    if kind == "CGLMP":
        if d < 3:
            raise Unsupported("CGLMP is used here for d >= 3")
        if d == 3:
            return _from_vendored("cglmp3")
        return BellFunctional(Scenario(d, d, 2, 2), cglmp_coefficients(d), f"cglmp{d}")
    raise Unsupported(f"unknown functional kind {kind!r}")


def _from_vendored(key: str) -> BellFunctional:
    entry = _vendored()["functionals"][key]
    s = entry["scenario"]
    scen = Scenario(s["nA"], s["nB"], s["nX"], s["nY"])
    xi = np.array([Fraction(v) for v in entry["xi"]], dtype=object).reshape(scen.shape)
    return BellFunctional(scen, xi, entry["name"])


# -- locality ----------------------------------------------------------------


@dataclass
class LocalityResult:
    local: bool
    distance: float
    model: LocalModel | None = None
    functional: BellFunctional | None = None
    value: float | None = None
    bound: Fraction | None = None

    @property
    def margin(self) -> float | None:
        if self.functional is None:
            return None
        return self.value - float(self.bound)


def is_local(box: Box, tol: float = 1e-9) -> LocalityResult:
    """Decide membership in the local polytope by linear programming.

    The primal LP minimises the max-norm distance between the box and a
    mixture of deterministic boxes. If that distance exceeds ``tol`` a
    second LP finds a functional with coefficients in [-1, 1] maximising
    its value on the box minus its maximum over the vertices.
    """
    scen, p = _table(box)
    verts = vertex_matrix(scen)
    nv, m = verts.shape
    target = p.reshape(-1)
    # variables: w (nv), t
    c = np.zeros(nv + 1)
    c[-1] = 1.0
    ones = np.ones((m, 1))
    a_ub = np.vstack([np.hstack([verts.T, -ones]), np.hstack([-verts.T, -ones])])
    b_ub = np.concatenate([target, -target])
    a_eq = np.hstack([np.ones((1, nv)), np.zeros((1, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (nv + 1), method="highs")
    if res.status != 0:
        raise Inconclusive(f"locality LP failed: {res.message}")
    dist = float(res.x[-1])
    if dist <= tol:
        w = np.clip(res.x[:nv], 0.0, None)
        return LocalityResult(True, dist, model=LocalModel(scen, w / w.sum()))
    func = separating_functional(box)
    value = bell_value(func, box)
    return LocalityResult(False, dist, functional=func, value=value, bound=local_bound(func))


def separating_functional(box: Box) -> BellFunctional:
    """Functional with entries in [-1, 1] maximising value minus local bound."""
    scen, p = _table(box)
    verts = vertex_matrix(scen)
    nv, m = verts.shape
    # variables: xi (m), s ; maximise xi.p - s
    c = np.concatenate([-p.reshape(-1), [1.0]])
    a_ub = np.hstack([verts, -np.ones((nv, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(nv),
                  bounds=[(-1, 1)] * m + [(None, None)], method="highs")
    if res.status != 0:
        raise Inconclusive(f"separation LP failed: {res.message}")
    xi = np.round(res.x[:m], 9)
    return BellFunctional.from_float(scen, xi.reshape(scen.shape), "lp-separator")


# -- Kullback-Leibler distance to the local polytope ------------------------

Q_FLOOR = 1e-300
STALL_LIMIT = 200


@dataclass
class KLResult:
    distance: float
    model: LocalModel
    gap: float
    iterations: int
    history: list[float]
    clamped: bool = False

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.history, self.history[1:]))


def _kl(wcell: np.ndarray, p: np.ndarray, q: np.ndarray) -> tuple[float, bool]:
    """Weighted divergence in bits as a sum of non-negative cell terms.

    Uses p log(p/q) - p + q per cell, which sums to the divergence because
    every row of p and q is normalised, and is free of cancellation near
    p = q.
    """
    mask = p > 0
    clamped = bool(np.any(q[mask] < Q_FLOOR))
    qm = np.maximum(q[mask], Q_FLOOR)
    pm = p[mask]
    t = (qm - pm) / pm
    small = np.abs(t) < 1e-4
    terms = np.empty_like(t)
    ts = t[small]
    terms[small] = ts * ts * (0.5 - ts / 3.0 + ts * ts / 4.0)
    tl = t[~small]
    terms[~small] = tl - np.log1p(tl)
    total = float(np.sum(wcell[mask] * pm * terms)) + float(np.sum(wcell[~mask] * q[~mask]))
    return total / math.log(2.0), clamped


def kl_to_local(box: Box, input_weights=None, tol: float = 1e-6, max_iter: int = 200_000) -> KLResult:
    """Minimise D(p || q) over local boxes q by away-step Frank-Wolfe.

    The divergence is in bits and weighted by ``input_weights[x, y]``
    (uniform by default). The linear subproblem is solved exactly over the
    deterministic vertices and steps use an exact line search, so the
    objective never increases. Stops once the Frank-Wolfe duality gap,
    an upper bound on the suboptimality, is at most ``tol``.
    """
    scen, p3 = _table(box)
    if input_weights is None:
        input_weights = np.full((scen.nX, scen.nY), 1.0 / (scen.nX * scen.nY))
    w_in = np.asarray(input_weights, dtype=float)
    if w_in.shape != (scen.nX, scen.nY) or w_in.min() < 0 or abs(w_in.sum() - 1) > 1e-9:
        raise ValueError("input weights must be a distribution over (x, y)")
    verts = vertex_matrix(scen)
    nv = verts.shape[0]
    p = p3.reshape(-1)
    wcell = np.broadcast_to(w_in, scen.shape).reshape(-1)
    pw = wcell * p  # w(x,y) p(a,b|x,y)
    mask = p > 0
    ln2 = math.log(2.0)

    weights = np.full(nv, 1.0 / nv)
    q = weights @ verts
    f, clamped = _kl(wcell, p, q)
    history = [f]
    gap = math.inf
    it = 0
    stalled = 0
    for it in range(1, max_iter + 1):
        grad = np.zeros_like(q)
        grad[mask] = -pw[mask] / (np.maximum(q[mask], Q_FLOOR) * ln2)
        scores = verts @ grad
        s = int(np.argmin(scores))
        gq = float(grad @ q)
        gap = gq - float(scores[s])
        if gap <= tol:
            break
        active = np.flatnonzero(weights > 0)
        a = int(active[np.argmax(scores[active])])
        away_gap = float(scores[a]) - gq
        if gap >= away_gap or weights[a] >= 1.0:
            d = verts[s] - q
            gmax = 1.0
            fw_step = True
        else:
            d = q - verts[a]
            gmax = weights[a] / (1.0 - weights[a])
            fw_step = False
        gamma = _line_search(pw, q, d, mask, gmax)
        q_new = q + gamma * d
        f_new, cl = _kl(wcell, p, q_new)
        if not f_new <= f:
            gamma, f_new, q_new = 0.0, f, q
        if fw_step:
            weights *= 1.0 - gamma
            weights[s] += gamma
        else:
            weights *= 1.0 + gamma
            weights[a] -= gamma
            if gamma >= gmax * (1 - 1e-12):
                weights[a] = 0.0
        weights = np.clip(weights, 0.0, None)
        weights /= weights.sum()
        q = weights @ verts
        f, cl = _kl(wcell, p, q)
        clamped = clamped or cl
        stalled = stalled + 1 if f >= history[-1] else 0
        history.append(f)
        if stalled >= STALL_LIMIT:
            # the objective no longer moves in double precision
            raise Inconclusive("Frank-Wolfe stalled above the requested gap", value=f, gap=gap,
                               result=KLResult(max(f, 0.0), LocalModel(scen, weights), gap, it, history, clamped))
    else:
        raise Inconclusive("Frank-Wolfe iteration cap reached", value=f, gap=gap,
                           result=KLResult(max(f, 0.0), LocalModel(scen, weights), gap, it, history, clamped))
    return KLResult(max(f, 0.0), LocalModel(scen, weights), max(gap, 0.0), it, history, clamped)


def _line_search(pw, q, d, mask, gmax) -> float:
    """Minimiser over [0, gmax] of the convex map gamma -> D(p || q + gamma d)."""
    pm, qm, dm = pw[mask], q[mask], d[mask]

    def slope(g):
        return -float(np.sum(pm * dm / np.maximum(qm + g * dm, Q_FLOOR)))

    if slope(0.0) >= 0.0:
        return 0.0
    hi = gmax
    # cells with p > 0 must keep q > 0
    shrink = dm < 0
    if np.any(shrink):
        hi = min(hi, float(np.min(-qm[shrink] / dm[shrink])))
    if slope(hi * (1 - 1e-15)) <= 0.0 and hi >= gmax:
        return gmax
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17 + 1e-15 * hi:
            break
    return lo
