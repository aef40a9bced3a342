import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bellanomaly.boxes import (
    CHSH_SCENARIO,
    BellFunctional,
    Box,
    LocalModel,
    Scenario,
    bell_value,
    box_from_state,
    canonical_functional,
    cglmp_coefficients,
    enumerate_deterministic,
    is_local,
    kl_to_local,
    local_bound,
    pr_box,
    white_noise,
)
from bellanomaly.errors import Inconclusive, ScenarioMismatch, TooLarge, Unsupported
from bellanomaly.quantum import Povm, max_entangled, random_projective_povm, singlet, werner
from bellanomaly.rng import SeededRng


def chsh_optimal_box():
    # singlet with A0 = Z, A1 = X, B = -(Z +/- X)/sqrt2
    z = np.diag([1.0, -1.0])
    x = np.array([[0.0, 1.0], [1.0, 0.0]])

    def povm(obs):
        return Povm(np.array([(np.eye(2) + obs) / 2, (np.eye(2) - obs) / 2]))

    s = 1 / math.sqrt(2)
    return box_from_state(singlet(), [povm(z), povm(x)], [povm(-(z + x) * s), povm(-(z - x) * s)])


def random_local_box(gen, scen=CHSH_SCENARIO):
    w = gen.dirichlet(np.ones(scen.n_vertices))
    return Box(scen, LocalModel(scen, w).table())


def test_vendored_tables_match_oracles():
    assert np.array_equal(canonical_functional("CHSH").coefficients, oracles.chsh_table())
    assert np.array_equal(canonical_functional("CGLMP", 3).coefficients, oracles.cglmp3_table())
    assert np.array_equal(cglmp_coefficients(3).astype(float), oracles.cglmp3_table())


def test_local_bounds_exact():
    assert local_bound(canonical_functional("CHSH")) == Fraction(2)
    assert local_bound(canonical_functional("CGLMP", 3)) == Fraction(2)
    for d in (4, 5):
        assert local_bound(canonical_functional("CGLMP", d)) == Fraction(2)
    assert len(enumerate_deterministic(CHSH_SCENARIO)) == 16
    assert len(enumerate_deterministic(Scenario(3, 3, 2, 2))) == 81


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(1, 3))
def test_local_bound_matches_brute_force(seed, n, m):
    gen = np.random.default_rng(seed)
    scen = Scenario(n, 2, m, 2)
    xi = gen.integers(-5, 6, size=scen.shape)
    f = BellFunctional(scen, xi.astype(object))
    assert local_bound(f) == oracles.brute_local_bound(xi)


def test_local_bound_rational_coefficients():
    f = canonical_functional("CHSH").scaled(Fraction(1, 3))
    assert local_bound(f) == Fraction(2, 3)


def test_limits_and_mismatches():
    with pytest.raises(TooLarge):
        local_bound(canonical_functional("CHSH"), limit=10)
    with pytest.raises(Unsupported):
        canonical_functional("CHSH", 3)
    with pytest.raises(Unsupported):
        canonical_functional("CGLMP", 2)
    with pytest.raises(Unsupported):
        canonical_functional("I3322")
    with pytest.raises(ScenarioMismatch):
        bell_value(canonical_functional("CGLMP", 3), pr_box())
    with pytest.raises(ScenarioMismatch):
        BellFunctional(CHSH_SCENARIO, np.zeros((2, 2, 2)))


def test_box_invariants():
    p = pr_box().p.copy()
    p[0, 0, 0, 0] += 0.1
    p[1, 1, 0, 0] -= 0.1
    with pytest.raises(ValueError):  # Alice's marginal now depends on y
        Box(CHSH_SCENARIO, p)
    p = pr_box().p.copy()
    p[0, 0, 0, 0] = -0.5
    p[1, 1, 0, 0] = 1.5
    with pytest.raises(ValueError):
        Box(CHSH_SCENARIO, p)
    with pytest.raises(ValueError):
        Box(CHSH_SCENARIO, np.full(CHSH_SCENARIO.shape, 0.3))


def test_pr_box_and_noise_values():
    chsh = canonical_functional("CHSH")
    assert bell_value(chsh, pr_box()) == pytest.approx(4)
    assert bell_value(chsh, white_noise(CHSH_SCENARIO)) == pytest.approx(0)
    assert bell_value(chsh, chsh_optimal_box()) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_quantum_boxes_are_valid(seed, d):
    rng = SeededRng(seed)
    rho = werner(0.7) if d == 2 else max_entangled(3)
    alice = [random_projective_povm(d, rng.child("a", x), d) for x in range(2)]
    bob = [random_projective_povm(d, rng.child("b", y), d) for y in range(2)]
    box = box_from_state(rho, alice, bob)
    assert box.p.min() >= -1e-12
    assert np.allclose(box.p.sum(axis=(0, 1)), 1, atol=1e-12)


def test_locality_pr_box():
    res = is_local(pr_box())
    assert not res.local
    assert res.margin > 0
    assert res.value > float(res.bound)
    # the separator is a genuine functional with entries in [-1, 1]
    assert np.max(np.abs(res.functional.coefficients)) <= 1 + 1e-12


def test_locality_white_noise_weights():
    res = is_local(white_noise(CHSH_SCENARIO))
    assert res.local
    assert res.model.weights.min() >= 0
    assert np.allclose(res.model.table(), white_noise(CHSH_SCENARIO).p, atol=1e-9)


def test_locality_singlet_box():
    res = is_local(chsh_optimal_box())
    assert not res.local and res.margin > 0


def test_locality_random_local_boxes():
    gen = np.random.default_rng(4)
    for _ in range(10):
        assert is_local(random_local_box(gen)).local


def test_kl_zero_on_local_boxes():
    gen = SeededRng(5).generator("kl")
    for _ in range(10):
        res = kl_to_local(random_local_box(gen), tol=1e-10)
        assert res.distance <= 1e-9
        assert res.monotone


def test_kl_on_singlet_box():
    res = kl_to_local(chsh_optimal_box(), tol=1e-6)
    assert res.distance > 0.01
    assert res.gap <= 1e-4
    assert res.monotone
    # the divergence is a lower bound certified by the gap
    assert res.history[-1] - res.gap <= res.distance + 1e-12


def test_kl_pr_box_is_positive():
    res = kl_to_local(pr_box(), tol=1e-6)
    assert res.distance > res.gap >= 0
    assert res.monotone


def test_kl_iteration_cap_is_inconclusive():
    with pytest.raises(Inconclusive) as err:
        kl_to_local(chsh_optimal_box(), tol=1e-14, max_iter=5)
    assert err.value.result.monotone


def test_kl_rejects_bad_weights():
    with pytest.raises(ValueError):
        kl_to_local(pr_box(), input_weights=np.ones((2, 2)))
