import math

import numpy as np
import pytest

import oracles
from bellanomaly.boxes import box_from_state
from bellanomaly.errors import InvalidDims, NotHermitian, Unsupported
from bellanomaly.optimize import SeeSawConfig
from bellanomaly.quantum import DensityOperator, max_entangled, product_state, schmidt_state, singlet, werner
from bellanomaly.rng import SeededRng
from bellanomaly.semiquantum import (
    LoccStrategy,
    LosrStrategy,
    SemiquantumGame,
    honest_mdi,
    honest_payoff,
    honest_teleportation,
    mdi_witness_game,
    mub_states,
    optimize_locc_payoff,
    optimize_losr_payoff,
    random_strategy,
    sq_correlation,
    teleportation_game,
)

PHI = np.outer(max_entangled(2).amplitudes, max_entangled(2).amplitudes.conj())
WITNESS = np.eye(4) / 2 - PHI


def share(theta):
    return schmidt_state([math.cos(theta), math.sin(theta)])


def test_teleport_game_coefficients_are_rational():
    g = teleportation_game()
    assert g.n_a == 4 and g.n_b == 2 and g.d_s == g.d_t == 2
    assert sorted(set(np.round(g.coefficients.reshape(-1), 12))) == pytest.approx([-6, 0, 2 / 3, 6])


@pytest.mark.parametrize("theta", [0.1, math.pi / 8, math.pi / 6, math.pi / 4])
def test_honest_teleportation_matches_simulation(theta):
    g = teleportation_game()
    psi = share(theta)
    got = honest_payoff(g, psi, honest_teleportation(g, psi))
    assert got == pytest.approx(oracles.teleport_average_fidelity(math.cos(theta), math.sin(theta)), abs=1e-12)
    assert got == pytest.approx((2 + math.sin(2 * theta)) / 3, abs=1e-12)


def test_teleport_qutrit_mub():
    g = teleportation_game(3, "mub")
    assert len(mub_states(3)) == 12
    assert honest_payoff(g, max_entangled(3), honest_teleportation(g, max_entangled(3))) == pytest.approx(1, abs=1e-12)
    with pytest.raises(Unsupported):
        mub_states(4)
    with pytest.raises(Unsupported):
        teleportation_game(3)


def test_no_communication_or_product_is_classical():
    g = teleportation_game()
    cfg = SeeSawConfig(restarts=4, rng=SeededRng(1))
    assert optimize_losr_payoff(g, singlet(), cfg).value <= 2 / 3 + 1e-9
    prod = product_state([1, 0], [1, 0])
    assert optimize_locc_payoff(g, prod, cfg).value <= 2 / 3 + 1e-9


def test_locc_optimum_singlet_and_partial():
    g = teleportation_game()
    cfg = SeeSawConfig(restarts=4, rng=SeededRng(2))
    assert optimize_locc_payoff(g, singlet(), cfg).value == pytest.approx(1, abs=1e-9)
    opt = optimize_locc_payoff(g, share(math.pi / 8), cfg)
    assert opt.value == pytest.approx((2 + math.sin(math.pi / 4)) / 3, abs=1e-9)
    assert opt.value >= opt.report["losr_value"] - 1e-12
    assert opt.report["monotone"] and opt.converged


def test_mdi_game_werner_and_product():
    game, kappa = mdi_witness_game(WITNESS)
    assert kappa == pytest.approx(1 / 64)
    assert game.sense == "min"
    for p, expect in [(1.0, -0.5), (0.5, -0.125), (1 / 3, 0.0)]:
        rho = werner(p)
        assert honest_payoff(game, rho, honest_mdi(game, rho)) == pytest.approx(kappa * expect, abs=1e-12)
    gen = np.random.default_rng(0)
    for _ in range(50):
        a = gen.standard_normal(2) + 1j * gen.standard_normal(2)
        b = gen.standard_normal(2) + 1j * gen.standard_normal(2)
        s = product_state(a / np.linalg.norm(a), b / np.linalg.norm(b))
        assert honest_payoff(game, s, honest_mdi(game, s)) >= -1e-12
        assert honest_payoff(game, s, random_strategy(game, s, SeededRng(1), key=int(gen.integers(1 << 30)))) >= -1e-12


def test_mdi_optimizer_finds_honest_value():
    game, kappa = mdi_witness_game(WITNESS)
    opt = optimize_losr_payoff(game, werner(0.5), SeeSawConfig(restarts=4, rng=SeededRng(3)))
    assert opt.value <= kappa * -0.125 + 1e-9


def test_mdi_game_input_checks():
    with pytest.raises(NotHermitian):
        mdi_witness_game(np.array([[0, 1], [0, 0]]))
    with pytest.raises(InvalidDims):
        mdi_witness_game(np.eye(6))
    game, _ = mdi_witness_game(np.eye(6) / 6, dims=(2, 3))
    assert (game.d_s, game.d_t) == (2, 3)


def test_correlation_is_a_distribution():
    game = teleportation_game()
    rho = werner(0.8)
    for locc in (False, True):
        strat = random_strategy(game, rho, SeededRng(5), locc=locc)
        corr = sq_correlation(rho, game, strat)
        assert corr.p.min() >= -1e-12
        assert np.allclose(corr.p.sum(axis=(0, 1)), 1, atol=1e-12)


def test_losr_embeds_into_locc():
    game = teleportation_game()
    rho = werner(0.7)
    losr = random_strategy(game, rho, SeededRng(6))
    a = honest_payoff(game, rho, losr)
    b = honest_payoff(game, rho, LoccStrategy.from_losr(losr))
    assert a == pytest.approx(b, abs=1e-13)


def test_game_validation():
    states = mub_states(2)
    with pytest.raises(ValueError):
        SemiquantumGame(states, states, np.zeros((2, 2, 6, 6)), np.ones((6, 6)), "max", "bad")
    with pytest.raises(ValueError):
        SemiquantumGame(states, states, np.zeros((2, 2, 6, 6)), np.full((6, 6), 1 / 36), "sideways", "bad")
    with pytest.raises(ValueError):
        LosrStrategy([0.5, 0.6], [])


def test_optimizers_are_deterministic():
    game = teleportation_game()
    cfg = SeeSawConfig(restarts=3, rng=SeededRng(8))
    a = optimize_locc_payoff(game, share(0.3), cfg)
    b = optimize_locc_payoff(game, share(0.3), SeeSawConfig(restarts=3, rng=SeededRng(8), threads=3))
    assert a.value == b.value
    assert a.report["restart_values"] == b.report["restart_values"]


def test_reduction_to_boxes():
    # one-dimensional inputs turn a semiquantum game into an ordinary Bell scenario
    rho = werner(0.9)
    one = [np.ones((1, 1))]
    game = SemiquantumGame(one, one, np.zeros((2, 2, 1, 1)), np.ones((1, 1)), "max", "trivial")
    strat = random_strategy(game, rho, SeededRng(12))
    ea, eb = strat.branches[0]
    corr = sq_correlation(rho, game, strat)
    box = box_from_state(rho, [ea], [eb])
    assert np.max(np.abs(corr.p - box.p)) <= 1e-10


def test_mdi_identity_on_seeded_states():
    game, kappa = mdi_witness_game(WITNESS)
    gen = SeededRng(13).generator("rho")
    for _ in range(20):
        z = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
        m = z @ z.conj().T
        rho = DensityOperator((2, 2), m / np.trace(m).real)
        expect = kappa * np.trace(WITNESS @ rho.matrix).real
        assert honest_payoff(game, rho, honest_mdi(game, rho)) == pytest.approx(expect, abs=1e-9)
