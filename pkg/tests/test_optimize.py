import math

import numpy as np
import pytest

import oracles
from bellanomaly.boxes import box_from_state, canonical_functional, pr_box
from bellanomaly.errors import InvalidDims
from bellanomaly.optimize import (
    EnclosureConfig,
    EnclosureVerdict,
    SeeSawConfig,
    anomaly_scan,
    enclosure_test,
    horodecki_chsh,
    maximize_bell,
    qubit_schmidt_family,
    violation_probability,
)
from bellanomaly.quantum import (
    max_entangled,
    random_projective_povm,
    schmidt_state,
    singlet,
    werner,
)
from bellanomaly.rng import SeededRng

CHSH = canonical_functional("CHSH")
CGLMP3 = canonical_functional("CGLMP", 3)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1 / math.sqrt(2), 1.0])
def test_horodecki_werner(p):
    assert horodecki_chsh(werner(p)) == pytest.approx(2 * math.sqrt(2) * p, abs=1e-12)


@pytest.mark.parametrize("theta", [0.1, 0.4, math.pi / 4])
def test_horodecki_pure(theta):
    psi = schmidt_state([math.cos(theta), math.sin(theta)])
    assert horodecki_chsh(psi) == pytest.approx(oracles.horodecki(theta), abs=1e-12)


def test_seesaw_reaches_tsirelson():
    opt = maximize_bell(CHSH, singlet(), SeeSawConfig(restarts=5, rng=SeededRng(1)))
    assert opt.value == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert opt.converged and opt.report["monotone"]
    box = box_from_state(singlet(), opt.alice, opt.bob)
    assert float(np.sum(CHSH.coefficients * box.p)) == pytest.approx(opt.value, abs=1e-9)


def test_seesaw_cglmp3_closed_forms():
    cfg = SeeSawConfig(restarts=20, rng=SeededRng(2))
    me = maximize_bell(CGLMP3, max_entangled(3), cfg)
    assert me.value == pytest.approx(oracles.CGLMP3_MAX_ENTANGLED, abs=1e-6)
    best = maximize_bell(CGLMP3, schmidt_state([1, oracles.CGLMP3_GAMMA_STAR, 1]), cfg)
    assert best.value == pytest.approx(oracles.CGLMP3_OPTIMUM, abs=1e-6)
    assert me.report["monotone"] and best.report["monotone"]


def test_seesaw_never_exceeds_algebraic_cap():
    opt = maximize_bell(CGLMP3, max_entangled(3), SeeSawConfig(restarts=3, rng=SeededRng(3)))
    assert opt.value <= opt.report["algebraic_cap"]


def test_seesaw_config_checks():
    with pytest.raises(ValueError):
        SeeSawConfig(restarts=0)
    with pytest.raises(ValueError):
        SeeSawConfig(tol=0)
    with pytest.raises(ValueError):
        SeeSawConfig(restarts=2000, max_iters=1000)


def test_maximize_bell_thread_independent():
    a = maximize_bell(CGLMP3, max_entangled(3), SeeSawConfig(restarts=4, rng=SeededRng(9), threads=1))
    b = maximize_bell(CGLMP3, max_entangled(3), SeeSawConfig(restarts=4, rng=SeededRng(9), threads=3))
    assert a.report["restart_values"] == b.report["restart_values"]
    assert all(np.array_equal(x.effects, y.effects) for x, y in zip(a.alice, b.alice))


def test_small_chsh_scan():
    res = anomaly_scan(CHSH, qubit_schmidt_family(), 5, SeeSawConfig(restarts=3, rng=SeededRng(4)))
    assert not res.anomaly_detected
    assert res.argmax == 4
    for rec in res.records:
        assert rec.max_violation == pytest.approx(oracles.horodecki(rec.gamma), abs=1e-6)
    with pytest.raises(ValueError):
        anomaly_scan(CHSH, qubit_schmidt_family(), 2)


def test_violation_probability_properties():
    rng = SeededRng(42)
    a = violation_probability(CHSH, singlet(), 5000, rng, threads=1, chunk=1000)
    b = violation_probability(CHSH, singlet(), 5000, rng, threads=4, chunk=1000)
    assert a == b
    assert 0 < a.fraction < 0.1
    assert violation_probability(CHSH, werner(0.5), 2000, rng).violations == 0
    with pytest.raises(ValueError):
        violation_probability(CHSH, singlet(), 0, rng)


def test_enclosure_pr_box_vs_singlet():
    v = enclosure_test(pr_box(), singlet(), EnclosureConfig(rng=SeededRng(0)))
    assert v.tag == "CandidateWitness"
    assert v.witness.name == "chsh"
    assert v.gap >= 1.0
    assert v.diagnostics["heuristic"]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_enclosure_self_membership_qubit(seed):
    rng = SeededRng(seed)
    rho = schmidt_state([math.cos(0.5), math.sin(0.5)])
    alice = [random_projective_povm(2, rng.child("a", x), 2) for x in range(2)]
    bob = [random_projective_povm(2, rng.child("b", y), 2) for y in range(2)]
    v = enclosure_test(box_from_state(rho, alice, bob), rho, EnclosureConfig(rng=rng.child("enc")))
    assert v.tag == "Member" and v.distance <= 1e-6
    comps = v.model["components"]
    assert abs(sum(v.model["weights"]) - 1) < 1e-9 and len(comps) >= 1


def test_enclosure_dimension_check():
    with pytest.raises(InvalidDims):
        enclosure_test(box_from_state(max_entangled(3), *[[random_projective_povm(3, SeededRng(i), 3)] * 2
                                                           for i in range(2)]), singlet())


def test_verdict_invariants():
    with pytest.raises(ValueError):
        EnclosureVerdict("CandidateWitness", 0.1, gap=-0.1)
    with pytest.raises(ValueError):
        EnclosureVerdict("Maybe", 0.1)
