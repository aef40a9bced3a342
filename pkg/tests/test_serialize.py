import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellanomaly import serialize as ser
from bellanomaly.boxes import CHSH_SCENARIO, Box, LocalModel, canonical_functional, pr_box
from bellanomaly.quantum import schmidt_state, werner
from bellanomaly.rng import SeededRng
from bellanomaly.semiquantum import mdi_witness_game, random_strategy, teleportation_game


def roundtrip(doc):
    return json.loads(ser.dumps(doc))


def test_schema_ids():
    ids = ser.schema_versions()
    assert ids["box"] == "bellanomaly/box/1"
    assert set(ids) == set(ser.SCHEMA_NAMES)


def test_bundled_pr_box():
    box = ser.box_from_json(ser.bundled("pr_box.json"))
    assert np.array_equal(box.p, pr_box().p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_box_roundtrip(seed):
    w = np.random.default_rng(seed).dirichlet(np.ones(16))
    box = Box(CHSH_SCENARIO, LocalModel(CHSH_SCENARIO, w).table())
    back = ser.box_from_json(roundtrip(ser.box_to_json(box)))
    assert np.max(np.abs(back.p - box.p)) <= 1e-9


def test_state_roundtrip():
    for s in (schmidt_state([1, 0.7923, 1]), werner(0.4)):
        back = ser.state_from_json(roundtrip(ser.state_to_json(s, "x")))
        a = getattr(s, "amplitudes", None)
        if a is None:
            assert np.max(np.abs(back.matrix - s.matrix)) <= 1e-9
        else:
            assert np.max(np.abs(back.amplitudes - a)) <= 1e-9


def test_functional_roundtrip_is_exact():
    f = canonical_functional("CGLMP", 4)
    doc = roundtrip(ser.functional_to_json(f, local_bound=2))
    assert doc["local_bound"] == "2"
    back = ser.functional_from_json(doc)
    assert (back.xi == f.xi).all()
    assert any("/" in v for v in doc["xi"])


def test_game_and_strategy_roundtrip():
    for game in (teleportation_game(), mdi_witness_game(np.eye(4) / 4)[0]):
        back = ser.game_from_json(roundtrip(ser.game_to_json(game)))
        assert np.max(np.abs(back.coefficients - game.coefficients)) <= 1e-9
        assert back.sense == game.sense
    game = teleportation_game()
    for locc in (False, True):
        s = random_strategy(game, werner(0.5), SeededRng(1), locc=locc)
        back = ser.strategy_from_json(roundtrip(ser.strategy_to_json(s)))
        assert type(back) is type(s)


def test_validation_error_names_the_path():
    doc = ser.box_to_json(pr_box())
    del doc["scenario"]["nY"]
    with pytest.raises(ser.SchemaError) as err:
        ser.box_from_json(doc)
    assert err.value.path == "$.scenario"
    assert "required" in err.value.schema_path
    doc = ser.box_to_json(pr_box())
    doc["p"] = doc["p"][:-1]
    with pytest.raises(ser.SchemaError) as err:
        ser.box_from_json(doc)
    assert err.value.path == "$.p"


def test_malformed_json_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    with pytest.raises(ser.SchemaError) as err:
        ser.read_json(str(f))
    assert err.value.path == "$"


def test_dumps_is_canonical():
    a = ser.dumps({"b": 1, "a": [1.5, 2]})
    assert a == ser.dumps({"a": [1.5, 2], "b": 1})
    with pytest.raises(ValueError):
        ser.dumps({"x": math.nan})


def test_csv_floats_use_repr():
    text = ser.csv_text(["g", "v"], [[0.1, 1 / 3]])
    assert text.splitlines()[1] == "0.1,0.3333333333333333"
