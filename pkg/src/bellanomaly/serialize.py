"""JSON and CSV interchange.

Every document carries a ``schema`` tag such as ``bellanomaly/box/1`` and
is validated against the matching file in ``schemas/`` before use.
Arrays are flattened row-major; complex data is split into ``re`` and
``im`` lists. Output is written with sorted keys so identical results
give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .boxes import BellFunctional, Box, Scenario
from .errors import AnomalyError
from .quantum import DensityOperator, Povm, PureState
from .semiquantum import LoccStrategy, LosrStrategy, SemiquantumGame

SCHEMA_NAMES = ("state", "box", "functional", "game", "strategy", "manifest")
SCHEMA_VERSION = 1


class SchemaError(AnomalyError, ValueError):
    """A document failed validation; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str, schema_path: str = ""):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.schema_path = schema_path


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(f"no schema named {name!r}")
    text = resources.files("bellanomaly").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def schema_versions() -> dict:
    return {name: load_schema(name)["$id"] for name in SCHEMA_NAMES}


def validate(doc, name: str) -> None:
    """Raise :class:`SchemaError` naming the first failing path."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, err.json_path, "/".join(str(p) for p in err.schema_path))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _flat_complex(arr) -> tuple[list, list]:
    a = np.asarray(arr, dtype=complex).reshape(-1)
    return [float(v) for v in a.real], [float(v) for v in a.imag]


def _complex(re, im) -> np.ndarray:
    if len(re) != len(im):
        raise SchemaError("re and im have different lengths", "$.im")
    return np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)


def _scenario_doc(s: Scenario) -> dict:
    return {"nA": s.nA, "nB": s.nB, "nX": s.nX, "nY": s.nY}


def _reshape(values, shape, path):
    arr = np.asarray(values)
    if arr.size != int(np.prod(shape)):
        raise SchemaError(f"expected {int(np.prod(shape))} entries, got {arr.size}", path)
    return arr.reshape(shape)


# -- states -------------------------------------------------------------------


def state_to_json(state, label: str = "") -> dict:
    if isinstance(state, PureState):
        re, im = _flat_complex(state.amplitudes)
        kind = "pure"
    elif isinstance(state, DensityOperator):
        re, im = _flat_complex(state.matrix)
        kind = "density"
    else:
        raise TypeError("expected a PureState or DensityOperator")
    doc = {"schema": "bellanomaly/state/1", "dims": list(state.dims), "kind": kind, "re": re, "im": im}
    if label:
        doc["label"] = label
    return doc


def state_from_json(doc):
    validate(doc, "state")
    dims = tuple(doc["dims"])
    values = _complex(doc["re"], doc["im"])
    d = dims[0] * dims[1]
    if doc["kind"] == "pure":
        return PureState(dims, _reshape(values, (d,), "$.re"))
    return DensityOperator(dims, _reshape(values, (d, d), "$.re"))


# -- boxes and functionals ----------------------------------------------------


def box_to_json(box: Box, label: str = "") -> dict:
    doc = {"schema": "bellanomaly/box/1", "scenario": _scenario_doc(box.scenario),
           "p": [float(v) for v in box.p.reshape(-1)]}
    if label:
        doc["label"] = label
    return doc


def box_from_json(doc) -> Box:
    validate(doc, "box")
    s = Scenario(**doc["scenario"])
    return Box(s, _reshape(doc["p"], s.shape, "$.p"))


def _rational(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def functional_to_json(f: BellFunctional, local_bound=None) -> dict:
    doc = {"schema": "bellanomaly/functional/1", "name": f.name, "scenario": _scenario_doc(f.scenario),
           "xi": [_rational(v) for v in f.xi.flat]}
    if local_bound is not None:
        doc["local_bound"] = _rational(Fraction(local_bound))
    return doc


def functional_from_json(doc) -> BellFunctional:
    validate(doc, "functional")
    s = Scenario(**doc["scenario"])
    xi = _reshape(np.array([Fraction(v) for v in doc["xi"]], dtype=object), s.shape, "$.xi")
    return BellFunctional(s, xi, doc.get("name", ""))


# -- games and strategies -----------------------------------------------------


def _matrix_doc(m) -> dict:
    m = np.asarray(m, dtype=complex)
    re, im = _flat_complex(m)
    return {"dim": int(m.shape[0]), "re": re, "im": im}


def _matrix_from(doc, path) -> np.ndarray:
    d = doc["dim"]
    return _reshape(_complex(doc["re"], doc["im"]), (d, d), path)


def game_to_json(game: SemiquantumGame) -> dict:
    return {
        "schema": "bellanomaly/game/1",
        "name": game.name,
        "sense": game.sense,
        "register_order": "S,A,B,T",
        "inputs_a": [_matrix_doc(m) for m in game.inputs_a],
        "inputs_b": [_matrix_doc(m) for m in game.inputs_b],
        "n_a": game.n_a,
        "n_b": game.n_b,
        "coefficients": [float(v) for v in game.coefficients.reshape(-1)],
        "priors": [float(v) for v in game.priors.reshape(-1)],
        "meta": game.meta,
    }


def game_from_json(doc) -> SemiquantumGame:
    validate(doc, "game")
    ta = [_matrix_from(m, f"$.inputs_a[{i}]") for i, m in enumerate(doc["inputs_a"])]
    tb = [_matrix_from(m, f"$.inputs_b[{i}]") for i, m in enumerate(doc["inputs_b"])]
    shape = (doc["n_a"], doc["n_b"], len(ta), len(tb))
    xi = _reshape(doc["coefficients"], shape, "$.coefficients")
    pri = _reshape(doc["priors"], shape[2:], "$.priors")
    return SemiquantumGame(ta, tb, xi, pri, doc["sense"], doc.get("name", "game"), meta=doc.get("meta", {}))


def _povm_doc(m: Povm) -> dict:
    effects = []
    for e in m.effects:
        re, im = _flat_complex(e)
        effects.append({"re": re, "im": im})
    return {"dim": m.dim, "effects": effects}


def _povm_from(doc, path) -> Povm:
    d = doc["dim"]
    return Povm(np.array([_reshape(_complex(e["re"], e["im"]), (d, d), f"{path}.effects[{k}]")
                          for k, e in enumerate(doc["effects"])]))


def strategy_to_json(s) -> dict:
    if isinstance(s, LosrStrategy):
        branches = [{"alice": _povm_doc(a), "bob": [_povm_doc(b)]} for a, b in s.branches]
        cls = "losr"
    elif isinstance(s, LoccStrategy):
        branches = [{"alice": _povm_doc(a), "bob": [_povm_doc(b) for b in bs]} for a, bs in s.branches]
        cls = "locc"
    else:
        raise TypeError("expected an LosrStrategy or LoccStrategy")
    return {"schema": "bellanomaly/strategy/1", "class": cls, "weights": [float(w) for w in s.weights],
            "branches": branches}


def strategy_from_json(doc):
    validate(doc, "strategy")
    branches = []
    for k, br in enumerate(doc["branches"]):
        alice = _povm_from(br["alice"], f"$.branches[{k}].alice")
        bobs = [_povm_from(b, f"$.branches[{k}].bob[{j}]") for j, b in enumerate(br["bob"])]
        branches.append((alice, bobs))
    if doc["class"] == "losr":
        for k, (_, bobs) in enumerate(branches):
            if len(bobs) != 1:
                raise SchemaError("an LOSR branch has exactly one Bob measurement", f"$.branches[{k}].bob")
        return LosrStrategy(doc["weights"], [(a, b[0]) for a, b in branches])
    return LoccStrategy(doc["weights"], branches)


# -- files --------------------------------------------------------------------


def read_json(path: str):
    """Parse a JSON file; syntax errors become :class:`SchemaError` at ``$``."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON ({exc.msg} at line {exc.lineno})", "$") from exc


def bundled(name: str):
    """A JSON fixture shipped in ``data/``."""
    return json.loads(resources.files("bellanomaly").joinpath("data", name).read_text())


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()
