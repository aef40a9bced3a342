"""Command-line front end.

Each run writes its results into ``--out`` (a directory) together with
``manifest.json``, which records the tool version, the command line, the
seed, wall time and a SHA-256 digest of every output file. Exit codes:
0 success, 1 computed but inconclusive or not converged, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .boxes import (
    CHSH_SCENARIO,
    Box,
    box_from_state,
    canonical_functional,
    enumerate_deterministic,
    is_local,
    kl_to_local,
    local_bound,
    white_noise,
)
from .errors import AnomalyError, Inconclusive
from .optimize import (
    FAMILIES,
    EnclosureConfig,
    SeeSawConfig,
    anomaly_scan,
    default_threads,
    enclosure_test,
    maximize_bell,
    violation_probability,
)
from .quantum import max_entangled, product_state, schmidt_state, singlet, werner
from .rng import ALGORITHM, SeededRng, fresh_seed
from .semiquantum import (
    honest_mdi,
    honest_payoff,
    honest_teleportation,
    mdi_witness_game,
    optimize_locc_payoff,
    optimize_losr_payoff,
    sq_correlation,
    sq_payoff,
    teleportation_game,
)
from .serialize import (
    SchemaError,
    box_from_json,
    box_to_json,
    bundled,
    csv_text,
    dumps,
    functional_from_json,
    functional_to_json,
    game_from_json,
    game_to_json,
    read_json,
    schema_versions,
    state_from_json,
    strategy_from_json,
    strategy_to_json,
)

COMMANDS = ("scan-anomaly", "maximize-bell", "test-local", "kl-distance", "violation-prob", "enclosure-test",
            "sq-payoff", "teleport-game", "mdi-game")

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2


class UsageError(AnomalyError, ValueError):
    pass


# -- argument resolution ------------------------------------------------------


def resolve_state(spec: str):
    """Named state or a state JSON file.

    Names: singlet, phi-plus, product, max-entangled:<d>, werner:<p>,
    qubit:<theta> (cos|00> + sin|11>), qutrit:<gamma> ((|00> + g|11> + |22>)
    normalised), schmidt:<c1,c2,...>.
    """
    if spec.endswith(".json"):
        return state_from_json(read_json(spec))
    name, _, arg = spec.partition(":")
    try:
        if name == "singlet":
            return singlet()
        if name == "phi-plus":
            return max_entangled(2)
        if name == "product":
            return product_state([1, 0], [1, 0])
        if name == "max-entangled":
            return max_entangled(int(arg or 2))
        if name == "werner":
            return werner(float(arg))
        if name == "qubit":
            th = float(arg)
            return schmidt_state([math.cos(th), math.sin(th)])
        if name == "qutrit":
            return schmidt_state([1.0, float(arg), 1.0])
        if name == "schmidt":
            return schmidt_state([float(v) for v in arg.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad state argument {spec!r}: {exc}") from exc
    raise UsageError(f"unknown state {spec!r}")


def resolve_functional(spec: str):
    if spec.endswith(".json"):
        return functional_from_json(read_json(spec))
    low = spec.lower()
    if low == "chsh":
        return canonical_functional("CHSH", 2)
    if low.startswith("cglmp") and low[5:].isdigit():
        return canonical_functional("CGLMP", int(low[5:]))
    raise UsageError(f"unknown functional {spec!r} (use chsh, cglmp<d> or a JSON file)")


def resolve_box(spec: str) -> Box:
    if spec.endswith(".json"):
        return box_from_json(read_json(spec))
    if spec == "pr-box":
        return box_from_json(bundled("pr_box.json"))
    if spec == "white-noise":
        return white_noise(CHSH_SCENARIO)
    raise UsageError(f"unknown box {spec!r} (use pr-box, white-noise or a JSON file)")


def _povm_lists(opt) -> dict:
    def enc(m):
        return [[[[float(z.real), float(z.imag)] for z in row] for row in e] for e in m.effects]

    return {"alice": [enc(m) for m in opt.alice], "bob": [enc(m) for m in opt.bob]}


def _bool(v: bool) -> str:
    return "true" if v else "false"


# -- commands -----------------------------------------------------------------
# each returns (status, {filename: text})


def _seesaw(args, rng: SeededRng) -> SeeSawConfig:
    return SeeSawConfig(restarts=args.restarts, max_iters=args.max_iters, rng=rng, threads=args.threads)


def cmd_scan_anomaly(args, rng):
    f = resolve_functional(args.functional)
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")
    kw = {k: v for k, v in (("lo", args.lo), ("hi", args.hi)) if v is not None}
    family = FAMILIES[args.family](**kw)
    res = anomaly_scan(f, family, args.grid, _seesaw(args, rng))
    rows = [[r.gamma, r.entropy_bits, r.max_violation, _bool(r.converged)] for r in res.records]
    summary = {
        "anomaly_detected": res.anomaly_detected,
        "argmax_gamma": res.best.gamma,
        "argmax_value": res.best.max_violation,
        "argmax_entropy_bits": res.best.entropy_bits,
        "degraded": res.degraded,
        "family": res.family,
        "functional": res.functional,
        "grid_points": args.grid,
        "rng": res.rng,
    }
    print(f"anomaly_detected={_bool(res.anomaly_detected)}")
    status = "not-converged" if res.degraded else "ok"
    return status, {"scan.csv": csv_text(["gamma", "entropy_bits", "max_violation", "converged"], rows),
                    "summary.json": dumps(summary)}


def cmd_maximize_bell(args, rng):
    f = resolve_functional(args.functional)
    state = resolve_state(args.state)
    opt = maximize_bell(f, state, _seesaw(args, rng))
    report = {k: v for k, v in opt.report.items() if k != "backend"}
    doc = {"functional": f.name, "state": args.state, "value": opt.value, "local_bound": str(local_bound(f)),
           "report": report, "measurements": _povm_lists(opt)}
    print(f"value={opt.value!r}")
    box = box_from_state(state, opt.alice, opt.bob)
    return ("ok" if opt.converged else "not-converged"), {
        "result.json": dumps(doc), "box.json": dumps(box_to_json(box, f"optimal box of {f.name} on {args.state}"))}


def cmd_test_local(args, rng):
    box = resolve_box(args.box)
    res = is_local(box)
    doc = {"local": res.local, "distance": res.distance}
    if res.local:
        verts = enumerate_deterministic(box.scenario)
        doc["model"] = [{"weight": float(w), "alice": list(verts[k][0].alice), "bob": list(verts[k][0].bob)}
                        for k, w in enumerate(res.model.weights) if w > 1e-12]
    else:
        doc["certificate"] = {"functional": functional_to_json(res.functional, res.bound), "value": res.value,
                              "local_bound": str(res.bound), "margin": res.margin}
    print(f"local={_bool(res.local)}")
    return "ok", {"verdict.json": dumps(doc)}


def cmd_kl_distance(args, rng):
    box = resolve_box(args.box)
    try:
        res = kl_to_local(box, tol=args.tol)
        status = "ok"
    except Inconclusive as exc:
        res, status = exc.result, "inconclusive"
        if res is None:
            raise
    doc = {"distance_bits": res.distance, "gap": res.gap, "iterations": res.iterations,
           "monotone": res.monotone, "certified": status == "ok", "floor_clamped": res.clamped}
    print(f"kl_bits={res.distance!r}")
    return status, {"kl.json": dumps(doc)}


def cmd_violation_prob(args, rng):
    f = resolve_functional(args.functional)
    state = resolve_state(args.state)
    est = violation_probability(f, state, args.samples, rng, threads=args.threads)
    doc = {"functional": f.name, "state": args.state, "fraction": est.fraction, "stderr": est.stderr,
           "violations": est.violations, "samples": est.samples, "rng": est.rng}
    print(f"fraction={est.fraction!r}")
    return "ok", {"violation.json": dumps(doc)}


def cmd_enclosure_test(args, rng):
    target = resolve_box(args.target)
    state = resolve_state(args.state)
    cfg = EnclosureConfig(rng=rng, tol=args.tol, mixture_size=args.mixture_size,
                          seesaw=SeeSawConfig(restarts=args.restarts, rng=rng.child("witness"), threads=args.threads))
    v = enclosure_test(target, state, cfg)
    doc = {"tag": v.tag, "distance": v.distance, "diagnostics": v.diagnostics}
    if v.model is not None:
        doc["model"] = v.model
    if v.witness is not None:
        doc["witness"] = functional_to_json(v.witness)
        doc["gap"] = v.gap
        doc["heuristic"] = True
    print(f"tag={v.tag}")
    return ("inconclusive" if v.tag == "Inconclusive" else "ok"), {"verdict.json": dumps(doc)}


def cmd_sq_payoff(args, rng):
    game = game_from_json(read_json(args.game))
    state = resolve_state(args.state)
    files = {}
    if args.strategy:
        strat = strategy_from_json(read_json(args.strategy))
        corr = sq_correlation(state, game, strat)
        value, status, extra = sq_payoff(game, corr), "ok", {}
    elif args.optimize:
        fn = optimize_locc_payoff if args.optimize == "locc" else optimize_losr_payoff
        opt = fn(game, state, _seesaw(args, rng))
        value, strat = opt.value, opt.strategy
        status = "ok" if opt.converged else "not-converged"
        extra = {"report": opt.report, "class": args.optimize}
        files["strategy.json"] = dumps(strategy_to_json(strat))
    else:
        raise UsageError("sq-payoff needs --strategy FILE or --optimize {losr,locc}")
    files["payoff.json"] = dumps({"game": game.name, "sense": game.sense, "payoff": value, **extra})
    print(f"payoff={value!r}")
    return status, files


def cmd_teleport_game(args, rng):
    state = resolve_state(args.state)
    game = teleportation_game(args.d, args.design)
    honest = honest_teleportation(game, state)
    doc = {"game": game.name, "state": args.state, "payoff": honest_payoff(game, state, honest),
           "strategy": "honest"}
    status = "ok"
    if args.optimize:
        opt = optimize_locc_payoff(game, state, _seesaw(args, rng))
        doc.update(locc_optimum=opt.value, losr_optimum=opt.report["losr_value"], report=opt.report)
        status = "ok" if opt.converged else "not-converged"
    print(f"payoff={doc['payoff']!r}")
    return status, {"teleport.json": dumps(doc), "game.json": dumps(game_to_json(game)),
                    "strategy.json": dumps(strategy_to_json(honest))}


def cmd_mdi_game(args, rng):
    state = resolve_state(args.state)
    dA, dB = state.dims
    if dA != dB:
        raise UsageError("the default witness needs equal local dimensions")
    phi = max_entangled(dA).amplitudes
    w = np.eye(dA * dB) / dA - np.outer(phi, phi.conj())
    game, kappa = mdi_witness_game(w, (dA, dB))
    honest = honest_mdi(game, state)
    value = honest_payoff(game, state, honest)
    rho = state.density().matrix if hasattr(state, "density") else state.matrix
    doc = {"game": game.name, "state": args.state, "kappa": kappa, "payoff": value,
           "witness_value": float(np.trace(w @ rho).real), "witness": "I/d - |phi+><phi+|",
           "entanglement_certified": value < 0}
    status = "ok"
    if args.optimize:
        opt = optimize_losr_payoff(game, state, _seesaw(args, rng))
        doc.update(losr_optimum=opt.value, report=opt.report)
        status = "ok" if opt.converged else "not-converged"
    print(f"payoff={value!r}")
    return status, {"mdi.json": dumps(doc), "game.json": dumps(game_to_json(game))}


HANDLERS = {
    "scan-anomaly": cmd_scan_anomaly,
    "maximize-bell": cmd_maximize_bell,
    "test-local": cmd_test_local,
    "kl-distance": cmd_kl_distance,
    "violation-prob": cmd_violation_prob,
    "enclosure-test": cmd_enclosure_test,
    "sq-payoff": cmd_sq_payoff,
    "teleport-game": cmd_teleport_game,
    "mdi-game": cmd_mdi_game,
}


# -- parser -------------------------------------------------------------------


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, help="64-bit seed; generated and recorded when omitted")
    common.add_argument("--out", default="bellanomaly-out", help="output directory (default: %(default)s)")
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: $BELLANOMALY_THREADS or 1); results do not depend on it")

    optim = argparse.ArgumentParser(add_help=False)
    optim.add_argument("--restarts", type=_positive, default=20)
    optim.add_argument("--max-iters", type=_positive, default=1000)

    p = argparse.ArgumentParser(prog="bellanomaly", description="Nonlocality-anomaly numerics.")
    p.add_argument("--version", action="version",
                   version=f"bellanomaly {__version__} (schemas: "
                           + ", ".join(schema_versions().values()) + f"; rng {ALGORITHM})")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    s = sub.add_parser("scan-anomaly", parents=[common, optim], help="maximise a functional along a state family")
    s.add_argument("--functional", required=True)
    s.add_argument("--family", required=True, choices=sorted(FAMILIES))
    s.add_argument("--grid", type=_positive, default=21)
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)

    s = sub.add_parser("maximize-bell", parents=[common, optim], help="optimise measurements for a state")
    s.add_argument("--functional", required=True)
    s.add_argument("--state", required=True)

    s = sub.add_parser("test-local", parents=[common], help="local-polytope membership by LP")
    s.add_argument("--box", required=True)

    s = sub.add_parser("kl-distance", parents=[common], help="KL divergence (bits) to the local set")
    s.add_argument("--box", required=True)
    s.add_argument("--tol", type=float, default=1e-6)

    s = sub.add_parser("violation-prob", parents=[common], help="violation fraction under Haar-random settings")
    s.add_argument("--functional", required=True)
    s.add_argument("--state", required=True)
    s.add_argument("--samples", type=_positive, default=100_000)

    s = sub.add_parser("enclosure-test", parents=[common], help="is a box inside the set a state generates?")
    s.add_argument("--target", required=True)
    s.add_argument("--state", required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--mixture-size", type=_positive)
    s.add_argument("--restarts", type=_positive, default=10)

    s = sub.add_parser("sq-payoff", parents=[common, optim], help="evaluate or optimise a semiquantum game payoff")
    s.add_argument("--game", required=True)
    s.add_argument("--state", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--strategy")
    g.add_argument("--optimize", choices=["losr", "locc"])

    s = sub.add_parser("teleport-game", parents=[common, optim], help="teleportation game payoff")
    s.add_argument("--state", required=True)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--design", default="pauli-eigenstates", choices=["pauli-eigenstates", "mub"])
    s.add_argument("--optimize", action="store_true", help="also optimise over LOSR and LOCC strategies")

    s = sub.add_parser("mdi-game", parents=[common, optim], help="MDI entanglement-witness game payoff")
    s.add_argument("--state", required=True)
    s.add_argument("--optimize", action="store_true", help="also minimise over LOSR strategies")
    return p


def parse(argv):
    return build_parser().parse_args(argv)


def _write(out: Path, name: str, text: str) -> str:
    data = text.encode("utf-8")
    (out / name).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    args.threads = args.threads or default_threads()
    seed_generated = args.seed is None
    seed = fresh_seed() if seed_generated else args.seed
    rng = SeededRng(seed)
    out = Path(args.out)
    start = time.perf_counter()
    outputs, status, code = {}, "ok", EXIT_OK
    try:
        out.mkdir(parents=True, exist_ok=True)
        status, files = HANDLERS[args.command](args, rng)
        for name, text in files.items():
            outputs[name] = _write(out, name, text)
        code = EXIT_OK if status == "ok" else EXIT_INCONCLUSIVE
    except SchemaError as exc:
        print(f"bellanomaly: malformed input at {exc.path}: {exc} (schema: {exc.schema_path or '-'})", file=sys.stderr)
        status, code = "usage-error", EXIT_USAGE
    except (AnomalyError, ValueError, OSError, TypeError) as exc:
        print(f"bellanomaly: {type(exc).__name__}: {exc}", file=sys.stderr)
        status, code = "usage-error", EXIT_USAGE
    manifest = {
        "schema": "bellanomaly/manifest/1",
        "tool_version": __version__,
        "command": ["bellanomaly", *argv],
        "command_name": args.command,
        "seed": seed,
        "seed_generated": seed_generated,
        "rng_algorithm": ALGORITHM,
        "threads": args.threads,
        "backend": kernels.BACKEND,
        "wall_time_s": round(time.perf_counter() - start, 6),
        "exit_code": code,
        "status": status,
        "outputs": outputs,
    }
    if out.is_dir():
        _write(out, "manifest.json", dumps(manifest))
    return code


if __name__ == "__main__":
    sys.exit(main())
