"""Command-line driver.

Every run reads one JSON config document::

    hbball equiv --config model_n1_bz.json

Exit codes: 0 success, 2 validation error, 3 solver or I/O failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import acceptance, angular, clark, hbspace, kernels
from .errors import HBError, SolverError
from .geometry import SpherePoint, sphere_grid, unit_vector
from .report import dumps_csv, dumps_json
from .symbols import symbol_from_config

log = logging.getLogger("hbball")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class ConfigError(ValueError):
    pass


# --- config parsing ----------------------------------------------------------

def _cnum(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def _point(v, n):
    coords = np.array([_cnum(c) for c in v], dtype=complex)
    if coords.size != n:
        raise ConfigError(f"boundary point {v!r} does not live in C^{n}")
    if abs(np.linalg.norm(coords) - 1) > 1e-9:
        raise ConfigError(f"boundary point {v!r} is not unit-normalized")
    return SpherePoint(coords).coords


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "seed" not in cfg:
        raise ConfigError("config must set 'seed'")
    cfg["seed"] = int(cfg["seed"])
    return cfg


def _symbol(cfg):
    if "symbol" not in cfg:
        raise ConfigError("config must set 'symbol'")
    return symbol_from_config(cfg["symbol"])


def _boundary_points(cfg, n):
    pts = cfg.get("boundaryPoints")
    if not pts:
        return [unit_vector(n).coords]
    return [_point(p, n) for p in pts]


def _emit(cfg, records, fmt=None, header=None):
    fmt = fmt or cfg.get("format", "json")
    text = dumps_json(records) if fmt == "json" else dumps_csv(records, header)
    out = cfg.get("output")
    if out:
        Path(out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _map(fn, items):
    with ThreadPoolExecutor(max_workers=angular.worker_count()) as pool:
        return list(pool.map(fn, items))


# --- commands ----------------------------------------------------------------

def cmd_kernel(cfg):
    b = _symbol(cfg)
    block = cfg.get("kernel", {})
    K = int(block.get("rungs", 16))
    rows = []
    for xi in _boundary_points(cfg, b.dimension):
        for k in range(1, K + 1):
            r = 1.0 - 2.0 ** -k
            z = r * xi
            q = angular.boundary_quotients(b, z, xi)
            rows.append({
                "k": k,
                "r": r,
                "xi": json.dumps([[c.real, c.imag] for c in xi]),
                "szego": kernels.szego(z, z).value.real,
                "poisson": kernels.invariant_poisson(z, xi),
                "hbKernel": kernels.hb_kernel(b, z, z).value.real,
                "q1": q.q1,
                "q2": q.q2,
            })
    header = ["xi", "k", "r", "szego", "poisson", "hbKernel", "q1", "q2"]
    _emit(cfg, rows, cfg.get("format", "csv"), header)


def cmd_gram(cfg):
    b = _symbol(cfg)
    block = cfg.get("gram", {})
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    for i in range(int(block.get("configs", 10))):
        size = int(rng.integers(2, int(block.get("maxPoints", 12)) + 1))
        config = acceptance._random_config(rng, b.dimension, size, float(block.get("minSeparation", 0.05)))
        lam = hbspace.gram_matrix(b, config).eigvalsh()
        z = acceptance._ball_points(rng, 1, b.dimension, 0.9)[0]
        c = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        res = hbspace.reproducing_check(b, config, c, z)
        rows.append({
            "index": i,
            "size": size,
            "separation": config.separation,
            "minEigRatio": float(lam[0] / lam[-1]),
            "psd": bool(lam[0] >= -1e-8 * lam[-1]),
            "reproducingResidual": res,
        })
    _emit(cfg, rows)


def _eta(cfg, b, xi):
    block = cfg.get("member", {})
    if "eta" in block:
        return _cnum(block["eta"])
    ad = angular.angular_derivative_estimate(b, xi)
    return ad.eta_estimate if ad.eta_estimate is not None else _cnum(cfg.get("alpha", 1.0))


def cmd_member(cfg):
    b = _symbol(cfg)
    block = cfg.get("member", {})
    levels = int(block.get("levels", 14))
    settings = hbspace.MembershipSettings(
        plateau=float(block.get("plateau", 0.05)), slope=float(block.get("slope", 0.25))
    )
    kind = block.get("candidate", "boundaryKernel")
    reports = []
    for xi in _boundary_points(cfg, b.dimension):
        if kind == "boundaryKernel":
            f = angular.boundary_kernel_candidate(b, xi, _eta(cfg, b, xi))
        elif kind == "one":
            f = hbspace.CandidateFunction(lambda Z: np.ones(len(Z)), "1")
        else:
            raise ConfigError(f"unknown candidate {kind!r}")
        cfgs = hbspace.nested_radial_configs(xi, levels)
        reports.append(hbspace.membership_estimate(b, f, cfgs, settings))
    _emit(cfg, reports)


def _clark_block(cfg, b):
    block = cfg.get("clark", {})
    grid = sphere_grid(b.dimension, int(block.get("gridSize", 400)), cfg["seed"])
    atoms = [_point(p, b.dimension) for p in block["atomCandidates"]] if "atomCandidates" in block else _boundary_points(cfg, b.dimension)
    prob = clark.clark_problem(
        b,
        _cnum(cfg.get("alpha", 1.0)),
        grid,
        atoms,
        bool(block.get("massConstraint", True)),
        ladder=int(block.get("ladder", 10)),
    )
    if "capRadii" in block:
        prob = dataclasses.replace(prob, cap_radii=tuple(float(r) for r in block["capRadii"]))
    return prob, block


def cmd_clark_solve(cfg):
    b = _symbol(cfg)
    prob, block = _clark_block(cfg, b)
    rep = clark.solve_clark(prob)
    if "measureCsv" in block:
        Path(block["measureCsv"]).write_text(rep.measure.to_csv(), newline="")
    _emit(cfg, rep)


def cmd_clark_verify(cfg):
    b = _symbol(cfg)
    prob, block = _clark_block(cfg, b)
    if abs(prob.alpha.alpha - 1) > 1e-12:
        raise ConfigError("the inner-product identity is checked for alpha = 1 only")
    rep = clark.solve_clark(prob)
    mu = rep.measure
    rng = np.random.default_rng(cfg["seed"] + 1)
    vb = cfg.get("verify", {})
    n = b.dimension
    lemma = []
    for _ in range(int(vb.get("pairs", 20))):
        z, w = acceptance._ball_points(rng, 2, n, 0.5)
        lemma.append(clark.clark_inner_identity_check(b, mu, z, w))
    W = acceptance._ball_points(rng, int(vb.get("spanSize", 5)), n, 0.5)
    c = rng.standard_normal(len(W)) + 1j * rng.standard_normal(len(W))
    g = lambda X: kernels.szego_matrix(X, W) @ c
    l2 = float(np.sqrt(np.sum(mu.all_weights * np.abs(g(mu.points)) ** 2)))
    vals = np.array([clark.vb_transform(b, mu, g, w) for w in W])
    hb = hbspace.min_norm_interpolant_norm(hbspace.gram_matrix(b, hbspace.PointConfiguration(W)), vals)
    hbn = float(np.sqrt(hb)) if hb != hbspace.INFEASIBLE else float("inf")
    image = []
    for w in W:
        for z in W:
            got = clark.vb_transform(b, mu, lambda X, w=w: kernels.szego_matrix(X, w[None, :])[:, 0], z)
            want = kernels.hb_kernel(b, z, w).value / (1 - np.conj(b(w)))
            image.append(abs(got - want) / abs(want))
    _emit(cfg, {
        "solve": rep,
        "lemmaMaxResidual": max(lemma),
        "kernelImageMaxResidual": max(image),
        "isometry": {"l2Norm": l2, "hbNorm": hbn, "relativeError": abs(hbn - l2) / l2},
    })


def cmd_angular_scan(cfg):
    b = _symbol(cfg)
    K = int(cfg.get("angular", {}).get("rungs", 16))
    reports = _map(lambda xi: angular.angular_derivative_estimate(b, xi, K), _boundary_points(cfg, b.dimension))
    _emit(cfg, reports)


def _harness_settings(cfg):
    h = cfg.get("harness", {})
    return angular.HarnessSettings(
        ladder_rungs=int(h.get("ladderRungs", 16)),
        membership_levels=int(h.get("membershipLevels", 14)),
        grid_size=int(h.get("gridSize", 400)),
        seed=cfg["seed"],
        atom_threshold=float(h.get("atomThreshold", 0.1)),
        sample_ladder=int(h.get("sampleLadder", 10)),
    )


def cmd_equiv(cfg):
    b = _symbol(cfg)
    s = _harness_settings(cfg)
    alpha = _cnum(cfg.get("alpha", 1.0))
    pts = _boundary_points(cfg, b.dimension)
    recs = _map(lambda xi: angular.equivalence_harness(b, xi, alpha, s), pts)
    if cfg.get("format", "json") == "csv":
        _emit(cfg, recs, "csv")
    else:
        _emit(cfg, recs[0] if len(recs) == 1 else recs)


def cmd_selftest(cfg):
    timings = {}
    results = acceptance.run_all(cfg.get("seed", 0), timings)
    over = []
    for r in results:
        limit = acceptance.RUNTIME_LIMITS[r.number]
        line = f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.number:2d} {r.name} ({timings[r.number]:.2f}s / {limit}s)"
        if timings[r.number] > limit:
            over.append(r.number)
            line += " over time budget"
        print(line, file=sys.stderr)
    _emit(cfg, {"seed": cfg.get("seed", 0), "criteria": results, "allPassed": all(r.passed for r in results)})
    return EXIT_OK if all(r.passed for r in results) and not over else 1


COMMANDS = {
    ("kernel",): cmd_kernel,
    ("gram",): cmd_gram,
    ("member",): cmd_member,
    ("clark", "solve"): cmd_clark_solve,
    ("clark", "verify"): cmd_clark_verify,
    ("angular", "scan"): cmd_angular_scan,
    ("equiv",): cmd_equiv,
    ("selftest",): cmd_selftest,
}


def build_parser():
    p = _Parser(prog="hbball", description="Numerics for de Branges-Rovnyak spaces on the unit ball.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("kernel", "gram", "member", "equiv"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
    st = sub.add_parser("selftest")
    st.add_argument("--config")
    st.add_argument("--output", help="report path (overrides the config)")
    st.add_argument("--seed", type=int)
    for group, actions in (("clark", ("solve", "verify")), ("angular", ("scan",))):
        gp = sub.add_parser(group)
        gsub = gp.add_subparsers(dest="action", required=True)
        for a in actions:
            ap = gsub.add_parser(a)
            ap.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    key = (args.command, args.action) if getattr(args, "action", None) else (args.command,)
    fn = COMMANDS[key]
    try:
        if args.command == "selftest":
            cfg = load_config(args.config) if args.config else {"seed": 0}
            if args.seed is not None:
                cfg["seed"] = args.seed
            if args.output:
                cfg["output"] = args.output
        else:
            cfg = load_config(args.config)
        rc = fn(cfg)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, HBError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
