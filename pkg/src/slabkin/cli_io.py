"""Configuration, run orchestration and result files for the ``slabkin`` CLI.

Verbs: ``solve`` (fixed point plus all outputs), ``check`` (pass/fail table)
and ``sweep`` (warm-started continuation in one parameter). Exit codes: 0 on
success, 1 for configuration or input errors, 2 when an iteration does not
converge, 3 when a check fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import struct
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .collision import (CollisionSample, KernelConfig, KernelTruncation, Species, involution_J,
                        post_collision_velocities)
from .diagnostics import detailed_balance, diagnose, entropy_productions
from .fixed_point import (SWEEP_PARAMS, IterationConfig, IterationState, SlabModel, check_schedule,
                          continuation_sweep, iterate_to_fixed_point)
from .velocity_space import beta_weight, species_maxwellian

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_CHECK_FAILED = 0, 1, 2, 3
SNAPSHOT_MAGIC = b"SLABKIN1"
FLOAT_FMT = ".17g"

PROFILE_UNITS = ("# x in slab units [-1,1]; density = int f dv; mean_xi_velocity = int xi f dv / density; "
                 "temperature = int |v-u|^2 f dv / (3 density), same units as wall T; "
                 "weighted_mass_density = int min(mu,(1+|v|)^beta) f dv; fields normalized to target weighted masses")
CONVERGENCE_UNITS = ("# residual_X = relative L1 change of species X plus relative scale change; "
                     "dtheta = |theta' - theta|; k_A = lambda / scale_A; lambda_prime = lambda / scale_B")
SWEEP_UNITS = ("# fluxes are outgoing B mass fluxes per unit wall area; I_* are slab-integrated entropy productions; "
               "l1_to_previous = L1 distance (both species) to the previous converged step")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


# ------------------------------------------------------------------ config

_DEFAULTS = {
    "species": {"A": {"mass": 1.0, "diameter": 1.0}, "B": {"mass": 2.0, "diameter": 1.0}},
    "kernel": {"beta": 0.0, "b_law": "constant", "b_eps": 0.0, "c_floor": 0.5},
    "truncation": {"r": 0.05, "m_sharp": 40.0, "n": 400.0, "mu": 2.0},
    "grids": {"velocity_nodes": 16, "vmax": None, "cells": 64},
    "walls": {"t_minus": 1.0, "t_plus": 2.0},
    "iteration": {"delta": 0.01, "j": 100.0, "l": 8.0, "rho": 0.5, "tol": 1e-8, "max_iter": 200,
                  "mass_A": 1.0, "mass_B": 1.0},
}


@dataclass
class RunConfig:
    """Validated run configuration; every block carries documented defaults."""

    species: dict = field(default_factory=lambda: json.loads(json.dumps(_DEFAULTS["species"])))
    kernel: dict = field(default_factory=lambda: dict(_DEFAULTS["kernel"]))
    truncation: dict = field(default_factory=lambda: dict(_DEFAULTS["truncation"]))
    grids: dict = field(default_factory=lambda: dict(_DEFAULTS["grids"]))
    walls: dict = field(default_factory=lambda: dict(_DEFAULTS["walls"]))
    iteration: dict = field(default_factory=lambda: dict(_DEFAULTS["iteration"]))
    output_dir: str = "slabkin_out"

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(**self.kernel)

    def truncation_config(self) -> KernelTruncation:
        return KernelTruncation(**self.truncation)

    def iteration_config(self) -> IterationConfig:
        it = dict(self.iteration)
        return IterationConfig(trunc=self.truncation_config(), **it)

    def model(self) -> SlabModel:
        g, w, s = self.grids, self.walls, self.species
        return SlabModel.build(m_A=s["A"]["mass"], m_B=s["B"]["mass"], t_minus=w["t_minus"], t_plus=w["t_plus"],
                               n_v=g["velocity_nodes"], vmax=g["vmax"], cells=g["cells"],
                               kernel=self.kernel_config(), d_A=s["A"]["diameter"], d_B=s["B"]["diameter"])

    def to_dict(self) -> dict:
        d = asdict(self)
        j = d["iteration"]["j"]
        d["iteration"]["j"] = "inf" if math.isinf(j) else j
        return d


def _number(key, value, integer=False, allow_inf=False):
    if allow_inf and (value is None or (isinstance(value, str) and value.lower() in ("inf", "infinity"))):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key '{key}': expected a number, got {value!r}")
    if integer:
        if float(value) != int(value):
            raise ConfigError(f"config key '{key}': expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value) and not allow_inf:
        raise ConfigError(f"config key '{key}': must be finite")
    return value


def _merge(path, defaults: dict, given) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(f"config key '{path}': expected an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"config key '{path}.{unknown[0]}': unknown key")
    out = {}
    for k, dv in defaults.items():
        key = f"{path}.{k}"
        if isinstance(dv, dict):
            out[k] = _merge(key, dv, given.get(k, {}))
            continue
        v = given.get(k, dv)
        if k == "b_law":
            if v not in ("constant", "cosine"):
                raise ConfigError(f"config key '{key}': must be 'constant' or 'cosine', got {v!r}")
            out[k] = v
        elif k == "vmax":
            out[k] = None if v is None else _number(key, v)
        elif k in ("velocity_nodes", "cells", "max_iter"):
            out[k] = _number(key, v, integer=True)
        elif k == "j":
            out[k] = _number(key, v, allow_inf=True)
        else:
            out[k] = _number(key, v)
    return out


_KEY_CHECKS = [
    ("kernel.beta", lambda c: c.kernel["beta"],
     lambda b: 0.0 <= b < 2.0 or -3.0 <= b < 0.0,
     "outside both admissible ranges: hard forces 0 <= beta < 2, soft forces -3 <= beta < 0"),
    ("truncation.mu", lambda c: c.truncation["mu"], lambda v: v >= 1, "must be >= 1"),
    ("truncation.r", lambda c: c.truncation["r"], lambda v: v > 0, "must be positive"),
    ("truncation.n", lambda c: c.truncation["n"], lambda v: v > 0, "must be positive"),
    ("truncation.m_sharp", lambda c: c.truncation["m_sharp"], lambda v: v >= 1, "must be >= 1"),
    ("kernel.c_floor", lambda c: c.kernel["c_floor"], lambda v: v > 0, "must be positive"),
    ("species.A.mass", lambda c: c.species["A"]["mass"], lambda v: v > 0, "must be positive"),
    ("species.B.mass", lambda c: c.species["B"]["mass"], lambda v: v > 0, "must be positive"),
    ("species.A.diameter", lambda c: c.species["A"]["diameter"], lambda v: v > 0, "must be positive"),
    ("species.B.diameter", lambda c: c.species["B"]["diameter"], lambda v: v > 0, "must be positive"),
    ("grids.velocity_nodes", lambda c: c.grids["velocity_nodes"], lambda v: v >= 2 and v % 2 == 0,
     "must be even and >= 2"),
    ("grids.cells", lambda c: c.grids["cells"], lambda v: v >= 1, "must be >= 1"),
    ("grids.vmax", lambda c: c.grids["vmax"], lambda v: v is None or v > 0, "must be positive"),
    ("walls.t_minus", lambda c: c.walls["t_minus"], lambda v: v > 0, "must be positive"),
    ("walls.t_plus", lambda c: c.walls["t_plus"], lambda v: v > 0, "must be positive"),
    ("iteration.delta", lambda c: c.iteration["delta"], lambda v: v >= 0, "must be >= 0"),
    ("iteration.j", lambda c: c.iteration["j"], lambda v: v >= 1, "must be >= 1 or 'inf'"),
    ("iteration.l", lambda c: c.iteration["l"], lambda v: v >= 1, "must be >= 1"),
    ("iteration.rho", lambda c: c.iteration["rho"], lambda v: 0 < v <= 1, "must lie in (0, 1]"),
    ("iteration.tol", lambda c: c.iteration["tol"], lambda v: v > 0, "must be positive"),
    ("iteration.max_iter", lambda c: c.iteration["max_iter"], lambda v: v >= 1, "must be >= 1"),
    ("iteration.mass_A", lambda c: c.iteration["mass_A"], lambda v: v > 0, "must be positive"),
    ("iteration.mass_B", lambda c: c.iteration["mass_B"], lambda v: v > 0, "must be positive"),
]


def config_from_dict(doc: dict) -> RunConfig:
    """Fill defaults and validate; errors name the offending key."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    allowed = set(_DEFAULTS) | {"output_dir"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"config key '{unknown[0]}': unknown key")
    blocks = {name: _merge(name, _DEFAULTS[name], doc.get(name, {})) for name in _DEFAULTS}
    out_dir = doc.get("output_dir", "slabkin_out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("config key 'output_dir': expected a non-empty string")
    cfg = RunConfig(output_dir=out_dir, **blocks)
    for key, get, ok, msg in _KEY_CHECKS:
        val = get(cfg)
        if not ok(val):
            raise ConfigError(f"config key '{key}': {key.split('.')[-1]}={val} {msg}")
    # module-level validation, with the block named on failure
    for block, build in (("kernel", cfg.kernel_config), ("truncation", cfg.truncation_config),
                         ("iteration", cfg.iteration_config)):
        try:
            build()
        except ValueError as exc:
            raise ConfigError(f"config key '{block}': {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from None
    return config_from_dict(doc)


# ------------------------------------------------------------------ snapshot

def write_snapshot(path, state: IterationState, cfg: RunConfig) -> None:
    """Binary snapshot: magic, uint32 header length, JSON header, then f_A and f_B as little-endian float64."""
    n_x, n_v = state.g_A.shape
    header = {"format": 1, "n_x": n_x, "n_v": n_v, "velocity_nodes": cfg.grids["velocity_nodes"],
              "cells": cfg.grids["cells"], "vmax": cfg.grids["vmax"], "theta": state.theta,
              "scale_A": state.scale_A, "scale_B": state.scale_B, "lam": state.lam, "dtype": "<f8",
              "order": "f_A then f_B, each (n_x, n_v) row-major"}
    raw = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        fh.write(np.ascontiguousarray(state.g_A, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.g_B, dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[IterationState, dict]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"snapshot not found: {p}")
    data = p.read_bytes()
    if data[:8] != SNAPSHOT_MAGIC:
        raise ConfigError(f"{p} is not a slabkin snapshot")
    (hlen,) = struct.unpack("<I", data[8:12])
    header = json.loads(data[12 : 12 + hlen].decode("utf-8"))
    n_x, n_v = header["n_x"], header["n_v"]
    body = np.frombuffer(data[12 + hlen :], dtype="<f8")
    if body.size != 2 * n_x * n_v:
        raise ConfigError(f"snapshot {p} is truncated")
    g_A = body[: n_x * n_v].reshape(n_x, n_v).astype(float)
    g_B = body[n_x * n_v :].reshape(n_x, n_v).astype(float)
    state = IterationState(g_A, g_B, float(header["theta"]), float(header["scale_A"]),
                           float(header["scale_B"]), float(header["lam"]))
    return state, header


def _check_snapshot_grid(header: dict, model: SlabModel) -> None:
    if header["n_x"] != model.sgrid.size or header["n_v"] != model.vgrid.size:
        raise ConfigError(f"snapshot grid ({header['n_x']} x {header['n_v']}) does not match the config "
                          f"({model.sgrid.size} x {model.vgrid.size})")


# ------------------------------------------------------------------ writers

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return "" if v is None else str(v)


def write_csv(path, units: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(units + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def profile_rows(state: IterationState, model: SlabModel, mu: float):
    vg = model.vgrid
    wts = vg.weights
    wbeta = beta_weight(vg.nodes, model.kernel.beta, mu) * wts
    for ix, x in enumerate(model.sgrid.x):
        for s in "AB":
            f = state.field(s)[ix]
            rho = float(f @ wts)
            if rho > 0:
                u = (vg.nodes.T * f) @ wts / rho
                temp = float(((np.sum((vg.nodes - u) ** 2, axis=1)) * f) @ wts / (3.0 * rho))
                ux = float(u[0])
            else:
                ux, temp = 0.0, 0.0
            yield [float(x), s, rho, ux, temp, float(f @ wbeta)]


PROFILE_HEADER = ["x", "species", "density", "mean_xi_velocity", "temperature", "weighted_mass_density"]
CONVERGENCE_HEADER = ["iteration", "residual_A", "residual_B", "dtheta", "theta", "k_A", "lambda_prime"]
SWEEP_HEADER = ["param", "value", "converged", "iterations", "residual", "theta", "k_A", "lambda_prime",
                "mass_A", "mass_B", "phi_minus_B", "phi_plus_B", "I_AA", "I_AB", "I_BB", "l1_to_previous", "error"]


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=True) + "\n")


# ------------------------------------------------------------------ verbs

def run_solve(cfg: RunConfig, out_dir=None, snapshot=None) -> int:
    """Solve, then write profiles.csv, convergence.csv, diagnostics.json and snapshot.bin."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = cfg.model()
    icfg = cfg.iteration_config()
    state = None
    if snapshot is not None:
        state, header = read_snapshot(snapshot)
        _check_snapshot_grid(header, model)
    result = iterate_to_fixed_point(icfg, model, state)
    rep = diagnose(result, icfg, model)
    write_csv(out / "profiles.csv", PROFILE_UNITS, PROFILE_HEADER, profile_rows(result.state, model, icfg.trunc.mu))
    write_csv(out / "convergence.csv", CONVERGENCE_UNITS, CONVERGENCE_HEADER,
              ([h["iteration"], h["residual_A"], h["residual_B"], h["dtheta"], h["theta"], h["k_A"], h["lam_prime"]]
               for h in result.history))
    write_json(out / "diagnostics.json", {"config": cfg.to_dict(), "report": rep.to_dict()})
    write_snapshot(out / "snapshot.bin", result.state, cfg)
    status = "converged" if result.converged else "NOT converged"
    print(f"{status} after {result.iterations} iterations; theta={result.theta:.6f} "
          f"k_A={result.state.k_A:.6g} lambda'={result.state.lam_prime:.6g}; outputs in {out}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def microscopic_checks(cfg: RunConfig, samples: int = 2000, seed: int = 0) -> list[tuple[str, bool, str]]:
    """Random-collision conservation and involution checks for every species pair."""
    rng = np.random.default_rng(seed)
    sp = {s: Species(cfg.species[s]["mass"], cfg.species[s]["diameter"], s) for s in "AB"}
    out = []
    for a, b in (("A", "A"), ("A", "B"), ("B", "B")):
        v = rng.normal(size=(samples, 3))
        vs = rng.normal(size=(samples, 3))
        om = rng.normal(size=(samples, 3))
        om /= np.linalg.norm(om, axis=1, keepdims=True)
        vp, vsp = post_collision_velocities(v, vs, om, sp[a], sp[b])
        ma, mb = sp[a].mass, sp[b].mass
        p0 = ma * v + mb * vs
        e0 = ma * np.sum(v * v, 1) + mb * np.sum(vs * vs, 1)
        dp = np.max(np.linalg.norm(ma * vp + mb * vsp - p0, axis=1) / (np.linalg.norm(p0, axis=1) + ma + mb))
        de = np.max(np.abs(ma * np.sum(vp * vp, 1) + mb * np.sum(vsp * vsp, 1) - e0) / e0)
        out.append((f"momentum conservation {a}{b}", bool(dp <= 1e-12), f"{dp:.2e}"))
        out.append((f"energy conservation {a}{b}", bool(de <= 1e-12), f"{de:.2e}"))
    v, vs, om = (rng.normal(size=(samples, 3)) for _ in range(3))
    smp = CollisionSample(v, vs, om / np.linalg.norm(om, axis=1, keepdims=True))
    back = involution_J(involution_J(smp, sp["A"], sp["B"]), sp["A"], sp["B"])
    worst = max(float(np.max(np.abs(back.v - v))), float(np.max(np.abs(back.vs - vs))))
    out.append(("involution J o J = id", worst <= 1e-12, f"{worst:.2e}"))
    return out


# resolution-level tolerances for the check verb (trilinear interpolation error at 16^3 is a few percent)
EQUILIBRIUM_PRODUCTION_TOL = 5e-2


def equilibrium_checks(cfg: RunConfig, model: SlabModel) -> list[tuple[str, bool, str]]:
    """Entropy production at a common-temperature Maxwellian pair, relative to the gross collision rate."""
    icfg = cfg.iteration_config()
    ops = model.operators(icfg.trunc)
    T = 0.5 * (cfg.walls["t_minus"] + cfg.walls["t_plus"])
    vg = model.vgrid
    f = {s: species_maxwellian(vg.nodes, model.species[s].mass, T)[None, :] for s in "AB"}
    prods = entropy_productions(f["A"], f["B"], ops, np.inf, None)
    gross = sum(float((f[k[0]] * ops[k].frequency(f[k[1]]))[0] @ vg.weights) for k in ops)
    ratio = abs(prods["combined"]) / gross if gross > 0 else 0.0
    db = detailed_balance(f["A"], f["B"], ops)
    return [("equilibrium entropy production", bool(ratio <= EQUILIBRIUM_PRODUCTION_TOL), f"{ratio:.2e}"),
            ("equilibrium detailed balance (reported)", True, f"max rel {max(db.values()):.2e}")]


INVARIANT_TOL = 0.1


def run_check(cfg: RunConfig, snapshot=None) -> int:
    """Print the pass/fail table; exit 0 iff every check passes."""
    model = cfg.model()
    icfg = cfg.iteration_config()
    rows = microscopic_checks(cfg)
    rows += equilibrium_checks(cfg, model)
    if snapshot is not None:
        state, header = read_snapshot(snapshot)
        _check_snapshot_grid(header, model)
        from .fixed_point import FixedPointResult
        result = FixedPointResult(state, True, 0, [])
    else:
        result = iterate_to_fixed_point(icfg, model)
        rows.append(("fixed point converged", result.converged, f"{result.iterations} iterations"))
    both = np.concatenate([result.state.g_A.ravel(), result.state.g_B.ravel()])
    if np.any(both < 0) or not np.all(np.isfinite(both)):
        rows.append(("positivity", False, f"{int(np.count_nonzero(~(both >= 0)))} negative or non-finite values"))
    else:
        rep = diagnose(result, icfg, model)
        for key, d in rep.invariants.items():
            rows.append((f"collision invariant {key}", d["rel"] <= INVARIANT_TOL, f"rel {d['rel']:.2e}"))
        rows += rep.checks()
    width = max(len(r[0]) for r in rows)
    failed = 0
    for name, ok, detail in rows:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def parse_values(text: str) -> list[float]:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            vals.append(math.inf if tok.lower() in ("inf", "infinity") else float(tok))
        except ValueError:
            raise ConfigError(f"--values: cannot parse {tok!r}") from None
    return vals


def run_sweep(cfg: RunConfig, parameter: str, values, out_dir=None, snapshot=None) -> int:
    """Continuation sweep; one sweep.csv row per step, failures recorded in the row."""
    try:
        check_schedule(parameter, values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = cfg.model()
    icfg = cfg.iteration_config()
    state = None
    if snapshot is not None:
        state, header = read_snapshot(snapshot)
        _check_snapshot_grid(header, model)
    steps = continuation_sweep(icfg, model, parameter, values, state, diagnose=diagnose)
    rows = []
    all_ok = True
    for st in steps:
        if st.result is None:
            all_ok = False
            rows.append([parameter, st.value, False] + [None] * 13 + [st.error])
            continue
        r, rep = st.result, st.report
        all_ok &= r.converged
        fb = rep.fluxes["B"]
        rows.append([parameter, st.value, r.converged, r.iterations, r.state.residuals[-1] if r.state.residuals else None,
                     r.theta, r.state.k_A, r.state.lam_prime, rep.masses["A"], rep.masses["B"],
                     fb["minus"]["mass_out"], fb["plus"]["mass_out"], rep.entropy["I_AA"], rep.entropy["I_AB_sym"],
                     rep.entropy["I_BB"], st.l1_to_previous, None])
    write_csv(out / "sweep.csv", SWEEP_UNITS, SWEEP_HEADER, rows)
    print(f"sweep over {parameter}: {len(steps)} steps, {'all converged' if all_ok else 'some steps failed'}")
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slabkin", description="Two-species stationary kinetic slab solver.")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, text in (("solve", "solve the fixed point and write results"),
                       ("check", "run the invariant and property checks"),
                       ("sweep", "continuation sweep in one parameter")):
        sp = sub.add_parser(verb, help=text)
        sp.add_argument("--config", help="JSON configuration file (defaults apply when omitted)")
        sp.add_argument("--snapshot", help="snapshot.bin for warm start (solve, sweep) or as the checked state")
        if verb != "check":
            sp.add_argument("--out", help="output directory (overrides output_dir)")
        if verb == "sweep":
            sp.add_argument("--param", required=True, choices=SWEEP_PARAMS)
            sp.add_argument("--values", required=True, help="comma-separated schedule, e.g. 0.1,0.01,0.001")
    p.add_argument("-v", "--verbose", action="store_true", help="log iteration progress")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.verb == "solve":
            return run_solve(cfg, args.out, args.snapshot)
        if args.verb == "check":
            return run_check(cfg, args.snapshot)
        return run_sweep(cfg, args.param, parse_values(args.values), args.out, args.snapshot)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
