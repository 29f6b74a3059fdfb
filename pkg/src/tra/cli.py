"""Command-line front end: ``tra spectrum|wavefunction|potential|verify``.

Configuration is a YAML file.  Precedence, highest first: command-line
flags, config file, built-in defaults.  Unknown keys are rejected before
any computation.  Exit codes: 0 success, 1 configuration error, 2 solver
failure, 3 failed verification.
"""

import argparse
import copy
import json
import math
import os
import sys

import numpy as np
import yaml

from . import __version__
from .basis import BasisSpec, CoordinateMap, map_measure, overlap_matrix
from .errors import ConfigError, TRAError
from .fdoracle import FDGrid, eq100_grid, fd_bound_states, fd_spectrum
from .operator import (assemble_fixed_basis, assemble_oscillator, consistency_residual, eq100_nu,
                       eq114_matrix, oscillator_basis_scale, quadrature_assemble,
                       tridiagonality_defect)
from .potentials import CATALOG, PotentialSpec, eq100_from_u, format_csv, potential_eval
from .solver import (MODES, PROBLEMS, SolveConfig, eq100_basis, fig2_grid, oscillator_basis,
                     oscillator_spectrum_analytic, solve_spectrum, state_wavefunction,
                     table3_report)

SUITES = ("orthonormality", "tridiagonality", "consistency-reduction", "oracle-comparison",
          "factor-reconciliation")

DEFAULTS = {
    "problem": "Eq100",
    "params": None,
    "mode": "fixed-basis",
    "basis_size": 20,
    "sweep": [10, 20, 30, 40, 50],
    "mu": 1.0,
    "levels": None,
    "state": 0,
    "grid_points": 600,
    "table3": False,
    "potential": None,
    "out": "out",
}
DEFAULT_PARAMS = {
    "Eq100": {"u0": -6.0, "u1": 10.0, "uR": 2.5, "lam": 1.0},
    "Oscillator": {"omega": 1.0, "lam": 1.0, "ell": 0},
}
POTENTIAL_KEYS = {"name", "params", "x_min", "x_max", "n_points", "vary"}
VARY_KEYS = {"param", "values"}

EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 1, 2, 3


# ---------------------------------------------------------------------------
# configuration


def load_config(path):
    """Parse a YAML mapping; an absent path gives an empty mapping."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    return data


def _number(value, key, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number")
    if integer and int(value) != value:
        raise ConfigError(f"{key} must be an integer")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return int(value) if integer else float(value)


def _check_potential(section):
    if not isinstance(section, dict):
        raise ConfigError("potential must be a mapping")
    unknown = set(section) - POTENTIAL_KEYS
    if unknown:
        raise ConfigError(f"unknown potential keys: {sorted(unknown)}")
    if "name" not in section or section["name"] not in CATALOG:
        raise ConfigError(f"potential.name must be one of {sorted(CATALOG)}")
    out = {"name": section["name"], "params": dict(section.get("params") or {}),
           "x_min": _number(section.get("x_min", 1e-3), "potential.x_min"),
           "x_max": _number(section.get("x_max", 15.0), "potential.x_max"),
           "n_points": _number(section.get("n_points", 600), "potential.n_points", integer=True),
           "vary": None}
    vary = section.get("vary")
    if vary is not None:
        if not isinstance(vary, dict) or set(vary) != VARY_KEYS:
            raise ConfigError("potential.vary needs exactly the keys 'param' and 'values'")
        if not isinstance(vary["values"], list) or not vary["values"]:
            raise ConfigError("potential.vary.values must be a non-empty list")
        out["vary"] = {"param": str(vary["param"]),
                       "values": [_number(v, "potential.vary.values") for v in vary["values"]]}
    return out


def resolve_config(raw, overrides):
    """Merge defaults, the config mapping and CLI overrides; validate everything."""
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = copy.deepcopy(DEFAULTS)
    cfg.update(copy.deepcopy(raw))
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg["problem"] not in PROBLEMS:
        raise ConfigError(f"problem must be one of {list(PROBLEMS)}")
    if cfg["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {list(MODES)}")
    if cfg["params"] is None:
        cfg["params"] = dict(DEFAULT_PARAMS[cfg["problem"]])
    if not isinstance(cfg["params"], dict):
        raise ConfigError("params must be a mapping")
    cfg["params"] = {str(k): _number(v, f"params.{k}") for k, v in cfg["params"].items()}
    cfg["basis_size"] = _number(cfg["basis_size"], "basis_size", integer=True)
    if not isinstance(cfg["sweep"], list) or not cfg["sweep"]:
        raise ConfigError("sweep must be a non-empty list of basis sizes")
    cfg["sweep"] = [_number(n, "sweep", integer=True) for n in cfg["sweep"]]
    cfg["mu"] = _number(cfg["mu"], "mu")
    if cfg["levels"] is not None:
        cfg["levels"] = _number(cfg["levels"], "levels", integer=True)
    cfg["state"] = _number(cfg["state"], "state", integer=True)
    if cfg["state"] < 0:
        raise ConfigError("state must be nonnegative")
    cfg["grid_points"] = _number(cfg["grid_points"], "grid_points", integer=True)
    if cfg["grid_points"] < 2:
        raise ConfigError("grid_points must be at least 2")
    if not isinstance(cfg["table3"], bool):
        raise ConfigError("table3 must be true or false")
    if cfg["potential"] is not None:
        cfg["potential"] = _check_potential(cfg["potential"])
    if not isinstance(cfg["out"], str) or not cfg["out"]:
        raise ConfigError("out must be a directory path")
    try:
        solve_config(cfg)
    except TRAError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def solve_config(cfg):
    return SolveConfig(cfg["problem"], cfg["params"], cfg["basis_size"], cfg["mode"],
                       tuple(cfg["sweep"]), cfg["mu"], cfg["levels"])


# ---------------------------------------------------------------------------
# output


def _meta(cfg):
    return {"artifact": "tra", "version": __version__, "config": cfg}


def _meta_lines(cfg):
    return [f"tra {__version__}", "config: " + json.dumps(cfg, sort_keys=True)]


def _write(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _table(values, label="eps_n"):
    lines = [f"{'n':>3}  {label:>22}"]
    lines += [f"{n:>3}  {format(float(v), '.13g'):>22}" for n, v in enumerate(values)]
    return "\n".join(lines)


def _fmt(v):
    return "n/a" if v is None else f"{v:.3g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg):
    res = solve_spectrum(solve_config(cfg))
    doc = res.to_dict()
    doc.update(_meta(cfg))
    if cfg["problem"] == "Oscillator":
        text = [_table(res.energies, "E_n")]
    else:
        text = [_table(res.eigenvalues)]
    if cfg["table3"]:
        report = table3_report(cfg["params"], cfg["basis_size"], tuple(cfg["sweep"]), cfg["mu"])
        doc["table3"] = report
        text.append("")
        text.append("Table 3 comparison (sorted, relative difference)")
        for row in report["rows"]:
            text.append(f"  {row['mode']:>15}  {row['hypothesis']:>5}  levels {row['count']:>3}  "
                        f"median rel diff {_fmt(row['median_rel_diff'])}  "
                        f"median stable digits {row['median_digits']}")
        b = report["best"]
        text.append(f"  best: {b['mode']} / {b['hypothesis']}")
    path = _write(cfg["out"], "spectrum.json", _dumps(doc))
    print("\n".join(text))
    print(f"wrote {path}")
    return 0


def cmd_wavefunction(cfg):
    scfg = solve_config(cfg)
    m = cfg["state"]
    grid = fig2_grid(cfg["params"]["lam"], cfg["grid_points"])
    sample, bound = state_wavefunction(scfg, m, grid)
    meta = _meta_lines(cfg) + [f"state {m}", f"energy {sample.energy!r}", f"bound {bound}"]
    csv = format_csv([sample.x, sample.psi], ["x", "psi"], meta)
    doc = {"state": m, "energy": sample.energy, "bound": bool(bound), "norm": sample.norm,
           "coeffs": [float(c) for c in sample.coeffs], "N": scfg.N, "mode": scfg.mode}
    doc.update(_meta(cfg))
    p1 = _write(cfg["out"], f"wavefunction_{m}.csv", csv)
    p2 = _write(cfg["out"], f"wavefunction_{m}.json", _dumps(doc))
    print(f"state {m}: E = {sample.energy:.13g} ({'bound' if bound else 'continuum'})")
    print(f"wrote {p1}")
    print(f"wrote {p2}")
    return 0


def _potential_spec(name, params):
    if name == "Eq100" and set(params) == {"u0", "u1", "uR", "lam"}:
        return eq100_from_u(params["u0"], params["u1"], params["uR"], params["lam"])
    return PotentialSpec(name, params)


def _potential_curves(section):
    # all specs and the grid, validated against the potential's domain
    base = {k: _number(v, f"potential.params.{k}") for k, v in section["params"].items()}
    vary = section["vary"]
    sets = [dict(base)] if vary is None else [dict(base, **{vary["param"]: v}) for v in vary["values"]]
    if section["n_points"] < 2 or not section["x_min"] < section["x_max"]:
        raise ConfigError("potential grid needs x_min < x_max and n_points >= 2")
    x = np.linspace(section["x_min"], section["x_max"], section["n_points"])
    curves = []
    for params in sets:
        try:
            spec = _potential_spec(section["name"], params)
            lo, hi = spec.domain
            if not (x[0] > lo and x[-1] < hi):
                raise ConfigError(f"grid [{x[0]}, {x[-1]}] leaves the domain ({lo}, {hi})")
        except TRAError as exc:
            raise ConfigError(str(exc)) from exc
        curves.append((params, spec))
    return x, curves


def cmd_potential(cfg):
    if cfg["potential"] is None:
        raise ConfigError("the potential subcommand needs a 'potential' section")
    section = cfg["potential"]
    x, curves = _potential_curves(section)
    vary = section["vary"]
    written = []
    texts = []
    for i, (params, spec) in enumerate(curves):
        v = potential_eval(spec, x)
        meta = _meta_lines(cfg) + ["potential " + json.dumps(params, sort_keys=True)]
        name = "potential.csv" if vary is None else f"potential_{i}.csv"
        texts.append((name, format_csv([x, v], ["x", "V"], meta)))
    for name, text in texts:
        written.append(_write(cfg["out"], name, text))
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# verify suites


def _check(name, value, tol, passed=None, **extra):
    ok = bool(value < tol) if passed is None else bool(passed)
    return dict({"name": name, "value": float(value), "tol": float(tol), "pass": ok}, **extra)


def _eq100_params(cfg):
    if cfg["problem"] == "Eq100":
        return dict(cfg["params"])
    return dict(DEFAULT_PARAMS["Eq100"])


def _osc_params(cfg):
    if cfg["problem"] == "Oscillator":
        return dict(cfg["params"])
    return dict(DEFAULT_PARAMS["Oscillator"])


def suite_orthonormality(cfg, N=15):
    p = _eq100_params(cfg)
    nu = eq100_nu(p["uR"])
    mu = cfg["mu"]
    lam = p["lam"]
    configs = {
        "ShiftedExp Jacobi": BasisSpec("Jacobi", alpha=(mu + 1) / 2, beta=nu / 2, mu=mu, nu=nu,
                                       cmap=CoordinateMap("ShiftedExp", lam=lam), norm="measure"),
        "Tanh Jacobi": BasisSpec("Jacobi", alpha=(mu + 1) / 2, beta=(nu + 1) / 2, mu=mu, nu=nu,
                                 cmap=CoordinateMap("Tanh", lam=lam), norm="measure"),
        "Quadratic Laguerre": oscillator_basis(_osc_params(cfg)),
    }
    checks = []
    for label, spec in configs.items():
        S = overlap_matrix(spec, N)
        checks.append(_check(f"overlap identity ({label})", np.max(np.abs(S - np.eye(N))), 1e-10))
    # Eq. 117 configuration: overlap against the truncated matrix function W
    S = overlap_matrix(eq100_basis(p, mu), N) / map_measure(CoordinateMap("ShiftedExp", lam=lam))[0]
    _, W = assemble_fixed_basis(p["u0"], p["u1"], p["uR"], lam, mu, N=N)
    checks.append(_check("overlap vs W (Eq. 117)", np.max(np.abs(S - W)) / np.max(np.abs(W)), 1e-9))
    return checks


def suite_tridiagonality(cfg, N=15):
    checks = []
    p = _osc_params(cfg)
    ell = int(p["ell"])
    V = PotentialSpec("Oscillator", {"omega": p["omega"]})
    spec = oscillator_basis(p)
    M = quadrature_assemble(spec, V, 0.7, N, ell=ell)
    checks.append(_check("oscillator (Eq. 93a basis)", tridiagonality_defect(M), 1e-8))
    bad = BasisSpec("Laguerre", alpha=(ell + 1) / 2, beta=0.5, nu=ell + 1.5, cmap=spec.cmap)
    M = quadrature_assemble(bad, V, 0.7, N, ell=ell, require_convergence=False)
    d = tridiagonality_defect(M)
    checks.append(_check("oscillator negative control (nu = ell + 3/2)", d, 1e-8,
                         passed=d >= 1e-8, expect="fail"))
    q = _eq100_params(cfg)
    mu = cfg["mu"]
    eps = -mu * mu / 4
    V = eq100_from_u(q["u0"], q["u1"], q["uR"], q["lam"])
    spec = eq100_basis(q, mu)
    M = quadrature_assemble(spec, V, eps * q["lam"] ** 2 / 2, N)
    checks.append(_check("Eq. 100 (Eq. 112 basis)", tridiagonality_defect(M), 1e-8))
    bad = BasisSpec("Jacobi", alpha=mu / 2, beta=spec.nu / 2, mu=mu, nu=spec.nu, cmap=spec.cmap)
    M = quadrature_assemble(bad, V, eps * q["lam"] ** 2 / 2, N, require_convergence=False)
    d = tridiagonality_defect(M)
    checks.append(_check("Eq. 100 negative control (2 beta = nu)", d, 1e-8,
                         passed=d >= 1e-8, expect="fail"))
    return checks


def suite_consistency(cfg, N=20, n_eps=20, seed=12345):
    p = _eq100_params(cfg)
    rng = np.random.default_rng(seed)
    eps = -rng.uniform(0.01, 10.0, n_eps)
    derived = [consistency_residual(p["u0"], p["u1"], p["uR"], e, N) for e in eps]
    printed = [consistency_residual(p["u0"], p["u1"], p["uR"], e, N, convention="printed")
               for e in eps]
    return [_check("||(T - eps W) - J(eps)|| / ||T||, 20 random eps < 0", max(derived), 1e-10,
                   printed_convention_residual=max(printed))]


def suite_oracle(cfg):
    checks = []
    p = _osc_params(cfg)
    ell = int(p["ell"])
    omega = p["omega"]
    V = PotentialSpec("Oscillator", {"omega": omega})
    res = solve_spectrum(SolveConfig("Oscillator", p, 30, sweep=(30,)))
    exact = np.array([oscillator_spectrum_analytic(n, ell, omega) for n in range(5)])
    checks.append(_check("oscillator TRA vs analytic (N=30)",
                         np.max(np.abs(np.array(res.energies[:5]) - exact)), 1e-8))
    fd = fd_spectrum(V, ell, FDGrid(1e-12, 10.0 / omega, 4000), 5)
    checks.append(_check("oscillator FD vs analytic", np.max(np.abs(fd - exact)), 1e-5))
    q = _eq100_params(cfg)
    V = eq100_from_u(q["u0"], q["u1"], q["uR"], q["lam"])
    fd = fd_bound_states(V, 0, eq100_grid(q["lam"]))
    best = math.inf
    for mode in MODES:
        r = solve_spectrum(SolveConfig("Eq100", q, cfg["basis_size"], mode, (cfg["basis_size"],),
                                       cfg["mu"]))
        tra = np.array([E for E, b in zip(r.energies, r.bound_flags) if b])
        if tra.size != fd.size:
            continue
        err = float(np.max(np.abs(tra - fd) / np.abs(fd))) if fd.size else 0.0
        best = min(best, err)
    checks.append(_check(f"Eq. 100 bound states vs FD ({fd.size} levels, best mode)", best, 1e-4))
    return checks


def suite_factor(cfg, N=15):
    checks = []
    p = _osc_params(cfg)
    ell = int(p["ell"])
    spec = oscillator_basis(p)
    V = PotentialSpec("Oscillator", {"omega": p["omega"]})
    H = quadrature_assemble(spec, V, 0.0, N, ell=ell)
    osc = assemble_oscillator(p["omega"], p["lam"], ell, N)
    M = osc.energy_scale * osc.H.dense()
    checks.append(_check("oscillator: quadrature H == (lam/sqrt 2) M_96",
                         np.max(np.abs(H - M)) / np.max(np.abs(M)), 1e-10,
                         basis_scale=oscillator_basis_scale(p["lam"]),
                         energy_scale=osc.energy_scale))
    q = _eq100_params(cfg)
    mu = cfg["mu"]
    eps = -mu * mu / 4
    lam = q["lam"]
    V = eq100_from_u(q["u0"], q["u1"], q["uR"], lam)
    M = quadrature_assemble(eq100_basis(q, mu), V, eps * lam * lam / 2, N)
    c = map_measure(CoordinateMap("ShiftedExp", lam=lam))[0]
    J = eq114_matrix(q["u0"], q["u1"], q["uR"], mu, eps, N).dense()
    checks.append(_check("Eq. 100: (2/lam^2) M / c == J_114 (c = 1/lam)",
                         np.max(np.abs(2 / (lam * lam * c) * M - J)) / np.max(np.abs(J)), 1e-10))
    return checks


SUITE_FUNCS = {
    "orthonormality": suite_orthonormality,
    "tridiagonality": suite_tridiagonality,
    "consistency-reduction": suite_consistency,
    "oracle-comparison": suite_oracle,
    "factor-reconciliation": suite_factor,
}


def cmd_verify(cfg, suite):
    names = SUITES if suite == "all" else (suite,)
    report = {"suites": {}}
    ok = True
    for name in names:
        checks = SUITE_FUNCS[name](cfg)
        passed = all(c["pass"] for c in checks)
        ok = ok and passed
        report["suites"][name] = {"pass": passed, "checks": checks}
        for c in checks:
            print(f"[{'PASS' if c['pass'] else 'FAIL'}] {name}: {c['name']}: "
                  f"{c['value']:.3g} (tol {c['tol']:g})")
    report["pass"] = ok
    report.update(_meta(cfg))
    path = _write(cfg["out"], f"verify_{suite}.json", _dumps(report))
    print(f"wrote {path}")
    return 0 if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="tra", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"tra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--mode", choices=MODES, help="Eq. 100 solver mode")
        p.add_argument("--basis-size", type=int, help="basis size N")

    common(sub.add_parser("spectrum", help="eigenvalues, bound-state flags and convergence sweep"))
    p = sub.add_parser("wavefunction", help="x,psi samples of one state")
    common(p)
    p.add_argument("--state", type=int, help="state index m (ascending)")
    common(sub.add_parser("potential", help="x,V samples of a potential or a family"))
    p = sub.add_parser("verify", help="run an invariant suite")
    common(p)
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, all")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {"out": args.out, "mode": args.mode, "basis_size": args.basis_size,
                 "state": getattr(args, "state", None)}
    try:
        cfg = resolve_config(load_config(args.config), overrides)
        if args.command == "verify" and args.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}, all")
        if args.command == "potential":
            if cfg["potential"] is None:
                raise ConfigError("the potential subcommand needs a 'potential' section")
            _potential_curves(cfg["potential"])
    except ConfigError as exc:
        print(f"tra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "wavefunction":
            return cmd_wavefunction(cfg)
        if args.command == "potential":
            return cmd_potential(cfg)
        return cmd_verify(cfg, args.suite)
    except IndexError as exc:
        print(f"tra: invalid state: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TRAError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"tra: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
