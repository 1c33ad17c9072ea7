"""Config-driven batch front end.

One JSON config per run; every command writes deterministic CSV/JSON
artifacts whose first line records the package version and the fully resolved
configuration, so reruns are byte-identical.  Exit codes: 0 success, 2 config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    adapt_spectrum,
    best_cat,
    decoherence_threshold,
    detect_avoided_crossings,
    dv_crit,
    localized_component,
    one_level_max_n,
    resonance_halfwidth_formula,
    resonance_positions,
    splitting_resonant,
    splitting_symmetric,
    sweep_interaction,
    sweep_tilt,
    u_crit,
    u_max,
)
from .bandcalc import ConvergenceError, LocalizationError, PotentialSpec, band_pipeline
from .fock import dimension, enumerate_basis, one_level_basis
from .hamiltonian import ConfigurationError, ModelParams, build
from .spectrum import DenseCapError, SolverError, solve_auto

COMMANDS = ("basis", "spectrum", "sweep-tilt", "sweep-interaction",
            "resonances", "thresholds", "derive-params")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _require(cfg: dict, field: str, types, command: str):
    if field not in cfg:
        raise ConfigError(f"missing field '{field}' (required by {command})")
    if not isinstance(cfg[field], types):
        raise ConfigError(f"field '{field}' has the wrong type")
    return cfg[field]


def _model_params(cfg: dict) -> tuple[ModelParams, str]:
    mode = _require(cfg, "mode", str, cfg.get("command", "?"))
    if mode not in ("one-level", "two-level"):
        raise ConfigError(f"field 'mode' must be 'one-level' or 'two-level', got {mode!r}")
    raw = _require(cfg, "params", dict, cfg["command"])
    allowed = {"J0", "J1", "U0", "U1", "U01", "dV", "hw"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in 'params': {sorted(unknown)}")
    if "J0" not in raw:
        raise ConfigError("missing field 'params.J0'")
    try:
        if mode == "one-level":
            if raw.get("hw") is not None:
                raise ConfigError("'params.hw' must be absent or null in one-level mode")
            params = ModelParams.one_level(J0=float(raw["J0"]),
                                           U0=float(raw.get("U0", 0.0)),
                                           dV=float(raw.get("dV", 0.0)))
        else:
            if raw.get("hw") is None:
                raise ConfigError("missing field 'params.hw' (two-level mode)")
            params = ModelParams(J0=float(raw["J0"]), J1=float(raw.get("J1", 0.0)),
                                 U0=float(raw.get("U0", 0.0)),
                                 U1=float(raw.get("U1", 0.0)),
                                 U01=float(raw.get("U01", 0.0)),
                                 dV=float(raw.get("dV", 0.0)),
                                 hw=float(raw["hw"]))
        if mode == "one-level" and params.U0 != 0:
            params = params.normalized()
        elif mode == "two-level":
            params = params.normalized()
    except ConfigurationError as exc:
        raise ConfigError(f"invalid 'params': {exc}") from exc
    return params, mode


def _potential_spec(cfg: dict) -> PotentialSpec:
    raw = _require(cfg, "potential", dict, cfg["command"])
    kwargs = {}
    mapping = {"v1": "v1", "v2": "v2", "theta": "theta",
               "wavelength_nm": "wavelength", "omega_perp_hz": "omega_perp",
               "a_s_nm": "a_s", "mass_amu": "mass"}
    unknown = set(raw) - set(mapping)
    if unknown:
        raise ConfigError(f"unknown keys in 'potential': {sorted(unknown)}")
    from .bandcalc import AMU
    for key, val in raw.items():
        x = float(val)
        if key == "wavelength_nm":
            x *= 1e-9
        elif key == "a_s_nm":
            x *= 1e-9
        elif key == "omega_perp_hz":
            x *= 2 * math.pi
        elif key == "mass_amu":
            x *= AMU
        kwargs[mapping[key]] = x
    try:
        return PotentialSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid 'potential': {exc}") from exc


def _basis_for(cfg: dict):
    N = _require(cfg, "N", int, cfg["command"])
    if isinstance(N, bool) or N < 0:
        raise ConfigError(f"field 'N' must be a nonnegative integer, got {N!r}")
    mode = cfg.get("mode", "two-level")
    cap = int(cfg.get("solver", {}).get("max_n", 40))
    return one_level_basis(N, cap) if mode == "one-level" else enumerate_basis(N, cap)


def _grid(cfg: dict) -> np.ndarray:
    raw = _require(cfg, "sweep", dict, cfg["command"])
    if "values" in raw:
        g = np.asarray(raw["values"], dtype=np.float64)
    else:
        for f in ("start", "stop", "num"):
            if f not in raw:
                raise ConfigError(f"missing field 'sweep.{f}'")
        g = np.linspace(float(raw["start"]), float(raw["stop"]), int(raw["num"]))
    if g.ndim != 1 or len(g) == 0:
        raise ConfigError("field 'sweep' produced an empty grid")
    if np.any(np.diff(g) <= 0):
        raise ConfigError("field 'sweep' must give a strictly increasing grid")
    return g


def _solver_opts(cfg: dict) -> dict:
    s = cfg.get("solver", {})
    if not isinstance(s, dict):
        raise ConfigError("field 'solver' must be an object")
    return {"dense_cap": int(s.get("dense_cap", 4000)),
            "tol": float(s.get("tol", 1e-10)),
            "gap_tol": float(s.get("gap_tol", 0.2))}


def _header(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return f"# doublewell {__version__} config={canon}"


def _write_csv(path: Path, cfg: dict, columns: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header(cfg) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_json(path: Path, cfg: dict, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"generator": f"doublewell {__version__}", "config": cfg,
               **payload}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _sign_str(sign: int) -> str:
    return {1: "+", -1: "-", 0: "0"}[sign]


def _cmd_basis(cfg: dict, out: Path) -> list[Path]:
    basis = _basis_for(cfg)
    rows = ([str(i), str(s.nL0), str(s.nR0), str(s.nL1), str(s.nR1),
             str(s.excited)] for i, s in enumerate(basis.states))
    path = out / "basis.csv"
    _write_csv(path, cfg, ["index", "nL0", "nR0", "nL1", "nR1", "M"], rows)
    return [path]


def _cmd_spectrum(cfg: dict, out: Path) -> list[Path]:
    basis = _basis_for(cfg)
    params, _ = _model_params(cfg)
    params.check_regime(basis.N)
    opts = _solver_opts(cfg)
    k = cfg.get("k", min(basis.dim, 64))
    if not isinstance(k, int) or k < 1:
        raise ConfigError(f"field 'k' must be a positive integer, got {k!r}")
    k = min(k, basis.dim)
    spec = solve_auto(build(params, basis), k=k, dense_cap=opts["dense_cap"],
                      tol=opts["tol"])
    adapted, _ = adapt_spectrum(spec, basis, params, gap_tol=opts["gap_tol"])
    res = spec.meta["residuals"]
    eig_rows = ([str(i), _fmt(spec.eigenvalues[i]), _fmt(res[i])]
                for i in range(k))
    p1 = out / "eigenvalues.csv"
    _write_csv(p1, cfg, ["k", "eigenvalue", "residual"], eig_rows)
    win = cfg.get("window", {})
    if not isinstance(win, dict):
        raise ConfigError("field 'window' must be an object")
    kw = min(int(win.get("k", k)), k)
    nw = min(int(win.get("n", k)), basis.dim)
    amp_rows = ([str(i), str(n), _fmt(abs(adapted.eigenvectors[n, i]))]
                for i in range(kw) for n in range(nw))
    p2 = out / "amplitudes.csv"
    _write_csv(p2, cfg, ["k", "n", "amplitude_abs"], amp_rows)
    return [p1, p2]


def _sweep_common(cfg: dict, out: Path, kind: str, threads: int) -> list[Path]:
    basis = _basis_for(cfg)
    params, mode = _model_params(cfg)
    opts = _solver_opts(cfg)
    k = _require(cfg, "k", int, cfg["command"])
    if k < 1 or k > basis.dim:
        raise ConfigError(f"field 'k' must be in 1..{basis.dim}, got {k}")
    grid = _grid(cfg)
    if kind == "U0":
        if mode != "two-level":
            raise ConfigError("sweep-interaction requires 'mode': 'two-level'")
        if params.U0 == 0:
            raise ConfigError("sweep-interaction requires 'params.U0' != 0 "
                              "to fix the U1/U0 and U01/U0 ratios")
        sweep = sweep_interaction(params, basis, grid, k, workers=threads,
                                  gap_tol=opts["gap_tol"],
                                  dense_cap=opts["dense_cap"], tol=opts["tol"])
    else:
        sweep = sweep_tilt(params, basis, grid, k, workers=threads,
                           gap_tol=opts["gap_tol"],
                           dense_cap=opts["dense_cap"], tol=opts["tol"])

    def rows():
        for i, value in enumerate(sweep.grid):
            for j in range(k):
                r = sweep.reports[i][j]
                yield [_fmt(value), str(j), _fmt(sweep.eigenvalues[i, j]),
                       str(r.nu), str(r.p), _sign_str(r.sign),
                       _fmt(r.fidelity), _fmt(sweep.occupations[i, j])]

    path = out / "sweep.csv"
    _write_csv(path, cfg, ["param_value", "k", "eigenvalue", "nu", "p", "sign",
                           "fidelity", "excited_occ"], rows())
    return [path]


def _cmd_resonances(cfg: dict, out: Path, threads: int) -> list[Path]:
    basis = _basis_for(cfg)
    params, _ = _model_params(cfg)
    opts = _solver_opts(cfg)
    k = _require(cfg, "k", int, cfg["command"])
    if k < 2 or k > basis.dim:
        raise ConfigError(f"field 'k' must be in 2..{basis.dim}, got {k}")
    grid = _grid(cfg)
    N = basis.N
    sweep = sweep_tilt(params, basis, grid, k, with_reports=False,
                       workers=threads, dense_cap=opts["dense_cap"],
                       tol=opts["tol"])
    crossings = detect_avoided_crossings(sweep)
    U0 = params.U0
    report = []
    for p in range(1, N):
        cands = [c for c in crossings if c.p == p]
        entry: dict = {"p": p, "predicted": 2.0 * p * abs(U0)}
        if not cands:
            entry.update({"detected": None, "min_gap": None, "resolved": False,
                          "nu": None, "width_measured": None})
        else:
            best = min(cands, key=lambda c: c.residual)
            nu = _crossing_nu(best, sweep, basis, params, opts)
            width = (2.0 * best.min_gap / (N - 2 * nu - p)
                     if nu is not None and (N - 2 * nu - p) > 0 else None)
            entry.update({"detected": best.location, "min_gap": best.min_gap,
                          "resolved": best.resolved, "nu": nu,
                          "width_measured": width})
        if U0 != 0 and params.J0 != 0:
            entry["width_formula_log10"] = resonance_halfwidth_formula(
                N, p, params.J0, params.U0).scaled(abs(U0)).log10_magnitude
        else:
            entry["width_formula_log10"] = None
        report.append(entry)
    path = out / "resonances.json"
    _write_json(path, cfg, {"unit": params.unit, "N": N,
                            "resonances": report})
    return [path]


def _crossing_nu(crossing, sweep, basis, params, opts) -> int | None:
    """nu of the two states meeting at a detected crossing, from their content.

    At the gap minimum the two eigenvectors are ~50/50 hybrids of the diabatic
    components, so the pair's combined probability profile is used: its two
    dominant lowest-level components are the crossing states.
    """
    from dataclasses import replace

    from .fock import FockState
    pt = replace(params, dV=crossing.location)
    spec = solve_auto(build(pt, basis), k=crossing.series + 2,
                      dense_cap=opts["dense_cap"], tol=opts["tol"])
    v1 = spec.eigenvectors[:, crossing.series]
    v2 = spec.eigenvectors[:, crossing.series + 1]
    N = basis.N
    profile = np.array([
        v1[basis.index_of(FockState(m, N - m, 0, 0))] ** 2
        + v2[basis.index_of(FockState(m, N - m, 0, 0))] ** 2
        for m in range(N + 1)])
    top = np.argsort(profile)[-2:]
    if profile[top].sum() < 1.0:   # pair carries under half its weight there
        return None
    ms = sorted(int(m) for m in top)
    if crossing.p is None or ms[0] + ms[1] != N - crossing.p:
        return None
    return ms[0]


def _cmd_thresholds(cfg: dict, out: Path) -> list[Path]:
    N = _require(cfg, "N", int, cfg["command"])
    if N < 2:
        raise ConfigError(f"field 'N' must be >= 2 for thresholds, got {N}")
    raw = _require(cfg, "params", dict, cfg["command"])
    for f in ("J0", "U0", "hw"):
        if f not in raw:
            raise ConfigError(f"missing field 'params.{f}' (thresholds needs J0, U0, hw)")
    J0, U0, hw = float(raw["J0"]), float(raw["U0"]), float(raw["hw"])
    J1 = float(raw.get("J1", 0.0))
    dc = dv_crit(N, U0, hw)
    per_nu = []
    for nu in range((N + 1) // 2):
        sp = splitting_symmetric(N, nu, J0, U0)
        th = decoherence_threshold(N, nu, J0, U0)
        per_nu.append({"nu": nu,
                       "splitting_log10_U0": sp.log10_magnitude,
                       "decoherence_threshold_log10_U0": th.log10_magnitude})
    per_p = []
    for p in range(1, N):
        sp = splitting_resonant(N, p, J0, U0)
        hwid = resonance_halfwidth_formula(N, p, J0, U0)
        per_p.append({"p": p, "position": 2.0 * p * U0,
                      "splitting_log10_U0": sp.log10_magnitude,
                      "halfwidth_log10_U0": hwid.log10_magnitude})
    payload = {
        "N": N,
        "dimension": dimension(N),
        "u_crit": u_crit(N, hw),
        "u_max": u_max(N, hw),
        "dv_crit": {"value": dc.value, "branch": dc.branch,
                    "already_crossed": dc.already_crossed},
        "one_level_max_n": one_level_max_n(J0, J1, hw) if J0 > 0 else None,
        "resonance_positions": list(resonance_positions(N, U0)),
        "symmetric_pairs": per_nu,
        "resonant_pairs_nu0": per_p,
        "units": "energies in the unit of J0/U0/hw as given; log10 values in U0",
    }
    path = out / "thresholds.json"
    _write_json(path, cfg, payload)
    return [path]


def _cmd_derive_params(cfg: dict, out: Path) -> list[Path]:
    spec = _potential_spec(cfg)
    grid_points = int(cfg.get("solver", {}).get("grid_points", 16384))
    params, diag, orbs = band_pipeline(spec, grid_points=grid_points)
    payload = {
        "params_Er": {"J0": params.J0, "J1": params.J1, "U0": params.U0,
                      "U1": params.U1, "U01": params.U01, "dV": params.dV,
                      "hw": params.hw},
        "ratios": {"U1_over_U0": diag["U1_over_U0"],
                   "U01_over_U0": diag["U01_over_U0"],
                   "J0_over_J1": diag["J0_over_J1"],
                   "J0_over_U0": params.J0 / params.U0 if params.U0 else None,
                   "J1_over_hw": diag["J1_over_hw"]},
        "onsite_Er": diag["onsite_Er"],
        "doublet_energies_Er": diag["doublet_energies_Er"],
        "recoil_energy_J": diag["recoil_energy_J"],
        "recoil_rate_rad_per_s": diag["recoil_rate_rad_per_s"],
        "a_s_provenance": diag["a_s_provenance"],
        "localization": diag["localization"],
        "unit": "Er",
    }
    p1 = out / "derived_params.json"
    _write_json(p1, cfg, payload)
    sol = orbs.solution
    stride = max(1, len(sol.xi) // 2048)
    idx = range(0, len(sol.xi), stride)
    rows = ([_fmt(sol.xi[i]), _fmt(sol.v[i]), _fmt(orbs.uL0[i]),
             _fmt(orbs.uR0[i]), _fmt(orbs.uL1[i]), _fmt(orbs.uR1[i])]
            for i in idx)
    p2 = out / "potential.csv"
    _write_csv(p2, cfg, ["x", "V", "uL0", "uR0", "uL1", "uR1"], rows)
    return [p1, p2]


def run(cfg: dict, out_dir: str | None = None, threads: int = 1,
        verbose: bool = False) -> list[Path]:
    """Dispatch a validated config; returns the list of files written."""
    if "command" not in cfg:
        raise ConfigError("missing field 'command'")
    command = cfg["command"]
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    if "params" in cfg and "potential" in cfg:
        raise ConfigError("fields 'params' and 'potential' are mutually "
                          "exclusive; give exactly the one the command needs")
    out = Path(out_dir if out_dir is not None else cfg.get("out", "out"))
    if verbose:
        print(f"doublewell {__version__}: running '{command}' -> {out}",
              file=sys.stderr)
    if command == "basis":
        return _cmd_basis(cfg, out)
    if command == "spectrum":
        return _cmd_spectrum(cfg, out)
    if command == "sweep-tilt":
        return _sweep_common(cfg, out, "dV", threads)
    if command == "sweep-interaction":
        return _sweep_common(cfg, out, "U0", threads)
    if command == "resonances":
        return _cmd_resonances(cfg, out, threads)
    if command == "thresholds":
        return _cmd_thresholds(cfg, out)
    return _cmd_derive_params(cfg, out)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="doublewell",
        description="Exact diagonalization of bosons in a tilted two-level "
                    "double well: spectra, cat states, resonances, and "
                    "lattice-derived model parameters.")
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--out", default=None, help="output directory "
                        "(overrides the config's 'out')")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("DOUBLEWELL_THREADS", "1")),
                        help="worker threads for sweeps")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: {args.config} is not valid JSON: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG
    if not isinstance(cfg, dict):
        print("config error: top level must be a JSON object", file=sys.stderr)
        return EXIT_CONFIG
    try:
        written = run(cfg, out_dir=args.out, threads=max(args.threads, 1),
                      verbose=args.verbose)
    except (ConfigError, ConfigurationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, DenseCapError, ConvergenceError,
            LocalizationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
