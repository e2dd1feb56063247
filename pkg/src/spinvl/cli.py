"""Scenario runner: JSON configs, figure presets, CSV and manifest output.

A run is described by a versioned JSON config (schema 1) or one of the
built-in presets fig2..fig5.  Every run writes into its output directory

    config.json      the fully resolved configuration that was executed
    trajectory.csv   one row per (t, x): t, x, m3, j, T, h
    residuals.csv    exact continuity defect per (t, x)
    manifest.json    status, wall time, breakdown info, error maxima

with CSV numbers at 17 significant digits so reruns are byte-identical.
Bond quantities (j, T) are blank at x = s, which carries no bond.

Exit codes: 0 run completed (or expected breakdown of a compensate
mode), 2 configuration error, 3 integrator failure, 4 unexpected
breakdown.  The identities subcommand exits 0 only if every identity
check passes.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    BathSpec,
    DephasingSpec,
    IntegratorError,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    StateMonitorError,
    build_engineered,
    propagate_lindblad,
    propagate_unitary,
    pure_state,
    single_site_state,
    uniform_superposition,
)
from .identities import run_identity_suite
from .observables import continuity_residual_rows
from .spinops import ChainSpec, Rep
from .vlsolver import (
    ControlResult,
    RegularizationSpec,
    TargetSpec,
    compensate_bath,
    compensate_dephasing,
    invert_closed,
    invert_open_to_closed,
)

SCHEMA_VERSION = 1
OUT_ENV = "SPINVL_OUT"
CONTINUITY_BAR = 1e-8

MODES = (
    "simulate",
    "invert_closed",
    "mimic_dephasing",
    "compensate_dephasing",
    "compensate_bath",
    "identities",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATOR = 3
EXIT_BREAKDOWN = 4


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending field."""


def _fmt(v: float) -> str:
    return f"{v:.16e}"


# ---------------------------------------------------------------- presets

def preset(name: str) -> dict:
    """Return the parameter set of one of the figure scenarios."""
    base = {
        "schema": SCHEMA_VERSION,
        "deph": {"eta": 0.0},
        "bath": {"epsilon": 0.0, "mu": 0.0},
        "initial": {"kind": "uniform_superposition"},
        "solver": {},
    }
    if name == "fig2":
        return {
            **base,
            "mode": "invert_closed",
            "chain": {"s": 6, "J": -0.25, "K": 0.0},
            "target_chain": {"s": 6, "J": "engineered", "K": 0.0},
            "grid": {"t_end": 6.0, "step": 1e-3},
            "reg": {"alpha": 1e-4, "handle_floor": 1e-9, "max_field": 1e4},
            "backend": "full",
        }
    if name == "fig3":
        return {
            **base,
            "mode": "mimic_dephasing",
            "chain": {"s": 20, "J": -0.25, "K": 0.0},
            "deph": {"eta": 0.01},
            "grid": {"t_end": 50.0, "step": 1e-2},
            "reg": {"alpha": 1e-4, "handle_floor": 1e-6, "max_field": 1e4},
            "backend": "sector",
        }
    if name == "fig4":
        return {
            **base,
            "mode": "compensate_dephasing",
            "chain": {"s": 3, "J": -0.25, "K": 0.0},
            "deph": {"eta": 0.01},
            "grid": {"t_end": 25.0, "step": 1e-3},
            "reg": {"alpha": 1e-4, "handle_floor": 1e-2, "max_field": 1e4},
            "backend": "sector",
        }
    if name == "fig5":
        return {
            **base,
            "mode": "compensate_bath",
            "chain": {"s": 3, "J": -0.25, "K": 0.0},
            "bath": {"epsilon": 0.1, "mu": -1.0},
            "grid": {"t_end": 4.0, "step": 1e-3},
            "reg": {"alpha": 1e-6, "handle_floor": 5e-2, "max_field": 1e4},
            "backend": "full",
        }
    raise ConfigError(f"unknown preset {name!r}; known: fig2, fig3, fig4, fig5")


# ------------------------------------------------------------ validation

def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(extra)}")


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing field {where}.{key}" if where else f"missing field {key}")
    return d[key]


def _couplings(val, s: int, field: str):
    if val == "engineered":
        if field.endswith(".J"):
            return build_engineered(s).J
        raise ConfigError(f"{field}: only J supports the engineered profile")
    if isinstance(val, (int, float)):
        return (float(val),) * (s - 1)
    if isinstance(val, list) and len(val) == s - 1:
        return tuple(float(v) for v in val)
    raise ConfigError(f"{field}: expected a number or a list of {s - 1} values")


def _parse_chain(d: dict, where: str) -> ChainSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(d, {"s", "J", "K"}, where)
    s = _need(d, "s", where)
    if not isinstance(s, int) or s < 2:
        raise ConfigError(f"{where}.s must be an integer >= 2")
    J = _couplings(_need(d, "J", where), s, f"{where}.J")
    K = _couplings(d.get("K", 0.0), s, f"{where}.K")
    return ChainSpec(s, J, K)


def _parse_initial(d: dict, s: int, rep: Rep) -> QuantumState:
    if not isinstance(d, dict):
        raise ConfigError("initial must be an object")
    kind = _need(d, "kind", "initial")
    if kind == "uniform_superposition":
        _reject_unknown(d, {"kind"}, "initial")
        return uniform_superposition(s, rep)
    if kind == "single_site":
        _reject_unknown(d, {"kind", "x"}, "initial")
        x = _need(d, "x", "initial")
        if not isinstance(x, int) or not 1 <= x <= s:
            raise ConfigError(f"initial.x must be a site in 1..{s}")
        return single_site_state(x, s, rep)
    if kind == "amplitudes":
        _reject_unknown(d, {"kind", "re", "im"}, "initial")
        re = np.asarray(_need(d, "re", "initial"), dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape or re.ndim != 1:
            raise ConfigError("initial.re and initial.im must be equal-length lists")
        if len(re) != rep.dim:
            raise ConfigError(
                f"initial amplitudes must have length {rep.dim} for this backend"
            )
        vec = re + 1j * im
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise ConfigError("initial amplitudes must not all vanish")
        return pure_state(vec / norm, rep)
    raise ConfigError(
        "initial.kind must be uniform_superposition, single_site or amplitudes"
    )


def parse_config(raw: dict) -> dict:
    """Validate a raw config dict and normalize it into runnable pieces."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(
        raw,
        {
            "schema", "mode", "chain", "target_chain", "deph", "bath",
            "initial", "grid", "reg", "solver", "backend", "output",
        },
        "config",
    )
    if _need(raw, "schema", "") != SCHEMA_VERSION:
        raise ConfigError(f"schema must be {SCHEMA_VERSION}")
    mode = _need(raw, "mode", "")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")
    if mode == "identities":
        _reject_unknown(raw, {"schema", "mode", "output"}, "config")
        return {"mode": mode, "raw": raw}

    chain = _parse_chain(_need(raw, "chain", ""), "chain")
    s = chain.s

    deph_d = raw.get("deph", {"eta": 0.0})
    _reject_unknown(deph_d, {"eta"}, "deph")
    deph = DephasingSpec(float(deph_d.get("eta", 0.0)))

    bath_d = raw.get("bath", {"epsilon": 0.0, "mu": 0.0})
    _reject_unknown(bath_d, {"epsilon", "mu"}, "bath")
    bath = BathSpec(float(bath_d.get("epsilon", 0.0)), float(bath_d.get("mu", 0.0)))

    grid_d = _need(raw, "grid", "")
    _reject_unknown(grid_d, {"t_end", "step"}, "grid")
    t_end = float(_need(grid_d, "t_end", "grid"))
    step = float(_need(grid_d, "step", "grid"))
    if t_end <= 0 or step <= 0 or step > t_end:
        raise ConfigError("grid.t_end and grid.step must be positive with step <= t_end")
    n = round(t_end / step)
    if abs(n * step - t_end) > 1e-9 * max(1.0, t_end):
        raise ConfigError("grid.step must divide grid.t_end")
    grid = np.linspace(0.0, t_end, n + 1)

    reg_d = raw.get("reg", {})
    _reject_unknown(reg_d, {"alpha", "handle_floor", "max_field"}, "reg")
    try:
        reg = RegularizationSpec(
            alpha=float(reg_d.get("alpha", 1e-4)),
            handle_floor=float(reg_d.get("handle_floor", 1e-6)),
            max_field=float(reg_d.get("max_field", 1e3)),
        )
    except ValueError as exc:
        raise ConfigError(f"reg: {exc}") from exc

    solver_d = raw.get("solver", {})
    _reject_unknown(
        solver_d,
        {"tracking_gain", "restore_gain", "corrector_sweeps", "gauge"},
        "solver",
    )
    solver = dict(solver_d)
    if "corrector_sweeps" in solver:
        if not isinstance(solver["corrector_sweeps"], int) or solver["corrector_sweeps"] < 1:
            raise ConfigError("solver.corrector_sweeps must be a positive integer")
    if solver.get("gauge", "first") not in ("first", "last"):
        raise ConfigError("solver.gauge must be 'first' or 'last'")

    backend = raw.get("backend", "full")
    if backend not in ("full", "sector"):
        raise ConfigError("backend must be 'full' or 'sector'")
    if backend == "full" and s > 10:
        raise ConfigError(f"backend 'full' is limited to s <= 10 (got s={s})")
    if bath.epsilon > 0 and backend != "full":
        raise ConfigError("compensate_bath requires backend 'full'")
    rep = Rep.full(s) if backend == "full" else Rep.sector(s, 1)

    initial = _parse_initial(raw.get("initial", {"kind": "uniform_superposition"}), s, rep)

    target_chain = None
    if mode == "invert_closed":
        target_chain = _parse_chain(_need(raw, "target_chain", ""), "target_chain")
        if target_chain.s != s:
            raise ConfigError("target_chain.s must match chain.s")
    elif "target_chain" in raw:
        raise ConfigError(f"target_chain is only valid for mode invert_closed")

    if mode == "mimic_dephasing" and deph.eta < 0:
        raise ConfigError("mimic_dephasing requires deph.eta >= 0")
    if mode == "compensate_dephasing" and deph.eta <= 0:
        raise ConfigError("compensate_dephasing requires deph.eta > 0")
    if mode == "compensate_bath" and bath.epsilon <= 0:
        raise ConfigError("compensate_bath requires bath.epsilon > 0")
    if mode in ("simulate", "invert_closed") and (deph.eta > 0 or bath.epsilon > 0):
        raise ConfigError(f"{mode} is a closed-chain mode; set eta and epsilon to 0")

    return {
        "mode": mode,
        "chain": chain,
        "target_chain": target_chain,
        "deph": deph,
        "bath": bath,
        "initial": initial,
        "grid": grid,
        "reg": reg,
        "solver": solver,
        "backend": backend,
        "raw": raw,
    }


# ------------------------------------------------------------- execution

def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_trajectory(path: Path, traj) -> None:
    s = traj.s
    lines = ["t,x,m3,j,T,h"]
    for i, t in enumerate(traj.grid):
        ts = _fmt(float(t))
        for x in range(1, s + 1):
            if x < s:
                jcol = _fmt(float(traj.j[i, x]))
                tcol = _fmt(float(traj.kinetic[i, x - 1]))
            else:
                jcol = tcol = ""
            lines.append(
                f"{ts},{x},{_fmt(float(traj.m3[i, x - 1]))},{jcol},{tcol},"
                f"{_fmt(float(traj.h[i, x - 1]))}"
            )
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_residuals(path: Path, grid, rows) -> float:
    lines = ["t,x,residual"]
    for i, t in enumerate(grid):
        ts = _fmt(float(t))
        for x in range(rows.shape[1]):
            lines.append(f"{ts},{x + 1},{_fmt(float(rows[i, x]))}")
    _write_atomic(path, "\n".join(lines) + "\n")
    return float(np.max(np.abs(rows))) if rows.size else 0.0


def _deviation(got: np.ndarray, ref: np.ndarray) -> float | None:
    """Max abs difference over the completed nodes; None if nothing ran."""
    n = min(len(got), len(ref))
    if n == 0:
        return None
    return float(np.abs(got[:n] - ref[:n]).max())


def run_scenario(cfg: dict, out_dir: Path) -> dict:
    """Execute one parsed config; returns the manifest dict."""
    out_dir.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    mode = cfg["mode"]
    status = "completed"
    breakdown = None
    metrics = {}

    if mode == "identities":
        checks = run_identity_suite()
        lines = ["name,samples,max_error,tolerance,passed"]
        for c in checks:
            lines.append(f"{c.name},{c.samples},{c.max_error:.3e},{c.tolerance:.1e},{c.passed}")
        _write_atomic(out_dir / "identities.csv", "\n".join(lines) + "\n")
        ok = all(c.passed for c in checks)
        manifest = {
            "schema": SCHEMA_VERSION,
            "tool": "spinvl",
            "version": __version__,
            "mode": mode,
            "status": "completed" if ok else "failed",
            "wall_seconds": round(time.perf_counter() - t_start, 3),
            "checks": [
                {
                    "name": c.name,
                    "max_error": float(c.max_error),
                    "tolerance": float(c.tolerance),
                    "passed": bool(c.passed),
                }
                for c in checks
            ],
            "config": cfg["raw"],
        }
        _write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
        return manifest

    chain = cfg["chain"]
    deph = cfg["deph"]
    bath = cfg["bath"]
    initial = cfg["initial"]
    grid = cfg["grid"]
    reg = cfg["reg"]
    solver = cfg["solver"]

    result: ControlResult | None = None
    if mode == "simulate":
        if initial.is_pure and deph.eta == 0 and bath.epsilon == 0:
            traj = propagate_unitary(initial, chain, None, grid)
        else:
            traj = propagate_lindblad(initial.to_density(), chain, None, deph, bath, grid)
        res_deph, res_bath = deph, bath
    elif mode == "invert_closed":
        target = propagate_unitary(initial, cfg["target_chain"], None, grid,
                                   record_states=False)
        result = invert_closed(TargetSpec.from_trajectory(target), chain, initial,
                               grid, reg, **solver)
        metrics["m3_deviation_max"] = _deviation(result.trajectory.m3, target.m3)
        res_deph, res_bath = NO_DEPHASING, NO_BATH
    elif mode == "mimic_dephasing":
        rho0 = initial.to_density()
        target = propagate_lindblad(rho0, chain, None, deph, NO_BATH, grid,
                                    record_states=False)
        result = invert_open_to_closed(TargetSpec.from_trajectory(target), chain,
                                       rho0, grid, reg, **solver)
        metrics["m3_deviation_max"] = _deviation(result.trajectory.m3, target.m3)
        res_deph, res_bath = NO_DEPHASING, NO_BATH
    elif mode == "compensate_dephasing":
        result = compensate_dephasing(chain, deph.eta, initial, grid, reg, **solver)
        res_deph, res_bath = deph, NO_BATH
    elif mode == "compensate_bath":
        result = compensate_bath(chain, bath.epsilon, bath.mu, initial, grid, reg,
                                 **solver)
        res_deph, res_bath = NO_DEPHASING, bath
    else:
        raise ConfigError(f"unhandled mode {mode}")

    if result is not None:
        traj = result.trajectory
        status = result.status
        metrics["max_tracking_error"] = result.max_tracking_error
        if result.breakdown is not None:
            bd = result.breakdown
            breakdown = {
                "time": bd.time,
                "site": bd.site,
                "handle": None if np.isnan(bd.handle) else bd.handle,
                "kinetic_energy": None if np.isnan(bd.handle) else bd.kinetic_energy,
                "step": bd.step,
                "reason": bd.reason,
            }
        if mode in ("compensate_dephasing", "compensate_bath"):
            ref = result.target.trajectory
            if mode == "compensate_bath" and chain.s > 2:
                # baths legitimately pull the boundary sites off the closed
                # reference; only the interior comparison is meaningful
                metrics["m3_deviation_interior_max"] = _deviation(
                    traj.m3[:, 1:-1], ref.m3[:, 1:-1]
                )
            else:
                metrics["m3_deviation_max"] = _deviation(traj.m3, ref.m3)

    _write_trajectory(out_dir / "trajectory.csv", traj)
    rows = continuity_residual_rows(traj, res_deph, res_bath)
    cont_max = _write_residuals(out_dir / "residuals.csv", traj.grid, rows)

    manifest = {
        "schema": SCHEMA_VERSION,
        "tool": "spinvl",
        "version": __version__,
        "mode": mode,
        "status": status,
        "wall_seconds": round(time.perf_counter() - t_start, 3),
        "nodes_completed": len(traj.grid),
        "breakdown": breakdown,
        "continuity_max": cont_max,
        "continuity_ok": bool(cont_max <= CONTINUITY_BAR),
        **metrics,
        "config": cfg["raw"],
    }
    _write_atomic(out_dir / "config.json", json.dumps(cfg["raw"], indent=2) + "\n")
    _write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return manifest


def _exit_code(mode: str, manifest: dict) -> int:
    if manifest["status"] == "completed":
        return EXIT_OK
    if mode in ("compensate_dephasing", "compensate_bath"):
        return EXIT_OK  # breakdown is the expected terminal state
    if manifest["status"] == "failed":
        return 1
    return EXIT_BREAKDOWN


def _run_one(raw: dict, out_dir: str) -> tuple[int, str]:
    """Worker-safe single run; returns (exit_code, summary line)."""
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        return EXIT_CONFIG, f"config error: {exc}"
    try:
        manifest = run_scenario(cfg, Path(out_dir))
    except (IntegratorError, StateMonitorError) as exc:
        return EXIT_INTEGRATOR, f"integrator failure: {exc}"
    except (ConfigError, ValueError) as exc:
        return EXIT_CONFIG, f"config error: {exc}"
    line = f"{cfg['mode']}: {manifest['status']} ({out_dir})"
    if manifest.get("breakdown"):
        bd = manifest["breakdown"]
        line += f" t_break={bd['time']:g} site={bd['site']}"
    return _exit_code(cfg["mode"], manifest), line


# ------------------------------------------------------------------ main

def _load_config_file(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")


def _apply_overrides(raw: dict, args) -> dict:
    raw = copy.deepcopy(raw)
    if args.alpha is not None:
        raw.setdefault("reg", {})["alpha"] = args.alpha
    if args.step is not None:
        raw.setdefault("grid", {})["step"] = args.step
    if getattr(args, "sector", False):
        raw["backend"] = "sector"
    return raw


MODE_FAMILY = {
    "simulate": ("simulate",),
    "invert": ("invert_closed", "mimic_dephasing"),
    "compensate": ("compensate_dephasing", "compensate_bath"),
}


def _gather_runs(args, family: tuple) -> list[tuple[dict, str]]:
    """Collect (raw config, run name) pairs from --config/--preset flags."""
    runs = []
    for name in args.preset or []:
        raw = preset(name)
        if raw["mode"] not in family:
            raise ConfigError(
                f"preset {name} has mode {raw['mode']}, not one of {family}"
            )
        runs.append((_apply_overrides(raw, args), name))
    for path in args.config or []:
        raw = _load_config_file(path)
        mode = raw.get("mode")
        if mode not in family:
            raise ConfigError(f"config {path} has mode {mode!r}, not one of {family}")
        runs.append((_apply_overrides(raw, args), Path(path).stem))
    if not runs:
        raise ConfigError("provide --preset NAME or --config PATH")
    seen: dict = {}
    named = []
    for raw, name in runs:
        seen[name] = seen.get(name, 0) + 1
        named.append((raw, name if seen[name] == 1 else f"{name}-{seen[name]}"))
    return named


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV, "spinvl-runs"))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", action="append", metavar="PATH",
                   help="JSON scenario config (repeatable)")
    p.add_argument("--preset", action="append", metavar="NAME",
                   help="built-in scenario fig2..fig5 (repeatable)")
    p.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./spinvl-runs)")
    p.add_argument("--alpha", type=float, help="override reg.alpha")
    p.add_argument("--step", type=float, help="override grid.step")
    p.add_argument("--sector", action="store_true",
                   help="force the single-excitation sector backend")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="run multiple configs/presets concurrently")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spinvl",
        description="Open spin-chain dynamics and control-field inversion runner.",
    )
    ap.add_argument("--version", action="version", version=f"spinvl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd, blurb in (
        ("simulate", "propagate a chain and record the trajectory"),
        ("invert", "reconstruct fields forcing a target evolution"),
        ("compensate", "reconstruct fields fighting a dissipator until breakdown"),
    ):
        p = sub.add_parser(cmd, help=blurb)
        _add_run_flags(p)
    p = sub.add_parser("identities", help="run the operator/trace identity suite")
    p.add_argument("--out", metavar="DIR", help="also write identities.csv and manifest")
    p = sub.add_parser("preset", help="print a preset config as JSON")
    p.add_argument("name", help="fig2, fig3, fig4 or fig5")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "preset":
        try:
            print(json.dumps(preset(args.name), indent=2))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    if args.command == "identities":
        checks = run_identity_suite()
        for c in checks:
            print(c)
        ok = all(c.passed for c in checks)
        if args.out:
            run_scenario({"mode": "identities", "raw": {"schema": SCHEMA_VERSION,
                                                        "mode": "identities"}},
                         Path(args.out))
        return EXIT_OK if ok else 1

    try:
        runs = _gather_runs(args, MODE_FAMILY[args.command])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    root = _out_root(args)
    if len(runs) == 1:
        raw, _ = runs[0]
        code, line = _run_one(raw, str(root))
        print(line, file=sys.stdout if code == EXIT_OK else sys.stderr)
        return code

    jobs = max(1, args.jobs)
    codes = []
    if jobs == 1:
        outcomes = [_run_one(raw, str(root / name)) for raw, name in runs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_one, raw, str(root / name)) for raw, name in runs]
            outcomes = [f.result() for f in futures]
    for (code, line), (_, name) in zip(outcomes, runs):
        print(f"[{name}] {line}", file=sys.stdout if code == EXIT_OK else sys.stderr)
        codes.append(code)
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
