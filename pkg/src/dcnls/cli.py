"""Config-driven experiment runner.

Every run is described by an INI file with a [run] section naming the
command plus per-command sections, is validated against a fixed schema
(unknown sections or keys are rejected), and writes its outputs into a
single directory together with a manifest.  All numeric outputs are
deterministic: rerunning the same config and seed reproduces them
bit-for-bit.  Each delimited output carries the config hash in a comment
line; the manifest is the only file allowed to differ between reruns
(it records the wall time).

Exit codes: 0 success, 2 config error, 3 solver failure, 4 a scan that
produced only undecided verdicts.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import fieldio
from . import ground_states as gs
from . import dynamics as dy
from . import mei as mei_mod
from . import profiles as pf
from .errors import AmbiguityError, DomainError, NoSolutionError, PreconditionError, SolverError
from .functionals import Regime, evaluate
from .grids import BoxField, BoxGrid, RadialField, RadialGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_UNDECIDED = 4

_VERSION = "0.1.0"

_SOLVER_ERRORS = (SolverError, NoSolutionError, AmbiguityError, PreconditionError)


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

# key -> (type tag, default); required keys have default None
_RUN_KEYS = {
    "command": ("str", None),
    "seed": ("int", 0),
    "output_dir": ("str", "out"),
    "figures": ("bool", False),
}

_GRID_KEYS = {
    "kind": ("str", "box"),      # box | radial
    "n": ("int", 64),
    "box_half_width": ("float", 8.0),
    "r_max": ("float", 60.0),
}

_SOLVER_KEYS = {
    "dt": ("float", None),
    "t_end": ("float", None),
    "scheme": ("str", "strang"),
    "dealias": ("bool", True),
    "checkpoint_every": ("int", 10),
    "adaptive": ("bool", False),
    "virial_radius": ("float", 0.0),  # 0 means default
}

_DATA_KEYS = {
    "family": ("str", "gaussian"),
    "amplitude": ("float", 1.0),
    "width": ("float", 1.0),
}

_SCHEMA = {
    "ground-state": {
        "ground-state": {
            "kind": ("str", None),  # Q | W | soliton
            "omega": ("float", 1.0),
            "regime": ("str", "FF"),
            "r_max": ("float", 60.0),
            "n": ("int", 8192),
        },
    },
    "mc-curve": {
        "mc-curve": {
            "n_samples": ("int", 8),
            "c_lo_frac": ("float", 0.05),
            "c_hi_frac": ("float", 0.95),
            "n_sweep": ("int", 17),
            "amp_max": ("float", 64.0),
        },
    },
    "gamma-curve": {
        "gamma-curve": {
            "c_fracs": ("str", "0.5,1.0,2.0"),
        },
    },
    "evolve": {
        "regime": {"code": ("str", None)},
        "grid": _GRID_KEYS,
        "solver": _SOLVER_KEYS,
        "data": _DATA_KEYS,
    },
    "classify": {
        "regime": {"code": ("str", None)},
        "grid": _GRID_KEYS,
        "solver": _SOLVER_KEYS,
        "data": _DATA_KEYS,
        "classify": {
            "curve_csv": ("str", ""),
            "eps_scatter": ("float", 1e-2),
        },
    },
    "scan": {
        "regime": {"code": ("str", None)},
        "grid": _GRID_KEYS,
        "solver": _SOLVER_KEYS,
        "data": _DATA_KEYS,
        "scan": {
            "amp_lo": ("float", None),
            "amp_hi": ("float", None),
            "n_bisect": ("int", 8),
            "eps_scatter": ("float", 1e-2),
            "curve_csv": ("str", ""),
        },
    },
    "profile-decomp": {
        "profile-decomp": {
            "n_indices": ("int", 8),
            "separation_step": ("float", 1.2),
            "noise": ("float", 0.0),
            "k_max": ("int", 3),
            "eps_stop": ("float", 0.06),
            "theta": ("float", 0.5),
            "box_half_width": ("float", 16.0),
            "n": ("int", 64),
        },
    },
    "mei-map": {
        "mei-map": {
            "regime": ("str", None),
            "c_min": ("float", 0.0),
            "c_max": ("float", 0.0),   # 0 means 1.2 M(Q)
            "n_c": ("int", 40),
            "h_min": ("float", 0.0),
            "h_max": ("float", 0.0),   # 0 means 1.2 H*(W)
            "n_h": ("int", 40),
            "curve_csv": ("str", ""),
        },
    },
}

_COMMANDS = tuple(_SCHEMA) + ("validate",)


def _convert(raw: str, tag: str, where: str):
    try:
        if tag == "int":
            return int(raw)
        if tag == "float":
            return float(raw)
        if tag == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {tag}") from None


def load_config(path: str | Path) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path} not found or unreadable")
    if "run" not in parser:
        raise ConfigError("missing [run] section")
    out = {"run": {}}
    for key, (tag, default) in _RUN_KEYS.items():
        if key in parser["run"]:
            out["run"][key] = _convert(parser["run"][key], tag, f"run.{key}")
        elif default is not None or key != "command":
            out["run"][key] = default
        else:
            raise ConfigError("run.command is required")
    for key in parser["run"]:
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown key run.{key}")
    command = out["run"]["command"]
    if command not in _SCHEMA:
        raise ConfigError(
            f"unknown command {command!r}; expected one of {sorted(_SCHEMA)}"
        )
    schema = _SCHEMA[command]
    for section in parser.sections():
        if section == "run":
            continue
        if section not in schema:
            raise ConfigError(f"section [{section}] not allowed for {command}")
    for section, keys in schema.items():
        out[section] = {}
        present = parser[section] if section in parser else {}
        for key in present:
            if key not in keys:
                raise ConfigError(f"unknown key {section}.{key}")
        for key, (tag, default) in keys.items():
            if key in present:
                out[section][key] = _convert(present[key], tag, f"{section}.{key}")
            elif default is not None:
                out[section][key] = default
            else:
                raise ConfigError(f"{section}.{key} is required for {command}")
    _POSITIVE = {
        "dt", "t_end", "n", "box_half_width", "r_max", "width",
        "n_samples", "n_sweep", "amp_max", "n_bisect", "n_c", "n_h",
        "n_indices", "k_max", "eps_stop", "theta", "checkpoint_every",
        "eps_scatter", "separation_step",
    }
    for section, values in out.items():
        for key, val in values.items():
            if key in _POSITIVE and isinstance(val, (int, float)) and val <= 0:
                raise ConfigError(f"{section}.{key} must be positive, got {val}")
    # environment overrides: output directory and thread count only
    env_dir = os.environ.get("DCNLS_OUTPUT_DIR")
    if env_dir:
        out["run"]["output_dir"] = env_dir
    threads = os.environ.get("DCNLS_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = threads
    return out


def config_hash(cfg: dict) -> str:
    lines = []
    for section in sorted(cfg):
        for key in sorted(cfg[section]):
            if section == "run" and key == "output_dir":
                continue  # relocating outputs must not change their content
            lines.append(f"{section}.{key}={cfg[section][key]!r}")
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    return digest[:16]


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows: list[list], chash: str) -> None:
    lines = [f"# config_hash={chash}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path: Path, payload: dict, chash: str) -> None:
    payload = dict(payload)
    payload["config_hash"] = chash
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")


def load_curve_csv(path: str) -> "CurveFromCsv":
    p = Path(path)
    if not p.exists():
        raise ConfigError(
            f"threshold-curve file {path} not found; run the mc-curve command first"
        )
    cs, vs = [], []
    for line in p.read_text().splitlines():
        if line.startswith("#") or line.startswith("c,") or not line.strip():
            continue
        parts = line.split(",")
        cs.append(float(parts[0]))
        vs.append(float(parts[1]))
    if len(cs) < 2:
        raise ConfigError(f"{path}: fewer than two curve samples")
    return CurveFromCsv(np.asarray(cs), np.asarray(vs))


class CurveFromCsv:
    def __init__(self, c: np.ndarray, v: np.ndarray):
        order = np.argsort(c)
        self.c = c[order]
        self.v = v[order]

    def interpolate(self, c: float) -> float:
        if not (self.c[0] <= c <= self.c[-1]):
            raise DomainError(f"mass {c:.6g} outside the sampled curve range")
        return float(np.interp(c, self.c, self.v))


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------

def _build_field(cfg: dict):
    grid_cfg, data_cfg = cfg["grid"], cfg["data"]
    if data_cfg["family"] != "gaussian":
        raise ConfigError(f"unknown data family {data_cfg['family']!r}")
    amp, width = data_cfg["amplitude"], data_cfg["width"]
    if grid_cfg["kind"] == "box":
        grid = BoxGrid(3, grid_cfg["box_half_width"], grid_cfg["n"])
        xs = grid.coords()
        r2 = sum(x**2 for x in xs)
        return BoxField(grid, amp * np.exp(-r2 / (2.0 * width**2)).astype(complex))
    if grid_cfg["kind"] == "radial":
        grid = RadialGrid(3, grid_cfg["r_max"], grid_cfg["n"])
        return RadialField(
            grid, amp * np.exp(-grid.nodes**2 / (2.0 * width**2)).astype(complex)
        )
    raise ConfigError(f"unknown grid kind {grid_cfg['kind']!r}")


def _gaussian_family(cfg: dict):
    base = _build_field(cfg)

    def family(amp: float):
        scale = amp / cfg["data"]["amplitude"]
        return type(base)(base.grid, scale * base.values)

    return family


def _solver_config(cfg: dict) -> dy.SolverConfig:
    s = cfg["solver"]
    return dy.SolverConfig(
        dt=s["dt"],
        t_end=s["t_end"],
        scheme=s["scheme"],
        dealias=s["dealias"],
        adapt=dy.AdaptConfig() if s["adaptive"] else None,
        checkpoint_every=s["checkpoint_every"],
        virial_radius=s["virial_radius"] if s["virial_radius"] > 0 else None,
    )


def _regime(cfg: dict) -> Regime:
    return Regime.from_code(cfg["regime"]["code"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_ground_state(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    c = cfg["ground-state"]
    grid = RadialGrid(3, c["r_max"], c["n"])
    kind = c["kind"].strip()
    if kind == "Q":
        state = gs.solve_Q(grid)
    elif kind == "W":
        state = gs.aubin_talenti(grid)
    elif kind == "soliton":
        state = gs.solve_soliton(c["omega"], Regime.from_code(c["regime"]), grid=grid)
    else:
        raise ConfigError(f"ground-state.kind must be Q, W or soliton, got {kind!r}")
    u = state.field
    rep = evaluate(u, state.regime if state.regime is not None else Regime.from_code("FF"))
    rows = [[r, v.real, v.imag] for r, v in zip(grid.nodes, u.values)]
    write_csv(outdir / "ground_state.csv", ["r", "re", "im"], rows, chash)
    fieldio.write_field(outdir / "ground_state.dcnf", u)
    write_json(
        outdir / "ground_state.json",
        {
            "kind": kind,
            "omega": state.omega,
            "mass": rep.mass,
            "hamiltonian": rep.hamiltonian,
            "virial_K": rep.virial_K,
            "residual_ode": state.residual_ode,
            "pohozaev": list(state.pohozaev),
        },
        chash,
    )
    outputs = ["ground_state.csv", "ground_state.dcnf", "ground_state.json"]
    if figures:
        from . import plots

        plots.save_profile(outdir / "ground_state.png", grid.nodes, u.values)
        outputs.append("ground_state.png")
    return outputs


def _cmd_mc_curve(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    c = cfg["mc-curve"]
    if c["n_samples"] < 1:
        raise ConfigError("mc-curve.n_samples must be at least 1")
    mq = gs.critical_mass(3)
    fracs = np.linspace(c["c_lo_frac"], c["c_hi_frac"], c["n_samples"])
    curve = gs.mc_curve(
        [f * mq for f in fracs], n_sweep=c["n_sweep"], amp_max=c["amp_max"]
    )
    rows = [
        [s.c, s.c / mq, s.value, s.omega, s.residual_ode, *s.pohozaev]
        for s in curve.samples
    ]
    write_csv(
        outdir / "mc_curve.csv",
        ["c", "c_frac", "m_c", "omega", "residual_ode", "poho1", "poho2", "poho3"],
        rows,
        chash,
    )
    outputs = ["mc_curve.csv"]
    if figures:
        from . import plots

        plots.save_curve(
            outdir / "mc_curve.png",
            np.array([s.c for s in curve.samples]),
            np.array([s.value for s in curve.samples]),
            "mass c",
            "m_c",
        )
        outputs.append("mc_curve.png")
    return outputs


def _cmd_gamma_curve(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    fracs = [float(x) for x in cfg["gamma-curve"]["c_fracs"].split(",") if x.strip()]
    if not fracs:
        raise ConfigError("gamma-curve.c_fracs must list at least one value")
    mq = gs.critical_mass(3)
    curve = gs.gamma_curve([f * mq for f in fracs])
    rows = [[s.c, s.c / mq, s.value, s.omega] for s in curve.samples]
    write_csv(
        outdir / "gamma_curve.csv", ["c", "c_frac", "gamma_c", "omega"], rows, chash
    )
    outputs = ["gamma_curve.csv"]
    if figures:
        from . import plots

        plots.save_curve(
            outdir / "gamma_curve.png",
            np.array([s.c for s in curve.samples]),
            np.array([s.value for s in curve.samples]),
            "mass c",
            "gamma_c",
        )
        outputs.append("gamma_curve.png")
    return outputs


def _cmd_evolve(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    u0 = _build_field(cfg)
    regime = _regime(cfg)
    traj = dy.evolve(u0, regime, _solver_config(cfg))
    keys = [k for k in traj.series if k != "momentum"]
    header = ["t"] + keys + ["px", "py", "pz"]
    mom = np.asarray(traj.series["momentum"])
    rows = []
    for i, t in enumerate(traj.times):
        rows.append([t] + [traj.series[k][i] for k in keys] + list(mom[i]))
    write_csv(outdir / "series.csv", header, rows, chash)
    if traj.snapshots:
        fieldio.write_field(outdir / "final.dcnf", traj.snapshots[-1])
    rep = dy.conservation_report(traj)
    write_json(
        outdir / "conservation.json",
        {
            "mass_drift": rep.mass_drift,
            "energy_drift": rep.energy_drift,
            "momentum_drift": rep.momentum_drift,
            "meta": {k: v for k, v in traj.meta.items()},
        },
        chash,
    )
    outputs = ["series.csv", "conservation.json"]
    if traj.snapshots:
        outputs.insert(1, "final.dcnf")
    if figures:
        from . import plots

        plots.save_series(outdir / "series.png", traj.times, traj.series)
        outputs.append("series.png")
    return outputs


def _cmd_classify(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    regime = _regime(cfg)
    curve_path = cfg["classify"]["curve_csv"]
    m_threshold = None
    if regime.code == "FF":
        if not curve_path:
            raise ConfigError(
                "FF classification needs classify.curve_csv (output of mc-curve)"
            )
        curve = load_curve_csv(curve_path)
        u0 = _build_field(cfg)
        m_threshold = curve.interpolate(u0.norm_sq())
    u0 = _build_field(cfg)
    result = dy.classify(
        u0,
        regime,
        _solver_config(cfg),
        m_threshold=m_threshold,
        eps_scatter=cfg["classify"]["eps_scatter"],
    )
    write_json(
        outdir / "classification.json",
        {
            "verdict": result.verdict,
            "regime": regime.code,
            "m_threshold": m_threshold,
            "evidence": result.evidence,
        },
        chash,
    )
    return ["classification.json"]


def _cmd_scan(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    regime = _regime(cfg)
    c = cfg["scan"]
    curve = load_curve_csv(c["curve_csv"]) if c["curve_csv"] else None
    family = _gaussian_family(cfg)
    try:
        report = dy.threshold_scan(
            family,
            c["amp_lo"],
            c["amp_hi"],
            regime,
            _solver_config(cfg),
            curve=curve,
            n_bisect=c["n_bisect"],
            eps_scatter=c["eps_scatter"],
        )
    except SolverError as exc:
        # distinguish "nothing but undecided verdicts" from real failure
        write_json(
            outdir / "scan.json",
            {"error": str(exc), "regime": regime.code},
            chash,
        )
        if "undecided" in str(exc):
            raise _UndecidedScan(str(exc)) from exc
        raise
    write_json(
        outdir / "scan.json",
        {
            "regime": regime.code,
            "critical_amp": report.critical_amp,
            "k_sign_amp": report.k_sign_amp,
            "h_threshold_amp": report.h_threshold_amp,
            "verdicts": [[a, v] for a, v in report.verdicts],
        },
        chash,
    )
    return ["scan.json"]


class _UndecidedScan(Exception):
    pass


def _cmd_profile_decomp(cfg, outdir: Path, chash: str, figures: bool, seed: int) -> list[str]:
    c = cfg["profile-decomp"]
    grid = BoxGrid(3, c["box_half_width"], c["n"])
    seq, truth_a, truth_b = pf.synthetic_two_bubble(
        grid,
        n_idx=c["n_indices"],
        sep_step=c["separation_step"],
        noise=c["noise"],
        seed=seed,
    )
    dec = pf.double_track_decompose(
        seq,
        k_max=c["k_max"],
        eps_stop=c["eps_stop"],
        theta=c["theta"],
        window=(0.0, 0.5),
        n_t=9,
    )
    payload = {
        "tracks": dec.tracks,
        "stalled": dec.stalled,
        "norm_history": [[a, b] for a, b in dec.norm_history],
        "profiles": [
            {
                "scores": bub.scores,
                "params": [
                    {
                        "t": p.t,
                        "x0": p.x0,
                        "xi": p.xi,
                        "lambda": p.lam,
                        "track": p.track,
                    }
                    for p in bub.params
                ],
            }
            for bub in dec.profiles
        ],
    }
    if dec.profiles:
        rep = pf.decoupling_report(dec, seq, Regime.from_code("FF"))
        payload["decoupling"] = {
            "l2": rep.l2_residual,
            "h1": rep.h1_residual,
            "hamiltonian": rep.h_residual,
            "virial": rep.k_residual,
            "scale": rep.h1_scale,
        }
    write_json(outdir / "decomposition.json", payload, chash)
    return ["decomposition.json"]


def _cmd_mei_map(cfg, outdir: Path, chash: str, figures: bool) -> list[str]:
    c = cfg["mei-map"]
    regime = Regime.from_code(c["regime"])
    mq = gs.critical_mass(3)
    hs = gs.hstar_w(3)
    if regime.code == "FF":
        if not c["curve_csv"]:
            raise ConfigError("FF mei-map needs mei-map.curve_csv (output of mc-curve)")
        curve = load_curve_csv(c["curve_csv"])
        region = mei_mod.region_for(
            regime, m_crit=mq, h_crit=hs, curve_c=curve.c, curve_h=curve.v
        )
    else:
        region = mei_mod.region_for(regime, m_crit=mq, h_crit=hs)
    c_max = c["c_max"] if c["c_max"] > 0 else 1.2 * mq
    h_max = c["h_max"] if c["h_max"] > 0 else 1.2 * hs
    c_axis = np.linspace(c["c_min"], c_max, c["n_c"])
    h_axis = np.linspace(c["h_min"], h_max, c["n_h"])
    rows = []
    values = np.empty((len(c_axis), len(h_axis)))
    for i, cc in enumerate(c_axis):
        for j, hh in enumerate(h_axis):
            v = mei_mod.mei_value(float(cc), float(hh), region)
            values[i, j] = v.value
            rows.append([cc, hh, v.value if np.isfinite(v.value) else np.inf, v.distance])
    write_csv(outdir / "mei_map.csv", ["c", "h", "D", "distance"], rows, chash)
    outputs = ["mei_map.csv"]
    if figures:
        from . import plots

        plots.save_heatmap(outdir / "mei_map.png", c_axis, h_axis, values)
        outputs.append("mei_map.png")
    return outputs


def _cmd_validate(cfg: dict) -> int:
    """Dry run: the schema has already been checked by load_config; report
    resource estimates for the configured command."""
    command = cfg["run"]["command"]
    print(f"config valid for command {command}")
    if "solver" in cfg:
        s = cfg["solver"]
        steps = int(np.ceil(s["t_end"] / s["dt"]))
        print(f"estimated steps: {steps}")
    if "grid" in cfg:
        g = cfg["grid"]
        if g["kind"] == "box":
            points = g["n"] ** 3
            # solution plus FFT workspace and diagnostics, roughly 6 copies
            mem = 6 * 16 * points / 2**20
            print(f"box points: {points}, estimated working set: {mem:.0f} MiB")
        else:
            print(f"radial points: {g['n']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dcnls",
        description="double-power NLS numerical laboratory",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("config", help="path to the INI experiment config")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        return _cmd_validate(cfg)

    if cfg["run"]["command"] != args.command:
        print(
            f"config error: config names command {cfg['run']['command']!r}, "
            f"invoked as {args.command!r}",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    chash = config_hash(cfg)
    outdir = Path(cfg["run"]["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    figures = cfg["run"]["figures"]
    seed = cfg["run"]["seed"]

    start = time.monotonic()
    partial = False
    exit_code = EXIT_OK
    outputs: list[str] = []
    try:
        if args.command == "ground-state":
            outputs = _cmd_ground_state(cfg, outdir, chash, figures)
        elif args.command == "mc-curve":
            outputs = _cmd_mc_curve(cfg, outdir, chash, figures)
        elif args.command == "gamma-curve":
            outputs = _cmd_gamma_curve(cfg, outdir, chash, figures)
        elif args.command == "evolve":
            outputs = _cmd_evolve(cfg, outdir, chash, figures)
        elif args.command == "classify":
            outputs = _cmd_classify(cfg, outdir, chash, figures)
        elif args.command == "scan":
            outputs = _cmd_scan(cfg, outdir, chash, figures)
        elif args.command == "profile-decomp":
            outputs = _cmd_profile_decomp(cfg, outdir, chash, figures, seed)
        elif args.command == "mei-map":
            outputs = _cmd_mei_map(cfg, outdir, chash, figures)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _UndecidedScan as exc:
        print(f"scan undecided: {exc}", file=sys.stderr)
        outputs = ["scan.json"]
        partial = True
        exit_code = EXIT_UNDECIDED
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        partial = True
        exit_code = EXIT_SOLVER

    manifest = {
        "command": args.command,
        "config_hash": chash,
        "artifact_version": _VERSION,
        "wall_time_s": time.monotonic() - start,
        "outputs": outputs,
        "partial": partial,
    }
    (outdir / "run.json").write_text(
        json.dumps(_jsonable(manifest), sort_keys=True, indent=2) + "\n"
    )
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
