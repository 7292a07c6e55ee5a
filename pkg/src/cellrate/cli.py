"""Command-line driver: closed-form sweeps, simulations and figure presets.

Every command writes UTF-8 CSV data files and a ``manifest.json`` into
``--out-dir``. The manifest echoes the fully resolved configuration, so
``cellrate replay <manifest>`` regenerates byte-identical data files.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotic import (AsymptoticParams, mean_se_hex_density, mean_se_hex_insufficient,
                         mean_se_hex_sufficient, mean_se_ppp, noise_to_sigma2, se_from_beta,
                         sinr_approx, solve_fixed_point)
from .errors import NumericalError
from .geometry import hex_spacing
from .montecarlo import DEFAULT_TRIALS, LAYOUTS, ExperimentConfig, run_experiment, summarize
from .powerctl import PowerControl, PowerDistribution, transmit_power

SCHEMA_VERSION = "1"
FORMULAS = ("eq8", "eq13", "eq16", "eq21", "eq23", "eq24", "fixed-point")
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

DEFAULTS = {
    "layout": "hex",
    "alpha": 4.0,
    "rho_w": 1e-3,
    "rel_density": 0.2,
    "n": "1,2,4,8,16",
    "trials": None,
    "pm_watts": math.inf,
    "target_snr_db": 30.0,
    "noise_watts": 1e-15,
    "gt": 1e-5,
    "seed": 0,
    "outage_probs": "0.05,0.25,0.5",
    "n_nodes": 4000,
    "se_threshold": 1.0,
    "formula": "eq13",
    "form": "consistent",
    "r1": None,
    "p1": None,
    "c": None,
    "sigma2": None,
}

SE_UNITS = "# units: n_antennas in antennas; all other columns in b/s/Hz"
REL_DENSITY_WARN = 1.0


class UsageError(Exception):
    pass


# -- parsing helpers ---------------------------------------------------------

def parse_n(text) -> tuple[int, ...]:
    """Antenna sweep: comma list of integers and inclusive ``a..b`` ranges."""
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise UsageError(f"empty antenna range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise UsageError("antenna counts must be positive integers")
    return tuple(sorted(set(out)))


def parse_probs(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        probs = tuple(float(v) for v in text)
    else:
        probs = tuple(float(v) for v in str(text).split(",") if v.strip())
    if not probs or any(not 0 < p < 1 for p in probs):
        raise UsageError("outage probabilities must lie in (0, 1)")
    return probs


def _float(text) -> float:
    return float(text)   # accepts "inf"


def outage_column(p: float) -> str:
    pct = p * 100
    label = f"{round(pct):02d}" if abs(pct - round(pct)) < 1e-9 else f"{pct:g}".replace(".", "_")
    return f"outage_p{label}"


def fmt(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _read_config(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[cellrate]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}") from None
    out = {}
    for key, value in parser["cellrate"].items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        out[key] = value
    return out


_CASTS = {
    "alpha": _float, "rho_w": _float, "rel_density": _float, "trials": int,
    "pm_watts": _float, "target_snr_db": _float, "noise_watts": _float, "gt": _float,
    "seed": int, "n_nodes": int, "se_threshold": _float, "r1": _float, "p1": _float,
    "c": _float, "sigma2": _float,
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config file over defaults into a plain dict."""
    file_values = _read_config(args.config) if getattr(args, "config", None) else {}
    opts = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None:
            value = file_values.get(key, default)
        if value is not None and key in _CASTS:
            try:
                value = _CASTS[key](value)
            except ValueError:
                raise UsageError(f"invalid value for {key}: {value!r}") from None
        opts[key] = value
    opts["n"] = list(parse_n(opts["n"]))
    opts["outage_probs"] = list(parse_probs(opts["outage_probs"]))
    if opts["layout"] not in LAYOUTS:
        raise UsageError(f"layout must be one of {', '.join(LAYOUTS)}")
    if opts["formula"] not in FORMULAS:
        raise UsageError(f"formula must be one of {', '.join(FORMULAS)}")
    for key in ("alpha", "rho_w", "rel_density", "noise_watts", "gt", "pm_watts"):
        if not opts[key] > 0:
            raise UsageError(f"{key} must be positive")
    if not opts["alpha"] > 2:
        raise UsageError("alpha must exceed 2")
    if opts["trials"] is not None and opts["trials"] < 1:
        raise UsageError("trials must be at least 1")
    return opts


# -- shared evaluation -------------------------------------------------------

def power_control(opts: dict) -> PowerControl:
    return PowerControl.from_snr(opts["target_snr_db"], opts["noise_watts"], opts["gt"],
                                 opts["pm_watts"], opts["alpha"])


def _power_law(opts: dict, pc: PowerControl) -> PowerDistribution:
    rho_h = opts["rel_density"] * opts["rho_w"]
    if opts["layout"] == "hex":
        return PowerDistribution.hex(pc, hex_spacing(rho_h))
    return PowerDistribution.ppp(pc, rho_h)


def _link_defaults(opts: dict, pc: PowerControl, dist) -> tuple[float, float]:
    r1 = opts["r1"] if opts["r1"] is not None else math.sqrt(dist.link.second_moment())
    p1 = opts["p1"] if opts["p1"] is not None else float(transmit_power(r1, pc))
    return r1, p1


def asymptotic_curve(formula: str, opts: dict) -> np.ndarray:
    """Closed-form or fixed-point mean SE over ``opts["n"]``."""
    n = np.array(opts["n"], dtype=float)
    alpha, rho_w = opts["alpha"], opts["rho_w"]
    rho_h = opts["rel_density"] * rho_w
    pc = power_control(opts)
    if formula == "eq13":
        return np.asarray(mean_se_hex_sufficient(n, hex_spacing(rho_h), rho_w, alpha))
    if formula == "eq24":
        return np.asarray(mean_se_hex_density(n, rho_h, rho_w, alpha))
    if formula == "eq16":
        return np.asarray(mean_se_hex_insufficient(n, hex_spacing(rho_h), rho_w, pc))
    if formula == "eq21":
        return np.asarray(mean_se_ppp(n, rho_h, rho_w, pc))
    if formula == "eq23":
        unlimited = PowerControl(pc.target_rx_power, pc.gain, math.inf, alpha)
        return np.asarray(mean_se_ppp(n, rho_h, rho_w, unlimited))
    dist = _power_law(opts, pc)
    r1, p1 = _link_defaults(opts, pc, dist)
    if formula == "eq8":
        return np.log2(1 + np.asarray(sinr_approx(n, r1, p1, dist, rho_w, alpha)))
    if formula == "fixed-point":
        out = []
        for k in opts["n"]:
            c = opts["c"] if opts["c"] is not None else opts["n_nodes"] / k
            sigma2 = (opts["sigma2"] if opts["sigma2"] is not None
                      else noise_to_sigma2(opts["noise_watts"], k, alpha))
            params = AsymptoticParams(alpha, rho_w, c, sigma2, opts["gt"], r1, p1, dist)
            out.append(float(se_from_beta(solve_fixed_point(params, opts["form"]), k, alpha)))
        return np.array(out)
    raise UsageError(f"unknown formula {formula!r}")


def default_formula(opts: dict) -> str:
    return "eq16" if opts["layout"] == "hex" else "eq21"


# -- output ------------------------------------------------------------------

def _describe(opts: dict, keys) -> str:
    return "# " + ", ".join(f"{k}={fmt(opts[k]) if isinstance(opts[k], float) else opts[k]}"
                            for k in keys)


def asymptotic_csv(formula: str, opts: dict, values) -> str:
    lines = [f"# formula: {formula}",
             _describe(opts, ("layout", "alpha", "rho_w", "rel_density", "pm_watts",
                              "target_snr_db", "noise_watts", "gt")),
             SE_UNITS,
             "n_antennas,asymptotic_se_bps_hz"]
    lines += [f"{k},{fmt(v)}" for k, v in zip(opts["n"], values)]
    return "\n".join(lines) + "\n"


def simulation_csv(opts: dict, stats: dict, asym, redraws: int) -> str:
    probs = opts["outage_probs"]
    cols = ["n_antennas", "mean_se_bps_hz", "stderr"] + [outage_column(p) for p in probs]
    cols.append("asymptotic_se_bps_hz")
    lines = [f"# simulation: {opts['layout']} cells, {_trials(opts)} trials, seed {opts['seed']}",
             _describe(opts, ("alpha", "rho_w", "rel_density", "pm_watts", "target_snr_db",
                              "noise_watts", "gt", "n_nodes")),
             f"# redraws: {redraws}",
             SE_UNITS,
             ",".join(cols)]
    for k, a in zip(opts["n"], asym):
        s = stats[k]
        row = [k, s.mean, s.stderr] + [s.outage[p] for p in probs] + [a]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def artifact_version() -> str:
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return __version__
    sha = rev.stdout.strip()
    return f"{__version__}+g{sha}" if rev.returncode == 0 and sha else __version__


def _jsonable(opts: dict) -> dict:
    out = {}
    for k, v in opts.items():
        out[k] = "inf" if isinstance(v, float) and math.isinf(v) else v
    return out


def _from_json(opts: dict) -> dict:
    return {k: (math.inf if v == "inf" else v) for k, v in opts.items()}


class RunWriter:
    """Collects data files and writes them plus the manifest, one at a time."""

    def __init__(self, out_dir: str, command: str, config: dict):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config = config
        self.outputs = []
        self.redraws = {}
        self.warnings = []
        self.extra = {}
        self.start = time.perf_counter()

    def write(self, name: str, curve: str, kind: str, text: str):
        if any(o["path"] == name for o in self.outputs):
            raise ValueError(f"output {name} written twice")
        (self.dir / name).write_text(text, encoding="utf-8")
        self.outputs.append({"curve": curve, "kind": kind, "path": name})

    def finish(self) -> Path:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "version": artifact_version(),
            "command": self.command,
            "config": self.config,
            "seed": self.config.get("seed"),
            "outputs": self.outputs,
            "redraws": self.redraws,
            "warnings": self.warnings,
            "wall_clock_seconds": time.perf_counter() - self.start,
        }
        manifest.update(self.extra)
        path = self.dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        return path


# -- commands ----------------------------------------------------------------

def _trials(opts: dict) -> int:
    return opts["trials"] if opts["trials"] is not None else DEFAULT_TRIALS[opts["layout"]]


def experiment_config(opts: dict) -> ExperimentConfig:
    return ExperimentConfig(layout=opts["layout"], rho_w=opts["rho_w"],
                            rel_density=opts["rel_density"], pc=power_control(opts),
                            noise=opts["noise_watts"], n_antennas=tuple(opts["n"]),
                            n_nodes=opts["n_nodes"], trials=_trials(opts), seed=opts["seed"])


def _feasibility_warnings(opts: dict) -> list[str]:
    warnings = []
    if opts["rel_density"] >= REL_DENSITY_WARN:
        warnings.append(f"rel_density={opts['rel_density']} >= {REL_DENSITY_WARN}: more base "
                        "stations than nodes, most cells are empty and redraws grow")
    return warnings


def first_crossing(n, values, threshold: float):
    """Smallest antenna count whose value reaches ``threshold``; None if none does."""
    for k, v in zip(n, values):
        if v >= threshold:
            return int(k)
    return None


def simulate_curve(writer: RunWriter, name: str, curve: str, opts: dict, threads=None):
    result = run_experiment(experiment_config(opts), threads)
    stats = summarize(result, tuple(opts["outage_probs"]))
    asym = asymptotic_curve(default_formula(opts), opts)
    writer.write(name, curve, "simulation", simulation_csv(opts, stats, asym, result.redraws))
    writer.redraws[curve] = result.redraws
    trials = _trials(opts)
    if result.redraws > 0.01 * trials:
        writer.warnings.append(f"{curve}: {result.redraws} layout redraws in {trials} trials")
    writer.warnings.extend(f"{curve}: {w}" for w in _feasibility_warnings(opts))
    p_first = opts["outage_probs"][0]
    crossing = first_crossing(opts["n"], [stats[k].outage[p_first] for k in opts["n"]],
                              opts["se_threshold"])
    writer.extra.setdefault("outage_crossing", {})[curve] = {
        "outage_prob": p_first, "threshold_bps_hz": opts["se_threshold"], "n_antennas": crossing}
    return stats, crossing


_LINK_FLAGS = {"r1": ("eq8", "fixed-point"), "p1": ("eq8", "fixed-point"),
               "c": ("fixed-point",), "sigma2": ("fixed-point",), "form": ("fixed-point",)}


def check_formula_flags(opts: dict, given: set):
    """Reject flags that the chosen formula would silently ignore."""
    for key, formulas in _LINK_FLAGS.items():
        if key in given and opts["formula"] not in formulas:
            raise UsageError(f"--{key} only applies to formula {' or '.join(formulas)}")
    if opts["c"] is not None and not opts["c"] > 0:
        raise UsageError("c must be positive")
    if opts["sigma2"] is not None and opts["sigma2"] < 0:
        raise UsageError("sigma2 must be non-negative")


def cmd_asymptotic(opts: dict, out_dir: str, threads=None) -> Path:
    writer = RunWriter(out_dir, "asymptotic", _jsonable(opts))
    writer.warnings.extend(_feasibility_warnings(opts))
    formula = opts["formula"]
    writer.write(f"{formula}.csv", formula, "asymptotic",
                 asymptotic_csv(formula, opts, asymptotic_curve(formula, opts)))
    return writer.finish()


def cmd_simulate(opts: dict, out_dir: str, threads=None) -> Path:
    writer = RunWriter(out_dir, "simulate", _jsonable(opts))
    _, crossing = simulate_curve(writer, "simulate.csv", "simulate", opts, threads)
    p = opts["outage_probs"][0]
    print(f"smallest N with outage({p:g}) >= {opts['se_threshold']:g} b/s/Hz: "
          f"{crossing if crossing is not None else 'not reached'}")
    return writer.finish()


# -- figure presets ----------------------------------------------------------

HEX_BASE = {"layout": "hex", "alpha": 4.0, "target_snr_db": 30.0, "noise_watts": 1e-15,
            "gt": 1e-5, "n_nodes": 4000}
PPP_BASE = dict(HEX_BASE, layout="ppp", noise_watts=1e-14)
REL_SWEEP = (0.2, 0.1, 0.05)
HEX_REL_SWEEP = REL_SWEEP + (0.025,)


@dataclass(frozen=True)
class Preset:
    description: str
    base: dict
    pm_watts: float
    rho_w: tuple[float, ...]
    rel_density: tuple[float, ...]
    formula: str
    n: str = "1..20"
    simulate: bool = True
    compare: bool = False      # overlay hex and random cells, closed forms only

    def curves(self):
        return [(w, r) for w in self.rho_w for r in self.rel_density]


PRESETS = {
    "fig3": Preset("mean SE, unlimited power, hexagonal cells", HEX_BASE, math.inf,
                   (1e-3, 1e-2), (0.2,), "eq13"),
    "fig4": Preset("outage SE, unlimited power, hexagonal cells", HEX_BASE, math.inf,
                   (1e-2,), (0.1,), "eq13"),
    "fig5": Preset("mean SE, 200 mW, hexagonal cells, rho_w=1e-4", HEX_BASE, 0.2,
                   (1e-4,), HEX_REL_SWEEP, "eq16"),
    "fig6": Preset("mean SE, 200 mW, hexagonal cells, rho_w=1e-2", HEX_BASE, 0.2,
                   (1e-2,), HEX_REL_SWEEP, "eq16"),
    "fig7": Preset("outage SE, 200 mW, hexagonal cells", HEX_BASE, 0.2,
                   (1e-4, 1e-3), (0.1,), "eq16"),
    "fig9": Preset("mean SE, unlimited power, random cells", PPP_BASE, math.inf,
                   (1e-3,), REL_SWEEP, "eq23"),
    "fig10": Preset("mean SE, 200 mW, random cells", PPP_BASE, 0.2,
                    (1e-3,), REL_SWEEP, "eq21"),
    "fig11": Preset("hexagonal vs random cells, 200 mW, closed forms", HEX_BASE, 0.2,
                    (1e-3,), REL_SWEEP, "eq16", n="1..40", simulate=False, compare=True),
}

# closed forms that depend on rho_w and rel_density only through their ratio
_RATIO_ONLY = {"eq13", "eq23", "eq24"}


def _tag(x: float) -> str:
    return f"{x:g}".replace(".", "p").replace("-", "m")


def preset_options(name: str, scale: float = 1.0, seed: int = 0, n=None) -> list[dict]:
    """One resolved option dict per simulated curve of a preset."""
    preset = PRESETS[name]
    out = []
    for rho_w, rel in preset.curves():
        opts = dict(DEFAULTS)
        opts.update(preset.base)
        opts.update(rho_w=rho_w, rel_density=rel, pm_watts=preset.pm_watts, seed=seed,
                    formula=preset.formula)
        opts["n"] = list(parse_n(n if n is not None else preset.n))
        opts["outage_probs"] = list(parse_probs(opts["outage_probs"]))
        opts["trials"] = max(1, round(DEFAULT_TRIALS[opts["layout"]] * scale))
        out.append(opts)
    return out


def cmd_figure(name: str, out_dir: str, scale: float = 1.0, seed: int = 0, n=None,
               threads=None) -> Path:
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")
    if not scale > 0:
        raise UsageError("scale must be positive")
    preset = PRESETS[name]
    curves = preset_options(name, scale, seed, n)
    writer = RunWriter(out_dir, "figure", {"preset": name, "scale": scale, "seed": seed,
                                          "n": n, "curves": [_jsonable(c) for c in curves]})
    seen = set()
    for opts in curves:
        label = f"rhow{_tag(opts['rho_w'])}_rel{_tag(opts['rel_density'])}"
        if preset.simulate:
            simulate_curve(writer, f"{name}_{opts['layout']}_{label}.csv", label, opts, threads)
        layouts = ("hex", "ppp") if preset.compare else (opts["layout"],)
        for layout in layouts:
            formula = "eq21" if preset.compare and layout == "ppp" else preset.formula
            cur = dict(opts, layout=layout, formula=formula)
            if not preset.compare:
                cur["n"] = list(range(1, max(opts["n"]) + 1))
            key = (layout, formula, opts["rel_density"],
                   None if formula in _RATIO_ONLY else opts["rho_w"])
            if key in seen:
                continue
            seen.add(key)
            akey = (f"rel{_tag(opts['rel_density'])}" if formula in _RATIO_ONLY else label)
            writer.write(f"{name}_{layout}_{akey}_{formula}.csv", f"{layout}_{akey}_{formula}",
                         "asymptotic", asymptotic_csv(formula, cur, asymptotic_curve(formula, cur)))
    return writer.finish()


def cmd_replay(manifest_path: str, out_dir: str, threads=None) -> Path:
    try:
        manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read manifest {manifest_path}: {exc}") from None
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise UsageError(f"unsupported manifest schema {manifest.get('schema_version')!r}")
    command, config = manifest["command"], manifest["config"]
    if command == "figure":
        return cmd_figure(config["preset"], out_dir, config["scale"], config["seed"],
                          config["n"], threads)
    opts = _from_json(config)
    if command == "asymptotic":
        return cmd_asymptotic(opts, out_dir, threads)
    if command == "simulate":
        return cmd_simulate(opts, out_dir, threads)
    raise UsageError(f"manifest has unknown command {command!r}")


# -- argument parsing --------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value file; keys mirror flag names")
    p.add_argument("--layout", choices=LAYOUTS)
    p.add_argument("--alpha", type=_float, help="path-loss exponent (> 2)")
    p.add_argument("--rho-w", dest="rho_w", type=_float, help="node density, nodes/m^2")
    p.add_argument("--rel-density", dest="rel_density", type=_float,
                   help="base-station density relative to node density")
    p.add_argument("--n", help="antenna counts, e.g. 1,2,4 or 1..64")
    p.add_argument("--pm-watts", dest="pm_watts", type=_float,
                   help="transmit power cap in watts, or inf")
    p.add_argument("--target-snr-db", dest="target_snr_db", type=_float)
    p.add_argument("--noise-watts", dest="noise_watts", type=_float)
    p.add_argument("--gt", type=_float, help="path-gain constant G_t")
    p.add_argument("--n-nodes", dest="n_nodes", type=int, help="nodes in the network")
    p.add_argument("--out-dir", dest="out_dir", default="cellrate-out")
    p.add_argument("--threads", type=int, help="worker threads (default: CELLRATE_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellrate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cellrate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    asy = sub.add_parser("asymptotic", help="evaluate a large-array formula over N")
    _add_common(asy)
    asy.add_argument("--formula", choices=FORMULAS)
    asy.add_argument("--form", choices=("consistent", "literal"),
                     help="fixed-point variant (default consistent)")
    asy.add_argument("--r1", type=_float, help="link length, m (default: RMS cell link)")
    asy.add_argument("--p1", type=_float, help="link transmit power, W (default: power control)")
    asy.add_argument("--c", type=_float, help="interferers per antenna (default n_nodes/N)")
    asy.add_argument("--sigma2", type=_float, help="normalized noise (default from noise-watts)")

    sim = sub.add_parser("simulate", help="Monte-Carlo mean and outage SE")
    _add_common(sim)
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--outage-probs", dest="outage_probs", help="e.g. 0.05,0.25,0.5")
    sim.add_argument("--se-threshold", dest="se_threshold", type=_float,
                     help="SE level for the reported outage crossing (default 1)")

    fig = sub.add_parser("figure", help="reproduce a figure preset")
    fig.add_argument("preset", help=f"one of {', '.join(PRESETS)}")
    fig.add_argument("--scale", type=_float, default=1.0, help="multiply trial counts")
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--n", help="override the preset antenna sweep")
    fig.add_argument("--out-dir", dest="out_dir", default="cellrate-out")
    fig.add_argument("--threads", type=int)

    rep = sub.add_parser("replay", help="re-run the configuration recorded in a manifest")
    rep.add_argument("manifest")
    rep.add_argument("--out-dir", dest="out_dir", default="cellrate-replay")
    rep.add_argument("--threads", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "asymptotic":
            opts = resolve(args)
            given = {k for k in _LINK_FLAGS if getattr(args, k, None) is not None}
            check_formula_flags(opts, given)
            path = cmd_asymptotic(opts, args.out_dir, args.threads)
        elif args.command == "simulate":
            path = cmd_simulate(resolve(args), args.out_dir, args.threads)
        elif args.command == "figure":
            path = cmd_figure(args.preset, args.out_dir, args.scale, args.seed, args.n,
                              args.threads)
        else:
            path = cmd_replay(args.manifest, args.out_dir, args.threads)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cellrate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"cellrate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"cellrate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"manifest: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
