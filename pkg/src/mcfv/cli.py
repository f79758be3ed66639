"""Command-line front end.

Subcommands: exact | time-run | space-run | convergence | field-dump.
Configuration comes from built-in presets, a flat ``key = value`` file and
command-line flags, later sources overriding earlier ones. Every run writes
its fully resolved configuration to ``meta.txt`` in the output directory;
that file is itself a valid ``--config`` input and reproduces the run
byte for byte.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from pathlib import Path

from .driver import MomentStats, RunConfig, SampleFailure, run, sample_field_for
from .field import FieldParams, mu_from_zeta
from .grid import GridFunction, GridSpec
from .metrics import abs_l1_error, convergence_table, rel_l1_error, restrict, table_csv
from .moments import exact_expectation, exact_variance_field, kernel_for
from .ou import OUParams
from .profiles import get_profile

#: oracle grids are this much finer than the solver grid they judge
ORACLE_FACTOR = 4

class ConfigError(ValueError):
    pass

# every key accepted in a config file, with its parser
_KEY_TYPES = {
    "problem": str,
    "samples": int,
    "seed": int,
    "cells": int,
    "cells_list": str,
    "order": int,
    "limiter": str,
    "courant": float,
    "t_final": str,  # number or "auto"
    "profile": str,
    "mu": float,
    "theta": float,
    "sigma": float,
    "a0": float,
    "micro_step": str,  # number or "auto"
    "field_sigma": float,
    "q": int,
    "cutoff": float,
    "zeta": float,
    "c_dist": float,
    "workers": int,
    "unbiased_variance": bool,
    "out": str,
}

_DEFAULTS = {
    "problem": "time",
    "samples": 1000,
    "seed": 0,
    "cells": 400,
    "cells_list": "",
    "order": 2,
    "limiter": "minmod",
    "courant": 0.45,
    "t_final": "auto",
    "profile": "sine-jump",
    "mu": 0.25,
    "theta": 4.0,
    "sigma": 0.31622776601683794,  # 1/sqrt(10)
    "a0": -0.25,
    "micro_step": "auto",
    "field_sigma": 10.0,
    "q": 5,
    "cutoff": 50.0,
    "zeta": 0.0,
    "c_dist": 0.5,
    "workers": 1,
    "unbiased_variance": False,
    "out": "mcfv-out",
}

# Desk-scale presets. The reference studies behind them used far larger
# budgets (up to 2^15 cells and 10^6 samples); see the README for the map.
PRESETS = {
    "time-demo": {
        "problem": "time", "samples": 10_000, "cells": 400, "order": 2,
        "limiter": "minmod", "t_final": "1.0",
    },
    "time-convergence": {
        "problem": "time", "samples": 10_000, "order": 1,
        "cells_list": "100,200,400,800", "t_final": "1.0",
    },
    "space-zeta": {
        "problem": "space", "samples": 1000, "cells": 2048, "order": 2,
        "limiter": "minmod", "field_sigma": 10.0, "q": 5, "zeta": 2.0,
    },
    "space-mu0": {
        "problem": "space", "samples": 1000, "cells": 2048, "order": 2,
        "limiter": "minmod", "field_sigma": 10.0, "q": 5, "zeta": 0.0,
    },
    "space-convergence": {
        "problem": "space", "samples": 1000, "order": 2, "limiter": "minmod",
        "field_sigma": 10.0, "q": 5, "zeta": 2.0,
        "cells_list": "1024,2048,4096",
    },
}

def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")

def parse_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment; unknown keys rejected."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown configuration key {key!r}")
        values[key] = value.strip()
    return values

def _coerce(key: str, value):
    kind = _KEY_TYPES[key]
    if isinstance(value, str):
        try:
            if kind is bool:
                return _parse_bool(value)
            return kind(value)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(
                f"bad value for {key!r}: {value!r} is not {kind.__name__}"
            ) from None
    return value

def _resolve(args: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    preset = getattr(args, "preset", None)
    if preset:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset!r}; available: {sorted(PRESETS)}"
            )
        merged.update(PRESETS[preset])
    if getattr(args, "config", None):
        merged.update(parse_config_file(args.config))
    for key in _KEY_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return {k: _coerce(k, v) for k, v in merged.items()}

def _ou_params(cfg: dict) -> OUParams:
    try:
        return OUParams(cfg["mu"], cfg["theta"], cfg["sigma"], cfg["a0"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

def _space_t_final(cfg: dict) -> float:
    if cfg["t_final"] != "auto":
        return float(cfg["t_final"])
    base = FieldParams(0.0, cfg["field_sigma"], cfg["q"], cfg["cutoff"],
                       max(4, cfg["cells"]))
    mu = mu_from_zeta(cfg["zeta"], base)
    return cfg["c_dist"] / mu if mu > 0.0 else 2.0

def _time_t_final(cfg: dict) -> float:
    return 1.0 if cfg["t_final"] == "auto" else float(cfg["t_final"])

def _run_config(cfg: dict, problem: str, cells: int) -> RunConfig:
    t_final = _time_t_final(cfg) if problem == "time" else _space_t_final(cfg)
    micro = cfg["micro_step"]
    try:
        return RunConfig(
            problem=problem,
            samples=cfg["samples"],
            seed=cfg["seed"],
            cells=cells,
            t_final=t_final,
            order=cfg["order"],
            limiter=cfg["limiter"],
            courant=cfg["courant"],
            profile=cfg["profile"],
            ou=_ou_params(cfg) if problem == "time" else None,
            micro_step=None if micro == "auto" else float(micro),
            field_sigma=cfg["field_sigma"],
            field_q=cfg["q"],
            field_cutoff=cfg["cutoff"],
            zeta=cfg["zeta"],
            unbiased_variance=cfg["unbiased_variance"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

def _write_csv(path: Path, header: str, columns) -> None:
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(f"{v:.17g}" for v in row))
    path.write_text("\n".join(lines) + "\n")

def _write_meta(path: Path, cfg: dict, telemetry: dict) -> None:
    lines = ["# resolved configuration; reusable via --config"]
    for key in _KEY_TYPES:
        value = cfg[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    for key, value in telemetry.items():
        lines.append(f"# telemetry: {key} = {value}")
    path.write_text("\n".join(lines) + "\n")

def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out

def _oracle_fields(cfg: dict, cells: int, t_final: float):
    """Reference mean and variance on a grid ORACLE_FACTOR times finer."""
    fine = ORACLE_FACTOR * cells
    g = GridFunction(get_profile(cfg["profile"]).cell_averages(fine))
    p = _ou_params(cfg)
    return exact_expectation(g, p, t_final), exact_variance_field(g, p, t_final)

def cmd_exact(args) -> int:
    cfg = _resolve(args)
    out = _out_dir(cfg)
    t_final = _time_t_final(cfg)
    p = _ou_params(cfg)
    grid = GridSpec(cfg["cells"])
    g = GridFunction(get_profile(cfg["profile"]).cell_averages(cfg["cells"]))
    mean = exact_expectation(g, p, t_final)
    var = exact_variance_field(g, p, t_final)
    kern = kernel_for(p, t_final)
    x = grid.centers()
    _write_csv(out / "exact_mean.csv", "x,value", (x, mean.values))
    _write_csv(out / "exact_var.csv", "x,value", (x, var.values))
    _write_meta(out / "meta.txt", cfg, {
        "displacement_mean": f"{kern.mean:.17g}",
        "displacement_var": f"{kern.var:.17g}",
    })
    print(f"displacement mean = {kern.mean:.6g}, variance = {kern.var:.6g}")
    print(f"wrote exact_mean.csv, exact_var.csv to {out}")
    return 0

def _write_moment_files(out: Path, grid: GridSpec, stats: MomentStats) -> None:
    x = grid.centers()
    _write_csv(out / "mean.csv", "x,value", (x, stats.mean.values))
    _write_csv(out / "var.csv", "x,value", (x, stats.variance.values))

def cmd_time_run(args) -> int:
    cfg = _resolve(args)
    out = _out_dir(cfg)
    rc = _run_config(cfg, "time", cfg["cells"])
    cfg["problem"] = "time"
    stats = run(rc, workers=cfg["workers"])
    oracle_mean, oracle_var = _oracle_fields(cfg, rc.cells, rc.t_final)
    eps = rel_l1_error(stats.mean, restrict(oracle_mean, ORACLE_FACTOR))
    delta = abs_l1_error(stats.variance, restrict(oracle_var, ORACLE_FACTOR))
    cfg["t_final"] = f"{rc.t_final:.17g}"
    _write_moment_files(out, rc.grid, stats)
    _write_meta(out / "meta.txt", cfg, {
        "eps_mean": f"{eps:.17g}",
        "delta_var": f"{delta:.17g}",
        "steps": stats.steps,
        "wall_time_s": f"{stats.wall_time:.3f}",
    })
    print(f"time run: {stats.samples} samples on {rc.cells} cells, "
          f"eps_mean = {eps:.4g}, delta_var = {delta:.4g}")
    print(f"wrote mean.csv, var.csv to {out}")
    return 0

def cmd_space_run(args) -> int:
    cfg = _resolve(args)
    out = _out_dir(cfg)
    rc = _run_config(cfg, "space", cfg["cells"])
    cfg["problem"] = "space"
    stats = run(rc, workers=cfg["workers"])
    cfg["t_final"] = f"{rc.t_final:.17g}"
    _write_moment_files(out, rc.grid, stats)
    _write_meta(out / "meta.txt", cfg, {
        "field_mu": f"{rc.field_params().mu:.17g}",
        "steps": stats.steps,
        "wall_time_s": f"{stats.wall_time:.3f}",
    })
    print(f"space run: {stats.samples} samples on {rc.cells} cells "
          f"to t = {rc.t_final:.4g}")
    print(f"wrote mean.csv, var.csv to {out}")
    return 0

def cmd_convergence(args) -> int:
    cfg = _resolve(args)
    out = _out_dir(cfg)
    if not cfg["cells_list"]:
        raise ConfigError("convergence needs cells_list, e.g. 100,200,400")
    try:
        levels = [int(tok) for tok in cfg["cells_list"].split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad cells_list {cfg['cells_list']!r}") from None
    if len(levels) < 2:
        raise ConfigError("convergence needs at least two grid levels")
    problem = cfg["problem"]
    runs = []
    t_final = None
    for cells in levels:
        rc = _run_config(cfg, problem, cells)
        t_final = rc.t_final
        stats = run(rc, workers=cfg["workers"])
        runs.append((stats.mean, stats.variance))
        print(f"  level {cells}: done in {stats.wall_time:.1f} s")
    if problem == "time":
        reference = _oracle_fields(cfg, max(levels), t_final)
        rows = convergence_table(runs, reference)
    else:
        rows = convergence_table(runs, "finest")
    cfg["t_final"] = f"{t_final:.17g}"
    (out / "convergence.csv").write_text(table_csv(rows))
    _write_meta(out / "meta.txt", cfg, {"levels": cfg["cells_list"]})
    for row in rows:
        print(f"  I = {row.cells:6d}: eps_mean = {row.eps_mean:.4g}, "
              f"delta_var = {row.delta_var:.4g}")
    print(f"wrote convergence.csv to {out}")
    return 0

def cmd_field_dump(args) -> int:
    cfg = _resolve(args)
    out = _out_dir(cfg)
    rc = _run_config(cfg, "space", cfg["cells"])
    cfg["problem"] = "space"
    f = sample_field_for(rc, 0)
    x = rc.grid.interfaces()
    _write_csv(out / "field.csv", "x,a", (x, f.a))
    _write_meta(out / "meta.txt", cfg, {
        "field_mu": f"{rc.field_params().mu:.17g}",
    })
    print(f"wrote field.csv ({cfg['cells']} interface values) to {out}")
    return 0

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value configuration file")
    sub.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
    sub.add_argument("--seed", type=int, help="64-bit master seed")
    sub.add_argument("--samples", type=int, help="Monte Carlo sample count")
    sub.add_argument("--cells", type=int, help="grid cells on [0,1]")
    sub.add_argument("--order", type=int, choices=(1, 2), help="scheme order")
    sub.add_argument("--limiter", choices=("minmod", "superbee"))
    sub.add_argument("--courant", type=float, help="Courant number in (0,1]")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--workers", type=int, help="worker processes")
    sub.add_argument("--profile", help="initial profile name")
    sub.add_argument("--t-final", dest="t_final", help="final time or 'auto'")
    sub.add_argument("--mu", type=float, help="coefficient long-run mean")
    sub.add_argument("--theta", type=float, help="relaxation rate")
    sub.add_argument("--sigma", type=float, help="noise intensity")
    sub.add_argument("--a0", type=float, help="initial coefficient value")
    sub.add_argument("--micro-step", dest="micro_step",
                     help="path micro step or 'auto'")
    sub.add_argument("--field-sigma", dest="field_sigma", type=float,
                     help="spectral amplitude of the random field")
    sub.add_argument("--q", type=int, help="spectral decay exponent")
    sub.add_argument("--cutoff", type=float, help="frequency cutoff")
    sub.add_argument("--zeta", type=float,
                     help="field mean in units of the field std deviation")
    sub.add_argument("--c-dist", dest="c_dist", type=float,
                     help="mean transport distance fixing t = c/mu")
    sub.add_argument("--unbiased-variance", dest="unbiased_variance",
                     action="store_const", const=True,
                     help="divide by M-1 instead of M")
    sub.add_argument("--cells-list", dest="cells_list",
                     help="comma-separated nested grid sizes")
    sub.add_argument("--problem", choices=("time", "space"))

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcfv", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, fn, noun in (
        ("exact", cmd_exact, "closed-form moment fields"),
        ("time-run", cmd_time_run, "Monte Carlo run, time-dependent coefficient"),
        ("space-run", cmd_space_run, "Monte Carlo run, space-dependent coefficient"),
        ("convergence", cmd_convergence, "grid refinement sweep"),
        ("field-dump", cmd_field_dump, "one random field realisation as CSV"),
    ):
        sub = subs.add_parser(name, help=noun)
        _add_common(sub)
        sub.set_defaults(fn=fn)
    return parser

def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except SampleFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

if __name__ == "__main__":
    sys.exit(main())
