"""Config-driven command line: constants | bubble | ground-state | solve | verify.

Configs are flat KEY = VALUE text files; command-line flags override file
values, and every report embeds the fully resolved configuration.  Exit
status: 0 all good, 1 numerical failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .constants import measure_constants, coercivity_sweep
from .fieldio import dump_json, fmt, save_field, write_csv
from .forcing import build_density, make_forcing, scale_to_norm
from .grids import SystemParams, make_grid, from_powers
from .options import ConvergenceError, MinimizeOpts
from .profiles import (
    BubbleParams,
    decay_exponent_fit,
    ground_state_residual,
    subcritical_ground_state,
    talenti_bubble,
)
from .solve import positivity_check, residual, solve_system
from .verify import run_all_checks

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dimension: int = 1
    s: float = 0.25
    alpha: float = 2.0
    beta: float = 2.0
    gamma: int = -1  # -1 = infer from alpha+beta against the critical exponent
    grid_size: int = 64
    box_length: float = 40.0
    tol: float = 1e-8
    max_iter: int = 10000
    seed: int = 0
    output: str = "out"
    # forcing constructors; fraction_of_d scales to that fraction of the
    # measured smallness threshold
    f_kind: str = "gaussian"
    f_center: float = 0.0
    f_width: float = 2.0
    f_radius: float = 1.0
    f_mode: int = 1
    f_amplitude: float = 1.0
    f_fraction_of_d: float = 0.5
    g_kind: str = "gaussian"
    g_center: float = 0.0
    g_width: float = 2.0
    g_radius: float = 1.0
    g_mode: int = 1
    g_amplitude: float = 1.0
    g_fraction_of_d: float = 0.5
    # bubble profile
    bubble_lambda: float = 1.0
    bubble_normalization: float = 1.0
    # sweep
    sweep_pairs: int = 0

    _INT_KEYS = {"dimension", "gamma", "grid_size", "max_iter", "seed", "f_mode", "g_mode", "sweep_pairs"}
    _STR_KEYS = {"output", "f_kind", "g_kind"}

    def set(self, key, raw):
        if not hasattr(self, key) or key.startswith("_"):
            raise ConfigError(f"unknown config key {key!r}")
        if key in self._INT_KEYS:
            value = int(raw)
        elif key in self._STR_KEYS:
            value = str(raw)
        else:
            value = float(raw)
        setattr(self, key, value)

    def as_dict(self):
        return {
            k: getattr(self, k)
            for k in self.__dataclass_fields__
            if not k.startswith("_")
        }

    def params(self):
        if self.alpha <= 1.0 or self.beta <= 1.0:
            raise ConfigError(
                f"violated invariant alpha > 1 and beta > 1: got alpha={self.alpha}, beta={self.beta}"
            )
        try:
            if self.gamma in (0, 1):
                return SystemParams(self.dimension, self.s, self.alpha, self.beta, self.gamma)
            return from_powers(self.dimension, self.s, self.alpha, self.beta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self):
        try:
            return make_grid(self.dimension, self.grid_size, self.box_length)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def opts(self):
        return MinimizeOpts(tol=self.tol, max_iter=self.max_iter, seed=self.seed)

    def density(self, which, grid):
        kind = getattr(self, f"{which}_kind")
        kw = {"amplitude": getattr(self, f"{which}_amplitude")}
        center = [getattr(self, f"{which}_center")] * grid.dimension
        if kind == "gaussian":
            kw.update(center=center, width=getattr(self, f"{which}_width"))
        elif kind == "indicator":
            kw.update(center=center, radius=getattr(self, f"{which}_radius"))
        elif kind == "mode":
            kw.update(k=getattr(self, f"{which}_mode"))
        else:
            raise ConfigError(f"unknown density kind {kind!r}")
        try:
            return build_density(grid, kind, **kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_config_file(path):
    cfg = ExperimentConfig()
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected KEY = VALUE, got {line!r}")
        key, _, raw = stripped.partition("=")
        try:
            cfg.set(key.strip(), raw.strip())
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return cfg


_FLAG_TO_KEY = {
    "dimension": "dimension",
    "s": "s",
    "alpha": "alpha",
    "beta": "beta",
    "grid_size": "grid_size",
    "box_length": "box_length",
    "tol": "tol",
    "max_iter": "max_iter",
    "output": "output",
    "seed": "seed",
}


def build_config(args):
    cfg = parse_config_file(args.config) if args.config else ExperimentConfig()
    for flag, key in _FLAG_TO_KEY.items():
        value = getattr(args, flag, None)
        if value is not None:
            cfg.set(key, value)
    return cfg


def _outdir(cfg):
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(cfg):
    params = cfg.params()
    grid = cfg.grid()
    out = _outdir(cfg)
    opts = MinimizeOpts(tol=min(cfg.tol, 1e-8), max_iter=cfg.max_iter)
    report = measure_constants(grid, params, opts=opts)
    payload = {"config": cfg.as_dict(), "report": report.as_dict()}
    dump_json(payload, out / "constants.json")
    header = list(report.as_dict().keys())
    write_csv(out / "constants.csv", header, [list(report.as_dict().values())])
    if cfg.sweep_pairs > 0:
        rows = coercivity_sweep(
            lambda a, b: SystemParams(params.dimension, params.s, a, b, params.gamma),
            params.coupling_exponent,
            cfg.sweep_pairs,
        )
        write_csv(
            out / "coercivity_sweep.csv",
            ["alpha", "beta", "ratio_formula", "coercivity_lhs"],
            rows,
        )
        if min(r[3] for r in rows) <= 2.0:
            print("sweep: coercivity margin dipped to 2 or below", file=sys.stderr)
            return EXIT_NUMERICAL
    print(
        f"constants: S_scalar={fmt(report.s_scalar)} S_vector={fmt(report.s_vector)} "
        f"ratio={fmt(report.ratio_measured)} (formula {fmt(report.ratio_formula)}) "
        f"r={fmt(report.radius)} d={fmt(report.threshold)}"
    )
    return EXIT_OK


def cmd_bubble(cfg):
    params = cfg.params()
    if params.gamma != 0:
        raise ConfigError(
            "bubble requires the critical regime: alpha+beta must equal 2N/(N-2s)"
        )
    grid = cfg.grid()
    out = _outdir(cfg)
    bubble = BubbleParams(
        lam=cfg.bubble_lambda,
        center=(0.0,) * grid.dimension,
        normalization=cfg.bubble_normalization,
    )
    w = talenti_bubble(grid, params, bubble)
    save_field(w, out / "bubble.csv")
    decay = decay_exponent_fit(w)
    meta = {
        "config": cfg.as_dict(),
        "lambda": cfg.bubble_lambda,
        "normalization": cfg.bubble_normalization,
        "decay_exponent_fit": decay,
        "expected_tail_exponent": params.dimension - 2.0 * params.s,
        "core_height": float(w.values.max()),
    }
    dump_json(meta, out / "bubble_meta.json")
    _write_kv(out / "bubble_meta.txt", meta)
    print(f"bubble: decay fit {fmt(decay)} (tail exponent N-2s = "
          f"{fmt(params.dimension - 2.0 * params.s)})")
    return EXIT_OK


def cmd_ground_state(cfg):
    params = cfg.params()
    if params.gamma != 1:
        raise ConfigError("ground-state requires the subcritical regime (alpha+beta < 2N/(N-2s))")
    grid = cfg.grid()
    out = _outdir(cfg)
    opts = MinimizeOpts(tol=min(cfg.tol, 1e-6), max_iter=cfg.max_iter)
    w = subcritical_ground_state(grid, params, opts=opts)
    save_field(w, out / "ground_state.csv")
    res = ground_state_residual(w, params)
    decay = decay_exponent_fit(w)
    meta = {
        "config": cfg.as_dict(),
        "residual": res,
        "decay_exponent_fit": decay,
        "expected_tail_exponent": params.dimension + 2.0 * params.s,
        "min_value": float(w.values.min()),
        "max_value": float(w.values.max()),
    }
    dump_json(meta, out / "ground_state_meta.json")
    _write_kv(out / "ground_state_meta.txt", meta)
    print(
        f"ground-state: residual {fmt(res)}, decay fit {fmt(decay)} "
        f"(tail exponent N+2s = {fmt(params.dimension + 2.0 * params.s)})"
    )
    return EXIT_OK


def cmd_solve(cfg):
    params = cfg.params()
    grid = cfg.grid()
    out = _outdir(cfg)
    constants = measure_constants(grid, params)
    f = make_forcing(cfg.density("f", grid), params)
    g = make_forcing(cfg.density("g", grid), params)
    if cfg.f_fraction_of_d > 0:
        f = scale_to_norm(f, cfg.f_fraction_of_d * constants.threshold, params.gamma)
    if cfg.g_fraction_of_d > 0:
        g = scale_to_norm(g, cfg.g_fraction_of_d * constants.threshold, params.gamma)
    report = solve_system(f, g, params, grid, opts=cfg.opts(), constants=constants)
    save_field(report.u_bar, out / "u_bar.csv")
    save_field(report.v_bar, out / "v_bar.csv")
    payload = {
        "config": cfg.as_dict(),
        "constants": constants.as_dict(),
        "report": report.scalars(),
        "positivity": positivity_check(report),
        "strong_residual": residual(report.u_bar, report.v_bar, f, g, params),
    }
    dump_json(payload, out / "solve_report.json")
    write_csv(
        out / "trace.csv",
        ["iter", "energy", "grad_norm", "ball_fraction"],
        report.trace,
    )
    print(
        f"solve: converged={report.converged} iters={report.iterations} "
        f"energy={fmt(report.energy)} grad={fmt(report.grad_norm)} "
        f"ball_fraction={fmt(report.ball_fraction)} distinctness={fmt(report.distinctness)}"
    )
    return EXIT_OK if report.converged else EXIT_NUMERICAL


def cmd_verify(cfg):
    params = cfg.params()
    grid = cfg.grid()
    results = run_all_checks(grid, params, seed=cfg.seed)
    out = _outdir(cfg)
    rows = [(r.name, "pass" if r.passed else "FAIL", r.detail) for r in results]
    write_csv(out / "verify.csv", ["check", "status", "detail"], rows)
    all_ok = True
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        all_ok = all_ok and r.passed
    return EXIT_OK if all_ok else EXIT_NUMERICAL


def _write_kv(path, mapping, prefix=""):
    lines = []

    def emit(obj, prefix):
        for k, v in obj.items():
            if isinstance(v, dict):
                emit(v, f"{prefix}{k}.")
            else:
                lines.append(f"{prefix}{k} = {fmt(v) if isinstance(v, (int, float)) else v}")

    emit(mapping, prefix)
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def make_parser():
    parser = argparse.ArgumentParser(
        prog="fracsys",
        description="Coupled fractional-system lab: constants, profiles, solves, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("constants", "bubble", "ground-state", "solve", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="KEY = VALUE config file")
        p.add_argument("--dimension", type=int, default=None)
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--grid-size", dest="grid_size", type=int, default=None)
        p.add_argument("--box-length", dest="box_length", type=float, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        p.add_argument("--output", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


_COMMANDS = {
    "constants": cmd_constants,
    "bubble": cmd_bubble,
    "ground-state": cmd_ground_state,
    "solve": cmd_solve,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
