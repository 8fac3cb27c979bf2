"""Command-line front end: ``qpercolation <subcommand> [options]``.

Subcommands
-----------
walk      distribution dump and exit-probability time series of one walk
zeta      per-realization percolation probabilities
sweep     disorder-averaged zeta over a p grid
pa        sweep plus the interpolated transition point
analytic  continuum-model curves and transition point
compare   Monte Carlo curve joined with the analytic curve and references
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from math import pi, radians

import numpy as np

from . import __version__, continuum
from .coin import CoinParams, FixedTheta, RandomTheta, theta_field
from .lattice import Geometry, Vertex, build_spec, sample_edges
from .montecarlo import default_grid, realization_seeds, sweep
from .observables import (
    distribution_csv,
    exit_probability,
    fmt,
    zeta_samples_csv,
    zeta_single,
)
from .walk import EvolvePolicy, InitialState, evolve, init_state, step

# Transition points for finite systems, keyed by (geometry, n).
TABLE1_PA = {
    ("square", 50): 0.950, ("square", 100): 0.972,
    ("square", 200): 0.986, ("square", 400): 0.992,
    ("honeycomb", 50): 0.910, ("honeycomb", 100): 0.955,
    ("honeycomb", 200): 0.975, ("honeycomb", 400): 0.985,
    ("nanotube", 50): 0.910, ("nanotube", 100): 0.950,
    ("nanotube", 200): 0.975, ("nanotube", 400): 0.985,
}
# classical bond-percolation thresholds (annotation only)
CLASSICAL_PC = {"square": 0.5, "honeycomb": 0.652, "nanotube": 0.652}

COMMANDS = ("walk", "zeta", "sweep", "pa", "analytic", "compare")
# not echoed into provenance so that outputs are independent of them
_NOT_ECHOED = {"jobs", "output", "config", "dump_config", "command"}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)

    def error(self, message):
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("lattice")
    g.add_argument("--geometry", choices=[g.value for g in Geometry], default="square")
    g.add_argument("--size", type=int, default=50, help="sets both n_x and n_y")
    g.add_argument("--nx", type=int, default=None)
    g.add_argument("--ny", type=int, default=None)
    g.add_argument("--pad", type=int, default=0,
                   help="fully connected columns added on each side")
    g.add_argument("--composite-draws", type=int, choices=(1, 2), default=1)
    c = p.add_argument_group("coin")
    c.add_argument("--theta", type=float, default=pi / 4, help="radians")
    c.add_argument("--theta-deg", type=float, default=None)
    c.add_argument("--theta-random", action="store_true", default=False)
    c.add_argument("--coin-seed", type=int, default=0)
    c.add_argument("--r", type=int, default=1)
    i = p.add_argument_group("initial state")
    i.add_argument("--delta", type=float, default=pi / 2)
    i.add_argument("--eta", type=float, default=pi / 2)
    i.add_argument("--origin", type=int, nargs=2, default=None, metavar=("X", "Y"),
                   help="origin in centred coordinates")
    e = p.add_argument_group("evolution")
    e.add_argument("--max-steps", type=int, default=None)
    e.add_argument("--eps-stat", type=float, default=1e-8)
    o = p.add_argument_group("output")
    o.add_argument("--output", "-o", default=None)
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--config", default=None, help="JSON file of option defaults")
    o.add_argument("--dump-config", action="store_true", default=False)


def _mc(p, grid=True):
    m = p.add_argument_group("monte carlo")
    m.add_argument("--trials", type=int, default=200)
    m.add_argument("--seed", type=int, default=0, help="master seed")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--threshold", type=float, default=0.01)
    if grid:
        m.add_argument("--p-start", type=float, default=0.80)
        m.add_argument("--p-stop", type=float, default=1.00)
        m.add_argument("--p-step", type=float, default=0.005)


def build_parser():
    parser = _Parser(prog="qpercolation",
                     description="Directed quantum walks on percolating lattices.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = {}
    w = sp["walk"] = subs.add_parser("walk", help="single walk")
    _common(w)
    w.add_argument("--steps", type=int, default=None,
                   help="fixed number of steps (default: evolve to convergence)")
    w.add_argument("--p", type=float, default=1.0)
    w.add_argument("--seed", type=int, default=0, help="edge seed")
    z = sp["zeta"] = subs.add_parser("zeta", help="per-realization zeta")
    _common(z)
    _mc(z, grid=False)
    z.add_argument("--p", type=float, required=False, default=0.95)
    helps = {"sweep": "mean zeta over a p grid", "pa": "transition point p_a",
             "compare": "Monte Carlo next to the continuum model and reference values"}
    for name in ("sweep", "pa", "compare"):
        s = sp[name] = subs.add_parser(name, help=helps[name])
        _common(s)
        _mc(s)
    a = sp["analytic"] = subs.add_parser("analytic", help="continuum model")
    _common(a)
    a.add_argument("--threshold", type=float, default=0.01)
    a.add_argument("--p-start", type=float, default=0.80)
    a.add_argument("--p-stop", type=float, default=1.00)
    a.add_argument("--p-step", type=float, default=0.005)
    return parser, sp


def parse(argv):
    parser, subparsers = build_parser()
    argv = list(argv)
    if "--config" in argv:
        cmd = next((a for a in argv if a in COMMANDS), None)
        path = argv[argv.index("--config") + 1]
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if cmd is None:
            cmd = cfg.pop("command", None)
            if cmd not in COMMANDS:
                raise ConfigError("no subcommand given")
            argv.insert(0, cmd)
        cfg.pop("command", None)
        known = {a.dest for a in subparsers[cmd]._actions}
        unknown = set(cfg) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        subparsers[cmd].set_defaults(**cfg)
    return parser.parse_args(argv)


# --------------------------------------------------------------------------
# resolution of options to domain objects

def _resolve(args):
    try:
        spec = build_spec(args.geometry, args.nx or args.size, args.ny or args.size,
                          pad=args.pad)
        if args.theta_random:
            theta = RandomTheta(args.coin_seed)
        else:
            th = radians(args.theta_deg) if args.theta_deg is not None else args.theta
            theta = FixedTheta(th)
        coins = CoinParams(theta, args.r)
        origin = None
        if args.origin is not None:
            origin = Vertex(spec.origin.x + args.origin[0], args.origin[1])
            if not spec.contains(origin):
                raise ValueError(f"origin {args.origin} outside the lattice")
        init = InitialState(args.delta, args.eta, origin)
        policy = EvolvePolicy(args.max_steps, args.eps_stat)
    except (ValueError, IndexError) as exc:
        raise ConfigError(str(exc)) from exc
    if getattr(args, "trials", 1) < 1:
        raise ConfigError("--trials must be >= 1")
    if getattr(args, "jobs", 1) < 1:
        raise ConfigError("--jobs must be >= 1")
    thr = getattr(args, "threshold", 0.01)
    if not 0.0 < thr < 1.0 and args.command != "analytic":
        raise ConfigError("--threshold must lie strictly between 0 and 1")
    return spec, coins, init, policy


def _grid(args):
    if not 0 <= args.p_start <= args.p_stop <= 1 or args.p_step <= 0:
        raise ConfigError("p grid must satisfy 0 <= start <= stop <= 1, step > 0")
    return default_grid(args.p_start, args.p_stop, args.p_step)


def resolved_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())}


def _header(args):
    echo = {k: v for k, v in resolved_config(args).items() if k not in _NOT_ECHOED}
    lines = [f"qpercolation {__version__}", f"command: {args.command}",
             "config: " + json.dumps(echo, sort_keys=True)]
    if "seed" in echo:
        lines.append(f"master_seed: {echo['seed']}")
    return lines


def _emit(text: str, path: str | None):
    """Write ``text`` atomically (temp file then rename), or to stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sibling(path, suffix):
    root, ext = os.path.splitext(path)
    return f"{root}{suffix}{ext or '.csv'}"


# --------------------------------------------------------------------------
# subcommands

def cmd_walk(args):
    spec, coins, init, policy = _resolve(args)
    if not 0.0 <= args.p <= 1.0:
        raise ConfigError("--p must lie in [0, 1]")
    config = sample_edges(spec, args.p, args.seed, args.composite_draws)
    theta = theta_field(spec, coins)
    state = init_state(spec, init)
    series = [(0, exit_probability(state))]
    if args.steps is not None:
        for _ in range(args.steps):
            state = step(state, config, coins, theta)
            series.append((state.t, exit_probability(state)))
        reason = "fixed_steps"
    else:
        pol = policy.resolve(spec)
        reason = "max_steps"
        while state.t < pol.max_steps:
            state = step(state, config, coins, theta)
            series.append((state.t, exit_probability(state)))
            if state.coherent_mass < pol.eps_stat:
                reason = "converged"
                break
    header = _header(args) + [f"termination: {reason}"]
    if args.format == "json":
        prob = state.probability()
        px = spec.centred_x(np.arange(spec.width))
        doc = {
            "provenance": header,
            "distribution": [[int(px[i]), y, float(prob[i, y])]
                             for y in range(spec.n_y) for i in range(spec.width)],
            "exit_probability": [[t, float(v)] for t, v in series],
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.output)
        return 0
    _emit(distribution_csv(state, header), args.output)
    pt = "".join(f"# {h}\n" for h in header) + "t,exit_probability\n"
    pt += "".join(f"{t},{fmt(v)}\n" for t, v in series)
    if args.output:
        _emit(pt, _sibling(args.output, "_pt"))
    return 0


def cmd_zeta(args):
    spec, coins, init, policy = _resolve(args)
    if not 0.0 <= args.p <= 1.0:
        raise ConfigError("--p must lie in [0, 1]")
    samples = []
    for i in range(args.trials):
        seeds = realization_seeds(args.seed, coins, i)
        samples.append(zeta_single(spec, args.p, coins, init, seeds, policy,
                                   args.composite_draws))
    if args.format == "json":
        doc = {"provenance": _header(args),
               "samples": [s.__dict__ for s in samples]}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.output)
    else:
        _emit(zeta_samples_csv(samples, _header(args)), args.output)
    return 0


def _sweep(args):
    spec, coins, init, policy = _resolve(args)
    return sweep(spec, coins, init, _grid(args), args.trials, args.seed, policy,
                 args.threshold, args.jobs, args.composite_draws)


def _emit_sweep(args, res, extra=()):
    header = _header(args) + list(extra)
    if args.format == "json":
        doc = res.to_dict()
        doc["provenance"]["header"] = header
        _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.output)
    else:
        _emit(res.to_csv(header), args.output)


def cmd_sweep(args):
    _emit_sweep(args, _sweep(args))
    return 0


def cmd_pa(args):
    res = _sweep(args)
    pa = "nan" if res.p_a is None else fmt(res.p_a)
    _emit_sweep(args, res, [f"p_a: {pa}"])
    if args.output:
        print(f"p_a,{pa}")
    return 0 if res.p_a is not None else 3


def cmd_analytic(args):
    if not 0.0 < args.threshold <= 1.0:
        raise ConfigError("--threshold must lie in (0, 1]")
    spec, coins, _, _ = _resolve(args)
    n = spec.n_y
    th = coins.theta.theta if isinstance(coins.theta, FixedTheta) else pi / 4
    pa = continuum.analytic_pa(n, args.threshold)
    grid = _grid(args)
    zy, zx = continuum.zeta_curves(grid, n, th)
    header = _header(args) + [f"p_a: {fmt(pa)}"]
    if args.format == "json":
        doc = {"provenance": header, "p_a": pa, "p": [float(p) for p in grid],
               "zeta_y": [float(v) for v in zy], "zeta_x": [float(v) for v in zx]}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.output)
    else:
        text = "".join(f"# {h}\n" for h in header) + "p,zeta_y,zeta_x\n"
        text += "".join(f"{fmt(p)},{fmt(a)},{fmt(b)}\n" for p, a, b in zip(grid, zy, zx))
        _emit(text, args.output)
    if args.output:
        print(f"p_a,{fmt(pa)}")
    return 0


def cmd_compare(args):
    res = _sweep(args)
    spec = res.spec
    ref = TABLE1_PA.get((spec.geometry.value, spec.n_y))
    pc = CLASSICAL_PC[spec.geometry.value]
    header = _header(args) + [
        "p_a: " + ("nan" if res.p_a is None else fmt(res.p_a)),
        "analytic_p_a: " + fmt(continuum.analytic_pa(spec.n_y, args.threshold)),
    ]
    if args.format == "json":
        doc = res.to_dict()
        doc["analytic_zeta"] = [continuum.zeta_y(p, spec.n_y) for p in res.p_grid]
        doc["table1_pa"] = ref
        doc["classical_pc"] = pc
        doc["provenance"]["header"] = header
        _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.output)
        return 0
    lines = [f"# {h}" for h in header]
    lines.append("p,mean_zeta,stderr,analytic_zeta,table1_pa,classical_pc")
    for p, m, s in zip(res.p_grid, res.mean_zeta, res.stderr_zeta):
        lines.append(",".join([fmt(p), fmt(m), fmt(s), fmt(continuum.zeta_y(p, spec.n_y)),
                               "" if ref is None else fmt(ref), fmt(pc)]))
    _emit("\n".join(lines) + "\n", args.output)
    return 0


HANDLERS = {"walk": cmd_walk, "zeta": cmd_zeta, "sweep": cmd_sweep, "pa": cmd_pa,
            "analytic": cmd_analytic, "compare": cmd_compare}


def _fail(kind, message, code=2):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse(argv)
        if args.dump_config:
            _resolve(args)
            sys.stdout.write(json.dumps(resolved_config(args), sort_keys=True, indent=2) + "\n")
            return 0
        return HANDLERS[args.command](args)
    except ConfigError as exc:
        return _fail("config", str(exc))
    except (ValueError, RuntimeError) as exc:
        return _fail("runtime", str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
